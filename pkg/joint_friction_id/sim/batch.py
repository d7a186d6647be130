"""Batch simulation of an excitation manifest."""
import logging
from typing import List
from typing import Sequence

from joint_friction_id import constant
from joint_friction_id.excitation import trajectory
from joint_friction_id.excitation.trajectory import TrajectorySpec
from joint_friction_id.sim import jointsim
from joint_friction_id.sim.fixtures import JointFixture
from joint_friction_id.util import parallel


def simulate_spec(
    spec: TrajectorySpec,
    fixture: JointFixture,
    seed,
    log_rate=constant.DEFAULT_LOG_RATE,
) -> jointsim.RawLog:
    currents = trajectory.command_samples(spec)
    state = jointsim.rest_state(fixture.params, spec.initial_joint_position)
    return jointsim.run_trajectory(
        fixture.params,
        fixture.ground_truth,
        currents,
        log_rate=log_rate,
        noise=fixture.noise,
        seed=seed,
        initial_state=state,
    )


def simulate_batch(
    specs: Sequence[TrajectorySpec],
    fixture: JointFixture,
    seed,
    log_rate=constant.DEFAULT_LOG_RATE,
    parallelism=1,
) -> List[jointsim.RawLog]:
    """Simulates every spec; trajectory k uses noise seed ``seed + k``."""
    if not specs:
        raise ValueError("no trajectories to simulate")
    logs = parallel.run_parallel(
        simulate_spec,
        [
            {"spec": spec, "fixture": fixture, "seed": seed + k, "log_rate": log_rate}
            for k, spec in enumerate(specs)
        ],
        parallelism=parallelism,
        desc="simulate",
    )
    logging.info(
        "simulated %s trajectories, %s samples, %s truncated",
        len(logs),
        sum(len(log) for log in logs),
        sum(1 for log in logs if log.truncated),
    )
    return logs
