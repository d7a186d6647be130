"""Random search over PINN hyperparameters, objective is validation data MSE."""
import logging
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Tuple

import numpy as np

from joint_friction_id import constant
from joint_friction_id.io import table_io
from joint_friction_id.pinn import training
from joint_friction_id.pinn.network import CI_EPOCHS
from joint_friction_id.pinn.network import PinnConfig
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.util import parallel

INT_DIMENSIONS = ("batch_size", "hidden1", "hidden2", "history_length")
FLOAT_DIMENSIONS = ("learning_rate", "lam", "dropout_rate")


@dataclass(frozen=True)
class SearchSpace:
    """Inclusive (low, high) bounds; learning_rate is sampled log-uniformly."""

    batch_size: Tuple[int, int] = (1024, 8192)
    hidden1: Tuple[int, int] = (64, 320)
    hidden2: Tuple[int, int] = (64, 320)
    learning_rate: Tuple[float, float] = (1e-4, 3e-3)
    history_length: Tuple[int, int] = (5, 30)
    lam: Tuple[float, float] = (0.0, 0.6)
    dropout_rate: Tuple[float, float] = (0.0, 0.2)
    epochs: int = CI_EPOCHS

    def validate(self):
        for name in INT_DIMENSIONS + FLOAT_DIMENSIONS:
            bounds = getattr(self, name)
            if bounds is None or len(bounds) != 2:
                raise ValueError("search dimension {} needs (low, high) bounds".format(name))
            low, high = bounds
            if low > high:
                raise ValueError(
                    "search dimension {} is empty: low {} > high {}".format(name, low, high),
                )
        for name in INT_DIMENSIONS:
            if getattr(self, name)[0] < 1:
                raise ValueError("{} must be >= 1, got {}".format(name, getattr(self, name)))
        if self.learning_rate[0] <= 0:
            raise ValueError("learning_rate bounds must be > 0, got {}".format(self.learning_rate))
        if self.lam[0] < 0 or self.lam[1] > 1:
            raise ValueError("lam bounds must lie in [0, 1], got {}".format(self.lam))
        if self.dropout_rate[0] < 0 or self.dropout_rate[1] >= 1:
            raise ValueError(
                "dropout_rate bounds must lie in [0, 1), got {}".format(self.dropout_rate),
            )
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1, got {}".format(self.epochs))
        return self

    def sample(self, rng, seed) -> PinnConfig:
        ints = {name: int(rng.integers(*getattr(self, name), endpoint=True)) for name in INT_DIMENSIONS}
        lr_low, lr_high = np.log(self.learning_rate)
        return PinnConfig(
            learning_rate=float(np.exp(rng.uniform(lr_low, lr_high))),
            lam=float(rng.uniform(*self.lam)),
            dropout_rate=float(rng.uniform(*self.dropout_rate)),
            epochs=self.epochs,
            seed=seed,
            **ints,
        ).validate()

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}).validate()


@dataclass
class Trial:
    trial: int
    config: PinnConfig
    val_loss: float

    def row(self):
        c = self.config
        return [
            self.trial,
            c.seed,
            c.batch_size,
            c.hidden1,
            c.hidden2,
            c.learning_rate,
            c.history_length,
            c.lam,
            c.dropout_rate,
            self.val_loss,
        ]


@dataclass
class SearchResult:
    best_config: PinnConfig
    best_val_loss: float
    trials: List[Trial] = field(default_factory=list)

    def save_trials(self, path, provenance=None):
        rows = np.array([t.row() for t in self.trials], dtype=np.float64)
        table_io.write_table(path, constant.TRIAL_COLUMNS, list(rows.T), provenance)


def _run_trial(dataset, params, config, split_seed, trial):
    result = training.train(dataset, params, config, split_seed=split_seed)
    logging.info("trial %s val_loss=%.6g config=%s", trial, result.best_val_loss, config)
    return Trial(trial, config, result.best_val_loss)


def random_search(
    dataset,
    params: JointParams,
    space: SearchSpace,
    n_trials,
    seed,
    parallelism=1,
) -> SearchResult:
    """Trains n_trials sampled configs and keeps the lowest validation loss.

    Configs are drawn up front from the seed, so the trial table does not
    depend on the completion order of parallel trials. Every trial splits its
    own windows with the search seed and fits its physics target on its own
    training side, so no validation window of a trial feeds that fit.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1, got {}".format(n_trials))
    space.validate()
    rng = np.random.default_rng(seed)
    configs = [space.sample(rng, seed + k) for k in range(n_trials)]

    trials = parallel.run_parallel(
        _run_trial,
        [
            {"dataset": dataset, "params": params, "config": c, "split_seed": seed, "trial": k}
            for k, c in enumerate(configs)
        ],
        parallelism=parallelism,
        desc="random search",
    )
    best = min(trials, key=lambda t: t.val_loss)
    logging.info("best trial %s val_loss=%.6g", best.trial, best.val_loss)
    return SearchResult(best.config, best.val_loss, trials)
