import contextlib
import logging
import time


def current_ts():
    return int(round(time.time() * 1000.0))


def cost_time(start_time):
    return int(round(time.time() * 1000.0 - start_time))


@contextlib.contextmanager
def stage_timer(stage):
    """Logs how long the wrapped stage took, in milliseconds."""
    start_time = current_ts()
    logging.info("stage %s started", stage)
    try:
        yield
    except Exception:
        logging.error(
            "stage %s failed, time-cost(ms)=%s",
            stage,
            cost_time(start_time),
        )
        raise
    logging.info("stage %s finished, time-cost(ms)=%s", stage, cost_time(start_time))
