import time


def gen_run_id(seed, now=None):
    """Run directory name built from the wall clock and the seed.

    Example: ``run-20240105-134501-seed7``
    """
    stamp = time.strftime("%Y%m%d-%H%M%S", time.localtime(now))
    return "run-{}-seed{}".format(stamp, int(seed))
