from multiprocessing.dummy import Pool
from typing import Callable
from typing import List

from tqdm import tqdm


def run_parallel(func: Callable, kwargs_list: List[dict], parallelism=1, desc=None):
    """Calls func once per kwargs dict on a thread pool.

    Results come back in submission order whatever the completion order.

    Args:
        func: work function, must not share mutable state between calls
        kwargs_list: keyword arguments of every call
        parallelism(int): number of worker threads
        desc(str): progress bar label

    Returns:
        list of results, one per kwargs dict
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1, got {}".format(parallelism))
    async_res = []
    pool = Pool(processes=parallelism)
    for kwds in kwargs_list:
        async_res.append(pool.apply_async(func, kwds=kwds))
    pool.close()
    try:
        ret = [res.get() for res in tqdm(async_res, desc=desc, disable=not async_res)]
    finally:
        pool.join()
    return ret
