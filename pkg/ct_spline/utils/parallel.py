from typing import Callable, Iterable, List, TypeVar, Union  # isort:skip
from multiprocessing.pool import Pool

from tqdm import tqdm

T = TypeVar("T")


class DumbPool:
    """
    In-process pool with the part of the ``multiprocessing.Pool``
    interface used here.
    """
    def imap_unordered(self, func: Callable, args: Iterable):
        return map(func, args)

    def __enter__(self) -> "DumbPool":
        return self

    def __exit__(self, *exc_info) -> None:
        pass


PoolLike = Union[Pool, DumbPool]


def get_pool(workers: int = 0) -> PoolLike:
    """
    ``Pool(workers)``; in-process for ``0`` or ``None``.
    """
    if workers is None or workers <= 0:
        return DumbPool()
    return Pool(workers)


def parallel_imap(func: Callable, args: Iterable, pool: PoolLike) -> List[T]:
    return list(pool.imap_unordered(func, args))


def tqdm_parallel_imap(
    func: Callable,
    args: Iterable,
    pool: PoolLike,
    total: int = None,
    pbar=tqdm,
    desc: str = None,
) -> List[T]:
    """
    ``parallel_imap`` behind a progress bar, ``pbar=None`` hides it.
    Results come in completion order.
    """
    if pbar is None:
        return parallel_imap(func, args, pool)
    if total is None and hasattr(args, "__len__"):
        total = len(args)
    return list(pbar(pool.imap_unordered(func, args), total=total, desc=desc))


__all__ = ["DumbPool", "get_pool", "parallel_imap", "tqdm_parallel_imap"]
