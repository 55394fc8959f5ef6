import random

import numpy as np


def set_global_seed(seed: int) -> None:
    """
    Seeds ``random`` and the global numpy generator.
    """
    random.seed(seed)
    np.random.seed(seed)


__all__ = ["set_global_seed"]
