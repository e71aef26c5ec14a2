# seeding.py

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for (seed, fold, grid index, ...); independent of evaluation order."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])
