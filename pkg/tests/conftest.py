"""Shared test helpers: random valid reuse masks built independently of the detector."""

import numpy as np
import pytest

from streuse import GridShape, ReuseMask, coords_of, index_of


def random_valid_mask(shape: GridShape, rng: np.random.Generator, density: float = 0.4,
                      window: int = 2) -> ReuseMask:
    """A structurally valid mask sampled without running the detector.

    Marks are proposed per (token, channel) with a representative one step
    back along a random axis, and kept only if the representative is not
    itself marked and the token does not already serve as a source. That
    keeps representatives computed and copy depth at one.
    """
    n, d = shape.tokens, shape.d
    reusable = np.zeros((n, d), dtype=bool)
    representative = np.tile(np.arange(n, dtype=np.int64)[:, None], (1, d))
    serving = np.zeros((n, d), dtype=bool)  # entry is someone's representative
    order = rng.permutation(n * d)
    for flat in order:
        tok, c = divmod(int(flat), d)
        if rng.random() >= density or serving[tok, c]:
            continue
        t, h, w = coords_of(tok, shape)
        axes = [(0, t), (1, h), (2, w)]
        rng.shuffle(axes)
        for dim, coord in axes:
            if coord == 0:
                continue
            back = [t, h, w]
            back[dim] -= 1
            rep = index_of(back[0], back[1], back[2], shape)
            if reusable[rep, c]:
                continue
            reusable[tok, c] = True
            representative[tok, c] = rep
            serving[rep, c] = True
            break
    mask = ReuseMask(reusable, representative, window)
    mask.validate()
    return mask


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
