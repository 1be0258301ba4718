"""Deterministic seed derivation.

All randomness flows from one master seed. Each randomized stage gets
its own child seed derived from (master, stage, index) so that adding
or reordering stages never shifts the random stream of another stage.
"""

from __future__ import annotations

import numpy as np

_STAGE_IDS = {
    "reduce": 1,
    "lda": 2,
    "nmf": 3,
}


def derive_seed(master: int, stage: str, index: int = 0) -> int:
    """Stable 64-bit child seed for a named stage and run index."""
    try:
        stage_id = _STAGE_IDS[stage]
    except KeyError:
        raise ValueError(f"unknown stage {stage!r}") from None
    ss = np.random.SeedSequence([int(master), stage_id, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
