"""Experiments on tail probabilities of lacunary trigonometric sums.

Importing the package sizes numba's worker pool before numba itself is
imported: the pool size is fixed at first import, and runs must be able to
request more threads than there are cores (results never depend on it).
"""

import os as _os

_os.environ.setdefault("NUMBA_NUM_THREADS", str(max(8, _os.cpu_count() or 1)))
_os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from .sequences import (  # noqa: E402
    BitBudgetError,
    ConstructionPlan,
    GrowthFunction,
    LacunarySequence,
    SequenceError,
    gen_erdos_fortet,
    gen_geometric,
    gen_pow2,
    gen_theoremB,
    verify_gap,
)
from .dilated import DyadicPoint, TrigPolynomial, eval_f, eval_SN, frac_mul, l2_norm  # noqa: E402

__all__ = [
    "BitBudgetError",
    "ConstructionPlan",
    "DyadicPoint",
    "GrowthFunction",
    "LacunarySequence",
    "SequenceError",
    "TrigPolynomial",
    "eval_SN",
    "eval_f",
    "frac_mul",
    "gen_erdos_fortet",
    "gen_geometric",
    "gen_pow2",
    "gen_theoremB",
    "l2_norm",
    "verify_gap",
]

__version__ = "0.1.0"
