"""Counter-based random numbers for reproducible simulation.

The generator identity is part of the public contract: a uniform draw for
(student, year step) is produced by chaining the SplitMix64 finalizer over
the tuple ``(master_seed, cohort_year, replica_index, step_index)`` and
mapping the top 53 bits of the result into [0, 1).  Because each draw is a
pure function of its coordinates, results are identical no matter how the
work is ordered or parallelized, and the scheme can be reproduced exactly
outside this package.
"""

from __future__ import annotations

import numpy as np

__all__ = ["uniforms", "uniform"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = float(2.0**-53)


def _mix(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arithmetic wraps silently in numpy
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, cohort_year: int, replicas: np.ndarray, step: int) -> np.ndarray:
    """Vector of uniforms in [0, 1), one per replica index."""
    replicas = np.asarray(replicas, dtype=np.int64).view(np.uint64)
    with np.errstate(over="ignore"):  # modular wrap-around is the algorithm
        state = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GAMMA)
        state = _mix(state ^ (np.int64(cohort_year).view(np.uint64) + _GAMMA))
        state = _mix(state ^ (replicas + _GAMMA))
        state = _mix(state ^ (np.int64(step).view(np.uint64) + _GAMMA))
    return (state >> np.uint64(11)).astype(np.float64) * _INV_2_53


def uniform(seed: int, cohort_year: int, replica: int, step: int) -> float:
    """Scalar convenience wrapper around :func:`uniforms`."""
    return float(uniforms(seed, cohort_year, np.array([replica]), step)[0])
