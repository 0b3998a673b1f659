"""Closed-form geometry of cycle-scenario full-correlator polytopes.

The local polytope of the n-cycle in correlator space is the [-1,1]^{2n}
hypercube with a corner pyramid cut off at every odd-parity sign vector.
These pyramids have identical volume, so the local-volume ratio is exact:

    V_P = 2^{2n} / (2n)!        (one pyramid)
    ratio = 1 - 2^{2n-1} / (2n)!

Factorials are evaluated in exact integer arithmetic before conversion to
float, so there is no intermediate overflow up to the supported n = 12.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

MAX_N = 12


def simplex_volume(v: int, s: float) -> float:
    """Volume of a regular v-simplex with side length s:
    s^v / v! * sqrt((v+1) / 2^v)."""
    if v < 1:
        raise ValueError("v must be >= 1")
    if s <= 0:
        raise ValueError("s must be > 0")
    return float(s) ** v / math.factorial(v) * math.sqrt((v + 1) / 2.0**v)


def _base_area(n: int) -> float:
    """Area of the pyramid base: a regular (2n-1)-simplex with side sqrt(8)."""
    return simplex_volume(2 * n - 1, math.sqrt(8.0))


def pyramid_volume(n: int) -> float:
    """Volume of one cut-corner pyramid: 2^{2n} / (2n)!."""
    if n < 2:
        raise ValueError("n must be >= 2")
    exact = float(Fraction(2 ** (2 * n), math.factorial(2 * n)))
    # cross-check against the geometric form h * A_B / (2n), h = 2 / sqrt(2n)
    geometric = (2.0 / math.sqrt(2 * n)) * _base_area(n) / (2 * n)
    if not math.isclose(exact, geometric, rel_tol=1e-12):
        raise AssertionError(
            f"pyramid volume cross-check failed: {exact} vs {geometric}"
        )
    return exact


def local_volume_ratio(n: int) -> float:
    """Fraction of the correlator hypercube occupied by the local polytope:
    1 - 2^{2n-1} / (2n)!."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return float(1 - Fraction(2 ** (2 * n - 1), math.factorial(2 * n)))


def cycle_vertex_partition(n: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Split the 2^{2n} sign vectors of length 2n by the parity of their
    -1 entries: even parity -> local vertex, odd parity -> nonlocal."""
    if n < 2 or n > MAX_N:
        raise ValueError(f"n must be in [2, {MAX_N}]")
    local, nonlocal_ = [], []
    for signs in itertools.product((1, -1), repeat=2 * n):
        if signs.count(-1) % 2 == 0:
            local.append(signs)
        else:
            nonlocal_.append(signs)
    return local, nonlocal_


def local_vertex_array(n: int) -> np.ndarray:
    """Even-parity sign vectors as a (2^{2n-1}, 2n) float array."""
    local, _ = cycle_vertex_partition(n)
    return np.array(local, dtype=float)
