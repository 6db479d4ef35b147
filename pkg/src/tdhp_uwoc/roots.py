"""Bracketing bisection for monotone scalar functions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    iterations: int
    converged: bool

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float,
    maxiter: int = 400,
) -> Bracket:
    """Shrink ``[lo, hi]`` around a sign change of ``f`` until narrower than ``xtol``.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (either orientation).
    Iteration also stops when the midpoint is no longer representable
    between the ends, so ``xtol=0`` bisects to adjacent floats.
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return Bracket(lo, lo, 0, True)
    if f_hi == 0.0:
        return Bracket(hi, hi, 0, True)
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]")
    rising = f_hi > 0
    n = 0
    while hi - lo > xtol and n < maxiter:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        n += 1
        f_mid = f(mid)
        if f_mid == 0.0:
            return Bracket(mid, mid, n, True)
        if (f_mid > 0) == rising:
            hi = mid
        else:
            lo = mid
    converged = hi - lo <= xtol or not lo < 0.5 * (lo + hi) < hi
    return Bracket(lo, hi, n, converged)
