"""
Closed-form BER of PAM2, PAM4 and time-domain hybrid PAM (TDHP).

A TDHP frame carries a fraction ``p`` of PAM4 symbols and ``1 - p`` of PAM2
symbols.  The power-control factor ``q`` moves effective SNR from the PAM2
part (scaled by ``1 - q``) to the PAM4 part (scaled by ``1 + q``).

All BER functions accept scalars or numpy arrays for ``snr``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erfc

from .errors import DomainError, NoSolution
from .roots import bisect

__all__ = [
    "FEC_THRESHOLD",
    "DEFAULT_Q_GRID",
    "TdhpParams",
    "FecSearchResult",
    "QOptimum",
    "db_linear",
    "linear_db",
    "ber_pam2",
    "ber_pam4",
    "ber_tdhp",
    "ber_floor",
    "fec_limit_snr",
    "optimize_q",
    "bits_per_symbol",
]

FEC_THRESHOLD = 3.4e-3
DEFAULT_Q_GRID = tuple(round(0.1 * k, 1) for k in range(10))

_BRACKET_DB = (-10.0, 60.0)
_MAX_EXPANSIONS = 12


@dataclass(frozen=True)
class TdhpParams:
    """PAM4 ratio ``p`` and power split ``q``, both in [0, 1].

    For pure formats (``p`` of 0 or 1) ``q`` has no meaning and is stored as 0.
    """

    p: float
    q: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"q must lie in [0, 1], got {self.q}")
        if self.p in (0.0, 1.0):
            object.__setattr__(self, "q", 0.0)

    @property
    def bits_per_symbol(self) -> float:
        return 1.0 + self.p


@dataclass(frozen=True)
class FecSearchResult:
    snr_linear: float
    snr_db: float
    threshold: float
    converged: bool
    bracket_db: tuple[float, float]
    iterations: int


@dataclass(frozen=True)
class QOptimum:
    """Best power split for a fixed ``p``.

    ``grid`` holds ``(q, fec_limit_db)`` for every evaluated q; infeasible
    points carry ``None``.
    """

    p: float
    q_star: float
    snr_at_fec_limit: float
    grid: list[tuple[float, float | None]] = field(default_factory=list)


def db_linear(x):
    out = 10.0 ** (np.asarray(x, dtype=float) / 10.0)
    return out if np.ndim(x) else float(out)


def linear_db(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("linear_db needs strictly positive input")
    out = 10.0 * np.log10(arr)
    return out if np.ndim(x) else float(out)


def _check_snr_q(snr, q):
    if np.any(np.asarray(snr) < 0) or np.any(np.isnan(snr)):
        raise DomainError("snr must be non-negative")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def ber_pam2(snr, q: float = 0.0):
    """BER of the PAM2 part: ``0.5 * erfc(sqrt(snr * (1 - q) / 2))``."""
    _check_snr_q(snr, q)
    val = 0.5 * erfc(np.sqrt(0.5 * np.asarray(snr, dtype=float) * (1.0 - q)))
    return _scalar_or_array(val, snr)


def ber_pam4(snr, q: float = 0.0):
    """BER of the Gray-coded PAM4 part: ``3/8 * erfc(sqrt(snr * (1 + q) / 14))``."""
    _check_snr_q(snr, q)
    val = 0.375 * erfc(np.sqrt(np.asarray(snr, dtype=float) * (1.0 + q) / 14.0))
    return _scalar_or_array(val, snr)


def ber_tdhp(snr, params: TdhpParams):
    p, q = params.p, params.q
    if p == 0.0:
        return ber_pam2(snr, q)
    if p == 1.0:
        return ber_pam4(snr, q)
    return p * ber_pam4(snr, q) + (1.0 - p) * ber_pam2(snr, q)


def ber_floor(params: TdhpParams) -> float:
    """BER approached as SNR -> infinity (nonzero only when PAM2 gets no power)."""
    if params.q == 1.0 and params.p < 1.0:
        return 0.5 * (1.0 - params.p)
    return 0.0


def bits_per_symbol(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return 1.0 + p


def fec_limit_snr(
    params: TdhpParams,
    threshold: float = FEC_THRESHOLD,
    tol_db: float = 0.01,
) -> FecSearchResult:
    """Find the SNR at which the TDHP BER equals ``threshold``.

    BER is strictly decreasing in SNR, so the crossing is bracketed in dB
    (starting from [-10, 60] dB, doubling the width around its centre as
    needed) and bisected until the bracket is narrower than ``tol_db``.

    Raises
    ------
    NoSolution
        If the BER floor is at or above ``threshold``.
    DomainError
        If ``threshold`` is not below the zero-SNR BER or ``tol_db <= 0``.
    """
    if tol_db <= 0:
        raise DomainError("tol_db must be positive")
    ceiling = ber_tdhp(0.0, params)
    if not 0.0 < threshold < ceiling:
        raise DomainError(
            f"threshold {threshold:g} must lie in (0, {ceiling:g}) for p={params.p}, q={params.q}"
        )
    floor = ber_floor(params)
    if floor >= threshold:
        raise NoSolution(
            f"BER floor {floor:g} for p={params.p}, q={params.q} is not below threshold {threshold:g}",
            floor=floor,
        )

    def excess(snr_db: float) -> float:
        return ber_tdhp(10.0 ** (snr_db / 10.0), params) - threshold

    lo, hi = _BRACKET_DB
    for _ in range(_MAX_EXPANSIONS):
        if excess(lo) > 0 > excess(hi):
            break
        centre, half = 0.5 * (lo + hi), hi - lo
        lo, hi = centre - half, centre + half
    else:
        raise NoSolution(f"could not bracket the FEC limit within [{lo:g}, {hi:g}] dB", floor)

    br = bisect(excess, lo, hi, xtol=tol_db)
    return FecSearchResult(
        snr_linear=10.0 ** (br.mid / 10.0),
        snr_db=br.mid,
        threshold=threshold,
        converged=br.converged,
        bracket_db=(br.lo, br.hi),
        iterations=br.iterations,
    )


def optimize_q(
    p: float,
    threshold: float = FEC_THRESHOLD,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    tol_db: float = 0.01,
    refine: bool = False,
) -> QOptimum:
    """Pick the power split with the lowest FEC-limit SNR for a fixed ``p``.

    Grid points whose BER floor blocks the threshold are skipped.  Ties go to
    the smaller q.  With ``refine=True`` a bounded scalar search runs between
    the grid neighbours of the discrete minimum and replaces it if better.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"optimize_q needs 0 < p < 1, got {p}")
    qs = sorted(float(q) for q in q_grid)
    if not qs:
        raise DomainError("q_grid is empty")
    if qs[0] < 0.0 or qs[-1] >= 1.0:
        raise DomainError("q_grid values must lie in [0, 1)")

    grid: list[tuple[float, float | None]] = []
    for q in qs:
        try:
            grid.append((q, fec_limit_snr(TdhpParams(p, q), threshold, tol_db).snr_db))
        except NoSolution:
            grid.append((q, None))

    feasible = [(snr, q) for q, snr in grid if snr is not None]
    if not feasible:
        raise NoSolution(f"no q in the grid reaches BER {threshold:g} at p={p}")
    best_snr, best_q = min(feasible)  # tuples: ties resolve to smaller q

    if refine:
        best_q, best_snr = _refine(p, qs, best_q, best_snr, threshold, tol_db)

    return QOptimum(p=p, q_star=best_q, snr_at_fec_limit=best_snr, grid=grid)


def _refine(p, qs, q0, snr0, threshold, tol_db):
    idx = qs.index(q0)
    step = (qs[-1] - qs[0]) / (len(qs) - 1) if len(qs) > 1 else 0.1
    lo = qs[idx - 1] if idx > 0 else max(q0 - step, 0.0)
    hi = qs[idx + 1] if idx + 1 < len(qs) else min(q0 + step, 1.0 - 1e-9)

    def objective(q):
        try:
            return fec_limit_snr(TdhpParams(p, q), threshold, tol_db * 1e-3).snr_db
        except NoSolution:
            return math.inf

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    if res.success and res.fun < snr0:
        return float(res.x), float(res.fun)
    return q0, snr0
