"""
Geometric link budget for a laser-diode / photodiode underwater link.

The received SNR at distance ``L`` is::

    SNR(L) = P_t D^2 cos(phi) / (4 tan^2(theta) P_n) * exp(-K L) / L^2

and the maximum distance for a required SNR solves
``exp(K L) L^2 = C`` with ``C`` the geometric prefactor divided by that SNR.
Everything is evaluated through logarithms so large ``K*L`` cannot overflow.
Angles are in degrees at every public interface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .analytic import FEC_THRESHOLD, TdhpParams, fec_limit_snr
from .channel import ChannelPreset
from .errors import ConfigError, DomainError
from .roots import bisect

__all__ = [
    "ApertureMode",
    "LinkGeometry",
    "LmaxResult",
    "aperture",
    "effective_aperture",
    "log_budget",
    "snr_at_distance",
    "solve_lmax",
    "solve_link_equation",
    "lmax_for_params",
]


class ApertureMode(str, Enum):
    EXPLICIT = "explicit"
    FROM_FOV = "from-fov"


@dataclass(frozen=True)
class LinkGeometry:
    """Transmitter and receiver optics.  Defaults reproduce the reference link.

    ``NEP`` (W/sqrt(Hz)) and ``BW`` (Hz) are carried for reference only; the
    noise power ``P_n`` enters the budget directly.
    """

    P_t: float = 0.5
    P_n: float = 2e-6
    theta: float = 10.0
    phi: float = 10.0
    fov: float = 10.0
    F: float = 0.6
    D_explicit: float | None = 0.2
    NEP: float = 0.4e-12
    BW: float = 1e9

    def __post_init__(self):
        checks = [
            ("P_t", self.P_t > 0, "> 0"),
            ("P_n", self.P_n > 0, "> 0"),
            ("theta", 0 < self.theta < 90, "in (0, 90) degrees"),
            ("phi", 0 <= self.phi < 90, "in [0, 90) degrees"),
            ("fov", 0 < self.fov < 90, "in (0, 90) degrees"),
            ("F", self.F > 0, "> 0"),
            ("D_explicit", self.D_explicit is None or self.D_explicit > 0, "> 0"),
        ]
        for name, ok, rule in checks:
            if not ok:
                raise DomainError(f"{name} must be {rule}, got {getattr(self, name)}")

    def with_(self, **changes) -> "LinkGeometry":
        return replace(self, **changes)


@dataclass(frozen=True)
class LmaxResult:
    L_max: float
    residual: float
    iterations: int


def aperture(F: float, fov: float) -> float:
    """Receiver aperture diameter ``2 F tan(fov)`` for a field of view in degrees."""
    if F <= 0:
        raise DomainError(f"focal length must be > 0, got {F}")
    if not 0 <= fov < 90:
        raise DomainError(f"fov must be in [0, 90) degrees, got {fov}")
    return 2.0 * F * math.tan(math.radians(fov))


def effective_aperture(geometry: LinkGeometry, mode: ApertureMode | str = ApertureMode.EXPLICIT) -> float:
    mode = ApertureMode(mode)
    if mode is ApertureMode.EXPLICIT:
        if geometry.D_explicit is None:
            raise ConfigError("explicit aperture mode needs D_explicit (D_m)")
        return geometry.D_explicit
    return aperture(geometry.F, geometry.fov)


def log_budget(
    geometry: LinkGeometry,
    mode: ApertureMode | str = ApertureMode.EXPLICIT,
) -> float:
    """Natural log of ``P_t D^2 cos(phi) / (4 tan^2(theta) P_n)``."""
    D = effective_aperture(geometry, mode)
    return (
        math.log(geometry.P_t)
        + 2.0 * math.log(D)
        + math.log(math.cos(math.radians(geometry.phi)))
        - math.log(4.0)
        - 2.0 * math.log(math.tan(math.radians(geometry.theta)))
        - math.log(geometry.P_n)
    )


def snr_at_distance(
    geometry: LinkGeometry,
    K: float,
    L: float,
    aperture_mode: ApertureMode | str = ApertureMode.EXPLICIT,
) -> float:
    """Linear SNR received at distance ``L`` metres through attenuation ``K``."""
    if L <= 0:
        raise DomainError(f"distance must be > 0, got {L}")
    if K < 0:
        raise DomainError(f"attenuation must be >= 0, got {K}")
    return math.exp(log_budget(geometry, aperture_mode) - K * L - 2.0 * math.log(L))


def solve_link_equation(K: float, log_C: float) -> LmaxResult:
    """Solve ``exp(K L) L^2 = exp(log_C)`` for ``L > 0``.

    The left side is strictly increasing, so bisection on
    ``g(L) = K L + 2 ln L - log_C`` is safe.  The bracket starts at
    ``[1e-6, 1]`` and grows (or shrinks) geometrically until it holds the
    root.  ``residual`` is ``|exp(K L) L^2 / C - 1|``.
    """
    if K < 0:
        raise DomainError(f"attenuation must be >= 0, got {K}")
    if K == 0.0:
        L = math.exp(0.5 * log_C)
        return LmaxResult(L, abs(math.expm1(2.0 * math.log(L) - log_C)), 0)

    def g(L: float) -> float:
        return K * L + 2.0 * math.log(L) - log_C

    lo, hi = 1e-6, 1.0
    while g(hi) < 0:
        lo, hi = hi, hi * 2.0
    while g(lo) > 0:
        lo, hi = lo * 0.5, lo
    # xtol=0: bisect down to adjacent floats
    br = bisect(g, lo, hi, xtol=0.0)
    L = br.lo if abs(g(br.lo)) <= abs(g(br.hi)) else br.hi
    return LmaxResult(L, abs(math.expm1(g(L))), br.iterations)


def solve_lmax(
    geometry: LinkGeometry,
    K: float,
    required_snr: float,
    aperture_mode: ApertureMode | str = ApertureMode.EXPLICIT,
) -> LmaxResult:
    """Longest distance at which the link still delivers ``required_snr`` (linear)."""
    if required_snr <= 0:
        raise DomainError(f"required SNR must be > 0, got {required_snr}")
    log_C = log_budget(geometry, aperture_mode) - math.log(required_snr)
    return solve_link_equation(K, log_C)


def lmax_for_params(
    geometry: LinkGeometry,
    channel: ChannelPreset,
    params: TdhpParams,
    threshold: float = FEC_THRESHOLD,
    aperture_mode: ApertureMode | str = ApertureMode.EXPLICIT,
    tol_db: float = 0.01,
) -> LmaxResult:
    fec = fec_limit_snr(params, threshold, tol_db)
    return solve_lmax(geometry, channel.K, fec.snr_linear, aperture_mode)
