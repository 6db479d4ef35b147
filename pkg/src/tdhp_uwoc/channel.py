"""
Beer-Lambert propagation for underwater optical links.

Only the composite beam attenuation coefficient is used for link budgets;
the absorption/scattering split is exposed as plain calculators because no
numeric values for its parts are available.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

__all__ = [
    "ChannelLabel",
    "ChannelPreset",
    "AbsorptionModel",
    "WaterType",
    "WATER_TYPES",
    "RED",
    "GREEN",
    "BLUE",
    "PRESETS",
    "preset",
    "received_power",
    "beam_attenuation",
    "absorption_coefficient",
]


class ChannelLabel(str, Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ChannelPreset:
    """Laser colour and its beam attenuation coefficient ``K`` in 1/m."""

    label: ChannelLabel
    wavelength_nm: float | None
    K: float

    def __post_init__(self):
        if not math.isfinite(self.K) or self.K < 0:
            raise DomainError(f"attenuation coefficient must be >= 0, got {self.K}")
        if self.label is not ChannelLabel.CUSTOM and self.K <= 0:
            raise DomainError("preset attenuation coefficients must be > 0")

    @classmethod
    def custom(cls, K: float, wavelength_nm: float | None = None) -> "ChannelPreset":
        return cls(ChannelLabel.CUSTOM, wavelength_nm, float(K))

    @property
    def name(self) -> str:
        return self.label.value


RED = ChannelPreset(ChannelLabel.RED, 650.0, 0.3)
GREEN = ChannelPreset(ChannelLabel.GREEN, 550.0, 0.07)
BLUE = ChannelPreset(ChannelLabel.BLUE, 450.0, 0.02)
PRESETS = {p.name: p for p in (RED, GREEN, BLUE)}


def preset(name: str) -> ChannelPreset:
    """Look up a channel preset by colour name (case-insensitive)."""
    try:
        return PRESETS[name.strip().lower()]
    except KeyError:
        raise DomainError(
            f"unknown channel {name!r}; expected one of {sorted(PRESETS)}"
        ) from None


@dataclass(frozen=True)
class AbsorptionModel:
    """Temperature-dependent absorption ``K_A = K_A0 + T*a`` plus scattering ``K_S``."""

    K_A0: float
    T: float
    a: float
    K_S: float = 0.0

    def __post_init__(self):
        if self.K_A0 < 0 or self.K_S < 0:
            raise DomainError("K_A0 and K_S must be non-negative")
        if self.K_A0 + self.T * self.a < 0:
            raise DomainError(
                f"absorption K_A0 + T*a = {self.K_A0 + self.T * self.a:g} is negative"
            )


@dataclass(frozen=True)
class WaterType:
    name: str
    optimum_band_nm: tuple[float, float]
    turbidity: str


WATER_TYPES = {
    "pure_seafloor": WaterType("PureSeafloor", (450.0, 500.0), "low"),
    "shallow_sea": WaterType("ShallowSea", (520.0, 570.0), "high"),
    "dirty": WaterType("Dirty", (520.0, 570.0), "very high"),
}


def _check_nonneg(**values):
    for key, val in values.items():
        if not val >= 0:
            raise DomainError(f"{key} must be >= 0, got {val}")


def received_power(P0: float, K_T: float, d: float) -> float:
    """Power left after distance ``d`` through water with attenuation ``K_T``.

    Parameters
    ----------
    P0 : float
        Launched optical power in watts.
    K_T : float
        Beam attenuation coefficient in 1/m.
    d : float
        Propagation distance in metres.
    """
    _check_nonneg(P0=P0, K_T=K_T, d=d)
    return P0 * math.exp(-K_T * d)


def beam_attenuation(K_A: float, K_S: float) -> float:
    """Total attenuation as the sum of absorption and scattering."""
    _check_nonneg(K_A=K_A, K_S=K_S)
    return K_A + K_S


def absorption_coefficient(model: AbsorptionModel) -> float:
    K_A = model.K_A0 + model.T * model.a
    if K_A < 0:
        raise DomainError(f"unphysical absorption coefficient {K_A:g}")
    return K_A
