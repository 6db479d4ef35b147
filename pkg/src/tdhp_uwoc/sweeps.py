"""
Parameter sweeps that tabulate FEC limits and maximum distances.

Every row is computed by calling :func:`tdhp_uwoc.link.lmax_for_params` on
exactly the inputs it records, so any row can be replayed on its own.
Rows come back sorted by ``(value, channel, p, mode)`` whatever the
evaluation order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .analytic import DEFAULT_Q_GRID, FEC_THRESHOLD, TdhpParams, fec_limit_snr, optimize_q
from .channel import BLUE, GREEN, RED, ChannelPreset
from .errors import DomainError, NoSolution
from .link import ApertureMode, LinkGeometry, lmax_for_params

__all__ = [
    "Variable",
    "SweepSpec",
    "SweepRecord",
    "CSV_FIELDS",
    "DEFAULT_P_GRID",
    "DEFAULT_THETA_GRID",
    "DEFAULT_PHI_GRID",
    "DEFAULT_FOV_GRID",
    "optimum_q",
    "sweep_p",
    "sweep_q",
    "sweep_geometry",
    "run_sweep",
    "lmax_improvement",
]

DEFAULT_P_GRID = tuple(round(0.1 * k, 1) for k in range(11))
DEFAULT_THETA_GRID = (10.0, 15.0, 20.0, 25.0, 30.0)
DEFAULT_PHI_GRID = (5.0, 10.0, 15.0, 20.0, 25.0)
DEFAULT_FOV_GRID = (5.0, 10.0, 15.0, 20.0, 25.0)
ALL_CHANNELS = (RED, GREEN, BLUE)

CSV_FIELDS = ("variable", "value", "channel", "p", "q_used", "mode", "fec_limit_db", "lmax_m")

OPTIMUM = "optimum"
NON_OPTIMUM = "non-optimum"
SCAN = "scan"


class Variable(str, Enum):
    P = "p"
    Q = "q"
    THETA = "theta"
    PHI = "phi"
    FOV = "fov"


_GEOMETRY_FIELD = {Variable.THETA: "theta", Variable.PHI: "phi", Variable.FOV: "fov"}


@dataclass(frozen=True)
class SweepRecord:
    variable: str
    value: float
    channel: str
    p: float
    q_used: float
    mode: str
    fec_limit_db: float
    lmax_m: float | None

    def sort_key(self):
        return (self.value, self.channel, self.p, self.mode)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and what to hold fixed.

    ``p`` is the fixed PAM4 ratio for ``Q`` sweeps; ``p_grid`` is scanned
    at every grid value of a geometry sweep.
    """

    variable: Variable
    grid: tuple[float, ...]
    channels: tuple[ChannelPreset, ...] = ALL_CHANNELS
    geometry: LinkGeometry = field(default_factory=LinkGeometry)
    p: float = 0.5
    p_grid: tuple[float, ...] = DEFAULT_P_GRID
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID
    optimize: bool = True
    threshold: float = FEC_THRESHOLD
    aperture_mode: ApertureMode = ApertureMode.EXPLICIT

    def __post_init__(self):
        object.__setattr__(self, "variable", Variable(self.variable))
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        if not self.grid:
            raise DomainError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise DomainError("sweep grid must be strictly increasing")
        lo, hi = self.grid[0], self.grid[-1]
        if self.variable is Variable.P and not (0 <= lo and hi <= 1):
            raise DomainError("p grid must lie in [0, 1]")
        if self.variable is Variable.Q and not (0 <= lo and hi < 1):
            raise DomainError("q grid must lie in [0, 1)")
        if self.variable is Variable.PHI and not (0 <= lo and hi < 90):
            raise DomainError("phi grid must lie in [0, 90) degrees")
        if self.variable in (Variable.THETA, Variable.FOV) and not (0 < lo and hi < 90):
            raise DomainError(f"{self.variable.value} grid must lie in (0, 90) degrees")


def optimum_q(p: float, threshold: float = FEC_THRESHOLD, q_grid: Sequence[float] = DEFAULT_Q_GRID) -> float:
    """Grid-optimal q for ``p``; pure formats always use 0."""
    if p in (0.0, 1.0):
        return 0.0
    return optimize_q(p, threshold, q_grid).q_star


def _cell(variable, value, geometry, channel, p, q, mode, threshold, aperture_mode) -> SweepRecord:
    params = TdhpParams(p, q)
    fec = fec_limit_snr(params, threshold)
    lmax = lmax_for_params(geometry, channel, params, threshold, aperture_mode)
    return SweepRecord(variable, value, channel.name, p, params.q, mode, fec.snr_db, lmax.L_max)


def _evaluate(cells: list[tuple], threads: int) -> list[SweepRecord]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda c: _cell(*c), cells))
    else:
        rows = [_cell(*c) for c in cells]
    return sorted(rows, key=SweepRecord.sort_key)


def _p_cells(variable, value, geometry, channels, p_grid, threshold, aperture_mode, q_grid, optimize):
    cells = []
    for p in p_grid:
        modes = [(NON_OPTIMUM, 0.0)]
        if optimize:
            modes.append((OPTIMUM, optimum_q(p, threshold, q_grid)))
        for channel in channels:
            for mode, q in modes:
                cells.append((variable, value, geometry, channel, p, q, mode, threshold, aperture_mode))
    return cells


def sweep_p(
    p_grid: Iterable[float] = DEFAULT_P_GRID,
    channels: Iterable[ChannelPreset] = ALL_CHANNELS,
    geometry: LinkGeometry | None = None,
    threshold: float = FEC_THRESHOLD,
    aperture_mode: ApertureMode | str = ApertureMode.EXPLICIT,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    optimize: bool = True,
    threads: int = 1,
) -> list[SweepRecord]:
    """FEC limit and maximum distance versus PAM4 ratio, optimum and q=0 rows."""
    geometry = geometry or LinkGeometry()
    p_grid = [float(p) for p in p_grid]
    if any(not 0 <= p <= 1 for p in p_grid):
        raise DomainError("p grid must lie in [0, 1]")
    cells = []
    for p in p_grid:
        cells += _p_cells(
            Variable.P.value, p, geometry, list(channels), [p], threshold,
            ApertureMode(aperture_mode), q_grid, optimize,
        )
    return _evaluate(cells, threads)


def sweep_q(
    p: float,
    q_grid: Iterable[float] = DEFAULT_Q_GRID,
    threshold: float = FEC_THRESHOLD,
) -> list[SweepRecord]:
    """FEC limit for each q at fixed p.

    Unreachable-threshold rows are kept with ``fec_limit_db = nan``.  Rows
    carry ``mode="scan"`` and no channel or distance.
    """
    if not 0 < p < 1:
        raise DomainError(f"q sweep needs 0 < p < 1, got {p}")
    rows = []
    for q in sorted(float(q) for q in q_grid):
        try:
            fec = fec_limit_snr(TdhpParams(p, q), threshold).snr_db
        except NoSolution:
            fec = math.nan
        rows.append(SweepRecord(Variable.Q.value, q, "", p, q, SCAN, fec, None))
    return rows


def sweep_geometry(
    variable: Variable | str,
    grid: Iterable[float],
    channels: Iterable[ChannelPreset] = ALL_CHANNELS,
    p_grid: Iterable[float] = DEFAULT_P_GRID,
    geometry: LinkGeometry | None = None,
    threshold: float = FEC_THRESHOLD,
    aperture_mode: ApertureMode | str = ApertureMode.EXPLICIT,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    optimize: bool = True,
    threads: int = 1,
) -> list[SweepRecord]:
    """Maximum distance over a grid of beamwidth, misalignment or field of view.

    Field-of-view sweeps always derive the aperture from the FOV.
    """
    variable = Variable(variable)
    if variable not in _GEOMETRY_FIELD:
        raise DomainError(f"{variable.value} is not a geometry variable")
    geometry = geometry or LinkGeometry()
    if variable is Variable.FOV:
        aperture_mode = ApertureMode.FROM_FOV
    aperture_mode = ApertureMode(aperture_mode)
    channels = list(channels)
    p_grid = [float(p) for p in p_grid]
    cells = []
    for value in grid:
        value = float(value)
        geo = geometry.with_(**{_GEOMETRY_FIELD[variable]: value})
        cells += _p_cells(
            variable.value, value, geo, channels, p_grid, threshold, aperture_mode, q_grid, optimize
        )
    return _evaluate(cells, threads)


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRecord]:
    if spec.variable is Variable.Q:
        return sweep_q(spec.p, spec.grid, spec.threshold)
    if spec.variable is Variable.P:
        return sweep_p(
            spec.grid, spec.channels, spec.geometry, spec.threshold,
            spec.aperture_mode, spec.q_grid, spec.optimize, threads,
        )
    return sweep_geometry(
        spec.variable, spec.grid, spec.channels, spec.p_grid, spec.geometry,
        spec.threshold, spec.aperture_mode, spec.q_grid, spec.optimize, threads,
    )


def lmax_improvement(records: Iterable[SweepRecord]) -> dict[tuple[str, float], float]:
    """Largest optimum-minus-baseline distance gain per (channel, swept value)."""
    pairs: dict[tuple[str, float, float], dict[str, float]] = {}
    for r in records:
        if r.lmax_m is not None:
            pairs.setdefault((r.channel, r.value, r.p), {})[r.mode] = r.lmax_m
    out: dict[tuple[str, float], float] = {}
    for (channel, value, _), modes in pairs.items():
        if OPTIMUM in modes and NON_OPTIMUM in modes:
            gain = modes[OPTIMUM] - modes[NON_OPTIMUM]
            key = (channel, value)
            out[key] = max(out.get(key, -math.inf), gain)
    return out
