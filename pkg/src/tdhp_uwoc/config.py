"""
Run configuration: a flat ``key = value`` file merged with command-line flags.

File syntax, one setting per line::

    # comment
    channel = blue
    theta_deg = 10
    p = 0.5

Flags override the file.  Every key is range-checked when parsed, and
errors name the key plus its origin (``file:line`` or ``--flag``).
"""
from __future__ import annotations

import math
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .analytic import DEFAULT_Q_GRID, FEC_THRESHOLD, TdhpParams
from .channel import ChannelPreset, preset
from .errors import ConfigError, DomainError
from .link import ApertureMode, LinkGeometry

__all__ = ["COMMANDS", "KEYS", "RunConfig", "read_config_file", "parse_grid", "build_config", "flag_name"]

COMMANDS = ("ber", "mc", "fec-limit", "optimize-q", "lmax", "sweep", "eye")


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (stop inclusive) or a comma list of numbers."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} is not start:stop:step")
        start, stop, step = (float(x) for x in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        if stop < start:
            raise ValueError("grid stop is below start")
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(round(start + k * step, 12) for k in range(n + 1))
    values = tuple(float(x) for x in text.split(",") if x.strip())
    if not values:
        raise ValueError("empty grid")
    return values


def _range(lo=None, hi=None, lo_open=False, hi_open=False):
    def check(v):
        if lo is not None and (v < lo or (lo_open and v == lo)):
            return False
        if hi is not None and (v > hi or (hi_open and v == hi)):
            return False
        return True

    left = "(" if lo_open else "["
    right = ")" if hi_open else "]"
    lo_txt = "-inf" if lo is None else f"{lo:g}"
    hi_txt = "inf" if hi is None else f"{hi:g}"
    desc = f"in {left}{lo_txt}, {hi_txt}{right}"
    return check, desc


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _choice(*options):
    def conv(text):
        t = str(text).strip().lower()
        if t not in options:
            raise ValueError(f"{text!r} is not one of {', '.join(options)}")
        return t

    return conv


def _seed(text) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return v


@dataclass(frozen=True)
class Key:
    convert: Callable[[Any], Any]
    default: Any = None
    check: tuple | None = None
    help: str = ""


KEYS: dict[str, Key] = {
    # link geometry
    "P_t_watts": Key(float, 0.5, _range(0, lo_open=True), "transmit power [W]"),
    "P_n_watts": Key(float, 2e-6, _range(0, lo_open=True), "noise power [W]"),
    "theta_deg": Key(float, 10.0, _range(0, 90, True, True), "transmit half-beamwidth [deg]"),
    "phi_deg": Key(float, 10.0, _range(0, 90, False, True), "receiver misalignment [deg]"),
    "fov_deg": Key(float, 10.0, _range(0, 90, True, True), "receiver field of view [deg]"),
    "F_m": Key(float, 0.6, _range(0, lo_open=True), "receiver focal length [m]"),
    "D_m": Key(float, 0.2, _range(0, lo_open=True), "receiver aperture diameter [m]"),
    "NEP": Key(float, 0.4e-12, _range(0), "noise equivalent power [W/sqrt(Hz)]"),
    "BW_hz": Key(float, 1e9, _range(0), "bandwidth [Hz]"),
    "aperture": Key(_choice("explicit", "from-fov"), "explicit", None, "aperture source"),
    # channel
    "channel": Key(_choice("red", "green", "blue"), "blue", None, "laser colour preset"),
    "K_per_meter": Key(float, None, _range(0), "custom attenuation [1/m], overrides channel"),
    "channels": Key(str, "red,green,blue", None, "comma list of channels for sweeps"),
    # modulation
    "p": Key(float, 0.0, _range(0, 1), "PAM4 ratio"),
    "q": Key(float, 0.0, _range(0, 1), "power-control factor"),
    "optimize": Key(_bool, False, None, "use the grid-optimal q for p"),
    "fec_threshold": Key(float, FEC_THRESHOLD, _range(0, 0.5, True, True), "target BER"),
    "q_grid": Key(parse_grid, DEFAULT_Q_GRID, None, "q grid start:stop:step"),
    "tol_db": Key(float, 0.01, _range(0, lo_open=True), "FEC search tolerance [dB]"),
    # simulation
    "snr_db": Key(float, None, None, "SNR [dB]"),
    "snr_db_grid": Key(parse_grid, parse_grid("0:30:1"), None, "SNR grid for ber [dB]"),
    "symbols": Key(lambda t: int(float(t)), 1_000_000, _range(1), "Monte-Carlo symbol count"),
    "noise_variance": Key(float, 1.0, _range(0), "AWGN variance"),
    "seed": Key(_seed, None, None, "RNG seed (auto-generated when omitted)"),
    "threads": Key(int, 1, _range(1), "worker threads"),
    # sweeps
    "variable": Key(_choice("p", "q", "theta", "phi", "fov"), "p", None, "swept variable"),
    "grid": Key(parse_grid, None, None, "swept grid start:stop:step"),
    "p_grid": Key(parse_grid, parse_grid("0:1:0.1"), None, "p grid for geometry sweeps"),
    "svg": Key(str, None, None, "write an SVG plot here"),
    # eye diagrams
    "eye_format": Key(_choice("pam2", "pam4", "tdhp"), "tdhp", None, "eye-diagram signal"),
    "samples_per_symbol": Key(int, 16, _range(2), "samples per symbol"),
    "traces": Key(int, 1000, _range(1), "number of eye traces"),
    # output
    "out": Key(str, None, None, "output file"),
    "format": Key(_choice("csv", "json"), "csv", None, "output format"),
}


def flag_name(key: str) -> str:
    return "--" + key.replace("_", "-")


def read_config_file(path) -> dict[str, tuple[str, str]]:
    """Return ``{key: (raw_value, origin)}``; origin is ``path:line``."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    out: dict[str, tuple[str, str]] = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        origin = f"{path}:{n}"
        if "=" not in line:
            raise ConfigError(f"{origin}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{origin}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{origin}: duplicate key {key!r} (first at {out[key][1]})")
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        out[key] = (value, origin)
    return out


def _convert(key: str, raw, origin: str):
    spec = KEYS[key]
    try:
        value = spec.convert(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: bad value for {key!r}: {exc}") from None
    if spec.check is not None:
        ok, desc = spec.check
        if not ok(value):
            raise ConfigError(f"{origin}: {key} = {raw} out of range, must be {desc}")
    return value


@dataclass(frozen=True)
class RunConfig:
    command: str
    geometry: LinkGeometry
    channel: ChannelPreset
    params: TdhpParams
    threshold: float
    seed: int
    seed_generated: bool
    aperture: ApertureMode
    out: str | None
    format: str
    threads: int
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]


def build_config(command: str, flags: dict[str, Any], config_path=None) -> RunConfig:
    """Merge defaults, config file and flags (highest precedence) into a RunConfig."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    merged: dict[str, tuple[Any, str]] = {k: (spec.default, "default") for k, spec in KEYS.items()}
    if config_path is not None:
        for key, (raw, origin) in read_config_file(config_path).items():
            merged[key] = (_convert(key, raw, origin), origin)
    for key, raw in flags.items():
        if key not in KEYS:
            raise ConfigError(f"unknown option {key!r}")
        if raw is not None:
            merged[key] = (_convert(key, raw, flag_name(key)), flag_name(key))
    values = {k: v for k, (v, _) in merged.items()}
    origin = {k: o for k, (_, o) in merged.items()}

    def build(factory, keys, **kwargs):
        try:
            return factory(**kwargs)
        except DomainError as exc:
            where = ", ".join(f"{k} ({origin[k]})" for k in keys)
            raise ConfigError(f"{where}: {exc}") from None

    geometry = build(
        LinkGeometry,
        ["P_t_watts", "P_n_watts", "theta_deg", "phi_deg", "fov_deg", "F_m", "D_m"],
        P_t=values["P_t_watts"], P_n=values["P_n_watts"], theta=values["theta_deg"],
        phi=values["phi_deg"], fov=values["fov_deg"], F=values["F_m"], D_explicit=values["D_m"],
        NEP=values["NEP"], BW=values["BW_hz"],
    )
    if values["K_per_meter"] is not None:
        channel = ChannelPreset.custom(values["K_per_meter"])
    else:
        channel = preset(values["channel"])
    params = build(TdhpParams, ["p", "q"], p=values["p"], q=values["q"])

    seed, generated = values["seed"], False
    if seed is None:
        seed, generated = secrets.randbits(63), True
        values["seed"] = seed

    return RunConfig(
        command=command,
        geometry=geometry,
        channel=channel,
        params=params,
        threshold=values["fec_threshold"],
        seed=seed,
        seed_generated=generated,
        aperture=ApertureMode(values["aperture"]),
        out=values["out"],
        format=values["format"],
        threads=values["threads"],
        values=values,
    )
