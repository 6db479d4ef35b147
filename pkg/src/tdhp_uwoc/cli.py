"""Command-line entry point: ``tdhp <command> [options]``.

Exit codes: 0 success, 1 domain or no-solution error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .analytic import TdhpParams, ber_pam2, ber_pam4, ber_tdhp, fec_limit_snr, optimize_q
from .channel import preset
from .config import COMMANDS, KEYS, RunConfig, build_config, flag_name
from .errors import ConfigError, DomainError, NoSolution
from .eye import eye_traces
from .link import ApertureMode, lmax_for_params
from .output import eye_rows, fmt_value, svg_lines, write_records
from .simulation import measure_ber
from .sweeps import (
    CSV_FIELDS,
    DEFAULT_FOV_GRID,
    DEFAULT_PHI_GRID,
    DEFAULT_THETA_GRID,
    DEFAULT_P_GRID,
    SweepSpec,
    optimum_q,
    run_sweep,
)

_HELP = {
    "ber": "analytic BER curves over an SNR grid",
    "mc": "Monte-Carlo BER at one SNR",
    "fec-limit": "SNR at which BER reaches the FEC threshold",
    "optimize-q": "best power split q for a PAM4 ratio p",
    "lmax": "maximum link distance for one channel and (p, q)",
    "sweep": "tabulate FEC limits and distances over a parameter grid",
    "eye": "export eye-diagram traces",
}

# keys exposed under a different flag than the generic --key-name form
_FLAG_ALIASES = {"fec_threshold": ["--fec-threshold"], "eye_format": ["--signal"]}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file")
    for key, spec in KEYS.items():
        flags = [flag_name(key)] + _FLAG_ALIASES.get(key, [])
        if key == "optimize":
            common.add_argument(*flags, dest=key, action="store_const", const="true", default=None, help=spec.help)
        else:
            common.add_argument(*dict.fromkeys(flags), dest=key, default=None, metavar="VALUE", help=spec.help)

    parser = argparse.ArgumentParser(prog="tdhp", description="TDHP underwater optical link toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def parse_config(argv=None) -> RunConfig:
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    return build_config(command, args, config_path)


def _emit(cfg: RunConfig, rows, fields) -> None:
    if cfg.out:
        write_records(cfg.out, rows, fields, cfg.format)


def _params(cfg: RunConfig) -> TdhpParams:
    if cfg["optimize"] and 0 < cfg.params.p < 1:
        return TdhpParams(cfg.params.p, optimum_q(cfg.params.p, cfg.threshold, cfg["q_grid"]))
    return cfg.params


def _cmd_ber(cfg: RunConfig) -> str:
    params = _params(cfg)
    rows = []
    for snr_db in cfg["snr_db_grid"]:
        s = 10.0 ** (snr_db / 10.0)
        rows.append({
            "snr_db": snr_db, "p": params.p, "q": params.q,
            "ber_pam2": ber_pam2(s, params.q), "ber_pam4": ber_pam4(s, params.q),
            "ber_tdhp": ber_tdhp(s, params),
        })
    _emit(cfg, rows, ["snr_db", "p", "q", "ber_pam2", "ber_pam4", "ber_tdhp"])
    return f"ber: {len(rows)} points, p={fmt_value(params.p)}, q={fmt_value(params.q)}"


def _cmd_mc(cfg: RunConfig) -> str:
    params = _params(cfg)
    snr_db = cfg["snr_db"]
    if snr_db is None:
        snr_db = fec_limit_snr(params, cfg.threshold, cfg["tol_db"]).snr_db
    snr = 10.0 ** (snr_db / 10.0)
    est = measure_ber(
        params, snr, cfg["symbols"], cfg.seed,
        noise_variance=cfg["noise_variance"], threads=cfg.threads,
    )
    row = est.to_record()
    row["snr_db"] = snr_db
    row["ber_analytic"] = ber_tdhp(snr / cfg["noise_variance"], params) if cfg["noise_variance"] > 0 else 0.0
    fields = list(row)
    _emit(cfg, [row], fields)
    return (
        f"mc: ber_tdhp={fmt_value(est.ber_tdhp)} ber_mixture={fmt_value(est.ber_mixture)} "
        f"+/-{fmt_value(est.ci95_mixture)} analytic={fmt_value(row['ber_analytic'])} "
        f"symbols={est.n_symbols} seed={cfg.seed}"
    )


def _cmd_fec(cfg: RunConfig) -> str:
    params = _params(cfg)
    res = fec_limit_snr(params, cfg.threshold, cfg["tol_db"])
    row = {"p": params.p, "q": params.q, "threshold": cfg.threshold,
           "snr_db": res.snr_db, "snr_linear": res.snr_linear, "converged": res.converged}
    _emit(cfg, [row], list(row))
    return f"fec-limit: p={fmt_value(params.p)} q={fmt_value(params.q)} snr={res.snr_db:.4f} dB"


def _cmd_optimize_q(cfg: RunConfig) -> str:
    opt = optimize_q(cfg.params.p, cfg.threshold, cfg["q_grid"], cfg["tol_db"])
    rows = [{"p": opt.p, "q": q, "fec_limit_db": snr, "q_star": q == opt.q_star} for q, snr in opt.grid]
    _emit(cfg, rows, ["p", "q", "fec_limit_db", "q_star"])
    return f"optimize-q: p={fmt_value(opt.p)} q*={fmt_value(opt.q_star)} fec_limit={opt.snr_at_fec_limit:.4f} dB"


def _cmd_lmax(cfg: RunConfig) -> str:
    params = _params(cfg)
    fec = fec_limit_snr(params, cfg.threshold, cfg["tol_db"])
    res = lmax_for_params(cfg.geometry, cfg.channel, params, cfg.threshold, cfg.aperture, cfg["tol_db"])
    row = {"channel": cfg.channel.name, "K_per_meter": cfg.channel.K, "p": params.p, "q": params.q,
           "aperture": cfg.aperture.value, "fec_limit_db": fec.snr_db, "lmax_m": res.L_max,
           "residual": res.residual}
    _emit(cfg, [row], list(row))
    return (f"lmax: channel={cfg.channel.name} p={fmt_value(params.p)} q={fmt_value(params.q)} "
            f"L_max={res.L_max:.4g} m")


_DEFAULT_GRIDS = {"p": DEFAULT_P_GRID, "theta": DEFAULT_THETA_GRID, "phi": DEFAULT_PHI_GRID, "fov": DEFAULT_FOV_GRID}


def _cmd_sweep(cfg: RunConfig) -> str:
    variable = cfg["variable"]
    grid = cfg["grid"]
    if grid is None:
        grid = cfg["q_grid"] if variable == "q" else _DEFAULT_GRIDS[variable]
    try:
        channels = tuple(preset(c) for c in cfg["channels"].split(",") if c.strip())
        spec = SweepSpec(
            variable=variable, grid=grid, channels=channels, geometry=cfg.geometry,
            p=cfg.params.p, p_grid=cfg["p_grid"], q_grid=cfg["q_grid"],
            optimize=True, threshold=cfg.threshold, aperture_mode=cfg.aperture,
        )
    except DomainError as exc:
        raise ConfigError(f"sweep: {exc}") from None
    records = run_sweep(spec, threads=cfg.threads)
    _emit(cfg, [r.as_dict() for r in records], CSV_FIELDS)
    if cfg["svg"]:
        Path(cfg["svg"]).write_text(_sweep_svg(variable, records))
    return f"sweep: variable={variable} rows={len(records)}"


def _sweep_svg(variable: str, records) -> str:
    series: dict[str, tuple[list, list]] = {}
    for r in records:
        if variable == "q":
            name, x, y = f"p={r.p:g}", r.value, r.fec_limit_db
        elif variable == "p":
            name, x, y = f"{r.channel} {r.mode}", r.p, r.lmax_m
        else:
            name, x, y = f"{r.channel} {variable}={r.value:g} {r.mode}", r.p, r.lmax_m
        xs, ys = series.setdefault(name, ([], []))
        xs.append(x)
        ys.append(y)
    if variable == "q":
        return svg_lines(series, "FEC limit vs q", "q", "FEC limit [dB]")
    return svg_lines(series, f"L_max vs p ({variable} sweep)", "PAM4 ratio p", "L_max [m]")


def _cmd_eye(cfg: RunConfig) -> str:
    snr = None if cfg["snr_db"] is None else 10.0 ** (cfg["snr_db"] / 10.0)
    eye = eye_traces(
        cfg["eye_format"], cfg.params, snr, cfg["samples_per_symbol"], cfg["traces"], cfg.seed,
    )
    _emit(cfg, eye_rows(eye.traces), ["trace_id", "sample_index", "amplitude"])
    noise = "noise-free" if snr is None else f"snr={cfg['snr_db']:g} dB"
    return f"eye: {eye.format.value} {noise} traces={eye.traces.shape[0]} seed={cfg.seed}"


_COMMANDS = {
    "ber": _cmd_ber,
    "mc": _cmd_mc,
    "fec-limit": _cmd_fec,
    "optimize-q": _cmd_optimize_q,
    "lmax": _cmd_lmax,
    "sweep": _cmd_sweep,
    "eye": _cmd_eye,
}


def run(cfg: RunConfig) -> int:
    try:
        summary = _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"tdhp: configuration error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, NoSolution) as exc:
        print(f"tdhp: {cfg.command}: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"tdhp: configuration error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"tdhp: configuration error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)
