"""Command-line front end: ``pipsim {validate,evolve,pip}``.

Exit codes: 0 success, 1 configuration/IO error, 2 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from pipsim import __version__
from pipsim.config import ConfigError, RunConfig, load_config
from pipsim.dephasing import master_coherence, master_entropy
from pipsim.evolver import Propagator, initial_state
from pipsim.infotheory import PipConfig, entropy, pip_curve
from pipsim.model import (
    COUPLING_STREAM,
    build_blocks,
    build_coupling_matrix,
    dephasing_rate,
    make_rng,
    validity_criteria,
)
from pipsim.reduction import DegenerateFragmentError, PositivityError, check_density_matrix, reduce_system

log = logging.getLogger("pipsim")

SCHEMA_VERSION = 1
TRAJECTORY_COLUMNS = (
    "seed_index", "t", "re_rho12", "im_rho12", "abs_rho12",
    "entropy_s", "master_abs_rho12", "master_entropy",
)
MEAN_COLUMNS = (
    "t", "mean_abs_rho12", "std_abs_rho12", "mean_entropy_s",
    "master_abs_rho12", "master_entropy", "n_realizations",
)
PIP_COLUMNS = ("t", "n_f", "f", "mi_mean", "mi_stderr", "n_samples", "method", "ceiling")

C1_MIN = 0.5
C2_WARN = 0.3


class NumericalError(RuntimeError):
    pass


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_table(path: Path, columns, rows, cfg: RunConfig, fmt: str) -> Path:
    meta = {
        "tool": "pipsim",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config_hash": cfg.config_hash(),
    }
    path = path.with_suffix("." + fmt)
    if fmt == "json":
        records = [dict(zip(columns, row)) for row in rows]
        text = json.dumps({**meta, "columns": list(columns), "rows": records}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        for key, value in meta.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _checked_rho_s(state) -> np.ndarray:
    rho = reduce_system(state)
    try:
        return check_density_matrix(rho)
    except ValueError as exc:
        raise NumericalError(f"rho_S invalid at t={state.time:g}: {exc}") from None


def _propagator(cfg: RunConfig, realization: int) -> Propagator:
    rng = make_rng(cfg.params.seed, COUPLING_STREAM, realization)
    coupling = build_coupling_matrix(cfg.params, rng)
    return Propagator(build_blocks(cfg.params, coupling))


def cmd_validate(cfg: RunConfig, out=None) -> dict:
    out = out or sys.stdout
    p = cfg.params
    c1, c2 = validity_criteria(p)
    gamma = dephasing_rate(p)
    warnings = []
    if c1 < C1_MIN:
        warnings.append(f"c1 = {c1:.6g} < {C1_MIN}")
    if c2 >= C2_WARN:
        warnings.append(f"c2 = {c2:.6g} >= {C2_WARN} (master equation needs c2 << 1)")
    report = {
        "n_levels": p.n_levels, "lambda": p.lam, "delta_e": p.delta_e, "delta_eps": p.delta_eps,
        "c1": c1, "c2": c2, "gamma": gamma, "status": "warn" if warnings else "pass",
        "warnings": warnings,
    }
    for key in ("n_levels", "lambda", "delta_e", "delta_eps", "c1", "c2", "gamma"):
        print(f"{key:>10} = {report[key]:.10g}", file=out)
    print(f"{'status':>10} = {report['status']}", file=out)
    for w in warnings:
        print(f"   warning: {w}", file=out)
    return report


def cmd_evolve(cfg: RunConfig, prefix: str, fmt: str = "csv", threads: int = 1) -> list[Path]:
    psi0 = initial_state(cfg.params)
    rho12_0 = complex(reduce_system(psi0)[0, 1])
    master = [
        (abs(master_coherence(cfg.params, rho12_0, t)), master_entropy(cfg.params, rho12_0, t))
        for t in cfg.times
    ]

    def run(r):
        prop = _propagator(cfg, r)
        rows = []
        for t, (m_abs, m_ent) in zip(cfg.times, master):
            rho = _checked_rho_s(prop(psi0, t))
            rows.append((r, t, rho[0, 1].real, rho[0, 1].imag, abs(rho[0, 1]), entropy(rho), m_abs, m_ent))
        return rows

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        per_real = list(pool.map(run, range(cfg.realizations)))

    written = [_write_table(Path(prefix + "_trajectory"), TRAJECTORY_COLUMNS,
                            [row for rows in per_real for row in rows], cfg, fmt)]
    if cfg.realizations > 1:
        mags = np.array([[row[4] for row in rows] for rows in per_real])
        ents = np.array([[row[5] for row in rows] for rows in per_real])
        mean_rows = [
            (t, mags[:, k].mean(), mags[:, k].std(ddof=1), ents[:, k].mean(), m_abs, m_ent, cfg.realizations)
            for k, (t, (m_abs, m_ent)) in enumerate(zip(cfg.times, master))
        ]
        written.append(_write_table(Path(prefix + "_trajectory_mean"), MEAN_COLUMNS, mean_rows, cfg, fmt))
    return written


def cmd_pip(cfg: RunConfig, prefix: str, fmt: str = "csv", threads: int = 1) -> list[Path]:
    """PIP tables for coupling realization 0, one file per convention."""
    if cfg.pip is None:
        raise ConfigError("pip subcommand needs a 'pip' block in the config (or --convention)")
    prop = _propagator(cfg, 0)
    psi0 = initial_state(cfg.params)
    states = [prop(psi0, t) for t in cfg.pip_times]
    for s in states:
        _checked_rho_s(s)
    written = []
    for convention in cfg.pip.conventions:
        pcfg = PipConfig(
            convention=convention,
            base=cfg.pip.base,
            enumeration_cap=cfg.pip.enumeration_cap,
            batch_size=cfg.pip.batch_size,
            stderr_tol=cfg.pip.stderr_tol,
            max_samples=cfg.pip.max_samples,
            seed=cfg.params.seed,
        )
        rows = []
        for t_index, state in enumerate(states):
            curve = pip_curve(state, pcfg, t_index=t_index, threads=threads)
            log.info("t=%g convention=%s ceiling=%.6g", state.time, convention, curve.ceiling)
            rows.extend(
                (state.time, p.n_fragment, p.fraction, p.mean_mi, p.stderr, p.n_samples, p.method, curve.ceiling)
                for p in curve.points
            )
        written.append(_write_table(Path(f"{prefix}_pip_{convention}"), PIP_COLUMNS, rows, cfg, fmt))
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipsim",
        description="Qubit dephasing against an N-level random band: trajectories and partial information plots.",
    )
    parser.add_argument("--version", action="version", version=f"pipsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "print validity criteria and the dephasing rate"),
        ("evolve", "write rho_S(1,2) and entropy trajectories"),
        ("pip", "write averaged mutual information vs fragment size"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("-v", "--verbose", action="store_true")
        if name != "validate":
            p.add_argument("--out", help="output path prefix (default: config output.prefix)")
            p.add_argument("--threads", type=int, default=1)
        if name == "pip":
            p.add_argument("--convention", choices=("paper", "pure-bipartite", "both"))
            p.add_argument("--base", choices=("2", "e"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config).with_overrides(
            seed=args.seed,
            convention=getattr(args, "convention", None),
            base=getattr(args, "base", None),
        )
        if args.command == "validate":
            cmd_validate(cfg)
            return 0
        prefix = args.out or cfg.output_prefix
        threads = max(1, args.threads)
        cmd = cmd_evolve if args.command == "evolve" else cmd_pip
        for path in cmd(cfg, prefix, cfg.output_format, threads):
            print(path)
        return 0
    except (ConfigError, OSError) as exc:
        print(f"pipsim: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, DegenerateFragmentError, PositivityError, np.linalg.LinAlgError) as exc:
        print(f"pipsim: numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
