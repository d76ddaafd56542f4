"""
Command-line front end: ``qws analyze | lattice | verify | charpoly``.

Exit codes: 0 success, 1 input/output failure, 2 invalid input (graph, coin
or parameter violation), 3 oracle or invariant mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .checks import FAULTS, format_table, run_suite
from .coins import coins_from_json, grover_coins, load_coins
from .exceptions import OracleMismatch, QWSpecError
from .graph import load_graph, standard_graph
from .lattice import CONVENTIONS, band_scan, write_band_csv
from .spectral import TOL_ORACLE, charpoly_identity_check, full_report

log = logging.getLogger("qwspec")

EXIT_OK, EXIT_IO, EXIT_SPEC, EXIT_ORACLE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    graph: Optional[str] = None
    coins: Optional[str] = None
    out: Optional[str] = None
    d: int = 3
    grid: int = 4
    convention: str = "case_ii"
    tol: float = 1e-8
    seed: int = 0
    fault: Optional[str] = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")


def _resolve_graph(spec: str):
    """A JSON file path, or ``kind:param[:param]`` such as ``complete:4``."""
    path = Path(spec)
    if path.exists():
        return load_graph(path)
    if ":" in spec:
        kind, *params = spec.split(":")
        try:
            return standard_graph(kind, *(int(p) for p in params))
        except ValueError:
            pass
    raise FileNotFoundError(f"graph file not found: {spec}")


def _resolve_coins(spec: Optional[str], g):
    if spec is None or spec == "grover":
        return grover_coins(g)
    path = Path(spec)
    if path.exists():
        return load_coins(path, g)
    if spec.startswith("{"):
        return coins_from_json(json.loads(spec), g)
    raise FileNotFoundError(f"coin file not found: {spec}")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text)


def cmd_analyze(cfg: RunConfig) -> int:
    g = _resolve_graph(cfg.graph)
    coins = _resolve_coins(cfg.coins, g)
    report = full_report(g, coins, tol_cluster=cfg.tol)
    payload = {"command": "analyze", "graph": cfg.graph, "coins": cfg.coins or "grover"}
    payload.update(report.to_json())
    _emit(json.dumps(payload, indent=2), cfg.out)
    if report.oracle_delta is None or report.oracle_delta > TOL_ORACLE:
        log.error("oracle mismatch: delta = %r", report.oracle_delta)
        return EXIT_ORACLE
    return EXIT_OK


def cmd_lattice(cfg: RunConfig) -> int:
    if not 1 <= cfg.d <= 4:
        raise ValueError(f"--d must be between 1 and 4, got {cfg.d}")
    if not 1 <= cfg.grid <= 64:
        raise ValueError(f"--grid must be between 1 and 64, got {cfg.grid}")
    rows = band_scan(cfg.d, cfg.grid, cfg.convention)
    if cfg.out is None:
        write_band_csv(rows, sys.stdout, cfg.d)
    else:
        write_band_csv(rows, cfg.out, cfg.d)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = run_suite(cfg.seed, cfg.fault)
    text = f"# seed = {cfg.seed}, fault = {cfg.fault}\n" + format_table(results) + "\n"
    _emit(text, cfg.out)
    failed = [r for r in results if not r.passed]
    if failed:
        sys.stderr.write("failed: " + "; ".join(f"{r.group}/{r.name}" for r in failed) + "\n")
        return EXIT_ORACLE
    return EXIT_OK


def cmd_charpoly(cfg: RunConfig) -> int:
    g = _resolve_graph(cfg.graph)
    coins = _resolve_coins(cfg.coins, g)
    report = full_report(g, coins, tol_cluster=cfg.tol)
    rng = np.random.default_rng(cfg.seed)
    dev = charpoly_identity_check(report.U, report.discriminant, coins.kappa, coins.kappa_prime,
                                  rng=rng)
    payload = {"command": "charpoly", "seed": cfg.seed, "max_relative_deviation": dev}
    _emit(json.dumps(payload, indent=2), cfg.out)
    return EXIT_OK if dev <= cfg.tol else EXIT_ORACLE


COMMANDS = {
    "analyze": cmd_analyze,
    "lattice": cmd_lattice,
    "verify": cmd_verify,
    "charpoly": cmd_charpoly,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qws",
        description="Spectral analysis of coined quantum walks through their discriminant.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--tol", type=float, default=1e-8, help="clustering / pass tolerance")
        p.add_argument("--seed", type=int, default=0)

    for name in ("analyze", "charpoly"):
        p = sub.add_parser(name)
        p.add_argument("--graph", required=True,
                       help='graph JSON {"n", "edges"} or kind:params, e.g. complete:4')
        p.add_argument("--coins", help="coin JSON file (default: Grover coins)")
        common(p)

    p = sub.add_parser("lattice", help="band scan of the moving-shift Grover walk on Z^d")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--grid", type=int, default=4, help="samples per axis")
    p.add_argument("--convention", choices=CONVENTIONS, default="case_ii")
    common(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--fault", choices=FAULTS, help=argparse.SUPPRESS)
    common(p)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_SPEC
    try:
        return COMMANDS[cfg.command](cfg)
    except OracleMismatch as exc:
        log.error("%s", exc)
        return EXIT_ORACLE
    except (OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (QWSpecError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_SPEC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
