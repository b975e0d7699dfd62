"""Command-line entry point: ``planar-oracles {build,query,verify,sweep}``.

Exit codes: 0 success, 1 a bound or invariant was violated, 2 bad input or
parameters (including non-planar graphs).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .bench import THREADS_ENV, ConfigError, RunConfig, load, run, sweep
from .graph import GraphError, exact_distance
from .io import ParseError
from .oracles import ORACLES, build_oracle

EXIT_VIOLATION = 1
EXIT_INPUT = 2


def _pairs(text: str):
    if text == "all":
        return "all"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--pairs takes a count or 'all'") from None
    if n < 0:
        raise argparse.ArgumentTypeError("--pairs must be non-negative")
    return n


def _common(p: argparse.ArgumentParser, many: bool = False) -> None:
    if many:
        p.add_argument("--input", action="append", default=[], help="DIMACS .gr file (repeatable)")
        p.add_argument("--gen", action="append", default=[], help="generator spec, e.g. grid:10x10 (repeatable)")
        p.add_argument("--oracle", default="eps-moderate", help=f"comma list from {', '.join(ORACLES)}")
        p.add_argument("--eps", default="0.5", help="comma list of eps values")
    else:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="DIMACS .gr file")
        src.add_argument("--gen", help="generator spec: grid:RxC, wgrid:RxC:maxw:seed, dgrid:RxC:frac:seed, pgrid:RxC")
        p.add_argument("--oracle", choices=ORACLES, default="eps-moderate")
        p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--sidecar", help="embedding sidecar for --input (one line of neighbours per node)")
    p.add_argument("--theta", type=float, default=1.0, help="moderate weight class exponent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=_pairs, default=1000, help="query count or 'all'")
    p.add_argument("--report", help="path of the JSON report (CSV and timing files go next to it)")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="planar-oracles",
        description="Approximate distance oracles for planar graphs.",
        epilog=f"Set {THREADS_ENV}=k to spread verification queries over k worker processes.",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)
    _common(sub.add_parser("build", help="build an oracle and print its statistics"))
    q = sub.add_parser("query", help="answer distance queries given as u:v")
    _common(q)
    q.add_argument("pair", nargs="+", help="node pair u:v (0-based ids)")
    q.add_argument("--exact", action="store_true", help="also print the exact distance")
    _common(sub.add_parser("verify", help="run a workload and check every estimate against exact"))
    _common(sub.add_parser("sweep", help="run every combination of graphs, oracles and eps"), many=True)
    return ap


def _cfg(a, **over) -> RunConfig:
    base = dict(
        input=a.input, gen=a.gen, oracle=a.oracle, eps=a.eps, theta=a.theta,
        seed=a.seed, pairs=a.pairs, report=a.report, sidecar=a.sidecar,
    )
    base.update(over)
    return RunConfig(**base)


def _emit(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=str)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_build(a) -> int:
    cfg = _cfg(a)
    cfg.validate()
    g = load(cfg)
    t = time.perf_counter()
    h = build_oracle(cfg.oracle, g, cfg.eps, cfg.theta)
    out = {"graph": {"n": g.n, "m": g.m}, "build_seconds": round(time.perf_counter() - t, 6), "oracle": h.stats()}
    _emit(out, a.report)
    return 0


def cmd_query(a) -> int:
    cfg = _cfg(a)
    cfg.validate()
    g = load(cfg)
    h = build_oracle(cfg.oracle, g, cfg.eps, cfg.theta)
    for text in a.pair:
        try:
            u, v = (int(x) for x in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad pair {text!r}; expected u:v") from None
        if not (0 <= u < g.n and 0 <= v < g.n):
            raise ConfigError(f"pair {text} out of range for n={g.n}")
        line = f"{u} {v} {h.distance(u, v):g}"
        if a.exact:
            line += f" exact={exact_distance(g, u, v)}"
        print(line)
    return 0


def cmd_verify(a) -> int:
    rep = run(_cfg(a))
    s = rep.body["stretch"]
    v = rep.body["violations"]
    print(
        f"{rep.body['config']['oracle']}: n={rep.body['graph']['n']} queries={rep.body['queries']} "
        f"max_stretch={s['max']:.4f} mean={s['mean']:.4f} violations={v['total']}"
    )
    return 0 if rep.ok else EXIT_VIOLATION


def cmd_sweep(a) -> int:
    sources = [("input", x) for x in a.input] + [("gen", x) for x in a.gen]
    if not sources:
        raise ConfigError("sweep needs at least one --input or --gen")
    try:
        eps_list = [float(x) for x in a.eps.split(",")]
    except ValueError:
        raise ConfigError("--eps takes a comma list of numbers") from None
    configs = [
        _cfg(a, input=val if kind == "input" else None, gen=val if kind == "gen" else None,
             oracle=o, eps=e, report=None)
        for kind, val in sources for o in a.oracle.split(",") for e in eps_list
    ]
    out = sweep(configs, a.report)
    if not a.report:
        _emit(out)
    for row in out["runs"]:
        print(f"{row['run']}: words={row['space_words']} max_stretch={row['max_stretch']:.4f}", file=sys.stderr)
    for f in out["failures"]:
        print(f"FAILED {f['config']}: {f['error']}", file=sys.stderr)
    return EXIT_VIOLATION if out["failures"] else 0


COMMANDS = {"build": cmd_build, "query": cmd_query, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    a = parser().parse_args(argv)
    try:
        return COMMANDS[a.cmd](a)
    except (ConfigError, GraphError, ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
