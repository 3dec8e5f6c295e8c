"""Command-line front end: ``polarlab <subcommand> ...``.

Every subcommand parses its inputs, calls the library, and writes JSON
(or CSV / plain text where noted) to ``--out`` or stdout.  ``--plot``
additionally renders a PNG figure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import plotting
from .channel import BmsChannel, merge
from .errors import PolarLabError
from .exponents import GoodnessParams, e0_table, er_table, is_good
from .hitting_set import badness_matrix, bound_m, greedy_cover, headline_scaling
from .kernels import ARIKAN, Kernel, bec_transform, polar_transform, sample_pool
from .polar_sim import simulate
from .quantize import (
    Bundle,
    Pavement,
    bundle_endpoints,
    enumerate_pavements,
    grid_size,
    pavement_count,
    quantize_pair,
)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def load_channel(args) -> BmsChannel:
    if args.bsc is not None:
        return BmsChannel.bsc(args.bsc)
    if args.bec is not None:
        return BmsChannel.bec(args.bec)
    if args.channel is not None:
        text = args.channel
        obj = json.loads(Path(text).read_text() if Path(text).exists() else text)
        return BmsChannel.from_json(obj)
    raise PolarLabError("no channel given; use --channel, --bsc or --bec")


def load_kernel(text: str) -> Kernel:
    """``arikan``, ``arikan2`` (Kronecker square), ``identity:N``, ``10,11`` or a JSON file."""
    key = text.strip().lower()
    if key == "arikan":
        return ARIKAN
    if key.startswith("arikan") and key[6:].isdigit():
        G = ARIKAN
        for _ in range(int(key[6:]) - 1):
            G = G.kron(ARIKAN)
        return G
    if key.startswith("identity:"):
        return Kernel.identity(int(key.split(":", 1)[1]))
    path = Path(text)
    if path.exists():
        return Kernel.from_json(json.loads(path.read_text()))
    return Kernel([row.strip() for row in text.replace("/", ",").split(",")])


def _grid(args) -> int:
    if getattr(args, "n", None):
        return args.n
    if args.ell is None or args.mu is None:
        raise PolarLabError("give --n, or both --ell and --mu")
    return grid_size(args.ell, args.mu)


def _params(args) -> GoodnessParams:
    return GoodnessParams(mu=args.mu, theta_const=args.theta_const, use_alpha_slack=not args.no_alpha_slack)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


# subcommands -----------------------------------------------------------


def cmd_quantize(args) -> None:
    W = load_channel(args)
    n = _grid(args)
    q = quantize_pair(W, n)
    if args.format == "csv":
        _emit(_csv(["n", "pavement", "H_W", "H_D", "H_U", "gap"],
                   [[n, q.pavement.steps, W.entropy, q.D.entropy, q.U.entropy, q.D.entropy - q.U.entropy]]), args.out)
    else:
        _emit(_dumps({
            "n": n,
            "pavement": q.pavement.steps,
            "D": q.D.to_json(),
            "U": q.U.to_json(),
            "H_W": W.entropy,
            "H_D": q.D.entropy,
            "H_U": q.U.entropy,
            "gap": q.D.entropy - q.U.entropy,
        }), args.out)
    if args.plot:
        plotting.plot_quantization(W, q.D, q.U, q.pavement, args.plot)


def cmd_bundles(args) -> None:
    n = _grid(args)
    pavs = enumerate_pavements(n, args.include_vertex_connected)
    if args.format == "csv":
        rows = []
        for p in pavs:
            b = bundle_endpoints(p)
            rows.append([p.steps, b.D.entropy, b.U.entropy, b.gap])
        _emit(_csv(["pavement", "H_D", "H_U", "gap"], rows), args.out)
        return
    payload = {"n": n, "count": len(pavs), "vertex_connected": args.include_vertex_connected}
    if args.full:
        payload["bundles"] = [bundle_endpoints(p).to_json() for p in pavs]
    else:
        payload["pavements"] = [p.steps for p in pavs]
    _emit(_dumps(payload), args.out)


def cmd_transform(args) -> None:
    W = load_channel(args)
    if args.merge:
        W = merge(W, "degrade", args.merge)
    G = load_kernel(args.kernel)
    children = polar_transform(W, G)
    if args.format == "csv":
        rows = [[i + 1, c.entropy, c.capacity, len(c)] for i, c in enumerate(children)]
        _emit(_csv(["index", "entropy", "capacity", "atoms"], rows), args.out)
    else:
        _emit(_dumps({
            "kernel": G.rows,
            "H_W": W.entropy,
            "entropies": [c.entropy for c in children],
            "channels": [c.to_json() for c in children] if args.full else None,
        }), args.out)


def cmd_bec_transform(args) -> None:
    G = load_kernel(args.kernel)
    eps = bec_transform(args.eps, G)
    if args.format == "json":
        _emit(_dumps({"eps": args.eps, "kernel": G.rows, "erasure": eps}), args.out)
    elif args.format == "csv":
        _emit(_csv(["index", "erasure"], [[i + 1, e] for i, e in enumerate(eps)]), args.out)
    else:
        _emit(", ".join(format(e, ".15g") for e in eps) + "\n", args.out)


def cmd_exponents(args) -> None:
    W = load_channel(args)
    rhos = np.linspace(0.0, 1.0, args.rho_points)
    rates = np.linspace(0.0, 1.0, args.rate_points)
    e0 = e0_table(W, rhos)
    er = er_table(W, rates)
    if args.format == "csv":
        rows = [["E0", r, v] for r, v in e0] + [["Er", r, v] for r, v in er]
        _emit(_csv(["function", "argument", "value"], rows), args.out)
    else:
        _emit(_dumps({"capacity": W.capacity, "e0": e0, "er": er}), args.out)
    if args.plot:
        plotting.plot_exponents(e0, er, W.capacity, args.plot)


def _load_bundle(args) -> Bundle:
    text = args.bundle
    path = Path(text)
    if path.exists():
        return Bundle.from_json(json.loads(path.read_text()))
    return bundle_endpoints(Pavement.parse(text, args.n))


def cmd_goodness(args) -> None:
    G = load_kernel(args.kernel)
    bundle = _load_bundle(args)
    report = is_good(G, bundle, _params(args))
    out = report.to_json()
    out["bundle"] = bundle.key
    out["kernel"] = G.rows
    _emit(_dumps(out), args.out)


def cmd_select(args) -> None:
    params = _params(args)
    n = grid_size(args.ell, args.mu)
    bundles = [bundle_endpoints(p) for p in enumerate_pavements(n, args.include_vertex_connected)]
    pool = sample_pool(args.ell, args.pool, args.seed)
    matrix = badness_matrix(bundles, pool, params)
    cover = greedy_cover(matrix, pool)
    payload = cover.to_json()
    payload.update({
        "ell": args.ell,
        "mu": args.mu,
        "n": n,
        "bundles": len(bundles),
        "pool": args.pool,
        "seed": args.seed,
        "theta_const": args.theta_const,
        "use_alpha_slack": not args.no_alpha_slack,
        "row_badness": dict(zip(matrix.bundles, matrix.row_badness.tolist())),
        "covered_fraction": 1.0 - len(cover.uncoverable) / len(bundles),
        "table": {k: pool[v].rows for k, v in cover.assignment.items() if v is not None},
    })
    _emit(_dumps(payload), args.out)
    if args.matrix_csv:
        Path(args.matrix_csv).write_text(matrix.to_csv())
    if args.plot:
        plotting.plot_badness(matrix, cover.selected, args.plot)


def _load_table(path: Optional[str]) -> dict[str, Kernel]:
    if not path:
        return {}
    obj = json.loads(Path(path).read_text())
    if "table" in obj:
        obj = obj["table"]
    return {k: Kernel(v["rows"] if isinstance(v, dict) else v) for k, v in obj.items()}


def cmd_simulate(args) -> None:
    W = load_channel(args)
    table = _load_table(args.table)
    default = load_kernel(args.kernel) if args.kernel else None
    params = GoodnessParams(mu=args.mu, theta_const=args.theta_const)
    report = simulate(W, args.levels, table, params, delta=args.delta, atom_cap=args.atom_cap,
                      default_kernel=default, n=args.n)
    _emit(report.to_csv() if args.format == "csv" else _dumps(report.to_json()), args.out)
    if args.plot:
        plotting.plot_simulation(report, args.plot)


def cmd_bound(args) -> None:
    rows = []
    for ell in [int(v) for v in _floats(args.ell_grid)]:
        for mu in _floats(args.mu_grid):
            n = grid_size(ell, mu)
            B = pavement_count(n)
            b = math.exp(-args.b_const * ell ** (1.0 - 2.0 / mu))
            row = {
                "ell": ell,
                "mu": mu,
                "n": n,
                "bundles": B,
                "b_model": b,
                "bound_m": bound_m(b, B) if 0.0 < b < 1.0 else None,
                "scaling": headline_scaling(ell, mu),
            }
            rows.append(row)
    payload: dict = {"b_const": args.b_const, "rows": rows}
    if args.b is not None and args.B is not None:
        payload["bound_m"] = bound_m(args.b, args.B)
    if args.format == "csv":
        header = ["ell", "mu", "n", "bundles", "b_model", "bound_m", "scaling"]
        _emit(_csv(header, [[r[h] for h in header] for r in rows]), args.out)
    else:
        _emit(_dumps(payload), args.out)
    if args.plot:
        plotting.plot_bounds(rows, args.plot)


# parser ------------------------------------------------------------------


def _channel_opts(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel", help="channel JSON file or inline JSON")
    g.add_argument("--bsc", type=float, help="BSC crossover probability")
    g.add_argument("--bec", type=float, help="BEC erasure probability")


def _goodness_opts(p: argparse.ArgumentParser, mu_default: float = 3.0) -> None:
    p.add_argument("--mu", type=float, default=mu_default, help="targeted scaling exponent (> 2)")
    p.add_argument("--theta-const", type=float, default=1.0, help="c in theta = exp(-c ell^(2 alpha))")
    p.add_argument("--no-alpha-slack", action="store_true", help="use slack ell^(1-1/mu) without alpha")


def _output_opts(p: argparse.ArgumentParser, formats=("json", "csv"), default="json", plot=False) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=default)
    if plot:
        p.add_argument("--plot", help="also render a PNG figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarlab", description="Polarizing BMS channels with few kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantize", help="degraded/upgraded grid quantization of a channel")
    _channel_opts(p)
    p.add_argument("--n", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--mu", type=float)
    _output_opts(p, plot=True)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("bundles", help="enumerate pavements / bundles")
    p.add_argument("--n", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--include-vertex-connected", action="store_true")
    p.add_argument("--full", action="store_true", help="include boundary channels")
    _output_opts(p)
    p.set_defaults(func=cmd_bundles)

    p = sub.add_parser("transform", help="virtual channel entropies under a kernel")
    _channel_opts(p)
    p.add_argument("--kernel", default="arikan")
    p.add_argument("--merge", type=int, default=0, help="degrade-merge the input to this many atoms first")
    p.add_argument("--full", action="store_true", help="include the virtual channels themselves")
    _output_opts(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("bec-transform", help="exact erasure probabilities of the virtual channels")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kernel", default="arikan")
    _output_opts(p, formats=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_bec_transform)

    p = sub.add_parser("exponents", help="E0 and Er tables")
    _channel_opts(p)
    p.add_argument("--rho-points", type=int, default=21)
    p.add_argument("--rate-points", type=int, default=21)
    _output_opts(p, plot=True)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("goodness", help="goodness report for a kernel on a bundle")
    p.add_argument("--kernel", required=True)
    p.add_argument("--bundle", required=True, help="pavement string (e.g. RU) or bundle JSON file")
    p.add_argument("--n", type=int)
    _goodness_opts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_goodness)

    p = sub.add_parser("select", help="sample a pool, build the badness matrix, greedy cover")
    p.add_argument("--ell", type=int, required=True)
    _goodness_opts(p)
    p.add_argument("--pool", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-vertex-connected", action="store_true")
    p.add_argument("--matrix-csv", help="write the badness matrix as CSV")
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("simulate", help="multi-level polarization with bracketing")
    _channel_opts(p)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--kernel", help="default kernel")
    p.add_argument("--table", help="bundle->kernel JSON (or the output of select)")
    p.add_argument("--mu", type=float, default=3.0)
    p.add_argument("--theta-const", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--atom-cap", type=int, default=16)
    p.add_argument("--n", type=int, help="override the grid side")
    _output_opts(p, plot=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", help="kernel-count bounds over ell and mu grids")
    p.add_argument("--ell-grid", default="16,64,256,1024")
    p.add_argument("--mu-grid", default="2.5,3,4")
    p.add_argument("--b-const", type=float, default=1.0, help="c in the model b = exp(-c ell^(1-2/mu))")
    p.add_argument("--b", type=float)
    p.add_argument("--B", type=int)
    _output_opts(p, plot=True)
    p.set_defaults(func=cmd_bound)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (PolarLabError, ValueError, OSError) as exc:
        print(f"polarlab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
