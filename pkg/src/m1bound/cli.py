"""m1bound command line.

Exit codes: 0 success, 1 verification failed, 2 LP failure, 3 bad input.
"""
import argparse
from dataclasses import dataclass
import json
import logging
from pathlib import Path
import sys
import time

import numpy as np

from . import bessel, constraints, geometry, pipeline, serialize
from ._backend import BACKEND
from .serialize import ConfigError
from .witness import bound_from_witness, verify_nonneg

EXIT_OK, EXIT_UNVERIFIED, EXIT_LP, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("m1bound")


@dataclass
class RunConfig:
    config_path: Path
    grid_step: float = None
    grid_count: int = None
    bracket: tuple = None
    tol: float = None
    sample_step: float = 1e-3
    out: Path = Path(".")
    edge_policy: str = None

    def __post_init__(self):
        for name in ("grid_step", "tol", "sample_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.grid_count is not None and self.grid_count < 2:
            raise ConfigError("--grid-count must be at least 2")
        if self.bracket is not None and not 0 < self.bracket[0] < self.bracket[1]:
            raise ConfigError("--bracket needs 0 < LO < HI")


def _sidecar(out, lines):
    # the only place wall-clock timestamps are written
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    with open(Path(out) / "run.log", "a", encoding="utf-8") as fh:
        for line in lines:
            fh.write(f"{stamp} {line}\n")


def cmd_solve(args):
    run = RunConfig(Path(args.config), args.grid_step, args.grid_count,
                    tuple(args.bracket) if args.bracket else None, args.tol,
                    args.sample_step, Path(args.out), args.edge_policy)
    cfg = serialize.load_config(run.config_path)
    grid = constraints.GridSpec(run.grid_step or cfg.grid.step, run.grid_count or cfg.grid.count)
    policy = run.edge_policy or cfg.edge_policy
    try:
        rows = pipeline.rows_from_config(cfg.triangles, cfg.angles, policy)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t0 = time.perf_counter()
    report, cert, spectrum = pipeline.refine_until_verified(
        rows, grid, run.bracket or cfg.bracket, run.tol or cfg.tolerance, run.sample_step)
    elapsed = time.perf_counter() - t0

    out = run.out
    serialize.save_report(report, out / "bound.json")
    serialize.save_spectrum(spectrum, out / "spectrum.csv")
    serialize.save_witness(cert, out / "witness.json")
    _sidecar(out, [f"solve {run.config_path} backend={BACKEND} seconds={elapsed:.3f}",
                   f"delta_upper={report.delta_upper!r} verified={report.verified}"])
    print(f"delta_upper  {report.delta_upper!r}")
    print(f"grid root    {report.delta_grid!r}")
    print(f"B, C         {report.quadratic_b!r}, {report.quadratic_c!r}")
    print(f"rounds       {report.refinement_rounds}  (grid {report.grid_size} points)")
    print(f"verified     {report.verified}  [{report.guarantee}]")
    return EXIT_OK if report.verified else EXIT_UNVERIFIED


def cmd_verify(args):
    cert = serialize.load_witness(args.witness)
    result = verify_nonneg(cert, args.sample_step)
    delta, B, C = bound_from_witness(cert)
    print(f"verified     {result.verified}")
    print(f"W(0)         {result.w0!r}")
    print(f"min W        {result.worst_value!r} at t = {result.worst_t!r}")
    print(f"checked      (0, {result.tail_threshold!r}], step {result.grid_step!r}; envelope beyond")
    print(f"B, C         {B!r}, {C!r}")
    print(f"delta        {delta!r}")
    ref = cert.meta.get("reference_quadratic") if isinstance(cert.meta, dict) else None
    if ref:
        print(f"reference    b = {ref.get('b')!r}, c = {ref.get('c')!r}, delta = {ref.get('delta')!r}")
        if "b" in ref and abs(ref["b"] - B) > 1e-6:
            print(f"note         recomputed B differs from the reference by {B - ref['b']!r}; "
                  f"the stored alpha values and constant term do not reproduce it")
        if "c" in ref and abs(ref["c"] - C) > 2e-6:
            print(f"note         recomputed C differs from the reference by {C - ref['c']!r}")
    return EXIT_OK if result.verified else EXIT_UNVERIFIED


def cmd_autocorr(args):
    spectrum = serialize.load_spectrum(args.spectrum)
    r = np.round(np.arange(0, int(round(args.r_max / args.r_step)) + 1) * args.r_step, 12)
    values = pipeline.autocorrelation(spectrum, r)
    out = Path(args.out)
    serialize.atomic_write(out / "autocorr.csv", serialize.format_series("r,value", r, values))
    serialize.atomic_write(out / "autocorr.svg", serialize.polyline_svg(r, values))
    print(f"value at r=0 {float(values[0])!r}")
    i1 = np.flatnonzero(np.abs(r - 1.0) < 1e-12)
    if i1.size:
        print(f"value at r=1 {float(values[i1[0]])!r}")
    return EXIT_OK


def _graph_dump(g, name):
    alpha = geometry.independence_number(g)
    return {
        "name": name,
        "vertices": [{"label": lab, "x": p.x, "y": p.y} for lab, p in zip(g.labels, g.vertices)],
        "edges": [[g.labels[i], g.labels[j]] for i, j in g.edges],
        "unit_edges": [[g.labels[i], g.labels[j]] for i, j in geometry.unit_edges(g.vertices)],
        "alpha": alpha,
        "independent_triples": [[g.labels[i] for i in s] for s in geometry.independent_subsets(g, 3)],
    }


def cmd_graphs(args):
    dumps = []
    if args.theta is not None:
        g1, g2 = geometry.build_ct_graphs(args.theta)
        dumps += [_graph_dump(g1, "G1"), _graph_dump(g2, "G2")]
    if args.triangle is not None:
        try:
            g = geometry.build_triangle(geometry.TriangleSpec(*args.triangle), args.edge_policy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        dumps.append(_graph_dump(g, f"triangle ({args.edge_policy})"))
    if not dumps:
        raise ConfigError("graphs needs --theta or --triangle")
    if args.json:
        print(json.dumps(dumps, indent=2))
        return EXIT_OK
    for d in dumps:
        print(f"{d['name']}: {len(d['vertices'])} vertices, alpha = {d['alpha']}")
        for v in d["vertices"]:
            print(f"  {v['label']:>3} ({v['x']:.9f}, {v['y']:.9f})")
        print("  edges:", " ".join("-".join(e) for e in d["edges"]) or "none")
        print("  unit edges:", " ".join("-".join(e) for e in d["unit_edges"]) or "none")
        print("  independent triples:",
              "; ".join("{" + ", ".join(t) + "}" for t in d["independent_triples"]) or "none")
    return EXIT_OK


def cmd_bessel(args):
    try:
        ev = bessel.omega2_eval(args.x)
    except bessel.BesselRangeError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"J0({ev.argument!r}) = {ev.value!r}  (|error| <= {ev.abs_error_bound:g}, backend {BACKEND})")
    return EXIT_OK


def cmd_search(args):
    spectrum = serialize.load_spectrum(args.spectrum)
    ranges = None
    if args.triangle_box:
        b = args.triangle_box
        ranges = [(b[0], b[1]), (b[2], b[3]), (b[4], b[5])]
    found = pipeline.find_violated_configs(spectrum, theta_step=args.theta_step,
                                           triangle_ranges=ranges, edge_policy=args.edge_policy,
                                           delta=args.delta)
    print(json.dumps([{"config": c, "violation": v} for c, v in found[:args.limit]], indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="m1bound",
                                description="LP upper bounds for unit-distance-avoiding planar sets.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="bisect, extract and verify a witness")
    s.add_argument("--config", default=str(serialize.REFERENCE_CONFIG))
    s.add_argument("--grid-step", type=float)
    s.add_argument("--grid-count", type=int)
    s.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--tol", type=float)
    s.add_argument("--sample-step", type=float, default=1e-3)
    s.add_argument("--edge-policy", choices=geometry.EDGE_POLICIES)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check a witness certificate")
    s.add_argument("witness")
    s.add_argument("--sample-step", type=float, default=1e-3)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("autocorr", help="autocorrelation series from a spectrum CSV")
    s.add_argument("spectrum")
    s.add_argument("--out", default=".")
    s.add_argument("--r-max", type=float, default=3.0)
    s.add_argument("--r-step", type=float, default=0.005)
    s.set_defaults(func=cmd_autocorr)

    s = sub.add_parser("graphs", help="dump configuration graphs")
    s.add_argument("--theta", type=float)
    s.add_argument("--triangle", type=float, nargs=3, metavar=("X1", "X2", "Y"))
    s.add_argument("--edge-policy", choices=geometry.EDGE_POLICIES, default="complete")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_graphs)

    s = sub.add_parser("bessel", help="evaluate J0")
    s.add_argument("x", type=float)
    s.set_defaults(func=cmd_bessel)

    s = sub.add_parser("search", help="look for constraints a spectrum violates")
    s.add_argument("spectrum")
    s.add_argument("--theta-step", type=float, default=1e-3)
    s.add_argument("--triangle-box", type=float, nargs=6,
                   metavar=("X1LO", "X1HI", "X2LO", "X2HI", "YLO", "YHI"))
    s.add_argument("--edge-policy", choices=geometry.EDGE_POLICIES, default="complete")
    s.add_argument("--delta", type=float, help="delta for the CT right-hand side "
                   "(default: the spectrum mass at t = 0)")
    s.add_argument("--limit", type=int, default=20)
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (pipeline.LpFailure, pipeline.BracketError) as exc:
        print(f"LP failure: {exc}", file=sys.stderr)
        return EXIT_LP


if __name__ == "__main__":
    sys.exit(main())
