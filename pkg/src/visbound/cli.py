"""Command-line front end: file inputs, CSV/JSON artifacts, atomic writes.

Exit status is 0 on success, 1 on bad input and 2 when a ``--strict`` bound
check fails.  Set VISBOUND_LOG (e.g. DEBUG) to change log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from . import constants, cover, geometry, homology, thick_thin, warped

log = logging.getLogger("visbound")


class InputError(ValueError):
    """Malformed input; the message names the offending field."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- I/O helpers --------------------------------------------------------------


def write_atomic(path: str, text: str) -> None:
    """Write text to path via a temp file in the same directory and a rename."""
    if path == "-":
        sys.stdout.write(text)
        return
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON in {path}: {exc}") from None


def _number(v, field: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{field}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise InputError(f"{field}: must be finite")
    return float(v)


def parse_group(data) -> list:
    if isinstance(data, dict):
        if "generators" not in data:
            raise InputError("group: missing field 'generators'")
        data = data["generators"]
    if not isinstance(data, list) or not data:
        raise InputError("generators: expected a nonempty list of [a, b, c, d]")
    out = []
    for i, m in enumerate(data):
        field = f"generators[{i}]"
        if not isinstance(m, list) or len(m) != 4:
            raise InputError(f"{field}: expected [a, b, c, d]")
        try:
            out.append(geometry.MoebiusIsometry.normalized(
                *(_number(v, f"{field}[{j}]") for j, v in enumerate(m))))
        except geometry.GeometryError as exc:
            raise InputError(f"{field}: {exc}") from None
    return out


def parse_cover(data) -> tuple[list, Optional[float]]:
    period = None
    if isinstance(data, dict):
        if "sets" not in data:
            raise InputError("cover: missing field 'sets'")
        if data.get("period") is not None:
            period = _number(data["period"], "cover.period")
        data = data["sets"]
    if not isinstance(data, list):
        raise InputError("cover: expected a list of {center, radius}")
    sets = []
    for i, s in enumerate(data):
        field = f"cover[{i}]"
        if not isinstance(s, dict):
            raise InputError(f"{field}: expected an object")
        for key in ("center", "radius"):
            if key not in s:
                raise InputError(f"{field}: missing field {key!r}")
        c = s["center"]
        if not isinstance(c, list) or len(c) != 2:
            raise InputError(f"{field}.center: expected [x, y]")
        x, y = _number(c[0], f"{field}.center[0]"), _number(c[1], f"{field}.center[1]")
        r = _number(s["radius"], f"{field}.radius")
        if y <= 0:
            raise InputError(f"{field}.center[1]: y must be positive")
        if r <= 0:
            raise InputError(f"{field}.radius: must be positive")
        sets.append(cover.CoverSet(geometry.UhpPoint(x, y), r, period=period))
    return sets, period


def read_thick_thin_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Thick sample points (x, y) from a ``thick-thin`` CSV."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"samples: cannot read {path}: {exc.strerror}") from None
    xs, ys = [], []
    for i, row in enumerate(rows):
        for key in ("x", "y", "thin"):
            if key not in row or row[key] in (None, ""):
                raise InputError(f"samples row {i + 1}: missing field {key!r}")
        try:
            x, y, thin = float(row["x"]), float(row["y"]), int(row["thin"])
        except ValueError:
            raise InputError(f"samples row {i + 1}: non-numeric x, y or thin") from None
        if not thin:
            xs.append(x)
            ys.append(y)
    return np.array(xs), np.array(ys)


def load_ledger(args) -> constants.ConstantsLedger:
    if getattr(args, "ledger", None):
        try:
            return constants.ConstantsLedger.from_json(read_json(args.ledger, "ledger"))
        except constants.LedgerError as exc:
            raise InputError(f"ledger: {exc}") from None
    try:
        return constants.build_ledger(args.n, args.margulis_eps)
    except constants.LedgerError as exc:
        raise InputError(f"--n/--margulis-eps: {exc}") from None


# --- subcommands ----------------------------------------------------------------


def cmd_curvature(args) -> int:
    if args.t_max <= 0 or args.samples < 2 or args.y_samples < 1:
        raise InputError("--t-max must be positive, --samples >= 2, --y-samples >= 1")
    m = warped.CuspModel(n=args.n)
    ts = np.linspace(0.0, args.t_max, args.samples)
    Ys = np.linspace(-1.0, 1.0, args.y_samples) if args.y_samples > 1 else np.zeros(1)
    T, Y = np.meshgrid(ts, Ys, indexing="ij")
    K = warped.curvature_array(m, T, Y)
    rows = [(repr(float(t)), repr(float(y)), repr(float(k)))
            for t, y, k in zip(T.ravel(), Y.ravel(), K.ravel())]
    write_atomic(args.out, dump_csv(("t", "Y", "K"), rows))
    if args.range_out:
        lo, hi = warped.curvature_range(m, ts)
        write_atomic(args.range_out, dump_csv(
            ("t", "K_min", "K_max"),
            [(repr(float(t)), repr(float(a)), repr(float(b))) for t, a, b in zip(ts, lo, hi)]))
    return 0


def cmd_visibility(args) -> int:
    m = warped.CuspModel(n=args.n)
    rows = []
    for T in args.T:
        if T < 1:
            raise InputError(f"--T: {T} is below 1")
        v = warped.visibility_integral(m, T)
        lower = 0.04 * math.log(T)
        rows.append((repr(T), repr(v), repr(lower), int(v >= lower - 1e-6)))
    write_atomic(args.out, dump_csv(("T", "integral", "lower_bound", "ok"), rows))
    return 0


def cmd_volume(args) -> int:
    try:
        m = warped.CuspModel(n=args.n, torus_volume=args.torus_volume)
        v = warped.cusp_volume(m, args.t0, literal_integrand=args.literal)
    except warped.WarpError as exc:
        raise InputError(f"volume: {exc}") from None
    write_atomic(args.out, dump_json({"n": args.n, "torus_volume": args.torus_volume,
                                      "t0": args.t0, "literal_integrand": args.literal,
                                      "cusp_volume": v}))
    return 0


def cmd_thick_thin(args) -> int:
    gens = parse_group(read_json(args.group, "group"))
    ledger = load_ledger(args)
    eps = ledger.eps if args.eps is None else args.eps
    try:
        g = thick_thin.GroupPresentation(tuple(gens), args.word_cap)
        levels = thick_thin.EpsAssignment(eps, ledger.margulis_eps)
    except thick_thin.ThickThinError as exc:
        raise InputError(f"group/--eps: {exc}") from None
    (x0, x1), (y0, y1) = args.x_range, args.y_range
    if not (x0 < x1 and 0 < y0 < y1):
        raise InputError("--x-range/--y-range: need x0 < x1 and 0 < y0 < y1")
    if args.random:
        rng = np.random.default_rng(args.seed)
        xs = rng.uniform(x0, x1, args.random)
        ys = np.exp(rng.uniform(math.log(y0), math.log(y1), args.random))
        thin = thick_thin.is_thin_array(g, levels, xs, ys)
        labels = np.where(thin, -1, 0)
        X, Y = xs, ys
    else:
        if args.grid <= 0:
            raise InputError("--grid: pitch must be positive")
        gx, gy, lab, count = thick_thin.label_components(g, levels, (x0, x1), (y0, y1), args.grid)
        X, Y = np.meshgrid(gx, gy, indexing="xy")
        labels = lab
        log.info("thin components on grid: %d", count)
    d = thick_thin.d_Gamma_array(g, X, Y)
    rows = [(repr(float(x)), repr(float(y)), repr(float(dg)), int(lab != 0), int(lab))
            for x, y, dg, lab in zip(np.ravel(X), np.ravel(Y), np.ravel(d), np.ravel(labels))]
    write_atomic(args.out, dump_csv(("x", "y", "d_gamma", "thin", "component"), rows))
    ledger_path = args.ledger_out or (args.out + ".ledger.json" if args.out != "-" else None)
    if ledger_path:
        write_atomic(ledger_path, dump_json(ledger.to_json()))
    return 0


def cmd_nerve(args) -> int:
    ledger = load_ledger(args)
    if (args.cover is None) == (args.samples is None):
        raise InputError("nerve: give exactly one of --cover or --samples")
    if args.cover is not None:
        sets, period = parse_cover(read_json(args.cover, "cover"))
    else:
        xs, ys = read_thick_thin_csv(args.samples)
        period = args.period
        radius = ledger.r if args.radius is None else args.radius
        separation = radius / 2 if args.separation is None else args.separation
        metric = cover.quotient_metric(period) if period else geometry.distance_array
        net = cover.greedy_net(xs, ys, separation, metric)
        sets = cover.ball_cover(net, radius, period)
    if args.vol is not None:
        vol = args.vol
    elif sets:
        # hyperbolic area of the bounding box of the balls
        boxes = np.array([s.bbox() for s in sets])
        width = period if period else boxes[:, 1].max() - boxes[:, 0].min()
        vol = float(width * (1 / boxes[:, 2].min() - 1 / boxes[:, 3].max()))
    else:
        vol = 0.0
    nc = cover.nerve(sets, cover.BallOracle(sets), dim_cap=args.dim_cap)
    C, D = cover.complexity_constants(ledger)
    report = cover.check_DC(nc, D, C * vol)
    radius = max((s.radius for s in sets), default=ledger.r)
    pack = constants.N_packing(ledger.n, radius / 2, 2 * radius)
    out = nc.to_json()
    out["cover"] = [s.to_json() for s in sets]
    out["dc_report"] = {**report.to_json(), "vol": vol,
                        "packing_degree_bound": pack,
                        "packing_degree_ok": nc.max_degree() <= pack}
    write_atomic(args.out, dump_json(out))
    return 2 if args.strict and not (report.passed and nc.max_degree() <= pack) else 0


def cmd_homology(args) -> int:
    data = read_json(args.input, "complex")
    if not isinstance(data, dict) or "simplices" not in data:
        raise InputError("complex: missing field 'simplices'")
    try:
        c = homology.SimplicialComplex.from_json(json.dumps({"simplices": data["simplices"]}))
    except (homology.ComplexError, TypeError, ValueError) as exc:
        raise InputError(f"simplices: {exc}") from None
    for p in args.primes:
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise InputError(f"--primes: {p} is not prime")
    summary = homology.homology(c, args.primes)
    out = {"f_vector": c.f_vector(), **summary.to_json()}
    status = 0
    if args.report_bounds:
        if args.vol is None or args.vol <= 0:
            raise InputError("--vol: a positive volume is required with --report-bounds")
        report = homology.bounds_report(summary, load_ledger(args), args.vol)
        out["bounds"] = report.to_json()
        if args.strict and not report.passed:
            status = 2
    write_atomic(args.out, dump_json(out))
    return status


def cmd_ledger(args) -> int:
    try:
        led = constants.build_ledger(args.n, args.margulis_eps, args.margulis_index)
    except constants.LedgerError as exc:
        raise InputError(f"--n/--margulis-eps: {exc}") from None
    write_atomic(args.out, dump_json(led.to_json()))
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="visbound", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, ledger_flags=False):
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--seed", type=int, default=0)
        if ledger_flags:
            p.add_argument("--n", type=int, default=2)
            p.add_argument("--margulis-eps", type=float, default=None)
            p.add_argument("--ledger", help="ledger JSON written by the ledger subcommand")
        return p

    p = common(sub.add_parser("curvature", help="sectional curvature profile"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--y-samples", type=int, default=5)
    p.add_argument("--range-out", help="CSV path for the (t, K_min, K_max) table")
    p.set_defaults(func=cmd_curvature)

    p = common(sub.add_parser("visibility", help="growth of the visibility integral"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--T", type=float, nargs="+", default=[10.0, 1e2, 1e3, 1e4])
    p.set_defaults(func=cmd_visibility)

    p = common(sub.add_parser("volume", help="cusp volume beyond t0"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--torus-volume", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=3.0)
    p.add_argument("--literal", action="store_true", help="integrate h instead of h^(n-1)")
    p.set_defaults(func=cmd_volume)

    p = common(sub.add_parser("thick-thin", help="sample d_Gamma and thin labels"), True)
    p.add_argument("--group", required=True, help="JSON list of [a, b, c, d] generators")
    p.add_argument("--eps", type=float, default=None, help="thin level (default: ledger eps)")
    p.add_argument("--word-cap", type=int, default=3)
    p.add_argument("--grid", type=float, default=0.05, help="hyperbolic grid pitch")
    p.add_argument("--x-range", type=float, nargs=2, default=[0.0, 1.0])
    p.add_argument("--y-range", type=float, nargs=2, default=[0.5, 20.0])
    p.add_argument("--random", type=int, default=0, help="sample this many random points instead")
    p.add_argument("--ledger-out")
    p.set_defaults(func=cmd_thick_thin)

    p = common(sub.add_parser("nerve", help="nerve of a ball cover"), True)
    p.add_argument("--cover", help="JSON list of {center, radius}")
    p.add_argument("--samples", help="thick-thin CSV; thick points seed a greedy net")
    p.add_argument("--period", type=float, default=None)
    p.add_argument("--radius", type=float, default=None, help="ball radius (default: ledger r)")
    p.add_argument("--separation", type=float, default=None, help="net separation (default: radius/2)")
    p.add_argument("--vol", type=float, default=None)
    p.add_argument("--dim-cap", type=int, default=4)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_nerve)

    p = common(sub.add_parser("homology", help="homology and bound report"), True)
    p.add_argument("--input", required=True)
    p.add_argument("--primes", type=int, nargs="*", default=[2])
    p.add_argument("--report-bounds", action="store_true")
    p.add_argument("--vol", type=float, default=None)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = common(sub.add_parser("ledger", help="dump the constants ledger"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--margulis-eps", type=float, default=None)
    p.add_argument("--margulis-index", type=int, default=None)
    p.set_defaults(func=cmd_ledger)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = getattr(logging, os.environ.get("VISBOUND_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"visbound {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
