"""Command-line front end: ``pelastica <subcommand> ...``.

Every subcommand builds a result object, renders it in the requested format
and writes it to stdout or, with ``--out``, atomically to a file. Domain
errors exit with status 2 and a JSON error record on stderr; any other
failure exits with status 1.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import curves, energy, liyau, moduli, network, pelliptic
from ._quadrature import Tolerance
from .classify import ClassificationReport, PinnedProblem, classify
from .errors import DomainError

FORMATS = {
    "special": ("text", "json"),
    "curve": ("json", "csv", "svg"),
    "classify": ("json", "text"),
    "energy": ("json", "text"),
    "liyau": ("json", "text"),
    "network": ("json", "svg", "text"),
    "tables": ("csv", "json"),
}
_SPECIAL_NAME = re.compile(r"^p(\d+)(?:_(\d+))?$")


class UsageError(DomainError):
    """Flags that parse but do not fit the subcommand."""


# ------------------------------------------------------------------ parsing


def exponent(text: str):
    """A float, or ``pM`` / ``pM_N`` for the special exponent p_{M,N}."""
    m = _SPECIAL_NAME.match(text.strip())
    if m:
        return moduli.p_mn(int(m.group(1)), int(m.group(2) or 1))
    return float(text)


def float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def tolerance_from_env() -> Tolerance | None:
    raw = os.environ.get("PELASTICA_TOL")
    if not raw:
        return None
    try:
        value = float(raw)
    except ValueError as exc:
        raise UsageError(f"PELASTICA_TOL must be a number, got {raw!r}") from exc
    return Tolerance(abs_tol=value, rel_tol=value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pelastica", description="p-elliptic functions and pinned p-elasticae")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--format", default=FORMATS[name][0], help=f"one of {', '.join(FORMATS[name])}")
        sp.add_argument("--out", default=None, help="output path (written atomically); stdout if omitted")
        return sp

    sp = add("special", "special functions and constants")
    sp.add_argument("name", choices=["F1", "F2", "E1", "E2", "K1", "K2", "am1", "am2", "sn", "cn", "dn",
                                     "sech", "tanh", "qstar", "phistar", "pmn", "Q", "Qtilde", "varpi"])
    sp.add_argument("--p", type=exponent)
    sp.add_argument("--q", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int, default=1)

    sp = add("curve", "sample a curve")
    sp.add_argument("kind", choices=["arc", "loop", "figure-eight", "flatcore", "leafed", "wavelike", "borderline"])
    sp.add_argument("--p", type=exponent, required=True)
    sp.add_argument("--q", type=float)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int)
    sp.add_argument("--sigma", type=int_list, help="flat-core loop signs or leaf signs, comma separated")
    sp.add_argument("--lengths", type=float_list, help="flat-core segment lengths, comma separated")
    sp.add_argument("--open", action="store_true", help="open leafed curve")
    sp.add_argument("--samples", type=int)

    sp = add("classify", "pinned critical points for (p, r)")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--nmax", type=int, default=5)

    sp = add("energy", "closed-form versus quadrature energy")
    sp.add_argument("kind", choices=["arc", "loop", "figure-eight", "flatcore", "varpi"])
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--sigma", type=int_list)
    sp.add_argument("--lengths", type=float_list)
    sp.add_argument("--samples", type=int)

    sp = add("liyau", "multiplicity bounds and leafed elasticae")
    sp.add_argument("action", choices=["table", "bound", "exists", "check"])
    sp.add_argument("--p", type=exponent)
    sp.add_argument("--m", type=int)
    sp.add_argument("--modd", type=int)
    sp.add_argument("--mmax", type=int)
    sp.add_argument("--open", action="store_true")

    sp = add("network", "Theta-networks")
    sp.add_argument("action", choices=["test", "bound", "minimize"])
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=2 * math.pi / 3)
    sp.add_argument("--samples", type=int, default=4097)
    sp.add_argument("--cells", type=int, default=32)
    sp.add_argument("--max-iter", type=int, default=3000)

    sp = add("tables", "value tables")
    sp.add_argument("kind", nargs="?", default="elliptic", choices=["elliptic", "phistar", "Q"])
    sp.add_argument("--p", type=float_list, default=[1.5, 2.0, 3.0])
    sp.add_argument("--q", type=float_list, default=[0.1, 0.5, 0.9])
    sp.add_argument("--x", type=float_list, default=[0.25, 1.0, 2.5])
    sp.add_argument("--pmin", type=float, default=1.05)
    sp.add_argument("--pmax", type=float, default=50.0)
    sp.add_argument("--count", type=int, default=100)
    return parser


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command} requires --{', --'.join(missing)}")


# ----------------------------------------------------------- subcommands


def cmd_special(args, tol):
    name, p = args.name, args.p
    if name == "pmn":
        _need(args, "m")
        sp = moduli.p_mn(args.m, args.n, tol)
        return {"name": f"p_{args.m},{args.n}", "value": sp.p_value}
    _need(args, "p")
    pf = float(p)
    if name in ("qstar", "phistar", "varpi"):
        fn = {"qstar": ("q_star", moduli.q_star), "phistar": ("phi_star", moduli.phi_star),
              "varpi": ("varpi_star", energy.varpi_star)}[name]
        return {"name": fn[0], "value": fn[1](pf, tol)}
    if name in ("sech", "tanh"):
        _need(args, "x")
        f = pelliptic.sech_p if name == "sech" else pelliptic.tanh_p
        return {"name": f"{name}_p", "value": float(f(pf, args.x, tol))}
    _need(args, "q")
    q = args.q
    complete = {"K1": pelliptic.complete_K1, "K2": pelliptic.complete_K2, "Q": moduli.Q, "Qtilde": moduli.Q_tilde}
    if name in complete:
        return {"name": name, "value": float(complete[name](pf, q, tol))}
    if args.x is None and name in ("F1", "F2", "E1", "E2"):
        # complete value: the integral up to pi/2
        args.x = math.pi / 2
    _need(args, "x")
    incomplete = {"F1": pelliptic.incomplete_F1, "F2": pelliptic.incomplete_F2, "E1": pelliptic.incomplete_E1,
                  "E2": pelliptic.incomplete_E2, "am1": pelliptic.am1, "am2": pelliptic.am2,
                  "sn": pelliptic.sn_p, "cn": pelliptic.cn_p, "dn": pelliptic.dn_p}
    return {"name": name, "value": float(incomplete[name](pf, q, args.x, tol))}


def _flatcore_spec(args) -> curves.FlatCoreSpec:
    p = float(args.p)
    if args.sigma is None and args.lengths is None:
        return curves.FlatCoreSpec.equal(p, args.r, args.n)
    sigma = args.sigma or [1] * args.n
    lengths = args.lengths
    if lengths is None:
        total = curves.flatcore_segment_total(p, args.r, args.n)
        lengths = [total / (args.n + 1)] * (args.n + 1)
    return curves.FlatCoreSpec(p, args.r, args.n, sigma, lengths)


def cmd_curve(args, tol):
    kind, p = args.kind, args.p
    pf = float(p)
    if kind == "arc":
        return curves.build_arc(pf, args.r, args.n, args.samples, tol)
    if kind == "loop":
        return curves.build_loop(pf, args.r, args.n, args.samples, tol)
    if kind == "figure-eight":
        return curves.build_figure_eight(pf, args.n, args.samples, tol)
    if kind == "flatcore":
        return curves.build_flatcore(_flatcore_spec(args), args.samples, tol)
    if kind == "leafed":
        _need(args, "m")
        tup = curves.leaf_tuple(p, args.m, closed=not args.open, sign_pattern=args.sigma)
        return curves.build_leafed(p, tup, 1.0, args.samples, tol)
    n = args.samples or curves.SAMPLES_PER_PERIOD
    if kind == "wavelike":
        _need(args, "q")
        K = pelliptic.complete_K1(pf, args.q, tol)
        return curves.wavelike(pf, args.q, (-K, (2 * args.n - 1) * K), n, tol)
    return curves.borderline(pf, None, n, 1, tol)


def cmd_classify(args, tol):
    problem = PinnedProblem.from_ratio(args.p, args.r, args.L)
    return classify(problem, args.nmax, tol)


def cmd_energy(args, tol):
    p = args.p
    if args.kind == "varpi":
        return {"kind": "varpi", "p": p, "closed_form": energy.varpi_star(p, tol)}
    if args.kind in ("arc", "figure-eight"):
        r = 0.0 if args.kind == "figure-eight" else args.r
        closed = energy.normalized_energy_wave(p, r, args.n, "arc", tol)
        curve = curves.build_arc(p, r, args.n, args.samples, tol)
    elif args.kind == "loop":
        closed = energy.normalized_energy_wave(p, args.r, args.n, "loop", tol)
        curve = curves.build_loop(p, args.r, args.n, args.samples, tol)
    else:
        spec = _flatcore_spec(args)
        closed = energy.normalized_energy_flat(p, args.r, args.n, tol)
        curve = curves.build_flatcore(spec, args.samples, tol)
    quad = energy.bending_quadrature(curve, p)
    return {
        "kind": args.kind, "p": p, "r": args.r, "n": args.n,
        "closed_form": closed, "quadrature": quad.normalized,
        "relative_difference": (quad.normalized - closed) / closed,
        "length": quad.length, "bending": quad.bending,
    }


def cmd_liyau(args, tol):
    if args.action == "table":
        _need(args, "modd", "mmax")
        return liyau.thresholding_table(args.modd, args.mmax)
    _need(args, "p", "m")
    p, m = args.p, args.m
    if args.action == "bound":
        return {"p": float(p), "m": m, "closed": not args.open, "bound": liyau.liyau_bound(p, m, not args.open)}
    if args.action == "exists":
        ex = liyau.leafed_exists(p, m)
        return {"p": float(p), "m": m, **ex.to_dict()}
    tup = curves.leaf_tuple(p, m, closed=not args.open)
    curve = curves.build_leafed(p, tup, 1.0, None, tol)
    chk = liyau.check_curve(curve, float(p))
    return {"p": float(p), "m": m, **chk.to_dict()}


def cmd_network(args, tol):
    p, alpha = args.p, args.alpha
    if args.action == "bound":
        return {"p": p, "degenerate_bound": network.degenerate_bound(p, tol), "alpha_window": network.alpha_window(p, tol)}
    net = network.build_test_network(p, alpha, args.samples, tol)
    if args.action == "test":
        return net
    opts = network.MinimizerOptions(cells=args.cells, max_iter=args.max_iter)
    return network.minimize_network(p, alpha, net, opts, tol)


def cmd_tables(args, tol):
    if args.kind == "elliptic":
        header = ["p", "q", "x", "F1", "E1", "sn", "cn", "dn"]
        rows = []
        for p in args.p:
            for q in args.q:
                xs = np.asarray(args.x, dtype=float)
                cols = [pelliptic.incomplete_F1(p, q, xs, tol), pelliptic.incomplete_E1(p, q, xs, tol),
                        pelliptic.sn_p(p, q, xs, tol), pelliptic.cn_p(p, q, xs, tol), pelliptic.dn_p(p, q, xs, tol)]
                for i, x in enumerate(xs):
                    rows.append([p, q, float(x)] + [float(np.atleast_1d(c)[i]) for c in cols])
        return header, rows
    if args.kind == "phistar":
        if args.count < 2 or not 1.0 < args.pmin < args.pmax:
            raise UsageError("phistar table needs count >= 2 and 1 < pmin < pmax")
        ps = np.geomspace(args.pmin - 1.0, args.pmax - 1.0, args.count) + 1.0
        return ["p", "phi_star_over_pi"], [[float(p), moduli.phi_star(float(p), tol) / math.pi] for p in ps]
    if args.count < 2:
        raise UsageError("Q table needs count >= 2")
    qs = np.linspace(0.0, 1.0, args.count + 1)[1:-1]
    rows = [[p, float(q), moduli.Q(p, float(q), tol), moduli.Q_tilde(p, float(q), tol)] for p in args.p for q in qs]
    return ["p", "q", "Q", "Q_tilde"], rows


COMMANDS = {
    "special": cmd_special, "curve": cmd_curve, "classify": cmd_classify, "energy": cmd_energy,
    "liyau": cmd_liyau, "network": cmd_network, "tables": cmd_tables,
}


# ------------------------------------------------------------- rendering


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join("%.17g" % v for v in row) + "\n")
    return buf.getvalue()


def curve_csv(curve: curves.SampledCurve) -> str:
    data = np.column_stack([curve.s, curve.xy, curve.theta, curve.k])
    return _csv(["s", "x", "y", "theta", "k"], data.tolist())


def polylines_svg(polylines) -> str:
    """SVG drawing of planar polylines, y pointing up, fitted to the bounding box."""
    allpts = np.vstack(polylines)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = float(max(hi - lo))
    span = span if span > 0 else 1.0
    pad = 0.05 * span
    stroke = 0.005 * span
    x0, y0 = lo[0] - pad, -hi[1] - pad
    w, h = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.9g} {y0:.9g} {w:.9g} {h:.9g}">',
    ]
    for pts in polylines:
        coords = " ".join(f"{x + 0.0:.9g},{0.0 - y:.9g}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="black" stroke-width="{stroke:.9g}" '
                   f'stroke-linejoin="round" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _text_dict(d: dict) -> str:
    return "".join(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n" for k, v in d.items())


def _classify_text(rep: ClassificationReport) -> str:
    lines = [f"p = {rep.p!r}", f"r = {rep.r!r}", f"regime = {rep.regime}",
             f"{'kind':<16}{'n':>3}  {'q':>20}  {'energy':>24}  note"]
    for f in rep.families:
        q = "-" if f.q is None else repr(f.q)
        note = "" if f.resolved else "lower bound (modulus beyond cap)"
        if f.constraint:
            note = f"{f.constraint}; dof = {f.degrees_of_freedom}"
        lines.append(f"{f.kind:<16}{f.n:>3}  {q:>20}  {f.energy!r:>24}  {note}")
    lines.append(f"minimizer = arc n=1 energy {rep.minimizer.energy!r}")
    return "\n".join(lines) + "\n"


def render(command: str, fmt: str, result, p=None) -> str:
    if fmt not in FORMATS[command]:
        raise UsageError(f"format {fmt!r} is not available for {command}; use one of {', '.join(FORMATS[command])}")
    if command == "special":
        return f"{result['name']} = {result['value']!r}\n" if fmt == "text" else _json(result)
    if command == "curve":
        if fmt == "csv":
            return curve_csv(result)
        if fmt == "svg":
            return polylines_svg([result.xy])
        return _json(result.to_dict())
    if command == "classify":
        return _classify_text(result) if fmt == "text" else _json(result.to_dict())
    if command == "liyau":
        if isinstance(result, liyau.OptimalityTable):
            return result.to_text() if fmt == "text" else _json(result.to_dict())
        return _text_dict(result) if fmt == "text" else _json(result)
    if command == "network":
        if isinstance(result, dict):
            return _text_dict(result) if fmt == "text" else _json(result)
        net = result.network if isinstance(result, network.MinimizationResult) else result
        if fmt == "svg":
            return polylines_svg([c.xy for c in net.curves])
        if isinstance(result, network.MinimizationResult):
            d = result.to_dict(p)
            if fmt == "text":
                d = {k: v for k, v in d.items() if k not in ("network", "history")}
                return _text_dict(d)
            return _json(d)
        if fmt == "text":
            rep = network.network_energy(net, p)
            return _text_dict({"alpha": net.alpha, "p": p, "length": rep.length, "bending": rep.bending,
                               "energy": rep.normalized, "angle_deviation": net.angle_deviation()})
        return _json(net.to_dict(p))
    if command == "tables":
        header, rows = result
        if fmt == "csv":
            return _csv(header, rows)
        return _json([dict(zip(header, r)) for r in rows])
    return _text_dict(result) if fmt == "text" else _json(result)


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pelastica-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _error(kind: str, exc: BaseException) -> str:
    return json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.format not in FORMATS[args.command]:
            raise UsageError(f"format {args.format!r} is not available for {args.command}")
        tol = tolerance_from_env()
        result = COMMANDS[args.command](args, tol)
        p = getattr(args, "p", None)
        text = render(args.command, args.format, result, p)
        if args.out:
            write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except DomainError as exc:
        sys.stderr.write(_error("domain", exc))
        return 2
    except Exception as exc:  # noqa: BLE001 - every other failure maps to exit status 1
        sys.stderr.write(_error("internal", exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
