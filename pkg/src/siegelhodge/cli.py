"""Command-line interface: ``siegelhodge <command> [options]``.

Output goes to stdout, or to ``--out DIR`` as ``<command>.json`` /
``<command>.csv`` (``report.json`` for ``verify``), written atomically.
Usage errors exit with 2, failed checks with 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

__all__ = ["main", "build_parser", "run_command"]


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# input helpers


def _load_json_arg(text: str):
    """A JSON literal, ``@path`` or an existing file path."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    elif not text.lstrip().startswith(("[", "{")) and Path(text).is_file():
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse JSON argument: {exc}") from None


def _matrix(text: str):
    from .exactlin import ExactMatrix

    data = _load_json_arg(text)
    if isinstance(data, dict):
        return ExactMatrix.from_json(data)
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise UsageError("matrix must be a nested JSON list or an ExactMatrix JSON object")
    return ExactMatrix([[str(x) if not isinstance(x, str) else x for x in r] for r in data], len(data[0]))


def _mhs(text: str):
    from .catalog import builtin_mhs
    from .mhs import MixedHodge

    known = builtin_mhs()
    if text in known:
        return known[text]
    return MixedHodge.from_json(_load_json_arg(text))


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {text!r}")
    return vals


def _points(text: str) -> list[complex]:
    """``"x,y"`` or ``"x1,y1;x2,y2"`` as complex numbers."""
    return [complex(*_floats(p, 2)) for p in text.split(";")]


def _interval(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"expected lo:hi, got {text!r}")
    lo, hi = (float(p) for p in parts)
    return lo, hi


# --------------------------------------------------------------------------
# output helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Output:
    def __init__(self, args, stdout):
        self.out_dir = Path(args.out) if args.out else None
        self.fmt = args.format
        self.stdout = stdout
        self.command = args.command

    def emit(self, payload: dict, table=None, name: str | None = None):
        """Write ``payload`` as JSON, or ``table = (header, rows)`` as CSV."""
        if self.fmt == "csv":
            if table is None:
                raise UsageError(f"--format csv is not available for {self.command}")
            text, ext = _dump_csv(*table), "csv"
        else:
            text, ext = _dump_json(payload), "json"
        if self.out_dir is None:
            self.stdout.write(text)
        else:
            target = self.out_dir / (name or f"{self.command}.{ext}")
            _atomic_write(target, text)
            self.stdout.write(f"wrote {target}\n")


# --------------------------------------------------------------------------
# commands


def _cmd_wfilt(args, out):
    from .weightfilt import (NotExists, monodromy_filtration, relative_weight_filtration,
                             satisfies_monodromy_axioms)
    from .exactlin import Filtration

    n = _matrix(args.matrix)
    if args.relative:
        w = Filtration.from_json(_load_json_arg(args.relative))
        m = relative_weight_filtration(n, w)
        if isinstance(m, NotExists):
            out.emit({"exists": False, "reason": m.reason})
            return 1
        out.emit({"exists": True, "filtration": m.to_json()})
        return 0
    w = monodromy_filtration(n, args.center)
    gr = {str(l): w.gr_dim(l) for l in range(w.lo, w.hi + 1)}
    out.emit({"center": args.center, "filtration": w.to_json(), "graded_dims": gr,
              "axioms": satisfies_monodromy_axioms(n, w, args.center)})
    return 0


def _cmd_split(args, out):
    from .mhs import deligne_splitting, delta_splitting, is_mhs, is_r_split

    m = _mhs(args.mhs)
    if not is_mhs(m):
        out.emit({"mhs": False})
        return 1
    s = deligne_splitting(m)
    delta, rs = delta_splitting(m)
    out.emit({"mhs": True, "splitting": s.to_json(), "hodge_numbers": {f"{p},{q}": d for (p, q), d in
                                                                       s.hodge_numbers().items()},
              "r_split": is_r_split(s), "delta": delta.to_json(), "r_split_F": rs.F.to_json()})
    return 0


def _cmd_polarize(args, out):
    from .mhs import PolarizationForm, polarized_mhs_check

    m = _mhs(args.mhs)
    q = PolarizationForm.for_weight(_matrix(args.q), args.k)
    rep = polarized_mhs_check(m, _matrix(args.n), q, args.k, report=True)
    out.emit({"polarized": bool(rep), "report": _jsonable(getattr(rep, "__dict__", {}))})
    return 0 if rep else 1


def _cmd_reduce(args, out):
    from .reduction.sl2z import reduce_sl2z

    x, y = _floats(args.z, 2)
    if y <= 0:
        raise UsageError("z must lie in the upper half-plane")
    w, (a, b, c, d) = reduce_sl2z(complex(x, y))
    out.emit({"z": [x, y], "z0": [w.real, w.imag], "gamma": [[a, b], [c, d]]})
    return 0


def _cmd_siegel(args, out):
    from .reduction.siegel import SiegelSet, UpperHalfPoint, siegel_membership

    if (args.point is None) == (args.matrix is None):
        raise UsageError("give exactly one of --point and --matrix")
    if args.point is not None:
        pts = _points(args.point)
        s = SiegelSet.upper_half(args.u, args.t, len(pts))
        obj = UpperHalfPoint.from_complex(*pts)
    else:
        obj = _matrix(args.matrix).to_numpy(float)
        n = obj.shape[0]
        s = SiegelSet(args.t, [(-args.u, args.u)] * (n * (n - 1) // 2), blocks=(n,))
    inside = siegel_membership(obj, s)
    out.emit({"siegel_set": s.to_json(), "member": inside})
    return 1 if args.check and not inside else 0


def _cmd_enumerate(args, out):
    from .reduction.siegel import SiegelSet
    from .reduction.sl2z import siegel_intersection_enumerate

    s1 = SiegelSet.upper_half(args.u, args.t)
    s2 = SiegelSet.upper_half(args.u, args.t2 if args.t2 is not None else args.t)
    rep = siegel_intersection_enumerate(s1, s2, args.bound)
    rows = [(*r["gamma"], r["kind"]) for r in rep.records]
    out.emit({"elements": [list(g) for g in rep.elements], "records": rep.records, "complete": rep.complete,
              "candidates": rep.candidates, "pruned": rep.pruned, "cutoffs": rep.cutoffs},
             (["a", "b", "c", "d", "kind"], rows))
    return 0 if rep.complete else 1


def _cmd_hecke(args, out):
    from fractions import Fraction

    from .reduction.hecke import hecke_correspondence

    parts = args.g.split(",")
    if len(parts) != 4:
        raise UsageError("--g needs four comma-separated rational entries a,b,c,d")
    try:
        g = [Fraction(p.strip()) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse --g {args.g!r}") from None
    res = hecke_correspondence(g, args.level)
    rows = [(*label, *gamma) for label, gamma in res.cosets]
    out.emit({"degree": res.degree, "determinant": res.determinant,
              "cosets": [{"label": list(l), "gamma": list(gm)} for l, gm in res.cosets]},
             (["a", "b", "c", "d", "g11", "g12", "g21", "g22"], rows))
    return 0


def _cmd_orbit(args, out):
    from .period.families import get_family
    from .period.orbit import invariant_distance, nilpotent_orbit_eval

    fam = get_family(args.family)
    z = _points(args.z)
    if len(z) != fam.factors:
        raise UsageError(f"family {fam.name} needs {fam.factors} point(s) separated by ';'")
    theta = nilpotent_orbit_eval(fam.orbit, z).taus()
    payload = {"family": fam.name, "z": z, "theta": list(theta)}
    if min(v.imag for v in z) >= fam.y_min:
        phi = np.atleast_1d(fam.lift(np.array(z))).ravel()
        payload["phi"] = list(phi)
        payload["distance"] = invariant_distance(tuple(phi), theta)
    out.emit(payload)
    return 0


def _cmd_decay(args, out):
    from .period.decay import schmid_decay_check

    fits = schmid_decay_check(args.family, args.x_window, _interval(args.y), args.samples, args.seed)
    rows = []
    for f in fits:
        pred = f.K * f.y ** f.beta * np.exp(-f.rate * f.y) if not f.identically_zero else np.zeros_like(f.y)
        rows.extend((f.factor, float(y), float(d), float(p)) for y, d, p in zip(f.y, f.distance, pred))
    ok = all(f.rate_ok(0.05 * args.tolerance) and f.residual < 0.1 * args.tolerance for f in fits)
    out.emit({"family": args.family, "fits": [f.to_json() for f in fits], "pass": ok},
             (["factor", "y", "distance", "fit"], rows))
    return 0 if ok else 1


def _cmd_contain(args, out):
    from .period.containment import siegel_containment_check

    res = siegel_containment_check(args.family, args.R, args.eta, args.grid, args.y_max,
                                   holdout=args.holdout, seed=args.seed)
    rows = [(list(o), *w.t, *[b for lo_hi in w.u_bounds for b in lo_hi]) for o, w in zip(res.orderings, res.witnesses)]
    k = len(res.witnesses[0].t) if res.witnesses else 0
    header = ["ordering"] + [f"t{j}" for j in range(k)] + [f"u{j}_{e}" for j in range(k) for e in ("lo", "hi")]
    out.emit(res.to_json(), (header, rows))
    return 0 if res.ok else 1


def _cmd_hodge_locus(args, out):
    from .period.hodgelocus import hodge_locus_demo

    res = hodge_locus_demo(args.grid, args.bound)
    out.emit({"n_relations": res.n_relations, "components": [c.to_json() for c in res.components]},
             (["lambda1", "lambda2", "a", "b", "c", "d"], list(res.rows())))
    return 0 if res.component((1, 0, 0, 1)) is not None else 1


def _cmd_verify(args, out):
    from .verify import run_verify

    only = args.only.split(",") if args.only else None
    log = sys.stderr if not args.quiet else None
    rep = run_verify(args.suite, args.seed, args.tolerance, only,
                     progress=(lambda r: print(r.line(), file=log)) if log else None)
    rows = [(r.id, r.suite, r.status, json.dumps(_jsonable(r.measured), default=str), r.runtime)
            for r in rep.results]
    out.emit(rep.to_json(), (["id", "suite", "status", "measured", "runtime"], rows),
             name="report.json" if args.format == "json" else "report.csv")
    return rep.exit_code()


COMMANDS = {
    "wfilt": _cmd_wfilt,
    "split": _cmd_split,
    "polarize-check": _cmd_polarize,
    "reduce": _cmd_reduce,
    "siegel": _cmd_siegel,
    "enumerate": _cmd_enumerate,
    "hecke": _cmd_hecke,
    "orbit": _cmd_orbit,
    "decay": _cmd_decay,
    "contain": _cmd_contain,
    "hodge-locus": _cmd_hodge_locus,
    "verify": _cmd_verify,
}


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags without defaults, so a flag given
    # before the command name is not overwritten by the subparser
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=d(0), help="seed for every random choice")
    common.add_argument("--out", default=d(None), help="directory for output files (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=d("json"))
    common.add_argument("--tolerance", type=float, default=d(1.0),
                        help="scale factor for numeric tolerances")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="siegelhodge", description=__doc__.splitlines()[0],
                                parents=[_common_flags(False)])
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True
    common = _common_flags(True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    s = add("wfilt", "monodromy or relative weight filtration")
    s.add_argument("--matrix", required=True, help="nilpotent matrix as JSON (literal, file or @file)")
    s.add_argument("--center", type=int, default=0)
    s.add_argument("--relative", help="filtration JSON; compute the relative weight filtration")

    s = add("split", "Deligne splitting and δ-splitting of a mixed Hodge structure")
    s.add_argument("--mhs", required=True, help="MHS JSON or a built-in name")

    s = add("polarize-check", "check a polarized mixed Hodge structure")
    s.add_argument("--mhs", required=True)
    s.add_argument("--n", required=True, help="nilpotent matrix JSON")
    s.add_argument("--q", required=True, help="bilinear form matrix JSON")
    s.add_argument("--k", type=int, required=True, help="weight")

    s = add("reduce", "reduce a point of the upper half-plane to the fundamental domain")
    s.add_argument("--z", required=True, help='"x,y"')

    s = add("siegel", "Siegel-set membership")
    s.add_argument("--point", help='"x,y" or "x1,y1;x2,y2"')
    s.add_argument("--matrix", help="element of SL(n, R) as JSON")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--u", type=float, default=0.5)
    s.add_argument("--check", action="store_true", help="exit 1 if not a member")

    s = add("enumerate", "SL(2, Z) elements moving one Siegel set onto another")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--t2", type=float, help="height of the second Siegel set (default: --t)")
    s.add_argument("--u", type=float, default=0.5)
    s.add_argument("--bound", type=int, default=20, help="entry bound")

    s = add("hecke", "coset enumeration for a Hecke correspondence")
    s.add_argument("--g", required=True, help='"a,b,c,d" rational entries')
    s.add_argument("--level", type=int, default=1)

    s = add("orbit", "nilpotent orbit and lifted period at a point")
    s.add_argument("--family", default="legendre")
    s.add_argument("--z", required=True, help='"x,y" per factor, separated by ";"')

    s = add("decay", "decay fit of the distance between period map and nilpotent orbit")
    s.add_argument("--family", default="legendre")
    s.add_argument("--y", default="2:8", help="lo:hi")
    s.add_argument("--samples", type=int, default=60)
    s.add_argument("--x-window", type=float, default=0.0)

    s = add("contain", "Siegel sets containing the period image")
    s.add_argument("--family", default="legendre")
    s.add_argument("--R", type=float, default=0.5)
    s.add_argument("--eta", type=float, default=2.0)
    s.add_argument("--grid", type=int, default=10_000)
    s.add_argument("--y-max", type=float, default=50.0)
    s.add_argument("--holdout", type=int, default=0)

    s = add("hodge-locus", "isogeny components on a real grid of two Legendre parameters")
    s.add_argument("--grid", type=int, default=200)
    s.add_argument("--bound", type=int, default=4)

    s = add("verify", "run the acceptance checks")
    s.add_argument("--suite", choices=("all", "exact", "numeric"), default="all")
    s.add_argument("--only", help="comma-separated check ids")
    s.add_argument("--quiet", action="store_true")
    return p


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    out = _Output(args, stdout)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ValueError, TypeError, NotImplementedError, OSError) as exc:
        print(f"siegelhodge {args.command}: error: {exc}", file=stderr)
        return 2


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
