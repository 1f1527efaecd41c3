"""Command line front end.

Every command prints one JSON report on stdout (and writes it to ``--out``
when given).  Exit status: 0 success, 1 malformed input, 2 domain error,
3 budget exceeded by an internal computation, 4 failed acceptance criteria.

Words are comma-separated letters in {1, 2, 3}; the leftmost letter is
applied last, so ``3,2,1`` means ``sigma_3 o sigma_2 o sigma_1``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import ParseError, WehlerDynError

ACCEPTANCE_FAILED = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    primes: list = field(default_factory=list)
    budget: int | None = None
    depth: int | None = None
    tol: float | None = None
    seed: int = 0
    workers: int = 1


def _word(text: str):
    from .orbits import GroupWord
    try:
        return GroupWord.parse(text)
    except (ValueError, WehlerDynError) as exc:
        raise ParseError(f"bad word {text!r}: {exc}") from None


def _surface(path):
    if path is None:
        raise ParseError("--surface is required")
    from .io import load_surface
    return load_surface(path)


def _start(text: str, S, recorded):
    from .io import parse_point
    if text.startswith("#"):
        try:
            pt = recorded[int(text[1:])]
        except (ValueError, IndexError):
            raise ParseError(f"no recorded point {text}") from None
        if S.p is not None and pt.p is None:
            # recorded points are rational; reduce them along with the surface
            from .wehler import make_point
            pt = make_point([(c.a, c.b) for c in pt.coords], S.p)
        return pt
    return parse_point(text, S.p)


def _fraction_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number list {text!r}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> dict:
    from .nsgeom import classify_isometry, is_unipotent, parabolic_fixed_line, word_matrix
    w = _word(args.word)
    g = word_matrix(w)
    t = classify_isometry(g, tol=args.tol if args.tol is not None else 1e-12)
    out = {"word": list(w.letters)}
    out.update(t.to_json())
    out["matrix"] = g.m.tolist()
    if t.kind == "parabolic":
        out["unipotent"] = is_unipotent(g.m)
        out["fixed_line"] = list(parabolic_fixed_line(g))
    return out


def cmd_orbit(args) -> dict:
    from .orbits import orbit_closure
    S, recorded = _surface(args.surface)
    if args.prime:
        S = S.reduce_mod(args.prime[0])
    start = _start(args.start, S, recorded)
    return orbit_closure(S, start, args.budget or 10**4).to_json()


def cmd_census(args) -> dict:
    from .orbits import fp_orbit_partition, fp_point_census
    S, _ = _surface(args.surface)
    if not args.prime:
        raise ParseError("--prime is required")
    reports = []
    for p in args.prime:
        Sp = S.reduce_mod(p) if S.p is None else S
        pts = fp_point_census(Sp, workers=args.workers)
        entry = {"prime": Sp.p, "census_size": len(pts)}
        if args.partition or args.csv:
            part = fp_orbit_partition(Sp, workers=args.workers, census=pts)
            entry["partition"] = part.to_json()
            if args.csv:
                path = Path(args.csv)
                if len(args.prime) > 1:
                    path = path.with_name(f"{path.stem}_p{Sp.p}{path.suffix}")
                path.write_text(part.to_csv())
        reports.append(entry)
    return {"surface": S.name, "census": reports}


def cmd_height(args) -> dict:
    from .heights import canonical_height_pair
    S, recorded = _surface(args.surface)
    start = _start(args.start, S, recorded)
    return canonical_height_pair(S, _word(args.word or "3,2,1"), start, args.depth or 4)


def cmd_stationary(args) -> dict:
    from .heights import StationaryHeight
    from .nsgeom import MeasureSpec, dominant_eigen, stationary_operator, wehler_ns_rep
    S, recorded = _surface(args.surface)
    words = [_word(w) for w in (args.measure or "1,2;2,3").split(";")]
    if args.weights:
        weights = _fraction_list(args.weights)
        nu = MeasureSpec(tuple(words), tuple(weights))
    else:
        nu = MeasureSpec.uniform(words)
    rep = wehler_ns_rep()
    w, alpha = dominant_eigen(stationary_operator(nu, rep), rep.form,
                              tol=args.tol if args.tol is not None else 1e-12)
    start = _start(args.start, S, recorded)
    depth = args.depth or 6
    sh = StationaryHeight(S, nu, w, alpha, budget=args.budget or 10**6)
    h = sh.value(start, depth)
    residual, bound = sh.residual(start, depth)
    return {
        "measure": nu.to_json(),
        "alpha": alpha,
        "w": w.to_json(),
        "point": start.to_json(),
        "depth": depth,
        "height": h.to_json(),
        "residual": residual,
        "residual_bound": bound,
    }


def cmd_torus(args) -> dict:
    from .io import parse_int_matrix
    from .kummer import QuadOrder, TorsionPoint, TorusAut, invariant_factors, torus_fixed_count
    try:
        order = QuadOrder.parse(args.order)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    m = parse_int_matrix(args.matrix)
    m = [[tuple(x) if isinstance(x, list) else x for x in row] for row in m]
    t = TorsionPoint.zero()
    if args.translation:
        t = TorsionPoint.from_fractions(_fraction_list(args.translation))
    try:
        f = TorusAut(order, m, t)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    count = torus_fixed_count(f, args.power)
    return {
        "order": order.value,
        "matrix": [list(r) for r in f.as_real.tolist()],
        "translation": t.to_json(),
        "power": args.power,
        "fixed_points": count if isinstance(count, int) else count.to_json(),
        "invariant_factors": invariant_factors(f, args.power),
    }


def cmd_kummer(args) -> dict:
    from .kummer import QuadOrder, chart_atlas, exceptional_fixed_points, hirzebruch_jung, kummer_type_validate
    if args.action == "charts":
        atlas = chart_atlas()
        out = atlas.to_json()
        out["hirzebruch_jung"] = hirzebruch_jung((5, 2))
        if args.report:
            out["fixed_points"] = exceptional_fixed_points(atlas, args.abs_alpha, args.abs_beta)
        return out
    try:
        order = QuadOrder.parse(args.order)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    weights = None
    if args.weights:
        try:
            a, b = (int(x) for x in args.weights.split(","))
        except ValueError:
            raise ParseError(f"bad weights {args.weights!r}") from None
        weights = (a, b)
    out = {"order": order.value, "group_order": args.group_order}
    out.update(kummer_type_validate(order, args.group_order, weights).to_json())
    return out


def cmd_acceptance(args) -> dict:
    from .acceptance import AcceptanceConfig, run_acceptance, summary
    involutions = None
    if args.involutions:
        try:
            involutions = json.loads(Path(args.involutions).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read involutions: {exc}") from None
    only = [int(x) for x in args.only.split(",")] if args.only else None
    cfg = AcceptanceConfig(seed=args.seed, tol=args.tol, workers=args.workers,
                           involutions=involutions, only=only)
    results = run_acceptance(cfg)
    for r in results:
        print(r.line(), file=sys.stderr)
    out = summary(results, timing=args.timing)
    args._failed = out["failed"] > 0
    return out


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", help="surface JSON file")
    common.add_argument("--word", help="comma-separated word, leftmost letter applied last")
    common.add_argument("--prime", type=int, action="append", help="prime (repeatable)")
    common.add_argument("--budget", type=int, help="point or node budget")
    common.add_argument("--depth", type=int, help="iteration depth")
    common.add_argument("--tol", type=float, help="floating tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="also write the JSON report here")
    common.add_argument("--csv", help="write the orbit-size histogram as CSV")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")

    p = _Parser(prog="wehlerdyn", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"wehlerdyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="type of a word acting on the lattice")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("orbit", parents=[common], help="orbit closure under the involutions")
    s.add_argument("--start", default="origin",
                   help='"x=[a:b],y=[c:d],z=[e:f]", "origin" or "#k" for the k-th recorded point')
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("census", parents=[common], help="points and orbits over F_p")
    s.add_argument("--partition", action="store_true", help="also partition the census into orbits")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("height", parents=[common], help="cyclic canonical heights of a point")
    s.add_argument("--start", default="#0")
    s.set_defaults(func=cmd_height)

    s = sub.add_parser("stationary", parents=[common], help="stationary height of a point")
    s.add_argument("--start", default="#0")
    s.add_argument("--measure", help='support words separated by ";" (default "1,2;2,3")')
    s.add_argument("--weights", help="comma-separated rational weights (default uniform)")
    s.set_defaults(func=cmd_stationary)

    s = sub.add_parser("torus", parents=[common], help="torus automorphisms")
    s.add_argument("action", choices=["fix"])
    s.add_argument("--matrix", required=True, help='2x2 matrix, entries int or [a, b] = a + b g')
    s.add_argument("--order", default="Z2", help="Z2, Zi or Zw")
    s.add_argument("--power", type=int, default=1)
    s.add_argument("--translation", help="four comma-separated rationals")
    s.set_defaults(func=cmd_torus)

    s = sub.add_parser("kummer", parents=[common], help="Kummer types and the chart atlas")
    s.add_argument("action", choices=["charts", "validate"])
    s.add_argument("--report", action="store_true", help="include fixed points on exceptional curves")
    s.add_argument("--abs-alpha", type=float, default=2.0)
    s.add_argument("--abs-beta", type=float, default=0.5)
    s.add_argument("--order", default="Z2")
    s.add_argument("--group-order", type=int, default=1)
    s.add_argument("--weights", help="generator exponents a,b")
    s.set_defaults(func=cmd_kummer)

    s = sub.add_parser("acceptance", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--involutions", help="JSON file with replacement involution matrices")
    s.set_defaults(func=cmd_acceptance)
    return p


def _config(args) -> RunConfig:
    return RunConfig(command=args.command,
                     inputs=[args.surface] if args.surface else [],
                     primes=args.prime or [], budget=args.budget, depth=args.depth,
                     tol=args.tol, seed=args.seed, workers=args.workers)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._failed = False
    try:
        start = time.perf_counter()
        results = args.func(args)
        elapsed = time.perf_counter() - start
    except WehlerDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:      # invalid argument values reaching a module
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = {"tool": "wehlerdyn", "version": __version__, "config": asdict(_config(args)),
           "results": results}
    if args.timing:
        doc["timing"] = {"seconds": round(elapsed, 3)}
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return ACCEPTANCE_FAILED if args._failed else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
