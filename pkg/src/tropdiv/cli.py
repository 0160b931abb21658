"""Command-line front end. Every subcommand prints one JSON document on stdout.

Exit codes: 0 success, 2 malformed input, 3 precondition violated, 4 resource
cap hit, 1 anything else. Errors go to stderr as ``{"error": {...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .divisor import Divisor
from .errors import TropdivError, ValidationError
from .graph import MetricGraph, Point, check_condition_i, genus
from .hyperelliptic import find_involution, hyp_rank, is_hyperelliptic, p_value, wdr_enumerate
from .moderator import dominating_moderator, extend_reduced
from .oracle import Caps, oracle_equivalent, oracle_rank
from .rank import canonical_divisor, rank, rank_weighted, rr_check
from .reduction import linearly_equivalent, reduce


def parse_point(text: str):
    text = text.strip()
    if text.startswith("{"):
        try:
            return Point.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad point {text!r}") from exc
    if "@" in text:
        edge, _, off = text.partition("@")
        return Point.from_json({"edge": edge, "offset": off})
    return Point.at(text)


def parse_caps(text: str | None) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for part in text.split(","):
        key, sep, val = part.partition("=")
        if not sep or not val.strip().isdigit():
            raise ValidationError(f"caps must look like key=int[,key=int], got {text!r}")
        out[key.strip()] = int(val)
    return out


def _graph(args) -> MetricGraph:
    g = MetricGraph.from_json(corpus.read_json(args.graph))
    if getattr(args, "emit_dot", None):
        Path(args.emit_dot).write_text(g.to_dot())
    return g


def _divisor(g: MetricGraph, path: str) -> Divisor:
    return corpus.load_divisor(g, path)


def _base(g: MetricGraph, args):
    return g.point(parse_point(args.base)) if args.base else Point.at(g.vertex_ids[0])


# -- handlers -----------------------------------------------------------------------


def cmd_genus(args):
    gen = genus(_graph(args))
    return {"weighted": gen.weighted, "unweighted": gen.unweighted}


def cmd_reduce(args):
    g = _graph(args)
    return reduce(_divisor(g, args.divisor), _base(g, args)).to_json()


def cmd_rank(args):
    g = _graph(args)
    d = _divisor(g, args.divisor)
    return {"rank": rank_weighted(d, g) if args.weighted else rank(d)}


def cmd_equiv(args):
    g = _graph(args)
    res = linearly_equivalent(_divisor(g, args.divisor), _divisor(g, args.other), _base(g, args))
    return {"equivalent": res.equivalent, "witness": res.witness.to_json() if res.witness else None}


def cmd_canonical(args):
    k = canonical_divisor(_graph(args), args.weighted)
    return {"divisor": k.to_json(), "degree": k.degree}


def cmd_rr_check(args):
    g = _graph(args)
    return rr_check(_divisor(g, args.divisor)).to_json()


def cmd_hyperelliptic(args):
    return is_hyperelliptic(_graph(args)).to_json()


def cmd_involution(args):
    return find_involution(_graph(args)).to_json()


def cmd_p(args):
    g = _graph(args)
    fixed = g.point(parse_point(args.base)) if args.base else None
    return {"p": p_value(_divisor(g, args.divisor), g, fixed)}


def cmd_hyp_rank(args):
    g = _graph(args)
    d = _divisor(g, args.divisor)
    return {"rank": hyp_rank(d, g), "p": p_value(d, g)}


def cmd_condition_i(args):
    return check_condition_i(_graph(args)).to_json()


def cmd_moderator(args):
    g = _graph(args)
    m = dominating_moderator(_divisor(g, args.divisor), _base(g, args))
    if args.orientation_dot:
        Path(args.orientation_dot).write_text(m.order.to_dot())
    return m.to_json()


def cmd_extend(args):
    g = _graph(args)
    return extend_reduced(_divisor(g, args.divisor), _base(g, args)).to_json()


def cmd_wdr(args):
    caps = parse_caps(args.caps)
    res = wdr_enumerate(
        _graph(args),
        args.d,
        args.r,
        args.denominator,
        max_candidates=caps.get("max_candidates", 200_000),
        jobs=args.jobs,
    )
    return res.to_json()


def cmd_oracle_rank(args):
    g = _graph(args)
    caps = Caps(**parse_caps(args.caps)) if args.caps else Caps()
    return {"rank": oracle_rank(_divisor(g, args.divisor), caps, args.method)}


def cmd_oracle_equiv(args):
    g = _graph(args)
    return {"equivalent": oracle_equivalent(_divisor(g, args.divisor), _divisor(g, args.other))}


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--emit-dot", metavar="PATH", help="also write the input graph in DOT format")

    parser = argparse.ArgumentParser(prog="tropdiv", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, divisors=0, base=False, help=None):
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("graph", help="graph JSON file (or a bundled corpus name)")
        if divisors >= 1:
            p.add_argument("divisor", help="divisor JSON file")
        if divisors >= 2:
            p.add_argument("other", help="second divisor JSON file")
        if base:
            p.add_argument("--base", help="base point: vertex id, 'edge@p/q' or point JSON")
        p.set_defaults(func=func)
        return p

    add("genus", cmd_genus, help="weighted and unweighted genus")
    add("reduce", cmd_reduce, 1, True, help="reduced divisor at the base point, with firing script")
    p = add("rank", cmd_rank, 1, help="Baker-Norine rank")
    p.add_argument("--weighted", action="store_true", help="rank on the vertex-weighted graph")
    add("equiv", cmd_equiv, 2, True, help="linear equivalence with witness script")
    p = add("canonical", cmd_canonical, help="canonical divisor")
    p.add_argument("--weighted", action="store_true")
    add("rr-check", cmd_rr_check, 1, help="evaluate both sides of Riemann-Roch")
    add("hyperelliptic", cmd_hyperelliptic, help="hyperellipticity with certificates")
    add("involution", cmd_involution, help="hyperelliptic involution search")
    add("p", cmd_p, 1, True, help="p of an effective divisor (--base picks the fixed point)")
    add("hyp-rank", cmd_hyp_rank, 1, help="rank from the hyperelliptic formula")
    add("condition-i", cmd_condition_i, help="positive-type bridge bound at every vertex")
    p = add("moderator", cmd_moderator, 1, True, help="moderator dominating a reduced divisor")
    p.add_argument("--orientation-dot", metavar="PATH", help="write the acyclic orientation in DOT format")
    add("extend", cmd_extend, 1, True, help="add one chip keeping the divisor reduced")
    p = add("wdr", cmd_wdr, help="classes of degree d and rank >= r on a finite grid")
    p.add_argument("-d", type=int, required=True, help="degree")
    p.add_argument("-r", type=int, required=True, help="minimum rank")
    p.add_argument("--denominator", type=int, default=1)
    p.add_argument("--caps", help="max_candidates=N")
    p.add_argument("--jobs", type=int, default=1)
    p = add("oracle-rank", cmd_oracle_rank, 1, help="rank by brute force over the Laplacian lattice")
    p.add_argument("--caps", help="max_vertices=N,max_subsets=N,max_classes=N")
    p.add_argument("--method", choices=["classes", "explicit"], default="classes")
    add("oracle-equiv", cmd_oracle_equiv, 2, help="equivalence by Smith normal form")
    return parser


def _emit(obj, pretty: bool, stream):
    if pretty:
        stream.write(json.dumps(obj, indent=2) + "\n")
    else:
        stream.write(json.dumps(obj, separators=(",", ":")) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except TropdivError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, False, sys.stderr)
        return exc.exit_code
    except (TypeError, KeyError) as exc:
        _emit({"error": {"type": "ValidationError", "message": f"malformed input: {exc}"}}, False, sys.stderr)
        return ValidationError.exit_code
    _emit(out, args.pretty, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
