"""
CLI Module

The `qpk` command line driver:

    qpk convert <conversion> <name> [--kind K]
    qpk prove <goal> | <frame> "<a> <= <b>"
    qpk check <suite> [target]
    qpk enumerate filters <poset> [--kind all|uf|np|mf]
    qpk enumerate points <frame>
    qpk suites
    qpk version

Names resolve against --file first, then the standard document below.
Library errors exit with their own code (10 and up), unexpected failures
with 3.
"""

import argparse
import logging
import sys
import time

import convert
import dsl
import fixtures
from errors import QpkError, UnknownName
from frames import derives, enumerate_points, prec
from log_setup import quiet_console, setup_file_logging
from posets import enumerate_filters, handyfy_allfilters, handyfy_uf, is_handy
from reports import Report
from settings import get_settings
from suites import SUITES, SuiteOptions, run_suite
from universal import point_stage
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("CLI")

VERSION = "0.3.0"

STANDARD_DOCUMENT = """
# objects every command can name without a --file
poset chain3 { elem a b c; order b < a; order c < b; }
poset antichain2 { elem a b; }
poset omega { builtin omega(); }
frame S { gen g; }
frame T { gen g; rel top => g; }
frame I { gen g0 g1; rel g0 => g1; }
pi02 contains0 { pair open{ {0} } coA open{ {} }; disjoint; }
pi02 whole { builtin whole(); }
point evens { builtin evens(); }
"""

CONVERSIONS = ("handyfy", "uf-pi02", "np-pi02", "pi02-uf", "pi02-npuf", "qm-uf", "dense",
               "frame-pi02", "pi02-frame")

_OUTCOME_EXIT = {"holds": 0, "refuted": 1, "unknown": 2}


class Library:
    """Documents searched in order when a command names a block."""

    def __init__(self, documents):
        self.documents = documents

    @classmethod
    def load(cls, path=None):
        docs = []
        if path:
            docs.append(dsl.parse_file(path))
        docs.append(dsl.parse(STANDARD_DOCUMENT))
        return cls(docs)

    def get(self, kind, name):
        for doc in self.documents:
            block = doc.blocks.get(name)
            if block is not None and block.kind == kind:
                return getattr(doc, _BUILDERS[kind])(name)
        raise UnknownName(name, kind)


_BUILDERS = {"poset": "poset", "frame": "frame", "pi02": "pi02", "point": "point",
             "expr": "expression", "goal": "goal"}


# ---------------------------------------------------------------------------
# Rendering helpers


def render_open(code, n):
    items = code.constituents.take(n)
    body = ", ".join(str(b.descriptor) for b in items)
    more = "" if code.constituents.exhausted_by(n) else ", ..."
    return "{" + body + more + "}"


def render_pi02(X, n):
    lines = []
    for i, item in enumerate(X.pairs.take(n)):
        b, co_a = item
        lines.append(f"pair {i}: B={render_open(b, n)} coA={render_open(co_a, n)}")
    if not X.pairs.exhausted_by(n):
        lines.append("...")
    return lines


def render_elements(P, n):
    return [P.label(e) for e in P.carrier(n)]


# ---------------------------------------------------------------------------
# Commands


def cmd_convert(args, lib, report):
    """Run one conversion and describe its first `depth` constituents."""
    depth = args.depth
    if not args.names:
        raise UnknownName("<missing>", "conversion")
    kind = args.names[0]
    name = args.names[1] if len(args.names) > 1 else None
    if kind not in CONVERSIONS:
        raise UnknownName(kind, "conversion")
    if name is None and kind != "qm-uf":
        raise UnknownName("<missing>", "block")

    if kind == "handyfy":
        P = lib.get("poset", name)
        Q, _ = handyfy_allfilters(P) if args.kind == "all" else handyfy_uf(P)
        verdict, _ = is_handy(Q, 4 * depth)
        report.verdict("handy", verdict)
        report.witness("elements: " + " ".join(render_elements(Q, depth)))
    elif kind == "uf-pi02":
        P = lib.get("poset", name)
        verdict, _ = is_handy(P, 4 * depth)
        if verdict is not Tri.YES:
            P, _ = handyfy_uf(P)
            report.verdict("handyfied", "yes")
        B, _, _ = convert.uf_to_pi02(P)
        report.witnesses.extend(render_pi02(B, depth))
    elif kind == "np-pi02":
        P = lib.get("poset", name)
        code, _ = convert.np_to_pi02(P)
        report.witnesses.extend(render_pi02(code, depth))
    elif kind == "pi02-uf":
        X = lib.get("pi02", name)
        P, _, _, exact = convert.pi02_to_uf(X)
        report.verdict("exact", "yes" if exact else "no")
        report.witness("elements: " + " ".join(render_elements(P, depth)))
    elif kind == "pi02-npuf":
        X = lib.get("pi02", name)
        P, _, _ = convert.pi02_to_npuf(X)
        report.witness("elements: " + " ".join(render_elements(P, depth)))
    elif kind == "qm-uf":
        space = fixtures.lookup(fixtures.SPACES, "space", name or "cantor")
        P, _, _ = convert.qm_to_uf(space)
        report.witness("elements: " + " ".join(render_elements(P, depth)))
    elif kind == "dense":
        X = lib.get("pi02", name)
        points = convert.dense_sequence(X, args.kind or "Gdelta", depth)
        if points is Tri.UNKNOWN:
            report.verdict("dense", "unknown")
            report.exit_code = 2
        else:
            report.verdict("points", len(points))
            for x in points[:depth]:
                report.witness(str(point_stage(x, depth)))
    elif kind == "frame-pi02":
        pres = lib.get("frame", name)
        report.witnesses.extend(render_pi02(convert.frame_to_pi02(pres), depth))
    elif kind == "pi02-frame":
        pres = convert.pi02_to_frame(lib.get("pi02", name), name)
        report.verdict("generators", pres.n_generators)
        for j in range(len(pres.relations)):
            report.witness(pres.render_relation(j))
    report.verdict("conversion", kind)


def _goal(args, lib):
    if len(args.names) == 1:
        return lib.get("goal", args.names[0])
    if len(args.names) == 2:
        pres = lib.get("frame", args.names[0])
        a, b = dsl.parse_goal(args.names[1], pres)
        return pres, a, b
    raise UnknownName(" ".join(args.names) or "<missing>", "goal")


def cmd_prove(args, lib, report):
    """Search for a proof; exit 0 proved, 1 refuted, 2 unknown."""
    pres, a, b = _goal(args, lib)
    result = derives(a, b, pres, args.depth, args.base_reading)
    chased = prec(a, b, pres)
    report.verdict("derives", result)
    report.verdict("prec", chased)
    if result.tree is not None:
        report.witness(result.tree.render(pres.names))
    if result.point is not None:
        report.witness(f"point: {_render_point(result.point, pres)}")
    elif chased.point is not None:
        report.witness(f"point: {_render_point(chased.point, pres)}")
    report.exit_code = _OUTCOME_EXIT[result.outcome.value]


def _render_point(x, pres):
    true = sorted(x.valuation if x.valuation is not None else x.stage(len(x.stages)))
    return "{" + ", ".join(pres.names[g] if g < len(pres.names) else f"g{g}" for g in true) + "}"


def cmd_check(args, lib, report):
    if not args.names:
        raise UnknownName("<missing>", "suite")
    opts = SuiteOptions(
        target=args.names[1] if len(args.names) > 1 else None,
        samples=args.samples,
        seed=args.seed,
        depth=args.depth,
        precision=args.precision,
        exhaustive=args.exhaustive,
        quiet=args.quiet,
    )
    return run_suite(args.names[0], opts)


def cmd_enumerate(args, lib, report):
    if len(args.names) != 2:
        raise UnknownName(" ".join(args.names) or "<missing>", "enumeration")
    what, name = args.names
    if what == "filters":
        P = lib.get("poset", name)
        catalog = enumerate_filters(P)
        kind = args.kind or "all"
        chosen = {"all": catalog.filters, "uf": catalog.uf, "np": catalog.np, "mf": catalog.mf}.get(kind)
        if chosen is None:
            raise UnknownName(kind, "filter kind")
        report.verdict("count", len(chosen))
        for F in chosen:
            report.witness("{" + ", ".join(catalog.labels(F)) + "}")
    elif what == "points":
        pres = lib.get("frame", name)
        points = enumerate_points(pres)
        report.verdict("count", len(points))
        for valuation in points:
            report.witness("{" + ", ".join(pres.names[g] for g in sorted(valuation)) + "}")
    else:
        raise UnknownName(what, "enumeration")


def cmd_suites(args, lib, report):
    for name in sorted(SUITES):
        report.witness(f"{name}: {SUITES[name][1]}")


def cmd_version(args, lib, report):
    report.verdict("version", VERSION)


COMMANDS = {
    "convert": cmd_convert,
    "prove": cmd_prove,
    "check": cmd_check,
    "enumerate": cmd_enumerate,
    "suites": cmd_suites,
    "version": cmd_version,
}


def build_parser():
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="qpk", description="Quasi-Polish space representations")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("names", nargs="*", help="conversion, suite, block names or a goal")
    parser.add_argument("--file", help="document with extra blocks")
    parser.add_argument("--depth", type=int, default=settings.default_depth)
    parser.add_argument("--precision", type=int, default=settings.default_precision)
    parser.add_argument("--samples", type=int, default=settings.default_samples)
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--exhaustive", type=int, default=None)
    parser.add_argument("--kind", default=None)
    parser.add_argument("--base-reading", choices=("lattice", "relation-only"), default="lattice")
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--timing", action="store_true")
    return parser


def _echo(args):
    echo = {"names": " ".join(args.names)} if args.names else {}
    if args.command in ("convert", "prove", "enumerate"):
        echo["depth"] = args.depth
    if args.kind:
        echo["kind"] = args.kind
    if args.command == "prove" and args.base_reading != "lattice":
        echo["base_reading"] = args.base_reading
    return echo


def run(argv=None):
    """
    Execute one command.

    Returns:
        tuple: (Report or None, exit code)
    """
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_file_logging(settings.log_dir, settings.log_level)
    if args.quiet:
        quiet_console()

    started = time.perf_counter()
    try:
        lib = Library.load(args.file)
        report = Report(command=args.command, arguments=_echo(args))
        produced = COMMANDS[args.command](args, lib, report)
        if produced is not None:
            report = produced
    except QpkError as e:
        logger.error(f"Error running {args.command}: {e}")
        print(f"qpk: {e}", file=sys.stderr)
        return None, e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error running {args.command}: {e}")
        print(f"qpk: internal error: {e}", file=sys.stderr)
        return None, 3
    if args.timing:
        report.timing = time.perf_counter() - started
    sys.stdout.write(report.render(args.format, tty=sys.stdout.isatty()))
    return report, report.exit_code


def main(argv=None):
    _, code = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
