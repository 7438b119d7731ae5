"""
DSL Module

Parser for qpk documents. A document is a sequence of named blocks

    poset chain3 { elem a b c; order b < a; order c < b; }
    frame S { gen g; }
    frame T { gen g; rel top => g; }
    pi02 X { pair open{ {0} } coA open{ {} }; disjoint; }
    point x { set {0, 2, 5}; }
    expr e { frame T; value g | bot; }
    goal G { frame T; top <= g; }

Only finite objects are spelled out; infinite ones come from the fixture
registries with `builtin name(args);`. Every rejection is a ParseError
carrying a line and column.
"""

import logging
from dataclasses import dataclass, field

from pyparsing import ParserElement, ParseBaseException, ParseException, python_style_comment, StringEnd, col, lineno
from pyparsing import ZeroOrMore as ZoM,\
    OneOrMore as OoM,\
    Keyword as K,\
    Suppress as S,\
    Forward as F,\
    Optional as O,\
    Regex as R,\
    Group as G,\
    DelimitedList as csl

import fixtures
import frames
from codes import pi02_from_pairs
from errors import ParseError, TooLarge, UnknownName
from frames import Expression, Presentation
from posets import finite_poset
from settings import get_settings
from universal import ExplicitSubset, FinSet

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("DSL")

ParserElement.enable_packrat()

KINDS = ("poset", "frame", "pi02", "point", "expr", "goal")

# numbers longer than this are rejected by the grammar
MAX_DIGITS = 6

_REGISTRIES = {
    "poset": ("poset", fixtures.POSETS),
    "frame": ("frame", fixtures.FRAMES),
    "pi02": ("pi02", fixtures.PI02),
    "point": ("subset", fixtures.SUBSETS),
}

# builtins whose arguments are carrier sizes
_SIZED = {("poset", "chain"), ("poset", "antichain"), ("poset", "random"), ("poset", "upcl"), ("frame", "chain")}


@dataclass
class Item:
    """One `...;` entry of a block. `args` depends on `tag`."""

    tag: str
    args: tuple
    line: int
    col: int


@dataclass
class Block:
    kind: str
    name: str
    items: list
    line: int
    col: int

    def of_tag(self, tag):
        return [item for item in self.items if item.tag == tag]


def _natural(s, loc, toks):
    text = toks[0]
    if len(text) > MAX_DIGITS:
        raise ParseException(s, loc, f"natural number with at most {MAX_DIGITS} digits")
    return int(text)


class Grammar:
    """pyparsing grammar for documents; `parse_string` returns a list of Blocks."""

    def __init__(self):
        LBRAC, RBRAC = S("{"), S("}")
        LPARN, RPARN = S("("), S(")")
        SEMI = S(";")

        ident = R(r"[A-Za-z_][A-Za-z0-9_']*")
        ident.set_name("name")
        number = R(r"\d+")
        number.set_parse_action(_natural)
        number.set_name("natural number")

        finset = LBRAC + O(csl(number)) + RBRAC
        finset.set_parse_action(lambda s, loc, toks: [FinSet.of(toks)])
        finset.set_name("finite set")

        open_lit = S(K("open")) - LBRAC + O(csl(finset)) + RBRAC
        open_lit.set_parse_action(lambda s, loc, toks: [tuple(toks)])
        open_lit.set_name("open{...}")

        # Expressions: | binds weaker than &.
        expr = F()
        atom = (
            K("top").set_parse_action(lambda s, loc, toks: [("top", loc)])
            | K("bot").set_parse_action(lambda s, loc, toks: [("bot", loc)])
            | ident.copy().set_parse_action(lambda s, loc, toks: [("name", toks[0], loc)])
            | (LPARN + expr + RPARN)
        )
        atom.set_name("expression")
        conj = atom + ZoM(S("&") + atom)
        conj.set_parse_action(lambda s, loc, toks: [("and", tuple(toks))] if len(toks) > 1 else [toks[0]])
        disj = conj + ZoM(S("|") + conj)
        disj.set_parse_action(lambda s, loc, toks: [("or", tuple(toks))] if len(toks) > 1 else [toks[0]])
        expr <<= disj
        self.expression = expr

        goal_body = expr + S("<=") - expr
        self.goal = goal_body

        arg = number | ident
        builtin = S(K("builtin")) - ident + LPARN + O(csl(arg)) + RPARN

        def item(tag, body):
            body = body.copy()
            body.set_parse_action(lambda s, loc, toks: self._item(tag, s, loc, toks))
            return body

        B = item("builtin", builtin)
        poset_items = item("elem", S(K("elem")) - OoM(ident)) | item("order", S(K("order")) - ident + S("<") + ident) | B
        frame_items = item("gen", S(K("gen")) - OoM(ident)) | item("rel", S(K("rel")) - expr + S("=>") + expr) | B
        pi02_items = item("pair", S(K("pair")) - open_lit + S(K("coA")) + open_lit) | item("disjoint", S(K("disjoint"))) | B
        point_items = item("set", S(K("set")) - finset) | B
        frame_ref = item("frame", S(K("frame")) - ident)
        expr_items = frame_ref | item("value", S(K("value")) - expr)
        goal_items = frame_ref | item("goal", goal_body)

        def block(kind, items):
            body = K(kind) - ident + LBRAC + G(ZoM(items + SEMI)) + RBRAC
            body.set_parse_action(lambda s, loc, toks: self._block(kind, s, loc, toks))
            return body

        self.document = ZoM(
            block("poset", poset_items)
            | block("frame", frame_items)
            | block("pi02", pi02_items)
            | block("point", point_items)
            | block("expr", expr_items)
            | block("goal", goal_items)
        ) + StringEnd()
        self.document.ignore(python_style_comment)

    @staticmethod
    def _item(tag, s, loc, toks):
        return [Item(tag, tuple(toks), lineno(loc, s), col(loc, s))]

    @staticmethod
    def _block(kind, s, loc, toks):
        return [Block(kind, toks[1], list(toks[2]), lineno(loc, s), col(loc, s))]


_grammar = None


def _get_grammar():
    global _grammar
    if _grammar is None:
        _grammar = Grammar()
    return _grammar


def _run(element, text):
    try:
        return list(element.parse_string(text, parse_all=True))
    except ParseBaseException as e:
        raise ParseError(e.lineno, e.col, _expected(e))
    except RecursionError:
        raise ParseError(1, 1, "less deeply nested expression")


def _expected(e):
    msg = str(e.msg)
    if msg.startswith("Expected "):
        msg = msg[len("Expected "):]
    return msg


# ---------------------------------------------------------------------------
# Expressions


def _names_of(pres):
    if pres.names:
        return {name: g for g, name in enumerate(pres.names)}
    return {f"g{g}": g for g in range(pres.n_generators)}


def build_expression(tree, generators):
    """Turn a parsed expression tree into a normalized Expression."""
    tag = tree[0]
    if tag == "top":
        return Expression.top()
    if tag == "bot":
        return Expression.bot()
    if tag == "name":
        if tree[1] not in generators:
            raise UnknownName(tree[1], "generator")
        return Expression.gen(generators[tree[1]])
    parts = [build_expression(t, generators) for t in tree[1]]
    out = parts[0]
    for p in parts[1:]:
        out = frames.meet(out, p) if tag == "and" else frames.join(out, p)
    return frames.normalize(out)


def parse_expression(text, pres):
    """
    Parse a standalone expression over a presentation's generator names.

    Raises:
        ParseError: on malformed text
        UnknownName: on a name that is not a generator
    """
    tree = _run(_get_grammar().expression, text)[0]
    return build_expression(tree, _names_of(pres))


def parse_goal(text, pres):
    """Parse `a <= b`; returns the pair of expressions."""
    a, b = _run(_get_grammar().goal, text)
    names = _names_of(pres)
    return build_expression(a, names), build_expression(b, names)


# ---------------------------------------------------------------------------
# Documents


@dataclass
class Document:
    """Named blocks of a parsed document, with builders for each kind."""

    blocks: dict = field(default_factory=dict)

    def names(self, kind=None):
        return [name for name, b in self.blocks.items() if kind is None or b.kind == kind]

    def block(self, name, kind=None):
        if name not in self.blocks or (kind is not None and self.blocks[name].kind != kind):
            raise UnknownName(name, kind or "block")
        return self.blocks[name]

    def _builtin(self, block):
        builtins = block.of_tag("builtin")
        if not builtins:
            return None
        item = builtins[0]
        name, args = item.args[0], item.args[1:]
        label, registry = _REGISTRIES[block.kind]
        if (block.kind, name) in _SIZED:
            bound = get_settings().max_carrier
            for a in args:
                if isinstance(a, int) and a > bound:
                    raise TooLarge(a, bound, f"builtin {name} argument")
        return fixtures.lookup(registry, label, name, args)

    def poset(self, name):
        block = self.block(name, "poset")
        built = self._builtin(block)
        if built is not None:
            return built
        labels = [lab for item in block.of_tag("elem") for lab in item.args]
        pairs = [item.args for item in block.of_tag("order")]
        return finite_poset(name, labels, pairs)

    def frame(self, name):
        block = self.block(name, "frame")
        built = self._builtin(block)
        if built is not None:
            return built
        labels = tuple(lab for item in block.of_tag("gen") for lab in item.args)
        generators = {lab: g for g, lab in enumerate(labels)}
        relations = tuple(
            (build_expression(item.args[0], generators), build_expression(item.args[1], generators))
            for item in block.of_tag("rel")
        )
        return Presentation(len(labels), relations, labels, name)

    def pi02(self, name):
        block = self.block(name, "pi02")
        built = self._builtin(block)
        if built is not None:
            return built
        pairs = [(list(item.args[0]), list(item.args[1])) for item in block.of_tag("pair")]
        return pi02_from_pairs(pairs, disjoint=bool(block.of_tag("disjoint")))

    def point(self, name):
        block = self.block(name, "point")
        built = self._builtin(block)
        if built is not None:
            return built
        return ExplicitSubset.finite(block.of_tag("set")[0].args[0])

    def _frame_of(self, block):
        return self.frame(block.of_tag("frame")[0].args[0])

    def expression(self, name):
        """Returns (presentation, expression)."""
        block = self.block(name, "expr")
        pres = self._frame_of(block)
        return pres, build_expression(block.of_tag("value")[0].args[0], _names_of(pres))

    def goal(self, name):
        """Returns (presentation, a, b) for the goal a <= b."""
        block = self.block(name, "goal")
        pres = self._frame_of(block)
        a, b = block.of_tag("goal")[0].args
        names = _names_of(pres)
        return pres, build_expression(a, names), build_expression(b, names)


def _fail(item, expected):
    raise ParseError(item.line, item.col, expected)


def _check_shape(block):
    """Each kind needs its defining items, and a builtin stands alone."""
    builtins = block.of_tag("builtin")
    if builtins:
        if len(block.items) != 1:
            _fail(builtins[0], f"a builtin {block.kind} block with no other items")
        label, registry = _REGISTRIES[block.kind]
        if builtins[0].args[0] not in registry:
            raise UnknownName(builtins[0].args[0], label)
        return
    needs = {"point": "set", "expr": "value", "goal": "goal"}
    if block.kind in needs:
        found = block.of_tag(needs[block.kind])
        if len(found) != 1:
            raise ParseError(block.line, block.col, f"exactly one '{needs[block.kind]}' item")
    if block.kind in ("expr", "goal") and len(block.of_tag("frame")) != 1:
        raise ParseError(block.line, block.col, "exactly one 'frame' item")


def _check_references(doc, block):
    if block.kind == "poset" and not block.of_tag("builtin"):
        seen = set()
        for item in block.of_tag("elem"):
            for lab in item.args:
                if lab in seen:
                    _fail(item, f"a new element name instead of {lab}")
                seen.add(lab)
        for item in block.of_tag("order"):
            for lab in item.args:
                if lab not in seen:
                    raise UnknownName(lab, "element")
    elif block.kind == "frame" and not block.of_tag("builtin"):
        seen = set()
        for item in block.of_tag("gen"):
            for lab in item.args:
                if lab in seen:
                    _fail(item, f"a new generator name instead of {lab}")
                seen.add(lab)
        doc.frame(block.name)
    elif block.kind in ("expr", "goal"):
        ref = block.of_tag("frame")[0].args[0]
        doc.block(ref, "frame")
        if block.kind == "expr":
            doc.expression(block.name)
        else:
            doc.goal(block.name)


def parse(text):
    """
    Parse a document.

    Args:
        text (str): Document source

    Returns:
        Document: blocks by name, with every reference resolved

    Raises:
        ParseError: malformed text or a duplicate block name
        UnknownName: a reference to a missing block, element, generator or builtin
    """
    blocks = _run(_get_grammar().document, text)
    doc = Document()
    for block in blocks:
        if block.name in doc.blocks:
            raise ParseError(block.line, block.col, f"a block name other than {block.name}")
        doc.blocks[block.name] = block
    for block in blocks:
        _check_shape(block)
        _check_references(doc, block)
    logger.debug(f"Parsed {len(blocks)} blocks")
    return doc


def parse_file(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read())
