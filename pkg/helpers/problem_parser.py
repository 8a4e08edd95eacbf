"""Line-oriented problem documents.

A graded problem::

    ring char=0 blocks=(2,2)
    module quotient=[x1_1*x2_1]
    defaults seed=3
    task mixedmult k=(1,0) expect=1

An ideal problem names its variables; the ring has one block::

    ring char=0
    ideals vars=(x,y) J=[x,y] I1=[x^2,y] N=quotient[]
    task idealmult k0=0 k=(1) expect=1

``#`` starts a comment. Every statement is a keyword followed by
``key=value`` fields; unknown keywords, keys and task names are errors that
carry the line and column of the offending text.
"""
import logging
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Tuple

import helpers.config_manager as config_manager
from helpers.errors import ConfigError, MixmultError, ParseError
from helpers.exact_algebra import GradedRing, Polynomial
from helpers.graded_module import GradedModulePresentation, cyclic_quotient, direct_sum

logger = logging.getLogger(__name__)

INT_KEYS = {"k0", "n0", "seed", "window", "retries", "block", "expect", "trials"}
TUPLE_KEYS = {"k", "n", "blocks"}
POLY_KEYS = {"a"}
POLYLIST_KEYS = {"x", "sub"}
CODE_KEYS = {"expect_error"}

COMMON_TASK_KEYS = {"seed", "window", "retries", "expect_error"}

# allowed keys per task
TASK_KEYS = {
    "hilbert": {"n", "expect"},
    "dim": {"expect"},
    "mixedmult": {"k", "expect"},
    "table": set(),
    "chi": {"k", "x", "blocks", "expect"},
    "symbol": {"k", "x", "blocks", "trials", "expect"},
    "chilemmas": {"k", "x", "blocks", "sub"},
    "verify212": {"k", "expect"},
    "verify26": {"a", "block"},
    "verify312": {"k", "expect"},
    "verify316": {"k", "a", "block", "expect"},
    "verify319": {"k", "expect"},
    "verify321": {"k", "x", "blocks", "expect"},
    "idealmult": {"k0", "k", "expect"},
    "samuel": {"expect"},
    "oracle": {"n0", "n", "expect"},
    "verify49": {"k0", "k", "expect"},
    "verify410": {"k0", "k", "expect"},
    "verify413": {"k0", "k", "expect"},
    "verify416": {"k0", "k", "expect"},
}

# one of the alternatives must be fully present
REQUIRED_KEYS = {
    "mixedmult": [{"k"}],
    "chi": [{"k"}, {"x"}],
    "symbol": [{"k"}, {"x"}],
    "chilemmas": [{"k"}, {"x"}],
    "verify212": [{"k"}],
    "verify26": [{"a"}, {"block"}],
    "verify312": [{"k"}],
    "verify316": [{"k", "a"}, {"k", "block"}],
    "verify319": [{"k"}],
    "verify321": [{"k"}],
    "idealmult": [{"k0", "k"}],
    "oracle": [{"n0", "n"}],
    "verify49": [{"k0", "k"}],
    "verify410": [{"k0", "k"}],
    "verify413": [{"k0", "k"}],
    "verify416": [{"k0", "k"}],
}

IDEAL_TASKS = {"idealmult", "samuel", "oracle", "verify49", "verify410", "verify413", "verify416"}
MODULE_TASKS = set(TASK_KEYS) - IDEAL_TASKS - {"table"}

DEFAULT_KEYS = {k for k, v in config_manager.DEFAULT_SETTINGS.items() if isinstance(v, int)}


def _error_codes() -> set:
    codes = {MixmultError.code}
    stack = [MixmultError]
    while stack:
        for sub in stack.pop().__subclasses__():
            codes.add(sub.code)
            stack.append(sub)
    return codes


@dataclass
class TaskSpec:
    name: str
    params: Dict[str, object] = field(default_factory=dict)
    line: int = field(default=0, compare=False)

    def get(self, key: str, default=None):
        return self.params.get(key, default)

    @property
    def expect(self) -> Optional[int]:
        return self.params.get("expect")

    @property
    def expect_error(self) -> Optional[str]:
        return self.params.get("expect_error")


@dataclass
class IdealSpec:
    J: Tuple[Polynomial, ...]
    I: Tuple[Tuple[Polynomial, ...], ...]
    N: Tuple[Tuple[Polynomial, ...], ...] = ((),)


@dataclass
class ProblemDocument:
    ring: GradedRing
    module: Optional[Tuple[Tuple[Polynomial, ...], ...]] = None
    ideals: Optional[IdealSpec] = None
    defaults: Dict[str, int] = field(default_factory=dict)
    tasks: List[TaskSpec] = field(default_factory=list)
    presentation: Optional[GradedModulePresentation] = field(default=None, compare=False, repr=False)
    family: Optional[object] = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- polynomials

_TOKEN = re.compile(r"(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()])")


class PolynomialReader:
    """Recursive descent over ``+ - * ^`` and parentheses with integer coefficients."""

    def __init__(self, text: str, ring: GradedRing, line: int = 0, column: int = 1):
        self.text = text
        self.ring = ring
        self.line = line
        self.column = column
        self.names = {name: i for i, name in enumerate(ring.names)}
        self.tokens = self._tokenize()
        self.pos = 0

    def _error(self, message: str, offset: int) -> ParseError:
        return ParseError(message, self.line, self.column + offset)

    def _tokenize(self):
        tokens = []
        i = 0
        while i < len(self.text):
            if self.text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(self.text, i)
            if m is None:
                raise self._error(f"unexpected character {self.text[i]!r}", i)
            tokens.append((m.lastgroup, m.group(), i))
            i = m.end()
        tokens.append(("end", "", len(self.text)))
        return tokens

    def _peek(self):
        return self.tokens[self.pos]

    def _next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _at_op(self, *ops) -> bool:
        kind, value, _ = self._peek()
        return kind == "op" and value in ops

    def read(self) -> Polynomial:
        if self._peek()[0] == "end":
            raise self._error("empty polynomial", 0)
        poly = self._expr()
        kind, value, offset = self._peek()
        if kind != "end":
            raise self._error(f"unexpected {value!r}", offset)
        return poly

    def _expr(self) -> Polynomial:
        negate = False
        if self._at_op("+", "-"):
            negate = self._next()[1] == "-"
        out = self._term()
        if negate:
            out = -out
        while self._at_op("+", "-"):
            op = self._next()[1]
            term = self._term()
            out = out + term if op == "+" else out - term
        return out

    def _term(self) -> Polynomial:
        out = self._factor()
        while self._at_op("*"):
            self._next()
            out = out * self._factor()
        return out

    def _factor(self) -> Polynomial:
        base = self._atom()
        if self._at_op("^"):
            self._next()
            kind, value, offset = self._next()
            if kind != "int":
                raise self._error("exponent must be a non-negative integer", offset)
            base = base ** int(value)
        return base

    def _atom(self) -> Polynomial:
        kind, value, offset = self._next()
        if kind == "int":
            return Polynomial.constant(self.ring, int(value))
        if kind == "name":
            if value not in self.names:
                raise self._error(f"unknown variable '{value}'", offset)
            return self.ring.variable(self.names[value])
        if kind == "op" and value == "(":
            inner = self._expr()
            kind, value, offset = self._next()
            if kind != "op" or value != ")":
                raise self._error("expected ')'", offset)
            return inner
        if kind == "end":
            raise self._error("unexpected end of polynomial", offset)
        raise self._error(f"unexpected {value!r}", offset)


def parse_polynomial(text: str, ring: GradedRing, line: int = 0, column: int = 1) -> Polynomial:
    return PolynomialReader(text, ring, line, column).read()


# ---------------------------------------------------------------- fields and values

_PAIRS = {"(": ")", "[": "]"}


def _split_fields(text: str, line: int) -> List[Tuple[str, int]]:
    """Whitespace-separated fields, keeping bracketed groups together; columns are 1-based."""
    fields = []
    stack = []
    start = None
    for i, ch in enumerate(text):
        if ch in _PAIRS:
            stack.append((ch, i))
        elif ch in ")]":
            if not stack or _PAIRS[stack[-1][0]] != ch:
                raise ParseError(f"unbalanced '{ch}'", line, i + 1)
            stack.pop()
        if ch.isspace() and not stack:
            if start is not None:
                fields.append((text[start:i], start + 1))
                start = None
        elif start is None:
            start = i
    if stack:
        raise ParseError(f"unclosed '{stack[-1][0]}'", line, stack[-1][1] + 1)
    if start is not None:
        fields.append((text[start:], start + 1))
    return fields


def _split_top(text: str, sep: str) -> List[Tuple[str, int]]:
    """Split on ``sep`` outside brackets; offsets are 0-based."""
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def _parse_int(value: str, line: int, column: int) -> int:
    if not re.fullmatch(r"-?\d+", value):
        raise ParseError(f"expected an integer, got '{value}'", line, column)
    return int(value)


def _parse_tuple(value: str, line: int, column: int) -> Tuple[int, ...]:
    if not (value.startswith("(") and value.endswith(")")):
        raise ParseError(f"expected a tuple like (1,0), got '{value}'", line, column)
    inner = value[1:-1]
    if not inner.strip():
        return ()
    return tuple(_parse_int(part.strip(), line, column + 1 + offset) for part, offset in _split_top(inner, ","))


def _parse_names(value: str, line: int, column: int) -> Tuple[str, ...]:
    if not (value.startswith("(") and value.endswith(")")):
        raise ParseError(f"expected a name tuple like (x,y), got '{value}'", line, column)
    names = []
    for part, offset in _split_top(value[1:-1], ","):
        name = part.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError(f"bad variable name '{name}'", line, column + 1 + offset)
        names.append(name)
    return tuple(names)


def _parse_poly_list(value: str, ring: GradedRing, line: int, column: int) -> List[Tuple[Polynomial, int]]:
    if not (value.startswith("[") and value.endswith("]")):
        raise ParseError(f"expected a bracketed list, got '{value}'", line, column)
    inner = value[1:-1]
    if not inner.strip():
        return []
    out = []
    for part, offset in _split_top(inner, ","):
        text = part.lstrip()
        col = column + 1 + offset + len(part) - len(text)
        out.append((parse_polynomial(text, ring, line, col), col))
    return out


def _parse_quotients(value: str, ring: GradedRing, line: int, column: int) -> List[List[Tuple[Polynomial, int]]]:
    """``quotient[...]`` summands joined by ``+``."""
    components = []
    for part, offset in _split_top(value, "+"):
        text = part.strip()
        col = column + offset + (len(part) - len(part.lstrip()))
        if not text.startswith("quotient["):
            raise ParseError(f"expected quotient[...], got '{text}'", line, col)
        components.append(_parse_poly_list(text[len("quotient"):], ring, line, col + len("quotient")))
    return components


def _check_homogeneous(items: List[Tuple[Polynomial, int]], line: int):
    for poly, col in items:
        if not poly.is_homogeneous():
            raise ParseError(f"NonHomogeneous: generator {poly} is not homogeneous", line, col)


# ---------------------------------------------------------------- statements

@dataclass
class _Statement:
    keyword: str
    name: Optional[Tuple[str, int]]
    pairs: Dict[str, Tuple[str, int]]
    line: int
    column: int


def _statement(text: str, line: int) -> _Statement:
    fields = _split_fields(text, line)
    keyword, column = fields[0]
    rest = fields[1:]
    name = None
    if keyword == "task":
        if not rest or "=" in rest[0][0]:
            raise ParseError("task needs a name", line, column)
        name, rest = rest[0], rest[1:]
    pairs: Dict[str, Tuple[str, int]] = {}
    for text_field, col in rest:
        key, eq, value = text_field.partition("=")
        if not eq or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ParseError(f"expected key=value, got '{text_field}'", line, col)
        if key in pairs:
            raise ParseError(f"duplicate key '{key}'", line, col)
        pairs[key] = (value, col + len(key) + 1)
    return _Statement(keyword, name, pairs, line, column)


def _reject_unknown(stmt: _Statement, allowed: set):
    for key, (_, col) in stmt.pairs.items():
        if key not in allowed:
            raise ParseError(f"unknown key '{key}' for {stmt.keyword}", stmt.line, col - len(key) - 1)


def _parse_ring(stmt: Optional[_Statement], ideals: Optional[_Statement]) -> GradedRing:
    characteristic = 0
    blocks = None
    if stmt is not None:
        _reject_unknown(stmt, {"char", "blocks"})
        if "char" in stmt.pairs:
            value, col = stmt.pairs["char"]
            characteristic = _parse_int(value, stmt.line, col)
        if "blocks" in stmt.pairs:
            blocks = _parse_tuple(stmt.pairs["blocks"][0], stmt.line, stmt.pairs["blocks"][1])
    names: Tuple[str, ...] = ()
    if ideals is not None:
        if "vars" not in ideals.pairs:
            raise ParseError("ideals needs vars=(...)", ideals.line, ideals.column)
        names = _parse_names(ideals.pairs["vars"][0], ideals.line, ideals.pairs["vars"][1])
        if blocks is not None and tuple(blocks) != (len(names),):
            raise ParseError(f"ideal problems use one block of {len(names)} variables", stmt.line, stmt.pairs["blocks"][1])
        blocks = (len(names),)
    if blocks is None:
        line = stmt.line if stmt is not None else 1
        raise ParseError("ring needs blocks=(...)", line, stmt.column if stmt is not None else 1)
    try:
        return GradedRing(characteristic, tuple(blocks), names)
    except ValueError as e:
        where = stmt if stmt is not None else ideals
        raise ParseError(str(e), where.line, where.column)


def _build_module(ring: GradedRing, components) -> GradedModulePresentation:
    modules = [cyclic_quotient(ring, gens) for gens in components]
    return reduce(direct_sum, modules)


def _parse_module(stmt: _Statement, ring: GradedRing):
    _reject_unknown(stmt, {"quotient"})
    if "quotient" not in stmt.pairs:
        raise ParseError("module needs quotient=[...]", stmt.line, stmt.column)
    value, col = stmt.pairs["quotient"]
    components = _parse_quotients("quotient" + value, ring, stmt.line, col - len("quotient"))
    for items in components:
        _check_homogeneous(items, stmt.line)
    return tuple(tuple(p for p, _ in items) for items in components)


def _parse_ideals(stmt: _Statement, ring: GradedRing) -> IdealSpec:
    ideal_keys = sorted((k for k in stmt.pairs if re.fullmatch(r"I\d+", k)), key=lambda k: int(k[1:]))
    for i, key in enumerate(ideal_keys, start=1):
        if key != f"I{i}":
            raise ParseError(f"ideals must be numbered I1, I2, ... without gaps; found {key}", stmt.line, stmt.pairs[key][1])
    _reject_unknown(stmt, {"vars", "J", "N"} | set(ideal_keys))
    if "J" not in stmt.pairs:
        raise ParseError("ideals needs J=[...]", stmt.line, stmt.column)
    J = _parse_poly_list(stmt.pairs["J"][0], ring, stmt.line, stmt.pairs["J"][1])
    _check_homogeneous(J, stmt.line)
    I = []
    for key in ideal_keys:
        items = _parse_poly_list(stmt.pairs[key][0], ring, stmt.line, stmt.pairs[key][1])
        _check_homogeneous(items, stmt.line)
        I.append(tuple(p for p, _ in items))
    N: Tuple[Tuple[Polynomial, ...], ...] = ((),)
    if "N" in stmt.pairs:
        components = _parse_quotients(stmt.pairs["N"][0], ring, stmt.line, stmt.pairs["N"][1])
        for items in components:
            _check_homogeneous(items, stmt.line)
        N = tuple(tuple(p for p, _ in items) for items in components)
    return IdealSpec(tuple(p for p, _ in J), tuple(I), N)


def _parse_defaults(stmt: _Statement) -> Dict[str, int]:
    _reject_unknown(stmt, DEFAULT_KEYS)
    out = {key: _parse_int(value, stmt.line, col) for key, (value, col) in stmt.pairs.items()}
    try:
        config_manager.validate_settings(out)
    except ConfigError as e:
        raise ParseError(e.message, stmt.line, stmt.column)
    return out


def _parse_task(stmt: _Statement, ring: GradedRing, kind: str) -> TaskSpec:
    name, name_col = stmt.name
    if name not in TASK_KEYS:
        raise ParseError(f"unknown task '{name}'", stmt.line, name_col)
    if name in IDEAL_TASKS and kind != "ideals":
        raise ParseError(f"task '{name}' needs an ideals line", stmt.line, name_col)
    if name in MODULE_TASKS and kind != "module":
        raise ParseError(f"task '{name}' needs a module line", stmt.line, name_col)
    _reject_unknown(stmt, TASK_KEYS[name] | COMMON_TASK_KEYS)
    params: Dict[str, object] = {}
    for key, (value, col) in stmt.pairs.items():
        if key in INT_KEYS:
            params[key] = _parse_int(value, stmt.line, col)
        elif key in TUPLE_KEYS:
            params[key] = _parse_tuple(value, stmt.line, col)
        elif key in POLY_KEYS:
            params[key] = parse_polynomial(value, ring, stmt.line, col)
        elif key in POLYLIST_KEYS:
            params[key] = tuple(p for p, _ in _parse_poly_list(value, ring, stmt.line, col))
        elif key in CODE_KEYS:
            if value not in _error_codes():
                raise ParseError(f"unknown error code '{value}'", stmt.line, col)
            params[key] = value
    alternatives = REQUIRED_KEYS.get(name)
    if alternatives and not any(alt <= params.keys() for alt in alternatives):
        wanted = " or ".join("+".join(sorted(alt)) for alt in alternatives)
        raise ParseError(f"task '{name}' needs {wanted}", stmt.line, name_col)
    if "expect" in params and "expect_error" in params:
        raise ParseError("expect and expect_error exclude each other", stmt.line, name_col)
    return TaskSpec(name, params, stmt.line)


def parse_problem(text: str, build: bool = True) -> ProblemDocument:
    """Parse a problem document; with ``build`` the module or ideal family is constructed and checked."""
    statements: Dict[str, _Statement] = {}
    task_statements = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        stmt = _statement(body.rstrip(), line_no)
        if stmt.keyword == "task":
            task_statements.append(stmt)
        elif stmt.keyword in ("ring", "module", "ideals", "defaults"):
            if stmt.keyword in statements:
                raise ParseError(f"second '{stmt.keyword}' line", line_no, stmt.column)
            statements[stmt.keyword] = stmt
        else:
            raise ParseError(f"unknown statement '{stmt.keyword}'", line_no, stmt.column)

    if "module" in statements and "ideals" in statements:
        stmt = statements["ideals"]
        raise ParseError("a document has either a module or ideals, not both", stmt.line, stmt.column)
    if "ring" not in statements and "ideals" not in statements:
        raise ParseError("missing ring line", 1, 1)

    ring = _parse_ring(statements.get("ring"), statements.get("ideals"))
    doc = ProblemDocument(ring)
    kind = None
    if "module" in statements:
        doc.module = _parse_module(statements["module"], ring)
        kind = "module"
    elif "ideals" in statements:
        doc.ideals = _parse_ideals(statements["ideals"], ring)
        kind = "ideals"
    if "defaults" in statements:
        doc.defaults = _parse_defaults(statements["defaults"])
    doc.tasks = [_parse_task(stmt, ring, kind) for stmt in task_statements]

    if build:
        _build(doc, statements)
    logger.debug(f"Parsed document with {len(doc.tasks)} tasks over blocks {ring.block_sizes}")
    return doc


def _build(doc: ProblemDocument, statements: Dict[str, _Statement]):
    from helpers.ideal_multiplicities import IdealFamily

    if doc.module is not None:
        doc.presentation = _build_module(doc.ring, doc.module)
    elif doc.ideals is not None:
        stmt = statements["ideals"]
        N = _build_module(doc.ring, doc.ideals.N)
        try:
            doc.family = IdealFamily(doc.ring, doc.ideals.J, doc.ideals.I, N)
        except MixmultError as e:
            raise ParseError(f"{e.code}: {e.message}", stmt.line, stmt.pairs["J"][1])
        doc.presentation = N


def load_problem(path) -> ProblemDocument:
    with open(path, "r", encoding="utf-8") as f:
        return parse_problem(f.read())


# ---------------------------------------------------------------- formatting

def _format_poly(p: Polynomial) -> str:
    return "".join(str(p).split())


def _format_list(polys) -> str:
    return "[" + ",".join(_format_poly(p) for p in polys) + "]"


def _format_tuple(values) -> str:
    return "(" + ",".join(str(v) for v in values) + ")"


def _format_quotients(components) -> str:
    return "+".join(f"quotient{_format_list(gens)}" for gens in components)


def _format_value(key: str, value) -> str:
    if key in POLY_KEYS:
        return _format_poly(value)
    if key in POLYLIST_KEYS:
        return _format_list(value)
    if key in TUPLE_KEYS:
        return _format_tuple(value)
    return str(value)


def format_problem(doc: ProblemDocument) -> str:
    """Text that parses back to an equal document."""
    lines = []
    if doc.ideals is None:
        lines.append(f"ring char={doc.ring.characteristic} blocks={_format_tuple(doc.ring.block_sizes)}")
    else:
        lines.append(f"ring char={doc.ring.characteristic}")
    if doc.module is not None:
        lines.append("module quotient=" + _format_quotients(doc.module)[len("quotient"):])
    if doc.ideals is not None:
        parts = [f"vars=({','.join(doc.ring.names)})", f"J={_format_list(doc.ideals.J)}"]
        parts += [f"I{i}={_format_list(gens)}" for i, gens in enumerate(doc.ideals.I, start=1)]
        parts.append(f"N={_format_quotients(doc.ideals.N)}")
        lines.append("ideals " + " ".join(parts))
    if doc.defaults:
        lines.append("defaults " + " ".join(f"{k}={v}" for k, v in doc.defaults.items()))
    for task in doc.tasks:
        params = " ".join(f"{k}={_format_value(k, v)}" for k, v in task.params.items())
        lines.append(f"task {task.name} {params}".rstrip())
    return "\n".join(lines) + "\n"
