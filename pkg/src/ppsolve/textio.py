"""Reading and writing equation files.

One equation per line, ``#`` starts a comment::

    x1 = 3/4*x2 + 0.25
    x2 = x1*x1
    x3 = max(x1, 0.5*x2 + 0.1)

Two optional directive comments make the format round-trip exactly:
``# flavor: <pps|max|min|maxmin>`` and ``# variables: a b c`` (fixes the
variable order; otherwise order of first appearance is used).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .system import Equation, EquationSystem, Kind, ModelError, Poly, infer_flavor


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        # line 0 marks a whole-document error
        super().__init__(f"line {line}, column {col}: {message}" if line else message)
        self.line = line
        self.col = col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<num>\d+(?:\.\d*)?(?:/\d+)?|\.\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[=+*(),\-^])
""", re.VERBOSE)

_RESERVED = {"max", "min"}


def _tokenize(text: str, lineno: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


def _to_fraction(tok: str) -> Fraction:
    if "/" in tok:
        num, den = tok.split("/")
        if "." in num:
            raise ValueError("fraction numerator must be an integer")
        return Fraction(int(num), int(den))
    return Fraction(tok)  # exact for decimal strings


class _LineParser:
    def __init__(self, text: str, lineno: int, intern):
        self.toks = _tokenize(text, lineno)
        self.i = 0
        self.lineno = lineno
        self.intern = intern

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of line"
            raise ParseError(f"expected {want}, found {got!r}", self.lineno, tok[2])
        self.i += 1
        return tok

    def var(self):
        tok = self.take("name")
        if tok[1] in _RESERVED:
            raise ParseError(f"{tok[1]!r} cannot be used as a variable", self.lineno, tok[2])
        return self.intern(tok[1], self.lineno, tok[2]), tok

    def equation(self):
        lhs, lhs_tok = self.var()
        self.take("sym", "=")
        tok = self.peek()
        if tok[0] == "name" and tok[1] in _RESERVED and self.toks[self.i + 1][1] == "(":
            op = tok[1]
            self.i += 2
            polys = [self.sum()]
            while self.peek()[1] == ",":
                self.i += 1
                polys.append(self.sum())
            self.take("sym", ")")
            if len(polys) < 2:
                raise ParseError(f"{op}() needs at least two arguments", self.lineno, tok[2])
        else:
            op = None
            polys = [self.sum()]
        self.take("end")
        return lhs, lhs_tok, op, polys

    def sum(self):
        start = self.peek()
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.i += 1
            terms.append(self.term())
        if self.peek()[1] == "-":
            raise ParseError("negative coefficient", self.lineno, self.peek()[2])
        try:
            return Poly.build(0, terms)
        except ModelError as exc:
            raise ParseError(str(exc), self.lineno, start[2]) from None

    def term(self):
        tok = self.peek()
        if tok[1] == "-":
            raise ParseError("negative coefficient", self.lineno, tok[2])
        coeff = Fraction(1)
        mono = []
        if tok[0] == "num":
            self.i += 1
            try:
                coeff = _to_fraction(tok[1])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient {tok[1]!r}", self.lineno, tok[2]) from None
            if self.peek()[1] != "*":
                return coeff, ()
            self.i += 1
            mono.append(self.factor())
        else:
            mono.append(self.factor())
        while self.peek()[1] == "*":
            self.i += 1
            mono.append(self.factor())
        return coeff, tuple(mono)

    def factor(self):
        v, _ = self.var()
        exp = 1
        if self.peek()[1] == "^":
            self.i += 1
            tok = self.take("num")
            if not tok[1].isdigit() or int(tok[1]) < 1:
                raise ParseError("exponent must be a positive integer", self.lineno, tok[2])
            exp = int(tok[1])
        return v, exp


def classify(polys, op) -> Equation:
    """Pick the most specific equation shape for a parsed right-hand side."""
    if op is None:
        (p,) = polys
        if p.is_linear():
            return Equation.linear(p.constant, [(m[0][0], c) for c, m in p.terms])
        if p.constant == 0 and len(p.terms) == 1:
            coeff, mono = p.terms[0]
            factors = [v for v, e in mono for _ in range(e)]
            if coeff == 1 and len(factors) == 2:
                return Equation.product(*factors)
        return Equation.general([p])
    if len(polys) == 2 and all(_single_var(p) is not None for p in polys):
        return Equation.choice(op, _single_var(polys[0]), _single_var(polys[1]))
    return Equation.general(polys, op)


def _single_var(p: Poly):
    if p.constant == 0 and len(p.terms) == 1:
        coeff, mono = p.terms[0]
        if coeff == 1 and len(mono) == 1 and mono[0][1] == 1:
            return mono[0][0]
    return None


_DIRECTIVE = re.compile(r"#\s*(flavor|variables)\s*:(.*)$")


def parse_system(text: str, flavor: str | None = None) -> EquationSystem:
    """Parse an equation document into an :class:`EquationSystem`.

    Mixed max/min documents are rejected unless ``flavor="maxmin"`` is passed
    (or given by a ``# flavor:`` directive).
    """
    order: list = []
    index: dict = {}
    first_seen: dict = {}

    def intern(name, line=0, col=0):
        if name not in index:
            index[name] = len(order)
            order.append(name)
        first_seen.setdefault(name, (line, col))
        return index[name]

    declared_flavor = None
    parsed = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        m = _DIRECTIVE.match(stripped)
        if m:
            if m.group(1) == "flavor":
                declared_flavor = m.group(2).strip()
            else:
                for name in m.group(2).split():
                    intern(name)
            continue
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        lhs, lhs_tok, op, polys = _LineParser(line, lineno, intern).equation()
        parsed.append((lhs, lhs_tok, lineno, op, polys))

    eqs: dict = {}
    for lhs, tok, lineno, op, polys in parsed:
        if lhs in eqs:
            raise ParseError(f"variable {tok[1]!r} defined twice", lineno, tok[2])
        try:
            eqs[lhs] = classify(polys, op)
        except ModelError as exc:
            raise ParseError(str(exc), lineno, tok[2]) from None
    missing = [name for i, name in enumerate(order) if i not in eqs]
    if missing:
        raise ParseError(f"undeclared variable {missing[0]!r}", *first_seen[missing[0]])

    equations = tuple(eqs[i] for i in range(len(order)))
    inferred = infer_flavor(equations)
    requested = flavor or declared_flavor
    chosen = requested or inferred
    if inferred == "maxmin" and requested != "maxmin":
        raise ParseError("document mixes max and min; use flavor maxmin", 0, 0)
    if inferred not in ("pps", chosen) and chosen != "maxmin":
        raise ParseError(f"{inferred} equations in a {chosen} document", 0, 0)
    try:
        return EquationSystem(equations, tuple(order), chosen)
    except ModelError as exc:
        raise ParseError(str(exc), 0, 0) from None


def read_system(path, flavor: str | None = None) -> EquationSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read(), flavor)


# --- writing --------------------------------------------------------------

def format_fraction(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_poly(p: Poly, names) -> str:
    parts = []
    for coeff, mono in p.terms:
        factors = []
        for v, e in mono:
            factors.extend([names[v]] * e)
        body = "*".join(factors)
        parts.append(body if coeff == 1 else f"{format_fraction(coeff)}*{body}")
    if p.constant or not parts:
        parts.append(format_fraction(p.constant))
    return " + ".join(parts)


def format_equation(eq: Equation, names) -> str:
    if eq.kind is Kind.LINEAR:
        parts = [names[v] if c == 1 else f"{format_fraction(c)}*{names[v]}" for v, c in eq.coeffs]
        if eq.constant or not parts:
            parts.append(format_fraction(eq.constant))
        return " + ".join(parts)
    if eq.kind is Kind.PRODUCT:
        return f"{names[eq.args[0]]}*{names[eq.args[1]]}"
    if eq.kind is Kind.CHOICE:
        return f"{eq.op}({names[eq.args[0]]}, {names[eq.args[1]]})"
    body = ", ".join(_format_poly(p, names) for p in eq.polys)
    return f"{eq.op}({body})" if eq.op else body


def format_system(sys: EquationSystem) -> str:
    """Inverse of :func:`parse_system`."""
    lines = [f"# flavor: {sys.flavor}"]
    if sys.n:
        lines.append("# variables: " + " ".join(sys.names))
    for name, eq in zip(sys.names, sys.equations):
        lines.append(f"{name} = {format_equation(eq, sys.names)}")
    return "\n".join(lines) + "\n"
