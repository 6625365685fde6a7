"""Text grammar and canonical printing.

Polynomials are written with + - * ^ and parentheses; variables are x1..xn,
t is the extension-field generator, and coefficients are rationals a/b over Q
or residues over finite fields.  Printing is canonical: terms in grevlex-
descending order, coefficients in lowest terms, so equal polynomials always
print to identical bytes.

Field headers:  field Q   |   field F 5   |   field F 2^2 mod t^2+t+1
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import (
    CoefficientParseError,
    PolySyntaxError,
    UnknownVariable,
)
from .fields import FieldSpec, Raw
from .mpoly import GREVLEX, MultiPoly


# -- canonical printing -------------------------------------------------------


def format_modulus(modulus: Sequence[int]) -> str:
    """Monic modulus as a compact t-polynomial, descending powers."""
    parts = []
    for d in range(len(modulus) - 1, -1, -1):
        c = modulus[d]
        if c == 0:
            continue
        if d == 0:
            parts.append(str(c))
        else:
            tpow = "t" if d == 1 else f"t^{d}"
            parts.append(tpow if c == 1 else f"{c}*{tpow}")
    return "+".join(parts) if parts else "0"


def format_coefficient(spec: FieldSpec, raw: Raw) -> str:
    """Lowest-terms coefficient text.  Extension elements print as compact
    t-polynomials like t+1 (no spaces) so they embed in larger products."""
    if spec.kind == "Q":
        return str(raw)
    if spec.kind == "Fp":
        return str(raw)
    parts = []
    for d in range(len(raw) - 1, -1, -1):
        c = raw[d]
        if c == 0:
            continue
        if d == 0:
            parts.append(str(c))
        else:
            tpow = "t" if d == 1 else f"t^{d}"
            parts.append(tpow if c == 1 else f"{c}*{tpow}")
    return "+".join(parts) if parts else "0"


def _format_monomial(m, var: str) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 0:
            continue
        name = f"{var}{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_poly(f: MultiPoly, var: str = "x") -> str:
    """Canonical text: grevlex-descending terms, explicit * between factors."""
    if f.is_zero:
        return "0"
    spec = f.spec
    monos = sorted(f.terms, key=GREVLEX.key, reverse=True)
    multi = len(monos) > 1

    if spec.kind == "Q":
        out = []
        for m in monos:
            c: Fraction = f.terms[m]
            neg = c < 0
            mag = -c if neg else c
            ms = _format_monomial(m, var)
            if not ms:
                body = str(mag)
            elif mag == 1:
                body = ms
            else:
                body = f"{mag}*{ms}"
            if not out:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    pieces = []
    for m in monos:
        cs = format_coefficient(spec, f.terms[m])
        ms = _format_monomial(m, var)
        if not ms:
            pieces.append(f"({cs})" if ("+" in cs and multi) else cs)
        elif cs == "1":
            pieces.append(ms)
        else:
            pieces.append((f"({cs})" if "+" in cs else cs) + "*" + ms)
    return " + ".join(pieces)


# -- tokenizer ----------------------------------------------------------------

_OPS = set("+-*^()/")


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind  # "int" | "name" | one of + - * ^ ( ) / | "end"
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str, line0: int = 1) -> list[_Token]:
    toks = []
    line, col = line0, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            toks.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise PolySyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(_Token("end", "", line, col))
    return toks


# -- recursive-descent parser ---------------------------------------------------


class _Parser:
    def __init__(self, toks, spec: FieldSpec, nvars: int, t_is_variable: bool):
        self.toks = toks
        self.pos = 0
        self.spec = spec
        self.nvars = nvars
        self.t_is_variable = t_is_variable

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def take(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.take()
        if t.kind != kind:
            raise PolySyntaxError(
                f"expected {kind!r}, found {t.text or 'end of input'!r}",
                t.line,
                t.col,
            )
        return t

    def parse(self) -> MultiPoly:
        f = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise PolySyntaxError(f"trailing input {t.text!r}", t.line, t.col)
        return f

    def expr(self) -> MultiPoly:
        f = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> MultiPoly:
        f = self.factor()
        while self.peek().kind == "*":
            self.take()
            f = f * self.factor()
        return f

    def factor(self) -> MultiPoly:
        if self.peek().kind == "-":
            self.take()
            return -self.factor()
        f = self.primary()
        if self.peek().kind == "^":
            self.take()
            e = self.expect("int")
            return f ** int(e.text)
        return f

    def primary(self) -> MultiPoly:
        t = self.take()
        if t.kind == "int":
            value = int(t.text)
            if self.peek().kind == "/":
                slash = self.take()
                if self.spec.kind != "Q":
                    raise CoefficientParseError(
                        "fractional coefficients are only valid over Q",
                        slash.line,
                        slash.col,
                    )
                den = self.expect("int")
                if int(den.text) == 0:
                    raise CoefficientParseError(
                        "zero denominator", den.line, den.col
                    )
                return MultiPoly.constant(
                    self.spec, self.nvars, Fraction(value, int(den.text))
                )
            return MultiPoly.constant(self.spec, self.nvars, value)
        if t.kind == "name":
            return self.name_atom(t)
        if t.kind == "(":
            f = self.expr()
            self.expect(")")
            return f
        raise PolySyntaxError(
            f"expected a term, found {t.text or 'end of input'!r}", t.line, t.col
        )

    def name_atom(self, t: _Token) -> MultiPoly:
        name = t.text
        if name == "t":
            if self.t_is_variable:
                return MultiPoly.variable(self.spec, self.nvars, 0)
            if self.spec.kind != "Fpk":
                raise UnknownVariable(
                    "t is only defined over an extension field", t.line, t.col
                )
            return MultiPoly.constant(self.spec, self.nvars, self.spec.generator())
        if name.startswith("x") and name[1:].isdigit():
            idx = int(name[1:])
            if not 1 <= idx <= self.nvars:
                raise UnknownVariable(
                    f"{name} is outside the declared variables x1..x{self.nvars}",
                    t.line,
                    t.col,
                )
            return MultiPoly.variable(self.spec, self.nvars, idx - 1)
        raise UnknownVariable(f"unknown name {name!r}", t.line, t.col)


def parse_polynomial(
    text: str, spec: FieldSpec, nvars: int, line0: int = 1
) -> MultiPoly:
    """Parse polynomial text over the given field and variable count."""
    return _Parser(_tokenize(text, line0), spec, nvars, False).parse()


def _parse_modulus_text(text: str, p: int, line0: int = 1) -> tuple[int, ...]:
    """Parse a univariate t-polynomial into ascending GF(p) coefficients."""
    base = FieldSpec.prime_field(p)
    f = _Parser(_tokenize(text, line0), base, 1, True).parse()
    deg = f.total_degree()
    if deg < 1:
        raise PolySyntaxError("modulus must be non-constant", line0, None)
    out = [0] * (deg + 1)
    for m, c in f.terms.items():
        out[m[0]] = c
    return tuple(out)


# -- field headers --------------------------------------------------------------


def parse_field_header(line: str, lineno: int = 1) -> FieldSpec:
    parts = line.split()
    if not parts or parts[0] != "field":
        raise PolySyntaxError("expected a 'field ...' header", lineno)
    rest = parts[1:]
    if rest == ["Q"]:
        return FieldSpec.rationals()
    if not rest or rest[0] != "F":
        raise PolySyntaxError(f"unknown field kind {' '.join(rest)!r}", lineno)
    if len(rest) == 2 and rest[1].isdigit():
        return FieldSpec.prime_field(int(rest[1]))
    if len(rest) >= 4 and rest[2] == "mod":
        pk = rest[1].split("^")
        if len(pk) != 2 or not pk[0].isdigit() or not pk[1].isdigit():
            raise PolySyntaxError(f"bad extension-field order {rest[1]!r}", lineno)
        p, k = int(pk[0]), int(pk[1])
        modulus = _parse_modulus_text(" ".join(rest[3:]), p, lineno)
        if len(modulus) - 1 != k:
            raise PolySyntaxError(
                f"modulus degree {len(modulus) - 1} != declared degree {k}", lineno
            )
        return FieldSpec.extension_field(p, k, modulus)
    raise PolySyntaxError(f"malformed field header {line!r}", lineno)


def format_field_header(spec: FieldSpec) -> str:
    return f"field {spec.header()}"


# -- structured input files -----------------------------------------------------
#
# Endomorphism file:          Kronecker-system file:      Automorphism file:
#   field F 2                   field Q                     field F 2^2 mod t^2+t+1
#   vars 2                      vars 2                      vars 2
#   x1 -> x1 + x1*x2            kron 2                      delta frob^1
#   x2 -> 0                     e 1 1                       x1 -> x2
#                               x1 -> ...                   x2 -> x1
#                               x2 -> ...
#                               e 1 2
#                               ...
#                               zero        (optional block)
#                               x1 -> 0
#                               x2 -> 0


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


def _parse_prelude(lines: list[tuple[int, str]]):
    if not lines:
        raise PolySyntaxError("empty input", 1)
    lineno, header = lines[0]
    spec = parse_field_header(header, lineno)
    if len(lines) < 2:
        raise PolySyntaxError("missing 'vars n' line", lineno)
    vline_no, vline = lines[1]
    parts = vline.split()
    if len(parts) != 2 or parts[0] != "vars" or not parts[1].isdigit():
        raise PolySyntaxError("expected 'vars n'", vline_no)
    nvars = int(parts[1])
    if nvars < 1:
        raise PolySyntaxError("vars must be at least 1", vline_no)
    return spec, nvars, lines[2:]


def _parse_image_line(line: str, lineno: int, spec, nvars, expect_index: int) -> MultiPoly:
    if "->" not in line:
        raise PolySyntaxError("expected 'x<k> -> <polynomial>'", lineno)
    lhs, rhs = line.split("->", 1)
    lhs = lhs.strip()
    if lhs != f"x{expect_index}":
        raise PolySyntaxError(
            f"expected image of x{expect_index}, found {lhs!r}", lineno
        )
    return parse_polynomial(rhs.strip(), spec, nvars, lineno)


def _parse_image_block(lines, spec, nvars):
    if len(lines) < nvars:
        raise PolySyntaxError("truncated image block", lines[-1][0] if lines else 1)
    images = []
    for k in range(1, nvars + 1):
        lineno, line = lines[k - 1]
        images.append(_parse_image_line(line, lineno, spec, nvars, k))
    return tuple(images), lines[nvars:]


def load_endomorphism(text: str):
    """Parse an endomorphism file into an Endomorphism."""
    from .endo import Endomorphism

    spec, nvars, rest = _parse_prelude(_content_lines(text))
    images, rest = _parse_image_block(rest, spec, nvars)
    if rest:
        raise PolySyntaxError(f"unexpected trailing line {rest[0][1]!r}", rest[0][0])
    return Endomorphism(spec, nvars, images)


def load_kronecker_system(text: str):
    """Parse a Kronecker-system file into a KroneckerSystem."""
    from .endo import Endomorphism
    from .kronecker import KroneckerSystem

    spec, nvars, rest = _parse_prelude(_content_lines(text))
    if not rest:
        raise PolySyntaxError("missing 'kron n' line", 1)
    lineno, line = rest[0]
    parts = line.split()
    if len(parts) != 2 or parts[0] != "kron" or not parts[1].isdigit():
        raise PolySyntaxError("expected 'kron n'", lineno)
    n = int(parts[1])
    if n != nvars:
        raise PolySyntaxError(f"kron size {n} != vars {nvars}", lineno)
    rest = rest[1:]
    entries: dict[tuple[int, int], Endomorphism] = {}
    zero = None
    while rest:
        lineno, line = rest[0]
        parts = line.split()
        if parts[0] == "e":
            if len(parts) != 3 or not (parts[1].isdigit() and parts[2].isdigit()):
                raise PolySyntaxError("expected 'e i j'", lineno)
            i, j = int(parts[1]), int(parts[2])
            if not (1 <= i <= n and 1 <= j <= n):
                raise PolySyntaxError(f"entry label ({i},{j}) outside 1..{n}", lineno)
            images, rest = _parse_image_block(rest[1:], spec, nvars)
            entries[(i, j)] = Endomorphism(spec, nvars, images)
        elif parts[0] == "zero" and len(parts) == 1:
            images, rest = _parse_image_block(rest[1:], spec, nvars)
            zero = Endomorphism(spec, nvars, images)
        else:
            raise PolySyntaxError(f"unexpected line {line!r}", lineno)
    missing = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if (i, j) not in entries
    ]
    if missing:
        raise PolySyntaxError(f"missing entries {missing}", 1)
    grid = tuple(
        tuple(entries[(i, j)] for j in range(1, n + 1)) for i in range(1, n + 1)
    )
    return KroneckerSystem(spec, n, grid, zero)


def load_automorphism(text: str):
    """Parse an automorphism file into a SemiLinearAut (inverse computed and
    certified here; a non-invertible map is a load error)."""
    from .autgroup import SemiLinearAut
    from .fields import FieldAutomorphism

    spec, nvars, rest = _parse_prelude(_content_lines(text))
    if not rest:
        raise PolySyntaxError("missing 'delta ...' line", 1)
    lineno, line = rest[0]
    parts = line.split()
    if len(parts) != 2 or parts[0] != "delta":
        raise PolySyntaxError("expected 'delta identity' or 'delta frob^e'", lineno)
    if parts[1] == "identity":
        delta = FieldAutomorphism.identity(spec)
    elif parts[1].startswith("frob^") and parts[1][5:].isdigit():
        delta = FieldAutomorphism.frobenius(spec, int(parts[1][5:]))
    else:
        raise PolySyntaxError(f"unknown delta {parts[1]!r}", lineno)
    images, rest = _parse_image_block(rest[1:], spec, nvars)
    if rest:
        raise PolySyntaxError(f"unexpected trailing line {rest[0][1]!r}", rest[0][0])
    return SemiLinearAut.create(delta, images)


def dump_endomorphism(endo) -> str:
    """Canonical endomorphism file text (inverse of load_endomorphism)."""
    lines = [format_field_header(endo.spec), f"vars {endo.nvars}"]
    for k, img in enumerate(endo.images, start=1):
        lines.append(f"x{k} -> {format_poly(img)}")
    return "\n".join(lines) + "\n"
