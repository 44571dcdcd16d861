"""The `.field` interchange format: parsing and serialization.

A `.field` document is line-oriented UTF-8 with `#` comments, a few
top-level keys and bracketed sections::

    name = abc-111
    [params]
    A = 1
    [field]
    x = A*sin(z) + cos(y)
    y = sin(x) + A*cos(z)
    z = sin(y) + cos(x)
    [metric]        # optional, Euclidean when omitted
    g11 = 1
    ...
    [volume]        # optional, density 1 when omitted
    density = 1

Scalar expressions admit rationals, decimals, named rational parameters,
``+ - * / ^ sqrt`` and ``sin``/``cos`` of integer-linear combinations of
``x, y, z``; results built from ``+ - *`` and integer-linear phases stay
exact trig polynomials, while ``/`` and ``sqrt`` produce witnessed
expression fields.  An optional ``[form]`` section carries a 1-form with
the same component syntax, which is how contact forms travel to the CLI.

Parsing is total: every input produces either a value or a
:class:`FieldSyntaxError` whose diagnostics carry byte spans into the
source.  The grammar is documented in EBNF in ``docs/field-format.md``.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import grid
from .exprfield import (ExprField, as_scalar, sadd, sdiv, smul, sneg, spow,
                        ssqrt, ssub)
from .forms import KForm, Metric, VectorField, VolumeForm, euclidean_metric, standard_volume
from .trig import COS, SIN, TrigPoly, ZERO_MODE

MAX_DEPTH = 64
MAX_EXPONENT = 64

_COORDS = {"x": 0, "y": 1, "z": 2}
_FUNCS = ("sin", "cos", "sqrt")
_SECTIONS = ("params", "field", "form", "metric", "volume")

_default_mode = "exact"


def set_default_mode(mode: str) -> None:
    """Process-wide coefficient mode: 'exact' (rationals) or 'float'."""
    global _default_mode
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    _default_mode = mode


@dataclass(frozen=True)
class ParseDiagnostic:
    start: int
    end: int
    message: str
    severity: str = "error"

    def format(self, source: str | None = None) -> str:
        loc = f"bytes {self.start}..{self.end}"
        if source is not None:
            line = source.count("\n", 0, self.start) + 1
            col = self.start - (source.rfind("\n", 0, self.start) + 1) + 1
            loc = f"line {line}, col {col}"
        return f"{self.severity}: {self.message} ({loc})"


class FieldSyntaxError(ValueError):
    def __init__(self, diagnostics, source: str = ""):
        self.diagnostics = tuple(diagnostics)
        self.source = source
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(first.format(source) if first else "parse error")


# -- tokenizer -----------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str       # NUM IDENT OP END
    text: str
    start: int
    end: int


def _tokenize(src: str, base: int) -> list[_Token]:
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "#":
            break
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            toks.append(_Token("NUM", src[i:j], base + i, base + j))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Token("IDENT", src[i:j], base + i, base + j))
            i = j
            continue
        if c in "+-*/^()":
            toks.append(_Token("OP", c, base + i, base + i + 1))
            i += 1
            continue
        raise FieldSyntaxError(
            [ParseDiagnostic(base + i, base + i + 1, f"unexpected character {c!r}")])
    toks.append(_Token("END", "", base + n, base + n))
    return toks


# -- expression parser ----------------------------------------------------------------

# linear form over the coordinates: (cx, cy, cz, constant), all exact
_LinForm = tuple[Fraction, Fraction, Fraction, Fraction]


def _lin_const(c: Fraction) -> _LinForm:
    return (Fraction(0), Fraction(0), Fraction(0), c)


class _ExprParser:
    """Recursive descent over one expression, in value or phase mode.

    Value mode produces scalar fields; phase mode (inside sin/cos) produces
    exact linear forms in the coordinates and rejects anything nonlinear.
    """

    def __init__(self, tokens, src_offset_len, params, mode, warnings):
        self.toks = tokens
        self.pos = 0
        self.span = src_offset_len
        self.params = params or {}
        self.mode = mode
        self.warnings = warnings
        self.depth = 0

    # helpers

    def _peek(self) -> _Token:
        return self.toks[self.pos]

    def _next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def _fail(self, tok: _Token, message: str):
        raise FieldSyntaxError([ParseDiagnostic(tok.start, tok.end, message)])

    def _number(self, tok: _Token) -> Fraction:
        text = tok.text
        exp_pos = max(text.find("e"), text.find("E"))
        if exp_pos >= 0:
            try:
                exp = int(text[exp_pos + 1:])
            except ValueError:
                self._fail(tok, "malformed number")
            if abs(exp) > 18:
                self._fail(tok, "number exponent out of range")
        try:
            return Fraction(decimal.Decimal(text))
        except (decimal.InvalidOperation, ValueError):
            self._fail(tok, "malformed number")

    # value-mode grammar

    def parse_value(self):
        v = self._expr(phase=False)
        t = self._peek()
        if t.kind != "END":
            self._fail(t, f"unexpected trailing input {t.text!r}")
        return v

    def _expr(self, phase: bool):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            t = self._peek()
            self._fail(t, "expression too deeply nested")
        try:
            left = self._term(phase)
            while True:
                t = self._peek()
                if t.kind == "OP" and t.text in "+-":
                    self._next()
                    right = self._term(phase)
                    if phase:
                        left = tuple(a + b if t.text == "+" else a - b
                                     for a, b in zip(left, right))
                    else:
                        left = sadd(left, right) if t.text == "+" else ssub(left, right)
                else:
                    return left
        finally:
            self.depth -= 1

    def _term(self, phase: bool):
        left = self._unary(phase)
        while True:
            t = self._peek()
            if t.kind == "OP" and t.text in "*/":
                self._next()
                right = self._unary(phase)
                if phase:
                    left = self._phase_mul_div(t, left, right)
                elif t.text == "*":
                    left = smul(left, right)
                else:
                    left = self._divide(t, left, right)
            else:
                return left

    def _phase_mul_div(self, tok: _Token, left: _LinForm, right: _LinForm):
        lconst = all(c == 0 for c in left[:3])
        rconst = all(c == 0 for c in right[:3])
        if tok.text == "*":
            if lconst:
                return tuple(right[i] * left[3] for i in range(4))
            if rconst:
                return tuple(left[i] * right[3] for i in range(4))
            self._fail(tok, "nonlinear phase")
        if not rconst:
            self._fail(tok, "nonlinear phase")
        if right[3] == 0:
            self._fail(tok, "division by zero in trig argument")
        return tuple(left[i] / right[3] for i in range(4))

    def _divide(self, tok: _Token, num, den):
        den_s = as_scalar(den)
        if isinstance(den_s, TrigPoly) and den_s.is_constant() \
                and den_s.constant_value() == 0:
            self._fail(tok, "division by zero")
        out = sdiv(num, den)
        if isinstance(out, ExprField):
            self._witness_warnings(out, tok)
        return out

    def _witness_warnings(self, value: ExprField, tok: _Token):
        for node in _iter_nodes(value):
            if node.op in ("div", "sqrt"):
                w = node.witness
                what = "division" if node.op == "div" else "square root"
                if not w.ok:
                    self.warnings.append(ParseDiagnostic(
                        tok.start, tok.end,
                        f"{what} without a nonvanishing witness "
                        f"(grid min {w.min_value:.3e})", "warning"))
                elif not w.certified:
                    self.warnings.append(ParseDiagnostic(
                        tok.start, tok.end,
                        f"{what} witness is sample-based only "
                        f"(margin test failed)", "warning"))

    def _unary(self, phase: bool):
        t = self._peek()
        if t.kind == "OP" and t.text in "+-":
            self._next()
            v = self._unary(phase)
            if t.text == "+":
                return v
            if phase:
                return tuple(-c for c in v)
            return sneg(v)
        return self._power(phase)

    def _power(self, phase: bool):
        base = self._atom(phase)
        t = self._peek()
        if t.kind == "OP" and t.text == "^":
            if phase:
                self._fail(t, "nonlinear phase")
            self._next()
            sign = 1
            nt = self._peek()
            if nt.kind == "OP" and nt.text == "-":
                self._next()
                sign = -1
                nt = self._peek()
            if nt.kind != "NUM" or any(ch in nt.text for ch in ".eE"):
                self._fail(nt, "exponent must be an integer literal")
            self._next()
            n = sign * int(nt.text)
            if abs(n) > MAX_EXPONENT:
                self._fail(nt, "exponent too large")
            out = spow(base, n)
            if isinstance(out, ExprField):
                self._witness_warnings(out, nt)
            return out
        return base

    def _atom(self, phase: bool):
        t = self._next()
        if t.kind == "NUM":
            c = self._number(t)
            if phase:
                return _lin_const(c)
            if self.mode == "float":
                return TrigPoly.constant(float(c))
            return TrigPoly.constant(c)
        if t.kind == "IDENT":
            name = t.text
            if name in _COORDS:
                if not phase:
                    self._fail(t, f"coordinate {name!r} outside sin/cos argument")
                lf = [Fraction(0)] * 4
                lf[_COORDS[name]] = Fraction(1)
                return tuple(lf)
            if name in ("sin", "cos"):
                if phase:
                    self._fail(t, "nonlinear phase")
                self._expect_open(t)
                arg = self._expr(phase=True)
                close = self._expect_close()
                return self._trig_value(name, arg, t, close)
            if name == "sqrt":
                if phase:
                    self._fail(t, "nonlinear phase")
                self._expect_open(t)
                arg = self._expr(phase=False)
                self._expect_close()
                out = ssqrt(arg)
                if isinstance(out, ExprField):
                    self._witness_warnings(out, t)
                return out
            if name in self.params:
                c = self.params[name]
                if phase:
                    return _lin_const(Fraction(c))
                if self.mode == "float":
                    return TrigPoly.constant(float(c))
                return TrigPoly.constant(c)
            self._fail(t, f"unknown identifier {name!r}")
        if t.kind == "OP" and t.text == "(":
            v = self._expr(phase)
            nt = self._next()
            if not (nt.kind == "OP" and nt.text == ")"):
                self._fail(nt, "expected ')'")
            return v
        self._fail(t, "expected a number, identifier or '('"
                   if t.kind != "END" else "unexpected end of expression")

    def _expect_open(self, t: _Token):
        nt = self._next()
        if not (nt.kind == "OP" and nt.text == "("):
            self._fail(nt, f"expected '(' after {t.text}")

    def _expect_close(self) -> _Token:
        nt = self._next()
        if not (nt.kind == "OP" and nt.text == ")"):
            self._fail(nt, "expected ')'")
        return nt

    def _trig_value(self, fn: str, lin: _LinForm, t: _Token, close: _Token):
        cx, cy, cz, c0 = lin
        span = (t.start, close.end)
        if c0 != 0:
            raise FieldSyntaxError([ParseDiagnostic(
                *span, "constant offset in trig argument")])
        ints = []
        for c in (cx, cy, cz):
            if c.denominator != 1:
                raise FieldSyntaxError([ParseDiagnostic(
                    *span, "non-integer coefficient in trig argument")])
            ints.append(int(c))
        k = tuple(ints)
        if fn == "sin":
            return TrigPoly.sinwave(k) if k != ZERO_MODE else TrigPoly.zero()
        return TrigPoly.coswave(k) if k != ZERO_MODE else TrigPoly.one()


def _iter_nodes(e: ExprField):
    yield e
    for a in e.args:
        yield from _iter_nodes(a)


def parse_scalar(src: str, params=None, mode: str | None = None):
    """Parse one scalar expression into a TrigPoly or witnessed ExprField."""
    mode = mode or _default_mode
    warnings: list[ParseDiagnostic] = []
    toks = _tokenize(src, 0)
    parser = _ExprParser(toks, (0, len(src)), params, mode, warnings)
    return parser.parse_value()


# -- documents -------------------------------------------------------------------------


@dataclass
class FieldSpec:
    """A parsed field document: a vector field plus the geometry it lives in."""

    name: str
    field: VectorField
    metric: Metric
    volume: VolumeForm
    params: dict
    form: KForm | None = None
    warnings: tuple = dc_field(default_factory=tuple)

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.name == other.name and self.params == other.params
                and self.field == other.field
                and self.metric.rows == other.metric.rows
                and self.volume.density == other.volume.density
                and self.form == other.form)


def _parse_rational(text: str, start: int):
    try:
        value = parse_scalar(text, params={}, mode="exact")
    except FieldSyntaxError as e:
        raise FieldSyntaxError([ParseDiagnostic(
            start + d.start, start + d.end, d.message, d.severity)
            for d in e.diagnostics])
    if not (isinstance(value, TrigPoly) and value.is_constant()):
        raise FieldSyntaxError([ParseDiagnostic(
            start, start + len(text), "parameters must be rational constants")])
    c = value.constant_value()
    if not isinstance(c, Fraction):
        c = Fraction(c)
    return c


def _parse_value(text: str, start: int, params, mode, warnings):
    toks = _tokenize(text, start)
    parser = _ExprParser(toks, (start, start + len(text)), params, mode, warnings)
    value = parser.parse_value()
    return value


def parse_document(src: str, mode: str | None = None) -> FieldSpec:
    """Parse a `.field` document; the result may carry a field, a form or
    both (at least one is required)."""
    mode = mode or _default_mode
    warnings: list[ParseDiagnostic] = []
    raw: dict[str, dict] = {s: {} for s in _SECTIONS}
    top: dict[str, tuple] = {}
    section = None

    offset = 0
    for line in src.splitlines(keepends=True):
        stripped_full = line.rstrip("\r\n")
        content = stripped_full.split("#", 1)[0]
        text = content.strip()
        line_start = offset
        offset += len(line)
        if not text:
            continue
        indent = len(content) - len(content.lstrip())
        start = line_start + indent
        if text.startswith("["):
            if not text.endswith("]"):
                raise FieldSyntaxError([ParseDiagnostic(
                    start, start + len(text), "malformed section header")], src)
            name = text[1:-1].strip()
            if name not in _SECTIONS:
                raise FieldSyntaxError([ParseDiagnostic(
                    start, start + len(text), f"unknown section [{name}]")], src)
            section = name
            continue
        if "=" not in text:
            raise FieldSyntaxError([ParseDiagnostic(
                start, start + len(text), "expected 'key = value'")], src)
        key, value = text.split("=", 1)
        key_str = key.strip()
        value_start = start + len(key) + 1
        value_start += len(value) - len(value.lstrip())
        value_str = value.strip()
        if section is None:
            if key_str != "name":
                raise FieldSyntaxError([ParseDiagnostic(
                    start, start + len(key_str),
                    f"unknown top-level key {key_str!r}")], src)
            top["name"] = (value_str, value_start)
            continue
        bucket = raw[section]
        if key_str in bucket:
            raise FieldSyntaxError([ParseDiagnostic(
                start, start + len(key_str),
                f"duplicate key {key_str!r} in [{section}]")], src)
        bucket[key_str] = (value_str, value_start)

    try:
        return _assemble(src, top, raw, mode, warnings)
    except FieldSyntaxError as e:
        raise FieldSyntaxError(tuple(warnings) + e.diagnostics
                               if all(d.severity == "warning" for d in warnings)
                               else e.diagnostics, src) from None


def _assemble(src, top, raw, mode, warnings) -> FieldSpec:
    params: dict[str, Fraction] = {}
    for key, (text, start) in sorted(raw["params"].items()):
        params[key] = _parse_rational(text, start)

    def parse_components(section: str):
        bucket = raw[section]
        unknown = set(bucket) - {"x", "y", "z"}
        if unknown:
            key = sorted(unknown)[0]
            text, start = bucket[key]
            raise FieldSyntaxError([ParseDiagnostic(
                start, start + len(text),
                f"unknown component {key!r} in [{section}]")], src)
        missing = {"x", "y", "z"} - set(bucket)
        if missing:
            raise FieldSyntaxError([ParseDiagnostic(
                0, len(src),
                f"[{section}] is missing component(s) {sorted(missing)}")], src)
        return tuple(_parse_value(*bucket[k], params, mode, warnings)
                     for k in ("x", "y", "z"))

    field = None
    if raw["field"]:
        field = VectorField(parse_components("field"))
    form = None
    if raw["form"]:
        form = KForm(1, parse_components("form"))
    if field is None and form is None:
        raise FieldSyntaxError([ParseDiagnostic(
            0, len(src), "missing field section")], src)

    metric = euclidean_metric()
    if raw["metric"]:
        entries = {}
        for key, (text, start) in raw["metric"].items():
            if len(key) != 3 or key[0] != "g" or key[1] not in "123" \
                    or key[2] not in "123":
                raise FieldSyntaxError([ParseDiagnostic(
                    start, start + len(text),
                    f"unknown metric entry {key!r} (use g11..g33)")], src)
            i, j = sorted((int(key[1]) - 1, int(key[2]) - 1))
            value = _parse_value(text, start, params, mode, warnings)
            if (i, j) in entries:
                if not (entries[(i, j)] == value):
                    raise FieldSyntaxError([ParseDiagnostic(
                        start, start + len(text),
                        "metric not symmetric as written")], src)
            else:
                entries[(i, j)] = value
        zero = TrigPoly.zero()
        rows = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                rows[i][j] = entries.get((min(i, j), max(i, j)),
                                         TrigPoly.one() if i == j else zero)
        metric = Metric(tuple(tuple(r) for r in rows))
        if metric.positivity_min() <= 0:
            raise FieldSyntaxError([ParseDiagnostic(
                0, len(src),
                "metric is not positive-definite on the verification grid")], src)

    volume = standard_volume()
    if raw["volume"]:
        extra = set(raw["volume"]) - {"density"}
        if extra:
            key = sorted(extra)[0]
            text, start = raw["volume"][key]
            raise FieldSyntaxError([ParseDiagnostic(
                start, start + len(text),
                f"unknown volume entry {key!r}")], src)
        text, start = raw["volume"]["density"]
        density = _parse_value(text, start, params, mode, warnings)
        volume = VolumeForm(density)
        const_sign, min_abs, _exact = volume.sign_certificate()
        if not const_sign or min_abs <= 1e-9:
            raise FieldSyntaxError([ParseDiagnostic(
                start, start + len(text),
                "volume density changes sign or vanishes on the grid")], src)

    name = top.get("name", ("unnamed", 0))[0]
    if field is None:
        field = VectorField.zero()   # form-only documents still carry a field slot
    return FieldSpec(name, field, metric, volume, params, form, tuple(warnings))


def parse_field_spec(src: str, mode: str | None = None) -> FieldSpec:
    """Parse a document that must define a vector field."""
    spec = parse_document(src, mode)
    if spec.field.is_zero() and spec.form is not None and not _has_field_section(src):
        raise FieldSyntaxError([ParseDiagnostic(0, len(src),
                                                "missing field section")], src)
    return spec


def _has_field_section(src: str) -> bool:
    return any(line.split("#", 1)[0].strip() == "[field]"
               for line in src.splitlines())


# -- serialization -----------------------------------------------------------------------


def _coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def _phase_str(k) -> str:
    parts = []
    for axis, c in enumerate(k):
        if c == 0:
            continue
        mag = abs(c)
        body = ("" if mag == 1 else f"{mag}*") + "xyz"[axis]
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def _trig_term_str(k, parity, c) -> str:
    fn = "cos" if parity == COS else "sin"
    body = f"{fn}({_phase_str(k)})"
    if c == 1:
        return body
    if c == -1:
        return f"-{body}"
    return f"{_coeff_str(c)}*{body}"


def _join_terms(pieces: list[str]) -> str:
    out = pieces[0]
    for p in pieces[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


def serialize_trigpoly(p: TrigPoly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for (k, parity), c in p.sorted_terms():
        if k == ZERO_MODE:
            pieces.append(_coeff_str(c))
        else:
            pieces.append(_trig_term_str(k, parity, c))
    return _join_terms(pieces)


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 1, "pow": 3}


def _leaf_prec(p: TrigPoly) -> int:
    terms = p.sorted_terms()
    if len(terms) == 0:
        return 4
    if len(terms) > 1:
        return 1
    (k, _parity), c = terms[0]
    if k == ZERO_MODE:
        if c < 0:
            return 1
        return 4 if (isinstance(c, Fraction) and c.denominator == 1) else 2
    if c == 1:
        return 4
    return 1 if c == -1 else 2


def _write_expr(e, ctx_prec: int) -> str:
    if isinstance(e, TrigPoly):
        s = serialize_trigpoly(e)
        return f"({s})" if _leaf_prec(e) < ctx_prec else s
    op = e.op
    if op == "poly":
        return _write_expr(e.poly, ctx_prec)
    if op == "sqrt":
        return f"sqrt({_write_expr(e.args[0], 0)})"
    if op == "neg":
        s = "-" + _write_expr(e.args[0], 3)
        return f"({s})" if _PREC["neg"] < ctx_prec else s
    if op == "pow":
        s = f"{_write_expr(e.args[0], 4)}^{e.exponent}"
        return f"({s})" if _PREC["pow"] < ctx_prec else s
    symbol = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[op]
    prec = _PREC[op]
    left = _write_expr(e.args[0], prec)
    right = _write_expr(e.args[1], prec + 1)
    s = f"{left}{symbol}{right}"
    return f"({s})" if prec < ctx_prec else s


def serialize_scalar(s) -> str:
    s = as_scalar(s)
    if isinstance(s, TrigPoly):
        return serialize_trigpoly(s)
    return _write_expr(s, 0)


def serialize(spec: FieldSpec) -> str:
    """Canonical text for a FieldSpec; parse(serialize(spec)) == spec."""
    lines = [f"name = {spec.name}"]
    if spec.params:
        lines.append("")
        lines.append("[params]")
        for key in sorted(spec.params):
            lines.append(f"{key} = {spec.params[key]}")
    if not (spec.field.is_zero() and spec.form is not None):
        lines.append("")
        lines.append("[field]")
        for axis, comp in zip("xyz", spec.field.components):
            lines.append(f"{axis} = {serialize_scalar(comp)}")
    if spec.form is not None:
        lines.append("")
        lines.append("[form]")
        for axis, comp in zip("xyz", spec.form.components):
            lines.append(f"{axis} = {serialize_scalar(comp)}")
    if not (spec.metric.rows == euclidean_metric().rows):
        lines.append("")
        lines.append("[metric]")
        for i in range(3):
            for j in range(i, 3):
                lines.append(f"g{i+1}{j+1} = {serialize_scalar(spec.metric.entry(i, j))}")
    if not (spec.volume.density == standard_volume().density):
        lines.append("")
        lines.append("[volume]")
        lines.append(f"density = {serialize_scalar(spec.volume.density)}")
    return "\n".join(lines) + "\n"
