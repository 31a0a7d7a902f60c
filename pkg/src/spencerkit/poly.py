"""Sparse polynomials with exact differentiation, plus the term grammar.

All symbolic objects in the toolkit are built from :class:`Polynomial`:
structure matrix entries, scalar fields, local map components and fitted
transition maps.  Coefficients are complex; variables are x1..xN (real
coordinates) or w1..wM (complex chart coordinates) depending on context.
Differentiation is exact term manipulation, never finite differences.

Monomial grammar for scenario files: terms separated by '+'/'-', each term an
optional coefficient (decimal literal or complex literal "(a+bi)") joined by
'*' to variable powers like "x1^2".  Whitespace is insignificant.
"""
from __future__ import annotations

import itertools
import re

import numpy as np

from .errors import PolynomialParseError


def fmt_float(value):
    """Format a float with 17 significant digits (round-trips doubles)."""
    return f"{float(value):.17g}"


def fmt_complex(value):
    """Format a complex coefficient as the literal ``(a+bi)``."""
    z = complex(value)
    return f"({z.real:.17g}{z.imag:+.17g}i)"


def monomial_key(exponents):
    """Grading used everywhere: total degree first, then the exponent tuple."""
    return (sum(exponents), tuple(exponents))


def monomials_upto(nvars, degree, include_constant=False):
    """All exponent tuples with total degree <= degree, in monomial order."""
    out = []
    lowest = 0 if include_constant else 1
    for total in range(lowest, degree + 1):
        level = [e for e in itertools.product(range(total + 1), repeat=nvars)
                 if sum(e) == total]
        out.extend(sorted(level))
    return out


class Polynomial:
    """Immutable sparse polynomial; terms map exponent tuples to coefficients.

    Exactly-zero coefficients are dropped, so representations are canonical
    and equality is structural.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        if nvars < 1:
            raise ValueError("polynomial needs at least one variable")
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variables")
            c = complex(coef)
            if c != 0:
                clean[exps] = clean.get(exps, 0j) + c
        object.__setattr__(self, "nvars", int(nvars))
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index):
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1.0})

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        """Total degree; zero polynomial reports 0."""
        return max((sum(e) for e in self.terms), default=0)

    def terms_sorted(self):
        return sorted(self.terms.items(), key=lambda item: monomial_key(item[0]))

    def is_real(self, tol=0.0):
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.to_string()!r})"

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable counts differ")

    def __add__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.nvars, other)
        self._check_same(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0j) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check_same(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1.0)
        for _ in range(int(k)):
            result = result * self
        return result

    def conjugate(self):
        """Complex-conjugate coefficients (the conjugate function of real inputs)."""
        return Polynomial(self.nvars, {e: c.conjugate() for e, c in self.terms.items()})

    # -- calculus ----------------------------------------------------------

    def diff(self, axis):
        """Exact partial derivative along one variable."""
        if not 0 <= axis < self.nvars:
            raise ValueError(f"axis {axis} out of range")
        terms = {}
        for e, c in self.terms.items():
            if e[axis] == 0:
                continue
            e2 = list(e)
            e2[axis] -= 1
            terms[tuple(e2)] = c * e[axis]
        return Polynomial(self.nvars, terms)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, points):
        """Evaluate at one point (nvars,) or a batch (P, nvars); complex output."""
        pts = np.asarray(points)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.nvars:
            raise ValueError(f"points have {pts.shape[1]} coordinates, expected {self.nvars}")
        out = np.zeros(pts.shape[0], dtype=complex)
        for e, c in self.terms.items():
            term = np.full(pts.shape[0], c, dtype=complex)
            for k, power in enumerate(e):
                if power:
                    term = term * pts[:, k] ** power
            out += term
        return out[0] if single else out

    __call__ = evaluate

    def gradient(self, points):
        """All partials at a batch of points: shape (P, nvars), complex."""
        pts = np.asarray(points)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        out = np.zeros((pts.shape[0], self.nvars), dtype=complex)
        for k in range(self.nvars):
            dk = self.diff(k)
            if not dk.is_zero:
                out[:, k] = dk.evaluate(pts)
        return out[0] if single else out

    def compose(self, inner):
        """Substitute ``inner`` (a sequence of nvars polynomials) for the variables."""
        if len(inner) != self.nvars:
            raise ValueError("need one inner polynomial per variable")
        m = inner[0].nvars
        if any(q.nvars != m for q in inner):
            raise ValueError("inner polynomials disagree on variable count")
        result = Polynomial.zero(m)
        for e, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for k, power in enumerate(e):
                if power:
                    term = term * inner[k] ** power
            result = result + term
        return result

    def to_string(self, var_prefix="x"):
        return format_polynomial(self, var_prefix)


# ---------------------------------------------------------------------------
# parsing and canonical formatting
# ---------------------------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"\(\s*([+-]?{_NUM})\s*([+-]{_NUM})\s*i\s*\)")
_NUM_RE = re.compile(_NUM)
_VAR_RE = re.compile(r"([A-Za-z]+)(\d+)(?:\^(\d+))?")


def _split_terms(text):
    """Yield (sign, body, offset) for '+'/'-'-separated top-level terms."""
    terms = []
    depth = 0
    sign = 1
    start = 0
    i = 0
    if not text.strip():
        raise PolynomialParseError("empty polynomial string")
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PolynomialParseError("unbalanced ')'", i)
        elif ch in "+-" and depth == 0:
            prev = text[:i].rstrip()
            if not prev or prev.endswith(("*", "^")):
                pass  # unary sign inside the current term, handled below
            elif prev[-1] in "eE" and len(prev) > 1 and (prev[-2].isdigit() or prev[-2] == "."):
                pass  # exponent sign of a scientific literal
            else:
                terms.append((sign, text[start:i], start))
                sign = 1 if ch == "+" else -1
                start = i + 1
        i += 1
    if depth != 0:
        raise PolynomialParseError("unbalanced '('", len(text) - 1)
    terms.append((sign, text[start:], start))
    return terms


def _parse_factor(factor, offset, nvars, var_prefix):
    """Return (coef, exponent_list) contribution of one '*'-joined factor."""
    body = factor.strip()
    if not body:
        raise PolynomialParseError("empty factor", offset)
    m = _COMPLEX_RE.fullmatch(body)
    if m:
        return complex(float(m.group(1)), float(m.group(2))), None
    m = _NUM_RE.fullmatch(body)
    if m:
        return complex(float(body)), None
    m = _VAR_RE.fullmatch(body)
    if m:
        prefix, idx, power = m.group(1), int(m.group(2)), m.group(3)
        if prefix != var_prefix:
            raise PolynomialParseError(
                f"unknown variable prefix {prefix!r} (expected {var_prefix!r})", offset)
        if not 1 <= idx <= nvars:
            raise PolynomialParseError(
                f"variable {prefix}{idx} out of range 1..{nvars}", offset)
        return None, (idx - 1, 1 if power is None else int(power))
    raise PolynomialParseError(f"cannot parse factor {body!r}", offset)


def parse_polynomial(text, nvars, var_prefix="x", max_degree=None):
    """Parse the term grammar into a Polynomial.

    Raises PolynomialParseError with an offset on malformed input, and when
    ``max_degree`` is given, on terms beyond that total degree.
    """
    if not isinstance(text, str):
        raise PolynomialParseError(f"polynomial must be a string, got {type(text).__name__}")
    terms = {}
    for sign, body, t_off in _split_terms(text):
        stripped = body.strip()
        while stripped.startswith(("+", "-")):
            if stripped[0] == "-":
                sign = -sign
            stripped = stripped[1:].lstrip()
        if not stripped:
            raise PolynomialParseError("sign without a term", t_off)
        coef = complex(sign)
        exps = [0] * nvars
        depth = 0
        pieces, piece_start = [], 0
        for i, ch in enumerate(stripped):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "*" and depth == 0:
                pieces.append((stripped[piece_start:i], t_off + piece_start))
                piece_start = i + 1
        pieces.append((stripped[piece_start:], t_off + piece_start))
        for piece, offset in pieces:
            c, var = _parse_factor(piece, offset, nvars, var_prefix)
            if c is not None:
                coef *= c
            else:
                idx, power = var
                exps[idx] += power
        if max_degree is not None and sum(exps) > max_degree:
            raise PolynomialParseError(
                f"term degree {sum(exps)} exceeds cap {max_degree}", t_off)
        key = tuple(exps)
        terms[key] = terms.get(key, 0j) + coef
    return Polynomial(nvars, terms)


def format_polynomial(p, var_prefix="x"):
    """Canonical text form: graded term order, 17-significant-digit coefficients."""
    if p.is_zero:
        return "0"
    rendered = []
    for exps, coef in p.terms_sorted():
        mono = "*".join(
            f"{var_prefix}{k + 1}" + (f"^{e}" if e > 1 else "")
            for k, e in enumerate(exps) if e)
        if coef.imag == 0.0:
            sign = "-" if coef.real < 0 else "+"
            lit = fmt_float(abs(coef.real))
        else:
            sign = "+"
            lit = fmt_complex(coef)
        rendered.append((sign, f"{lit}*{mono}" if mono else lit))
    head_sign, head = rendered[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in rendered[1:]:
        text += f" {sign} {body}"
    return text


# ---------------------------------------------------------------------------
# polynomial maps
# ---------------------------------------------------------------------------

class PolyMap:
    """Polynomial map between coordinate spaces; components share a variable count.

    Used both for real local maps (float points) and for holomorphic maps of
    chart coordinates (complex points); evaluation and the exact Jacobian work
    the same way in either case.
    """

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("map needs at least one component")
        n = components[0].nvars
        if any(c.nvars != n for c in components):
            raise ValueError("components disagree on variable count")
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap is immutable")

    @classmethod
    def identity(cls, nvars):
        return cls([Polynomial.variable(nvars, k) for k in range(nvars)])

    @property
    def nvars(self):
        return self.components[0].nvars

    @property
    def ncomponents(self):
        return len(self.components)

    @property
    def degree(self):
        return max(c.degree for c in self.components)

    def evaluate(self, points):
        pts = np.asarray(points)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        out = np.stack([c.evaluate(pts) for c in self.components], axis=-1)
        return out[0] if single else out

    __call__ = evaluate

    def jacobian(self, points):
        """Exact Jacobian, shape (P, ncomponents, nvars) (or unbatched)."""
        pts = np.asarray(points)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        out = np.stack([c.gradient(pts) for c in self.components], axis=1)
        return out[0] if single else out

    def compose(self, inner):
        """Symbolic composition self o inner."""
        return PolyMap([c.compose(inner.components) for c in self.components])

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def to_strings(self, var_prefix="x"):
        return tuple(format_polynomial(c, var_prefix) for c in self.components)

    def __repr__(self):
        return f"PolyMap({list(self.to_strings())})"


def poly_matmul(a, b):
    """Product of two matrices with Polynomial entries (lists of rows)."""
    rows, inner, cols = len(a), len(b), len(b[0])
    if any(len(r) != inner for r in a):
        raise ValueError("matrix shapes do not match")
    nvars = a[0][0].nvars
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = Polynomial.zero(nvars)
            for k in range(inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def poly_identity_matrix(size, nvars):
    return [[Polynomial.constant(nvars, 1.0 if i == j else 0.0)
             for j in range(size)] for i in range(size)]
