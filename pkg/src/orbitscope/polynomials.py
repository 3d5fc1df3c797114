"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a dict from exponent tuples to nonzero Fraction
coefficients, tagged with a variable kind so that ambient-space ("x")
and orbit-space ("J") objects cannot be mixed by accident.

The canonical term order used everywhere (printing, pivoting, greedy basis
selection) is graded lexicographic, highest first: terms compare by total
degree, then lexicographically on the exponent tuple.  For two variables
this orders degree-2 monomials as x1^2, x1 x2, x2^2.

Text serialization is a sum of ``c * x1^a1 x2^a2`` terms in canonical
order and round-trips exactly through :func:`parse_polynomial`.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import KindMismatch, PolynomialParseError

X_KIND = "x"
J_KIND = "J"

Monomial = tuple[int, ...]


def mono_degree(m: Monomial) -> int:
    return sum(m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_key(m: Monomial):
    """Sort key for the canonical (graded lexicographic) order."""
    return (sum(m), m)


def monomials_of_degree(nvars: int, degree: int) -> list[Monomial]:
    """All exponent tuples of the given total degree, canonical order."""
    out: list[Monomial] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    if nvars == 0:
        return [()] if degree == 0 else []
    rec((), degree, nvars)
    return out


class Polynomial:
    """Sparse exact polynomial.

    Parameters
    ----------
    nvars : int
        Number of variables.
    terms : mapping
        Exponent tuple -> coefficient; zero coefficients are dropped and
        all coefficients are coerced to Fraction.
    kind : str
        Variable kind marker, ``"x"`` or ``"J"``.
    """

    __slots__ = ("nvars", "kind", "terms")

    def __init__(self, nvars: int, terms=None, kind: str = X_KIND):
        self.nvars = int(nvars)
        self.kind = kind
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    if len(m) != self.nvars:
                        raise ValueError("exponent tuple length mismatch")
                    clean[tuple(int(e) for e in m)] = c
        self.terms = clean

    # ------------------------------------------------------------ factories

    @classmethod
    def zero(cls, nvars: int, kind: str = X_KIND) -> "Polynomial":
        return cls(nvars, {}, kind)

    @classmethod
    def constant(cls, nvars: int, value, kind: str = X_KIND) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: Fraction(value)}, kind)

    @classmethod
    def variable(cls, index: int, nvars: int, kind: str = X_KIND) -> "Polynomial":
        expo = [0] * nvars
        expo[index] = 1
        return cls(nvars, {tuple(expo): Fraction(1)}, kind)

    @classmethod
    def monomial(cls, expo: Monomial, coeff, kind: str = X_KIND) -> "Polynomial":
        return cls(len(expo), {tuple(expo): Fraction(coeff)}, kind)

    # ------------------------------------------------------------ predicates

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(mono_degree(m), {})[m] = c
        return {
            d: Polynomial(self.nvars, t, self.kind) for d, t in sorted(parts.items())
        }

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def monic(self) -> "Polynomial":
        """Divide by the leading coefficient (canonical normalization)."""
        if not self.terms:
            return self
        _, c = self.leading_term()
        return self.scale(Fraction(1) / c)

    # ------------------------------------------------------------ arithmetic

    def _check_kind(self, other: "Polynomial"):
        if self.kind != other.kind or self.nvars != other.nvars:
            raise KindMismatch(
                f"cannot combine {self.kind}[{self.nvars}] with "
                f"{other.kind}[{other.nvars}]"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other, self.kind)
        self._check_kind(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return Polynomial(self.nvars, terms, self.kind)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(
            self.nvars, {m: -c for m, c in self.terms.items()}, self.kind
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other, self.kind)
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(self.nvars, self.kind)
        return Polynomial(
            self.nvars, {m: c * v for m, v in self.terms.items()}, self.kind
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_kind(other)
        terms: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                terms[m] = terms.get(m, Fraction(0)) + ca * cb
        return Polynomial(self.nvars, terms, self.kind)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1, self.kind)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.kind == other.kind
            and self.terms == other.terms
        )

    __hash__ = None

    # --------------------------------------------------------------- calculus

    def partial(self, index: int) -> "Polynomial":
        terms: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = m[index]
            if e:
                dm = list(m)
                dm[index] = e - 1
                dm = tuple(dm)
                terms[dm] = terms.get(dm, Fraction(0)) + c * e
        return Polynomial(self.nvars, terms, self.kind)

    def gradient(self) -> list["Polynomial"]:
        return [self.partial(i) for i in range(self.nvars)]

    # ------------------------------------------------------------- evaluation

    def evaluate(self, point):
        """Evaluate at a point.

        Fraction/int input stays exact; any float input switches to float
        arithmetic.
        """
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        exact = all(not isinstance(x, float) for x in point)
        if exact:
            total = Fraction(0)
            for m, c in self.terms.items():
                v = c
                for x, e in zip(point, m):
                    if e:
                        v *= Fraction(x) ** e
                total += v
            return total
        total = 0.0
        for m, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, m):
                if e:
                    v *= float(x) ** e
            total += v
        return total

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"

    # ---------------------------------------------------------- serialization

    def to_text(self) -> str:
        """Canonical text form; round-trips through parse_polynomial."""
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            factors = " ".join(
                f"{self.kind}{i + 1}^{e}" for i, e in enumerate(m) if e
            )
            pieces.append(f"{c} * {factors}" if factors else f"{c}")
        return " + ".join(pieces)

    def pretty(self) -> str:
        """Human-oriented rendering with signs and implicit exponents."""
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            factors = "*".join(
                f"{self.kind}{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(m)
                if e
            )
            mag = abs(c)
            if factors:
                body = factors if mag == 1 else f"{mag}*{factors}"
            else:
                body = f"{mag}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)


def parse_polynomial(text: str, nvars: int, kind: str = X_KIND) -> Polynomial:
    """Parse the canonical text form produced by ``Polynomial.to_text``."""
    text = text.strip()
    if text == "0":
        return Polynomial.zero(nvars, kind)
    terms: dict[Monomial, Fraction] = {}
    for piece in text.split(" + "):
        piece = piece.strip()
        if not piece:
            raise PolynomialParseError(f"empty term in {text!r}")
        if " * " in piece:
            coeff_text, factors_text = piece.split(" * ", 1)
            expo = [0] * nvars
            for factor in factors_text.split():
                if "^" not in factor or not factor.startswith(kind):
                    raise PolynomialParseError(f"bad factor {factor!r}")
                var_text, exp_text = factor[len(kind):].split("^")
                idx = int(var_text) - 1
                if not 0 <= idx < nvars:
                    raise PolynomialParseError(f"variable out of range in {factor!r}")
                expo[idx] += int(exp_text)
            mono = tuple(expo)
        else:
            coeff_text = piece
            mono = (0,) * nvars
        try:
            coeff = Fraction(coeff_text)
        except (ValueError, ZeroDivisionError) as exc:
            raise PolynomialParseError(f"bad coefficient {coeff_text!r}") from exc
        terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return Polynomial(nvars, terms, kind)


# ------------------------------------------------------------- composition


def compose(p: Polynomial, maps: list[Polynomial]) -> Polynomial:
    """Substitute maps[i] for variable i of p.

    All maps must share one (nvars, kind); the result lives in that space.
    Powers of each map are cached, so repeated exponents cost one multiply.
    """
    if len(maps) != p.nvars:
        raise ValueError("need one substitution map per variable")
    if not maps:
        raise ValueError("cannot compose a zero-variable polynomial")
    tgt_nvars, tgt_kind = maps[0].nvars, maps[0].kind
    for q in maps:
        if q.nvars != tgt_nvars or q.kind != tgt_kind:
            raise KindMismatch("substitution maps disagree on target space")
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, e: int) -> Polynomial:
        key = (i, e)
        if key not in powers:
            if e == 1:
                powers[key] = maps[i]
            else:
                powers[key] = power(i, e - 1) * maps[i]
        return powers[key]

    result = Polynomial.zero(tgt_nvars, tgt_kind)
    for m, c in p.sorted_terms():
        term = Polynomial.constant(tgt_nvars, c, tgt_kind)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


def act(matrix, p: Polynomial) -> Polynomial:
    """Pull back p along the linear map given by ``matrix``: x -> p(T x)."""
    if p.kind != X_KIND:
        raise KindMismatch("group action applies to x-space polynomials")
    rows = getattr(matrix, "matrix", matrix)
    n = len(rows)
    if n != p.nvars:
        raise ValueError("matrix dimension mismatch")
    forms = [
        Polynomial(
            n,
            {
                tuple(1 if j == jj else 0 for jj in range(n)): rows[i][j]
                for j in range(n)
                if rows[i][j] != 0
            },
            X_KIND,
        )
        for i in range(n)
    ]
    return compose(p, forms)


def reynolds(rep, p: Polynomial) -> Polynomial:
    """Group average (1/|G|) sum_g p(T_g x); a projection onto invariants."""
    total = Polynomial.zero(p.nvars, p.kind)
    for g in rep.elements:
        total = total + act(g.matrix, p)
    return total.scale(Fraction(1, rep.order))


def substitute(psi: Polynomial, basis_polys) -> Polynomial:
    """Evaluate a J-space polynomial on x-space basis polynomials."""
    if psi.kind != J_KIND:
        raise KindMismatch("substitute expects a J-space polynomial")
    maps = list(basis_polys)
    for q in maps:
        if q.kind != X_KIND:
            raise KindMismatch("basis polynomials must be x-space")
    return compose(psi, maps)


# --------------------------------------------------------- numeric compile


class NumericPoly:
    """Float evaluator compiled from an exact polynomial."""

    __slots__ = ("nvars", "exps", "coeffs")

    def __init__(self, p: Polynomial):
        self.nvars = p.nvars
        items = p.sorted_terms()
        if items:
            self.exps = np.array([m for m, _ in items], dtype=np.int64)
            self.coeffs = np.array([float(c) for _, c in items])
        else:
            self.exps = np.zeros((0, p.nvars), dtype=np.int64)
            self.coeffs = np.zeros(0)

    def __call__(self, x) -> float:
        if not len(self.coeffs):
            return 0.0
        x = np.asarray(x, dtype=float)
        return float(np.prod(x[None, :] ** self.exps, axis=1) @ self.coeffs)

    def eval_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if not len(self.coeffs):
            return np.zeros(len(pts))
        return np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2) @ self.coeffs


def compile_polynomial(p: Polynomial) -> NumericPoly:
    return NumericPoly(p)


def compile_gradient(p: Polynomial) -> list[NumericPoly]:
    return [NumericPoly(q) for q in p.gradient()]
