"""Exact differential-polynomial algebra in q, q', q'', ...

Polynomials live in the differential ring Q[q0, q1, q2, ...] where qk stands
for the k-th x-derivative of the potential.  Coefficients are exact rationals
(``fractions.Fraction``); evaluation on numeric derivative towers ("jets")
is done in floats.

The module provides the hierarchy flows X_nu generated by

    P_1 = -q/2,   P_{nu+1}' = H P_nu,   X_nu = -P_{nu+1}',
    H = -(1/2) d^3/dx^3 + 2 q d/dx + q',

and the boundary functionals b_n = 2^{-n} beta_n(0) with

    beta_1 = q,   beta_{n+1} = -beta_n' - sum_{v=1}^{n-1} beta_v beta_{n-v}.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import CapExceededError, JetTooShortError, NotATotalDerivativeError

# Monomial key: tuple of (derivative_order, exponent) pairs, sorted by order,
# exponents positive.  The empty tuple is the constant monomial.
Powers = tuple[tuple[int, int], ...]

MAX_FLOW_ORDER = 6
MAX_BETA_ORDER = 14


def _canon(powers: dict[int, int]) -> Powers:
    return tuple(sorted((k, e) for k, e in powers.items() if e != 0))


def _sort_key(powers: Powers):
    # graded order: total differential weight first, then exponent vector
    weight = sum((k + 1) * e for k, e in powers)
    return (weight, powers)


class DiffPoly:
    """Canonical sum of rational-coefficient differential monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Powers, Fraction] | None = None):
        self._terms = {p: c for p, c in (terms or {}).items() if c != 0}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "DiffPoly":
        return DiffPoly()

    @staticmethod
    def constant(c) -> "DiffPoly":
        return DiffPoly({(): Fraction(c)})

    @staticmethod
    def q(order: int = 0) -> "DiffPoly":
        """The single variable q^(order)."""
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        return DiffPoly({((order, 1),): Fraction(1)})

    # -- ring structure -----------------------------------------------------

    def __add__(self, other: "DiffPoly") -> "DiffPoly":
        terms = dict(self._terms)
        for p, c in other._terms.items():
            terms[p] = terms.get(p, Fraction(0)) + c
        return DiffPoly(terms)

    def __sub__(self, other: "DiffPoly") -> "DiffPoly":
        return self + (-other)

    def __neg__(self) -> "DiffPoly":
        return DiffPoly({p: -c for p, c in self._terms.items()})

    def __mul__(self, other) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            return self.scale(other)
        terms: dict[Powers, Fraction] = {}
        for p1, c1 in self._terms.items():
            for p2, c2 in other._terms.items():
                merged = dict(p1)
                for k, e in p2:
                    merged[k] = merged.get(k, 0) + e
                key = _canon(merged)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return DiffPoly(terms)

    __rmul__ = __mul__

    def scale(self, c) -> "DiffPoly":
        c = Fraction(c)
        return DiffPoly({p: c * coeff for p, coeff in self._terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- calculus -----------------------------------------------------------

    def ddx(self) -> "DiffPoly":
        """Total x-derivative: Leibniz rule, q^(k) -> q^(k+1)."""
        terms: dict[Powers, Fraction] = {}
        for powers, coeff in self._terms.items():
            for i, (k, e) in enumerate(powers):
                merged = dict(powers)
                merged[k] = e - 1
                merged[k + 1] = merged.get(k + 1, 0) + 1
                key = _canon(merged)
                terms[key] = terms.get(key, Fraction(0)) + coeff * e
        return DiffPoly(terms)

    def integrate_x(self) -> "DiffPoly":
        """Antiderivative in the ring, integration constant zero.

        Works by repeatedly peeling the top monomial: if it has the form
        c * q^(k) * q^(k-1)^e * rest with the top derivative appearing
        linearly, it came from differentiating c/(e+1) * q^(k-1)^(e+1) * rest.
        Raises if the input is not a total x-derivative.
        """
        work = self
        result = DiffPoly.zero()
        guard = 0
        while work:
            guard += 1
            if guard > 10000:
                raise NotATotalDerivativeError("integration did not terminate")
            powers = max(work._terms, key=lambda p: (p[-1][0] if p else -1, _sort_key(p)))
            coeff = work._terms[powers]
            if not powers:
                raise NotATotalDerivativeError("constant term has no antiderivative in the ring")
            k, e = powers[-1]
            if k == 0 or e != 1:
                raise NotATotalDerivativeError(
                    f"monomial {render_monomial(coeff, powers)} is not integrable"
                )
            merged = dict(powers)
            del merged[k]
            e_lower = merged.get(k - 1, 0)
            merged[k - 1] = e_lower + 1
            term = DiffPoly({_canon(merged): coeff / (e_lower + 1)})
            result = result + term
            work = work - term.ddx()
        return result

    # -- evaluation ---------------------------------------------------------

    def max_order(self) -> int:
        """Highest derivative order appearing; -1 for constants/zero."""
        orders = [p[-1][0] for p in self._terms if p]
        return max(orders, default=-1)

    def eval_jet(self, jet) -> float:
        """Evaluate on a derivative tower jet = [q, q', ..., q^(K)]."""
        if self.max_order() >= len(jet):
            raise JetTooShortError(
                f"polynomial needs derivatives up to order {self.max_order()}, "
                f"jet has order {len(jet) - 1}"
            )
        total = 0.0
        for powers, coeff in self._terms.items():
            v = float(coeff)
            for k, e in powers:
                v *= float(jet[k]) ** e
            total += v
        return total

    # -- rendering ----------------------------------------------------------

    def terms(self):
        """Canonically ordered (coeff, powers) pairs."""
        return [(self._terms[p], p) for p in sorted(self._terms, key=_sort_key)]

    def render(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(render_monomial(c, p) for c, p in self.terms())

    def __repr__(self):
        return f"DiffPoly({self.render()})"


def render_monomial(coeff: Fraction, powers: Powers) -> str:
    factors = []
    if coeff.denominator == 1 and coeff.numerator >= 0:
        factors.append(str(coeff.numerator))
    else:
        factors.append(f"({coeff})")
    for k, e in powers:
        factors.append(f"q{k}" + (f"^{e}" if e > 1 else ""))
    if len(factors) > 1 and factors[0] == "1":
        factors = factors[1:]
    return "*".join(factors)


def apply_H(p: DiffPoly) -> DiffPoly:
    """The recursion operator H p = -(1/2) p''' + 2 q p' + q' p."""
    q = DiffPoly.q(0)
    qp = DiffPoly.q(1)
    return p.ddx().ddx().ddx().scale(Fraction(-1, 2)) + (q * p.ddx()).scale(2) + qp * p


@lru_cache(maxsize=None)
def _p_poly(nu: int) -> DiffPoly:
    """P_nu of the flow recurrence (P_1 = -q/2, P_{nu+1} = int H P_nu)."""
    if nu == 1:
        return DiffPoly.q(0).scale(Fraction(-1, 2))
    return apply_H(_p_poly(nu - 1)).integrate_x()


def kdv_flow(nu: int, max_nu: int = MAX_FLOW_ORDER) -> DiffPoly:
    """The nu-th hierarchy flow X_nu = -H P_nu (X_0 = q'/2)."""
    if nu < 0:
        raise ValueError("flow index must be nonnegative")
    if nu > max_nu:
        raise CapExceededError(f"flow index {nu} exceeds cap {max_nu}")
    if nu == 0:
        return DiffPoly.q(1).scale(Fraction(1, 2))
    return -apply_H(_p_poly(nu))


@lru_cache(maxsize=None)
def _beta(n: int) -> DiffPoly:
    if n == 1:
        return DiffPoly.q(0)
    total = DiffPoly.zero()
    for v in range(1, n - 1):
        total = total + _beta(v) * _beta(n - 1 - v)
    return -_beta(n - 1).ddx() - total


def beta_poly(n: int, max_n: int = MAX_BETA_ORDER) -> DiffPoly:
    """beta_n of the asymptotic-expansion recurrence (beta_1 = q)."""
    if n < 1:
        raise ValueError("beta index must be positive")
    if n > max_n:
        raise CapExceededError(f"beta index {n} exceeds cap {max_n}")
    return _beta(n)


def b_n_eval(n: int, jet) -> float:
    """Boundary functional b_n = 2^{-n} beta_n evaluated on a jet at x=0."""
    beta = beta_poly(n)
    if beta.max_order() >= len(jet):
        raise JetTooShortError(f"b_{n} needs a jet of order >= {beta.max_order()}")
    return beta.eval_jet(jet) / 2.0**n
