"""Sparse multivariate polynomial arithmetic.

Three layers live here:

* :class:`Monomial` -- an exponent multiset over variable indices,
* :class:`Polynomial` -- real-coefficient sparse polynomials with add/mul/
  compose/evaluate, exact for integer-representable coefficients,
* :class:`ParametricPolynomial` -- polynomials whose coefficients are affine
  expressions in named scalar decision variables, the carrier for constraint
  assembly before a conic solve.

The canonical term order is graded lexicographic (total degree first, then the
dense exponent vector with variable 0 most significant).  Every container drops
exactly-zero entries so that structural equality is canonical-form equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InputError

__all__ = [
    "Monomial",
    "Polynomial",
    "AffineExpression",
    "ParametricPolynomial",
]


@dataclass(frozen=True)
class Monomial:
    """Product of variables raised to nonnegative powers, stored sparsely.

    ``exps`` holds ``(variable index, power)`` pairs sorted by variable index;
    zero powers are never stored.
    """

    exps: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def from_exponents(exponents: Sequence[int] | Mapping[int, int]) -> "Monomial":
        if isinstance(exponents, Mapping):
            items = exponents.items()
        else:
            items = enumerate(exponents)
        pairs = tuple(sorted((int(i), int(e)) for i, e in items if e != 0))
        for i, e in pairs:
            if i < 0 or e < 0:
                raise InputError(f"invalid exponent entry ({i}, {e})")
        return Monomial(pairs)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def exponent(self, var: int) -> int:
        for i, e in self.exps:
            if i == var:
                return e
        return 0

    def max_var(self) -> int:
        """Largest variable index appearing, or -1 for the unit monomial."""
        return self.exps[-1][0] if self.exps else -1

    def dense(self, arity: int) -> tuple[int, ...]:
        out = [0] * arity
        for i, e in self.exps:
            if i >= arity:
                raise InputError(f"monomial uses variable {i} beyond arity {arity}")
            out[i] = e
        return tuple(out)

    def grlex_key(self, arity: int) -> tuple:
        return (self.degree, self.dense(arity))

    def __mul__(self, other: "Monomial") -> "Monomial":
        acc: dict[int, int] = dict(self.exps)
        for i, e in other.exps:
            acc[i] = acc.get(i, 0) + e
        return Monomial(tuple(sorted(acc.items())))

    def evaluate(self, point: Sequence[float]) -> float:
        out = 1.0
        for i, e in self.exps:
            out *= float(point[i]) ** e
        return out

    def __repr__(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in self.exps)


_UNIT = Monomial()


class Polynomial:
    """Sparse multivariate polynomial with float coefficients.

    Instances are immutable by convention: all operations return new objects.
    The zero polynomial keeps its arity but has an empty term map and degree -1.
    """

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: Mapping[Monomial, float] | None = None):
        if arity < 0:
            raise InputError("arity must be nonnegative")
        clean: dict[Monomial, float] = {}
        for mon, coef in (terms or {}).items():
            c = float(coef)
            if c != 0.0:
                if mon.max_var() >= arity:
                    raise InputError(
                        f"monomial {mon!r} does not fit arity {arity}"
                    )
                clean[mon] = c
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(arity: int) -> "Polynomial":
        return Polynomial(arity, {})

    @staticmethod
    def constant(arity: int, value: float) -> "Polynomial":
        return Polynomial(arity, {_UNIT: value})

    @staticmethod
    def variable(arity: int, index: int) -> "Polynomial":
        if not 0 <= index < arity:
            raise InputError(f"variable index {index} out of range for arity {arity}")
        return Polynomial(arity, {Monomial(((index, 1),)): 1.0})

    @staticmethod
    def variables(arity: int) -> list["Polynomial"]:
        return [Polynomial.variable(arity, i) for i in range(arity)]

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mon: Monomial) -> float:
        return self.terms.get(mon, 0.0)

    def sorted_terms(self) -> list[tuple[Monomial, float]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].grlex_key(self.arity))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    # -- arithmetic --------------------------------------------------------

    def _check_arity(self, other: "Polynomial") -> None:
        if self.arity != other.arity:
            raise InputError(
                f"arity mismatch: {self.arity} vs {other.arity}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_arity(other)
        acc = dict(self.terms)
        for mon, c in other.terms.items():
            acc[mon] = acc.get(mon, 0.0) + c
        return Polynomial(self.arity, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def scale(self, factor: float) -> "Polynomial":
        f = float(factor)
        return Polynomial(self.arity, {m: c * f for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(other)
        self._check_arity(other)
        acc: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mon = m1 * m2
                acc[mon] = acc.get(mon, 0.0) + c1 * c2
        return Polynomial(self.arity, acc)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Polynomial":
        if power < 0:
            raise InputError("negative power")
        out = Polynomial.constant(self.arity, 1.0)
        base = self
        k = power
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- evaluation and composition ---------------------------------------

    def __call__(self, point: Sequence[float]) -> float:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[float]) -> float:
        """Monomial-sum evaluation at a point of matching arity."""
        if len(point) != self.arity:
            raise InputError(
                f"point of length {len(point)} for polynomial arity {self.arity}"
            )
        return math.fsum(c * m.evaluate(point) for m, c in self.terms.items())

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[i]`` for variable ``i`` and expand fully."""
        if len(subs) != self.arity:
            raise InputError(
                f"{len(subs)} substitutions for polynomial arity {self.arity}"
            )
        if self.arity == 0:
            return Polynomial(0, dict(self.terms))
        new_arity = subs[0].arity
        for s in subs:
            if s.arity != new_arity:
                raise InputError("substitution polynomials must share one arity")
        # Cache powers of each substituted polynomial.
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in powers:
                powers[key] = subs[i] ** e
            return powers[key]

        acc = Polynomial.zero(new_arity)
        for mon, coef in self.terms.items():
            term = Polynomial.constant(new_arity, coef)
            for i, e in mon.exps:
                term = term * power(i, e)
            acc = acc + term
        return acc

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{c:g}*{m!r}" for m, c in self.sorted_terms()]
        return " + ".join(parts)


@dataclass(frozen=True)
class AffineExpression:
    """Affine expression ``const + sum(coeff[name] * name)`` over named scalars."""

    const: float = 0.0
    lin: tuple[tuple[str, float], ...] = ()

    @staticmethod
    def of(const: float = 0.0, lin: Mapping[str, float] | None = None) -> "AffineExpression":
        pairs = tuple(sorted((n, float(c)) for n, c in (lin or {}).items() if c != 0.0))
        return AffineExpression(float(const), pairs)

    @staticmethod
    def var(name: str, coeff: float = 1.0) -> "AffineExpression":
        return AffineExpression.of(0.0, {name: coeff})

    @staticmethod
    def constant(value: float) -> "AffineExpression":
        return AffineExpression.of(value)

    def lin_dict(self) -> dict[str, float]:
        return dict(self.lin)

    def is_zero(self) -> bool:
        return self.const == 0.0 and not self.lin

    def __add__(self, other) -> "AffineExpression":
        if isinstance(other, (int, float)):
            other = AffineExpression.constant(other)
        acc = self.lin_dict()
        for n, c in other.lin:
            acc[n] = acc.get(n, 0.0) + c
        return AffineExpression.of(self.const + other.const, acc)

    __radd__ = __add__

    def __sub__(self, other) -> "AffineExpression":
        if isinstance(other, (int, float)):
            other = AffineExpression.constant(other)
        return self + other.scale(-1.0)

    def __neg__(self) -> "AffineExpression":
        return self.scale(-1.0)

    def scale(self, factor: float) -> "AffineExpression":
        f = float(factor)
        if f == 0.0:
            return AffineExpression()
        return AffineExpression(self.const * f, tuple((n, c * f) for n, c in self.lin))

    def __mul__(self, factor: float) -> "AffineExpression":
        return self.scale(factor)

    __rmul__ = __mul__

    def substitute(self, env: Mapping[str, float]) -> float:
        out = self.const
        for n, c in self.lin:
            out += c * float(env[n])
        return out

    def variables(self) -> set[str]:
        return {n for n, _ in self.lin}

    def __repr__(self) -> str:
        parts = [f"{self.const:g}"] if self.const or not self.lin else []
        parts += [f"{c:g}*{n}" for n, c in self.lin]
        return " + ".join(parts) if parts else "0"


class ParametricPolynomial:
    """Polynomial whose coefficients are :class:`AffineExpression` values.

    Collecting by monomial is canonical; substituting numeric decision values
    yields a plain :class:`Polynomial`.  Products are only supported against
    numeric polynomials (a parametric-times-parametric product would leave the
    affine regime).
    """

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: Mapping[Monomial, AffineExpression] | None = None):
        clean: dict[Monomial, AffineExpression] = {}
        for mon, expr in (terms or {}).items():
            if not expr.is_zero():
                if mon.max_var() >= arity:
                    raise InputError(f"monomial {mon!r} does not fit arity {arity}")
                clean[mon] = expr
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("ParametricPolynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(arity: int) -> "ParametricPolynomial":
        return ParametricPolynomial(arity, {})

    @staticmethod
    def from_polynomial(p: Polynomial) -> "ParametricPolynomial":
        return ParametricPolynomial(
            p.arity, {m: AffineExpression.constant(c) for m, c in p.terms.items()}
        )

    @staticmethod
    def decision(name: str, arity: int, coeff: float = 1.0) -> "ParametricPolynomial":
        """The bare decision variable as a constant-monomial term."""
        return ParametricPolynomial(arity, {_UNIT: AffineExpression.var(name, coeff)})

    @staticmethod
    def scaled_decision(expr: AffineExpression, p: Polynomial) -> "ParametricPolynomial":
        """``expr * p`` for an affine expression and a numeric polynomial."""
        return ParametricPolynomial(p.arity, {m: expr.scale(c) for m, c in p.terms.items()})

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def collect(self) -> list[tuple[Monomial, AffineExpression]]:
        """Canonical (monomial, affine coefficient) list in graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: kv[0].grlex_key(self.arity))

    def decision_variables(self) -> set[str]:
        out: set[str] = set()
        for expr in self.terms.values():
            out |= expr.variables()
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ParametricPolynomial)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "ParametricPolynomial":
        if isinstance(other, Polynomial):
            other = ParametricPolynomial.from_polynomial(other)
        if not isinstance(other, ParametricPolynomial):
            raise InputError(f"cannot combine with {type(other).__name__}")
        if self.arity != other.arity:
            raise InputError(f"arity mismatch: {self.arity} vs {other.arity}")
        return other

    def __add__(self, other) -> "ParametricPolynomial":
        other = self._coerce(other)
        acc = dict(self.terms)
        for mon, expr in other.terms.items():
            acc[mon] = acc.get(mon, AffineExpression()) + expr
        return ParametricPolynomial(self.arity, acc)

    def __sub__(self, other) -> "ParametricPolynomial":
        return self + self._coerce(other).scale(-1.0)

    def scale(self, factor: float) -> "ParametricPolynomial":
        return ParametricPolynomial(
            self.arity, {m: e.scale(factor) for m, e in self.terms.items()}
        )

    def times_poly(self, p: Polynomial) -> "ParametricPolynomial":
        """Multiply by a numeric polynomial of the same arity."""
        if p.arity != self.arity:
            raise InputError(f"arity mismatch: {self.arity} vs {p.arity}")
        acc: dict[Monomial, AffineExpression] = {}
        for m1, expr in self.terms.items():
            for m2, c in p.terms.items():
                mon = m1 * m2
                acc[mon] = acc.get(mon, AffineExpression()) + expr.scale(c)
        return ParametricPolynomial(self.arity, acc)

    def compose(self, subs: Sequence[Polynomial]) -> "ParametricPolynomial":
        """Substitute numeric polynomials for the variables."""
        if len(subs) != self.arity:
            raise InputError(f"{len(subs)} substitutions for arity {self.arity}")
        if self.arity == 0:
            return ParametricPolynomial(0, dict(self.terms))
        new_arity = subs[0].arity
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in powers:
                powers[key] = subs[i] ** e
            return powers[key]

        acc: dict[Monomial, AffineExpression] = {}
        for mon, expr in self.terms.items():
            expanded = Polynomial.constant(new_arity, 1.0)
            for i, e in mon.exps:
                expanded = expanded * power(i, e)
            for m2, c in expanded.terms.items():
                acc[m2] = acc.get(m2, AffineExpression()) + expr.scale(c)
        return ParametricPolynomial(new_arity, acc)

    def substitute(self, env: Mapping[str, float]) -> Polynomial:
        """Plug in numeric decision values, producing a plain polynomial."""
        return Polynomial(
            self.arity, {m: e.substitute(env) for m, e in self.terms.items()}
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({e!r})*{m!r}" for m, e in self.collect())
