"""Multi-index bookkeeping and the multivariate Faà di Bruno expansion.

A (k, R) jet of a function f: R^k -> R at a point is the vector of its
partial derivatives of total order <= R, indexed by multi-indices in
lexicographic order. Coefficients are raw derivatives, not divided by
alpha!.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

MultiIndex = tuple[int, ...]


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def mi_factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def mi_key(alpha: MultiIndex) -> str:
    """Digit-string form used in JSON, e.g. (1, 0) -> "10"."""
    if any(a > 9 for a in alpha):
        raise ValueError(f"multi-index entry above 9 has no digit encoding: {alpha}")
    return "".join(map(str, alpha))


def parse_mi_key(key: str) -> MultiIndex:
    if not key.isdigit():
        raise ValueError(f"bad multi-index key {key!r}")
    return tuple(int(c) for c in key)


def one_hot(i: int, n: int, value: int = 1) -> MultiIndex:
    return tuple(value if j == i else 0 for j in range(n))


def below(alpha: MultiIndex) -> list[MultiIndex]:
    """Nonzero multi-indices componentwise <= alpha, lexicographic."""
    return [a for a in itertools.product(*(range(x + 1) for x in alpha)) if any(a)]


@dataclass(frozen=True)
class JetShape:
    k: int
    r: int

    def __post_init__(self):
        if self.k < 1 or self.r < 0:
            raise ValueError(f"need k >= 1 and R >= 0, got k={self.k}, R={self.r}")

    @functools.cached_property
    def coords(self) -> tuple[MultiIndex, ...]:
        return tuple(
            a for a in itertools.product(range(self.r + 1), repeat=self.k) if sum(a) <= self.r
        )

    @functools.cached_property
    def _index(self) -> dict[MultiIndex, int]:
        return {a: i for i, a in enumerate(self.coords)}

    @property
    def size(self) -> int:
        return len(self.coords)

    def index(self, alpha: MultiIndex) -> int:
        try:
            return self._index[tuple(alpha)]
        except KeyError:
            raise KeyError(f"{alpha} is not a coordinate of {self}") from None

    @property
    def zero(self) -> MultiIndex:
        return (0,) * self.k


def enumerate_coords(k: int, r: int) -> tuple[MultiIndex, ...]:
    """Multi-indices of total degree <= r over k variables, lexicographic."""
    return JetShape(k, r).coords


@dataclass(frozen=True)
class JetVector:
    shape: JetShape
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.shape.size:
            raise ValueError(
                f"jet of shape (k={self.shape.k}, R={self.shape.r}) needs "
                f"{self.shape.size} coefficients, got {len(self.coeffs)}"
            )

    def __getitem__(self, alpha: MultiIndex) -> float:
        return self.coeffs[self.shape.index(alpha)]

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def items(self):
        return zip(self.shape.coords, self.coeffs)

    def to_json(self) -> dict:
        return {
            "k": self.shape.k,
            "r": self.shape.r,
            "coeffs": {mi_key(a): c for a, c in self.items()},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> JetVector:
        shape = JetShape(int(obj["k"]), int(obj["r"]))
        coeffs = {parse_mi_key(key): float(v) for key, v in obj["coeffs"].items()}
        if set(coeffs) != set(shape.coords):
            raise ValueError(f"coefficient keys do not match shape {shape}")
        return cls(shape, tuple(coeffs[a] for a in shape.coords))

    @classmethod
    def from_mapping(
        cls, shape: JetShape, values: Mapping[MultiIndex, float], fill: float = 0.0
    ) -> JetVector:
        return cls(shape, tuple(float(values.get(a, fill)) for a in shape.coords))


# --------------------------------------------------------------------------
# Faà di Bruno


@dataclass(frozen=True)
class FdBTerm:
    """One summand of the expansion of a derivative of ``f ; g``.

    ``assignment`` pairs each inner multi-index alpha^r that occurs with its
    exponent vector (e^r_1, ..., e^r_l); slots with an all-zero exponent
    vector are omitted. The summand is::

        coefficient * d^beta g(f(a)) * prod_r prod_j (d^{alpha^r} f_j(a)) ** e^r_j
    """

    beta: MultiIndex
    assignment: tuple[tuple[MultiIndex, tuple[int, ...]], ...]
    coefficient: Fraction

    @property
    def integer(self) -> int:
        if self.coefficient.denominator != 1:
            raise ArithmeticError(f"non-integral Faà di Bruno coefficient {self.coefficient}")
        return self.coefficient.numerator

    def factors(self):
        """Yield (j, alpha_r, exponent) for every nonzero power in the monomial."""
        for alpha_r, e in self.assignment:
            for j, ej in enumerate(e):
                if ej:
                    yield j, alpha_r, ej


def _compositions(m: int, l: int):
    """All l-tuples of naturals summing to m, lexicographic."""
    if l == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in _compositions(m - first, l - 1):
            yield (first,) + rest


def _multiplicities(parts, remaining):
    """Multisets of ``parts`` (counts per part) summing to ``remaining``."""
    if not parts:
        if not any(remaining):
            yield ()
        return
    head, tail = parts[0], parts[1:]
    m = 0
    while all(m * h <= r for h, r in zip(head, remaining)):
        rest = tuple(r - m * h for h, r in zip(head, remaining))
        for counts in _multiplicities(tail, rest):
            yield (m,) + counts
        m += 1


@functools.lru_cache(maxsize=None)
def enumerate_fdb(alpha: MultiIndex, l: int) -> tuple[FdBTerm, ...]:
    """All summands of the multivariate Faà di Bruno formula for d^alpha (f ; g),
    with f: R^k -> R^l and k = len(alpha).

    Each summand corresponds to a way of writing alpha as a sum of nonzero
    multi-indices (with multiplicity) and distributing each multiplicity over
    the l inner coordinates; beta is the resulting total exponent per
    coordinate.
    """
    alpha = tuple(alpha)
    if degree(alpha) < 1 or l < 1:
        raise ValueError(f"need |alpha| >= 1 and l >= 1, got alpha={alpha}, l={l}")
    parts = below(alpha)
    alpha_fact = mi_factorial(alpha)
    terms = []
    for counts in _multiplicities(parts, alpha):
        used = [(p, m) for p, m in zip(parts, counts) if m]
        for dist in itertools.product(*(_compositions(m, l) for _, m in used)):
            beta = tuple(sum(e[j] for e in dist) for j in range(l))
            coeff = Fraction(alpha_fact)
            for (p, _), e in zip(used, dist):
                pf = mi_factorial(p)
                for ej in e:
                    coeff /= math.factorial(ej) * pf**ej
            terms.append(FdBTerm(beta, tuple((p, e) for (p, _), e in zip(used, dist)), coeff))
    terms.sort(key=lambda t: (t.beta, t.assignment))
    for t in terms:
        t.integer  # noqa: B018  raises if a coefficient is not integral
    return tuple(terms)


def fdb_sum(
    alpha: MultiIndex,
    l: int,
    g_deriv: Callable[[MultiIndex], object],
    f_deriv: Callable[[int, MultiIndex], object],
    zero=0,
):
    """Reassemble d^alpha (f ; g) in any commutative ring.

    ``g_deriv(beta)`` gives d^beta g at f(a); ``f_deriv(j, gamma)`` gives
    d^gamma f_j at a (j is 0-based).
    """
    total = zero
    for term in enumerate_fdb(tuple(alpha), l):
        prod = term.integer * g_deriv(term.beta)
        for j, alpha_r, e in term.factors():
            prod = prod * f_deriv(j, alpha_r) ** e
        total = total + prod
    return total


class MissingDerivative(KeyError):
    pass


def compose_jets(
    g_derivs: Mapping[MultiIndex, float], args: Sequence[JetVector], shape: JetShape
) -> JetVector:
    """Jet of ``(f_1, ..., f_l) ; g`` from the jets of the f_j and the
    partial derivatives of g at (f_1(a), ..., f_l(a)).

    ``g_derivs`` maps multi-indices over the l arguments (including the zero
    index, the value of g) to numbers.
    """
    l = len(args)
    for a in args:
        if a.shape != shape:
            raise ValueError(f"argument jet has shape {a.shape}, expected {shape}")

    def g(beta):
        try:
            return g_derivs[beta]
        except KeyError:
            raise MissingDerivative(f"no derivative of g supplied for beta={beta}") from None

    out = [g((0,) * l)]
    for alpha in shape.coords[1:]:
        out.append(float(fdb_sum(alpha, l, g, lambda j, gamma: args[j][gamma], 0.0)))
    return JetVector(shape, tuple(out))


def seed_affine(
    point: Sequence[float], directions: Sequence[Sequence[float]], shape: JetShape
) -> list[JetVector]:
    """Jets of the affine curves u -> point_i + sum_c directions[c][i] * u_c."""
    n = len(point)
    if len(directions) != shape.k or any(len(row) != n for row in directions):
        raise ValueError(f"directions must be a {shape.k} x {n} matrix")
    jets = []
    for i in range(n):
        vals = {shape.zero: float(point[i])}
        if shape.r >= 1:
            for c in range(shape.k):
                vals[one_hot(c, shape.k)] = float(directions[c][i])
        jets.append(JetVector.from_mapping(shape, vals))
    return jets
