"""Independent ground truth for derivative programs.

Three routes that do not go through the (k, R) macro's Faà di Bruno code:

* finite-difference jets of the plain program along affine curves;
* twice-iterated first-order (dual number) differentiation;
* exact symbolic differentiation (sympy) for univariate expressions and for
  the Faà di Bruno coefficients themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import sympy

from .evaluator import Evaluator, eval_jet_program, evaluate
from .jetalgebra import (
    JetShape,
    JetVector,
    MultiIndex,
    below,
    degree,
    fdb_sum,
    mi_factorial,
    mi_key,
)
from .macro import MacroConfig, d_term
from .primops import Registry
from .syntax import ast as A

# --------------------------------------------------------------------------
# Tolerances and comparison


@dataclass(frozen=True)
class Tolerance:
    """Per-coefficient test |a - b| <= abs + rel * max(|a|, |b|).

    ``overrides`` maps a derivative order to its own (rel, abs) pair.
    """

    rel: float = 1e-6
    abs: float = 1e-9
    overrides: tuple[tuple[int, float, float], ...] = ((2, 1e-3, 1e-6),)

    def for_order(self, order: int) -> tuple[float, float]:
        for o, rel, abs_ in self.overrides:
            if o == order:
                return rel, abs_
        return self.rel, self.abs

    @classmethod
    def uniform(cls, rel: float, abs: float = 0.0) -> Tolerance:
        return cls(rel, abs, ())


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class CoeffCheck:
    alpha: MultiIndex
    a: float
    b: float
    rel_err: float
    ok: bool


@dataclass(frozen=True)
class JetComparison:
    passed: bool
    max_rel_err: float
    checks: tuple[CoeffCheck, ...] = field(repr=False)

    def failures(self) -> list[CoeffCheck]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_rel_err": self.max_rel_err,
            "coeffs": {
                mi_key(c.alpha): {"a": c.a, "b": c.b, "rel_err": c.rel_err, "ok": c.ok}
                for c in self.checks
            },
        }


def rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if a == b else abs(a - b) / scale if scale else math.inf


def close(a: float, b: float, rel: float, abs_: float) -> bool:
    return abs(a - b) <= abs_ + rel * max(abs(a), abs(b))


def compare_jets(a: JetVector, b: JetVector, tol: Tolerance = DEFAULT_TOLERANCE) -> JetComparison:
    """Coefficientwise comparison; slots that are NaN in both jets are skipped."""
    if a.shape != b.shape:
        raise ValueError(f"cannot compare jets of shapes {a.shape} and {b.shape}")
    checks = []
    for alpha, x, y in zip(a.shape.coords, a.coeffs, b.coeffs):
        if math.isnan(x) and math.isnan(y):
            continue
        rel, abs_ = tol.for_order(degree(alpha))
        checks.append(CoeffCheck(alpha, x, y, rel_err(x, y), close(x, y, rel, abs_)))
    max_err = max((c.rel_err for c in checks), default=0.0)
    return JetComparison(all(c.ok for c in checks), max_err, tuple(checks))


# --------------------------------------------------------------------------
# Finite differences

FIRST_ORDER_STEP = 1e-4
SECOND_ORDER_STEP = 5e-3

# fourth-order central first-derivative stencil: offsets and weights / (12 h)
_D1_STENCIL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
# fourth-order central second-derivative stencil: weights / (12 h^2)
_D2_STENCIL = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))


def _real_names(ctx) -> list[str]:
    names = []
    for x, ty in ctx:
        if ty != A.REAL:
            raise ValueError(f"variable {x!r} has type {ty}; oracles need real inputs")
        names.append(x)
    return names


def fd_jet(
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    point: Sequence[float],
    directions: Sequence[Sequence[float]],
    k: int,
    r: int,
    registry: Optional[Registry] = None,
    steps: tuple[float, float] = (FIRST_ORDER_STEP, SECOND_ORDER_STEP),
) -> JetVector:
    """Jet of u -> program(point + directions^T u) by central differences.

    First derivatives use the two-point central difference with step
    ``steps[0]``; second derivatives use five-point stencils with step
    ``steps[1]`` (the tensor product of two first-derivative stencils for
    mixed partials).
    """
    if r > 2:
        raise ValueError("finite-difference jets are implemented up to order 2")
    names = _real_names(ctx)
    n = len(names)
    if len(point) != n or len(directions) != k or any(len(row) != n for row in directions):
        raise ValueError(f"need a point of length {n} and a {k} x {n} direction matrix")
    ev = Evaluator(registry)

    def f(u: Sequence[float]) -> float:
        env = {
            x: float(point[i]) + sum(directions[c][i] * u[c] for c in range(k))
            for i, x in enumerate(names)
        }
        v = ev.eval(env, program)
        if not isinstance(v, float):
            raise ValueError(f"program returned {v!r}, not a real")
        return v

    def at(offsets: dict[int, float]) -> list[float]:
        return [offsets.get(c, 0.0) for c in range(k)]

    shape = JetShape(k, r)
    h1, h2 = steps
    f0 = f([0.0] * k)
    vals = {}
    for alpha in shape.coords:
        order = degree(alpha)
        axes = [c for c in range(k) for _ in range(alpha[c])]
        if order == 0:
            vals[alpha] = f0
        elif order == 1:
            (c,) = axes
            vals[alpha] = (f(at({c: h1})) - f(at({c: -h1}))) / (2 * h1)
        elif axes[0] == axes[1]:
            c = axes[0]
            s = sum(w * (f0 if o == 0 else f(at({c: o * h2}))) for o, w in _D2_STENCIL)
            vals[alpha] = s / (12 * h2 * h2)
        else:
            c, d = axes
            s = 0.0
            for oc, wc in _D1_STENCIL:
                for od, wd in _D1_STENCIL:
                    s += wc * wd * f(at({c: oc * h2, d: od * h2}))
            vals[alpha] = s / (144 * h2 * h2)
    return JetVector.from_mapping(shape, vals)


# --------------------------------------------------------------------------
# Iterated first-order AD


def iterated_dual_jet(
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    point: Sequence[float],
    direction: Sequence[float],
    r: int,
    registry: Optional[Registry] = None,
) -> JetVector:
    """(f, f', f'') along ``direction`` by applying the (1,1) macro r times.

    For r = 2 every input is seeded as the dual-of-dual ((x, v), (v, 0)),
    i.e. x + v e1 + v e2, so the e1 e2 coefficient of the result is the
    second directional derivative.
    """
    names = _real_names(ctx)
    if len(point) != len(names) or len(direction) != len(names):
        raise ValueError("point and direction must match the context")
    cfg = MacroConfig(1, 1, registry=registry)
    if r == 1:
        env = {x: (float(p), float(v)) for x, p, v in zip(names, point, direction)}
        f, df = evaluate(env, d_term(cfg, program), cfg.registry)
        return JetVector(JetShape(1, 1), (f, df))
    if r == 2:
        env = {
            x: ((float(p), float(v)), (float(v), 0.0))
            for x, p, v in zip(names, point, direction)
        }
        (f, df), (_, ddf) = evaluate(env, d_term(cfg, d_term(cfg, program)), cfg.registry)
        return JetVector(JetShape(1, 2), (f, df, ddf))
    raise ValueError("iterated dual jets are implemented for r in {1, 2}")


def mixed_partial_recovery_12(
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    point: Sequence[float],
    registry: Optional[Registry] = None,
) -> float:
    """d^2 g / dx dy from three second-order directional derivatives:
    half of h(1,1) - h(1,0) - h(0,1), each read off a (1,2) jet."""
    names = _real_names(ctx)
    if len(names) != 2 or len(point) != 2:
        raise ValueError("mixed partial recovery needs exactly two real variables")
    cfg = MacroConfig(1, 2, registry=registry)
    shape = cfg.shape

    def second(v1: float, v2: float) -> float:
        seeds = [
            JetVector(shape, (float(point[0]), v1, 0.0)),
            JetVector(shape, (float(point[1]), v2, 0.0)),
        ]
        return eval_jet_program(cfg, program, ctx, seeds)[(2,)]

    return 0.5 * (second(1.0, 1.0) - second(1.0, 0.0) - second(0.0, 1.0))


def fd_mixed_partial(
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    point: Sequence[float],
    registry: Optional[Registry] = None,
) -> float:
    """The (1,1) coefficient of a (2,2) finite-difference jet along the axes."""
    jet = fd_jet(program, ctx, point, [[1.0, 0.0], [0.0, 1.0]], 2, 2, registry)
    return jet[(1, 1)]


# --------------------------------------------------------------------------
# Symbolic differentiation

SymExpr = sympy.Expr
X = sympy.Symbol("x")


def sym_derivs(expr: SymExpr, order: int, var: sympy.Symbol = X) -> list[SymExpr]:
    """[expr, expr', ..., expr^(order)] by exact differentiation."""
    if order > 4:
        raise ValueError("symbolic oracle is limited to order 4")
    out = [sympy.sympify(expr)]
    for _ in range(order):
        out.append(sympy.diff(out[-1], var))
    return out


def sym_sigmoid(x: SymExpr) -> SymExpr:
    return 1 / (1 + sympy.exp(-x))


_SYM_OPS = {
    "+": lambda a, b: a + b,
    "*": lambda a, b: a * b,
    "sigmoid": sym_sigmoid,
}


class _SymbolicEvaluator(Evaluator):
    def eval(self, env, t):
        match t:
            case A.Const(v):
                return sympy.Rational(repr(v)) if math.isfinite(v) else sympy.Float(v)
            case A.Op(name, args):
                vals = [self.eval(env, a) for a in args]
                fn = _SYM_OPS.get(name) or sympy.Function(name)
                return fn(*vals)
        return super().eval(env, t)


def term_to_sym(program: A.Term, ctx: Sequence[tuple[str, A.Type]], symbols=None) -> SymExpr:
    """Symbolic value of a real program whose free variables are reals."""
    names = _real_names(ctx)
    if symbols is None:
        symbols = [sympy.Symbol(x) for x in names]
    return _SymbolicEvaluator().eval(dict(zip(names, symbols)), program)


def sym_jet(
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    point: Sequence[float],
    direction: Sequence[float],
    r: int,
) -> JetVector:
    """Exact (1, r) jet along a line, evaluated in floating point at the end."""
    t = sympy.Symbol("t")
    if len(point) != len(ctx) or len(direction) != len(ctx):
        raise ValueError("point and direction must match the context")
    line = [sympy.Rational(repr(float(p))) + sympy.Rational(repr(float(v))) * t
            for p, v in zip(point, direction)]
    expr = term_to_sym(program, ctx, line)
    derivs = sym_derivs(expr, r, t)
    return JetVector(JetShape(1, r), tuple(float(d.subs(t, 0)) for d in derivs))


# --------------------------------------------------------------------------
# Faà di Bruno reference


def g_symbol(beta: MultiIndex) -> sympy.Symbol:
    return sympy.Symbol(f"g_{mi_key(beta)}")


def f_symbol(j: int, gamma: MultiIndex) -> sympy.Symbol:
    return sympy.Symbol(f"f{j + 1}_{mi_key(gamma)}")


def fdb_reference(alpha: MultiIndex, l: int) -> SymExpr:
    """d^alpha (f ; g) at the origin computed by sympy differentiation.

    f_j and g are replaced by their Taylor polynomials of degree |alpha|,
    whose coefficients are the symbols f{j}_{gamma} / gamma! and
    g_{beta} / beta!; higher terms cannot contribute to a derivative of
    order |alpha| at the base point.
    """
    k = len(alpha)
    order = degree(alpha)
    xs = sympy.symbols(f"x1:{k + 1}")
    fs = []
    for j in range(l):
        poly = sympy.Symbol(f"f{j + 1}_{mi_key((0,) * k)}")
        for gamma in below(tuple([order] * k)):
            if degree(gamma) <= order:
                mono = sympy.Mul(*(x**g for x, g in zip(xs, gamma)))
                poly += f_symbol(j, gamma) * mono / mi_factorial(gamma)
        fs.append(poly)
    base = [sympy.Symbol(f"f{j + 1}_{mi_key((0,) * k)}") for j in range(l)]
    g = 0
    for beta in [(0,) * l] + below(tuple([order] * l)):
        if degree(beta) <= order:
            mono = sympy.Mul(*((fj - bj) ** b for fj, bj, b in zip(fs, base, beta)))
            g += g_symbol(beta) * mono / mi_factorial(beta)
    expr = g
    for x, a in zip(xs, alpha):
        if a:
            expr = sympy.diff(expr, x, a)
    return sympy.expand(expr.subs({x: 0 for x in xs}))


def fdb_reassembled(alpha: MultiIndex, l: int) -> SymExpr:
    """The same derivative assembled from :func:`enumerate_fdb` terms."""
    return sympy.expand(fdb_sum(alpha, l, g_symbol, f_symbol, sympy.Integer(0)))


def univariate_chain_reference(order: int) -> SymExpr:
    """(g o f)^(order) with f, g undefined functions, in sympy's notation."""
    f = sympy.Function("f")
    g = sympy.Function("g")
    return sympy.expand(sympy.diff(g(f(X)), X, order).doit())


def univariate_chain_reassembled(order: int) -> SymExpr:
    f = sympy.Function("f")
    g = sympy.Function("g")
    y = sympy.Symbol("y")

    def g_deriv(beta):
        return sympy.diff(g(y), y, beta[0]).subs(y, f(X)) if beta[0] else g(f(X))

    def f_deriv(j, gamma):
        return sympy.diff(f(X), X, gamma[0])

    return sympy.expand(fdb_sum((order,), 1, g_deriv, f_deriv, sympy.Integer(0)).doit())


__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "JetComparison",
    "compare_jets",
    "fd_jet",
    "iterated_dual_jet",
    "mixed_partial_recovery_12",
    "fd_mixed_partial",
    "sym_derivs",
    "term_to_sym",
    "sym_jet",
    "fdb_reference",
    "fdb_reassembled",
    "univariate_chain_reference",
    "univariate_chain_reassembled",
]
