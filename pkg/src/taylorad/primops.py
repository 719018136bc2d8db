"""Primitive operations: numeric implementations plus syntactic partial
derivative terms, which the differentiation macro splices into programs."""

from __future__ import annotations

import functools
import importlib
import itertools
import math
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .jetalgebra import MultiIndex, mi_key, parse_mi_key
from .syntax import ast as A


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class OpSpec:
    name: str
    arity: int
    fn: Callable[..., float]
    derivs: Mapping[MultiIndex, A.Term] = field(default_factory=dict)
    params: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.params is None:
            object.__setattr__(self, "params", tuple(f"x{i + 1}" for i in range(self.arity)))
        if len(self.params) != self.arity:
            raise RegistryError(f"{self.name}: {self.arity} parameters expected, got {self.params}")

    def deriv(self, beta: MultiIndex, args: tuple[A.Term, ...]) -> A.Term:
        """The term for d^beta op instantiated at ``args``."""
        try:
            body = self.derivs[tuple(beta)]
        except KeyError:
            raise RegistryError(
                f"operation {self.name!r} has no derivative term for beta={mi_key(beta)}"
            ) from None
        return A.substitute_many(body, dict(zip(self.params, args)))

    def max_order(self) -> int:
        """Largest R such that every d^beta with |beta| <= R is present."""
        if self.arity == 0:
            return math.inf
        r = 0
        while all(b in self.derivs for b in betas(self.arity, r + 1)):
            r += 1
        return r


def betas(n: int, order: int) -> list[MultiIndex]:
    """Multi-indices over n slots with total degree exactly ``order``."""
    return [b for b in itertools.product(range(order + 1), repeat=n) if sum(b) == order]


class Registry(Mapping):
    """Immutable name -> OpSpec table with a declared maximum derivative order."""

    def __init__(self, specs=(), r_max: int = 2):
        self.r_max = r_max
        self._specs: dict[str, OpSpec] = {}
        for s in specs:
            self._specs[s.name] = s

    def __getitem__(self, name: str) -> OpSpec:
        return self._specs[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __repr__(self):
        return f"Registry({sorted(self._specs)}, r_max={self.r_max})"

    def register(self, spec: OpSpec) -> Registry:
        return register_op(self, spec)


def register_op(registry: Registry, spec: OpSpec) -> Registry:
    """A new registry with ``spec`` added, after validating its derivative table."""
    if spec.name in registry:
        raise RegistryError(f"operation {spec.name!r} is already registered")
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", spec.name):
        raise RegistryError(f"operation name {spec.name!r} is not an identifier")
    out = Registry([*registry.values(), spec], registry.r_max)
    _validate(spec, out)
    return out


def _validate(spec: OpSpec, registry: Registry) -> None:
    from .typecheck import TypeCheckError, infer

    for order in range(1, registry.r_max + 1):
        for b in betas(spec.arity, order):
            if b not in spec.derivs:
                raise RegistryError(
                    f"operation {spec.name!r} is missing the derivative term for "
                    f"beta={mi_key(b)} (registry order {registry.r_max})"
                )
    ctx = [(p, A.REAL) for p in spec.params]
    for b, term in spec.derivs.items():
        if len(b) != spec.arity or not 1 <= sum(b):
            raise RegistryError(f"{spec.name}: bad derivative index {b}")
        stray = A.free_vars(term) - set(spec.params)
        if stray:
            raise RegistryError(f"{spec.name}: derivative {mi_key(b)} mentions {sorted(stray)}")
        try:
            ty = infer(ctx, term, registry)
        except TypeCheckError as exc:
            raise RegistryError(f"{spec.name}: derivative {mi_key(b)} is ill-typed: {exc}") from exc
        if ty != A.REAL:
            raise RegistryError(f"{spec.name}: derivative {mi_key(b)} has type {ty}, not real")


# --------------------------------------------------------------------------
# Builtins


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


_BUILTIN_DERIVS = {
    "+": {
        "10": "1",
        "01": "1",
        "20": "0",
        "11": "0",
        "02": "0",
    },
    "*": {
        "10": "x2",
        "01": "x1",
        "20": "0",
        "11": "1",
        "02": "0",
    },
    "sigmoid": {
        "1": "let y = sigmoid(x) in y * (1 - y)",
        "2": "let y = sigmoid(x) in let z = y * (1 - y) in z * (1 - 2 * y)",
    },
}


@functools.lru_cache(maxsize=None)
def builtin_registry(r_max: int = 2) -> Registry:
    """Addition, multiplication and sigmoid with derivative terms up to order 2.

    Real literals are not registry entries; they are ``Const`` nodes.
    """
    if r_max > 2:
        raise RegistryError(
            f"builtin derivative tables stop at order 2; order {r_max} needs "
            "user-supplied derivative terms"
        )
    from .syntax.parser import parse

    bare = [
        OpSpec("+", 2, lambda a, b: a + b),
        OpSpec("*", 2, lambda a, b: a * b),
        OpSpec("sigmoid", 1, sigmoid, params=("x",)),
    ]
    scratch = Registry(bare, r_max)
    specs = []
    for spec in bare:
        derivs = {
            parse_mi_key(key): parse(src, scratch)
            for key, src in _BUILTIN_DERIVS[spec.name].items()
            if sum(parse_mi_key(key)) <= r_max
        }
        specs.append(OpSpec(spec.name, spec.arity, spec.fn, derivs, spec.params))
    reg = Registry(specs, r_max)
    for spec in specs:
        _validate(spec, reg)
    return reg


# --------------------------------------------------------------------------
# User op files
#
#   op exp/1 (x) impl math.exp
#   deriv 1 = exp(x)
#   deriv 2 = exp(x)

_OP_HEADER = re.compile(
    r"op\s+(?P<name>[A-Za-z_][A-Za-z0-9_']*)\s*/\s*(?P<arity>\d+)"
    r"(?:\s*\((?P<params>[^)]*)\))?\s+impl\s+(?P<impl>[A-Za-z_][\w.]*)\s*$"
)
_DERIV = re.compile(r"deriv\s+(?P<beta>\d+)\s*=(?P<term>.*)$", re.S)


def _resolve(path: str) -> Callable[..., float]:
    module, _, attr = path.rpartition(".")
    if not module:
        raise RegistryError(f"impl {path!r} must be a dotted path like math.exp")
    obj = getattr(importlib.import_module(module), attr)
    if callable(obj):
        return obj
    value = float(obj)
    return lambda: value


def load_op_file(source: str, registry: Optional[Registry] = None) -> Registry:
    """Extend ``registry`` with the operations declared in ``source``."""
    from .syntax.parser import parse

    registry = registry if registry is not None else builtin_registry()
    blocks: list[list[str]] = []
    for raw in source.splitlines():
        line = raw.split("--", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.strip()
        if head.startswith("op ") or head.startswith("deriv "):
            blocks.append([head])
        elif blocks:
            blocks[-1].append(head)
        else:
            raise RegistryError(f"expected 'op' declaration, got {head!r}")

    i = 0
    while i < len(blocks):
        header = " ".join(blocks[i])
        m = _OP_HEADER.match(header)
        if not m:
            raise RegistryError(f"malformed op declaration: {header!r}")
        arity = int(m["arity"])
        params = None
        if m["params"] is not None:
            params = tuple(p.strip() for p in m["params"].split(",") if p.strip())
        provisional = OpSpec(m["name"], arity, _resolve(m["impl"]), {}, params)
        scratch = Registry([*registry.values(), provisional], registry.r_max)
        derivs = {}
        i += 1
        while i < len(blocks) and blocks[i][0].startswith("deriv "):
            d = _DERIV.match(" ".join(blocks[i]))
            if not d:
                raise RegistryError(f"malformed deriv line: {blocks[i][0]!r}")
            beta = parse_mi_key(d["beta"])
            if len(beta) != arity:
                raise RegistryError(f"deriv {d['beta']} does not match arity {arity}")
            derivs[beta] = parse(d["term"], scratch)
            i += 1
        registry = register_op(
            registry,
            OpSpec(provisional.name, arity, provisional.fn, derivs, provisional.params),
        )
    return registry
