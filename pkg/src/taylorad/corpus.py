"""The test corpus: closed real-valued functions shipped as surface syntax,
plus helpers that open them into programs over a context of real variables
(the shape the jet oracles work on)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources

from .syntax import ast as A
from .syntax import parse
from .typecheck import infer

CORPUS_NAMES = ("network", "inner_product2", "inner_product3", "sum_squares", "missing_data")

# two-variable programs for mixed-partial recovery
MIXED_PARTIAL_PROGRAMS = {"mul": "x * y", "add": "x + y", "sigmoid_mul": "sigmoid(x * y)"}


def program_source(name: str) -> str:
    return resources.files("taylorad.programs").joinpath(f"{name}.tl").read_text()


@dataclass(frozen=True)
class CorpusCase:
    name: str
    source: str

    @cached_property
    def function(self) -> A.Term:
        return parse(self.source)

    @cached_property
    def type(self) -> A.Fun:
        ty = infer({}, self.function)
        if not isinstance(ty, A.Fun) or ty.cod != A.REAL:
            raise TypeError(f"corpus program {self.name!r} is not a real-valued function: {ty}")
        return ty

    @cached_property
    def opened(self) -> tuple[list[tuple[str, A.Type]], A.Term]:
        return open_function(self.function, self.type.dom)

    @property
    def ctx(self) -> list[tuple[str, A.Type]]:
        return self.opened[0]

    @property
    def program(self) -> A.Term:
        return self.opened[1]

    @property
    def n_inputs(self) -> int:
        return len(self.ctx)


@lru_cache(maxsize=None)
def load_case(name: str) -> CorpusCase:
    return CorpusCase(name, program_source(name))


def corpus() -> list[CorpusCase]:
    return [load_case(n) for n in CORPUS_NAMES]


def open_function(fn: A.Term, dom: A.Type, stem: str = "a") -> tuple[list[tuple[str, A.Type]], A.Term]:
    """``fn`` applied to a tuple of fresh real variables shaped like ``dom``.

    Variables are named ``a0, a1, ...`` in left-to-right leaf order.
    """
    ctx: list[tuple[str, A.Type]] = []

    def build(ty: A.Type) -> A.Term:
        if ty == A.REAL:
            x = f"{stem}{len(ctx)}"
            ctx.append((x, A.REAL))
            return A.Var(x)
        if isinstance(ty, A.Prod):
            return A.Tuple(tuple(build(t) for t in ty.items))
        raise TypeError(f"cannot open a function over {ty}: inputs must be nested reals")

    arg = build(dom)
    return ctx, A.App(fn, arg)


def mixed_partial_case(name: str) -> tuple[list[tuple[str, A.Type]], A.Term]:
    return [("x", A.REAL), ("y", A.REAL)], parse(MIXED_PARTIAL_PROGRAMS[name])
