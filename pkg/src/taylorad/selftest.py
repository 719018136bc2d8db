"""Run the oracle corpus: macro jets against finite differences, iterated
duals, mixed-partial recovery and the restricted (2,2) representation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle as O
from .corpus import MIXED_PARTIAL_PROGRAMS, corpus, mixed_partial_case
from .evaluator import eval_jet_program
from .jetalgebra import JetShape, JetVector, seed_affine
from .macro import RESTRICTED22, RESTRICTED22_COORDS, MacroConfig

CONFIGS = ((1, 1), (1, 2), (2, 2))
N_POINTS = 5
SEED = 20240601

CROSS_ORACLE_TOL = O.Tolerance.uniform(1e-9, 1e-12)
RESTRICTED_TOL = O.Tolerance.uniform(1e-12, 1e-15)


@dataclass
class CaseResult:
    check: str
    program: str
    config: str
    passed: bool
    max_rel_err: float
    detail: str = ""

    def to_json(self) -> dict:
        err = self.max_rel_err
        return {
            "check": self.check,
            "program": self.program,
            "config": self.config,
            "passed": self.passed,
            "max_rel_err": err if math.isfinite(err) else str(err),
            "detail": self.detail,
        }


@dataclass
class SelftestReport:
    results: list[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def by_check(self, check: str) -> list[CaseResult]:
        return [r for r in self.results if r.check == check]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "n_cases": len(self.results),
            "n_failed": sum(not r.passed for r in self.results),
            "cases": [r.to_json() for r in self.results],
        }


def sample_points(rng: np.random.Generator, n: int, k: int):
    """A base point in [-2, 2]^n and k directions in [-1, 1]^n."""
    return rng.uniform(-2.0, 2.0, n), rng.uniform(-1.0, 1.0, (k, n))


def _merge(reports: list[O.JetComparison]) -> tuple[bool, float, str]:
    failures = [f for rep in reports for f in rep.failures()]
    detail = "; ".join(f"alpha={f.alpha} {f.a!r} vs {f.b!r}" for f in failures[:3])
    return (not failures, max((r.max_rel_err for r in reports), default=0.0), detail)


def check_fd(seed: int = SEED, n_points: int = N_POINTS, tol: O.Tolerance = O.DEFAULT_TOLERANCE):
    rng = np.random.default_rng(seed)
    for case in corpus():
        for k, r in CONFIGS:
            cfg = MacroConfig(k, r)
            reps = []
            for _ in range(n_points):
                p, d = sample_points(rng, case.n_inputs, k)
                macro = eval_jet_program(cfg, case.program, case.ctx, seed_affine(p, d, cfg.shape))
                reps.append(O.compare_jets(macro, O.fd_jet(case.program, case.ctx, p, d, k, r), tol))
            yield CaseResult("macro-vs-fd", case.name, f"({k},{r})", *_merge(reps))


def check_iterated(seed: int = SEED, n_points: int = N_POINTS):
    rng = np.random.default_rng(seed + 1)
    cfg = MacroConfig(1, 2)
    for case in corpus():
        reps = []
        for _ in range(n_points):
            p, d = sample_points(rng, case.n_inputs, 1)
            macro = eval_jet_program(cfg, case.program, case.ctx, seed_affine(p, d, cfg.shape))
            it = O.iterated_dual_jet(case.program, case.ctx, p, d[0], 2)
            reps.append(O.compare_jets(macro, it, CROSS_ORACLE_TOL))
        yield CaseResult("macro-vs-iterated", case.name, "(1,2)", *_merge(reps))


def check_restricted22(seed: int = SEED, n_points: int = N_POINTS):
    rng = np.random.default_rng(seed + 2)
    full = MacroConfig(2, 2)
    restricted = MacroConfig(2, 2, RESTRICTED22)
    shape = JetShape(2, 2)
    for case in corpus():
        reps = []
        for _ in range(n_points):
            p, d = sample_points(rng, case.n_inputs, 2)
            seeds = seed_affine(p, d, shape)
            a = eval_jet_program(full, case.program, case.ctx, seeds)
            b = eval_jet_program(restricted, case.program, case.ctx, seeds)
            keep = lambda j: JetVector.from_mapping(
                shape, {c: j[c] for c in RESTRICTED22_COORDS}, fill=math.nan
            )
            reps.append(O.compare_jets(keep(a), keep(b), RESTRICTED_TOL))
        yield CaseResult("restricted22-vs-full", case.name, "(2,2)'", *_merge(reps))


def check_mixed_partials(seed: int = SEED, tol: float = 1e-3):
    rng = np.random.default_rng(seed + 3)
    for name in MIXED_PARTIAL_PROGRAMS:
        ctx, program = mixed_partial_case(name)
        p = rng.uniform(-2.0, 2.0, 2)
        rec = O.mixed_partial_recovery_12(program, ctx, p)
        fd = O.fd_mixed_partial(program, ctx, p)
        ok = O.close(rec, fd, tol, 1e-6)
        yield CaseResult("mixed-partial-recovery", name, "(1,2)", ok, O.rel_err(rec, fd),
                         f"recovered {rec!r}, fd {fd!r}")


def run_selftest(seed: int = SEED, n_points: int = N_POINTS) -> SelftestReport:
    report = SelftestReport()
    report.results.extend(check_fd(seed, n_points))
    report.results.extend(check_iterated(seed, n_points))
    report.results.extend(check_restricted22(seed, n_points))
    report.results.extend(check_mixed_partials(seed))
    return report
