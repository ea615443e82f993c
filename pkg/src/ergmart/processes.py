"""The two unified double-index processes and their convergence diagnostics.

A martingale-ergodic evaluation conditions an ergodic (possibly weighted,
possibly multiparameter) average on a filtration stage; an ergodic-martingale
evaluation averages a conditioned observable. Both share one limit object in
the unweighted case: the orbit average conditioned on the stabilized stage.
On a finite space pointwise-everywhere convergence coincides with a.e.
convergence, so the sup-norm error column of a trace witnesses the pointwise
claims and the L_p column the norm claims.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .averages import (
    BesicovitchWeights,
    MultiParamSpec,
    composite_cond_expect,
    ergodic_average,
    ergodic_limit,
    weighted_average,
)
from .measure import Filtration
from .observables import NormSpec, VectorObservable, linf_norm, lp_norm, mean
from .operators import Endomorphism, orbit_lcm

__all__ = [
    "MARTINGALE_ERGODIC",
    "ERGODIC_MARTINGALE",
    "ProcessSpec",
    "TraceRow",
    "ConvergenceTrace",
    "MeanIdentityReport",
    "evaluate",
    "limit_target",
    "convergence_trace",
    "mean_identity_check",
    "stabilization_periods",
    "stabilized_reference",
    "tail_variation",
    "default_n1_grid",
]

MARTINGALE_ERGODIC = "martingale_ergodic"
ERGODIC_MARTINGALE = "ergodic_martingale"

_TOL = 1e-12


@dataclass(frozen=True, eq=False, repr=False)
class ProcessSpec:
    """One process instance: observable, maps, filtrations, optional weights."""

    kind: str
    f: VectorObservable
    maps: tuple[Endomorphism, ...]
    filtrations: tuple[Filtration, ...]
    weights: tuple[BesicovitchWeights, ...] | None = None
    norm: NormSpec = NormSpec()

    def __post_init__(self):
        if self.kind not in (MARTINGALE_ERGODIC, ERGODIC_MARTINGALE):
            raise ValueError(f"unknown process kind {self.kind!r}")
        maps = tuple(self.maps)
        filts = tuple(self.filtrations)
        if not maps or not filts:
            raise ValueError("need at least one map and one filtration")
        space = self.f.space
        for t in maps:
            if t.space != space:
                raise ValueError("maps must share the observable's space")
        for fl in filts:
            if fl.space != space:
                raise ValueError("filtrations must share the observable's space")
        if self.weights is not None:
            weights = tuple(self.weights)
            if len(weights) != len(maps):
                raise ValueError("one weight sequence per map")
            object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "filtrations", filts)

    @classmethod
    def single(cls, kind: str, f: VectorObservable, t: Endomorphism, fl: Filtration,
               weights: BesicovitchWeights | None = None,
               norm: NormSpec = NormSpec()) -> "ProcessSpec":
        w = (weights,) if weights is not None else None
        return cls(kind, f, (t,), (fl,), w, norm)

    @classmethod
    def multi(cls, kind: str, f: VectorObservable, mp: MultiParamSpec,
              norm: NormSpec = NormSpec()) -> "ProcessSpec":
        ws = mp.weight_seqs
        if all(w is None for w in ws):
            weights = None
        else:
            weights = tuple(w if w is not None else BesicovitchWeights.constant(1.0)
                            for w in ws)
        return cls(kind, f, mp.maps, mp.filtrations, weights, norm)

    @property
    def space(self):
        return self.f.space

    @property
    def d_maps(self) -> int:
        return len(self.maps)

    @property
    def m_filtrations(self) -> int:
        return len(self.filtrations)

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def orbit_lcms(self) -> tuple[int, ...]:
        return tuple(orbit_lcm(t) for t in self.maps)

    def __repr__(self):
        return (f"ProcessSpec({self.kind}, maps={self.d_maps}, "
                f"filtrations={self.m_filtrations}, weighted={self.is_weighted})")


def _normalize_counts(spec: ProcessSpec, n1) -> tuple[int, ...]:
    if isinstance(n1, (int, np.integer)):
        n_vec = (int(n1),) * spec.d_maps
    else:
        n_vec = tuple(int(v) for v in n1)
    if len(n_vec) != spec.d_maps:
        raise ValueError("n1 must give one count per map")
    if any(v < 1 for v in n_vec):
        raise ValueError("averaging lengths must be positive")
    return n_vec


def _normalize_stages(spec: ProcessSpec, n2) -> tuple[int, ...]:
    if isinstance(n2, (int, np.integer)):
        s_vec = (int(n2),) * spec.m_filtrations
    else:
        s_vec = tuple(int(v) for v in n2)
    if len(s_vec) != spec.m_filtrations:
        raise ValueError("n2 must give one stage index per filtration")
    for k, (fl, s) in enumerate(zip(spec.filtrations, s_vec)):
        if not 0 <= s < len(fl.stages):
            raise ValueError(f"stage index {s} out of range for filtration {k}")
    return s_vec


def _apply_averages(spec: ProcessSpec, g: VectorObservable,
                    n_vec: tuple[int, ...]) -> VectorObservable:
    out = g
    for j in reversed(range(spec.d_maps)):
        if spec.weights is None:
            out = ergodic_average(out, spec.maps[j], n_vec[j])
        else:
            out = weighted_average(out, spec.maps[j], spec.weights[j], n_vec[j])
    return out


def evaluate(spec: ProcessSpec, n1, n2) -> VectorObservable:
    """Process value at averaging length(s) n1 and filtration stage(s) n2.

    Integers broadcast across all maps / filtrations; sequences address the
    axes individually.
    """
    n_vec = _normalize_counts(spec, n1)
    s_vec = _normalize_stages(spec, n2)
    if spec.kind == MARTINGALE_ERGODIC:
        avg = _apply_averages(spec, spec.f, n_vec)
        return composite_cond_expect(avg, spec.filtrations, s_vec)
    g = composite_cond_expect(spec.f, spec.filtrations, s_vec)
    return _apply_averages(spec, g, n_vec)


def limit_target(spec: ProcessSpec) -> VectorObservable:
    """Closed-form limit for unweighted (or constant-weight) specs.

    The two kinds genuinely have different limits whenever orbit averaging and
    conditioning fail to commute: averaging first and conditioning last
    converges to the conditioned orbit average, while conditioning first
    converges to the orbit average of the conditioned observable. The target
    composes the two exact operators in the same order as the process. For
    nonconstant weights no closed form is available and the
    trace-stabilization route applies instead.
    """
    scale = 1.0
    if spec.weights is not None:
        for w in spec.weights:
            if not w.is_constant:
                raise ValueError("no closed-form target; use trace stabilization")
            scale *= w.constant_value
    last = tuple(len(fl.stages) - 1 for fl in spec.filtrations)
    if spec.kind == MARTINGALE_ERGODIC:
        g = spec.f
        for t in reversed(spec.maps):
            g = ergodic_limit(g, t)
        out = composite_cond_expect(g, spec.filtrations, last)
    else:
        g = composite_cond_expect(spec.f, spec.filtrations, last)
        for t in reversed(spec.maps):
            g = ergodic_limit(g, t)
        out = g
    if scale != 1.0:
        out = scale * out
    return out


@dataclass(frozen=True)
class TraceRow:
    n1: int
    n2: int
    lp_error: float
    sup_error: float


@dataclass(frozen=True, eq=False, repr=False)
class ConvergenceTrace:
    """Double-index error grid against a fixed target observable."""

    rows: tuple[TraceRow, ...]
    n1_grid: tuple[int, ...]
    n2_grid: tuple[int, ...]
    p: float
    target_description: str

    def __post_init__(self):
        for name, grid in (("n1_grid", self.n1_grid), ("n2_grid", self.n2_grid)):
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        for row in self.rows:
            if row.lp_error < 0 or row.sup_error < 0:
                raise ValueError("errors must be nonnegative")

    def final_row(self) -> TraceRow:
        return self.rows[-1]

    def __repr__(self):
        return f"ConvergenceTrace(rows={len(self.rows)}, target={self.target_description!r})"


def convergence_trace(spec: ProcessSpec, n1_grid: Sequence[int], n2_grid: Sequence[int],
                      p: float = 2.0, reference: VectorObservable | None = None,
                      ) -> ConvergenceTrace:
    """Errors of evaluate(spec, n1, n2) against the limit (or a supplied
    reference) over the rectangular grid; n1-major row order."""
    n1_grid = tuple(int(v) for v in n1_grid)
    n2_grid = tuple(int(v) for v in n2_grid)
    if reference is None:
        target = limit_target(spec)
        desc = "closed-form limit (conditioned orbit average)"
    else:
        target = reference
        desc = "caller-supplied reference"
    rows = []
    for n1 in n1_grid:
        for n2 in n2_grid:
            diff = evaluate(spec, n1, n2) - target
            rows.append(TraceRow(
                n1=n1, n2=n2,
                lp_error=lp_norm(diff, p, spec.norm),
                sup_error=linf_norm(diff, spec.norm),
            ))
    return ConvergenceTrace(tuple(rows), n1_grid, n2_grid, p, desc)


@dataclass(frozen=True)
class MeanIdentityReport:
    mean_input: tuple[float, ...]
    mean_target: tuple[float, ...]
    max_mean_gap: float
    norm_rows: tuple[tuple[float, float, float, bool], ...]  # (p, lhs, rhs, ok)
    passed: bool


def mean_identity_check(spec: ProcessSpec) -> MeanIdentityReport:
    """Checks that the limit keeps the expectation of f and contracts |.|_p
    for p in {1, 2, 3}."""
    target = limit_target(spec)
    m_in = mean(spec.f)
    m_out = mean(target)
    gap = float(np.max(np.abs(m_in - m_out)))
    norm_rows = []
    for p in (1.0, 2.0, 3.0):
        lhs = lp_norm(target, p, spec.norm)
        rhs = lp_norm(spec.f, p, spec.norm)
        norm_rows.append((p, lhs, rhs, lhs <= rhs + _TOL))
    passed = gap <= _TOL and all(r[3] for r in norm_rows)
    return MeanIdentityReport(
        mean_input=tuple(float(x) for x in m_in),
        mean_target=tuple(float(x) for x in m_out),
        max_mean_gap=gap,
        norm_rows=tuple(norm_rows),
        passed=passed,
    )


def stabilization_periods(spec: ProcessSpec) -> tuple[int, ...]:
    """Per-map period P_j after which the weighted Cesaro average repeats
    exactly: lcm of the orbit order and the weight period.

    Raises when some weight frequency is not recognizably rational.
    """
    periods = []
    for j, t in enumerate(spec.maps):
        base = orbit_lcm(t)
        if spec.weights is None:
            periods.append(base)
            continue
        wp = spec.weights[j].period
        if wp is None:
            raise ValueError("weight sequence has an irrational frequency; "
                             "no exact period is available")
        periods.append(math.lcm(base, wp))
    return tuple(periods)


def stabilized_reference(spec: ProcessSpec) -> VectorObservable:
    """Exact limit for rational-frequency weights: one full period of the
    weighted average (evaluated at the last stage of every filtration)."""
    periods = stabilization_periods(spec)
    last = tuple(len(fl.stages) - 1 for fl in spec.filtrations)
    return evaluate(spec, periods, last)


def tail_variation(spec: ProcessSpec, p: float = 2.0, n_periods: int = 8,
                   n2=None) -> float:
    """Max pairwise L_p distance between evaluations at period multiples in the
    final quarter of the grid k*P, k = 1..n_periods."""
    if n_periods < 4:
        raise ValueError("need at least 4 periods to form a tail")
    periods = stabilization_periods(spec)
    if n2 is None:
        n2 = tuple(len(fl.stages) - 1 for fl in spec.filtrations)
    tail_start = n_periods - max(1, n_periods // 4) + 1
    evals = []
    for k in range(tail_start, n_periods + 1):
        n_vec = tuple(k * pj for pj in periods)
        evals.append(evaluate(spec, n_vec, n2))
    worst = 0.0
    for a in range(len(evals)):
        for b in range(a + 1, len(evals)):
            worst = max(worst, lp_norm(evals[a] - evals[b], p, spec.norm))
    return worst


def default_n1_grid(order: int, factor: int = 4) -> tuple[int, ...]:
    """Doubling grid 1, 2, 4, ... capped by factor*order, plus the multiples
    of the order itself so the exact points are always present."""
    top = factor * order
    grid = {1}
    v = 1
    while v < top:
        v *= 2
        grid.add(min(v, top))
    grid.update(k * order for k in range(1, factor + 1))
    return tuple(sorted(grid))
