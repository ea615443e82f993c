"""Dominant and maximal inequality evaluation over truncated index boxes.

Every bound compares the L_p norm (or a level-set mass) of the pointwise sup
of a process over a finite index box against an explicit constant times
|f|_p. Truncating the sup only lowers the left side, so each report is a
sound necessary-condition check of the corresponding infinite-index bound.

Constant catalog (see the README table):
  Thm2.4 / Thm3.4   dominant, single parameter       (p/(p-1))^2
  Thm2.5 / Thm3.5   maximal,  single parameter       (p/(p-1))^p
  Thm4.1 / Thm4.2   dominant, weighted               alpha (p/(p-1))^2
  Thm4.1 / Thm4.2   maximal,  weighted               alpha (p/(p-1))^p
  Thm4.3 / Thm4.4   dominant, multiparameter         alpha (p/(p-1))^(d+p+1)
  Thm4.3            maximal,  multiparameter         alpha^p (p/(p-1))^(p d)
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .averages import running_weighted_averages
from .measure import DECREASING
from .observables import VectorObservable, llog_norm, lp_norm
from .operators import averaging_matrix
from .processes import MARTINGALE_ERGODIC, ProcessSpec

__all__ = [
    "SupBox",
    "default_box",
    "shrink_box",
    "InequalityReport",
    "OrliczReport",
    "sup_field",
    "dominant_check",
    "maximal_check",
    "epsilon_sweep",
    "dominant_constant",
    "maximal_constant",
    "effective_weight_bound",
    "orlicz_class_report",
]

_TOL = 1e-12


@dataclass(frozen=True)
class SupBox:
    """Finite truncation of the index set: per-map averaging lengths 1..n_max
    and an explicit ascending stage subset per filtration."""

    n_max: tuple[int, ...]
    stage_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n_max = tuple(int(v) for v in self.n_max)
        if not n_max or any(v < 1 for v in n_max):
            raise ValueError("n_max entries must be positive")
        sets = tuple(tuple(int(s) for s in ss) for ss in self.stage_sets)
        if not sets:
            raise ValueError("at least one stage set is required")
        for ss in sets:
            if not ss or any(b <= a for a, b in zip(ss, ss[1:])):
                raise ValueError("stage sets must be nonempty and strictly ascending")
        object.__setattr__(self, "n_max", n_max)
        object.__setattr__(self, "stage_sets", sets)

    def describe(self) -> dict:
        return {"n_max": list(self.n_max), "stages": [list(s) for s in self.stage_sets]}


def default_box(spec: ProcessSpec, n_factor: int = 4) -> SupBox:
    """n up to n_factor times each map's order, all stages of each filtration."""
    n_max = tuple(max(1, n_factor * L) for L in spec.orbit_lcms())
    stage_sets = tuple(tuple(range(len(fl.stages))) for fl in spec.filtrations)
    return SupBox(n_max, stage_sets)


def shrink_box(box: SupBox, factor: float) -> SupBox:
    """Prefix truncation: scales the n ranges and keeps a stage prefix."""
    if not 0 < factor <= 1:
        raise ValueError("factor must be in (0, 1]")
    n_max = tuple(max(1, int(math.ceil(v * factor))) for v in box.n_max)
    stage_sets = tuple(ss[: max(1, int(math.ceil(len(ss) * factor)))]
                       for ss in box.stage_sets)
    return SupBox(n_max, stage_sets)


def _validate_box(spec: ProcessSpec, box: SupBox):
    if len(box.n_max) != spec.d_maps:
        raise ValueError("box must give one n_max per map")
    if len(box.stage_sets) != spec.m_filtrations:
        raise ValueError("box must give one stage set per filtration")
    for k, (fl, ss) in enumerate(zip(spec.filtrations, box.stage_sets)):
        if ss[-1] >= len(fl.stages):
            raise ValueError(f"stage index {ss[-1]} out of range for filtration {k}")


def _composed_matrices(spec: ProcessSpec, box: SupBox) -> list[np.ndarray]:
    """One composed conditional-expectation matrix per stage combination,
    ordered by itertools.product over the box's stage sets; the first
    filtration is the outermost factor."""
    per_filtration = []
    for fl, ss in zip(spec.filtrations, box.stage_sets):
        per_filtration.append({s: averaging_matrix(fl.stages[s]) for s in ss})
    out = []
    for combo in itertools.product(*box.stage_sets):
        mat = None
        for k, s in enumerate(combo):
            m = per_filtration[k][s]
            mat = m if mat is None else mat @ m
        out.append(mat)
    return out


def _alphas(spec: ProcessSpec, box: SupBox) -> list[np.ndarray | None]:
    if spec.weights is None:
        return [None] * spec.d_maps
    return [w.values(k) for w, k in zip(spec.weights, box.n_max)]


def _norm_table(spec: ProcessSpec, box: SupBox) -> np.ndarray:
    """Pointwise process norms over the whole box.

    Shape (S, K_1, ..., K_d, N) where S runs over stage combinations in
    itertools.product order and K_j over averaging lengths 1..n_max[j].
    """
    _validate_box(spec, box)
    n = spec.space.size
    alphas = _alphas(spec, box)
    mats = _composed_matrices(spec, box)
    if spec.kind == MARTINGALE_ERGODIC:
        arr = spec.f.values
        for j in reversed(range(spec.d_maps)):
            arr = running_weighted_averages(arr, spec.maps[j], alphas[j], box.n_max[j])
        k_shape = arr.shape[:-2]
        flat = arr.reshape(-1, n, spec.f.dim)
        tabs = []
        for mat in mats:
            vals = np.matmul(mat, flat)
            tabs.append(_batch_norms(vals, spec.norm.q).reshape(k_shape + (n,)))
        return np.stack(tabs)
    # ergodic-martingale: condition first, then average the whole stack
    stack = np.stack([mat @ spec.f.values for mat in mats])  # (S, N, dim)
    arr = stack
    for j in reversed(range(spec.d_maps)):
        arr = running_weighted_averages(arr, spec.maps[j], alphas[j], box.n_max[j])
    tab = _batch_norms(arr, spec.norm.q)  # (K_1, ..., K_d, S, N)
    return np.moveaxis(tab, -2, 0)


def _batch_norms(values: np.ndarray, q: float) -> np.ndarray:
    if values.shape[-1] == 1:
        return np.abs(values[..., 0])
    a = np.abs(values)
    if math.isinf(q):
        return a.max(axis=-1)
    if q == 1.0:
        return a.sum(axis=-1)
    if q == 2.0:
        return np.sqrt((values * values).sum(axis=-1))
    return (a**q).sum(axis=-1) ** (1.0 / q)


def sup_field(spec: ProcessSpec, box: SupBox | None = None) -> VectorObservable:
    """Pointwise max of the process norms over the box; a lower bound for the
    untruncated sup, monotone under box enlargement."""
    if box is None:
        box = default_box(spec)
    tab = _norm_table(spec, box)
    field = tab.max(axis=tuple(range(tab.ndim - 1)))
    return VectorObservable(spec.space, field)


def effective_weight_bound(spec: ProcessSpec, box: SupBox) -> tuple[float, float]:
    """(observed, envelope) weight bound: observed sup |a_i| over the box
    horizon and the analytic envelope sum |amp|; the larger goes into the
    constants so a bound is never understated."""
    if spec.weights is None:
        return 1.0, 1.0
    observed = max(w.sup_abs(k) for w, k in zip(spec.weights, box.n_max))
    envelope = max(w.amplitude_bound for w in spec.weights)
    return observed, envelope


def _is_multi(spec: ProcessSpec) -> bool:
    return spec.d_maps > 1 or spec.m_filtrations > 1


def dominant_constant(p: float, *, weighted: bool = False, multi: bool = False,
                      alpha: float = 1.0, d_maps: int = 1) -> float:
    """Catalog constant for the dominant (L_p of the sup) bound."""
    if p <= 1.0:
        raise ValueError("dominant bounds need p > 1")
    base = p / (p - 1.0)
    if multi:
        if p != int(p):
            raise ValueError("the multiparameter dominant bound requires integer p")
        return alpha * base ** (d_maps + p + 1)
    return (alpha if weighted else 1.0) * base * base


def maximal_constant(p: float, *, weighted: bool = False, multi: bool = False,
                     alpha: float = 1.0, d_maps: int = 1) -> float:
    """Catalog constant for the maximal (level-set mass) bound."""
    if p <= 1.0:
        raise ValueError("maximal bounds need p > 1")
    base = p / (p - 1.0)
    if multi:
        if p != int(p):
            raise ValueError("the multiparameter maximal bound requires integer p")
        return alpha**p * base ** (p * d_maps)
    return (alpha if weighted else 1.0) * base**p


@dataclass(frozen=True)
class InequalityReport:
    theorem_tag: str
    lhs: float
    rhs: float
    constant: float
    p: float
    epsilon: float | None
    satisfied: bool
    margin: float
    truncation: SupBox
    alpha: float

    def __post_init__(self):
        if self.constant <= 0:
            raise ValueError("constant must be positive")
        if self.satisfied != (self.lhs <= self.rhs + _TOL):
            raise ValueError("satisfied flag inconsistent with lhs/rhs")


def _theorem_tag(spec: ProcessSpec, flavor: str) -> str:
    me = spec.kind == MARTINGALE_ERGODIC
    if _is_multi(spec):
        tag = "Thm4.3" if me else "Thm4.4"
    elif spec.is_weighted:
        tag = "Thm4.1" if me else "Thm4.2"
    else:
        if flavor == "dominant":
            return "Thm2.4" if me else "Thm3.4"
        return "Thm2.5" if me else "Thm3.5"
    return tag if flavor == "dominant" else f"{tag}-maximal"


def _require_direction(spec: ProcessSpec):
    if spec.kind == MARTINGALE_ERGODIC:
        bad = [k for k, fl in enumerate(spec.filtrations) if fl.direction != DECREASING]
        if bad:
            raise ValueError(
                "the martingale-ergodic bounds require decreasing filtrations "
                f"(filtration {bad[0]} is increasing)")


def _alpha_for_constants(spec: ProcessSpec, box: SupBox) -> float:
    observed, envelope = effective_weight_bound(spec, box)
    return max(observed, envelope)


def dominant_check(spec: ProcessSpec, p: float, box: SupBox | None = None) -> InequalityReport:
    """|  sup-of-process-norms  |_p <= C(p, variant) |f|_p over the box."""
    if not p > 1.0:
        raise ValueError("p must be > 1")
    _require_direction(spec)
    if box is None:
        box = default_box(spec)
    else:
        _validate_box(spec, box)
    alpha = _alpha_for_constants(spec, box)
    const = dominant_constant(p, weighted=spec.is_weighted, multi=_is_multi(spec),
                              alpha=alpha, d_maps=spec.d_maps)
    field = sup_field(spec, box)
    lhs = lp_norm(field, p, spec.norm)
    rhs = const * lp_norm(spec.f, p, spec.norm)
    return InequalityReport(
        theorem_tag=_theorem_tag(spec, "dominant"),
        lhs=lhs, rhs=rhs, constant=const, p=p, epsilon=None,
        satisfied=lhs <= rhs + _TOL, margin=rhs - lhs,
        truncation=box, alpha=alpha,
    )


def maximal_check(spec: ProcessSpec, p: float, epsilon: float,
                  box: SupBox | None = None) -> InequalityReport:
    """mu{ sup >= epsilon } <= C(p, variant) |f|_p^p / epsilon^p over the box."""
    reports = epsilon_sweep(spec, p, [epsilon], box)
    return reports[0]


def epsilon_sweep(spec: ProcessSpec, p: float, eps_grid: Sequence[float],
                  box: SupBox | None = None) -> list[InequalityReport]:
    """One maximal report per epsilon (ascending grid); the sup field is
    computed once and the level-set masses nest."""
    if not p > 1.0:
        raise ValueError("p must be > 1")
    _require_direction(spec)
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid or any(e <= 0 for e in eps_grid):
        raise ValueError("epsilon grid must be nonempty and positive")
    if any(b <= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("epsilon grid must be ascending")
    if spec.kind != MARTINGALE_ERGODIC and _is_multi(spec):
        raise ValueError("no maximal bound is available for the multiparameter "
                         "ergodic-martingale process")
    if box is None:
        box = default_box(spec)
    else:
        _validate_box(spec, box)
    alpha = _alpha_for_constants(spec, box)
    const = maximal_constant(p, weighted=spec.is_weighted, multi=_is_multi(spec),
                             alpha=alpha, d_maps=spec.d_maps)
    field = sup_field(spec, box).values[:, 0]
    mu = spec.space.weights
    fnorm_p = lp_norm(spec.f, p, spec.norm) ** p
    tag = _theorem_tag(spec, "maximal")
    out = []
    for eps in eps_grid:
        lhs = float(mu[field >= eps].sum())
        rhs = const * fnorm_p / eps**p
        out.append(InequalityReport(
            theorem_tag=tag, lhs=lhs, rhs=rhs, constant=const, p=p, epsilon=eps,
            satisfied=lhs <= rhs + _TOL, margin=rhs - lhs,
            truncation=box, alpha=alpha,
        ))
    return out


@dataclass(frozen=True)
class OrliczReport:
    """Log-regularized functionals on both sides of the integrability claim.

    On a finite space both functionals are always finite, so this is recorded
    for visibility and never asserted as a discriminating test.
    """

    m: int
    input_functional: float     # of f, with exponent m + 2
    sup_functional: float       # of the sup field, with exponent m
    both_finite: bool
    truncation: SupBox


def orlicz_class_report(spec: ProcessSpec, m: int, box: SupBox | None = None) -> OrliczReport:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if box is None:
        box = default_box(spec)
    fin = llog_norm(spec.f, m + 2, spec.norm)
    fsup = llog_norm(sup_field(spec, box), m, spec.norm)
    return OrliczReport(
        m=m, input_functional=fin, sup_functional=fsup,
        both_finite=bool(np.isfinite(fin) and np.isfinite(fsup)),
        truncation=box,
    )
