"""Measure-preserving maps, composition operators, and conditional expectation.

On a fully supported finite space a measure-preserving self-map is forced to
be a permutation whose preimage masses match exactly; the constructor checks
mu(preimage of y) = mu(y) directly and rejects anything else. Conditional
expectation with respect to a partition is block averaging, which is exact up
to float rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .measure import MeasureSpace, Partition
from .observables import NormSpec, VectorObservable, lp_norm, linf_norm, point_norm_field

__all__ = [
    "Endomorphism",
    "identity_map",
    "cycle_map",
    "power",
    "cycles",
    "orbit_lcm",
    "koopman",
    "cond_expect",
    "averaging_matrix",
    "DominationReport",
    "ContractionReport",
    "check_positive_domination",
    "check_L1_Linf_contraction",
]

_TOL = 1e-12


@dataclass(frozen=True, eq=False, repr=False)
class Endomorphism:
    """Measure-preserving self-map tau, stored as map[i] = tau(i)."""

    space: MeasureSpace
    map: np.ndarray

    def __post_init__(self):
        arr = np.array(self.map, dtype=np.int64, copy=True).reshape(-1)
        n = self.space.size
        if arr.size != n:
            raise ValueError("map must assign an image to every point")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("map images must be points of the space")
        if not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValueError("map is not a permutation; a measure-preserving "
                             "map on a fully supported finite space must be one")
        mu = self.space.weights
        preimage_mass = np.bincount(arr, weights=mu, minlength=n)
        gap = np.max(np.abs(preimage_mass - mu) / np.maximum(np.abs(mu), 1.0))
        if gap > _TOL:
            raise ValueError(f"map does not preserve the measure (mass gap {gap:.3e})")
        arr.setflags(write=False)
        object.__setattr__(self, "map", arr)

    def __repr__(self):
        return f"Endomorphism(size={self.space.size})"


def identity_map(space: MeasureSpace) -> Endomorphism:
    return Endomorphism(space, np.arange(space.size))


def cycle_map(space: MeasureSpace) -> Endomorphism:
    """The full shift i -> i+1 mod N; needs orbit-constant masses."""
    n = space.size
    return Endomorphism(space, (np.arange(n) + 1) % n)


def power(t: Endomorphism, k: int) -> Endomorphism:
    """tau composed with itself k times (k >= 0)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = np.arange(t.space.size)
    for _ in range(k):
        out = t.map[out]
    return Endomorphism(t.space, out)


def cycles(t: Endomorphism) -> list[np.ndarray]:
    """Orbit decomposition of the permutation."""
    n = t.space.size
    seen = np.zeros(n, dtype=bool)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        nxt = int(t.map[start])
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = int(t.map[nxt])
        out.append(np.array(cyc, dtype=np.int64))
    return out


def orbit_lcm(t: Endomorphism) -> int:
    """Least common multiple of the cycle lengths (the order of tau)."""
    return math.lcm(*(len(c) for c in cycles(t)))


def koopman(f: VectorObservable, t: Endomorphism) -> VectorObservable:
    """Composition operator: output(w) = f(tau(w))."""
    if f.space != t.space:
        raise ValueError("observable and map live on different spaces")
    return VectorObservable(f.space, f.values[t.map])


def cond_expect(f: VectorObservable, part: Partition) -> VectorObservable:
    """Blockwise weighted average; constant on each block of the partition."""
    if f.space != part.space:
        raise ValueError("observable and partition live on different spaces")
    mu = f.space.weights
    lbl = part.block_of
    mass = np.bincount(lbl, weights=mu, minlength=part.block_count)
    out = np.empty_like(f.values)
    for k in range(f.dim):
        sums = np.bincount(lbl, weights=mu * f.values[:, k], minlength=part.block_count)
        out[:, k] = (sums / mass)[lbl]
    return VectorObservable(f.space, out)


def averaging_matrix(part: Partition) -> np.ndarray:
    """Dense N x N matrix M with (M g)(i) = block average of g at i."""
    mu = part.space.weights
    lbl = part.block_of
    mass = np.bincount(lbl, weights=mu, minlength=part.block_count)
    same = lbl[:, None] == lbl[None, :]
    return same * (mu[None, :] / mass[lbl][:, None])


@dataclass(frozen=True)
class DominationReport:
    """Per-sample slack of |T f|_X <= T'(|f|_X) plus positivity/L1 checks on T'."""

    passed: bool
    max_slack: float
    rows: tuple[dict, ...]


@dataclass(frozen=True)
class ContractionReport:
    passed: bool
    rows: tuple[dict, ...]


def check_positive_domination(
    apply_T: Callable[[VectorObservable], VectorObservable],
    apply_Tdom: Callable[[VectorObservable], VectorObservable],
    samples: Sequence[VectorObservable],
    ns: NormSpec = NormSpec(),
) -> DominationReport:
    """Sample-based necessary-condition check that T' positively dominates T.

    For each sample f it records max_w (|Tf(w)|_X - T'(|f|_X)(w)), verifies
    that T' keeps nonnegative scalar fields nonnegative, and that T'
    contracts the L1 norm.
    """
    rows = []
    worst = -math.inf
    for f in samples:
        tf = apply_T(f)
        norm_f = point_norm_field(f, ns)
        dom = apply_Tdom(norm_f)
        slack = float((point_norm_field(tf, ns).values[:, 0] - dom.values[:, 0]).max())
        positive = bool(dom.values.min() >= -_TOL)
        l1_in = lp_norm(norm_f, 1.0, ns)
        l1_out = lp_norm(dom, 1.0, ns)
        contracts = l1_out <= l1_in + _TOL
        ok = slack <= _TOL and positive and contracts
        rows.append({
            "max_slack": slack,
            "dominant_positive": positive,
            "dominant_l1_contracts": contracts,
            "ok": ok,
        })
        worst = max(worst, slack)
    return DominationReport(
        passed=all(r["ok"] for r in rows),
        max_slack=worst if rows else 0.0,
        rows=tuple(rows),
    )


def check_L1_Linf_contraction(
    apply_T: Callable[[VectorObservable], VectorObservable],
    samples: Sequence[VectorObservable],
    ns: NormSpec = NormSpec(),
) -> ContractionReport:
    """Checks |Tf|_1 <= |f|_1 and |Tf|_inf <= |f|_inf on each sample."""
    rows = []
    for f in samples:
        tf = apply_T(f)
        l1_in, l1_out = lp_norm(f, 1.0, ns), lp_norm(tf, 1.0, ns)
        li_in, li_out = linf_norm(f, ns), linf_norm(tf, ns)
        ok = l1_out <= l1_in + _TOL and li_out <= li_in + _TOL
        rows.append({
            "l1_in": l1_in, "l1_out": l1_out,
            "linf_in": li_in, "linf_out": li_out,
            "ok": ok,
        })
    return ContractionReport(passed=all(r["ok"] for r in rows), rows=tuple(rows))
