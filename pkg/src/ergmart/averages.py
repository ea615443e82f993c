"""Cesaro averages, orbit limits, cosine weight sequences, and their
multiparameter combinations.

Weight sequences are real cosine polynomials a_i = sum_k amp_k *
cos(2 pi freq_k i + phase_k). When a frequency is recognized as rational
a/b the term is evaluated through the reduced index i mod b, which makes the
sequence exactly periodic in floating point as well; the stabilization
criteria downstream rely on that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .measure import Filtration
from .observables import VectorObservable
from .operators import Endomorphism, cond_expect, cycles

__all__ = [
    "BesicovitchWeights",
    "MultiParamSpec",
    "ergodic_average",
    "ergodic_limit",
    "besicovitch_defect",
    "weighted_average",
    "multi_average",
    "composite_cond_expect",
]

_RATIONAL_TOL = 1e-12
_MAX_DENOM = 4096


def _reduce_frequency(freq: float) -> tuple[int, int] | None:
    """(numerator, denominator) when freq is recognizably rational, else None."""
    fr = Fraction(freq).limit_denominator(_MAX_DENOM)
    if abs(float(fr) - freq) <= _RATIONAL_TOL:
        return fr.numerator % fr.denominator if fr.denominator > 1 else 0, fr.denominator
    return None


@dataclass(frozen=True, eq=False, repr=False)
class BesicovitchWeights:
    """Bounded weight sequence generated by a cosine polynomial."""

    terms: tuple[tuple[float, float, float], ...]
    amplitude_bound: float = field(init=False)

    def __post_init__(self):
        terms = tuple((float(a), float(fq), float(ph)) for a, fq, ph in self.terms)
        if not terms:
            raise ValueError("at least one (amplitude, frequency, phase) term is required")
        for _, fq, _ in terms:
            if not 0.0 <= fq < 1.0:
                raise ValueError("frequencies must lie in [0, 1)")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "amplitude_bound", float(sum(abs(a) for a, _, _ in terms)))
        object.__setattr__(self, "_reduced", tuple(_reduce_frequency(fq) for _, fq, _ in terms))

    @classmethod
    def constant(cls, value: float = 1.0) -> "BesicovitchWeights":
        return cls(((value, 0.0, 0.0),))

    @classmethod
    def single_cosine(cls, amplitude: float, numer: int, denom: int,
                      phase: float = 0.0) -> "BesicovitchWeights":
        """One cosine term with exactly rational frequency numer/denom."""
        if denom < 1 or not 0 <= numer < denom:
            raise ValueError("need 0 <= numer < denom")
        return cls(((amplitude, numer / denom, phase),))

    def values(self, n: int, term_subset: Sequence[int] | None = None) -> np.ndarray:
        """First n weights; `term_subset` restricts to the chosen terms."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        idx = range(len(self.terms)) if term_subset is None else term_subset
        i = np.arange(n, dtype=np.int64)
        out = np.zeros(n)
        for k in idx:
            amp, freq, phase = self.terms[k]
            reduced = self._reduced[k]
            if reduced is not None:
                num, den = reduced
                angle = 2.0 * math.pi * num * (i % den) / den + phase
            else:
                angle = 2.0 * math.pi * freq * i + phase
            out += amp * np.cos(angle)
        return out

    def sup_abs(self, horizon: int) -> float:
        """Observed sup of |a_i| over i < horizon."""
        if horizon < 1:
            raise ValueError("horizon must be positive")
        return float(np.abs(self.values(horizon)).max())

    @property
    def is_constant(self) -> bool:
        return all(fq == 0.0 for _, fq, _ in self.terms)

    @property
    def constant_value(self) -> float:
        if not self.is_constant:
            raise ValueError("weights are not constant")
        return float(sum(a * math.cos(ph) for a, _, ph in self.terms))

    @property
    def period(self) -> int | None:
        """Common period when every frequency is rational, else None."""
        dens = []
        for red in self._reduced:
            if red is None:
                return None
            dens.append(red[1])
        return math.lcm(*dens)

    def __repr__(self):
        return f"BesicovitchWeights(terms={len(self.terms)}, bound={self.amplitude_bound:g})"


@dataclass(frozen=True, eq=False, repr=False)
class MultiParamSpec:
    """Bundle of d maps, their weight sequences, and m filtrations on one space."""

    maps: tuple[Endomorphism, ...]
    weight_seqs: tuple[BesicovitchWeights | None, ...]
    filtrations: tuple[Filtration, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        filts = tuple(self.filtrations)
        if not maps or not filts:
            raise ValueError("need at least one map and one filtration")
        weights = tuple(self.weight_seqs) if self.weight_seqs is not None else (None,) * len(maps)
        if len(weights) != len(maps):
            raise ValueError("one weight sequence (or None) per map")
        space = maps[0].space
        for t in maps:
            if t.space != space:
                raise ValueError("all maps must share one space")
        for fl in filts:
            if fl.space != space:
                raise ValueError("all filtrations must share the maps' space")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "weight_seqs", weights)
        object.__setattr__(self, "filtrations", filts)

    @property
    def space(self):
        return self.maps[0].space

    def __repr__(self):
        return f"MultiParamSpec(maps={len(self.maps)}, filtrations={len(self.filtrations)})"


def running_weighted_averages(arr: np.ndarray, t: Endomorphism,
                              alphas: np.ndarray | None, n: int) -> np.ndarray:
    """Stack of the first n weighted Cesaro averages along a new leading axis.

    `arr` has shape (..., N, dim); output[k] = (1/(k+1)) sum_{i<=k} a_i T^i arr.
    With alphas None the weights are identically one.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = np.empty((n,) + arr.shape)
    cur = np.asarray(arr, dtype=float)
    acc = cur * alphas[0] if alphas is not None else cur.copy()
    out[0] = acc
    for i in range(1, n):
        cur = np.take(cur, t.map, axis=-2)
        acc = acc + (cur * alphas[i] if alphas is not None else cur)
        out[i] = acc
    counts = np.arange(1, n + 1, dtype=float).reshape((n,) + (1,) * arr.ndim)
    out /= counts
    return out


def _cesaro(values: np.ndarray, t: Endomorphism, alphas: np.ndarray | None,
            n: int) -> np.ndarray:
    acc = values * alphas[0] if alphas is not None else values.copy()
    cur = values
    for i in range(1, n):
        cur = cur[t.map]
        acc = acc + (cur * alphas[i] if alphas is not None else cur)
    return acc / n


def ergodic_average(f: VectorObservable, t: Endomorphism, n: int) -> VectorObservable:
    """(1/n) sum_{i<n} f o tau^i, computed by iterating the orbit."""
    if f.space != t.space:
        raise ValueError("observable and map live on different spaces")
    if n < 1:
        raise ValueError("n must be positive")
    return VectorObservable(f.space, _cesaro(f.values, t, None, n))


def ergodic_limit(f: VectorObservable, t: Endomorphism) -> VectorObservable:
    """Exact Cesaro limit: the mass-weighted mean on each orbit of tau."""
    if f.space != t.space:
        raise ValueError("observable and map live on different spaces")
    mu = f.space.weights
    out = np.empty_like(f.values)
    for cyc in cycles(t):
        m = mu[cyc]
        out[cyc] = (m[:, None] * f.values[cyc]).sum(axis=0) / m.sum()
    return VectorObservable(f.space, out)


def besicovitch_defect(w: BesicovitchWeights, poly_terms: Sequence[int], n: int) -> float:
    """Cesaro l1 distance (1/n) sum_{i<n} |a_i - phi(i)| against the partial
    cosine polynomial built from the chosen term indices."""
    if n < 1:
        raise ValueError("n must be positive")
    for k in poly_terms:
        if not 0 <= k < len(w.terms):
            raise ValueError(f"term index {k} out of range")
    full = w.values(n)
    part = w.values(n, term_subset=poly_terms)
    return float(np.abs(full - part).mean())


def weighted_average(f: VectorObservable, t: Endomorphism, w: BesicovitchWeights,
                     n: int) -> VectorObservable:
    """(1/n) sum_{i<n} a_i * (f o tau^i)."""
    if f.space != t.space:
        raise ValueError("observable and map live on different spaces")
    if n < 1:
        raise ValueError("n must be positive")
    return VectorObservable(f.space, _cesaro(f.values, t, w.values(n), n))


def multi_average(f: VectorObservable, spec: MultiParamSpec,
                  n_vec: Sequence[int]) -> VectorObservable:
    """Multiparameter weighted average over the product index box.

    The written operator order T_1^{k_1} ... T_d^{k_d} applies T_d first; by
    linearity the box sum factors into nested one-parameter averages, which
    is what is computed (O(sum n_j) instead of O(prod n_j) operator steps).
    """
    if f.space != spec.space:
        raise ValueError("observable and spec live on different spaces")
    n_vec = tuple(int(n) for n in n_vec)
    if len(n_vec) != len(spec.maps):
        raise ValueError("n_vec must supply one count per map")
    if any(n < 1 for n in n_vec):
        raise ValueError("all counts must be positive")
    out = f
    for j in reversed(range(len(spec.maps))):
        w = spec.weight_seqs[j]
        if w is None:
            out = ergodic_average(out, spec.maps[j], n_vec[j])
        else:
            out = weighted_average(out, spec.maps[j], w, n_vec[j])
    return out


def composite_cond_expect(f: VectorObservable, filtrations: Sequence[Filtration],
                          s_vec: Sequence[int]) -> VectorObservable:
    """Composition of one conditional expectation per filtration.

    The first filtration is the outermost factor, so the last one is applied
    first; conditional expectations for different filtrations do not commute
    in general, so the order is fixed here and relied on everywhere else.
    """
    filtrations = tuple(filtrations)
    s_vec = tuple(int(s) for s in s_vec)
    if len(s_vec) != len(filtrations):
        raise ValueError("s_vec must supply one stage index per filtration")
    for k, (fl, s) in enumerate(zip(filtrations, s_vec)):
        if not 0 <= s < len(fl.stages):
            raise ValueError(f"stage index {s} out of range for filtration {k}")
    out = f
    for k in reversed(range(len(filtrations))):
        out = cond_expect(out, filtrations[k].stages[s_vec[k]])
    return out
