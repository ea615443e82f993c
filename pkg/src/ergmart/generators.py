"""Seeded random instance construction for fuzzing and the CLI.

All randomness flows through numpy's 64-bit seeded Generator so every
instance is reproducible from its seed. Measure-preserving maps are built as
permutations with masses constant along each orbit (which is exactly what
measure preservation forces on a fully supported finite space). Filtrations
are merge chains: starting from singletons, two uniformly chosen blocks are
merged per step, and a few snapshots form the decreasing chain; the reversed
list is the increasing variant.

Weight sequences are normalized to amplitude envelope <= 1. The weighted
maximal bounds scale as alpha^p on the left but only alpha (or alpha^p vs
alpha^{pd}) on the right, so they can only be expected to hold for bounded
sequences with sup |a_i| <= 1; the corpus stays inside that regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .averages import BesicovitchWeights, MultiParamSpec
from .measure import DECREASING, INCREASING, Filtration, MeasureSpace, Partition
from .observables import NormSpec, VectorObservable
from .operators import Endomorphism, power
from .processes import ERGODIC_MARTINGALE, MARTINGALE_ERGODIC, ProcessSpec

__all__ = [
    "random_cycle_system",
    "random_permutation",
    "random_partition",
    "random_filtration",
    "random_observable",
    "random_weights",
    "random_process_instance",
    "FAMILIES",
]

# cycle lengths with small pairwise lcm keep averaging horizons short
_CYCLE_LENGTHS = (1, 2, 3, 4, 6)


def random_cycle_system(rng: np.random.Generator, n_max: int = 64,
                        uniform: bool = False, lcm_cap: int = 12,
                        ) -> tuple[MeasureSpace, Endomorphism, int]:
    """Space plus a measure-preserving permutation with bounded order.

    Returns (space, map, order). Orbit masses are constant by construction;
    `uniform` forces equal masses everywhere.
    """
    lengths: list[int] = []
    total = 0
    order = 1
    while True:
        ln = int(rng.choice(_CYCLE_LENGTHS))
        if total + ln > n_max:
            if total >= 2:
                break
            continue
        if math.lcm(order, ln) > lcm_cap:
            continue
        lengths.append(ln)
        order = math.lcm(order, ln)
        total += ln
        if total >= n_max or (total >= 2 and rng.random() < 0.25):
            break
    n = total
    perm_points = rng.permutation(n)
    mapping = np.empty(n, dtype=np.int64)
    weights = np.empty(n)
    pos = 0
    for ln in lengths:
        pts = perm_points[pos:pos + ln]
        mapping[pts] = np.roll(pts, -1)
        w = 1.0 / n if uniform else float(rng.uniform(0.2, 2.0)) / n
        weights[pts] = w
        pos += ln
    space = MeasureSpace(weights)
    return space, Endomorphism(space, mapping), order


def random_permutation(rng: np.random.Generator, space: MeasureSpace) -> Endomorphism:
    """Uniform random permutation; valid only for uniform masses."""
    return Endomorphism(space, rng.permutation(space.size))


def random_partition(rng: np.random.Generator, space: MeasureSpace,
                     n_blocks: int) -> Partition:
    n = space.size
    n_blocks = max(1, min(n_blocks, n))
    labels = np.concatenate([np.arange(n_blocks), rng.integers(0, n_blocks, n - n_blocks)])
    return Partition(space, rng.permutation(labels))


def random_filtration(rng: np.random.Generator, space: MeasureSpace,
                      n_stages: int = 3, direction: str = DECREASING) -> Filtration:
    """Merge-chain filtration: singletons coarsened one uniform block pair at a
    time, snapshotted at n_stages distinct block counts.

    The singleton end and the one-block end each appear about half the time.
    """
    n = space.size
    n_stages = max(1, min(n_stages, n))
    counts: set[int] = set()
    if rng.random() < 0.5:
        counts.add(n)
    if rng.random() < 0.5 and len(counts) < n_stages:
        counts.add(1)
    while len(counts) < n_stages:
        counts.add(int(rng.integers(1, n + 1)))
    targets = sorted(counts, reverse=True)  # fine -> coarse
    labels = np.arange(n)
    live = list(range(n))
    stages: list[Partition] = []
    ti = 0
    for blocks in range(n, 0, -1):
        if ti < len(targets) and targets[ti] == blocks:
            stages.append(Partition(space, labels))
            ti += 1
        if blocks == 1:
            break
        i = int(rng.integers(0, len(live)))
        j = int(rng.integers(0, len(live) - 1))
        if j >= i:
            j += 1
        a, b = live[i], live[j]
        labels = np.where(labels == b, a, labels)
        live[j] = live[-1]
        live.pop()
    if direction == DECREASING:
        return Filtration(space, DECREASING, tuple(stages))
    return Filtration(space, INCREASING, tuple(reversed(stages)))


def random_observable(rng: np.random.Generator, space: MeasureSpace, dim: int,
                      style: str = "normal", scale: float = 1.0) -> VectorObservable:
    n = space.size
    if style == "normal":
        vals = rng.normal(0.0, scale, size=(n, dim))
    elif style == "spiky":
        vals = rng.normal(0.0, 0.05 * scale, size=(n, dim))
        k = int(rng.integers(0, n))
        vals[k] += rng.choice((-1.0, 1.0), size=dim) * scale * 20.0
    elif style == "mixed":
        vals = rng.normal(0.0, scale, size=(n, dim))
        hot = rng.random(n) < 0.1
        vals[hot] *= 10.0
    else:
        raise ValueError(f"unknown observable style {style!r}")
    return VectorObservable(space, vals)


def random_weights(rng: np.random.Generator, envelope: float = 1.0,
                   max_terms: int = 3, max_denom: int = 6) -> BesicovitchWeights:
    """Cosine polynomial with rational frequencies and sum |amp| <= envelope."""
    k = int(rng.integers(1, max_terms + 1))
    raw = rng.uniform(0.2, 1.0, k) * rng.choice((-1.0, 1.0), k)
    target = envelope * float(rng.uniform(0.3, 1.0))
    amps = raw * (target / np.abs(raw).sum())
    terms = []
    for amp in amps:
        den = int(rng.integers(1, max_denom + 1))
        num = int(rng.integers(0, den)) if den > 1 else 0
        phase = float(rng.choice((0.0, 0.25, 0.5, 1.0)) * math.pi)
        terms.append((float(amp), num / den, phase))
    return BesicovitchWeights(tuple(terms))


FAMILIES = ("single_me", "single_em", "weighted_me", "weighted_em",
            "multi_me", "multi_em")

# multiparameter maximal bounds carry alpha^p against alpha^{pd} on the other
# side, so the corpus keeps those envelopes well below one
_MULTI_ENVELOPE = 0.5


@dataclass(frozen=True)
class ProcessInstance:
    spec: ProcessSpec
    p: float
    seed: int
    family: str


def _pick_p(rng: np.random.Generator, integer_only: bool) -> float:
    if integer_only:
        return float(rng.choice((2.0, 3.0, 4.0)))
    return float(rng.choice((1.25, 1.5, 2.0, 3.0, 4.0)))


def random_process_instance(seed: int, family: str, n_max: int = 64,
                            dim_max: int = 4) -> ProcessInstance:
    """One seeded instance of the given family, ready for inequality checks."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    rng = np.random.default_rng(seed)
    multi = family.startswith("multi")
    weighted = family.startswith("weighted") or multi
    me = family.endswith("_me")
    kind = MARTINGALE_ERGODIC if me else ERGODIC_MARTINGALE

    space, tau, order = random_cycle_system(rng, n_max=n_max,
                                            lcm_cap=8 if multi else 12)
    dim = int(rng.integers(1, dim_max + 1))
    style = "spiky" if rng.random() < 0.25 else ("mixed" if rng.random() < 0.3 else "normal")
    f = random_observable(rng, space, dim, style=style)
    q = float(rng.choice((1.0, 2.0, math.inf)))
    norm = NormSpec(q)
    p = _pick_p(rng, integer_only=multi)
    # martingale-ergodic bounds require decreasing chains
    direction = DECREASING if me else (DECREASING if rng.random() < 0.5 else INCREASING)

    if multi:
        d = int(rng.integers(1, 3))
        maps = [tau] + [power(tau, int(rng.integers(1, max(2, order))))
                        for _ in range(d - 1)]
        m = int(p) + 1
        filts = tuple(random_filtration(rng, space, n_stages=2, direction=direction)
                      for _ in range(m))
        seqs = tuple(random_weights(rng, envelope=_MULTI_ENVELOPE) for _ in range(d))
        spec = ProcessSpec.multi(kind, f, MultiParamSpec(tuple(maps), seqs, filts),
                                 norm=norm)
    else:
        filt = random_filtration(rng, space, n_stages=int(rng.integers(2, 5)),
                                 direction=direction)
        w = random_weights(rng, envelope=1.0) if weighted else None
        spec = ProcessSpec.single(kind, f, tau, filt, weights=w, norm=norm)
    return ProcessInstance(spec=spec, p=p, seed=seed, family=family)
