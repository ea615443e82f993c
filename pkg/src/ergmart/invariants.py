"""Self-contained invariant suite behind the selfcheck command.

Each section runs seeded randomized checks of the algebraic laws the library
is built on and returns one line per property. The constant cross-check and
the canonical regression pin the inequality machinery against frozen
reference values, so a perturbation of either side of any bound (10 percent
or far less) trips the table even when every random instance still satisfies
the slackened inequality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import inequalities
from .averages import (
    BesicovitchWeights,
    MultiParamSpec,
    ergodic_average,
    ergodic_limit,
    multi_average,
    weighted_average,
)
from .generators import (
    random_cycle_system,
    random_filtration,
    random_observable,
    random_partition,
    random_weights,
)
from .measure import DECREASING, INCREASING, Filtration, Partition, partition_join, partition_meet, refines, uniform_space
from .observables import NormSpec, VectorObservable, linf_norm, llog_norm, lp_norm, mean, point_norm_field
from .operators import cond_expect, cycle_map, identity_map, koopman, power
from .processes import (
    ERGODIC_MARTINGALE,
    MARTINGALE_ERGODIC,
    ProcessSpec,
    default_n1_grid,
    evaluate,
    limit_target,
    mean_identity_check,
    tail_variation,
)

__all__ = ["CheckLine", "run_section", "SECTIONS"]

_TOL = 1e-12


@dataclass(frozen=True)
class CheckLine:
    name: str
    ok: bool
    detail: str


def _line(name: str, ok: bool, detail: str = "") -> CheckLine:
    return CheckLine(name, bool(ok), detail)


# ---------------------------------------------------------------- sections

def partition_lattice(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(20, budget // 2)
    order_ok = join_meet_ok = True
    for _ in range(n_checks):
        space = uniform_space(int(rng.integers(2, 24)))
        parts = [random_partition(rng, space, int(rng.integers(1, space.size + 1)))
                 for _ in range(3)]
        a, b, c = parts
        if not refines(a, a):
            order_ok = False
        if refines(a, b) and refines(b, a) and a != b:
            order_ok = False
        if refines(a, b) and refines(b, c) and not refines(a, c):
            order_ok = False
        j = partition_join(a, b)
        m = partition_meet(a, b)
        if not (refines(j, a) and refines(j, b) and refines(a, m) and refines(b, m)):
            join_meet_ok = False
    return [
        _line("partition refinement is a partial order", order_ok,
              f"{n_checks} random triples"),
        _line("join refines both arguments, both refine meet", join_meet_ok,
              f"{n_checks} random pairs"),
    ]


def norm_laws(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(20, budget // 2)
    homo_ok = mono_ok = llog_ok = bound_ok = True
    for _ in range(n_checks):
        space = uniform_space(int(rng.integers(2, 32)))
        dim = int(rng.integers(1, 5))
        f = random_observable(rng, space, dim)
        ns = NormSpec(float(rng.choice((1.0, 2.0, math.inf))))
        c = float(rng.normal(0, 3))
        p1, p2 = sorted(rng.uniform(1.0, 4.0, 2))
        if abs(lp_norm(c * f, p1, ns) - abs(c) * lp_norm(f, p1, ns)) > 1e-12 * max(1, abs(c)):
            homo_ok = False
        if lp_norm(f, p1, ns) > lp_norm(f, p2, ns) + 1e-12:
            mono_ok = False
        small = VectorObservable(space, rng.uniform(-1, 1, (space.size, dim)) / max(1, dim))
        if point_norm_field(small, ns).values.max() <= 1.0 and llog_norm(small, 1, ns) != 0.0:
            llog_ok = False
        if llog_norm(f, int(rng.integers(0, 3)), ns) < 0.0:
            llog_ok = False
        if lp_norm(f, p1, ns) > linf_norm(f, ns) * space.total_mass ** (1 / p1) + 1e-12:
            bound_ok = False
    return [
        _line("L_p norm absolute homogeneity", homo_ok, f"{n_checks} samples"),
        _line("L_p monotone in p on probability spaces", mono_ok, f"{n_checks} samples"),
        _line("log-regularized functional vanishes on |f| <= 1", llog_ok, f"{n_checks} samples"),
        _line("L_p bounded by sup norm times mass^(1/p)", bound_ok, f"{n_checks} samples"),
    ]


def operator_algebra(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(20, budget)
    names = ["conditional expectation idempotent", "tower property",
             "mean preservation", "L_p contraction", "pointwise domination",
             "composition operator is an L_p isometry"]
    oks = {n: True for n in names}
    for _ in range(n_checks):
        space, tau, _ = random_cycle_system(rng, n_max=48)
        dim = int(rng.integers(1, 5))
        f = random_observable(rng, space, dim)
        ns = NormSpec(float(rng.choice((2.0, math.inf))))
        fine = random_partition(rng, space, int(rng.integers(2, space.size + 1)))
        coarse_labels = rng.integers(0, max(1, fine.block_count // 2), fine.block_count)
        coarse = Partition(space, coarse_labels[fine.block_of])
        ef = cond_expect(f, fine)
        if linf_norm(cond_expect(ef, fine) - ef, ns) > _TOL:
            oks[names[0]] = False
        lhs = cond_expect(ef, coarse)
        rhs = cond_expect(f, coarse)
        if linf_norm(lhs - rhs, ns) > _TOL:
            oks[names[1]] = False
        if np.max(np.abs(mean(ef) - mean(f))) > _TOL:
            oks[names[2]] = False
        for p in (1.0, 1.5, 2.0, 3.0):
            if lp_norm(ef, p, ns) > lp_norm(f, p, ns) + _TOL:
                oks[names[3]] = False
        dom = cond_expect(point_norm_field(f, ns), fine)
        if np.max(point_norm_field(ef, ns).values - dom.values) > _TOL:
            oks[names[4]] = False
        tf = koopman(f, tau)
        for p in (1.0, 2.0, 3.0):
            if abs(lp_norm(tf, p, ns) - lp_norm(f, p, ns)) > 1e-12 * max(1.0, lp_norm(f, p, ns)):
                oks[names[5]] = False
    return [_line(n, oks[n], f"{n_checks} random instances") for n in names]


def averaging_laws(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(10, budget // 2)
    names = ["averaging is linear", "average equals limit at period multiples",
             "Cesaro error within 2|f|_inf L/n", "orbit limit is a projection",
             "multiparameter average matches the direct box sum",
             "weighted average dominated by |weights| scalar average"]
    oks = {n: True for n in names}
    for _ in range(n_checks):
        space, tau, order = random_cycle_system(rng, n_max=24)
        f = random_observable(rng, space, int(rng.integers(1, 4)))
        g = random_observable(rng, space, f.dim)
        a, b = rng.normal(0, 2, 2)
        n = int(rng.integers(1, 3 * order + 1))
        lin = ergodic_average(a * f + b * g, tau, n) - (
            a * ergodic_average(f, tau, n) + b * ergodic_average(g, tau, n))
        if linf_norm(lin) > 1e-10:
            oks[names[0]] = False
        star = ergodic_limit(f, tau)
        for k in (1, 2, 3):
            if linf_norm(ergodic_average(f, tau, k * order) - star) > _TOL:
                oks[names[1]] = False
        for n2 in (order, 2 * order + 1, 3 * order - 1):
            gap = linf_norm(ergodic_average(f, tau, n2) - star)
            if gap > 2 * linf_norm(f) * order / n2 + _TOL:
                oks[names[2]] = False
        again = ergodic_limit(star, tau)
        if linf_norm(again - star) > _TOL or linf_norm(koopman(star, tau) - star) > _TOL:
            oks[names[3]] = False
        # small commuting multiparameter instance against the direct sum
        maps = (tau, power(tau, 2))
        seqs = (random_weights(rng), random_weights(rng))
        filts = (random_filtration(rng, space, 2),)
        mp = MultiParamSpec(maps, seqs, filts)
        n_vec = (int(rng.integers(1, 2 * order + 1)), int(rng.integers(1, order + 1)))
        got = multi_average(f, mp, n_vec)
        direct = np.zeros_like(f.values)
        alph = [s.values(n) for s, n in zip(seqs, n_vec)]
        for k1 in range(n_vec[0]):
            inner = f.values
            for _ in range(k1):
                inner = inner[maps[0].map]
            # T_1^{k1} applied after T_2^{k2}: iterate T_2 on top of T_1^{k1} f
            for k2 in range(n_vec[1]):
                term = f.values
                for _ in range(k2):
                    term = term[maps[1].map]
                for _ in range(k1):
                    term = term[maps[0].map]
                direct += alph[0][k1] * alph[1][k2] * term
        direct /= n_vec[0] * n_vec[1]
        if np.max(np.abs(got.values - direct)) > 1e-10:
            oks[names[4]] = False
        w = seqs[0]
        n_w = int(rng.integers(1, 2 * order + 1))
        wa = point_norm_field(weighted_average(f, tau, w, n_w)).values[:, 0]
        scal = point_norm_field(f).values[:, 0]
        acc = np.zeros_like(scal)
        cur = scal
        absal = np.abs(w.values(n_w))
        for i in range(n_w):
            if i:
                cur = cur[tau.map]
            acc += absal[i] * cur
        if np.max(wa - acc / n_w) > _TOL:
            oks[names[5]] = False
    return [_line(n, oks[n], f"{n_checks} random instances") for n in names]


def process_convergence(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(10, budget // 2)
    names = ["exact convergence at (order, last stage)",
             "limit norm bound and mean identity",
             "identity map degenerates to the pure martingale",
             "singleton filtration degenerates to the pure average",
             "errors vanish along monotone index paths",
             "both filtration directions converge"]
    oks = {n: True for n in names}
    for _ in range(n_checks):
        space, tau, order = random_cycle_system(rng, n_max=32)
        f = random_observable(rng, space, int(rng.integers(1, 4)))
        for direction in (DECREASING, INCREASING):
            filt = random_filtration(rng, space, 3, direction)
            for kind in (MARTINGALE_ERGODIC, ERGODIC_MARTINGALE):
                spec = ProcessSpec.single(kind, f, tau, filt)
                target = limit_target(spec)
                gap = linf_norm(evaluate(spec, order, len(filt.stages) - 1) - target)
                key = names[0] if direction == DECREASING else names[5]
                if gap > 1e-10:
                    oks[key] = False
                if not mean_identity_check(spec).passed:
                    oks[names[1]] = False
        filt = random_filtration(rng, space, 3, DECREASING)
        ident = identity_map(space)
        spec_id = ProcessSpec.single(MARTINGALE_ERGODIC, f, ident, filt)
        for s in range(len(filt.stages)):
            for n1 in (1, 2, 5):
                gap = linf_norm(evaluate(spec_id, n1, s) - cond_expect(f, filt.stages[s]))
                if gap > _TOL:
                    oks[names[2]] = False
        sing = Filtration(space, DECREASING, (Partition.singletons(space),))
        spec_sing = ProcessSpec.single(ERGODIC_MARTINGALE, f, tau, sing)
        for n1 in (1, 2, order, 2 * order):
            gap = linf_norm(evaluate(spec_sing, n1, 0) - ergodic_average(f, tau, n1))
            if gap > _TOL:
                oks[names[3]] = False
        spec = ProcessSpec.single(MARTINGALE_ERGODIC, f, tau, filt)
        target = limit_target(spec)
        grid = default_n1_grid(order)
        for _ in range(5):
            i = j = 0
            path = [(grid[0], 0)]
            while i < len(grid) - 1 or j < len(filt.stages) - 1:
                if i < len(grid) - 1 and (j == len(filt.stages) - 1 or rng.random() < 0.5):
                    i += 1
                else:
                    j += 1
                path.append((grid[i], j))
            final = linf_norm(evaluate(spec, *path[-1]) - target)
            if final > 1e-9:
                oks[names[4]] = False
    return [_line(n, oks[n], f"{n_checks} random instances") for n in names]


def weighted_stabilization(seed: int, budget: int) -> list[CheckLine]:
    rng = np.random.default_rng(seed)
    n_checks = max(10, budget // 2)
    ok = True
    worst = 0.0
    for _ in range(n_checks):
        space, tau, order = random_cycle_system(rng, n_max=24)
        f = random_observable(rng, space, int(rng.integers(1, 4)))
        filt = random_filtration(rng, space, 3, DECREASING)
        w = random_weights(rng)
        kind = MARTINGALE_ERGODIC if rng.random() < 0.5 else ERGODIC_MARTINGALE
        spec = ProcessSpec.single(kind, f, tau, filt, weights=w)
        tv = tail_variation(spec, p=2.0, n_periods=8)
        worst = max(worst, tv)
        if tv > 1e-9:
            ok = False
    return [_line("weighted traces stabilize over the final period", ok,
                  f"{n_checks} instances, worst tail variation {worst:.2e}")]


# frozen catalog values; an independent copy of the constant formulas so a
# mutated implementation cannot agree with this table
_CONSTANT_TABLE = [
    ("dominant", dict(p=1.25), 25.0),
    ("dominant", dict(p=2.0), 4.0),
    ("dominant", dict(p=4.0), 16.0 / 9.0),
    ("dominant", dict(p=2.0, weighted=True, alpha=0.5), 2.0),
    ("dominant", dict(p=2.0, multi=True, alpha=0.5, d_maps=2), 16.0),
    ("dominant", dict(p=3.0, multi=True, alpha=1.0, d_maps=1), 1.5**5),
    ("maximal", dict(p=1.25), 5.0**1.25),
    ("maximal", dict(p=2.0), 4.0),
    ("maximal", dict(p=3.0), 3.375),
    ("maximal", dict(p=2.0, weighted=True, alpha=0.5), 2.0),
    ("maximal", dict(p=2.0, multi=True, alpha=0.5, d_maps=2), 4.0),
    ("maximal", dict(p=4.0, multi=True, alpha=0.5, d_maps=1), (0.5**4) * (4.0 / 3.0) ** 4),
]


def constants_crosscheck(seed: int = 0, budget: int = 0) -> list[CheckLine]:
    ok = True
    bad = ""
    for flavor, kwargs, expected in _CONSTANT_TABLE:
        fn = inequalities.dominant_constant if flavor == "dominant" else inequalities.maximal_constant
        got = fn(**kwargs)
        if not math.isclose(got, expected, rel_tol=1e-12, abs_tol=0.0):
            ok = False
            bad = f"{flavor} {kwargs}: got {got!r}, expected {expected!r}"
            break
    return [_line("inequality constants match the frozen catalog", ok,
                  bad or f"{len(_CONSTANT_TABLE)} catalog entries")]


def _canonical_specs():
    space = uniform_space(4)
    f = VectorObservable(space, [1.0, 3.0, 7.0, -5.0])
    tau = cycle_map(space)
    pairs = Partition.from_blocks(space, [[0, 1], [2, 3]])
    cross = Partition.from_blocks(space, [[0, 2], [1, 3]])
    filt = Filtration(space, DECREASING,
                      (Partition.singletons(space), pairs, Partition.whole(space)))
    filt_coarse = Filtration(space, DECREASING, (pairs, Partition.whole(space)))
    me = ProcessSpec.single(MARTINGALE_ERGODIC, f, tau, filt)
    em = ProcessSpec.single(ERGODIC_MARTINGALE, f, tau, filt_coarse)
    w = BesicovitchWeights.single_cosine(0.5, 1, 2)
    wme = ProcessSpec.single(MARTINGALE_ERGODIC, f, tau, filt, weights=w)
    filt2 = Filtration(space, DECREASING, (cross, Partition.whole(space)))
    mp = MultiParamSpec((tau, power(tau, 2)), (w, BesicovitchWeights.constant(0.25)),
                        (filt, filt2, filt2))
    multi = ProcessSpec.multi(MARTINGALE_ERGODIC, f, mp)
    return [("single-me", me, 2.0, 4.0), ("single-em", em, 2.0, 1.75),
            ("weighted-me", wme, 2.0, 1.75), ("multi-me", multi, 2.0, 0.4)]


# (lhs, rhs) per canonical instance, dominant then maximal; values frozen from
# the build that introduced them (rel tol 1e-9 on comparison)
_CANONICAL_EXPECTED = {
    "single-me": ((5.301991240195622, 18.33030277982336),
                  (0.75, 5.25)),
    "single-em": ((1.8047006523089764, 18.33030277982336),
                  (0.5, 27.428571428571427)),
    "weighted-me": ((2.361805453461398, 9.16515138991168),
                    (0.5, 13.714285714285714)),
    "multi-me": ((0.41692700200394794, 73.32121111929344),
                 (0.5, 524.9999999999999)),
}


def canonical_regression(seed: int = 0, budget: int = 0) -> list[CheckLine]:
    """Fixed tiny instances with frozen lhs/rhs for one dominant and one
    maximal check each; any drift in either side of any bound shows up here."""
    out = []
    for name, spec, p, eps in _canonical_specs():
        box = inequalities.default_box(spec, n_factor=2)
        dom = inequalities.dominant_check(spec, p, box)
        mx = inequalities.maximal_check(spec, p, eps, box)
        exp_dom, exp_max = _CANONICAL_EXPECTED[name]
        ok = (math.isclose(dom.lhs, exp_dom[0], rel_tol=1e-9, abs_tol=1e-12)
              and math.isclose(dom.rhs, exp_dom[1], rel_tol=1e-9, abs_tol=1e-12)
              and math.isclose(mx.lhs, exp_max[0], rel_tol=1e-9, abs_tol=1e-12)
              and math.isclose(mx.rhs, exp_max[1], rel_tol=1e-9, abs_tol=1e-12))
        detail = (f"dominant {dom.lhs:.12g}/{dom.rhs:.12g}, "
                  f"maximal {mx.lhs:.12g}/{mx.rhs:.12g}")
        if not ok:
            detail += (f" (expected {exp_dom[0]:.12g}/{exp_dom[1]:.12g}, "
                       f"{exp_max[0]:.12g}/{exp_max[1]:.12g})")
        out.append(_line(f"canonical regression {name}", ok, detail))
    return out


SECTIONS = [
    ("partition lattice", partition_lattice),
    ("norms", norm_laws),
    ("operator algebra", operator_algebra),
    ("averaging laws", averaging_laws),
    ("process convergence", process_convergence),
    ("weighted stabilization", weighted_stabilization),
    ("constant catalog", constants_crosscheck),
    ("canonical regression", canonical_regression),
]


def run_section(name: str, seed: int, budget: int) -> list[CheckLine]:
    for sec_name, fn in SECTIONS:
        if sec_name == name:
            return fn(seed, budget)
    raise ValueError(f"unknown section {name!r}")
