import math

import pytest
from hypothesis import given, settings, strategies as st

from ergmart.measure import make_space, uniform_space
from ergmart.observables import (
    NormSpec,
    VectorObservable,
    integral,
    linf_norm,
    llog_norm,
    lp_norm,
    mean,
    point_norm_field,
)
from oracles import oracle_llog, oracle_lp_norm, oracle_point_norm

SP4 = uniform_space(4)
F1357 = VectorObservable(SP4, [1, 3, 5, 7])


def test_norm_spec_validation():
    NormSpec(1.0)
    NormSpec(math.inf)
    with pytest.raises(ValueError):
        NormSpec(0.5)


def test_point_norm_scalar_is_abs():
    f = VectorObservable(SP4, [1, -3, 5, -7])
    for q in (1.0, 2.0, math.inf):
        assert point_norm_field(f, NormSpec(q)).values[:, 0] == pytest.approx([1, 3, 5, 7])


def test_point_norm_euclidean_and_max():
    sp = uniform_space(2)
    f = VectorObservable(sp, [[3.0, 4.0], [0.0, 1.0]])
    assert point_norm_field(f, NormSpec(2.0)).values[:, 0] == pytest.approx([5.0, 1.0])
    assert point_norm_field(f, NormSpec(math.inf)).values[:, 0] == pytest.approx([4.0, 1.0])
    assert oracle_point_norm([3.0, 4.0], 2.0) == pytest.approx(5.0)


def test_lp_norm_values():
    assert lp_norm(F1357, 1.0) == pytest.approx(4.0, abs=1e-12)
    assert lp_norm(F1357, 2.0) == pytest.approx(math.sqrt(21.0), abs=1e-12)
    # direct quadrature oracle
    assert lp_norm(F1357, 2.0) == pytest.approx(
        oracle_lp_norm(SP4.weights, [[1], [3], [5], [7]], 2.0, 2.0), abs=1e-12)


def test_lp_norm_of_constant_is_abs_constant():
    sp = make_space([0.5, 0.3, 0.2])
    f = VectorObservable(sp, [-2.5, -2.5, -2.5])
    for p in (1.0, 1.7, 2.0, 3.0):
        assert lp_norm(f, p) == pytest.approx(2.5, abs=1e-12)


def test_lp_norm_rejects_p_below_one():
    with pytest.raises(ValueError):
        lp_norm(F1357, 0.9)


def test_linf_norm():
    assert linf_norm(F1357) == 7.0
    assert linf_norm(VectorObservable(SP4, [0, 0, 0, 0])) == 0.0
    sp = uniform_space(2)
    f = VectorObservable(sp, [[3.0, 4.0], [0.0, 1.0]])
    assert linf_norm(f, NormSpec(2.0)) == pytest.approx(5.0)


def test_llog_m0_equals_l1():
    assert llog_norm(F1357, 0) == pytest.approx(lp_norm(F1357, 1.0), abs=1e-12)


def test_llog_of_ones_vanishes():
    f = VectorObservable(SP4, [1, 1, 1, 1])
    assert llog_norm(f, 1) == 0.0


def test_llog_m1_value():
    expected = (0.0 + 3 * math.log(3) + 5 * math.log(5) + 7 * math.log(7)) / 4
    assert llog_norm(F1357, 1) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(6.2411, abs=5e-5)
    assert llog_norm(F1357, 1) == pytest.approx(
        oracle_llog(SP4.weights, [[1], [3], [5], [7]], 1, 2.0), abs=1e-12)


def test_mean_and_integral():
    assert mean(F1357)[0] == pytest.approx(4.0, abs=1e-12)
    assert integral(F1357)[0] == pytest.approx(4.0, abs=1e-12)
    sp = make_space([2.0, 2.0])  # total mass 4: integral and mean differ
    f = VectorObservable(sp, [3.0, 5.0])
    assert integral(f)[0] == pytest.approx(16.0)
    assert mean(f)[0] == pytest.approx(4.0)


def test_mean_constant_and_linearity():
    sp = make_space([0.2, 0.5, 0.3])
    c = VectorObservable(sp, [[1.5, -2.0]] * 3)
    assert mean(c) == pytest.approx([1.5, -2.0])
    f = VectorObservable(sp, [[1.0, 0.0], [0.0, 2.0], [3.0, 1.0]])
    assert mean(-1.0 * f) == pytest.approx(-mean(f))


def test_observable_validation():
    with pytest.raises(ValueError):
        VectorObservable(SP4, [1, 2, 3])
    with pytest.raises(ValueError):
        VectorObservable(SP4, [1, 2, 3, float("inf")])


finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


@settings(max_examples=80, deadline=None, derandomize=True)
@given(st.lists(finite, min_size=2, max_size=12),
       st.floats(min_value=-8, max_value=8, allow_nan=False),
       st.sampled_from([1.0, 1.5, 2.0, 3.0]),
       st.sampled_from([1.0, 2.0, math.inf]))
def test_norm_properties(vals, c, p, q):
    sp = uniform_space(len(vals))
    f = VectorObservable(sp, vals)
    ns = NormSpec(q)
    # absolute homogeneity
    assert lp_norm(c * f, p, ns) == pytest.approx(abs(c) * lp_norm(f, p, ns),
                                                  rel=1e-12, abs=1e-12)
    # p-monotonicity on a probability space
    assert lp_norm(f, 1.0, ns) <= lp_norm(f, p, ns) + 1e-12
    # sup-norm bound
    assert lp_norm(f, p, ns) <= linf_norm(f, ns) * sp.total_mass ** (1 / p) + 1e-12
    # log functional sign and zero region
    assert llog_norm(f, 2, ns) >= 0.0
    if linf_norm(f, ns) <= 1.0:
        assert llog_norm(f, 3, ns) == 0.0
