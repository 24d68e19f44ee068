import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infentropy.intervals import Interval
from infentropy.maps import (BranchCapError, derivative_ae, dyadic_index, evaluate, make_f,
                             make_identity, make_power_conj_tent, make_psi, make_tent,
                             make_truncated_f, make_xlogx)

unit = st.floats(0.0, 1.0, allow_nan=False)


def tent_formula(b, x):
    k = min(int(b * x), b - 1)
    return b * x - k if k % 2 == 0 else k + 1 - b * x


def f1_formula(x):
    """f_1 straight from the definition, with n from a float log2."""
    if x == 0:
        return 0.0
    n = math.ceil(-math.log2(x)) if x < 1 else 1
    while not 2.0 ** -n < x <= 2.0 ** (1 - n):
        n += 1 if x <= 2.0 ** -n else -1
    lo = 2.0 ** -n
    return lo + lo * tent_formula(2 * n + 1, (x - lo) / lo)


def test_dyadic_index_exact_at_endpoints():
    for n in range(1, 60):
        assert dyadic_index(2.0 ** -n) == n + 1 if n else True
        assert dyadic_index(2.0 ** (1 - n)) == n
        assert dyadic_index(1.5 * 2.0 ** -n) == n


def test_f1_examples(f1):
    assert f1(7 / 12) == pytest.approx(0.75, abs=1e-15)
    assert f1(0.3) == pytest.approx(0.5, abs=1e-15)
    assert f1(0.0) == 0.0
    assert f1(1.0) == 1.0


@given(st.one_of(st.floats(1e-300, 1.0), st.just(0.0)))
def test_f1_agrees_with_formula(x):
    assert make_f(1.0)(x) == pytest.approx(f1_formula(x), abs=4e-16)


@given(st.floats(0.05, 1.0), st.integers(1, 30), st.floats(0.0, 1.0))
def test_fa_keeps_blocks_invariant(a, n, u):
    f = make_f(a)
    I = Interval.dyadic(n)
    x = I.lo + u * I.length
    if x == I.lo:
        return
    assert I.lo <= f(x) <= I.hi


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
def test_fa_fixes_dyadic_points(a):
    f = make_f(a)
    for n in range(0, 50):
        x = 2.0 ** -n
        assert f(x) == x


def test_vector_and_scalar_paths_agree(f_half):
    x = np.random.default_rng(1).random(2000)
    # numpy and libm pow may differ in the last bit
    assert np.allclose(f_half.values(x), [f_half(float(v)) for v in x], rtol=0, atol=4e-16)


def test_subnormal_inputs(f1, f_half):
    for x in (5e-324, 2.2250738585072014e-308 / 3, 1e-310):
        for f in (f1, f_half):
            y = f(x)
            n = dyadic_index(x)
            assert math.ldexp(1.0, -n) <= y <= math.ldexp(1.0, 1 - n)


def test_domain_errors(f1):
    with pytest.raises(ValueError):
        f1(1.5)
    with pytest.raises(ValueError):
        f1.values(np.array([-0.1]))
    with pytest.raises(ValueError):
        make_f(0.0)
    with pytest.raises(BranchCapError):
        f1.indices_between(0.0, 1.0)


def test_derivative_ae(f1):
    # 0.6 sits on the first (increasing) branch of I_1
    assert derivative_ae(f1, 0.6) == pytest.approx(3.0)
    assert derivative_ae(f1, 0.75) == pytest.approx(-3.0)
    assert derivative_ae(f1, 0.5) is None
    assert derivative_ae(f1, 2 / 3) is None
    assert derivative_ae(f1, 0.0) is None


def test_gab_conjugates_tent():
    a, b = 0.4, 5
    g, t = make_power_conj_tent(a, b), make_tent(b)
    # at zeros of the tent the a-th power magnifies a rounding error e to e^a
    slack = (8 * b * 2.0 ** -52) ** a
    for x in np.linspace(0, 1, 101):
        assert g(x ** a) == pytest.approx(t(x) ** a, abs=slack)


@given(st.floats(0.1, 1.0), unit)
def test_psi_round_trip(a, x):
    psi, psi_inv = make_psi(a)
    assert psi_inv(psi(x)) == pytest.approx(x, abs=1e-12)


def test_truncated_family():
    f = make_truncated_f(1.0, 3)
    assert f(0.3) == 0.3 and f(0.9) == 0.9
    assert f(0.2) == make_f(1.0)(0.2)
    assert 0 in f.indices_between(0.1, 1.0)


def test_evaluate_and_describe(tent3):
    assert evaluate(tent3, 1 / 6) == pytest.approx(0.5)
    assert tent3.describe() == {"family": "tent", "b": 3}
    assert make_identity()(0.37) == 0.37
    assert make_xlogx()(1 / math.e) == pytest.approx(1 / math.e)


def test_break_points_f1(f1):
    bp = f1.break_points(0.25, 1.0)
    assert 0.5 in bp
    assert len([t for t in bp if t > 0.5]) == 2          # two turning points in I_1
    assert len([t for t in bp if 0.25 < t < 0.5]) == 4   # four in I_2
