import math

import numpy as np
import pytest

from infentropy.kernels import (CosineHorseshoe, Identity, Power, PowerConjTent, SigmoidCosine,
                                Tent, XLogX)

KERNELS = [Identity(), Tent(3), Tent(4), Power(0.5), PowerConjTent(0.5, 5), PowerConjTent(1.0, 3),
           CosineHorseshoe(3), SigmoidCosine(), XLogX()]


@pytest.mark.parametrize("k", KERNELS, ids=lambda k: k.describe()["kind"])
def test_values_match_scalar_path(k):
    u = np.linspace(0.0, 1.0, 257)
    assert np.allclose(k.values(u), [k.value(float(v)) for v in u], atol=1e-15)


@pytest.mark.parametrize("k", KERNELS, ids=lambda k: k.describe()["kind"])
def test_turning_values_are_exact_extremes(k):
    for t, v in zip(k.turning_points(), k.turning_values()):
        assert k.value(t) == pytest.approx(v, abs=1e-7)


@pytest.mark.parametrize("k", [Tent(3), PowerConjTent(0.4, 4), CosineHorseshoe(2), SigmoidCosine(),
                               XLogX(), Power(0.7)], ids=str)
def test_derivative_matches_finite_difference(k):
    h = 1e-7
    for u in np.linspace(0.05, 0.95, 19):
        if any(abs(u - t) < 1e-3 for t in k.turning_points()):
            continue
        fd = (k.value(u + h) - k.value(u - h)) / (2 * h)
        assert k.derivative(u) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_tent_vertices():
    t = Tent(3)
    assert [t.value(x) for x in (0, 1 / 6, 1 / 3, 0.5, 2 / 3, 1)] == pytest.approx([0, .5, 1, .5, 0, 1])


def test_power_conj_tent_is_conjugate():
    a, b = 0.3, 4
    k, t = PowerConjTent(a, b), Tent(b)
    slack = (8 * b * 2.0 ** -52) ** a
    for x in np.linspace(0, 1, 41):
        assert k.value(x ** a) == pytest.approx(t.value(x) ** a, abs=slack)


def test_power_conj_tent_derivative_at_zero_and_blowup():
    k = PowerConjTent(0.5, 3)
    assert k.derivative(0.0) == pytest.approx(math.sqrt(3))
    assert math.isinf(k.derivative((2 / 3) ** 0.5))


def test_xlogx_maximum():
    k = XLogX()
    assert k.turning_points() == pytest.approx((1 / math.e,))
    assert k.value(1 / math.e) == pytest.approx(1 / math.e)
    assert k.value(0.0) == 0.0


def test_bad_parameters():
    with pytest.raises(ValueError):
        Tent(0)
    with pytest.raises(ValueError):
        PowerConjTent(1.5, 3)
    with pytest.raises(ValueError):
        CosineHorseshoe(0)
