import math

import pytest
from hypothesis import given, settings, strategies as st

from infentropy.intervals import Interval
from infentropy.laps import branch_decomposition, iterate_laps, lap_count, monotone_branches
from infentropy.maps import BranchCapError, make_f, make_identity, make_tent

UNIT = Interval(0.0, 1.0)


@pytest.mark.parametrize("k", range(1, 7))
def test_tent_laps(tent3, k):
    assert lap_count(tent3, UNIT, k) == 3 ** k


@given(st.integers(2, 6), st.integers(1, 4))
@settings(max_examples=20, deadline=None)
def test_tent_lap_power_law(b, k):
    assert lap_count(make_tent(b), UNIT, k) == b ** k


def test_identity_has_one_lap():
    assert lap_count(make_identity(), UNIT, 5) == 1


def test_branch_inversion(f1):
    I = Interval.dyadic(1).closure()
    for br in monotone_branches(f1, I.lo, I.hi):
        for y in (0.55, 0.7, 0.95):
            assert f1(br.invert(y)) == pytest.approx(y, abs=1e-15)


def test_lap_inversion_through_iterates(f_half):
    I = Interval.dyadic(2).closure()
    for lap in branch_decomposition(f_half, I, 2):
        y = 0.5 * (lap.ylo + lap.yhi)
        x = lap.invert(y)
        assert f_half(f_half(x)) == pytest.approx(y, abs=1e-12)


def test_laps_alternate_and_tile(tent3):
    laps = branch_decomposition(tent3, UNIT, 3)
    assert laps[0].lo == 0.0 and laps[-1].hi == 1.0
    for u, v in zip(laps, laps[1:]):
        assert u.hi == pytest.approx(v.lo, abs=1e-15)
        assert u.direction == -v.direction


def test_cap_raises_with_partial(tent3):
    with pytest.raises(BranchCapError) as exc:
        for _ in iterate_laps(tent3, UNIT, 6, cap=100):
            pass
    assert len(exc.value.partial) == 81


def test_empty_region_rejected(f1):
    with pytest.raises(ValueError):
        monotone_branches(f1, 0.5, 0.5)
