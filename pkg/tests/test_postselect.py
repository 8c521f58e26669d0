"""Detection patterns and conditioning."""

import math

import numpy as np
import pytest

from conftest import random_state
from loqc.fock import basis_state, enumerate_basis, make_state
from loqc.postselect import (
    DetectionPattern,
    coincidence_probability,
    condition,
    strip_empty_modes,
)

RNG = np.random.default_rng(777)


def test_pattern_rejects_conflicting_constraints():
    with pytest.raises(ValueError):
        DetectionPattern(exact={0: -1})
    with pytest.raises(ValueError):
        DetectionPattern(groups=(((0, 0), 1),))
    with pytest.raises(ValueError):
        DetectionPattern(groups=(((0, 1), -1),))
    with pytest.raises(ValueError):
        DetectionPattern(exact={0: 1}, groups=(((0, 1), 1),))
    with pytest.raises(ValueError):
        DetectionPattern(groups=(((0, 1), 1), ((1, 2), 0)))


def test_pattern_modes_and_range_validation():
    p = DetectionPattern(exact={3: 1}, groups=(((0, 1), 2),))
    assert p.modes() == {0, 1, 3}
    p.validate_for(4)
    with pytest.raises(ValueError):
        p.validate_for(3)


def test_condition_exact_counts():
    s = make_state(
        3,
        [
            ((1, 1, 0), 0.6),
            ((2, 0, 0), 0.8j),
        ],
    )
    out = condition(s, DetectionPattern(exact={1: 1}))
    assert out.kept_modes == (0, 2)
    assert out.probability == pytest.approx(0.36)
    assert out.reduced.n_modes == 2
    assert out.reduced.amplitude((1, 0)) == pytest.approx(0.6)
    assert out.normalized.amplitude((1, 0)) == pytest.approx(1.0)


def test_condition_zero_probability_is_legitimate():
    s = basis_state(2, (2, 0))
    out = condition(s, DetectionPattern(exact={0: 1}))
    assert out.probability == 0.0
    assert out.normalized is None
    assert out.reduced.amplitudes == {}


def test_condition_group_totals_keep_all_group_modes():
    s = make_state(
        4,
        [
            ((1, 1, 0, 0), 0.5),
            ((0, 2, 0, 0), 0.5),
            ((1, 0, 1, 0), 0.5),
            ((0, 1, 0, 1), 0.5),
        ],
    )
    pattern = DetectionPattern(exact={3: 0}, groups=(((0, 1), 2),))
    out = condition(s, pattern)
    assert out.kept_modes == (0, 1, 2)
    assert out.probability == pytest.approx(0.5)
    assert out.reduced.amplitude((1, 1, 0)) == pytest.approx(0.5)
    assert out.reduced.amplitude((0, 2, 0)) == pytest.approx(0.5)


def test_conditioning_completeness_over_exhaustive_patterns():
    state = random_state(RNG, 4, 2)
    total = 0.0
    for occ in enumerate_basis(4, 2):
        pattern = DetectionPattern(exact=dict(enumerate(occ)))
        total += condition(state, pattern).probability
    assert abs(total - 1.0) < 1e-12


def test_conditioning_completeness_partial_measurement():
    # measuring only two of four modes must also resolve unit probability
    state = random_state(RNG, 4, 2)
    total = 0.0
    for k0 in range(3):
        for k1 in range(3):
            pattern = DetectionPattern(exact={0: k0, 1: k1})
            total += condition(state, pattern).probability
    assert abs(total - 1.0) < 1e-12


def test_coincidence_probability_counts_single_occupancy_kets():
    s = make_state(
        4,
        [
            ((1, 1, 1, 1), 0.5),
            ((2, 1, 1, 0), 0.5),
            ((1, 1, 2, 0), math.sqrt(0.5)),
        ],
    )
    assert coincidence_probability(s, (0, 1, 2, 3)) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        coincidence_probability(s, (0, 1, 2, 2))
    with pytest.raises(ValueError):
        coincidence_probability(s, (0, 1, 2, 9))


def test_strip_empty_modes():
    s = make_state(3, [((1, 0, 1), 1.0)])
    stripped = strip_empty_modes(s, (1,))
    assert stripped.n_modes == 2
    assert stripped.amplitude((1, 1)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        strip_empty_modes(s, (0,))
