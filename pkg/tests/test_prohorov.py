"""Prohorov distance between two measures on one finite space, two routes."""

import random
from fractions import Fraction

from mmdist import (
    CommonSpaceMeasures,
    SizeError,
    prohorov_bruteforce,
    prohorov_condition_holds,
    prohorov_flow,
    sample_mm_space,
    validate_common,
)

F = Fraction


def rand_weights(rng, n):
    w = [rng.randint(0, 6) for _ in range(n)]
    if sum(w) == 0:
        w[rng.randrange(n)] = 1
    s = sum(w)
    return tuple(F(x, s) for x in w)


def rand_common(rng, n_max=6):
    sp = sample_mm_space(rng.randint(0, 10**9), n_max=n_max)
    return CommonSpaceMeasures(sp.dist, rand_weights(rng, sp.n), rand_weights(rng, sp.n))


def test_swap_on_unit_distance_pair():
    cm = CommonSpaceMeasures(
        ((F(0), F(1)), (F(1), F(0))),
        (F(3, 4), F(1, 4)),
        (F(1, 4), F(3, 4)),
    )
    assert prohorov_bruteforce(cm) == F(1, 2)
    assert prohorov_flow(cm) == F(1, 2)


def test_identical_measures_give_zero():
    rng = random.Random(2)
    for _ in range(30):
        sp = sample_mm_space(rng.randint(0, 10**9))
        mu = rand_weights(rng, sp.n)
        cm = CommonSpaceMeasures(sp.dist, mu, mu)
        assert prohorov_flow(cm) == F(0)
        assert prohorov_bruteforce(cm) == F(0)


def test_flow_equals_bruteforce():
    rng = random.Random(31)
    for _ in range(120):
        cm = rand_common(rng)
        assert validate_common(cm) == []
        assert prohorov_flow(cm) == prohorov_bruteforce(cm)


def test_value_is_infimum_of_condition():
    # Point mass moved across distance 1/2: the defining condition uses a
    # strict enlargement, so it fails at the returned value and holds above.
    cm = CommonSpaceMeasures(
        ((F(0), F(1, 2)), (F(1, 2), F(0))),
        (F(1), F(0)),
        (F(0), F(1)),
    )
    v = prohorov_flow(cm)
    assert v == F(1, 2)
    assert not prohorov_condition_holds(cm, v)
    assert prohorov_condition_holds(cm, v + F(1, 1000))


def test_condition_holds_strictly_above_value():
    rng = random.Random(37)
    for _ in range(60):
        cm = rand_common(rng, n_max=5)
        v = prohorov_flow(cm)
        assert prohorov_condition_holds(cm, v + F(1, 997))
        if v > 0:
            assert not prohorov_condition_holds(cm, v - F(1, 997))


def test_symmetry():
    rng = random.Random(41)
    for _ in range(60):
        cm = rand_common(rng)
        swapped = CommonSpaceMeasures(cm.dist, cm.nu, cm.mu)
        assert prohorov_flow(cm) == prohorov_flow(swapped)


def test_triangle_inequality():
    rng = random.Random(43)
    for _ in range(60):
        sp = sample_mm_space(rng.randint(0, 10**9), n_max=5)
        mu = rand_weights(rng, sp.n)
        nu = rand_weights(rng, sp.n)
        rho = rand_weights(rng, sp.n)
        d = lambda x, y: prohorov_flow(CommonSpaceMeasures(sp.dist, x, y))
        assert d(mu, rho) <= d(mu, nu) + d(nu, rho)


def test_value_bounded_by_total_variation_and_diameter():
    rng = random.Random(47)
    for _ in range(60):
        cm = rand_common(rng)
        v = prohorov_flow(cm)
        tv = sum(abs(a - b) for a, b in zip(cm.mu, cm.nu)) / 2
        diam = max(max(row) for row in cm.dist)
        assert 0 <= v <= tv
        assert v <= diam


def test_bruteforce_cap():
    n = 4
    dist = tuple(
        tuple(F(0) if i == j else F(1) for j in range(n)) for i in range(n)
    )
    w = tuple(F(1, n) for _ in range(n))
    cm = CommonSpaceMeasures(dist, w, w)
    try:
        prohorov_bruteforce(cm, cap=3)
        assert False
    except SizeError:
        pass


def test_validate_common_flags_shape_mismatch():
    cm = CommonSpaceMeasures(((F(0),),), (F(1),), (F(1, 2), F(1, 2)))
    assert validate_common(cm) != []
