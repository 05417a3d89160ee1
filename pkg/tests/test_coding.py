"""Coding excursions into finite tree-like mm-spaces."""

import random
from fractions import Fraction

from mmdist import (
    FiniteMMSpace,
    TruncatedMonomial,
    are_isomorphic,
    code_excursion,
    comb,
    dh,
    evaluate,
    evaluate_polynomial,
    four_point_check,
    is_canonical,
    pl_cut_points,
    pl_excursion,
    random_excursion,
    tent,
    validate,
)

F = Fraction


def star(n):
    dist = tuple(tuple(F(0) if i == j else F(2) for j in range(n)) for i in range(n))
    return FiniteMMSpace(tuple(f"x{i}" for i in range(n)), dist, tuple(F(1, n) for _ in range(n)))


def mean_distance(space):
    return sum(
        space.weights[i] * space.weights[j] * space.dist[i][j]
        for i in range(space.n)
        for j in range(space.n)
    )


def test_comb_codes_to_star():
    for n in (2, 3, 5):
        coded = code_excursion(comb(n))
        assert are_isomorphic(coded.space, star(n))
        assert coded.resolution_bound == 0
        assert len(coded.segments) == n


def test_coded_space_is_valid_and_canonical():
    rng = random.Random(43)
    for _ in range(40):
        h = random_excursion(rng)
        coded = code_excursion(h)
        assert validate(coded.space) == []
        assert is_canonical(coded.space)


def test_tree_distance_equals_path_distance_at_representatives():
    rng = random.Random(47)
    for _ in range(40):
        h = random_excursion(rng)
        coded = code_excursion(h)
        m = len(coded.segments)
        assert len(coded.representatives) == m
        assert len(coded.projection) == m
        for k in range(m):
            for l in range(m):
                p, q = coded.projection[k], coded.projection[l]
                want = dh(h, coded.representatives[k], coded.representatives[l])
                assert coded.space.dist[p][q] == want


def test_weights_are_pushed_segment_lengths():
    rng = random.Random(53)
    for _ in range(40):
        h = random_excursion(rng)
        coded = code_excursion(h)
        for p in range(coded.space.n):
            length = sum(
                hi - lo
                for (lo, hi), q in zip(coded.segments, coded.projection)
                if q == p
            )
            assert coded.space.weights[p] == length


def test_representatives_stay_inside_their_segments():
    rng = random.Random(59)
    for _ in range(30):
        h = random_excursion(rng)
        coded = code_excursion(h)
        for (lo, hi), r in zip(coded.segments, coded.representatives):
            assert lo <= r <= hi


def test_redundant_breakpoints_leave_the_tree_unchanged():
    rng = random.Random(61)
    for _ in range(30):
        h = random_excursion(rng, kind="pl")
        bps, vals = list(h.breakpoints), list(h.values)
        k = rng.randrange(len(bps) - 1)
        mid = (bps[k] + bps[k + 1]) / 2
        refined = pl_excursion(
            bps[: k + 1] + [mid] + bps[k + 1 :],
            vals[: k + 1] + [evaluate(h, mid)] + vals[k + 1 :],
        )
        assert are_isomorphic(code_excursion(refined).space, code_excursion(h).space)


def test_resolution_refinement_tightens_the_bound():
    t = tent()
    bounds = []
    for den in (8, 16, 32):
        res = tuple(F(k, den) for k in range(den + 1))
        coded = code_excursion(t, resolution=res)
        bounds.append(coded.resolution_bound)
    assert bounds == [F(1, 4), F(1, 8), F(1, 16)]


def test_tent_coding_expectation_at_sixteenths():
    res = tuple(F(k, 16) for k in range(17))
    coded = code_excursion(tent(), resolution=res)
    value = mean_distance(coded.space)
    assert value == F(21, 64)
    # Continuum target: the tent pushes Lebesgue measure to the uniform law
    # on heights, and its path distance is the height difference, so the
    # expectation of d(U, V) over the excursion itself is E|X - Y| = 1/3.
    assert abs(value - F(1, 3)) <= coded.resolution_bound
    phi = TruncatedMonomial(factors=((0, 1, 1),), cap=F(2))
    cross = evaluate_polynomial(coded.space, 2, phi)
    assert isinstance(cross, Fraction)
    assert cross == value


def test_four_point_condition_on_codes():
    rng = random.Random(67)
    for _ in range(60):
        h = random_excursion(rng)
        assert four_point_check(code_excursion(h).space) == []


def test_four_point_flags_the_unit_four_cycle():
    rows = [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]
    c4 = FiniteMMSpace(
        ("a", "b", "c", "d"),
        tuple(tuple(F(x) for x in row) for row in rows),
        (F(1, 4),) * 4,
    )
    assert four_point_check(c4) != []


def test_pl_cut_points_merge_breakpoints_and_resolution():
    cuts = pl_cut_points(tent(), (F(1, 3),))
    assert cuts == (F(0), F(1, 3), F(1, 2), F(1))
    cuts16 = pl_cut_points(tent(), tuple(F(k, 16) for k in range(17)))
    assert len(cuts16) == 17
    assert cuts16 == tuple(sorted(set(cuts16)))
