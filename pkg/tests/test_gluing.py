"""Gluing along correspondences and the glue-search upper bound."""

import random
from fractions import Fraction

from mmdist import (
    ValidationError,
    build_glued_space,
    canonicalize,
    check_triangle,
    distortion,
    glued_common_space,
    glued_upper_bound,
    gromov_prohorov,
    optimal_correspondence,
    prohorov_flow,
    prohorov_of_glue,
    sample_mm_space,
)
from mmdist.gluing import repaired_random_cross

F = Fraction


def sampled_pair(rng, n_max=3):
    a = canonicalize(sample_mm_space(rng.randint(0, 10**9), n_max=n_max))
    b = canonicalize(sample_mm_space(rng.randint(0, 10**9), n_max=n_max))
    return a, b


def glue_at_half_distortion(rng, a, b):
    pairs = optimal_correspondence(a, b, F(1, 2))
    eps = distortion(pairs, a, b) / 2 + F(rng.randint(0, 3), 8)
    return build_glued_space(a, b, pairs, eps)


def test_glued_space_embeds_both_blocks():
    rng = random.Random(97)
    for _ in range(30):
        a, b = sampled_pair(rng)
        g = glue_at_half_distortion(rng, a, b)
        assert g.n1 == a.n and g.n2 == b.n
        for x in range(a.n):
            for x2 in range(a.n):
                assert g.dist[x][x2] == a.dist[x][x2]
        for y in range(b.n):
            for y2 in range(b.n):
                assert g.dist[a.n + y][a.n + y2] == b.dist[y][y2]
        assert sum(g.mu_ext) == 1 and sum(g.nu_ext) == 1
        assert all(w == 0 for w in g.mu_ext[a.n :])
        assert all(w == 0 for w in g.nu_ext[: a.n])


def test_glued_space_satisfies_the_triangle_inequality():
    rng = random.Random(101)
    for _ in range(30):
        a, b = sampled_pair(rng)
        assert check_triangle(glue_at_half_distortion(rng, a, b)) == []


def test_cross_distances_follow_the_formula():
    rng = random.Random(103)
    for _ in range(20):
        a, b = sampled_pair(rng)
        pairs = optimal_correspondence(a, b, F(1, 2))
        eps = distortion(pairs, a, b) / 2 + F(1, 8)
        g = build_glued_space(a, b, pairs, eps)
        for x in range(a.n):
            for y in range(b.n):
                want = min(a.dist[x][p] + eps + b.dist[q][y] for p, q in pairs)
                assert g.dist[x][a.n + y] == want
                assert g.dist[a.n + y][x] == want


def test_build_rejects_bad_input():
    rng = random.Random(107)
    a, b = sampled_pair(rng)
    pairs = optimal_correspondence(a, b, F(1, 2))
    dis = distortion(pairs, a, b)
    if dis > 0:
        try:
            build_glued_space(a, b, pairs, dis / 2 - F(1, 1000))
            assert False
        except ValidationError:
            pass
    for bad_pairs in ((), ((a.n, 0),), ((0, b.n),)):
        try:
            build_glued_space(a, b, bad_pairs, F(1))
            assert False
        except ValidationError:
            pass
    try:
        build_glued_space(a, b, pairs, F(-1, 2))
        assert False
    except ValidationError:
        pass


def test_glue_prohorov_matches_the_generic_route():
    # The cross-only computation must equal plain prohorov on the full
    # glued matrix with the two embedded measures.
    rng = random.Random(109)
    for _ in range(30):
        a, b = sampled_pair(rng)
        g = glue_at_half_distortion(rng, a, b)
        assert prohorov_of_glue(g) == prohorov_flow(glued_common_space(g))


def test_glue_value_is_at_least_eps():
    rng = random.Random(113)
    for _ in range(30):
        a, b = sampled_pair(rng)
        g = glue_at_half_distortion(rng, a, b)
        assert prohorov_of_glue(g) >= min(g.eps, 1)


def test_repaired_random_cross_is_triangle_valid():
    rng = random.Random(127)
    for _ in range(30):
        a, b = sampled_pair(rng)
        cross = repaired_random_cross(a, b, rng)
        for x in range(a.n):
            for y in range(b.n):
                assert cross[x][y] >= 0
                for x2 in range(a.n):
                    assert cross[x][y] <= a.dist[x][x2] + cross[x2][y]
                    assert a.dist[x][x2] <= cross[x][y] + cross[x2][y]
                for y2 in range(b.n):
                    assert cross[x][y] <= cross[x][y2] + b.dist[y2][y]
                    assert b.dist[y][y2] <= cross[x][y] + cross[x][y2]


def test_search_never_beats_the_distance_and_attains_it():
    rng = random.Random(131)
    for _ in range(20):
        a, b = sampled_pair(rng)
        res = glued_upper_bound(a, b, search_budget=8, seed=3)
        gp = gromov_prohorov(a, b)
        assert res.value >= gp
        assert res.value == gp
        assert res.source in ("full", "clique", "random")
        assert res.evaluations >= 9


def test_search_is_deterministic():
    rng = random.Random(137)
    a, b = sampled_pair(rng)
    r1 = glued_upper_bound(a, b, search_budget=16, seed=5)
    r2 = glued_upper_bound(a, b, search_budget=16, seed=5)
    assert r1 == r2


def test_search_witness_pairs_reproduce_the_value():
    rng = random.Random(139)
    for _ in range(15):
        a, b = sampled_pair(rng)
        res = glued_upper_bound(a, b, search_budget=4, seed=1)
        if res.pairs is not None:
            g = build_glued_space(canonicalize(a), canonicalize(b), res.pairs, res.eps)
            assert prohorov_of_glue(g) == res.value
