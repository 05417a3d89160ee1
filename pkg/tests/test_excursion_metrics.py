"""Level distance, epigraph Hausdorff distance, and their sum on excursions."""

import random
from fractions import Fraction

from mmdist import (
    comb,
    d_excursion,
    d_excursion_detail,
    d_gamma,
    d_gamma_detail,
    d_lambda,
    directed_gamma_sq,
    evaluate,
    pl_excursion,
    random_excursion,
    sqrt_if_square,
    step_one,
    sup_diff,
    tent,
    zero_excursion,
)
from mmdist.excursion_metrics import _directed_bb

F = Fraction

TOL = F(1, 10**9)


def measure_above(h, g, eps):
    """lambda{ |h - g| > eps } exactly.

    On each open piece of the union refinement the difference is linear, so
    two interior samples reconstruct it; endpoint values carry no measure.
    """
    cuts = sorted(set(h.breakpoints) | set(g.breakpoints))
    total = F(0)
    for lo, hi in zip(cuts, cuts[1:]):
        p = lo + (hi - lo) / 3
        q = lo + 2 * (hi - lo) / 3
        vp = evaluate(h, p) - evaluate(g, p)
        vq = evaluate(h, q) - evaluate(g, q)
        slope = (vq - vp) / (q - p)
        da = vp + slope * (lo - p)
        db = vp + slope * (hi - p)
        length = hi - lo
        if slope == 0:
            if abs(da) > eps:
                total += length
            continue
        # |da + slope * x| <= eps exactly between the two crossings.
        x1 = (eps - da) / slope
        x2 = (-eps - da) / slope
        a, b = min(x1, x2), max(x1, x2)
        inside = min(max(b, 0), length) - min(max(a, 0), length)
        total += length - inside
    return total


def scaled_tent(c):
    return pl_excursion((0, F(1, 2), 1), (0, c, 0))


def test_lambda_pinned_values():
    assert d_lambda(tent(), scaled_tent(F(9, 10))) == F(1, 11)
    assert d_lambda(tent(), zero_excursion("pl")) == F(1, 2)
    assert d_lambda(comb(2), zero_excursion("pc")) == 1
    for n in (2, 3, 5):
        assert d_lambda(comb(n), step_one()) == 0


def test_lambda_value_is_an_infimum():
    # lambda{ tent > eps } = 1 - eps, so the strict condition m(eps) < eps
    # first holds just above 1/2 and fails at the value itself.
    h, g = tent(), zero_excursion("pl")
    v = d_lambda(h, g)
    assert v == F(1, 2)
    assert measure_above(h, g, v) == v
    assert measure_above(h, g, v + F(1, 1000)) < v + F(1, 1000)


def test_lambda_matches_the_measure_characterization():
    # The two exact conditions at distance 1e-9 pin the infimum: distinct
    # rationals with the denominators in play differ by far more than 2e-9.
    rng = random.Random(151)
    delta = F(1, 10**9)
    for _ in range(60):
        h = random_excursion(rng)
        g = random_excursion(rng)
        v = d_lambda(h, g)
        assert measure_above(h, g, v + delta) < v + delta
        if v > 0:
            assert measure_above(h, g, v - delta) >= v - delta
        else:
            assert measure_above(h, g, F(0)) == 0


def test_lambda_is_a_pseudometric():
    rng = random.Random(157)
    for _ in range(40):
        h = random_excursion(rng)
        g = random_excursion(rng)
        k = random_excursion(rng)
        assert d_lambda(h, h) == 0
        assert d_lambda(h, g) == d_lambda(g, h)
        assert d_lambda(h, k) <= d_lambda(h, g) + d_lambda(g, k)
        assert d_lambda(h, g) <= sup_diff(h, g)


def test_lambda_zero_iff_equal_almost_everywhere():
    assert d_lambda(comb(3), step_one()) == 0  # differ only at breakpoints
    bumped = pl_excursion((0, F(1, 4), F(1, 2), 1), (0, F(1, 2), 1, 0))
    assert d_lambda(tent(), bumped) == 0
    assert d_lambda(tent(), scaled_tent(F(1, 2))) > 0


def test_gamma_pc_pinned_values():
    # comb(8) has a zero at 1/4, exactly midway between comb(6)'s zeros at
    # 1/6 and 1/3, which makes the (6, 8) distance 1/12 rather than 1/24.
    assert d_gamma(comb(2), comb(3)) == F(1, 6)
    assert d_gamma(comb(2), comb(4)) == F(1, 4)
    assert d_gamma(comb(6), comb(8)) == F(1, 12)
    for n in (2, 3, 4, 6, 8):
        assert d_gamma(comb(n), zero_excursion("pc")) == F(1, 2 * n)
    det = d_gamma_detail(comb(6), comb(8))
    assert det.exact and det.certified
    assert det.lo == det.value == det.hi == F(1, 12)


def test_gamma_directed_parts_are_asymmetric():
    assert directed_gamma_sq(comb(8), comb(6)) == F(1, 144)
    assert directed_gamma_sq(comb(6), comb(8)) == F(1, 576)


def test_gamma_branch_and_bound_agrees_with_the_exact_route():
    # Same quantity through two very different algorithms.
    rng = random.Random(163)
    for _ in range(15):
        h = random_excursion(rng, kind="pc", max_pieces=4)
        g = random_excursion(rng, kind="pc", max_pieces=4)
        exact_sq = max(directed_gamma_sq(h, g), directed_gamma_sq(g, h))
        det = d_gamma_detail(h, g)
        root = sqrt_if_square(exact_sq)
        if root is not None:
            assert det.exact
            assert det.value == root
        else:
            assert not det.exact
        assert det.certified
        assert det.hi - det.lo <= 2 * TOL
        assert det.lo * det.lo <= exact_sq <= det.hi * det.hi
        for src, tgt in ((h, g), (g, h)):
            lo, hi = _directed_bb(src, tgt, TOL, 6000)
            assert lo * lo <= directed_gamma_sq(src, tgt) <= hi * hi
            assert hi - lo <= 2 * TOL


def test_gamma_scaled_tent_family():
    # Shrinking the tent by c leaves the worst point at the lower peak,
    # at distance (1 - c)/sqrt(5) from the taller graph.
    for c in (F(0), F(1, 4), F(1, 2), F(3, 4), F(9, 10)):
        target = (1 - c) ** 2 / 5
        low = tent() if c > 0 else zero_excursion("pl")
        det = d_gamma_detail(low if c == 0 else scaled_tent(c), tent())
        assert det.certified
        assert det.hi - det.lo <= 2 * TOL
        assert det.lo * det.lo <= target <= det.hi * det.hi


def test_gamma_mixed_kind_pair():
    det = d_gamma_detail(tent(), zero_excursion("pc"))
    assert det.certified
    assert det.lo * det.lo <= F(1, 5) <= det.hi * det.hi


def test_gamma_metric_properties_within_tolerance():
    rng = random.Random(167)
    for _ in range(12):
        h = random_excursion(rng, kind="pl", max_pieces=4)
        g = random_excursion(rng, kind="pl", max_pieces=4)
        k = random_excursion(rng, kind="pl", max_pieces=4)
        assert d_gamma(h, h) == 0
        dhg = d_gamma_detail(h, g)
        dgh = d_gamma_detail(g, h)
        assert dhg.value == dgh.value
        dgk = d_gamma_detail(g, k)
        dhk = d_gamma_detail(h, k)
        assert dhk.lo <= dhg.hi + dgk.hi
        assert dhg.hi <= sup_diff(h, g) + 2 * TOL
        assert dhg.lo <= dhg.value <= dhg.hi


def test_excursion_distance_is_the_sum():
    rng = random.Random(173)
    for _ in range(15):
        h = random_excursion(rng)
        g = random_excursion(rng)
        det = d_excursion_detail(h, g)
        assert det.value == det.gamma.value + det.lam
        assert det.lo == det.gamma.lo + det.lam
        assert det.hi == det.gamma.hi + det.lam
        assert det.certified == det.gamma.certified
        assert d_excursion(h, g) == det.value


def test_excursion_distance_pinned_values():
    assert d_excursion(comb(6), comb(8)) == F(1, 12)
    det = d_excursion_detail(tent(), scaled_tent(F(9, 10)))
    surd = F(1, 500)  # (1/(10*sqrt(5)))**2
    assert det.lam == F(1, 11)
    assert (det.lo - det.lam) ** 2 <= surd <= (det.hi - det.lam) ** 2
    assert abs(float(det.value) - 0.13563) < 1e-4


def test_excursion_distance_zero_on_equivalent_functions():
    bumped = pl_excursion((0, F(1, 4), F(1, 2), 1), (0, F(1, 2), 1, 0))
    assert d_excursion(tent(), bumped) == 0
    assert d_excursion(comb(4), comb(4)) == 0
