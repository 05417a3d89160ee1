"""Code excursions into finite tree-like spaces and watch the resolution sharpen."""

from fractions import Fraction

from mmdist import (
    TruncatedMonomial,
    code_excursion,
    dh,
    evaluate_polynomial,
    four_point_check,
    tent,
)

F = Fraction


def main():
    h = tent()
    print("tent heights:", [str(v) for v in h.values])
    print("dh(1/4, 3/4) =", dh(h, F(1, 4), F(3, 4)))
    print("dh(1/4, 5/8) =", dh(h, F(1, 4), F(5, 8)))

    mean_distance = TruncatedMonomial(((0, 1, 1),), cap=F(2))
    for den in (4, 8, 16):
        cuts = tuple(F(k, den) for k in range(1, den))
        coded = code_excursion(h, resolution=cuts)
        mean = evaluate_polynomial(coded.space, 2, mean_distance)
        print(
            f"cuts at 1/{den}: {coded.space.n} points, "
            f"resolution bound {coded.resolution_bound}, "
            f"mean distance {mean}"
        )
        assert four_point_check(coded.space) == []
        # The mean tree distance of the continuum limit is 1/3.
        assert abs(mean - F(1, 3)) <= coded.resolution_bound


if __name__ == "__main__":
    main()
