"""Build finite metric measure spaces and compare measures on one of them."""

from fractions import Fraction

from mmdist import (
    CommonSpaceMeasures,
    canonicalize,
    mm_space,
    prohorov_bruteforce,
    prohorov_flow,
    sample_mm_space,
    validate,
)

F = Fraction


def main():
    # A three point path with a redundant zero-distance twin of the middle.
    labels = ("left", "mid", "mid-twin", "right")
    dist = (
        (F(0), F(1, 2), F(1, 2), F(1)),
        (F(1, 2), F(0), F(0), F(1, 2)),
        (F(1, 2), F(0), F(0), F(1, 2)),
        (F(1), F(1, 2), F(1, 2), F(0)),
    )
    weights = (F(1, 4), F(1, 8), F(1, 8), F(1, 2))
    space = mm_space(labels, dist, weights)
    print("violations:", validate(space))
    merged = canonicalize(space)
    print("canonical labels:", merged.labels)
    print("canonical weights:", [str(w) for w in merged.weights])

    # Two measures on the canonical space: shift half the right mass left.
    mu = merged.weights
    nu = (mu[0] + F(1, 4), mu[1], mu[2] - F(1, 4))
    cm = CommonSpaceMeasures(merged.dist, mu, nu)
    via_flow = prohorov_flow(cm)
    via_enumeration = prohorov_bruteforce(cm)
    print("prohorov by flow:        ", via_flow)
    print("prohorov by enumeration: ", via_enumeration)
    assert via_flow == via_enumeration

    # Sampled spaces are deterministic in their seed.
    a = sample_mm_space(3)
    b = sample_mm_space(3)
    assert a.labels == b.labels and a.dist == b.dist and a.weights == b.weights
    print("sample seed 3:", a.n, "points, weights", [str(w) for w in a.weights])


if __name__ == "__main__":
    main()
