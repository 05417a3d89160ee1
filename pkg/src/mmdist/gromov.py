"""Box-type distances between metric measure spaces, exact where capped.

box_lambda(A, B, lam) is the minimum over correspondences K (subsets of the
cell grid points(A) x points(B)) of

    max( distortion(K), (1 - maxmass(K)) / lam )

where distortion is the worst distance mismatch over pairs of matched pairs
and maxmass is the largest total mass a subcoupling of the two weight
vectors can place on K. gromov_prohorov is half the lam = 1/2 value.

Search order: ascending distortion thresholds D over the finitely many
achievable mismatch values. Correspondences with distortion <= D are the
cliques of a compatibility graph on cells, and only maximal cliques can be
optimal at a given threshold (mass is monotone under superset while the
distortion bound is shared), so the sweep enumerates maximal cliques per
threshold, scores them with exact max-flow, and stops once the threshold
alone can no longer beat the incumbent. Exact up to `cap` cells; beyond the
cap (or if clique enumeration exceeds its guard) the result degrades to a
certified upper bound and says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SizeError, ValidationError
from .exact import parse_scalar
from .flow import max_subcoupling
from .spaces import FiniteMMSpace, canonicalize

DEFAULT_CELL_CAP = 20
DEFAULT_CLIQUE_LIMIT = 200_000


@dataclass(frozen=True)
class Correspondence:
    """A cell set with its two scoring ingredients."""

    pairs: tuple
    distortion: object
    max_coupling_mass: object


@dataclass(frozen=True)
class BoxResult:
    value: object
    lam: object
    exact: bool
    pairs: tuple  # witness achieving value; indices refer to canonical forms


@dataclass(frozen=True)
class GPResult:
    value: object
    box_value: object
    exact: bool
    pairs: tuple


def distortion(pairs, a: FiniteMMSpace, b: FiniteMMSpace):
    """Worst |d_A(x, x') - d_B(y, y')| over pairs of matched pairs."""
    pairs = tuple(pairs)
    if not pairs:
        return Fraction(0)
    i0, j0 = pairs[0]
    # zero of the scalar type the matrices carry (Fraction stays Fraction)
    worst = abs(a.dist[i0][i0] - b.dist[j0][j0])
    for k, (i, j) in enumerate(pairs):
        for i2, j2 in pairs[k + 1 :]:
            diff = abs(a.dist[i][i2] - b.dist[j][j2])
            if diff > worst:
                worst = diff
    return worst


def correspondence_info(a: FiniteMMSpace, b: FiniteMMSpace, pairs) -> Correspondence:
    pairs = tuple(sorted(set(map(tuple, pairs))))
    for i, j in pairs:
        if not (0 <= i < a.n and 0 <= j < b.n):
            raise ValidationError(f"cell ({i}, {j}) out of range")
    mass, _ = max_subcoupling(a.weights, b.weights, pairs) if pairs else (0, {})
    return Correspondence(pairs, distortion(pairs, a, b), mass)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _neighbor_masks(cells, a, b, threshold):
    nc = len(cells)
    nbr = [0] * nc
    for c1 in range(nc):
        i, j = cells[c1]
        for c2 in range(c1 + 1, nc):
            i2, j2 = cells[c2]
            if abs(a.dist[i][i2] - b.dist[j][j2]) <= threshold:
                nbr[c1] |= 1 << c2
                nbr[c2] |= 1 << c1
    return nbr


def _max_cliques(nc, nbr, limit):
    """Maximal cliques as bitmasks (Bron-Kerbosch with pivoting).

    Raises SizeError when more than `limit` cliques come out, which callers
    treat as "fall back to the certified upper bound".
    """
    out = []

    def bk(r, p, x):
        if p == 0 and x == 0:
            out.append(r)
            if len(out) > limit:
                raise SizeError(f"maximal clique count exceeds guard {limit}")
            return
        px = p | x
        pivot, best = -1, -1
        m = px
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            cnt = (p & nbr[u]).bit_count()
            if cnt > best:
                best, pivot = cnt, u
        m = p & ~nbr[pivot]
        while m:
            vbit = m & -m
            v = vbit.bit_length() - 1
            m &= m - 1
            bk(r | vbit, p & nbr[v], x & nbr[v])
            p &= ~vbit
            x |= vbit

    bk(0, (1 << nc) - 1, 0)
    return out


def _northwest_support(mu, nu):
    """Support cells of the order-preserving (northwest corner) coupling."""
    cells = []
    i = j = 0
    ri, rj = mu[0], nu[0]
    while True:
        if ri > 0 and rj > 0:
            cells.append((i, j))
        step = min(ri, rj)
        ri -= step
        rj -= step
        if ri == 0 and i + 1 < len(mu):
            i += 1
            ri = mu[i]
        elif rj == 0 and j + 1 < len(nu):
            j += 1
            rj = nu[j]
        else:
            break
    return tuple(cells)


def _heuristic_candidates(a, b, cells, diffs):
    """Deterministic candidate correspondences for the over-cap upper bound."""
    yield _northwest_support(a.weights, b.weights)
    picks = sorted(set(diffs[max(0, len(diffs) * k // 12 - 1)] for k in range(1, 13)))
    order = sorted(
        range(len(cells)),
        key=lambda c: (-(min(a.weights[cells[c][0]], b.weights[cells[c][1]])), c),
    )
    for threshold in picks:
        chosen = []
        for c in order:
            i, j = cells[c]
            if all(
                abs(a.dist[i][i2] - b.dist[j][j2]) <= threshold
                for i2, j2 in chosen
            ):
                chosen.append((i, j))
        yield tuple(sorted(chosen))


def box_lambda_detail(
    a: FiniteMMSpace,
    b: FiniteMMSpace,
    lam,
    cap: int = DEFAULT_CELL_CAP,
    clique_limit: int = DEFAULT_CLIQUE_LIMIT,
    seeds=(),
) -> BoxResult:
    """Full result for box_lambda: value, exactness flag, achieving cells.

    Inputs are canonicalized internally (the value is an isomorphism-class
    invariant, and merging zero-distance points never changes it); witness
    indices refer to the canonical forms. `seeds` are caller-supplied
    correspondences used as starting upper bounds (and as fallbacks past the
    cap).
    """
    if isinstance(lam, (str, int)):
        lam = parse_scalar(lam)
    if lam <= 0:
        raise ValidationError("lambda must be positive")
    A = canonicalize(a)
    B = canonicalize(b)
    n1, n2 = A.n, B.n
    cells = [(i, j) for i in range(n1) for j in range(n2)]
    nc = len(cells)

    mass_cache = {}

    def mass_of(pairs):
        key = frozenset(pairs)
        if key not in mass_cache:
            mass_cache[key] = max_subcoupling(A.weights, B.weights, pairs)[0]
        return mass_cache[key]

    best = (1 - 0) / lam  # empty correspondence
    best_pairs = ()

    def consider(pairs):
        nonlocal best, best_pairs
        pairs = tuple(sorted(set(map(tuple, pairs))))
        for i, j in pairs:
            if not (0 <= i < n1 and 0 <= j < n2):
                raise ValidationError(f"seed cell ({i}, {j}) out of range")
        dis = distortion(pairs, A, B)
        if dis >= best:
            return
        m = mass_of(pairs) if pairs else 0
        val = max(dis, (1 - m) / lam)
        if val < best:
            best, best_pairs = val, pairs

    consider(cells)
    for seed in seeds:
        consider(seed)

    if nc > cap:
        # strided subsample keeps the fallback from going quadratic in cells
        stride = max(1, nc * nc // 20000)
        sampled = sorted(
            {
                abs(A.dist[cells[c1][0]][cells[c2][0]] - B.dist[cells[c1][1]][cells[c2][1]])
                for k, (c1, c2) in enumerate(
                    (u, v) for u in range(nc) for v in range(u, nc)
                )
                if k % stride == 0
            }
        )
        for cand in _heuristic_candidates(A, B, cells, sampled):
            consider(cand)
        return BoxResult(best, lam, False, best_pairs)

    diffs = sorted(
        {
            abs(A.dist[i][i2] - B.dist[j][j2])
            for i, j in cells
            for i2, j2 in cells
        }
    )

    exact = True
    seen = set()
    try:
        for threshold in diffs:
            if threshold >= best:
                break
            nbr = _neighbor_masks(cells, A, B, threshold)
            for mask in _max_cliques(nc, nbr, clique_limit):
                if mask in seen:
                    continue
                seen.add(mask)
                pairs = tuple(cells[c] for c in _bits(mask))
                dis = distortion(pairs, A, B)
                if dis >= best:
                    continue
                rows = {i for i, _ in pairs}
                cols = {j for _, j in pairs}
                ub_mass = min(
                    sum(A.weights[i] for i in rows),
                    sum(B.weights[j] for j in cols),
                )
                if max(dis, (1 - ub_mass) / lam) >= best:
                    continue
                m = mass_of(pairs)
                val = max(dis, (1 - m) / lam)
                if val < best:
                    best, best_pairs = val, pairs
    except SizeError:
        exact = False
        for cand in _heuristic_candidates(A, B, cells, diffs):
            consider(cand)
    return BoxResult(best, lam, exact, best_pairs)


def box_lambda(a: FiniteMMSpace, b: FiniteMMSpace, lam, cap: int = DEFAULT_CELL_CAP):
    return box_lambda_detail(a, b, lam, cap).value


def gromov_prohorov_detail(
    a: FiniteMMSpace,
    b: FiniteMMSpace,
    cap: int = DEFAULT_CELL_CAP,
    clique_limit: int = DEFAULT_CLIQUE_LIMIT,
    seeds=(),
) -> GPResult:
    box = box_lambda_detail(a, b, Fraction(1, 2), cap, clique_limit, seeds)
    return GPResult(box.value / 2, box.value, box.exact, box.pairs)


def gromov_prohorov(a: FiniteMMSpace, b: FiniteMMSpace, cap: int = DEFAULT_CELL_CAP):
    """Gromov-Prohorov distance: half the lam = 1/2 box value."""
    return gromov_prohorov_detail(a, b, cap).value


def optimal_correspondence(
    a: FiniteMMSpace,
    b: FiniteMMSpace,
    lam,
    cap: int = DEFAULT_CELL_CAP,
    clique_limit: int = DEFAULT_CLIQUE_LIMIT,
):
    """Lexicographically smallest optimal correspondence (row-major cell order).

    Tie-break contract: among all K achieving box_lambda, return the one
    whose sorted cell-index sequence is lexicographically smallest, shorter
    prefixes winning. Built greedily; each extension is validated by a
    clique-feasibility check, so the result is exact. Raises SizeError on
    instances past the exact cap.
    """
    detail = box_lambda_detail(a, b, lam, cap, clique_limit)
    if not detail.exact:
        raise SizeError("instance exceeds the exact cap; optimal correspondence undefined")
    A = canonicalize(a)
    B = canonicalize(b)
    lam = detail.lam
    v = detail.value
    m_req = 1 - lam * v
    if m_req <= 0:
        return ()
    cells = [(i, j) for i in range(A.n) for j in range(B.n)]
    nc = len(cells)
    nbr = _neighbor_masks(cells, A, B, v)

    mass_cache = {}

    def mass_of(idx_tuple):
        key = frozenset(idx_tuple)
        if key not in mass_cache:
            mass_cache[key] = max_subcoupling(
                A.weights, B.weights, [cells[c] for c in key]
            )[0]
        return mass_cache[key]

    def feasible(prefix, prefix_mask, last):
        if mass_of(prefix) >= m_req:
            return True
        allowed = [
            c
            for c in range(last + 1, nc)
            if nbr[c] & prefix_mask == prefix_mask
        ]
        if not allowed:
            return False
        remap = {c: k for k, c in enumerate(allowed)}
        sub_nbr = [0] * len(allowed)
        for k, c in enumerate(allowed):
            for c2 in allowed[k + 1 :]:
                if nbr[c] >> c2 & 1:
                    sub_nbr[k] |= 1 << remap[c2]
                    sub_nbr[remap[c2]] |= 1 << k
        for mask in _max_cliques(len(allowed), sub_nbr, DEFAULT_CLIQUE_LIMIT):
            ext = prefix + tuple(allowed[k] for k in _bits(mask))
            if mass_of(ext) >= m_req:
                return True
        return False

    chosen = ()
    chosen_mask = 0
    start = 0
    while not (chosen and mass_of(chosen) >= m_req):
        for c in range(start, nc):
            if nbr[c] & chosen_mask != chosen_mask:
                continue
            if feasible(chosen + (c,), chosen_mask | 1 << c, c):
                chosen = chosen + (c,)
                chosen_mask |= 1 << c
                start = c + 1
                break
        else:
            raise AssertionError("optimum certifies a feasible correspondence exists")
    return tuple(cells[c] for c in chosen)
