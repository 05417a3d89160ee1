"""Prohorov distance between two measures on one finite (pseudo)metric space.

Two independent routes are provided and kept intentionally separate:

* `prohorov_bruteforce` works straight from the definition
  inf { eps > 0 : mu(A) <= nu(A^eps) + eps for all A }, with the strict
  enlargement A^eps = { x : d(A, x) < eps }, enumerating all 2^n subsets.
* `prohorov_flow` uses the coupling characterization
  inf { eps : some coupling puts mass >= 1 - eps on { d < eps } }, computing
  coupling mass by exact max-flow per distance threshold.

Both return the exact infimum; the defining condition may fail at the
returned value itself (it holds for every strictly larger eps). Their
agreement on every instance is one of the package's tested invariants, not
an assumption.

The one-sided subset condition already implies its mirror image for
probability measures (apply it to the complement of an enlargement), so the
brute force does not need a symmetrized pass; the flow route is symmetric
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SizeError, ValidationError
from .flow import max_subcoupling

BRUTEFORCE_CAP = 12


@dataclass(frozen=True)
class CommonSpaceMeasures:
    """Two probability weight vectors on one shared distance matrix.

    The matrix may be a pseudometric (zero off-diagonal entries are fine);
    symmetry, zero diagonal, nonnegativity and the triangle inequality are
    required.
    """

    dist: tuple
    mu: tuple
    nu: tuple

    @property
    def n(self) -> int:
        return len(self.dist)


def validate_common(cm: CommonSpaceMeasures, tol=0) -> list:
    violations = []
    n = cm.n
    if any(len(row) != n for row in cm.dist):
        violations.append("dist is not square")
        return violations
    for name, vec in (("mu", cm.mu), ("nu", cm.nu)):
        if len(vec) != n:
            violations.append(f"{name} length {len(vec)} != {n}")
            continue
        if any(w < -tol for w in vec):
            violations.append(f"{name} has a negative entry")
        if abs(sum(vec) - 1) > tol:
            violations.append(f"{name} sums to {sum(vec)}, expected 1")
    d = cm.dist
    for i in range(n):
        if abs(d[i][i]) > tol:
            violations.append(f"dist[{i}][{i}] != 0")
        for j in range(i + 1, n):
            if d[i][j] < -tol:
                violations.append(f"dist[{i}][{j}] is negative")
            if abs(d[i][j] - d[j][i]) > tol:
                violations.append(f"dist[{i}][{j}] != dist[{j}][{i}]")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][j] > d[i][k] + d[k][j] + tol:
                    violations.append(
                        f"triangle violation at ({i}, {j}) via {k}"
                    )
    return violations


def _require_valid(cm: CommonSpaceMeasures) -> None:
    violations = validate_common(cm)
    if violations:
        raise ValidationError(
            f"invalid common-space input: {violations[0]}", violations
        )


def _scan_infimum(boundaries, t_of_piece):
    """Exact infimum of an up-set of feasible eps described piecewise.

    Piece j is the interval (boundaries[j], boundaries[j+1]] (the last piece
    is unbounded); eps in piece j is feasible iff eps >= t_of_piece(j).
    Feasibility is monotone, so the first piece with a solution decides.
    """
    K = len(boundaries)
    for j in range(K):
        t = t_of_piece(j)
        if t <= boundaries[j]:
            return boundaries[j]
        if j + 1 < K:
            if t <= boundaries[j + 1]:
                return t
        else:
            return t
    raise AssertionError("unreachable: last piece is always feasible")


def prohorov_bruteforce(cm: CommonSpaceMeasures, cap: int = BRUTEFORCE_CAP):
    """Subset-enumeration route; exact, exponential, capped at `cap` points."""
    _require_valid(cm)
    n = cm.n
    if n > cap:
        raise SizeError(f"{n} points exceeds brute-force cap {cap}; use prohorov_flow")
    d = cm.dist
    worst = None

    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        mu_a = sum(cm.mu[i] for i in members)
        dist_to_a = [min(d[a][x] for a in members) for x in range(n)]
        boundaries = sorted(set(dist_to_a))  # always starts at 0 (members)

        def t_of_piece(j, _b=boundaries, _da=dist_to_a, _ma=mu_a):
            nu_v = sum(cm.nu[x] for x in range(n) if _da[x] <= _b[j])
            return _ma - nu_v

        threshold = _scan_infimum(boundaries, t_of_piece)
        if worst is None or threshold > worst:
            worst = threshold
    return worst


def prohorov_condition_holds(cm: CommonSpaceMeasures, eps, cap: int = BRUTEFORCE_CAP) -> bool:
    """Whether mu(A) <= nu(A^eps) + eps for every subset A, strict enlargement."""
    _require_valid(cm)
    n = cm.n
    if n > cap:
        raise SizeError(f"{n} points exceeds brute-force cap {cap}")
    d = cm.dist
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        mu_a = sum(cm.mu[i] for i in members)
        nu_enl = sum(
            cm.nu[x] for x in range(n) if min(d[a][x] for a in members) < eps
        )
        if mu_a > nu_enl + eps:
            return False
    return True


def prohorov_flow(cm: CommonSpaceMeasures):
    """Coupling route via exact max-flow at each distance threshold."""
    _require_valid(cm)
    n = cm.n
    d = cm.dist
    values = sorted({d[i][j] for i in range(n) for j in range(n)})
    boundaries = values if values and values[0] == 0 else [Fraction(0)] + values

    flow_cache = {}

    def t_of_piece(j):
        u = boundaries[j]
        if j not in flow_cache:
            allowed = [
                (i, k) for i in range(n) for k in range(n) if d[i][k] <= u
            ]
            flow_cache[j], _ = max_subcoupling(cm.mu, cm.nu, allowed)
        return 1 - flow_cache[j]

    return _scan_infimum(boundaries, t_of_piece)


def prohorov(cm: CommonSpaceMeasures):
    """Default route (flow)."""
    return prohorov_flow(cm)
