"""Finite metric measure spaces: validation, canonical form, sampling, I/O.

A space is a labelled finite pseudometric with a probability weight vector.
Zero off-diagonal distances and zero weights are valid input; `canonicalize`
removes both, which is the representative form every distance routine works
on (distances here are invariants of the measure-preserving-isometry class).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .exact import format_scalar, parse_scalar

MMSPACE_FORMAT = "mmspace/1"


@dataclass(frozen=True)
class FiniteMMSpace:
    labels: tuple
    dist: tuple
    weights: tuple

    @property
    def n(self) -> int:
        return len(self.labels)


def mm_space(labels, dist, weights, exact: bool = True) -> FiniteMMSpace:
    """Build a FiniteMMSpace from loose containers, converting scalars."""
    return FiniteMMSpace(
        labels=tuple(str(l) for l in labels),
        dist=tuple(tuple(parse_scalar(x, exact) for x in row) for row in dist),
        weights=tuple(parse_scalar(w, exact) for w in weights),
    )


def validate(space: FiniteMMSpace, tol=0) -> list:
    """Return a list of human-readable violations, empty when valid.

    Dimension mismatches are reported (not raised) and suppress the checks
    that would index out of range. `tol` loosens every comparison for float
    inputs; exact inputs use tol=0.
    """
    violations = []
    n = len(space.labels)
    if len(space.weights) != n:
        violations.append(
            f"weights length {len(space.weights)} != number of labels {n}"
        )
    if len(space.dist) != n:
        violations.append(f"dist has {len(space.dist)} rows, expected {n}")
    bad_rows = [i for i, row in enumerate(space.dist) if len(row) != n]
    for i in bad_rows:
        violations.append(f"dist row {i} has {len(space.dist[i])} entries, expected {n}")
    if len(space.dist) != n or bad_rows or len(space.weights) != n:
        return violations

    for i, w in enumerate(space.weights):
        if w < -tol:
            violations.append(f"weight {i} is negative: {w}")
    total = sum(space.weights)
    if abs(total - 1) > tol:
        violations.append(f"weights sum to {total}, expected 1")

    d = space.dist
    for i in range(n):
        if abs(d[i][i]) > tol:
            violations.append(f"dist[{i}][{i}] = {d[i][i]}, expected 0")
        for j in range(i + 1, n):
            if d[i][j] < -tol:
                violations.append(f"dist[{i}][{j}] is negative: {d[i][j]}")
            if abs(d[i][j] - d[j][i]) > tol:
                violations.append(f"dist[{i}][{j}] != dist[{j}][{i}]")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][j] > d[i][k] + d[k][j] + tol:
                    violations.append(
                        f"triangle violation: dist[{i}][{j}] > dist[{i}][{k}] + dist[{k}][{j}]"
                    )
    return violations


def require_valid(space: FiniteMMSpace, tol=0) -> None:
    violations = validate(space, tol)
    if violations:
        raise ValidationError(
            f"invalid space: {violations[0]} ({len(violations)} violation(s))",
            violations,
        )


def is_canonical(space: FiniteMMSpace, tol=0) -> bool:
    if any(w <= tol for w in space.weights):
        return False
    n = space.n
    for i in range(n):
        for j in range(i + 1, n):
            if space.dist[i][j] <= tol:
                return False
    return True


def canonicalize(space: FiniteMMSpace, tol=0) -> FiniteMMSpace:
    """Merge distance-<=tol pairs (summing weights) and drop weight-<=tol points.

    Representatives keep the smallest original index and its label; order is
    by representative index. With tol > 0 the weights are renormalized to sum
    to exactly 1 after dropping; with exact input that is a no-op.
    """
    require_valid(space, tol)
    n = space.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if space.dist[i][j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    class_weight = {}
    for i in range(n):
        r = find(i)
        class_weight[r] = class_weight.get(r, 0) + space.weights[i]
    reps = sorted(r for r, w in class_weight.items() if w > tol)

    weights = [class_weight[r] for r in reps]
    total = sum(weights)
    if total != 1 and total > 0:
        weights = [w / total for w in weights]
    return FiniteMMSpace(
        labels=tuple(space.labels[r] for r in reps),
        dist=tuple(tuple(space.dist[a][b] for b in reps) for a in reps),
        weights=tuple(weights),
    )


def are_isomorphic(a: FiniteMMSpace, b: FiniteMMSpace, tol=0) -> bool:
    """Measure-preserving isometry test between canonical forms (backtracking)."""
    a = canonicalize(a, tol)
    b = canonicalize(b, tol)
    if a.n != b.n:
        return False
    if sorted(a.weights) != sorted(b.weights):
        return False
    n = a.n
    assigned = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for j in range(n):
            if used[j] or a.weights[i] != b.weights[j]:
                continue
            if any(a.dist[i][k] != b.dist[j][assigned[k]] for k in range(i)):
                continue
            assigned[i] = j
            used[j] = True
            if extend(i + 1):
                return True
            used[j] = False
            assigned[i] = -1
        return False

    return extend(0)


def sample_mm_space(seed: int, n_max: int = 5, diam_max=Fraction(1)) -> FiniteMMSpace:
    """Seeded random canonical space with rational entries.

    Distances start on a coarse grid diam_max * k/q and are closed under
    min-plus (Floyd-Warshall), so the triangle inequality holds exactly;
    weights are normalized small integers. Same seed, same space.
    """
    diam_max = parse_scalar(diam_max)
    if diam_max <= 0:
        raise ValidationError("diam_max must be positive")
    rng = random.Random(seed)
    n = rng.randint(1, max(1, n_max))
    den = rng.choice((2, 3, 4, 6, 8, 12))
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = diam_max * Fraction(rng.randint(1, den), den)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = d[i][k] + d[k][j]
                if via < d[i][j]:
                    d[i][j] = via
    raw = [rng.randint(1, 8) for _ in range(n)]
    total = sum(raw)
    weights = tuple(Fraction(r, total) for r in raw)
    space = FiniteMMSpace(
        labels=tuple(f"p{i}" for i in range(n)),
        dist=tuple(tuple(row) for row in d),
        weights=weights,
    )
    return canonicalize(space)


# ---------------------------------------------------------------------------
# serialization


def space_to_obj(space: FiniteMMSpace) -> dict:
    return {
        "format": MMSPACE_FORMAT,
        "labels": list(space.labels),
        "dist": [[format_scalar(x) for x in row] for row in space.dist],
        "weights": [format_scalar(w) for w in space.weights],
    }


def space_from_obj(obj, exact: bool = True, check: bool = True) -> FiniteMMSpace:
    if not isinstance(obj, dict):
        raise ValidationError("space document must be a JSON object")
    if obj.get("format") != MMSPACE_FORMAT:
        raise ValidationError(f"unsupported format: {obj.get('format')!r}")
    for key in ("labels", "dist", "weights"):
        if key not in obj:
            raise ValidationError(f"missing field: {key}")
    space = mm_space(obj["labels"], obj["dist"], obj["weights"], exact)
    if check:
        require_valid(space, 0 if exact else 1e-9)
    return space


def dumps_json(obj) -> str:
    """Canonical JSON rendering used for every artifact this package writes."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def loads_document(text: str):
    # parse_float=str defers float conversion so "0.1" can become 1/10 exactly
    return json.loads(text, parse_float=str)


def load_space(path, exact: bool = True, check: bool = True) -> FiniteMMSpace:
    with open(path, "r", encoding="utf-8") as f:
        return space_from_obj(loads_document(f.read()), exact, check)


def save_space(path, space: FiniteMMSpace) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_json(space_to_obj(space)))
