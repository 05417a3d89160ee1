"""Nonnegative excursions on [0, 1]: piecewise linear and piecewise constant.

Both kinds share the invariants h(0) = 0 and h >= 0. Piecewise-constant
excursions carry an explicit value at every breakpoint, required to be at
most the neighbouring piece values (the lower-semicontinuous convention);
the constructor defaults each interior breakpoint to the minimum of its
neighbours and the right endpoint to the last piece value.

`infimum` and `dh` are exact: the path infimum of a piecewise function over
an interval is attained at a breakpoint, an interval endpoint, or on an
open piece, all of which are finitely many candidates.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .exact import format_scalar, parse_scalar
from .spaces import dumps_json, loads_document

EXCURSION_FORMAT = "excursion/1"


@dataclass(frozen=True)
class Excursion:
    kind: str  # "pl" | "pc"
    breakpoints: tuple
    values: tuple  # pl: value at each breakpoint; pc: value of each open piece
    breakpoint_values: tuple = None  # pc only

    @property
    def pieces(self) -> int:
        return len(self.breakpoints) - 1


def pl_excursion(breakpoints, values) -> Excursion:
    h = Excursion(
        "pl",
        tuple(parse_scalar(t) for t in breakpoints),
        tuple(parse_scalar(v) for v in values),
    )
    require_valid_excursion(h)
    return h


def pc_excursion(breakpoints, piece_values, breakpoint_values=None) -> Excursion:
    breakpoints = tuple(parse_scalar(t) for t in breakpoints)
    piece_values = tuple(parse_scalar(v) for v in piece_values)
    if breakpoint_values is None:
        m = len(piece_values)
        bvals = [Fraction(0)]
        for k in range(1, m):
            bvals.append(min(piece_values[k - 1], piece_values[k]))
        if m:
            bvals.append(piece_values[-1])
        breakpoint_values = tuple(bvals)
    else:
        breakpoint_values = tuple(parse_scalar(v) for v in breakpoint_values)
    h = Excursion("pc", breakpoints, piece_values, breakpoint_values)
    require_valid_excursion(h)
    return h


def validate_excursion(h: Excursion) -> list:
    violations = []
    bps = h.breakpoints
    if h.kind not in ("pl", "pc"):
        violations.append(f"unknown kind {h.kind!r}")
        return violations
    if len(bps) < 2:
        violations.append("need at least breakpoints 0 and 1")
        return violations
    if bps[0] != 0 or bps[-1] != 1:
        violations.append("breakpoints must start at 0 and end at 1")
    if any(bps[k] >= bps[k + 1] for k in range(len(bps) - 1)):
        violations.append("breakpoints must be strictly increasing")
    if h.kind == "pl":
        if h.breakpoint_values is not None:
            violations.append("pl excursions carry no separate breakpoint values")
        if len(h.values) != len(bps):
            violations.append("pl needs one value per breakpoint")
            return violations
        if h.values[0] != 0:
            violations.append("h(0) must be 0")
        if any(v < 0 for v in h.values):
            violations.append("values must be nonnegative")
    else:
        if len(h.values) != len(bps) - 1:
            violations.append("pc needs one value per piece")
            return violations
        bv = h.breakpoint_values
        if bv is None or len(bv) != len(bps):
            violations.append("pc needs one breakpoint value per breakpoint")
            return violations
        if bv[0] != 0:
            violations.append("h(0) must be 0")
        if any(v < 0 for v in h.values) or any(v < 0 for v in bv):
            violations.append("values must be nonnegative")
        for k, v in enumerate(bv):
            neighbours = []
            if k > 0:
                neighbours.append(h.values[k - 1])
            if k < len(h.values):
                neighbours.append(h.values[k])
            if neighbours and v > min(neighbours):
                violations.append(
                    f"breakpoint value at index {k} exceeds an adjacent piece value"
                )
    return violations


def require_valid_excursion(h: Excursion) -> None:
    violations = validate_excursion(h)
    if violations:
        raise ValidationError(f"invalid excursion: {violations[0]}", violations)


def normalize(h: Excursion) -> Excursion:
    """Drop breakpoints that change nothing; fixed point of itself.

    pl: interior breakpoints where the slope does not change. pc: interior
    breakpoints whose value equals both neighbouring piece values (merging
    the pieces). Needed so that equal functions code to equal trees.
    """
    require_valid_excursion(h)
    bps = h.breakpoints
    if h.kind == "pl":
        keep = [0]
        for k in range(1, len(bps) - 1):
            left = (h.values[k] - h.values[k - 1]) * (bps[k + 1] - bps[k])
            right = (h.values[k + 1] - h.values[k]) * (bps[k] - bps[k - 1])
            if left != right:
                keep.append(k)
        keep.append(len(bps) - 1)
        return Excursion(
            "pl",
            tuple(bps[k] for k in keep),
            tuple(h.values[k] for k in keep),
        )
    keep = [0]
    for k in range(1, len(bps) - 1):
        if not (
            h.values[k - 1] == h.values[k] == h.breakpoint_values[k]
        ):
            keep.append(k)
    keep.append(len(bps) - 1)
    # a merged run of pieces shares one value; keep[i] indexes its first piece
    piece_values = [h.values[a] for a in keep[:-1]]
    return Excursion(
        "pc",
        tuple(bps[k] for k in keep),
        tuple(piece_values),
        tuple(h.breakpoint_values[k] for k in keep),
    )


def evaluate(h: Excursion, t):
    t = parse_scalar(t) if isinstance(t, (str, int)) else t
    if not (0 <= t <= 1):
        raise ValidationError(f"t = {t} outside [0, 1]")
    bps = h.breakpoints
    k = bisect_right(bps, t) - 1
    if k == len(bps) - 1:  # t == 1
        if h.kind == "pl":
            return h.values[-1]
        return h.breakpoint_values[-1]
    if h.kind == "pl":
        t0, t1 = bps[k], bps[k + 1]
        v0, v1 = h.values[k], h.values[k + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    if t == bps[k]:
        return h.breakpoint_values[k]
    return h.values[k]


def infimum(h: Excursion, s, t):
    """Exact inf of h over the closed interval between s and t."""
    s = parse_scalar(s) if isinstance(s, (str, int)) else s
    t = parse_scalar(t) if isinstance(t, (str, int)) else t
    if s > t:
        s, t = t, s
    if not (0 <= s and t <= 1):
        raise ValidationError("interval must sit inside [0, 1]")
    best = min(evaluate(h, s), evaluate(h, t))
    bps = h.breakpoints
    if h.kind == "pl":
        for k in range(len(bps)):
            if s < bps[k] < t and h.values[k] < best:
                best = h.values[k]
        return best
    for k in range(len(bps)):
        if s <= bps[k] <= t and h.breakpoint_values[k] < best:
            best = h.breakpoint_values[k]
    for k in range(len(bps) - 1):
        # open piece (bps[k], bps[k+1]) meets [s, t] with positive length
        if bps[k] < t and s < bps[k + 1] and h.values[k] < best:
            best = h.values[k]
    return best


def dh(h: Excursion, s, t):
    """Tree distance induced by h: h(s) + h(t) - 2 * inf over [s, t]."""
    return evaluate(h, s) + evaluate(h, t) - 2 * infimum(h, s, t)


def sup_diff(h: Excursion, g: Excursion):
    """True sup of |h - g| over [0, 1] (not just the essential sup)."""
    cuts = sorted(set(h.breakpoints) | set(g.breakpoints))
    worst = Fraction(0)
    for t in cuts:
        worst = max(worst, abs(evaluate(h, t) - evaluate(g, t)))
    for lo, hi in zip(cuts, cuts[1:]):
        # on the open piece both functions are linear; the difference is
        # extremal at the piece ends (limits)
        h0, h1 = _piece_limits(h, lo, hi)
        g0, g1 = _piece_limits(g, lo, hi)
        worst = max(worst, abs(h0 - g0), abs(h1 - g1))
    return worst


def _piece_limits(h: Excursion, lo, hi):
    """One-sided limits of h at the ends of a piece of constancy/linearity.

    (lo, hi) must not contain any breakpoint of h strictly inside.
    """
    if h.kind == "pl":
        return evaluate(h, lo), evaluate(h, hi)
    mid = (lo + hi) / 2
    v = evaluate(h, mid)
    return v, v


# ---------------------------------------------------------------------------
# builders


def tent() -> Excursion:
    """Single peak of height 1 at t = 1/2."""
    return pl_excursion((0, Fraction(1, 2), 1), (0, 1, 0))


def zero_excursion(kind: str = "pl") -> Excursion:
    if kind == "pl":
        return pl_excursion((0, 1), (0, 0))
    return pc_excursion((0, 1), (0,), (0, 0))


def comb(n: int) -> Excursion:
    """Value 1 except at the n+1 equally spaced zeros k/n (pc kind)."""
    if n < 1:
        raise ValidationError("comb needs n >= 1")
    bps = tuple(Fraction(k, n) for k in range(n + 1))
    return pc_excursion(bps, (Fraction(1),) * n, (Fraction(0),) * (n + 1))


def step_one() -> Excursion:
    """The discontinuous pointwise limit of comb(n): 1 on (0, 1], 0 at 0."""
    return pc_excursion((0, 1), (Fraction(1),), (Fraction(0), Fraction(1)))


def random_excursion(
    rng: random.Random,
    kind: str = None,
    max_pieces: int = 6,
    time_den: int = 12,
    value_den: int = 4,
) -> Excursion:
    """Seeded random excursion on rational grids (deterministic per rng state)."""
    if kind is None:
        kind = rng.choice(("pl", "pc"))
    n_interior = rng.randint(0, max(0, max_pieces - 1))
    interior = sorted(rng.sample(range(1, time_den), min(n_interior, time_den - 1)))
    bps = [Fraction(0)] + [Fraction(k, time_den) for k in interior] + [Fraction(1)]
    if kind == "pl":
        values = [Fraction(0)] + [
            Fraction(rng.randint(0, value_den), value_den) for _ in range(len(bps) - 1)
        ]
        return pl_excursion(bps, values)
    piece_values = [
        Fraction(rng.randint(1, value_den), value_den) for _ in range(len(bps) - 1)
    ]
    bvals = [Fraction(0)]
    for k in range(1, len(bps) - 1):
        cap = min(piece_values[k - 1], piece_values[k])
        bvals.append(cap if rng.random() < 0.6 else cap * Fraction(rng.randint(0, value_den), value_den))
    bvals.append(piece_values[-1])
    return pc_excursion(bps, piece_values, bvals)


# ---------------------------------------------------------------------------
# serialization


def excursion_to_obj(h: Excursion) -> dict:
    obj = {
        "format": EXCURSION_FORMAT,
        "kind": h.kind,
        "breakpoints": [format_scalar(t) for t in h.breakpoints],
        "values": [format_scalar(v) for v in h.values],
    }
    if h.kind == "pc":
        obj["breakpoint_values"] = [format_scalar(v) for v in h.breakpoint_values]
    return obj


def excursion_from_obj(obj, check: bool = True) -> Excursion:
    if not isinstance(obj, dict):
        raise ValidationError("excursion document must be a JSON object")
    if obj.get("format") != EXCURSION_FORMAT:
        raise ValidationError(f"unsupported format: {obj.get('format')!r}")
    kind = obj.get("kind")
    if kind not in ("pl", "pc"):
        raise ValidationError(f"unknown kind {kind!r}")
    for key in ("breakpoints", "values"):
        if key not in obj:
            raise ValidationError(f"missing field: {key}")
    bps = tuple(parse_scalar(t) for t in obj["breakpoints"])
    values = tuple(parse_scalar(v) for v in obj["values"])
    if kind == "pl":
        h = Excursion("pl", bps, values)
    else:
        bv = obj.get("breakpoint_values")
        bv = tuple(parse_scalar(v) for v in bv) if bv is not None else None
        if bv is None:
            return pc_excursion(bps, values)
        h = Excursion("pc", bps, values, bv)
    if check:
        require_valid_excursion(h)
    return h


def load_excursion(path, check: bool = True) -> Excursion:
    with open(path, "r", encoding="utf-8") as f:
        return excursion_from_obj(loads_document(f.read()), check)


def save_excursion(path, h: Excursion) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_json(excursion_to_obj(h)))
