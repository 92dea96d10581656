"""Exact-rational geometry of the admissible exponent region.

Points live in the (1/p, 1/q) square.  The region of interest is the closed
trapezoid with vertices B, B', C, C' (corners excluded), whose parallel edges
lie on the lines 1/p - 1/q = 2/d and 1/p - 1/q = 2/(d+1).  All membership
tests run in exact rational arithmetic; floats only appear when slopes are
handed to the regression machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

__all__ = [
    "ExponentPair",
    "RegionVerdict",
    "SlopePrediction",
    "vertex",
    "vertex_table",
    "dual",
    "classify",
    "sobolev_admissible",
    "predicted_slopes",
    "STRONG", "RESTRICTED_WEAK", "FAILS",
]

STRONG = "StrongType"
RESTRICTED_WEAK = "RestrictedWeakType"
FAILS = "Fails"


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are binary rationals; conversion is exact
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True, order=True)
class ExponentPair:
    """A point (1/p, 1/q), stored as exact rationals."""

    ip: Fraction
    iq: Fraction

    def __init__(self, ip, iq):
        object.__setattr__(self, "ip", _frac(ip))
        object.__setattr__(self, "iq", _frac(iq))

    @property
    def p(self) -> Fraction:
        return 1 / self.ip

    @property
    def q(self) -> Fraction:
        return 1 / self.iq

    def as_floats(self) -> Tuple[float, float]:
        return float(self.ip), float(self.iq)

    def __iter__(self):
        return iter((self.ip, self.iq))


@dataclass(frozen=True)
class RegionVerdict:
    status: str
    violated_conditions: Tuple[str, ...] = ()

    def __bool__(self):
        return self.status != FAILS


def dual(pair: ExponentPair) -> ExponentPair:
    """The duality involution P = (x, y) -> P' = (1-y, 1-x)."""
    return ExponentPair(1 - pair.iq, 1 - pair.ip)


def vertex(d: int, name: str) -> ExponentPair:
    """Named points of the exponent diagram (primed names are duals)."""
    if d < 3:
        raise ValueError("dimension must be >= 3")
    base = {
        "A": ExponentPair(Fraction(d + 1, 2 * d), Fraction(d - 3, 2 * d)),
        "B": ExponentPair(Fraction(d, 2 * (d - 1)),
                          Fraction((d - 2) ** 2, 2 * d * (d - 1))),
        "C": ExponentPair(Fraction(d + 1, 2 * d),
                          Fraction((d - 1) ** 2, 2 * d * (d + 1))),
        "D": ExponentPair(Fraction(d + 1, 2 * d), Fraction(0)),
        "E": ExponentPair(Fraction(1), Fraction(0)),
        "F": ExponentPair(Fraction(d + 2, 2 * d), Fraction(d - 2, 2 * d)),
        "G": ExponentPair(Fraction(0), Fraction(1)),
        "O": ExponentPair(Fraction(0), Fraction(0)),
    }
    if name in base:
        return base[name]
    if len(name) == 2 and name.endswith("'") and name[0] in base:
        return dual(base[name[0]])
    raise ValueError(f"unknown vertex name {name!r}")


def vertex_table(d: int) -> List[Tuple[str, ExponentPair]]:
    """The eight named points plus the four duals drawn in the diagram."""
    names = ["A", "B", "C", "D", "E", "F", "G", "O", "A'", "B'", "C'", "D'"]
    return [(n, vertex(d, n)) for n in names]


def _cross(p1: ExponentPair, p2: ExponentPair, x: ExponentPair) -> Fraction:
    return ((p2.ip - p1.ip) * (x.iq - p1.iq)
            - (p2.iq - p1.iq) * (x.ip - p1.ip))


def _trapezoid(d: int):
    B = vertex(d, "B")
    C = vertex(d, "C")
    Bp = dual(B)
    Cp = dual(C)
    centroid = ExponentPair((B.ip + Bp.ip + C.ip + Cp.ip) / 4,
                            (B.iq + Bp.iq + C.iq + Cp.iq) / 4)
    return B, Bp, C, Cp, centroid


def classify(d: int, pair: ExponentPair) -> RegionVerdict:
    """Membership in the trapezoid via exact half-plane tests.

    Failure labels: 'p-q-order' (not 0 <= 1/q <= 1/p <= 1), 'scaling-gap'
    (1/p - 1/q outside [2/(d+1), 2/d]), 'p-upper' (beyond the leg through B
    and C: p too large), 'q-lower' (beyond the dual leg: q too small).
    """
    if d < 3:
        raise ValueError("dimension must be >= 3")
    pair = ExponentPair(pair.ip, pair.iq)
    violated: List[str] = []
    if not (0 <= pair.iq <= pair.ip <= 1):
        violated.append("p-q-order")
    gap = pair.ip - pair.iq
    if gap > Fraction(2, d) or gap < Fraction(2, d + 1):
        violated.append("scaling-gap")
    B, Bp, C, Cp, centroid = _trapezoid(d)
    for p1, p2, label in ((B, C, "p-upper"), (Bp, Cp, "q-lower")):
        side = _cross(p1, p2, pair)
        ref = _cross(p1, p2, centroid)
        if side * ref < 0:
            violated.append(label)
    if violated:
        return RegionVerdict(FAILS, tuple(violated))
    if pair in (B, Bp, C, Cp):
        return RegionVerdict(RESTRICTED_WEAK)
    return RegionVerdict(STRONG)


def sobolev_admissible(d: int, pair: ExponentPair) -> RegionVerdict:
    """Admissibility for the uniform second-order inequality.

    Strong type iff 1/p - 1/q = 2/d with 1/p strictly between the endpoints
    d/(2(d-1)) and (d^2+2d-4)/(2d(d-1)); the endpoints themselves are
    restricted weak type.
    """
    if d < 3:
        raise ValueError("dimension must be >= 3")
    pair = ExponentPair(pair.ip, pair.iq)
    B = vertex(d, "B")
    Bp = dual(B)
    violated: List[str] = []
    if not (0 <= pair.iq <= pair.ip <= 1):
        violated.append("p-q-order")
    if pair.ip - pair.iq != Fraction(2, d):
        violated.append("scaling-gap")
    if pair.ip <= B.ip:
        violated.append("p-upper")
    if pair.ip >= Bp.ip:
        violated.append("q-lower")
    if pair in (B, Bp):
        return RegionVerdict(RESTRICTED_WEAK)
    if violated:
        return RegionVerdict(FAILS, tuple(violated))
    return RegionVerdict(STRONG)


@dataclass(frozen=True)
class SlopePrediction:
    """Predicted log-log exponents for the lower-bound families.

    glambda_slope    quotient exponent of the long-rectangle family in lambda
    knapp_slope      quotient exponent of the cap family in lambda
    stationary_decay on-axis field decay power of the curved-cap extension
    cone_decay       on-axis decay power of the null-cone kernel
    """

    glambda_slope: Fraction
    knapp_slope: Fraction
    stationary_decay: Fraction
    cone_decay: Fraction


def predicted_slopes(d: int, pair: ExponentPair) -> SlopePrediction:
    if d < 3:
        raise ValueError("dimension must be >= 3")
    pair = ExponentPair(pair.ip, pair.iq)
    gap = pair.ip - pair.iq
    return SlopePrediction(
        glambda_slope=2 - d * gap,
        knapp_slope=(d + 1) * gap - 2,
        stationary_decay=Fraction(d - 1, 2),
        cone_decay=Fraction(d - 2, 2),
    )
