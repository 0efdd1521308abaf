"""Sequence-disagreement distance formulas and the parallel-branch check.

Distances are expected mutation counts from aligned sequences of length m
with c matching sites.  The single-parameter model gives
D(c) = (3/4) ln(3m / (4c - m)); the two-parameter model uses transition
and transversion proportions.  ``jukes_cantor_parallel_sites`` answers:
if two equally distant branches recombine and distances combine like
parallel resistances (total D/2), how many sites match afterwards?
"""

from __future__ import annotations

import math

from .errors import DomainError


def jukes_cantor_distance(c: float, m: float) -> float:
    """Expected mutations for c matching sites out of m; needs c > m/4."""
    if m <= 0:
        raise DomainError("sequence length must be positive")
    if c > m:
        raise DomainError(f"matching sites c={c} exceed length m={m}")
    if c <= m / 4:
        raise DomainError(
            f"c={c} at or below m/4={m / 4}: distance diverges"
        )
    return 0.75 * math.log(3 * m / (4 * c - m))


def kimura_distance(p: float, q: float) -> float:
    """Two-parameter distance from transition (p) and transversion (q)
    proportions; needs 1 - 2p - q > 0 and 1 - 2q > 0."""
    if p < 0 or q < 0:
        raise DomainError("proportions must be nonnegative")
    a = 1 - 2 * p - q
    b = 1 - 2 * q
    if a <= 0 or b <= 0:
        raise DomainError(f"arguments outside the model domain: p={p}, q={q}")
    return -0.5 * math.log(a * math.sqrt(b))


def jukes_cantor_parallel_sites(c1: float, m: float) -> float:
    """Matching sites after recombining two branches with c1 matches each.

    Solves D(c) = D(c1)/2 in closed form:
    c = m/4 + sqrt(3 (m c1 / 4 - (m/4)^2)).  Fixed points at both domain
    ends: c1 = m gives m, c1 = m/4 gives m/4.
    """
    if m <= 0:
        raise DomainError("sequence length must be positive")
    if c1 < m / 4 or c1 > m:
        raise DomainError(f"c1={c1} outside [m/4, m]")
    quarter = m / 4.0
    return quarter + math.sqrt(3 * (quarter * c1 - quarter * quarter))
