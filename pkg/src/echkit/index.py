"""Conley-Zehnder, Fredholm and ECH index calculators and checkers.

Trivializations are recorded relative to a fixed reference by one integer
``tau_i`` per orbit.  Changing ``tau_i`` by ``+1`` turns the contact plane
once more along the orbit, so rotation numbers measured in the new
trivialization drop by one per period: an elliptic rotation ``theta``
becomes ``theta - tau_i`` and a hyperbolic winding ``k`` becomes
``k - 2 tau_i``.  With this convention the rules below for ``c_tau`` and
``Q_tau`` make both the Fredholm index and the ECH index independent of the
trivialization.

Geometric quantities (Euler characteristic, ``c_tau``, ``Q_tau``, writhe,
``delta``) are inputs, not computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ech_core import ELLIPTIC, POSITIVE_HYPERBOLIC, Orbit, OrbitSet
from .homalg import as_fraction

__all__ = [
    "CZDegeneracyError",
    "Trivialization",
    "CurveData",
    "IndexCheck",
    "LinkingReport",
    "cz_elliptic",
    "cz_hyperbolic",
    "cz_iterate",
    "cz_total",
    "fredholm_index",
    "ech_index",
    "curve_ech_index",
    "retrivialize_c",
    "retrivialize_Q",
    "reclass_Q",
    "check_index_inequality",
    "check_adjunction",
    "linking_bound_check",
    "disjoint_union",
    "H_ORBIT",
    "PRESETS",
    "preset",
    "CZ_PRESETS",
]


class CZDegeneracyError(ValueError):
    """An elliptic rotation number (or one of its iterates) is an integer."""


def cz_elliptic(theta) -> int:
    """``2 floor(theta) + 1`` for a non-integer rotation number ``theta``."""
    theta = as_fraction(theta)
    if theta.denominator == 1:
        raise CZDegeneracyError(f"rotation number {theta} is an integer: the orbit is degenerate")
    return 2 * math.floor(theta) + 1


def cz_hyperbolic(k: int) -> int:
    """A hyperbolic orbit whose eigenvector turns by ``k pi`` has CZ index ``k``."""
    return int(k)


@dataclass(frozen=True)
class Trivialization:
    """Integer homotopy class per orbit id, relative to the reference trivialization; unlisted orbits are 0."""

    classes: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "classes", {k: int(v) for k, v in dict(self.classes).items() if int(v) != 0})

    def __getitem__(self, orbit_id: str) -> int:
        return self.classes.get(orbit_id, 0)

    def shifted(self, orbit_id: str, by: int) -> "Trivialization":
        c = dict(self.classes)
        c[orbit_id] = c.get(orbit_id, 0) + by
        return Trivialization(c)

    def __hash__(self):
        return hash(tuple(sorted(self.classes.items())))


REFERENCE = Trivialization()


def _rotation(orbit: Orbit, rotations: Mapping[str, object] | None) -> Fraction:
    if rotations is not None and orbit.id in rotations:
        return as_fraction(rotations[orbit.id])
    return orbit.rotation


def cz_iterate(orbit: Orbit, k: int, triv: Trivialization = REFERENCE, rotations=None) -> int:
    """``CZ_tau`` of the ``k``-fold iterate of ``orbit``."""
    if k < 1:
        raise ValueError("iterate index must be positive")
    rot = _rotation(orbit, rotations)
    t = triv[orbit.id]
    if orbit.kind == ELLIPTIC:
        theta = k * (rot - t)
        if theta.denominator == 1:
            raise CZDegeneracyError(f"iterate {k} of {orbit.id!r} has integer rotation {theta}")
        return cz_elliptic(theta)
    return cz_hyperbolic(k * (int(rot) - 2 * t))


def _as_multiplicities(s) -> list[tuple[Orbit, int]]:
    """Accept an OrbitSet or a sequence of ``(orbit, multiplicity)`` ends (merged per orbit)."""
    pairs = s.pairs if isinstance(s, OrbitSet) else tuple(s)
    merged: dict[str, list] = {}
    for o, m in pairs:
        if o.id in merged:
            merged[o.id][1] += m
        else:
            merged[o.id] = [o, m]
    return [(o, m) for o, m in merged.values()]


def cz_total(alpha, beta, triv: Trivialization = REFERENCE, rotations=None) -> int:
    """``CZ^I = sum_i sum_{k<=m_i} CZ(alpha_i^k) - sum_j sum_{k<=n_j} CZ(beta_j^k)``."""
    total = 0
    for sign, s in ((1, alpha), (-1, beta)):
        for o, m in _as_multiplicities(s):
            total += sign * sum(cz_iterate(o, k, triv, rotations) for k in range(1, m + 1))
    return total


@dataclass(frozen=True)
class CurveData:
    """Index bookkeeping for a curve ``C``: topology, ends and the ``tau``-dependent integers.

    Each end is ``(orbit, multiplicity)``; several ends may share an orbit.
    ``embedded`` is an input assertion, used only to interpret the index
    inequality.
    """

    chi: int
    positive_ends: tuple[tuple[Orbit, int], ...] = ()
    negative_ends: tuple[tuple[Orbit, int], ...] = ()
    c_tau: int = 0
    Q_tau: int = 0
    writhe: int = 0
    delta: int = 0
    embedded: bool | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        for o, m in self.positive_ends + self.negative_ends:
            if m < 1:
                raise ValueError(f"end at {o.id!r} has non-positive multiplicity {m}")
        object.__setattr__(self, "positive_ends", tuple(self.positive_ends))
        object.__setattr__(self, "negative_ends", tuple(self.negative_ends))

    def replace(self, **kw) -> "CurveData":
        from dataclasses import replace

        return replace(self, **kw)


def fredholm_index(c: CurveData, triv: Trivialization = REFERENCE, rotations=None) -> int:
    """``ind = -chi + 2 c_tau + sum CZ(positive ends) - sum CZ(negative ends)``."""
    total = -c.chi + 2 * c.c_tau
    total += sum(cz_iterate(o, m, triv, rotations) for o, m in c.positive_ends)
    total -= sum(cz_iterate(o, m, triv, rotations) for o, m in c.negative_ends)
    return total


def ech_index(c_tau: int, Q_tau: int, cz_I: int) -> int:
    """``I = c_tau + Q_tau + CZ^I``."""
    return int(c_tau) + int(Q_tau) + int(cz_I)


def curve_ech_index(c: CurveData, triv: Trivialization = REFERENCE, rotations=None) -> int:
    """ECH index of the current whose orbit sets are the ends of ``c`` (merged by orbit)."""
    return ech_index(c.c_tau, c.Q_tau, cz_total(c.positive_ends, c.negative_ends, triv, rotations))


def retrivialize_c(c_tau: int, alpha, beta, old: Trivialization, new: Trivialization) -> int:
    """``c_tau'`` from ``c_tau - c_tau' = sum m_i (tau_i - tau_i') - sum n_j (tau_j - tau_j')``."""
    delta = 0
    for o, m in _as_multiplicities(alpha):
        delta += m * (old[o.id] - new[o.id])
    for o, n in _as_multiplicities(beta):
        delta -= n * (old[o.id] - new[o.id])
    return c_tau - delta


def retrivialize_Q(
    Q_tau: int,
    alpha,
    beta,
    old: Trivialization,
    new: Trivialization,
    alpha2=None,
    beta2=None,
) -> int:
    """``Q_tau'`` from ``Q_tau - Q_tau' = sum m_i m_i' (tau_i - tau_i') - sum n_j n_j' (tau_j - tau_j')``.

    ``alpha2``/``beta2`` are the orbit sets of the second class ``Z'``; they
    default to ``alpha``/``beta`` (the self-intersection case).
    """
    alpha2 = alpha if alpha2 is None else alpha2
    beta2 = beta if beta2 is None else beta2
    delta = 0
    for sign, s, s2 in ((1, alpha, alpha2), (-1, beta, beta2)):
        other = {o.id: m for o, m in _as_multiplicities(s2)}
        for o, m in _as_multiplicities(s):
            delta += sign * m * other.get(o.id, 0) * (old[o.id] - new[o.id])
    return Q_tau - delta


def reclass_Q(Q_tau: int, intersection: int) -> int:
    """``Q_tau(Z_1, Z') = Q_tau(Z_2, Z') + (Z_1 - Z_2) . [alpha']``."""
    return int(Q_tau) + int(intersection)


@dataclass(frozen=True)
class IndexCheck:
    ind: int
    I: int
    ok: bool
    equality: bool
    embedded: bool | None

    @property
    def consistent(self) -> bool:
        """Equality holds exactly when the curve was declared embedded (if declared)."""
        return self.embedded is None or self.equality == self.embedded


def check_index_inequality(c: CurveData, triv: Trivialization = REFERENCE, rotations=None) -> IndexCheck:
    ind = fredholm_index(c, triv, rotations)
    I = curve_ech_index(c, triv, rotations)
    return IndexCheck(ind, I, ind <= I, ind == I, c.embedded)


def check_adjunction(c: CurveData) -> int:
    """Residual ``c_tau - chi - Q_tau - w_tau + 2 delta`` of the relative adjunction formula (0 = consistent)."""
    return c.c_tau - c.chi - c.Q_tau - c.writhe + 2 * c.delta


@dataclass(frozen=True)
class LinkingReport:
    violations: tuple[tuple[int, int, Fraction, Fraction], ...]  # (i, j, l_ij, bound)
    asymmetric: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.asymmetric


def linking_bound_check(rho: Sequence, q: Sequence, l_matrix: Sequence[Sequence]) -> LinkingReport:
    """Flag pairs ``i < j`` with ``l(i, j) > max(rho_i q_j, rho_j q_i)``."""
    rho = [as_fraction(r) for r in rho]
    q = [as_fraction(x) for x in q]
    n = len(rho)
    if len(q) != n or len(l_matrix) != n or any(len(row) != n for row in l_matrix):
        raise ValueError("rho, q and l_matrix must have matching sizes")
    lm = [[as_fraction(x) for x in row] for row in l_matrix]
    bad, asym = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if lm[i][j] != lm[j][i]:
                asym.append((i, j))
            bound = max(rho[i] * q[j], rho[j] * q[i])
            if lm[i][j] > bound:
                bad.append((i, j, lm[i][j], bound))
    return LinkingReport(tuple(bad), tuple(asym))


def disjoint_union(a: CurveData, b: CurveData, intersection: int = 0, linking_writhe: int = 0) -> CurveData:
    """Union of two curves; cross terms of ``Q`` and the writhe are supplied by the caller.

    ``Q(A + B) = Q(A) + Q(B) + 2 intersection`` and the writhe adds
    ``linking_writhe``.  Euler characteristic, ``c_tau``, ends and ``delta``
    simply add, so the Fredholm index is additive.
    """
    emb = None if a.embedded is None or b.embedded is None else (a.embedded and b.embedded)
    return CurveData(
        chi=a.chi + b.chi,
        positive_ends=a.positive_ends + b.positive_ends,
        negative_ends=a.negative_ends + b.negative_ends,
        c_tau=a.c_tau + b.c_tau,
        Q_tau=a.Q_tau + b.Q_tau + 2 * intersection,
        writhe=a.writhe + b.writhe + linking_writhe,
        delta=a.delta + b.delta,
        embedded=emb,
    )


# The special hyperbolic orbit h of the Weinstein handle.  In the handle
# trivialization tau_0 its eigenvector does not rotate, so the winding is 0.
# Its action is a free parameter of the model; the value here is only a label.
H_ORBIT = Orbit("h", POSITIVE_HYPERBOLIC, 0, Fraction(1, 1000))

PRESETS: dict[str, CurveData] = {
    # the two planes of the handle, each with one positive end at h
    "PS": CurveData(chi=1, positive_ends=((H_ORBIT, 1),), c_tau=1, Q_tau=0, writhe=0, delta=0, embedded=True),
    "PN": CurveData(chi=1, positive_ends=((H_ORBIT, 1),), c_tau=1, Q_tau=0, writhe=0, delta=0, embedded=True),
    "cylinder": CurveData(
        chi=0, positive_ends=((H_ORBIT, 1),), negative_ends=((H_ORBIT, 1),), embedded=True
    ),
}

CZ_PRESETS: dict[str, Orbit] = {"h": H_ORBIT}


def preset(name: str) -> CurveData:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
