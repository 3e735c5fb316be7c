"""Reeb orbits, admissible orbit sets and the action filtration.

The filtered complex ``ECC^L`` is the span of the generators of action
below ``L``.  Since the differential strictly lowers action this span is a
subcomplex, and for ``L < L'`` the inclusion ``ECC^L -> ECC^{L'}`` is a chain
map.  A :class:`FilteredTower` stores a finite increasing list of thresholds
together with those truncations and inclusions, which is the finite-scale
shadow of the direct limit over ``L``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .f2 import SparseF2Matrix, f2_rank
from .homalg import (
    ZERO_CLASS,
    ChainMap,
    ClassLabel,
    GradedComplex,
    HomologyResult,
    ValidationError,
    Violation,
    as_fraction,
    homology,
    induced_map,
    validate,
)

__all__ = [
    "ELLIPTIC",
    "POSITIVE_HYPERBOLIC",
    "NEGATIVE_HYPERBOLIC",
    "Orbit",
    "OrbitSet",
    "LDegeneracyError",
    "AmbiguityWarning",
    "action",
    "enumerate_orbit_sets",
    "truncate",
    "inclusion",
    "FilteredTower",
    "Stabilization",
    "stabilization_profile",
    "separating_thresholds",
]

ELLIPTIC = "elliptic"
POSITIVE_HYPERBOLIC = "positive_hyperbolic"
NEGATIVE_HYPERBOLIC = "negative_hyperbolic"
_KINDS = (ELLIPTIC, POSITIVE_HYPERBOLIC, NEGATIVE_HYPERBOLIC)


class LDegeneracyError(ValueError):
    """A generator or orbit set has action exactly equal to a threshold."""


class AmbiguityWarning(UserWarning):
    """Two distinct orbit sets have the same action."""


@dataclass(frozen=True)
class Orbit:
    """An embedded Reeb orbit.

    ``rotation`` is the rotation number for elliptic orbits (never an
    integer) and the integer winding ``k`` for hyperbolic ones (even for
    positive hyperbolic, odd for negative hyperbolic).
    """

    id: str
    kind: str
    rotation: Fraction
    action: Fraction
    h1class: ClassLabel = ZERO_CLASS

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown orbit kind {self.kind!r}; expected one of {_KINDS}")
        rot = as_fraction(self.rotation)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "action", as_fraction(self.action))
        if self.action <= 0:
            raise ValueError(f"orbit {self.id!r} must have positive action, got {self.action}")
        if self.kind == ELLIPTIC:
            if rot.denominator == 1:
                raise ValueError(f"elliptic orbit {self.id!r} has integer rotation {rot} (degenerate)")
        else:
            if rot.denominator != 1:
                raise ValueError(f"hyperbolic orbit {self.id!r} needs an integer winding, got {rot}")
            parity = int(rot) % 2
            if self.kind == POSITIVE_HYPERBOLIC and parity != 0:
                raise ValueError(f"positive hyperbolic orbit {self.id!r} needs even winding, got {rot}")
            if self.kind == NEGATIVE_HYPERBOLIC and parity != 1:
                raise ValueError(f"negative hyperbolic orbit {self.id!r} needs odd winding, got {rot}")

    @property
    def hyperbolic(self) -> bool:
        return self.kind != ELLIPTIC

    @property
    def winding(self) -> int:
        if not self.hyperbolic:
            raise ValueError(f"orbit {self.id!r} is elliptic and has no winding")
        return int(self.rotation)


@dataclass(frozen=True)
class OrbitSet:
    """Admissible orbit set: distinct orbits with positive multiplicities.

    Pairs are kept sorted by orbit id so that equal sets compare equal.
    """

    pairs: tuple[tuple[Orbit, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted(((o, int(m)) for o, m in self.pairs), key=lambda p: p[0].id))
        ids = [o.id for o, _ in pairs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"orbit set repeats an orbit: {ids}")
        for o, m in pairs:
            if m < 1:
                raise ValueError(f"multiplicity of {o.id!r} must be positive, got {m}")
            if o.hyperbolic and m != 1:
                raise ValueError(f"hyperbolic orbit {o.id!r} must have multiplicity 1 (got {m})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def id(self) -> str:
        if not self.pairs:
            return "empty"
        return " ".join(o.id if m == 1 else f"{o.id}^{m}" for o, m in self.pairs)

    @property
    def action(self) -> Fraction:
        return sum((m * o.action for o, m in self.pairs), Fraction(0))

    @property
    def h1class(self) -> ClassLabel:
        total = ZERO_CLASS
        for o, m in self.pairs:
            total = total + m * o.h1class
        return total

    def multiplicity(self, orbit_id: str) -> int:
        for o, m in self.pairs:
            if o.id == orbit_id:
                return m
        return 0

    def sort_key(self):
        return (self.action, tuple((o.id, m) for o, m in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        return self.id


def action(s: OrbitSet) -> Fraction:
    """Symplectic action ``sum_i m_i A(alpha_i)``; zero for the empty set."""
    return s.action


def enumerate_orbit_sets(orbits: Sequence[Orbit], L, gamma: ClassLabel | None = None) -> list[OrbitSet]:
    """All admissible orbit sets of action ``< L``, sorted by (action, ids).

    Raises :class:`LDegeneracyError` if some admissible set has action
    exactly ``L``.  Emits :class:`AmbiguityWarning` when two distinct sets of
    the output share an action.  Multiplicities of elliptic orbits are capped
    by the action bound only.
    """
    L = as_fraction(L)
    orbits = sorted(orbits, key=lambda o: o.id)
    if len({o.id for o in orbits}) != len(orbits):
        raise ValueError("orbit ids must be distinct")
    found: list[tuple[tuple[int, ...], Fraction]] = []
    ties: list[tuple[int, ...]] = []

    def rec(i: int, mults: list[int], total: Fraction):
        if i == len(orbits):
            if total == L:
                ties.append(tuple(mults))
            else:
                found.append((tuple(mults), total))
            return
        o = orbits[i]
        cap = math.floor((L - total) / o.action)
        if o.hyperbolic:
            cap = min(cap, 1)
        for m in range(cap + 1):
            mults.append(m)
            rec(i + 1, mults, total + m * o.action)
            mults.pop()

    rec(0, [], Fraction(0))
    if ties:
        s = OrbitSet(tuple((o, m) for o, m in zip(orbits, ties[0]) if m))
        raise LDegeneracyError(f"orbit set {s.id!r} has action exactly L = {L}; choose another threshold")
    out = []
    for mults, _ in found:
        s = OrbitSet(tuple((o, m) for o, m in zip(orbits, mults) if m))
        if gamma is not None and s.h1class != gamma:
            continue
        out.append(s)
    out.sort(key=OrbitSet.sort_key)
    for s, t in zip(out, out[1:]):
        if s.action == t.action:
            warnings.warn(
                f"orbit sets {s.id!r} and {t.id!r} share the action {s.action}",
                AmbiguityWarning,
                stacklevel=2,
            )
            break
    return out


def _check_threshold(c: GradedComplex, L: Fraction) -> None:
    for g in c.generators:
        if g.action == L:
            raise LDegeneracyError(f"generator {g.id!r} has action exactly L = {L}")


def truncate(c: GradedComplex, L) -> GradedComplex:
    """Subcomplex spanned by the generators of action ``< L``.

    If generators are dropped, ``complete_through`` is lowered to one below
    the smallest grading of a dropped generator.
    """
    L = as_fraction(L)
    _check_threshold(c, L)
    keep = [i for i, g in enumerate(c.generators) if g.action < L]
    if len(keep) == len(c):
        return c
    for j in keep:
        for i in _support(c.differential, j):
            if c.generators[i].action >= L:
                g, t = c.generators[j], c.generators[i]
                raise ValidationError(
                    [_closure_violation(g, t, L)], what=f"truncation at L = {L}"
                )
    dropped = min(g.grading for g in c.generators if g.action >= L)
    ct = dropped - 1 if c.complete_through is None else min(c.complete_through, dropped - 1)
    return c.restrict(keep, complete_through=ct)


def _support(m: SparseF2Matrix, j: int) -> list[int]:
    col = m.column(j)
    return [i for i in range(col.bit_length()) if col >> i & 1]


def _closure_violation(g, t, L):
    return Violation("truncation-closure", (g.id, t.id), f"boundary leaves the action window below {L}")


def inclusion(small: GradedComplex, big: GradedComplex) -> ChainMap:
    """Generator-wise inclusion of one truncation of a base complex into another."""
    where = big.index
    entries = []
    for j, g in enumerate(small.generators):
        i = where.get(g.id)
        if i is None or big.generators[i] != g:
            raise ValueError(f"generator {g.id!r} of the smaller truncation is missing from the larger one")
        entries.append((i, j))
    f = ChainMap(small, big, SparseF2Matrix(len(big), len(small), entries))
    if f.matrix @ small.differential != big.differential @ f.matrix:
        raise ValueError("truncations do not come from the same base complex (inclusion is not a chain map)")
    return f


def separating_thresholds(c: GradedComplex, top_margin: Fraction = Fraction(1)) -> list[Fraction]:
    """One threshold strictly between each pair of consecutive distinct actions, plus one above the top.

    The threshold list starts above the smallest action, so the first
    truncation already contains the lowest-action generators.
    """
    acts = c.actions()
    if not acts:
        return [Fraction(top_margin)]
    out = [(a + b) / 2 for a, b in zip(acts, acts[1:])]
    out.append(acts[-1] + as_fraction(top_margin))
    return out


@dataclass(eq=False)
class FilteredTower:
    """Truncations of ``base`` at increasing thresholds, with their inclusions."""

    base: GradedComplex
    thresholds: tuple[Fraction, ...]
    truncations: tuple[GradedComplex, ...] = field(init=False)
    inclusions: tuple[ChainMap, ...] = field(init=False)

    def __post_init__(self):
        ths = tuple(as_fraction(t) for t in self.thresholds)
        if not ths:
            raise ValueError("a tower needs at least one threshold")
        if any(b <= a for a, b in zip(ths, ths[1:])):
            raise ValueError("thresholds must be strictly increasing")
        self.thresholds = ths
        bad = validate(self.base)
        if bad:
            raise ValidationError(bad)
        self.truncations = tuple(truncate(self.base, L) for L in ths)
        self.inclusions = tuple(inclusion(a, b) for a, b in zip(self.truncations, self.truncations[1:]))
        self._homology: dict[int, HomologyResult] = {}
        self._induced: dict[int, dict[int, np.ndarray]] = {}

    @classmethod
    def auto(cls, base: GradedComplex) -> "FilteredTower":
        """Tower with one threshold between every two consecutive actions of ``base``."""
        return cls(base, tuple(separating_thresholds(base)))

    def __len__(self) -> int:
        return len(self.thresholds)

    def homology(self, i: int) -> HomologyResult:
        if i not in self._homology:
            self._homology[i] = homology(self.truncations[i], check=False)
        return self._homology[i]

    def induced(self, i: int) -> dict[int, np.ndarray]:
        """Induced map of the inclusion from level ``i`` to level ``i + 1``."""
        if i not in self._induced:
            self._induced[i] = induced_map(self.inclusions[i], self.homology(i), self.homology(i + 1), check=False)
        return self._induced[i]

    def dims(self, grading: int) -> list[int]:
        return [self.homology(i).dim(grading) for i in range(len(self))]

    @cached_property
    def top(self) -> HomologyResult:
        return self.homology(len(self) - 1)


@dataclass(frozen=True)
class Stabilization:
    """Result of :func:`stabilization_profile` for one grading.

    ``index`` is ``None`` when the last inclusion in the tower is still not an
    isomorphism in this grading ("not stabilized within tower").
    """

    grading: int
    index: int | None
    threshold: Fraction | None
    dims: tuple[int, ...]

    @property
    def stabilized(self) -> bool:
        return self.index is not None


def stabilization_profile(tower: FilteredTower, grading: int) -> Stabilization:
    """Smallest level after which every inclusion-induced map in ``grading`` is an isomorphism."""
    n = len(tower)
    dims = tuple(tower.dims(grading))
    index = 0
    for i in range(n - 1):
        m = tower.induced(i).get(grading)
        d0, d1 = dims[i], dims[i + 1]
        iso = d0 == d1 and (d0 == 0 or f2_rank(m) == d0)
        if not iso:
            index = i + 1
    if n >= 2:
        m = tower.induced(n - 2).get(grading)
        last_iso = dims[-2] == dims[-1] and (dims[-1] == 0 or f2_rank(m) == dims[-1])
        if not last_iso:
            return Stabilization(grading, None, None, dims)
    return Stabilization(grading, index, tower.thresholds[index], dims)
