"""Concrete chain models: irrational ellipsoids, S^1 x S^2 and random complexes.

Ellipsoid convention.  The boundary of ``E(a, b)`` with ``a/b`` irrational has
two embedded elliptic orbits, of actions ``a`` and ``b`` and rotation numbers
``a/b`` and ``b/a``.  Every orbit set ``{(g1, m), (g2, n)}`` is a generator,
the differential vanishes, the generator of action rank ``r`` has grading
``2r`` and U sends rank ``r`` to rank ``r - 1``.  Irrationality is simulated by
a rational ratio with a large denominator, and exact ties are rejected.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .ech_core import ELLIPTIC, AmbiguityWarning, Orbit, OrbitSet, enumerate_orbit_sets
from .f2 import SparseF2Matrix
from .homalg import ZERO_CLASS, ClassLabel, Generator, GradedComplex, as_fraction

__all__ = [
    "SQRT2",
    "SQRT3",
    "EllipsoidDegeneracyError",
    "EllipsoidModel",
    "S1xS2Model",
    "ellipsoid",
    "ellipsoid_with_generators",
    "lattice_values",
    "s3",
    "s1_x_s2",
    "unit_complex",
    "random_model",
]

SQRT2 = Fraction(141421, 100000)
SQRT3 = Fraction(173205, 100000)


class EllipsoidDegeneracyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EllipsoidModel:
    a: Fraction
    b: Fraction
    L: Fraction
    orbits: tuple[Orbit, Orbit]
    orbit_sets: tuple[OrbitSet, ...]
    complex: GradedComplex

    def lattice_rows(self) -> list[tuple[int, int, Fraction, int]]:
        """``(m, n, action, grading)`` for every generator, in action order."""
        g1, g2 = self.orbits
        return [
            (s.multiplicity(g1.id), s.multiplicity(g2.id), s.action, gen.grading)
            for s, gen in zip(self.orbit_sets, self.complex.generators)
        ]

    def __len__(self) -> int:
        return len(self.orbit_sets)


def ellipsoid(a, b, L) -> EllipsoidModel:
    """Chain model of the boundary of ``E(a, b)`` truncated at action ``L``."""
    a, b, L = as_fraction(a), as_fraction(b), as_fraction(L)
    if a <= 0 or b <= 0:
        raise ValueError("ellipsoid parameters must be positive")
    if (a / b).denominator == 1 or (b / a).denominator == 1:
        raise EllipsoidDegeneracyError(
            f"a/b = {a / b} makes an orbit rotation an integer (degenerate ellipsoid); "
            "use a rational approximation of an irrational ratio"
        )
    orbits = (Orbit("g1", ELLIPTIC, a / b, a), Orbit("g2", ELLIPTIC, b / a, b))
    with warnings.catch_warnings():
        warnings.simplefilter("error", AmbiguityWarning)
        try:
            sets = enumerate_orbit_sets(orbits, L)
        except AmbiguityWarning as w:
            raise EllipsoidDegeneracyError(
                f"{w}; the ratio {a}/{b} is too close to rational at this L, "
                "use a rational approximation with a larger denominator"
            ) from None
    n = len(sets)
    gens = tuple(Generator(s.id, 2 * r, s.action) for r, s in enumerate(sets))
    u = SparseF2Matrix(n, n, [(r - 1, r) for r in range(1, n)])
    c = GradedComplex(gens, SparseF2Matrix.zeros(n, n), u, complete_through=2 * n - 2)
    return EllipsoidModel(a, b, L, orbits, tuple(sets), c)


def lattice_values(a, b, count: int) -> list[Fraction]:
    """The ``count`` smallest values of ``m a + n b`` (m, n >= 0), with repetition."""
    a, b = as_fraction(a), as_fraction(b)
    bound = max(a, b)
    while True:
        vals = sorted(m * a + n * b for m in range(int(bound / a) + 1) for n in range(int((bound - m * a) / b) + 1))
        if len(vals) > count:
            return vals[:count]
        bound *= 2


def ellipsoid_with_generators(a, b, n: int) -> EllipsoidModel:
    """Ellipsoid model with exactly ``n`` generators (threshold between the n-th and next value)."""
    if n < 1:
        raise ValueError("need at least one generator")
    vals = lattice_values(a, b, n + 1)
    if vals[n - 1] == vals[n]:
        raise EllipsoidDegeneracyError(f"lattice values {n} and {n + 1} coincide at {vals[n]}")
    return ellipsoid(a, b, (vals[n - 1] + vals[n]) / 2)


def s3(n: int, b=SQRT2) -> GradedComplex:
    """Truncated model of the standard tight S^3: ``E(1, b)`` with ``n`` generators."""
    return ellipsoid_with_generators(1, b, n).complex


@dataclass(frozen=True, eq=False)
class S1xS2Model:
    depth: int
    eps0: Fraction
    complex: GradedComplex


def s1_x_s2(N: int, eps0=Fraction(1, 100)) -> S1xS2Model:
    """Synthetic model of ECH of the tight S^1 x S^2 in the torsion class.

    One generator per grading ``0 .. 2N-1``, zero differential, U of degree
    -2 killing gradings 0 and 1.  The actions ``(g + 1) eps0`` are a
    convention, so filtration results on this model depend on it.
    """
    if N < 1:
        raise ValueError("depth N must be at least 1")
    eps0 = as_fraction(eps0)
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    n = 2 * N
    gens = tuple(Generator(f"x{g}", g, (g + 1) * eps0) for g in range(n))
    u = SparseF2Matrix(n, n, [(g - 2, g) for g in range(2, n)])
    return S1xS2Model(N, eps0, GradedComplex(gens, SparseF2Matrix.zeros(n, n), u, complete_through=n - 1))


def unit_complex() -> GradedComplex:
    """The one-generator complex ``{empty}`` with zero differential and zero U."""
    return GradedComplex((Generator("empty", 0, Fraction(0)),), SparseF2Matrix.zeros(1, 1), SparseF2Matrix.zeros(1, 1))


def random_model(
    seed: int,
    n_generators: int,
    density: float,
    with_umap: bool = True,
    max_grading: int = 3,
    label: ClassLabel = ZERO_CLASS,
    prefix: str = "r",
) -> GradedComplex:
    """Random valid complex, reproducible from ``seed``.

    Built in normal form (acyclic pairs ``x -> y`` plus singletons) with a U
    chain map of that form, then both ``d`` and ``U`` are conjugated by a
    random unipotent, grading-preserving change of basis ``P`` that is upper
    triangular in action order.  Conjugation keeps ``d^2 = 0``, the U chain
    map relation and strict action decrease, so validity holds by
    construction.  Actions are distinct positive multiples of 1/8.
    """
    if n_generators < 0:
        raise ValueError("n_generators must be non-negative")
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(seed)
    n = n_generators
    steps = rng.sample(range(1, 4 * n + 1), n) if n else []
    grad = [rng.randint(0, max_grading) for _ in range(n)]
    act = [Fraction(s, 8) for s in steps]
    order = sorted(range(n), key=lambda i: act[i])
    # relabel so that index order is action order
    grad = [grad[i] for i in order]
    act = [act[i] for i in order]
    gens = tuple(Generator(f"{prefix}{i}", grad[i], act[i], label) for i in range(n))

    partner: dict[int, int] = {}  # top -> bottom
    bottoms: set[int] = set()
    for x in rng.sample(range(n), n):
        if x in partner or x in bottoms or rng.random() >= density:
            continue
        cands = [y for y in range(x) if grad[y] == grad[x] - 1 and y not in partner and y not in bottoms]
        if cands:
            y = rng.choice(cands)
            partner[x] = y
            bottoms.add(y)
    tops = set(partner)
    singles = [i for i in range(n) if i not in tops and i not in bottoms]

    d_cols = [0] * n
    for x, y in partner.items():
        d_cols[x] = 1 << y

    u_cols = [0] * n
    if with_umap:
        cycles = sorted(set(singles) | bottoms)
        for x in sorted(tops):
            y = partner[x]
            pair_targets = [
                (x2, y2) for x2, y2 in partner.items()
                if grad[x2] == grad[x] - 2 and x2 < x and y2 < y
            ]
            if pair_targets and rng.random() < density:
                x2, y2 = rng.choice(pair_targets)
                u_cols[x] ^= 1 << x2
                u_cols[y] ^= 1 << y2
            for z in cycles:
                if grad[z] == grad[x] - 2 and z < x and rng.random() < density:
                    u_cols[x] ^= 1 << z
        for s in singles:
            for z in cycles:
                if grad[z] == grad[s] - 2 and z < s and rng.random() < density:
                    u_cols[s] ^= 1 << z

    p_cols = []
    for j in range(n):
        col = 1 << j
        for i in range(j):
            if grad[i] == grad[j] and rng.random() < density:
                col |= 1 << i
        p_cols.append(col)
    P = SparseF2Matrix.from_columns(n, p_cols)
    Pinv = _unipotent_inverse(P)
    d = P @ SparseF2Matrix.from_columns(n, d_cols) @ Pinv
    u = P @ SparseF2Matrix.from_columns(n, u_cols) @ Pinv if with_umap else None
    return GradedComplex(gens, d, u)


def _unipotent_inverse(P: SparseF2Matrix) -> SparseF2Matrix:
    """Inverse of ``P = I + N`` with ``N`` strictly upper triangular: ``I + N + N^2 + ...`` over F2."""
    inv = []
    for j in range(P.rows):
        acc = term = 1 << j
        while term:
            term = _apply_strict(P, term)
            acc ^= term
        inv.append(acc)
    return SparseF2Matrix.from_columns(P.rows, inv)


def _apply_strict(P: SparseF2Matrix, v: int) -> int:
    out = 0
    while v:
        low = v & -v
        j = low.bit_length() - 1
        out ^= P.column(j) ^ low
        v ^= low
    return out
