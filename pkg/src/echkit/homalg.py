"""Exact F2 homological algebra for action-filtered chain complexes.

A :class:`GradedComplex` is a finite F2 vector space with a basis of
:class:`Generator` objects.  Each generator carries an integer grading, an
exact rational action and a homology-class label.  The differential lowers
grading by one and strictly lowers action; the optional U-map lowers grading
by two, strictly lowers action and commutes with the differential.

Homology is computed by column reduction in order of increasing
``(action, id)``.  Because the differential is strictly upper triangular in
that order, the same reduction is the persistence reduction of the action
filtration, so every homology basis element also records the action at which
it is born.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .f2 import SparseF2Matrix, bits_of, block_matrix, f2_rank

__all__ = [
    "ClassLabel",
    "ZERO_CLASS",
    "Generator",
    "GradedComplex",
    "ChainMap",
    "HomologyResult",
    "Violation",
    "ValidationError",
    "MissingUMapError",
    "NotACycleError",
    "validate",
    "check_chain_map",
    "homology",
    "induced_map",
    "mapping_cone",
    "tensor",
    "derived_tensor",
    "derived_tensor_complex",
    "convolve_dims",
    "as_fraction",
]


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction or ``"p/q"`` string (floats are refused)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not actions")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__} {x!r}")


class ClassLabel:
    """Element of ``Z^r + Z/m_1 + ... + Z/m_s``.

    Labels with no coordinates at all behave as the zero of every group, so
    complexes that never mention homology classes do not need to declare one.
    """

    __slots__ = ("free", "torsion", "moduli")

    def __init__(self, free: Sequence[int] = (), torsion: Sequence[int] = (), moduli: Sequence[int] = ()):
        if len(torsion) != len(moduli):
            raise ValueError("torsion part and moduli must have the same length")
        if any(m <= 0 for m in moduli):
            raise ValueError("torsion moduli must be positive")
        self.free = tuple(int(v) for v in free)
        self.moduli = tuple(int(m) for m in moduli)
        self.torsion = tuple(int(t) % m for t, m in zip(torsion, self.moduli))

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def _bare(self) -> bool:
        return not self.free and not self.moduli

    def __add__(self, other: "ClassLabel") -> "ClassLabel":
        if self._bare():
            return other
        if other._bare():
            return self
        if len(self.free) != len(other.free) or self.moduli != other.moduli:
            raise ValueError(f"labels {self} and {other} live in different groups")
        return ClassLabel(
            [a + b for a, b in zip(self.free, other.free)],
            [a + b for a, b in zip(self.torsion, other.torsion)],
            self.moduli,
        )

    def __neg__(self) -> "ClassLabel":
        return ClassLabel([-a for a in self.free], [-t for t in self.torsion], self.moduli)

    def __mul__(self, k: int) -> "ClassLabel":
        return ClassLabel([k * a for a in self.free], [k * t for t in self.torsion], self.moduli)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ClassLabel):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.free == other.free and self.torsion == other.torsion and self.moduli == other.moduli

    def __hash__(self) -> int:
        if self.is_zero():
            return hash("ClassLabel.zero")
        return hash((self.free, self.torsion, self.moduli))

    def __repr__(self) -> str:
        return f"ClassLabel(free={self.free}, torsion={self.torsion}, moduli={self.moduli})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = [str(v) for v in self.free]
        parts += [f"{t} mod {m}" for t, m in zip(self.torsion, self.moduli)]
        return "(" + ", ".join(parts) + ")"

    def to_json(self):
        if self._bare():
            return None
        return {"free": list(self.free), "torsion": list(self.torsion), "moduli": list(self.moduli)}

    @classmethod
    def from_json(cls, obj) -> "ClassLabel":
        if obj is None:
            return ZERO_CLASS
        return cls(obj.get("free", ()), obj.get("torsion", ()), obj.get("moduli", ()))


ZERO_CLASS = ClassLabel()


@dataclass(frozen=True)
class Generator:
    id: str
    grading: int
    action: Fraction
    h1class: ClassLabel = ZERO_CLASS

    def __post_init__(self):
        object.__setattr__(self, "action", as_fraction(self.action))
        object.__setattr__(self, "grading", int(self.grading))


@dataclass(frozen=True)
class Violation:
    """One failed invariant; ``ids`` names the offending generators (source first)."""

    kind: str
    ids: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        who = " -> ".join(self.ids)
        return f"{self.kind}: {who}" + (f" ({self.detail})" if self.detail else "")


class ValidationError(ValueError):
    def __init__(self, violations: Sequence[Violation], what: str = "complex"):
        self.violations = list(violations)
        lines = [str(v) for v in self.violations[:10]]
        more = len(self.violations) - len(lines)
        if more > 0:
            lines.append(f"... and {more} more")
        super().__init__(f"invalid {what}:\n  " + "\n  ".join(lines))


class MissingUMapError(ValueError):
    pass


class NotACycleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GradedComplex:
    """Finite F2 chain complex with graded, action-labelled generators.

    ``differential[i, j] == 1`` means generator ``i`` appears in the boundary
    of generator ``j`` (column = source).  ``complete_through`` records, for
    finite truncations of an infinite model, the largest grading up to which
    every generator of the underlying complex is present; ``None`` means the
    complex is complete.
    """

    generators: tuple[Generator, ...]
    differential: SparseF2Matrix
    umap: SparseF2Matrix | None = None
    complete_through: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        n = len(self.generators)
        if self.differential.shape != (n, n):
            raise ValueError(f"differential has shape {self.differential.shape}, expected {(n, n)}")
        if self.umap is not None and self.umap.shape != (n, n):
            raise ValueError(f"umap has shape {self.umap.shape}, expected {(n, n)}")
        seen = set()
        for g in self.generators:
            if g.id in seen:
                raise ValueError(f"duplicate generator id {g.id!r}")
            seen.add(g.id)

    @classmethod
    def from_pairs(
        cls,
        generators: Iterable[Generator],
        differential: Iterable[tuple[str, str]] = (),
        umap: Iterable[tuple[str, str]] | None = None,
        complete_through: int | None = None,
    ) -> "GradedComplex":
        """Build from ``(source_id, target_id)`` pairs, as in the interchange format."""
        gens = tuple(generators)
        where = {g.id: i for i, g in enumerate(gens)}

        def matrix(pairs):
            entries = []
            for s, t in pairs:
                if s not in where or t not in where:
                    missing = s if s not in where else t
                    raise KeyError(f"unknown generator id {missing!r}")
                entries.append((where[t], where[s]))
            return SparseF2Matrix(len(gens), len(gens), entries)

        return cls(gens, matrix(differential), None if umap is None else matrix(umap), complete_through)

    def __len__(self) -> int:
        return len(self.generators)

    @cached_property
    def index(self) -> dict[str, int]:
        return {g.id: i for i, g in enumerate(self.generators)}

    @property
    def ids(self) -> list[str]:
        return [g.id for g in self.generators]

    def pairs(self, which: str = "differential") -> list[tuple[str, str]]:
        m = self.differential if which == "differential" else self.umap
        if m is None:
            return []
        gens = self.generators
        return sorted((gens[j].id, gens[i].id) for i, j in m.entries)

    def gradings(self) -> list[int]:
        return sorted({g.grading for g in self.generators})

    def dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self.generators:
            out[g.grading] = out.get(g.grading, 0) + 1
        return dict(sorted(out.items()))

    def actions(self) -> list[Fraction]:
        return sorted({g.action for g in self.generators})

    def restrict(self, keep: Sequence[int], complete_through: int | None | str = "same") -> "GradedComplex":
        """Subcomplex (or quotient data) on the generators at the given indices."""
        keep = list(keep)
        d = self.differential.submatrix(keep, keep)
        u = None if self.umap is None else self.umap.submatrix(keep, keep)
        ct = self.complete_through if complete_through == "same" else complete_through
        return GradedComplex(tuple(self.generators[i] for i in keep), d, u, ct)

    def restrict_to_class(self, label: ClassLabel) -> "GradedComplex":
        return self.restrict([i for i, g in enumerate(self.generators) if g.h1class == label])

    def with_umap(self, umap: SparseF2Matrix | None) -> "GradedComplex":
        return dataclasses.replace(self, umap=umap)

    def equal_data(self, other: "GradedComplex") -> bool:
        return (
            self.generators == other.generators
            and self.differential == other.differential
            and self.umap == other.umap
            and self.complete_through == other.complete_through
        )

    def __repr__(self) -> str:
        u = "with U" if self.umap is not None else "no U"
        return f"GradedComplex({len(self)} generators, dims={self.dims()}, {u})"


def _map_violations(
    m: SparseF2Matrix,
    src: Sequence[Generator],
    tgt: Sequence[Generator],
    degree: int,
    name: str,
    check_actions: bool,
    slack: Fraction = Fraction(0),
    strict: bool = True,
) -> list[Violation]:
    out = []
    for i, j in sorted(m.entries, key=lambda e: (e[1], e[0])):
        a, b = src[j], tgt[i]
        if b.grading - a.grading != degree:
            out.append(Violation(f"{name}-degree", (a.id, b.id), f"grading {a.grading} -> {b.grading}, expected shift {degree}"))
        if check_actions:
            bad = b.action >= a.action + slack if strict else b.action > a.action + slack
            if bad:
                out.append(Violation(f"{name}-action", (a.id, b.id), f"action {a.action} -> {b.action}"))
        if a.h1class != b.h1class:
            out.append(Violation(f"{name}-class", (a.id, b.id), f"class {a.h1class} -> {b.h1class}"))
    return out


def _entry_violations(m: SparseF2Matrix, src, tgt, kind: str, detail: str) -> list[Violation]:
    return [Violation(kind, (src[j].id, tgt[i].id), detail) for i, j in sorted(m.entries, key=lambda e: (e[1], e[0]))]


def validate(c: GradedComplex, check_actions: bool = True) -> list[Violation]:
    """Every violated invariant of ``c``; an empty list means ``c`` is valid.

    Complexes are immutable, so the result is memoized on the instance.
    """
    cache = c.__dict__.setdefault("_validation", {})
    if check_actions not in cache:
        cache[check_actions] = tuple(_violations(c, check_actions))
    return list(cache[check_actions])


def _violations(c: GradedComplex, check_actions: bool) -> list[Violation]:
    gens = c.generators
    out: list[Violation] = []
    if check_actions:
        out += [Violation("negative-action", (g.id,), f"action {g.action}") for g in gens if g.action < 0]
    d = c.differential
    out += _map_violations(d, gens, gens, -1, "differential", check_actions)
    out += _entry_violations(d @ d, gens, gens, "d-squared", "nonzero entry of the squared differential")
    if c.umap is not None:
        u = c.umap
        out += _map_violations(u, gens, gens, -2, "umap", check_actions)
        out += _entry_violations(u @ d + d @ u, gens, gens, "umap-chain", "U does not commute with the differential")
    return out


def _require_valid(c: GradedComplex, check_actions: bool = False) -> None:
    bad = validate(c, check_actions=check_actions)
    if bad:
        raise ValidationError(bad)


@dataclass(frozen=True, eq=False)
class ChainMap:
    """F2-linear map between complexes; ``matrix`` has shape ``(len(target), len(source))``."""

    source: GradedComplex
    target: GradedComplex
    matrix: SparseF2Matrix
    degree: int = 0
    action_slack: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "action_slack", as_fraction(self.action_slack))
        if self.matrix.shape != (len(self.target), len(self.source)):
            raise ValueError(f"map matrix has shape {self.matrix.shape}, expected {(len(self.target), len(self.source))}")

    @classmethod
    def identity(cls, c: GradedComplex) -> "ChainMap":
        return cls(c, c, SparseF2Matrix.identity(len(c)))


def check_chain_map(f: ChainMap, check_actions: bool = True) -> list[Violation]:
    """Violations of: commuting with differentials, degree, action slack, class."""
    src, tgt = f.source.generators, f.target.generators
    out = _map_violations(f.matrix, src, tgt, f.degree, "map", check_actions, f.action_slack, strict=False)
    comm = f.matrix @ f.source.differential + f.target.differential @ f.matrix
    out += _entry_violations(comm, src, tgt, "map-commute", "f d + d f is nonzero")
    return out


def _integer_actions(actions: Sequence[Fraction]) -> list[int]:
    """Actions scaled by a common denominator; integer comparison is much cheaper than Fraction."""
    den = math.lcm(*(a.denominator for a in actions)) if actions else 1
    return [a.numerator * (den // a.denominator) for a in actions]


class _Reduction:
    """Column reduction of the differential in (action, id) order.

    All bitsets here are indexed by *filtration position*, not by the
    original generator index.
    """

    def __init__(self, c: GradedComplex):
        gens = c.generators
        n = len(gens)
        keys = _integer_actions([g.action for g in gens])
        order = sorted(range(n), key=lambda i: (keys[i], gens[i].id))
        pos = [0] * n
        for p, i in enumerate(order):
            pos[i] = p
        self.order = order
        self.pos = pos
        reduced = [0] * n
        cycles = [0] * n
        pivot: dict[int, int] = {}
        d = c.differential
        for p, i in enumerate(order):
            r = self.to_pos(d.column(i))
            v = 1 << p
            while r:
                q = pivot.get(r.bit_length() - 1)
                if q is None:
                    break
                r ^= reduced[q]
                v ^= cycles[q]
            reduced[p] = r
            cycles[p] = v
            if r:
                pivot[r.bit_length() - 1] = p
        self.reduced = reduced
        self.cycles = cycles
        self.pivot = pivot
        self.essential = [p for p in range(n) if reduced[p] == 0 and p not in pivot]
        self.death = {low: p for low, p in pivot.items()}

    def to_pos(self, x: int) -> int:
        pos = self.pos
        out = 0
        for i in bits_of(x):
            out |= 1 << pos[i]
        return out

    def to_orig(self, x: int) -> int:
        order = self.order
        out = 0
        for p in bits_of(x):
            out |= 1 << order[p]
        return out


@dataclass(eq=False)
class HomologyResult:
    """Graded F2 homology together with a filtration-adapted basis.

    ``basis[g]`` lists cycle representatives (sets of generator indices of the
    complex) ordered by the action at which they are born; ``births[g]`` holds
    those actions.  ``induced_u[g]`` is the matrix of U from ``H_g`` to
    ``H_{g-2}`` in these bases (only when the complex carries a U-map).
    """

    complex: GradedComplex
    dims: dict[int, int]
    basis: dict[int, tuple[frozenset[int], ...]]
    births: dict[int, tuple[Fraction, ...]]
    leaders: dict[int, tuple[int, ...]]
    induced_u: dict[int, np.ndarray] | None
    _red: _Reduction = field(repr=False)
    _slot: dict[int, tuple[int, int]] = field(repr=False)
    _rep_bits: dict[int, tuple[int, ...]] = field(repr=False)

    def dim(self, g: int) -> int:
        return self.dims.get(g, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def nonzero_dims(self) -> dict[int, int]:
        return {g: d for g, d in self.dims.items() if d}

    def coordinates(self, chain: int | Iterable[int], grading: int) -> np.ndarray:
        """Coordinates of the homology class of a cycle, in ``basis[grading]``.

        ``chain`` is a bitset (or iterable) of generator indices.  Raises
        :class:`NotACycleError` if the chain is not a cycle.
        """
        if not isinstance(chain, int):
            chain = sum(1 << i for i in set(chain))
        red = self._red
        z = red.to_pos(chain)
        vec = np.zeros(self.dim(grading), dtype=np.uint8)
        while z:
            low = z.bit_length() - 1
            q = red.pivot.get(low)
            if q is not None:
                z ^= red.reduced[q]
                continue
            slot = self._slot.get(low)
            if slot is None:
                raise NotACycleError(f"chain is not a cycle (stuck at {self.complex.generators[red.order[low]].id!r})")
            g, k = slot
            if g != grading:
                raise NotACycleError(f"chain has a component in grading {g}, expected {grading}")
            z ^= red.cycles[low]
            vec[k] ^= 1
        return vec

    def representative(self, grading: int, vec) -> int:
        """Bitset of a cycle representing the class with coordinates ``vec``."""
        out = 0
        for k in np.flatnonzero(np.asarray(vec) % 2):
            out ^= self._rep_bits[grading][int(k)]
        return out

    def is_boundary(self, chain: int) -> bool:
        red = self._red
        z = red.to_pos(chain)
        while z:
            q = red.pivot.get(z.bit_length() - 1)
            if q is None:
                return False
            z ^= red.reduced[q]
        return True

    def u_power(self, grading: int, k: int) -> np.ndarray:
        """Matrix of ``U^k`` from ``H_grading`` to ``H_{grading - 2k}``."""
        if self.induced_u is None:
            raise MissingUMapError("complex carries no U-map")
        m = np.eye(self.dim(grading), dtype=np.uint8)
        g = grading
        for _ in range(k):
            step = self.induced_u.get(g)
            if step is None:
                step = np.zeros((self.dim(g - 2), self.dim(g)), dtype=np.uint8)
            m = (step.astype(np.int64) @ m.astype(np.int64) % 2).astype(np.uint8)
            g -= 2
        return m


def homology(c: GradedComplex, check: bool = True) -> HomologyResult:
    """Homology of ``c`` with filtration-adapted cycle representatives.

    ``dim H_g = dim ker d_g - dim im d_{g+1}`` for every grading present.  The
    algebraic invariants (grading shifts, classes, ``d^2 = 0``, U a chain
    map) are checked first; action monotonicity is not needed for homology
    and is left to :func:`validate`.
    """
    if check:
        _require_valid(c, check_actions=False)
    red = _Reduction(c)
    gens = c.generators
    dims = {g: 0 for g in c.gradings()}
    basis: dict[int, list] = {g: [] for g in dims}
    births: dict[int, list] = {g: [] for g in dims}
    leaders: dict[int, list] = {g: [] for g in dims}
    rep_bits: dict[int, list] = {g: [] for g in dims}
    slot: dict[int, tuple[int, int]] = {}
    for p in red.essential:
        gen = gens[red.order[p]]
        g = gen.grading
        slot[p] = (g, dims[g])
        dims[g] += 1
        bits = red.to_orig(red.cycles[p])
        rep_bits[g].append(bits)
        basis[g].append(frozenset(bits_of(bits)))
        births[g].append(gen.action)
        leaders[g].append(red.order[p])
    result = HomologyResult(
        complex=c,
        dims=dims,
        basis={g: tuple(v) for g, v in basis.items()},
        births={g: tuple(v) for g, v in births.items()},
        leaders={g: tuple(v) for g, v in leaders.items()},
        induced_u=None,
        _red=red,
        _slot=slot,
        _rep_bits={g: tuple(v) for g, v in rep_bits.items()},
    )
    if c.umap is not None:
        result.induced_u = _induced_on(result, result, c.umap, -2)
    return result


def _induced_on(hsrc: HomologyResult, htgt: HomologyResult, m: SparseF2Matrix, degree: int) -> dict[int, np.ndarray]:
    out = {}
    for g, reps in hsrc._rep_bits.items():
        cols = [htgt.coordinates(m.apply(z), g + degree) for z in reps]
        mat = np.zeros((htgt.dim(g + degree), len(reps)), dtype=np.uint8)
        for k, col in enumerate(cols):
            mat[:, k] = col
        out[g] = mat
    return out


def induced_map(f: ChainMap, hsrc: HomologyResult | None = None, htgt: HomologyResult | None = None,
                check: bool = True) -> dict[int, np.ndarray]:
    """Per-grading matrices of ``f_*: H_g(source) -> H_{g+deg}(target)``."""
    if check:
        bad = check_chain_map(f, check_actions=False)
        if bad:
            raise ValidationError(bad, what="chain map")
    hsrc = hsrc if hsrc is not None else homology(f.source)
    htgt = htgt if htgt is not None else homology(f.target)
    if hsrc.complex is not f.source or htgt.complex is not f.target:
        if not (hsrc.complex.equal_data(f.source) and htgt.complex.equal_data(f.target)):
            raise ValueError("homology results do not belong to the map's source/target")
    return _induced_on(hsrc, htgt, f.matrix, f.degree)


def _shift_complete(t: int | None, s: int) -> int | None:
    return None if t is None else t + s


def mapping_cone(f: ChainMap, action_shift=0, check: bool = True) -> GradedComplex:
    """Mapping cone of ``f``: source copy followed by a shifted target copy.

    The source keeps its gradings; the target copy is shifted by
    ``-1 - f.degree`` so the cone differential
    ``[[d_src, 0], [f, d_tgt]]`` has degree -1.  For a degree -2 map (the
    U-map case) the target copy sits one grading above its original, which is
    the grading of the orbit sets that contain the special hyperbolic orbit.
    Target copies get id suffix ``'`` and action increased by
    ``action_shift``.
    """
    if check:
        bad = check_chain_map(f, check_actions=False)
        if bad:
            raise ValidationError(bad, what="chain map")
    shift = -1 - f.degree
    da = as_fraction(action_shift)
    src, tgt = f.source, f.target
    gens = list(src.generators) + [
        Generator(g.id + "'", g.grading + shift, g.action + da, g.h1class) for g in tgt.generators
    ]
    ns, nt = len(src), len(tgt)
    d = block_matrix([
        [src.differential, SparseF2Matrix.zeros(ns, nt)],
        [f.matrix, tgt.differential],
    ])
    if src.complete_through is None and tgt.complete_through is None:
        ct = None
    else:
        cands = [t for t in (src.complete_through, _shift_complete(tgt.complete_through, shift)) if t is not None]
        ct = min(cands)
    return GradedComplex(tuple(gens), d, None, ct)


def _tensor_complete(c1: GradedComplex, c2: GradedComplex) -> int | None:
    if not len(c1) or not len(c2):
        return None
    m1 = min(g.grading for g in c1.generators)
    m2 = min(g.grading for g in c2.generators)
    cands = []
    if c1.complete_through is not None:
        cands.append(c1.complete_through + m2)
    if c2.complete_through is not None:
        cands.append(c2.complete_through + m1)
    return min(cands) if cands else None


def tensor(c1: GradedComplex, c2: GradedComplex) -> GradedComplex:
    """Tensor product over F2 with the Leibniz differential ``d1 x 1 + 1 x d2``.

    Generator ``(x, y)`` has id ``"x|y"`` and sits at index
    ``i_x * len(c2) + i_y``; grading, action and class add.  The result has
    no U-map; see :func:`derived_tensor` for the two natural ones.
    """
    gens = tuple(
        Generator(f"{x.id}|{y.id}", x.grading + y.grading, x.action + y.action, x.h1class + y.h1class)
        for x in c1.generators
        for y in c2.generators
    )
    i1 = SparseF2Matrix.identity(len(c1))
    i2 = SparseF2Matrix.identity(len(c2))
    d = c1.differential.kron(i2) + i1.kron(c2.differential)
    return GradedComplex(gens, d, None, _tensor_complete(c1, c2))


def _umaps(c1, c2, u1, u2):
    u1 = u1 if u1 is not None else c1.umap
    u2 = u2 if u2 is not None else c2.umap
    if u1 is None or u2 is None:
        raise MissingUMapError("derived tensor product needs a U-map on both factors")
    return u1, u2


def derived_tensor_complex(c1: GradedComplex, c2: GradedComplex, u1: SparseF2Matrix | None = None,
                           u2: SparseF2Matrix | None = None) -> GradedComplex:
    """``Cone(U1 x 1 + 1 x U2)`` on ``c1 x c2``, carrying the U-action ``U1 x 1`` on both copies."""
    u1, u2 = _umaps(c1, c2, u1, u2)
    t = tensor(c1, c2)
    i1 = SparseF2Matrix.identity(len(c1))
    i2 = SparseF2Matrix.identity(len(c2))
    left = u1.kron(i2)
    phi = left + i1.kron(u2)
    cone = mapping_cone(ChainMap(t, t, phi, degree=-2), check=False)
    n = len(t)
    u = block_matrix([[left, SparseF2Matrix.zeros(n, n)], [SparseF2Matrix.zeros(n, n), left]])
    return cone.with_umap(u)


def derived_tensor(c1: GradedComplex, c2: GradedComplex, u1: SparseF2Matrix | None = None,
                   u2: SparseF2Matrix | None = None) -> HomologyResult:
    """Homology of the mapping cone of ``U1 x 1 + 1 x U2`` on ``c1 x c2``."""
    if u1 is not None:
        c1 = c1.with_umap(u1)
    if u2 is not None:
        c2 = c2.with_umap(u2)
    for c in (c1, c2):
        if c.umap is None:
            raise MissingUMapError("derived tensor product needs a U-map on both factors")
        _require_valid(c)
    return homology(derived_tensor_complex(c1, c2), check=False)


def convolve_dims(d1: Mapping[int, int], d2: Mapping[int, int]) -> dict[int, int]:
    """Graded dimensions of a tensor product: ``sum_{a+b=g} d1[a] d2[b]``."""
    out: dict[int, int] = {}
    for a, x in d1.items():
        for b, y in d2.items():
            if x and y:
                out[a + b] = out.get(a + b, 0) + x * y
    return dict(sorted(out.items()))


def rank_table(maps: Mapping[int, np.ndarray]) -> dict[int, int]:
    return {g: f2_rank(m) for g, m in sorted(maps.items())}
