"""Connected-sum engine: the block complex, its filtration and the chain equivalence.

Write ``C_o = C_1 (x) C_2`` and ``phi = U_1 (x) 1 + 1 (x) U_2``.  The connected
sum adds a special hyperbolic orbit ``h`` of small action ``eps``.  Generators
of the model are the orbit sets of ``C_o`` (the o-part) together with the
same sets with ``h`` appended (the h-part, one grading higher and ``eps``
more action).  In the block decomposition ``C_o + C_h`` the differential is

    d_# = [[d_oo, d_oh],
           [d_ho, d_hh]]

with ``d_oo = d_1 (x) 1 + 1 (x) d_2``, ``d_oh = 0``, ``d_hh = h d_oo h^-1``
and ``d_ho = h (phi + d_oo K + K d_oo)`` for a homotopy ``K`` of degree -1 on
``C_o`` (zero by default).  The map ``F = [[1, 0], [hK, h]]`` identifies the
mapping cone of ``phi`` with this complex.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction


from .ech_core import LDegeneracyError
from .f2 import SparseF2Matrix, block_matrix, f2_is_invertible
from .homalg import (
    ChainMap,
    ClassLabel,
    Generator,
    GradedComplex,
    HomologyResult,
    MissingUMapError,
    ValidationError,
    Violation,
    as_fraction,
    check_chain_map,
    derived_tensor,
    homology,
    induced_map,
    mapping_cone,
    tensor,
    validate,
)

__all__ = [
    "H_SUFFIX",
    "ConeData",
    "BlockDifferential",
    "EquivalenceError",
    "EquivalenceReport",
    "ComparisonRow",
    "ClassReport",
    "default_eps",
    "random_k_map",
    "cone_blocks",
    "build_cone_complex",
    "filtered_cone",
    "phi_map",
    "chain_equivalence",
    "connected_sum_homology",
    "theorem_comparison",
    "class_decomposition_check",
    "safe_status",
]

H_SUFFIX = " h"


def _smallest_positive_action(c: GradedComplex) -> Fraction | None:
    pos = [g.action for g in c.generators if g.action > 0]
    return min(pos) if pos else None


def default_eps(c1: GradedComplex, c2: GradedComplex) -> Fraction:
    """Smallest positive action of ``c1 (x) c2`` divided by 10^6 (1/10^6 if there is none)."""
    acts = [x.action + y.action for x in c1.generators for y in c2.generators]
    pos = [a for a in acts if a > 0]
    base = min(pos) if pos else Fraction(1)
    return base / 10**6


def phi_map(c1: GradedComplex, c2: GradedComplex) -> SparseF2Matrix:
    """``U_1 (x) 1 + 1 (x) U_2`` on the tensor product."""
    if c1.umap is None or c2.umap is None:
        raise MissingUMapError("both factors need a U-map")
    i1 = SparseF2Matrix.identity(len(c1))
    i2 = SparseF2Matrix.identity(len(c2))
    return c1.umap.kron(i2) + i1.kron(c2.umap)


def _min_gap(m: SparseF2Matrix, gens) -> Fraction | None:
    gaps = [gens[j].action - gens[i].action for i, j in m.entries]
    return min(gaps) if gaps else None


@dataclass(frozen=True, eq=False)
class ConeData:
    """Inputs of the connected-sum model.

    ``eps`` is the action of the special orbit ``h``; ``None`` selects
    :func:`default_eps`.  ``k_map`` is the homotopy ``K`` on ``C_1 (x) C_2``
    (degree -1, strictly action decreasing); ``None`` means ``K = 0``.
    """

    c1: GradedComplex
    c2: GradedComplex
    eps: Fraction | None = None
    k_map: SparseF2Matrix | None = None
    tensor_complex: GradedComplex = field(init=False, repr=False)

    def __post_init__(self):
        for name, c in (("c1", self.c1), ("c2", self.c2)):
            if c.umap is None:
                raise MissingUMapError(f"{name} carries no U-map")
            bad = validate(c)
            if bad:
                raise ValidationError(bad, what=name)
        eps = default_eps(self.c1, self.c2) if self.eps is None else as_fraction(self.eps)
        object.__setattr__(self, "eps", eps)
        t = tensor(self.c1, self.c2)
        object.__setattr__(self, "tensor_complex", t)
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        smallest = _smallest_positive_action(t)
        if smallest is not None and eps >= smallest:
            raise ValueError(f"eps = {eps} is not below the smallest positive tensor action {smallest}")
        n = len(t)
        if self.k_map is not None:
            if self.k_map.shape != (n, n):
                raise ValueError(f"k_map has shape {self.k_map.shape}, expected {(n, n)}")
            bad = [
                Violation("k-map", (t.generators[j].id, t.generators[i].id), reason)
                for i, j in sorted(self.k_map.entries, key=lambda e: (e[1], e[0]))
                for reason in _k_entry_problems(t.generators[j], t.generators[i])
            ]
            if bad:
                raise ValidationError(bad, what="k_map")
        gap = _min_gap(self.phi_k(), t.generators)
        if gap is not None and eps >= gap:
            raise ValueError(
                f"eps = {eps} is not below the smallest action drop {gap} of U1 x 1 + 1 x U2 + dK + Kd; "
                "the h-part would break the action filtration"
            )

    @property
    def k(self) -> SparseF2Matrix:
        n = len(self.tensor_complex)
        return self.k_map if self.k_map is not None else SparseF2Matrix.zeros(n, n)

    def phi(self) -> SparseF2Matrix:
        return phi_map(self.c1, self.c2)

    def phi_k(self) -> SparseF2Matrix:
        d = self.tensor_complex.differential
        k = self.k
        return self.phi() + d @ k + k @ d


def _k_entry_problems(src: Generator, tgt: Generator) -> list[str]:
    out = []
    if tgt.grading != src.grading - 1:
        out.append(f"grading {src.grading} -> {tgt.grading}, expected shift -1")
    if tgt.action >= src.action:
        out.append(f"action {src.action} -> {tgt.action} does not decrease")
    if tgt.h1class != src.h1class:
        out.append("changes homology class")
    return out


def random_k_map(t: GradedComplex, seed: int, density: float = 0.3) -> SparseF2Matrix:
    """Random admissible homotopy ``K`` on ``t`` (degree -1, strictly action decreasing, class preserving)."""
    rng = random.Random(seed)
    gens = t.generators
    by_grading: dict[int, list[int]] = {}
    for i, g in enumerate(gens):
        by_grading.setdefault(g.grading, []).append(i)
    entries = []
    for j, s in enumerate(gens):
        for i in by_grading.get(s.grading - 1, ()):
            g = gens[i]
            if g.action < s.action and g.h1class == s.h1class and rng.random() < density:
                entries.append((i, j))
    return SparseF2Matrix(len(gens), len(gens), entries)


@dataclass(frozen=True, eq=False)
class BlockDifferential:
    d_oo: SparseF2Matrix
    d_oh: SparseF2Matrix
    d_ho: SparseF2Matrix
    d_hh: SparseF2Matrix

    def total(self) -> SparseF2Matrix:
        """Full differential with o-generators first; column = source."""
        return block_matrix([[self.d_oo, self.d_oh], [self.d_ho, self.d_hh]])

    def violations(self) -> list[str]:
        out = []
        if not self.d_oh.is_zero():
            out.append("d_oh is not zero")
        if self.d_hh != self.d_oo:
            out.append("d_hh differs from h d_oo h^-1")
        if not (self.total() @ self.total()).is_zero():
            out.append("d_# squared is not zero")
        return out

    def supports(self) -> dict[str, list[tuple[int, int]]]:
        return {
            name: sorted(getattr(self, name).entries)
            for name in ("d_oo", "d_oh", "d_ho", "d_hh")
        }


def cone_blocks(d: ConeData) -> BlockDifferential:
    """The four blocks of ``d_#``, indexed in tensor-generator order on each side."""
    t = d.tensor_complex
    n = len(t)
    return BlockDifferential(
        d_oo=t.differential,
        d_oh=SparseF2Matrix.zeros(n, n),
        d_ho=d.phi_k(),
        d_hh=t.differential,
    )


def _h_generators(t: GradedComplex, eps: Fraction) -> tuple[Generator, ...]:
    return tuple(Generator(g.id + H_SUFFIX, g.grading + 1, g.action + eps, g.h1class) for g in t.generators)


def build_cone_complex(d: ConeData) -> GradedComplex:
    """The connected-sum complex ``C_o + C_h`` with the block differential.

    Its U-map is transported from ``diag(U_1 (x) 1, U_1 (x) 1)`` on the
    mapping cone through ``F``, which gives ``[[U, 0], [KU + UK, U]]``.
    """
    t = d.tensor_complex
    n = len(t)
    blocks = cone_blocks(d)
    gens = t.generators + _h_generators(t, d.eps)
    u = d.c1.umap.kron(SparseF2Matrix.identity(len(d.c2)))
    k = d.k
    umap = block_matrix([[u, SparseF2Matrix.zeros(n, n)], [k @ u + u @ k, u]])
    c = GradedComplex(gens, blocks.total(), umap, t.complete_through)
    bad = validate(c)
    if bad:
        raise ValidationError(bad, what="connected-sum complex")
    return c


def filtered_cone(d: ConeData, L) -> GradedComplex:
    """``Cone^L``: the o-part below ``L`` and the h-part whose o-part is below ``L - eps``."""
    L = as_fraction(L)
    full = build_cone_complex(d)
    t = d.tensor_complex
    n = len(t)
    for g in t.generators:
        if g.action == L:
            raise LDegeneracyError(f"o-generator {g.id!r} has action exactly L = {L}")
        if g.action == L - d.eps:
            raise LDegeneracyError(f"h-generator {g.id + H_SUFFIX!r} has action exactly L = {L}")
    keep = [i for i, g in enumerate(t.generators) if g.action < L]
    keep += [n + i for i, g in enumerate(t.generators) if g.action < L - d.eps]
    if len(keep) == len(full):
        return full
    dropped = min(full.generators[i].grading for i in range(len(full)) if i not in set(keep))
    ct = dropped - 1 if full.complete_through is None else min(full.complete_through, dropped - 1)
    return full.restrict(keep, complete_through=ct)


class EquivalenceError(ValueError):
    def __init__(self, report: "EquivalenceReport"):
        self.report = report
        super().__init__("chain equivalence check failed: " + "; ".join(report.failures()))


@dataclass(eq=False)
class EquivalenceReport:
    """Outcome of the four block identities and the chain-map check for ``F``.

    ``identities`` maps each identity name to the list of offending
    ``(row, col)`` entries in tensor-generator indexing (empty = holds).
    """

    F: ChainMap
    identities: dict[str, list[tuple[int, int]]]
    chain_map_violations: list[Violation]
    graded_iso: bool
    homology_iso: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.failures()

    def failures(self) -> list[str]:
        out = [f"{name} fails at {len(bad)} entries" for name, bad in self.identities.items() if bad]
        if self.chain_map_violations:
            out.append(f"F is not a chain map ({len(self.chain_map_violations)} violations)")
        if not self.graded_iso:
            out.append("F is not a graded isomorphism")
        if self.homology_iso is False:
            out.append("F does not induce an isomorphism on homology")
        return out


IDENTITY_NAMES = (
    "d_oh hK = 0",
    "d_oh h = 0",
    "hK d_oo + h phi = d_ho + d_hh hK",
    "h d_oo = d_hh h",
)


def chain_equivalence(d: ConeData, check_homology: bool = True, raise_on_failure: bool = True) -> EquivalenceReport:
    """The map ``F`` from ``Cone(phi)`` to the built complex, with its checks."""
    t = d.tensor_complex
    n = len(t)
    phi = d.phi()
    source = mapping_cone(ChainMap(t, t, phi, degree=-2), check=False)
    target = build_cone_complex(d)
    blocks = cone_blocks(d)
    k = d.k
    eye = SparseF2Matrix.identity(n)
    F = ChainMap(source, target, block_matrix([[eye, SparseF2Matrix.zeros(n, n)], [k, eye]]), 0, d.eps)
    dd = t.differential
    identities = {
        IDENTITY_NAMES[0]: sorted((blocks.d_oh @ k).entries),
        IDENTITY_NAMES[1]: sorted(blocks.d_oh.entries),
        IDENTITY_NAMES[2]: sorted((k @ dd + phi + blocks.d_ho + blocks.d_hh @ k).entries),
        IDENTITY_NAMES[3]: sorted((dd + blocks.d_hh).entries),
    }
    cm = check_chain_map(F)
    graded = all(s.grading == g.grading for s, g in zip(source.generators, target.generators))
    graded_iso = graded and f2_is_invertible(F.matrix.to_dense())
    report = EquivalenceReport(F, identities, cm, graded_iso)
    if check_homology and not cm:
        hs, ht = homology(source, check=False), homology(target, check=False)
        maps = induced_map(F, hs, ht, check=False)
        report.homology_iso = all(
            hs.dim(g) == ht.dim(g) and (hs.dim(g) == 0 or f2_is_invertible(maps[g]))
            for g in hs.dims
        )
    if raise_on_failure and not report.ok:
        raise EquivalenceError(report)
    return report


def connected_sum_homology(c1: GradedComplex, c2: GradedComplex) -> HomologyResult:
    """Right-hand side of the connected-sum formula: the derived tensor product over F[U].

    Its graded dimensions agree with those of ``homology(build_cone_complex)``
    for every admissible ``eps`` and ``K``, since ``F`` is a chain isomorphism.
    """
    return derived_tensor(c1, c2)


def safe_status(complete_through: int | None, grading: int) -> bool:
    """Whether homology in ``grading`` is unaffected by truncation.

    Homology in grading ``g`` needs every generator of gradings ``g`` and
    ``g + 1``, so it is safe for ``g <= complete_through - 1``.
    """
    return complete_through is None or grading <= complete_through - 1


@dataclass(frozen=True)
class ComparisonRow:
    grading: int
    cone_dim: int
    derived_dim: int
    status: str  # PASS, FAIL or EXCLUDED


def theorem_comparison(d: ConeData) -> list[ComparisonRow]:
    """Per-grading comparison of ``H(build_cone_complex)`` with the derived tensor product.

    Gradings outside the range where the truncated factors are complete are
    reported as EXCLUDED rather than compared.
    """
    cone = build_cone_complex(d)
    hc = homology(cone, check=False)
    hd = connected_sum_homology(d.c1, d.c2)
    rows = []
    for g in sorted(set(hc.dims) | set(hd.dims)):
        a, b = hc.dim(g), hd.dim(g)
        if not safe_status(cone.complete_through, g):
            status = "EXCLUDED"
        else:
            status = "PASS" if a == b else "FAIL"
        rows.append(ComparisonRow(g, a, b, status))
    return rows


@dataclass(eq=False)
class ClassReport:
    gamma: ClassLabel
    leaks: list[str]
    summand_dims: dict[int, int]
    factor_dims: dict[int, int]
    class_dims: dict[ClassLabel, dict[int, int]]
    total_dims: dict[int, int]

    @property
    def additive(self) -> bool:
        summed: dict[int, int] = {}
        for dims in self.class_dims.values():
            for g, v in dims.items():
                summed[g] = summed.get(g, 0) + v
        keys = set(summed) | set(self.total_dims)
        return all(summed.get(g, 0) == self.total_dims.get(g, 0) for g in keys)

    @property
    def ok(self) -> bool:
        keys = set(self.summand_dims) | set(self.factor_dims)
        match = all(self.summand_dims.get(g, 0) == self.factor_dims.get(g, 0) for g in keys)
        return not self.leaks and match and self.additive


def _nonzero(dims: dict[int, int]) -> dict[int, int]:
    return {g: v for g, v in sorted(dims.items()) if v}


def class_decomposition_check(d: ConeData, gamma1: ClassLabel, gamma2: ClassLabel) -> ClassReport:
    """Check that the class ``gamma1 + gamma2`` summand of the cone comes from the factor classes.

    Labels of ``c1`` and ``c2`` must live in one group (for a connected sum,
    embed both into the direct sum of the two first homology groups).  The
    report lists label leaks, compares the summand's homology with the sum of
    the derived tensor products of factor summands whose labels add to
    ``gamma1 + gamma2``, and checks that class summands add up to the whole.
    """
    c1, c2 = d.c1, d.c2
    cone = build_cone_complex(d)
    n2 = len(c2)
    n = len(d.tensor_complex)
    leaks = []
    for idx, g in enumerate(cone.generators):
        i = idx % n
        x, y = c1.generators[i // n2], c2.generators[i % n2]
        expected = x.h1class + y.h1class
        if g.h1class != expected:
            leaks.append(f"{g.id}: label {g.h1class}, factor labels sum to {expected}")
    gamma = gamma1 + gamma2
    summand = cone.restrict_to_class(gamma)
    summand_dims = _nonzero(homology(summand, check=False).dims) if len(summand) else {}
    factor_dims: dict[int, int] = {}
    labels1 = sorted({g.h1class for g in c1.generators}, key=str)
    labels2 = sorted({g.h1class for g in c2.generators}, key=str)
    for a in labels1:
        for b in labels2:
            if a + b != gamma:
                continue
            r1, r2 = c1.restrict_to_class(a), c2.restrict_to_class(b)
            for g, v in derived_tensor(r1, r2).dims.items():
                factor_dims[g] = factor_dims.get(g, 0) + v
    class_dims = {}
    for lab in sorted({g.h1class for g in cone.generators}, key=str):
        class_dims[lab] = _nonzero(homology(cone.restrict_to_class(lab), check=False).dims)
    total = _nonzero(homology(cone, check=False).dims)
    return ClassReport(gamma, leaks, summand_dims, _nonzero(factor_dims), class_dims, total)


def block_sidecar(d: ConeData) -> dict:
    """Supports of the four blocks, by generator id, for the ``consum`` sidecar file."""
    t = d.tensor_complex
    ids = [g.id for g in t.generators]
    hids = [i + H_SUFFIX for i in ids]
    blocks = cone_blocks(d)
    src_tgt = {
        "d_oo": (ids, ids),
        "d_oh": (hids, ids),
        "d_ho": (ids, hids),
        "d_hh": (hids, hids),
    }
    out = {"eps": f"{d.eps.numerator}/{d.eps.denominator}", "blocks": {}}
    for name, (src, tgt) in src_tgt.items():
        m = getattr(blocks, name)
        out["blocks"][name] = [[src[j], tgt[i]] for i, j in sorted(m.entries, key=lambda e: (e[1], e[0]))]
    return out
