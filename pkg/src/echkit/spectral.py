"""ECH spectral invariants ``c_sigma`` and ``c_k`` and the connected-sum sweep.

For a class ``sigma`` in the homology of the full complex, ``c_sigma`` is
the infimum of the thresholds ``L`` such that ``sigma`` lies in the image of
the homology of ``ECC^L``.  The filtration only changes at generator
actions, so the infimum is the least action ``A`` such that ``sigma`` has a
representing cycle made of generators of action at most ``A``.

The homology basis produced by :func:`echkit.homalg.homology` is adapted to
the filtration: the image of ``H(ECC^L)`` is spanned by the basis classes
born below ``L``.  Hence ``c_sigma`` is the largest birth action among the
basis classes in the support of ``sigma``, and minimizing ``c_sigma`` over an
affine space of classes is an echelon reduction with respect to birth order.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .connect import ConeData, build_cone_complex, safe_status
from .ech_core import FilteredTower
from .f2 import f2_nullspace, f2_solve
from .homalg import GradedComplex, HomologyResult, MissingUMapError, homology

__all__ = [
    "InsufficientDepthError",
    "ZeroClassError",
    "SpectralContext",
    "SpectrumEntry",
    "SpectrumTable",
    "c_sigma",
    "c_k",
    "spectrum_table",
    "max_convolution",
    "SweepRow",
    "SweepResult",
    "conjecture_sweep",
    "fraction_str",
]


class InsufficientDepthError(ValueError):
    """The truncation is too shallow to determine the requested invariant."""


class ZeroClassError(ValueError):
    pass


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class SpectralContext:
    """Homology of the deepest level of a tower (or of a complex), with the contact class.

    The contact class ``[empty]`` is the class of the unique generator of
    action 0.
    """

    def __init__(self, source: FilteredTower | GradedComplex):
        if isinstance(source, FilteredTower):
            self.tower: FilteredTower | None = source
            self.complex = source.truncations[-1]
            self.h = source.top
        else:
            self.tower = None
            self.complex = source
            self.h = homology(source)
        if self.complex.umap is None:
            raise MissingUMapError("spectral invariants need a U-map")
        zero = [i for i, g in enumerate(self.complex.generators) if g.action == 0]
        if len(zero) != 1:
            raise ValueError(f"expected exactly one generator of action 0 (the empty set), found {len(zero)}")
        self.empty_index = zero[0]
        self.empty_grading = self.complex.generators[zero[0]].grading
        try:
            self.empty_coords = self.h.coordinates(1 << zero[0], self.empty_grading)
        except ValueError as exc:
            raise ZeroClassError(f"the empty set is not a cycle: {exc}") from None
        if not self.empty_coords.any():
            raise ZeroClassError("the contact class [empty] vanishes in homology")

    def safe(self, grading: int) -> bool:
        return safe_status(self.complex.complete_through, grading)

    def threshold_index(self, value: Fraction) -> int | None:
        """Index of the first tower threshold above ``value``."""
        if self.tower is None:
            return None
        i = bisect.bisect_right(self.tower.thresholds, value)
        return i if i < len(self.tower) else None


def _context(source) -> SpectralContext:
    return source if isinstance(source, SpectralContext) else SpectralContext(source)


def _max_birth(h: HomologyResult, grading: int, vec: np.ndarray) -> Fraction:
    support = np.flatnonzero(vec % 2)
    if len(support) == 0:
        raise ZeroClassError("sigma is zero in homology")
    return max(h.births[grading][int(i)] for i in support)


def c_sigma(source, grading: int, sigma) -> Fraction:
    """Spectral invariant of the class with coordinates ``sigma`` in ``basis[grading]``."""
    ctx = _context(source)
    if not ctx.safe(grading):
        raise InsufficientDepthError(f"grading {grading} lies in the truncation band of this model")
    vec = np.asarray(sigma, dtype=np.uint8) % 2
    if vec.shape != (ctx.h.dim(grading),):
        raise ValueError(f"sigma needs {ctx.h.dim(grading)} coordinates in grading {grading}")
    return _max_birth(ctx.h, grading, vec)


def _minimize(vec: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Element of ``vec + span(kernel)`` whose highest nonzero index is smallest.

    Basis indices are in birth order, so this minimizes the largest birth.
    """
    pivots: dict[int, np.ndarray] = {}
    for w in kernel:
        w = w.copy()
        while w.any():
            top = int(np.flatnonzero(w)[-1])
            if top in pivots:
                w ^= pivots[top]
            else:
                pivots[top] = w
                break
    v = vec.copy()
    while v.any():
        top = int(np.flatnonzero(v)[-1])
        if top not in pivots:
            break
        v ^= pivots[top]
    return v


@dataclass(frozen=True)
class SpectrumEntry:
    k: int
    value: Fraction | None  # None = insufficient depth
    witness: tuple[str, ...] = ()  # leading generator ids of the witness's basis classes
    threshold_index: int | None = None


def c_k(source, k: int) -> SpectrumEntry:
    """``c_k = min { c_sigma : U^k sigma = [empty] }``.

    Raises :class:`InsufficientDepthError` if the gradings involved are not
    fully present in the truncation, or if no such class exists there.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    ctx = _context(source)
    h = ctx.h
    g = ctx.empty_grading + 2 * k
    if not ctx.safe(g):
        raise InsufficientDepthError(f"c_{k} needs grading {g}, beyond the complete range of this model")
    M = h.u_power(g, k)
    if M.shape[1] == 0:
        raise InsufficientDepthError(f"no homology in grading {g}")
    x = f2_solve(M, ctx.empty_coords)
    if x is None:
        raise InsufficientDepthError(f"no class sigma in grading {g} with U^{k} sigma = [empty]")
    best = _minimize(x, f2_nullspace(M))
    value = _max_birth(h, g, best)
    witness = tuple(h.complex.generators[h.leaders[g][int(i)]].id for i in np.flatnonzero(best))
    return SpectrumEntry(k, value, witness, ctx.threshold_index(value))


@dataclass(frozen=True)
class SpectrumTable:
    entries: tuple[SpectrumEntry, ...]

    def __getitem__(self, k: int) -> Fraction:
        if k >= len(self.entries) or self.entries[k].value is None:
            raise InsufficientDepthError(f"c_{k} is not available in this table")
        return self.entries[k].value

    def values(self) -> list[Fraction | None]:
        return [e.value for e in self.entries]

    def defined_through(self) -> int:
        """Largest ``k`` such that ``c_0 .. c_k`` are all defined (-1 if none)."""
        k = -1
        for e in self.entries:
            if e.value is None:
                break
            k = e.k
        return k

    def is_monotone(self) -> bool:
        vals = [v for v in self.values()[: self.defined_through() + 1]]
        return all(a <= b for a, b in zip(vals, vals[1:]))


def spectrum_table(source, k_max: int) -> SpectrumTable:
    """``c_0 .. c_{k_max}``; entries beyond the model's depth have ``value=None``."""
    ctx = _context(source)
    out = []
    for k in range(k_max + 1):
        try:
            out.append(c_k(ctx, k))
        except InsufficientDepthError:
            out.append(SpectrumEntry(k, None))
    return SpectrumTable(tuple(out))


def max_convolution(s1: SpectrumTable, s2: SpectrumTable, k: int) -> Fraction:
    """``max { c_i(s1) + c_j(s2) : i + j = k }``."""
    return max(s1[i] + s2[k - i] for i in range(k + 1))


@dataclass(frozen=True)
class SweepRow:
    eps: Fraction
    k: int
    c_k_cone: Fraction | None
    maxconv: Fraction | None
    diff: Fraction | None
    converged: bool

    @property
    def status(self) -> str:
        if self.c_k_cone is None or self.maxconv is None:
            return "insufficient"
        return "ok" if self.converged else "not converged"


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    eps_list: tuple[Fraction, ...]

    def limit(self, k: int) -> Fraction | None:
        """Common value of ``c_k`` at the two smallest ``eps``, if they agree exactly."""
        small = sorted(self.eps_list)[:2]
        vals = [r.c_k_cone for r in self.rows if r.k == k and r.eps in small]
        if len(vals) < 2 or vals[0] is None or vals[0] != vals[1]:
            return None
        return vals[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "k", "c_k_cone", "maxconv", "diff", "converged"])
        for r in self.rows:
            w.writerow([
                fraction_str(r.eps),
                r.k,
                "insufficient" if r.c_k_cone is None else fraction_str(r.c_k_cone),
                "insufficient" if r.maxconv is None else fraction_str(r.maxconv),
                "" if r.diff is None else fraction_str(r.diff),
                "true" if r.converged else "false",
            ])
        return buf.getvalue()


def conjecture_sweep(
    c1: GradedComplex,
    c2: GradedComplex,
    k_max: int,
    eps_list: Sequence,
    k_map=None,
) -> SweepResult:
    """Compare ``c_k`` of the connected-sum complex with ``max_{i+j=k} c_i + c_j``.

    A cell is converged when ``|c_k(cone) - maxconv| <= eps``.  Cells whose
    grading lies beyond the complete range of the truncated models are
    reported as insufficient rather than failing.
    """
    eps_list = tuple(Fraction(e) for e in eps_list)
    s1 = spectrum_table(c1, k_max)
    s2 = spectrum_table(c2, k_max)
    rows = []
    for eps in eps_list:
        cone = build_cone_complex(ConeData(c1, c2, eps, k_map))
        table = spectrum_table(cone, k_max)
        for k in range(k_max + 1):
            ck = table.entries[k].value
            try:
                mc = max_convolution(s1, s2, k)
            except InsufficientDepthError:
                mc = None
            if ck is None or mc is None:
                rows.append(SweepRow(eps, k, ck, mc, None, False))
                continue
            diff = ck - mc
            rows.append(SweepRow(eps, k, ck, mc, diff, abs(diff) <= eps))
    return SweepResult(tuple(rows), eps_list)
