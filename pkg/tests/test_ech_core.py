import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echkit import models
from echkit.ech_core import (
    ELLIPTIC,
    NEGATIVE_HYPERBOLIC,
    POSITIVE_HYPERBOLIC,
    AmbiguityWarning,
    FilteredTower,
    LDegeneracyError,
    Orbit,
    OrbitSet,
    action,
    enumerate_orbit_sets,
    inclusion,
    separating_thresholds,
    stabilization_profile,
    truncate,
)
from echkit.f2 import SparseF2Matrix, f2_rank
from echkit.homalg import ClassLabel, Generator, GradedComplex, ValidationError, homology, induced_map

from oracles import lattice_values

B = models.SQRT2


def test_orbit_validation():
    with pytest.raises(ValueError):
        Orbit("e", ELLIPTIC, 2, 1)
    with pytest.raises(ValueError):
        Orbit("h", POSITIVE_HYPERBOLIC, 1, 1)
    with pytest.raises(ValueError):
        Orbit("h", NEGATIVE_HYPERBOLIC, 2, 1)
    with pytest.raises(ValueError):
        Orbit("h", POSITIVE_HYPERBOLIC, 0, 0)
    assert Orbit("h", NEGATIVE_HYPERBOLIC, -1, 1).winding == -1


def test_orbit_set_admissibility_and_action():
    e = Orbit("e", ELLIPTIC, Fraction(1, 3), 1)
    h = Orbit("h", POSITIVE_HYPERBOLIC, 0, 2)
    assert action(OrbitSet()) == 0
    assert action(OrbitSet(((e, 2),))) == 2
    with pytest.raises(ValueError):
        OrbitSet(((h, 2),))
    with pytest.raises(ValueError):
        OrbitSet(((e, 1), (e, 1)))
    assert OrbitSet(((h, 1), (e, 1))) == OrbitSet(((e, 1), (h, 1)))


def test_ellipsoid_pair_action():
    g1 = Orbit("g1", ELLIPTIC, 1 / B, 1)
    g2 = Orbit("g2", ELLIPTIC, B, B)
    assert action(OrbitSet(((g1, 2), (g2, 1)))) == Fraction(341421, 100000)


def test_enumerate_small_cases():
    assert [s.id for s in enumerate_orbit_sets([Orbit("x", ELLIPTIC, Fraction(1, 2), 2)], 1)] == ["empty"]
    h1 = Orbit("h1", POSITIVE_HYPERBOLIC, 0, 1)
    h2 = Orbit("h2", POSITIVE_HYPERBOLIC, 2, 2)
    assert [s.id for s in enumerate_orbit_sets([h1, h2], 4)] == ["empty", "h1", "h2", "h1 h2"]


def test_enumerate_ellipsoid_at_three():
    g1 = Orbit("g1", ELLIPTIC, 1 / B, 1)
    g2 = Orbit("g2", ELLIPTIC, B, B)
    with pytest.raises(LDegeneracyError):
        enumerate_orbit_sets([g1, g2], 3)  # g1^3 has action exactly 3
    sets = enumerate_orbit_sets([g1, g2], Fraction(299, 100))
    assert [s.id for s in sets] == ["empty", "g1", "g2", "g1^2", "g1 g2", "g2^2"]
    assert [action(s) for s in sets] == lattice_values(1, B, 6)


@given(st.integers(1, 40))
@settings(max_examples=20, deadline=None)
def test_enumeration_matches_lattice(n):
    m = models.ellipsoid_with_generators(1, B, n)
    assert [action(s) for s in m.orbit_sets] == lattice_values(1, B, n)


def test_enumerate_class_filter_and_ambiguity():
    a = Orbit("a", ELLIPTIC, Fraction(1, 3), 1, ClassLabel([1]))
    b = Orbit("b", ELLIPTIC, Fraction(1, 5), Fraction(7, 4), ClassLabel([0]))
    sets = enumerate_orbit_sets([a, b], Fraction(29, 10), gamma=ClassLabel([1]))
    assert {s.id for s in sets} == {"a", "a b"}
    c = Orbit("c", ELLIPTIC, Fraction(1, 7), 2)
    with pytest.warns(AmbiguityWarning):
        enumerate_orbit_sets([a, c], Fraction(5, 2))


def test_truncate_examples():
    c = models.ellipsoid_with_generators(1, B, 10).complex
    assert truncate(c, 100) is c
    small = truncate(c, Fraction(1, 2))
    assert small.ids == ["empty"]
    six = truncate(c, Fraction(299, 100))
    assert six.ids == ["empty", "g1", "g2", "g1^2", "g1 g2", "g2^2"]
    assert six.complete_through == 11
    with pytest.raises(LDegeneracyError):
        truncate(c, 2)


def test_truncate_rejects_non_subcomplex():
    gens = (Generator("a", 1, 1), Generator("b", 0, 2))
    bad = GradedComplex.from_pairs(gens, [("a", "b")])
    with pytest.raises(ValidationError):
        truncate(bad, Fraction(3, 2))


def test_inclusion_injective_on_ellipsoid():
    c = models.ellipsoid_with_generators(1, B, 12).complex
    small, big = truncate(c, Fraction(199, 100)), truncate(c, Fraction(299, 100))
    maps = induced_map(inclusion(small, big))
    hs = homology(small)
    for g, m in maps.items():
        assert f2_rank(m) == hs.dim(g)
    same = inclusion(big, big)
    assert same.matrix == SparseF2Matrix.identity(len(big))


def test_separating_thresholds():
    c = models.ellipsoid_with_generators(1, B, 4).complex
    th = separating_thresholds(c)
    acts = sorted(g.action for g in c.generators)
    assert len(th) == len(acts)
    for t, a in zip(th, acts):
        assert t > a
    assert all(t not in acts for t in th)


def test_tower_levels_and_stabilization_on_ellipsoid():
    n = 15
    c = models.ellipsoid_with_generators(1, B, n).complex
    tower = FilteredTower.auto(c)
    caps = lattice_values(1, B, n)
    for k in range(n - 1):
        s = stabilization_profile(tower, 2 * k)
        assert tower.thresholds[s.index] > caps[k]
        assert s.index == 0 or tower.thresholds[s.index - 1] < caps[k]
        assert s.dims[-1] == 1


def test_stabilization_zero_differential():
    gens = tuple(Generator(f"x{i}", i % 2, Fraction(i + 1)) for i in range(6))
    c = GradedComplex(gens, SparseF2Matrix.zeros(6, 6))
    tower = FilteredTower(c, (Fraction(3, 2), Fraction(7, 2), Fraction(11, 2), Fraction(13, 2)))
    s = stabilization_profile(tower, 0)
    # grading 0 generators have actions 1, 3, 5; the last enters below 11/2
    assert s.index == 2
    assert s.dims == (1, 2, 3, 3)


def test_stabilization_acyclic_pair():
    c = GradedComplex.from_pairs([Generator("a", 1, 2), Generator("b", 0, 1)], [("a", "b")])
    tower = FilteredTower(c, (Fraction(3, 2), Fraction(5, 2), Fraction(7, 2)))
    s = stabilization_profile(tower, 0)
    assert s.dims == (1, 0, 0)
    assert s.index == 1


def test_stabilization_none_when_last_map_changes():
    gens = tuple(Generator(f"x{i}", 0, Fraction(i + 1)) for i in range(3))
    c = GradedComplex(gens, SparseF2Matrix.zeros(3, 3))
    tower = FilteredTower(c, (Fraction(3, 2), Fraction(5, 2)))
    tower2 = FilteredTower(c, (Fraction(3, 2), Fraction(5, 2), Fraction(7, 2)))
    s = stabilization_profile(tower2, 0)
    assert s.dims == (1, 2, 3)
    assert s.index is None and not s.stabilized
    assert np.array_equal(tower.induced(0)[0], np.array([[1], [0]], dtype=np.uint8))


def test_tower_rejects_threshold_at_action():
    c = models.ellipsoid_with_generators(1, B, 5).complex
    with pytest.raises(LDegeneracyError):
        FilteredTower(c, (Fraction(1), Fraction(3)))


def test_no_warnings_on_generic_ellipsoid():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        models.ellipsoid_with_generators(1, B, 50)
