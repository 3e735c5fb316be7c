from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echkit import models
from echkit.ech_core import LDegeneracyError
from echkit.f2 import f2_rank
from echkit.homalg import homology, validate

from oracles import lattice_values

B = models.SQRT2


def test_six_generator_ellipsoid():
    m = models.ellipsoid(1, B, Fraction(299, 100))
    assert len(m) == 6
    assert m.complex.gradings() == [0, 2, 4, 6, 8, 10]
    assert [r[:2] for r in m.lattice_rows()] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_ellipsoid_at_tie_raises():
    with pytest.raises(LDegeneracyError):
        models.ellipsoid(1, B, 3)


def test_small_L_gives_empty_set_only():
    m = models.ellipsoid(1, B, Fraction(1, 2))
    assert m.complex.ids == ["empty"]
    assert homology(m.complex).dims == {0: 1}


def test_degenerate_ellipsoids():
    with pytest.raises(models.EllipsoidDegeneracyError):
        models.ellipsoid(1, 1, 5)
    with pytest.raises(models.EllipsoidDegeneracyError):
        models.ellipsoid(1, 2, Fraction(51, 10))
    with pytest.raises(models.EllipsoidDegeneracyError):
        models.ellipsoid(1, Fraction(3, 2), Fraction(61, 10))  # 3 * 1 = 2 * 3/2 below L


def test_u_map_shifts_rank():
    c = models.ellipsoid_with_generators(1, B, 8).complex
    assert sorted(c.pairs("umap")) == sorted((c.ids[r], c.ids[r - 1]) for r in range(1, 8))
    assert c.differential.is_zero()


@given(st.integers(1, 60))
@settings(max_examples=25, deadline=None)
def test_ellipsoid_with_generators(n):
    m = models.ellipsoid_with_generators(1, models.SQRT3, n)
    assert len(m) == n
    assert [g.action for g in m.complex.generators] == lattice_values(1, models.SQRT3, n)
    assert m.complex.complete_through == 2 * n - 2


def test_s1xs2_model():
    one = models.s1_x_s2(1).complex
    assert one.gradings() == [0, 1] and one.umap.is_zero()
    three = models.s1_x_s2(3).complex
    h = homology(three)
    assert h.dims == {g: 1 for g in range(6)}
    assert f2_rank(h.induced_u[2]) == 1
    assert validate(three) == []


def test_unit_complex():
    u = models.unit_complex()
    assert u.ids == ["empty"] and u.umap.is_zero()


def test_random_model_density_zero():
    c = models.random_model(4, 10, 0.0)
    assert c.differential.is_zero()


def test_random_model_deterministic():
    a, b = models.random_model(17, 12, 0.4), models.random_model(17, 12, 0.4)
    assert a.equal_data(b)
    assert not a.equal_data(models.random_model(18, 12, 0.4))


def test_random_models_validate():
    for seed in range(1000):
        c = models.random_model(seed, 10, 0.4)
        assert validate(c) == [], seed


def test_random_models_are_not_trivial():
    nontrivial = sum(not models.random_model(s, 10, 0.5).differential.is_zero() for s in range(50))
    with_u = sum(not models.random_model(s, 10, 0.5).umap.is_zero() for s in range(50))
    assert nontrivial > 40 and with_u > 40
