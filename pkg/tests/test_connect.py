from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echkit import models
from echkit.connect import (
    H_SUFFIX,
    ConeData,
    EquivalenceError,
    block_sidecar,
    build_cone_complex,
    chain_equivalence,
    class_decomposition_check,
    cone_blocks,
    connected_sum_homology,
    default_eps,
    filtered_cone,
    random_k_map,
    safe_status,
    theorem_comparison,
)
from echkit.ech_core import LDegeneracyError
from echkit.f2 import SparseF2Matrix, block_matrix
from echkit.homalg import (
    ClassLabel,
    GradedComplex,
    MissingUMapError,
    ValidationError,
    homology,
    tensor,
    validate,
)

seeds = st.integers(0, 10**6)


def direct_sum(a: GradedComplex, b: GradedComplex) -> GradedComplex:
    za, zb = SparseF2Matrix.zeros(len(a), len(b)), SparseF2Matrix.zeros(len(b), len(a))
    return GradedComplex(
        a.generators + b.generators,
        block_matrix([[a.differential, za], [zb, b.differential]]),
        block_matrix([[a.umap, za], [zb, b.umap]]),
    )


def test_sphere_sum_sphere():
    s = models.s3(8)
    d = ConeData(s, s, Fraction(1, 1000))
    cone = build_cone_complex(d)
    assert validate(cone) == []
    h = homology(cone)
    for g in range(cone.complete_through):
        assert h.dim(g) == (1 if g % 2 == 0 else 0)


def test_cone_ids_gradings_actions():
    s = models.s3(4)
    d = ConeData(s, s, Fraction(1, 1000))
    cone = build_cone_complex(d)
    n = len(d.tensor_complex)
    for o, hgen in zip(cone.generators[:n], cone.generators[n:]):
        assert hgen.id == o.id + H_SUFFIX
        assert hgen.grading == o.grading + 1
        assert hgen.action == o.action + Fraction(1, 1000)


def test_unit_factor_gives_h_times_u():
    c1 = models.random_model(9, 8, 0.4)
    d = ConeData(c1, models.unit_complex(), Fraction(1, 10**6))
    blocks = cone_blocks(d)
    assert blocks.d_oo == c1.differential
    assert blocks.d_hh == c1.differential
    assert blocks.d_oh.is_zero()
    assert blocks.d_ho == c1.umap  # the unit's U is zero, so phi = U1 (x) 1


@given(seeds, seeds, seeds)
@settings(max_examples=30, deadline=None)
def test_block_laws_random(s1, s2, sk):
    c1, c2 = models.random_model(s1, 6, 0.4), models.random_model(s2, 6, 0.4)
    k = random_k_map(tensor(c1, c2), sk)
    d = ConeData(c1, c2, None, k)
    assert cone_blocks(d).violations() == []
    report = chain_equivalence(d)
    assert report.ok


def test_k_zero_reduces_to_phi():
    c1, c2 = models.random_model(1, 6, 0.4), models.random_model(2, 6, 0.4)
    d = ConeData(c1, c2)
    assert cone_blocks(d).d_ho == d.phi()
    assert chain_equivalence(d).F.matrix == SparseF2Matrix.identity(2 * len(d.tensor_complex))


def test_bad_k_rejected():
    c1, c2 = models.random_model(1, 6, 0.4), models.random_model(2, 6, 0.4)
    n = len(tensor(c1, c2))
    with pytest.raises(ValidationError):
        ConeData(c1, c2, None, SparseF2Matrix.identity(n))  # degree 0
    with pytest.raises(ValueError):
        ConeData(c1, c2, None, SparseF2Matrix.identity(n + 1))


def test_eps_bounds_and_missing_u():
    s = models.s3(4)
    with pytest.raises(ValueError):
        ConeData(s, s, 1)
    with pytest.raises(ValueError):
        ConeData(s, s, 0)
    assert default_eps(s, s) == Fraction(1, 10**6)
    with pytest.raises(MissingUMapError):
        ConeData(s.with_umap(None), s)


def test_equivalence_error_reports_failures():
    c1, c2 = models.random_model(1, 6, 0.4), models.random_model(2, 6, 0.4)
    d = ConeData(c1, c2)
    report = chain_equivalence(d)
    report.identities["d_oh h = 0"] = [(0, 0)]
    with pytest.raises(EquivalenceError) as info:
        raise EquivalenceError(report)
    assert "d_oh h = 0" in str(info.value)


def test_filtered_cone_rules():
    e1 = models.ellipsoid_with_generators(1, models.SQRT2, 10).complex
    e2 = models.ellipsoid_with_generators(1, models.SQRT3, 10).complex
    eps = Fraction(1, 10**6)
    d = ConeData(e1, e2, eps)
    assert filtered_cone(d, Fraction(1, 10**7)).ids == ["empty|empty"]
    assert filtered_cone(d, 1000).equal_data(build_cone_complex(d))
    L = Fraction(21, 10)
    cone_l = filtered_cone(d, L)
    acts = [g.action for g in d.tensor_complex.generators]
    assert len(cone_l) == sum(a < L for a in acts) + sum(a < L - eps for a in acts)
    assert validate(cone_l) == []
    with pytest.raises(LDegeneracyError):
        filtered_cone(d, 2)  # g1^2 on the first factor has action exactly 2
    with pytest.raises(LDegeneracyError):
        filtered_cone(d, 1 + eps)  # the h-copy of g1 sits exactly at L


def test_theorem_comparison_s3_s1xs2():
    d = ConeData(models.s3(8), models.s1_x_s2(3).complex)
    rows = theorem_comparison(d)
    assert all(r.status != "FAIL" for r in rows)
    passed = [r for r in rows if r.status == "PASS"]
    assert passed and all(r.cone_dim == 1 for r in passed)
    assert any(r.status == "EXCLUDED" for r in rows)


def test_connected_sum_with_zero_u():
    c = models.random_model(3, 6, 0.4).with_umap(SparseF2Matrix.zeros(6, 6))
    h = connected_sum_homology(c, c).dims
    t = homology(tensor(c, c)).dims
    for g in set(h) | set(t):
        assert h.get(g, 0) == t.get(g, 0) + t.get(g - 1, 0)


def test_safe_status():
    assert safe_status(None, 100)
    assert safe_status(5, 4) and not safe_status(5, 5)


def test_class_decomposition():
    c1, c2 = models.random_model(5, 6, 0.4), models.random_model(6, 6, 0.4)
    assert class_decomposition_check(ConeData(c1, c2), ClassLabel(), ClassLabel()).ok
    a = models.random_model(7, 5, 0.4, label=ClassLabel([0]), prefix="a")
    b = models.random_model(8, 5, 0.4, label=ClassLabel([1]), prefix="b")
    mixed = direct_sum(a, b)
    other = models.random_model(9, 4, 0.4, label=ClassLabel([0]))
    d = ConeData(mixed, other)
    for gamma in (ClassLabel([0]), ClassLabel([1])):
        rep = class_decomposition_check(d, gamma, ClassLabel([0]))
        assert rep.ok and rep.additive


def test_sidecar_names_blocks():
    c1, c2 = models.random_model(1, 5, 0.4), models.random_model(2, 5, 0.4)
    d = ConeData(c1, c2, None, random_k_map(tensor(c1, c2), 3))
    side = block_sidecar(d)
    assert set(side["blocks"]) == {"d_oo", "d_oh", "d_ho", "d_hh"}
    assert side["blocks"]["d_oh"] == []
    assert all(src.endswith(H_SUFFIX) for src, _ in side["blocks"]["d_hh"])
