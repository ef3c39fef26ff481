"""
Tests for semisimple germs: tensor products, comparison and germ files
"""

import numpy as np
import pytest

from an_saito import AnChart, numeric_germ
from germs import (
    CollidingSpectrumError,
    GermError,
    GermFileError,
    SemisimpleGerm,
    compare_germs,
    germ_from_an,
    germ_from_json,
    germ_from_projective,
    identity_germ,
    read_germ,
    tensor,
    write_germ,
)


@pytest.fixture
def a2_germ():
    return germ_from_an(2, -3, 0)


@pytest.fixture
def a2_germ_wide():
    return germ_from_an(2, -12, 0)


def test_germ_shape_validation():
    with pytest.raises(GermError):
        SemisimpleGerm(u=[0, 1], eta=[1], v=np.zeros((2, 2)))
    with pytest.raises(GermError):
        SemisimpleGerm(u=[0, 1], eta=[1, 0], v=np.zeros((2, 2)))


def test_diagonal_of_v_is_cleared():
    germ = SemisimpleGerm(u=[0, 1], eta=[1, 1], v=[[5, 1], [2, 7]])
    assert germ.v[0, 0] == 0 and germ.v[1, 1] == 0


def test_tensor_with_identity_is_unchanged(a2_germ):
    product = tensor(a2_germ, identity_germ())
    np.testing.assert_allclose(product.u, a2_germ.u)
    np.testing.assert_allclose(product.eta, a2_germ.eta)
    np.testing.assert_allclose(product.v, a2_germ.v)


def test_tensor_formulas(a2_germ, a2_germ_wide):
    product = tensor(a2_germ, a2_germ_wide)
    assert product.size == 4
    # label (i, j) sits at 2 * i + j
    assert product.u[3] == pytest.approx(a2_germ.u[1] + a2_germ_wide.u[1])
    assert product.eta[1] == pytest.approx(a2_germ.eta[0] * a2_germ_wide.eta[1])
    assert product.v[0, 2] == pytest.approx(a2_germ.v[0, 1])
    assert product.v[0, 1] == pytest.approx(a2_germ_wide.v[0, 1])
    assert product.v[0, 3] == 0


def test_colliding_tensor(a2_germ):
    with pytest.raises(CollidingSpectrumError):
        tensor(a2_germ, a2_germ)


def test_compare_finds_relabeling(a2_germ, a2_germ_wide):
    product = tensor(a2_germ, a2_germ_wide)
    shuffled = product.relabel([2, 0, 3, 1])
    comparison = compare_germs(product, shuffled)
    assert comparison.isomorphic
    assert comparison.max_deviation < 1e-12
    np.testing.assert_allclose(shuffled.relabel(comparison.permutation).u, product.u)


def test_compare_rejects_different_germs(a2_germ, a2_germ_wide):
    comparison = compare_germs(a2_germ, a2_germ_wide)
    assert not comparison.isomorphic
    assert comparison.permutation is None
    assert not compare_germs(a2_germ, identity_germ()).isomorphic


def test_relabel_needs_permutation(a2_germ):
    with pytest.raises(GermError):
        a2_germ.relabel([0, 0])


def test_closed_form_germ_structure():
    germ = germ_from_an(4, -5, 1)
    assert germ.reciprocity_defect() < 1e-12
    assert germ.circulant_defect() < 1e-12
    assert germ.is_tame()


def test_numeric_germ_reciprocity():
    germ = numeric_germ(AnChart(3, (0.3, -1.1 + 0.4j, 0.7)))
    assert germ.reciprocity_defect() < 1e-8


def test_projective_germ_is_circulant():
    germ = germ_from_projective(3, 0.5, 0.2)
    assert germ.size == 3
    assert germ.circulant_defect() < 1e-12


def test_germ_file_round_trip(tmp_path, a2_germ, a2_germ_wide):
    product = tensor(a2_germ, a2_germ_wide)
    path = tmp_path / "germs" / "product.json"
    write_germ(product, path)
    loaded = read_germ(path)
    np.testing.assert_array_equal(loaded.u, product.u)
    np.testing.assert_array_equal(loaded.v, product.v)
    assert not path.with_suffix('.json.tmp').exists()


def test_germ_file_errors(tmp_path):
    with pytest.raises(GermFileError):
        read_germ(tmp_path / "missing.json")
    with pytest.raises(GermFileError):
        germ_from_json('{"size": 2, "u": [[0, 0]], "eta": [[1, 0]], "v": []}')
    with pytest.raises(GermFileError):
        germ_from_json('not json')
