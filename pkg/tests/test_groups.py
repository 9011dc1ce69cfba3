import math

import numpy as np
import pytest
import scipy.linalg

from doubleflow.groups import (
    AlgebraElement,
    MembershipError,
    SB2Element,
    SL2Element,
    SU2Element,
    exp_group,
    iwasawa_gu,
    iwasawa_ug,
    random_element,
)


def test_su2_constructor_normalizes_and_rejects():
    g = SU2Element(1.0 + 1e-9, 0.0)
    assert g.membership_defect() < 1e-15
    with pytest.raises(MembershipError):
        SU2Element(1.1, 0.0)
    with pytest.raises(MembershipError):
        SU2Element(np.nan, 0.0)


def test_su2_matrix_form_and_inverse():
    for k in range(50):
        g = random_element("su2", k)
        m = g.as_matrix()
        np.testing.assert_allclose(m @ np.conj(m.T), np.eye(2), atol=1e-14)
        assert abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - 1.0) < 1e-14
        gi = g.inverse()
        np.testing.assert_allclose((g @ gi).as_matrix(), np.eye(2), atol=1e-14)


def test_su2_product_matches_matrices():
    for k in range(50):
        rng = np.random.default_rng(k)
        g1, g2 = random_element("su2", rng), random_element("su2", rng)
        np.testing.assert_allclose(
            (g1 @ g2).as_matrix(), g1.as_matrix() @ g2.as_matrix(), atol=1e-14)


def test_su2_from_matrix_rejects_non_su2():
    with pytest.raises(MembershipError):
        SU2Element.from_matrix(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_sb2_element_basics():
    u = SB2Element(2.0, 0.5 - 0.25j)
    m = u.as_matrix()
    assert m[1, 0] == 0 and m[0, 0].real * m[1, 1].real == pytest.approx(1.0)
    np.testing.assert_allclose((u @ u.inverse()).as_matrix(), np.eye(2), atol=1e-15)
    with pytest.raises(MembershipError):
        SB2Element(-1.0, 0.0)
    with pytest.raises(MembershipError):
        SB2Element(0.0, 0.0)


def test_sb2_product_matches_matrices():
    for k in range(50):
        rng = np.random.default_rng(k)
        u1, u2 = random_element("sb2", rng), random_element("sb2", rng)
        np.testing.assert_allclose(
            (u1 @ u2).as_matrix(), u1.as_matrix() @ u2.as_matrix(), atol=1e-13)


def test_sb2_from_matrix_checks_shape():
    with pytest.raises(MembershipError):
        SB2Element.from_matrix(np.array([[1.0, 0.0], [0.5, 1.0]]))
    u = SB2Element.from_matrix(np.array([[2.0, 1.0 + 1j], [0.0, 0.5]]))
    assert u.r == 2.0 and u.gamma == 1.0 + 1j


def test_sl2_det_rescale_and_reject():
    a = SL2Element(1.0 + 5e-9, 0.0, 0.0, 1.0)
    assert a.membership_defect() < 1e-14
    with pytest.raises(MembershipError):
        SL2Element(2.0, 0.0, 0.0, 1.0)
    b = SL2Element(2.0, 0.0, 1j, 0.5)
    np.testing.assert_allclose((b @ b.inverse()).as_matrix(), np.eye(2), atol=1e-14)


def test_iwasawa_gu_recomposes():
    for k in range(200):
        a = random_element("sl2", k)
        g, u = iwasawa_gu(a)
        np.testing.assert_allclose(
            g.as_matrix() @ u.as_matrix(), a.as_matrix(), atol=1e-12)
        assert g.membership_defect() < 1e-12
        assert u.r > 0


def test_iwasawa_ug_recomposes():
    for k in range(200):
        a = random_element("sl2", 10_000 + k)
        u, g = iwasawa_ug(a)
        np.testing.assert_allclose(
            u.as_matrix() @ g.as_matrix(), a.as_matrix(), atol=1e-12)
        assert g.membership_defect() < 1e-12


def test_iwasawa_uniqueness():
    # refactorizing a known product returns the original factors
    for k in range(100):
        rng = np.random.default_rng(k)
        g, u = random_element("su2", rng), random_element("sb2", rng)
        a = SL2Element.from_matrix(g.as_matrix() @ u.as_matrix())
        g2, u2 = iwasawa_gu(a)
        assert abs(g2.alpha - g.alpha) < 1e-12 and abs(g2.nu - g.nu) < 1e-12
        assert abs(u2.r - u.r) < 1e-12 and abs(u2.gamma - u.gamma) < 1e-12


def test_iwasawa_on_triangular_and_unitary_inputs():
    u = SB2Element(3.0, 1.0 - 2.0j)
    a = SL2Element.from_matrix(u.as_matrix())
    g2, u2 = iwasawa_gu(a)
    assert abs(g2.alpha - 1.0) < 1e-14 and abs(g2.nu) < 1e-14
    g = random_element("su2", 5)
    a = SL2Element.from_matrix(g.as_matrix())
    g3, u3 = iwasawa_gu(a)
    assert abs(u3.r - 1.0) < 1e-14 and abs(u3.gamma) < 1e-14


def test_algebra_element_validation():
    AlgebraElement("su2", np.array([[0.5j, 1 + 1j], [-1 + 1j, -0.5j]]))
    with pytest.raises(MembershipError):
        AlgebraElement("su2", np.array([[0.5j, 1.0], [1.0, -0.5j]]))
    AlgebraElement("sb2", np.array([[0.3, 1 - 2j], [0.0, -0.3]]))
    with pytest.raises(MembershipError):
        AlgebraElement("sb2", np.array([[0.3j, 0.0], [0.0, -0.3j]]))
    AlgebraElement("sl2c", np.array([[1 + 1j, 2.0], [3.0, -1 - 1j]]))
    with pytest.raises(MembershipError):
        AlgebraElement("sl2c", np.array([[1.0, 0.0], [0.0, 1.0]]))
    v = AlgebraElement("so3", [1.0, 2.0, 3.0])
    assert v.value.shape == (3,)
    with pytest.raises(MembershipError):
        AlgebraElement("so3", [1.0, 2.0])


def test_exp_group_su2_matches_expm():
    for k in range(50):
        rng = np.random.default_rng(k)
        w = rng.standard_normal(3)
        m = np.array([[1j * w[0], w[1] + 1j * w[2]], [-w[1] + 1j * w[2], -1j * w[0]]])
        g = exp_group(AlgebraElement("su2", m))
        np.testing.assert_allclose(g.as_matrix(), scipy.linalg.expm(m), atol=1e-12)


def test_exp_group_sb2_matches_expm():
    for k in range(50):
        rng = np.random.default_rng(k)
        x = float(rng.standard_normal())
        y = complex(rng.standard_normal(), rng.standard_normal())
        m = np.array([[x, y], [0.0, -x]])
        u = exp_group(AlgebraElement("sb2", m))
        np.testing.assert_allclose(u.as_matrix(), scipy.linalg.expm(m), atol=1e-12)
        assert u.r == pytest.approx(math.exp(x))


def test_exp_group_so3_is_rodrigues():
    p = np.array([0.2, -0.4, 0.6])
    r = exp_group(AlgebraElement("so3", p))
    np.testing.assert_allclose(r, scipy.linalg.expm(np.array([
        [0.0, -p[2], p[1]], [p[2], 0.0, -p[0]], [-p[1], p[0], 0.0]])), atol=1e-13)


def test_random_element_deterministic_per_seed():
    for kind in ("su2", "sb2", "sl2"):
        a = random_element(kind, 123)
        b = random_element(kind, 123)
        np.testing.assert_array_equal(a.as_matrix(), b.as_matrix())
    with pytest.raises(MembershipError):
        random_element("nonsense", 0)
