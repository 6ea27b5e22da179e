import numpy as np
import pytest

from twistcal.errors import DomainError
from twistcal.octonion import (
    E,
    I,
    IE,
    J,
    JE,
    K,
    KE,
    ONE,
    Octonion,
    associative_model_form,
    associator,
    cayley_model_form,
    cross2,
    cross3,
    cross3_via_form,
    gamma,
    oct_mul,
    pinor_split,
    standard_pinor_context,
)

from conftest import comass_estimate, det_by_permutations, rng_for


def random_oct(rng):
    return Octonion(rng.standard_normal(8))


# -- algebra basics ------------------------------------------------------------


def test_unit_and_quaternion_table():
    x = Octonion(rng_for(0).standard_normal(8))
    assert (ONE * x).allclose(x)
    assert (x * ONE).allclose(x)
    assert (I * J).allclose(K)
    assert (J * K).allclose(I)
    assert (K * I).allclose(J)
    assert (I * I).allclose(-1.0 * ONE)
    assert (E * E).allclose(-1.0 * ONE)


def test_composition_norm_many_pairs():
    rng = rng_for(1)
    xs = rng.standard_normal((10_000, 8))
    ys = rng.standard_normal((10_000, 8))
    prod = oct_mul(xs, ys)
    lhs = np.linalg.norm(prod, axis=1)
    rhs = np.linalg.norm(xs, axis=1) * np.linalg.norm(ys, axis=1)
    assert np.max(np.abs(lhs - rhs) / rhs) < 1e-12


def test_alternativity():
    rng = rng_for(2)
    for _ in range(100):
        x, y = random_oct(rng), random_oct(rng)
        assert associator(x, x, y).norm() < 1e-12 * (1 + x.norm() ** 2 * y.norm())
        assert associator(x, y, y).norm() < 1e-12 * (1 + y.norm() ** 2 * x.norm())


def test_associator_cases():
    assert associator(I, J, E).allclose(2.0 * KE)
    rng = rng_for(3)
    for _ in range(20):
        x = Octonion.from_quaternion(rng.standard_normal(4))
        y = Octonion.from_quaternion(rng.standard_normal(4))
        z = Octonion.from_quaternion(rng.standard_normal(4))
        assert associator(x, y, z).norm() < 1e-12


def test_orthonormal_he_pairs_anticommute_in_action():
    # u1 (conj(u2) v) = -u2 (conj(u1) v) for orthonormal u1, u2 in He
    rng = rng_for(4)
    for _ in range(50):
        q, _ = np.linalg.qr(rng.standard_normal((4, 2)))
        u1 = Octonion(np.concatenate([np.zeros(4), q[:, 0]]))
        u2 = Octonion(np.concatenate([np.zeros(4), q[:, 1]]))
        v = random_oct(rng)
        lhs = u1 * (u2.conj() * v)
        rhs = -1.0 * (u2 * (u1.conj() * v))
        assert lhs.allclose(rhs, tol=1e-12)


# -- cross products --------------------------------------------------------------


def test_cross2_cases():
    rng = rng_for(5)
    assert cross2(I, I).norm() == 0.0
    assert cross2(I, J).allclose(K)
    for _ in range(50):
        u = random_oct(rng).imag()
        v = random_oct(rng).imag()
        assert abs(cross2(u, v).inner(u)) < 1e-12 * (1 + u.norm() ** 2 * v.norm())
        assert abs(cross2(u, v).inner(v)) < 1e-12 * (1 + v.norm() ** 2 * u.norm())


def test_cross2_rejects_non_imaginary():
    with pytest.raises(DomainError):
        cross2(ONE, I)


def test_cross3_alternating():
    rng = rng_for(6)
    for _ in range(30):
        u, v = random_oct(rng), random_oct(rng)
        scale = 1 + u.norm() ** 2 * v.norm() + v.norm() ** 2 * u.norm()
        assert cross3(u, u, v).norm() < 1e-12 * scale
        assert cross3(u, v, v).norm() < 1e-12 * scale
        assert cross3(u, v, u).norm() < 1e-12 * scale


def test_cross3_agrees_with_model_form_contraction():
    assert cross3(ONE, I, J).allclose(cross3_via_form(ONE, I, J), tol=1e-12)
    rng = rng_for(7)
    for _ in range(20):
        u, v, w = (random_oct(rng) for _ in range(3))
        assert cross3(u, v, w).allclose(cross3_via_form(u, v, w), tol=1e-9)


def test_cross3_norm_equals_wedge_volume():
    rng = rng_for(8)
    for _ in range(30):
        q, _ = np.linalg.qr(rng.standard_normal((8, 3)))
        scale = rng.uniform(0.5, 2.0, size=3)
        u, v, w = (Octonion(q[:, j] * scale[j]) for j in range(3))
        gram = np.array([[a.inner(b) for b in (u, v, w)] for a in (u, v, w)])
        vol = np.sqrt(det_by_permutations(gram))
        assert cross3(u, v, w).norm() == pytest.approx(vol, rel=1e-10)


# -- pinor representation ---------------------------------------------------------


def test_clifford_relation():
    ctx = standard_pinor_context()
    rng = rng_for(9)
    for _ in range(100):
        ca, cb = rng.standard_normal((2, 4))
        ga = ctx.gamma_covector(ca)
        gb = ctx.gamma_covector(cb)
        anti = ga @ gb + gb @ ga
        assert np.max(np.abs(anti + 2.0 * float(ca @ cb) * np.eye(8))) < 1e-12


def test_gamma_squares_to_minus_norm():
    rng = rng_for(10)
    for _ in range(50):
        c = rng.standard_normal(4)
        s = random_oct(rng)
        out = gamma(c, gamma(c, s))
        assert out.allclose(-float(c @ c) * s, tol=1e-12)


def test_volume_operator_eigenspaces():
    ctx = standard_pinor_context()
    vol = ctx.volume_op
    for idx in range(4):  # H block
        s = Octonion.basis(idx)
        assert Octonion(vol @ s.coeffs).allclose(-1.0 * s)
    for idx in range(4, 8):  # He block
        s = Octonion.basis(idx)
        assert Octonion(vol @ s.coeffs).allclose(s)


def test_pinor_split_identifications():
    rng = rng_for(11)
    q = Octonion.from_quaternion(rng.standard_normal(4))
    plus, minus = pinor_split(q)
    assert plus.norm() < 1e-14
    assert minus.allclose(q)
    he = Octonion(np.concatenate([np.zeros(4), rng.standard_normal(4)]))
    plus, minus = pinor_split(he)
    assert minus.norm() < 1e-14
    assert plus.allclose(he)
    s = random_oct(rng)
    plus, minus = pinor_split(s)
    assert (plus + minus).allclose(s, tol=1e-14)


def _gamma_f_matrices():
    from twistcal.spin7 import gamma_f_matrix

    return [gamma_f_matrix(k) for k in (1, 2, 3)]


def test_gamma_f_identities_on_negative_spinors():
    # squares equal -16, distinct factors anticommute, pair products are
    # 4x the third element (all as operators on the quaternion slot)
    gf = _gamma_f_matrices()
    rng = rng_for(12)
    spinors = rng.standard_normal((10_000, 4))
    s = np.zeros((10_000, 8))
    s[:, :4] = spinors
    for k in range(3):
        out = s @ (gf[k] @ gf[k]).T
        assert np.max(np.abs(out + 16.0 * s)) < 1e-12 * (1 + np.max(np.abs(s)))
    combos = [(0, 1, +4.0, 2), (0, 2, -4.0, 1), (1, 2, +4.0, 0)]
    for a, b, coeff, c in combos:
        lhs = s @ (gf[a] @ gf[b]).T
        rhs = coeff * (s @ gf[c].T)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + np.max(np.abs(rhs)))
        anti = s @ (gf[a] @ gf[b] + gf[b] @ gf[a]).T
        assert np.max(np.abs(anti)) < 1e-12


def test_gamma_operator_square_and_agreement():
    ctx = standard_pinor_context()
    g = ctx.gammas
    g12 = g[0] @ g[1]
    g34 = g[2] @ g[3]
    p_minus = ctx.projectors()[1]
    # equal on the negative eigenspace and squaring to -1 there
    assert np.max(np.abs((g12 - g34) @ p_minus)) < 1e-14
    assert np.max(np.abs((g12 @ g12 + np.eye(8)) @ p_minus)) < 1e-14
    gf1 = _gamma_f_matrices()[0]
    assert np.max(np.abs((0.25 * gf1 - g12) @ p_minus)) < 1e-14


def test_gamma_operator_frame_independent():
    ctx = standard_pinor_context()
    rng = rng_for(13)
    base = ctx.embed
    p_minus = ctx.projectors()[1]
    g12 = ctx.gammas[0] @ ctx.gammas[1]
    from twistcal.octonion import left_mult_matrix

    for _ in range(20):
        al, be = rng.uniform(0, 2 * np.pi, size=2)
        r1 = np.cos(al) * base[0] + np.sin(al) * base[1]
        r2 = -np.sin(al) * base[0] + np.cos(al) * base[1]
        r3 = np.cos(be) * base[2] + np.sin(be) * base[3]
        r4 = -np.sin(be) * base[2] + np.cos(be) * base[3]
        m12 = left_mult_matrix(r1) @ left_mult_matrix(r2)
        m34 = left_mult_matrix(r3) @ left_mult_matrix(r4)
        assert np.max(np.abs((m12 - g12) @ p_minus)) < 1e-13
        assert np.max(np.abs((m34 - g12) @ p_minus)) < 1e-13


def test_model_associative_form_comass_one():
    phi0 = associative_model_form()
    rng = rng_for(14)
    best = comass_estimate(phi0, 3, rng, restarts=8)
    assert best <= 1.0 + 1e-9
    # the quaternion triple attains the bound
    attained = phi0.evaluate(np.eye(7)[0], np.eye(7)[1], np.eye(7)[2])
    assert abs(attained) == pytest.approx(1.0)
    assert best == pytest.approx(1.0, abs=1e-6)


def test_model_cayley_form_alternating_and_normalised():
    phi = cayley_model_form()
    assert phi.grades() == (4,)
    vals = [
        phi.evaluate(*(np.eye(8)[i] for i in quad))
        for quad in [(0, 1, 2, 3), (4, 5, 6, 7)]
    ]
    assert vals[0] == pytest.approx(1.0)
    assert abs(vals[1]) == pytest.approx(1.0)
    rng = rng_for(15)
    best = comass_estimate(phi, 4, rng, restarts=6)
    assert best <= 1.0 + 1e-9
    assert best == pytest.approx(1.0, abs=1e-6)
