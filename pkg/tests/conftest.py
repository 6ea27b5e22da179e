"""Shared oracles for the test suite.

Everything here recomputes expected values through an independent route
(permutation expansions, ambient finite differences, octonion arithmetic)
so the library paths are checked against something they do not share code
with.
"""

from __future__ import annotations

import itertools

import numpy as np

from twistcal.exterior import Multivector
from twistcal.numerics import directional_derivative
from twistcal.submanifold import adapted_frame


def rng_for(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_spd(rng, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim))
    return m @ m.T + dim * np.eye(dim)


# -- permutation / determinant oracles ---------------------------------------


def parity_sign(perm) -> int:
    """Sign of a permutation given as a list of distinct comparables."""
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def det_by_permutations(mat: np.ndarray) -> float:
    """Leibniz-formula determinant, independent of numpy.linalg."""
    n = mat.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        term = parity_sign(perm)
        for i, p in enumerate(perm):
            term *= mat[i, p]
        total += term
    return float(total)


def brute_force_form_inner(a: Multivector, b: Multivector) -> float:
    """Gram-determinant inner product expanded from first principles."""
    space = a.space
    ginv = space.metric_inv
    dim = space.dim
    total = 0.0
    for ma in range(1 << dim):
        ca = a.coeffs[ma]
        if ca == 0:
            continue
        idx_a = [i for i in range(dim) if ma >> i & 1]
        for mb in range(1 << dim):
            cb = b.coeffs[mb]
            if cb == 0:
                continue
            idx_b = [i for i in range(dim) if mb >> i & 1]
            if len(idx_a) != len(idx_b):
                continue
            if not idx_a:
                total += ca * cb
                continue
            gram = np.array([[ginv[p, q] for q in idx_b] for p in idx_a])
            total += ca * cb * det_by_permutations(gram)
    return total


def wedge_sign_oracle(idx_a, idx_b) -> int:
    """Parity of sorting the concatenation of two disjoint index tuples."""
    merged = list(idx_a) + list(idx_b)
    if len(set(merged)) != len(merged):
        return 0
    return parity_sign(merged)


def comass_estimate(form: Multivector, k: int, rng, restarts: int = 50) -> float:
    """Max |form| over orthonormal k-frames: random restarts plus a local
    hill-climb (perturb, re-orthonormalise, keep improvements)."""
    dim = form.space.dim

    def value(q):
        return abs(form.evaluate(*(q[:, j] for j in range(k))))

    best = 0.0
    for _ in range(restarts):
        q, _ = np.linalg.qr(rng.standard_normal((dim, k)))
        cur = value(q)
        eps = 0.5
        while eps > 1e-7:
            improved = False
            for _ in range(20):
                q2, _ = np.linalg.qr(q + eps * rng.standard_normal((dim, k)))
                v2 = value(q2)
                if v2 > cur:
                    q, cur = q2, v2
                    improved = True
            if not improved:
                eps *= 0.35
        best = max(best, cur)
    return best


# -- ambient finite-difference oracles ----------------------------------------


def _wedge_mat(a, b):
    return np.outer(a, b) - np.outer(b, a)


def asd_bivectors(frame: np.ndarray) -> np.ndarray:
    e1, e2, n3, n4 = frame
    return np.array(
        [
            _wedge_mat(e1, e2) - _wedge_mat(n3, n4),
            _wedge_mat(e1, n3) + _wedge_mat(e2, n4),
            _wedge_mat(e1, n4) - _wedge_mat(e2, n3),
        ]
    )


def nabla_f_fd_oracle(chart, u, fd_step: float = 1e-5) -> np.ndarray:
    """Coefficients of the covariant derivative of the anti-self-dual frame,
    computed on ambient bivector fields: Euclidean derivative followed by
    projection of both slots onto the sphere tangent space."""
    point = adapted_frame(chart, u, fd_step)
    x = point.x
    proj = np.eye(chart.n + 1) - np.outer(x, x)
    frame_fn = chart.frame_field

    out = np.zeros((2, 3, 3))
    fs = asd_bivectors(point.frame)
    for j in range(2):
        dbiv = directional_derivative(
            lambda uu: asd_bivectors(frame_fn(uu)), u, point.velocities[j], fd_step
        )
        for k in range(3):
            covariant = proj @ dbiv[k] @ proj
            for m in range(3):
                # det-convention pairing of bivectors: <A, B> = tr(A^T B) / 2,
                # and |f^m|^2 = 2
                out[j, k, m] = np.tensordot(covariant, fs[m]) / 4.0
    return out


def g2_vertical_fd_oracle(chart, family, u, t1: float, fd_step: float = 1e-5) -> np.ndarray:
    """Vertical parts of the total-space tangents E_i for the rank-one twist,
    via covariant differentiation of the fibre bivector field t1 f^1 + sigma."""
    point = adapted_frame(chart, u, fd_step)
    x = point.x
    proj = np.eye(chart.n + 1) - np.outer(x, x)
    frame_fn = chart.frame_field
    fs = asd_bivectors(point.frame)

    def fiber(uu):
        f1, f2, f3 = asd_bivectors(frame_fn(uu))
        g = family.value(uu)
        return t1 * f1 + g.real * f2 + g.imag * f3

    out = np.zeros((2, 3))
    for j in range(2):
        dbiv = directional_derivative(fiber, u, point.velocities[j], fd_step)
        covariant = proj @ dbiv @ proj
        for m in range(3):
            out[j, m] = np.tensordot(covariant, fs[m]) / 4.0
    return out
