"""Quaternion and octonion arithmetic, model cross products, and the pinor
representation of 4-dimensional covectors on spinors.

Basis order is (1, i, j, k, e, ie, je, ke): the quaternions occupy the first
four slots and their e-multiples the last four.  Products use the
Cayley-Dickson doubling

    (a, b)(c, d) = (ac - conj(d) b,  da + b conj(c)),    a, b, c, d in H.

Pinor conventions
-----------------
Covectors of an (abstract) orthonormal 4-dim coframe embed into He.  The
default embedding is

    (e^1, e^2, nu^3, nu^4)  ->  (e, ie, je, -ke),

chosen so that the composed volume operator gamma(e^1)gamma(e^2)gamma(nu^3)
gamma(nu^4) is -1 on H and +1 on He, i.e. the negative pinor eigenspace is
the quaternion slot.  Left multiplication by each embedded covector then
satisfies the Clifford relation and swaps the two eigenspaces.

gamma of a 2-form is normalised as gamma(e^i ^ e^j) = 2 gamma(e^i)gamma(e^j)
for i != j (orthonormal covectors multiply as e^i e^j = 1/2 e^i ^ e^j in the
Clifford algebra).  All the constants downstream (squares equal to -16, the
4-fold product relations between the self-dual basis 2-forms) depend on this
factor of two.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .exterior import InnerSpace, Multivector, contract

__all__ = [
    "Octonion",
    "quat_mul",
    "quat_conj",
    "oct_mul",
    "associator",
    "cross2",
    "cross3",
    "PinorContext",
    "standard_pinor_context",
    "gamma",
    "pinor_split",
    "associative_model_form",
    "cayley_model_form",
]

BASIS_NAMES = ("1", "i", "j", "k", "e", "ie", "je", "ke")


def quat_mul(p, q):
    """Hamilton product, broadcasting over leading axes of (..., 4) arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def quat_conj(p):
    p = np.asarray(p, dtype=float)
    return p * np.array([1.0, -1.0, -1.0, -1.0])


def oct_mul(x, y):
    """Octonion product on (..., 8) coefficient arrays (Cayley-Dickson)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = x[..., :4], x[..., 4:]
    c, d = y[..., :4], y[..., 4:]
    first = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    second = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([first, second], axis=-1)


def oct_conj(x):
    x = np.asarray(x, dtype=float)
    return x * np.array([1.0, -1, -1, -1, -1, -1, -1, -1])


class Octonion:
    """Immutable 8-component octonion."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (8,):
            raise DimensionMismatchError("octonion needs 8 coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *args):
        raise AttributeError("Octonion is immutable")

    @staticmethod
    def basis(index: int) -> "Octonion":
        c = np.zeros(8)
        c[index] = 1.0
        return Octonion(c)

    @staticmethod
    def from_quaternion(q) -> "Octonion":
        return Octonion(np.concatenate([np.asarray(q, dtype=float), np.zeros(4)]))

    @property
    def re(self) -> float:
        return float(self.coeffs[0])

    def imag(self) -> "Octonion":
        c = self.coeffs.copy()
        c[0] = 0.0
        return Octonion(c)

    def conj(self) -> "Octonion":
        return Octonion(oct_conj(self.coeffs))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "Octonion") -> float:
        return float(self.coeffs @ other.coeffs)

    def is_imaginary(self, tol: float = 1e-12) -> bool:
        return abs(self.re) <= tol * (1.0 + self.norm())

    def __add__(self, other):
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self):
        return Octonion(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(oct_mul(self.coeffs, other.coeffs))
        return Octonion(self.coeffs * float(other))

    def __rmul__(self, scalar):
        return Octonion(self.coeffs * float(scalar))

    def allclose(self, other, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, atol=tol))

    def __repr__(self):
        terms = [
            f"{c:+g}*{n}" for c, n in zip(self.coeffs, BASIS_NAMES) if abs(c) > 0
        ]
        return "Octonion(" + (" ".join(terms) if terms else "0") + ")"


ONE = Octonion.basis(0)
I, J, K = (Octonion.basis(n) for n in (1, 2, 3))
E, IE, JE, KE = (Octonion.basis(n) for n in (4, 5, 6, 7))


def associator(x: Octonion, y: Octonion, z: Octonion) -> Octonion:
    """[x, y, z] = (xy)z - x(yz)."""
    return (x * y) * z - x * (y * z)


def cross2(u: Octonion, v: Octonion) -> Octonion:
    """Two-fold cross product Im(uv) of imaginary octonions."""
    if not (u.is_imaginary() and v.is_imaginary()):
        raise DomainError("cross2 expects imaginary octonions")
    return (u * v).imag()


def cross3(u: Octonion, v: Octonion, w: Octonion) -> Octonion:
    """Three-fold product X(u, v, w) = 1/2 (w (conj(v) u) - u (conj(v) w)).

    The sign is fixed so that the associated 4-form built from
    <X(u, v, w), y> has value +1 on the oriented quaternion 4-plane
    (1, i, j, k).
    """
    return 0.5 * (w * (v.conj() * u) - u * (v.conj() * w))


def left_mult_matrix(x) -> np.ndarray:
    """Matrix of s -> x s on coefficient columns."""
    x = np.asarray(x, dtype=float)
    return oct_mul(x[None, :], np.eye(8)).T


class PinorContext:
    """Embedding of a 4-dim orthonormal coframe into He plus its volume operator.

    ``embed`` holds the four image octonions as rows of a (4, 8) array.  The
    rows must be orthonormal and lie in He so that the Clifford relation
    holds for the induced left multiplications.
    """

    def __init__(self, embed):
        embed = np.asarray(embed, dtype=float)
        if embed.shape != (4, 8):
            raise DimensionMismatchError("embedding needs four octonion rows")
        if np.max(np.abs(embed[:, :4])) > 1e-12:
            raise DomainError("embedded covectors must lie in He")
        if not np.allclose(embed @ embed.T, np.eye(4), atol=1e-12):
            raise DomainError("embedded coframe must be orthonormal")
        self.embed = embed
        self.gammas = [left_mult_matrix(row) for row in embed]
        self.volume_op = (
            self.gammas[0] @ self.gammas[1] @ self.gammas[2] @ self.gammas[3]
        )

    def gamma_covector(self, components) -> np.ndarray:
        """gamma of the covector with the given coframe components."""
        components = np.asarray(components, dtype=float)
        if components.shape != (4,):
            raise DimensionMismatchError("covector needs 4 components")
        return left_mult_matrix(components @ self.embed)

    def gamma_two_form(self, form: Multivector) -> np.ndarray:
        """gamma of a 2-form over the coframe space: e^i^e^j -> 2 g_i g_j."""
        if form.space.dim != 4:
            raise DimensionMismatchError("2-form must live over the 4-dim coframe")
        out = np.zeros((8, 8))
        for a in range(4):
            for b in range(a + 1, 4):
                c = form.coefficient((a + 1, b + 1))
                if c:
                    out += 2.0 * c * (self.gammas[a] @ self.gammas[b])
        return out

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(P_plus, P_minus) onto the +-1 eigenspaces of the volume operator."""
        eye = np.eye(8)
        return 0.5 * (eye + self.volume_op), 0.5 * (eye - self.volume_op)


@lru_cache(maxsize=1)
def standard_pinor_context() -> PinorContext:
    embed = np.zeros((4, 8))
    embed[0, 4] = 1.0  # e
    embed[1, 5] = 1.0  # ie
    embed[2, 6] = 1.0  # je
    embed[3, 7] = -1.0  # -ke, so the volume operator is -1 on H
    return PinorContext(embed)


def gamma(alpha, s: Octonion, ctx: PinorContext | None = None) -> Octonion:
    """Apply the pinor representation of a covector to a spinor.

    ``alpha`` is either coframe components (length 4) or an Octonion already
    lying in He.
    """
    ctx = ctx or standard_pinor_context()
    if isinstance(alpha, Octonion):
        if np.max(np.abs(alpha.coeffs[:4])) > 1e-12:
            raise DomainError("covector octonion must lie in He")
        return alpha * s
    return Octonion(ctx.gamma_covector(alpha) @ s.coeffs)


def pinor_split(s: Octonion, ctx: PinorContext | None = None) -> tuple[Octonion, Octonion]:
    """Split s = s_plus + s_minus along the volume-operator eigenspaces."""
    ctx = ctx or standard_pinor_context()
    p_plus, p_minus = ctx.projectors()
    return Octonion(p_plus @ s.coeffs), Octonion(p_minus @ s.coeffs)


@lru_cache(maxsize=1)
def associative_model_form() -> Multivector:
    """The 3-form phi0(u, v, w) = <u x v, w> on Im O (7-dim, orthonormal)."""
    space = InnerSpace(7)
    coeffs = np.zeros(1 << 7)
    im_basis = [Octonion.basis(n) for n in range(1, 8)]
    for a in range(7):
        for b in range(a + 1, 7):
            uv = cross2(im_basis[a], im_basis[b])
            for c in range(b + 1, 7):
                val = uv.inner(im_basis[c])
                if abs(val) > 1e-14:
                    mask = (1 << a) | (1 << b) | (1 << c)
                    coeffs[mask] = val
    return Multivector(space, coeffs)


@lru_cache(maxsize=1)
def cayley_model_form() -> Multivector:
    """The 4-form Phi0(u, v, w, y) = <X(u, v, w), y> on O (8-dim, orthonormal)."""
    space = InnerSpace(8)
    coeffs = np.zeros(1 << 8)
    basis = [Octonion.basis(n) for n in range(8)]
    for a in range(8):
        for b in range(a + 1, 8):
            for c in range(b + 1, 8):
                x = cross3(basis[a], basis[b], basis[c])
                for d in range(c + 1, 8):
                    val = x.inner(basis[d])
                    if abs(val) > 1e-14:
                        mask = (1 << a) | (1 << b) | (1 << c) | (1 << d)
                        coeffs[mask] = val
    return Multivector(space, coeffs)


def cross3_via_form(u: Octonion, v: Octonion, w: Octonion) -> Octonion:
    """Oracle: X(u, v, w) recovered as w ⌟ v ⌟ u ⌟ Phi0 (indices raised trivially)."""
    phi = cayley_model_form()
    one_form = contract(contract(contract(phi, u.coeffs), v.coeffs), w.coeffs)
    comps = np.array([one_form.coeffs[1 << i] for i in range(8)])
    return Octonion(comps)
