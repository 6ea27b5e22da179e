"""Numerical frame machinery for immersions x: L^q -> S^n in R^{n+1}.

An :class:`ImmersionChart` is a coordinate patch of an immersed submanifold
of the unit sphere, optionally carrying an adapted orthonormal frame field
(rows e_1..e_q, nu_{q+1}..nu_n, all tangent to the sphere).  From it we
compute, by finite differences:

* connection coefficients Gamma^l_{jk} = <P(D_{e_j} frame_k), frame_l> with
  P the projection onto T S^n,
* shape operators A^k_{ij} = <nabla_{e_i} nu_k, e_j> (symmetric per normal),
* classification predicates: minimal, austere, and superminimal of either
  sign for surfaces in S^4.

Orientation convention: a frame (f_1, ..., f_n) of T_x S^n is positively
oriented when det[x, f_1, ..., f_n] > 0 in R^{n+1}.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ImmersionDegenerateError
from .numerics import (
    DEFAULT_FD_STEP,
    complete_orthonormal,
    directional_derivative,
    gram_schmidt,
    jacobian,
)

__all__ = [
    "ImmersionChart",
    "AdaptedFramePoint",
    "Classification",
    "adapted_frame",
    "connection_coeffs",
    "classify",
    "classify_matrices",
    "normal_frame_field",
    "with_normal_frame",
    "rotate_frame_field",
    "register_chart",
    "get_chart",
    "chart_names",
]


@dataclass(frozen=True)
class ImmersionChart:
    """A chart of an immersed L^q inside the unit sphere S^n."""

    name: str
    q: int
    n: int
    xmap: Callable[[np.ndarray], np.ndarray]
    sample_box: np.ndarray  # (q, 2) safe sampling box [lo, hi] per coordinate
    frame_field: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def contains(self, u, slack: float = 0.0) -> bool:
        u = np.asarray(u, dtype=float)
        lo = self.sample_box[:, 0] - slack
        hi = self.sample_box[:, 1] + slack
        return bool(np.all(u >= lo) and np.all(u <= hi))

    def with_frame_field(self, frame_field) -> "ImmersionChart":
        return dataclasses.replace(self, frame_field=frame_field)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo = self.sample_box[:, 0]
        hi = self.sample_box[:, 1]
        return rng.uniform(lo, hi, size=(count, self.q))


@dataclass(frozen=True)
class AdaptedFramePoint:
    """Frame data at a single chart point.

    ``frame`` rows are (e_1..e_q, nu_{q+1}..nu_n); ``gamma[j, k, l]`` is
    <nabla_{e_j} frame_k, frame_l> for tangent directions j; ``second_fund[k]``
    is the q x q matrix of A^{nu_k}; ``velocities`` rows w_j solve
    (d xmap) w_j = e_j, so scalar fields differentiate along e_j via
    w_j . grad.
    """

    u: np.ndarray
    x: np.ndarray
    q: int
    n: int
    frame: np.ndarray  # (n, n+1)
    gamma: np.ndarray  # (q, n, n)
    second_fund: np.ndarray  # (n-q, q, q)
    velocities: np.ndarray  # (q, q)
    fd_step: float

    @property
    def e(self) -> np.ndarray:
        return self.frame[: self.q]

    @property
    def nu(self) -> np.ndarray:
        return self.frame[self.q :]

    def scalar_derivatives(self, field, step: float | None = None) -> np.ndarray:
        """d(field)(e_j) for a scalar or small-array chart function."""
        step = step or self.fd_step
        return np.stack(
            [
                directional_derivative(field, self.u, w, step)
                for w in self.velocities
            ]
        )


def _auto_frame_field(chart: ImmersionChart, fd_step: float):
    """Tangent frame from Gram-Schmidt of the Jacobian, normals by
    deterministic completion, oriented."""

    def frame_at(u):
        u = np.asarray(u, dtype=float)
        x = chart.xmap(u)
        jac = jacobian(chart.xmap, u, fd_step)
        sing = np.linalg.svd(jac, compute_uv=False)
        if sing.min() < 1e-8:
            raise ImmersionDegenerateError(
                f"chart {chart.name!r} is degenerate at u={u.tolist()}"
            )
        e_rows = gram_schmidt(jac.T)
        normals = complete_orthonormal(
            [x, *e_rows], chart.n + 1, chart.n - chart.q
        )
        frame = np.vstack([e_rows, normals])
        if np.linalg.det(np.vstack([x[None, :], frame])) < 0:
            frame[-1] = -frame[-1]
        return frame

    return frame_at


def adapted_frame(
    chart: ImmersionChart, u, fd_step: float = DEFAULT_FD_STEP
) -> AdaptedFramePoint:
    """Evaluate the adapted frame and its first-order data at a chart point."""
    u = np.asarray(u, dtype=float)
    if not chart.contains(u, slack=1e-9):
        raise DomainError(f"point {u.tolist()} outside the safe domain of {chart.name!r}")
    x = chart.xmap(u)
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise DomainError(f"chart {chart.name!r} does not map into the unit sphere")
    jac = jacobian(chart.xmap, u, fd_step)
    sing = np.linalg.svd(jac, compute_uv=False)
    if sing.min() < 1e-8:
        raise ImmersionDegenerateError(
            f"chart {chart.name!r} is degenerate at u={u.tolist()}"
        )
    frame_fn = chart.frame_field or _auto_frame_field(chart, fd_step)
    frame = np.asarray(frame_fn(u), dtype=float)
    q, n = chart.q, chart.n
    if frame.shape != (n, n + 1):
        raise DomainError("frame field must return an (n, n+1) array")

    # chart velocities: (d xmap) w_j = e_j
    velocities = np.linalg.lstsq(jac, frame[:q].T, rcond=None)[0].T

    gamma = np.empty((q, n, n))
    for j in range(q):
        dframe = directional_derivative(frame_fn, u, velocities[j], fd_step)
        dframe = dframe - np.outer(dframe @ x, x)  # project onto T S^n
        gamma[j] = dframe @ frame.T

    second_fund = np.empty((n - q, q, q))
    for k in range(n - q):
        second_fund[k] = gamma[:, q + k, :q]

    return AdaptedFramePoint(
        u=u,
        x=x,
        q=q,
        n=n,
        frame=frame,
        gamma=gamma,
        second_fund=second_fund,
        velocities=velocities,
        fd_step=fd_step,
    )


def connection_coeffs(
    chart: ImmersionChart, u, fd_step: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Gamma^l_{jk} array of shape (q, n, n); thin wrapper over adapted_frame."""
    return adapted_frame(chart, u, fd_step).gamma


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    minimal: bool
    austere: bool
    superminimal_plus: bool
    superminimal_minus: bool
    residuals: dict

    @property
    def superminimal(self) -> str:
        if self.superminimal_plus and self.superminimal_minus:
            return "both"
        if self.superminimal_plus:
            return "+1"
        if self.superminimal_minus:
            return "-1"
        return "none"


_JT = np.array([[0.0, -1.0], [1.0, 0.0]])  # J_T e1 = e2, J_T e2 = -e1


def _austere_residual(matrices: np.ndarray, directions: np.ndarray) -> float:
    """Worst deviation of the shape-operator spectra from +- symmetry."""
    worst = 0.0
    for d in directions:
        a_nu = np.tensordot(d, matrices, axes=1)
        scale = 1.0 + np.linalg.norm(a_nu)
        eig = np.linalg.eigvalsh(a_nu)
        order = np.argsort(-np.abs(eig))
        eig = list(eig[order])
        local = 0.0
        while eig:
            lam = eig.pop(0)
            if not eig:
                local = max(local, abs(lam))
                break
            partner = int(np.argmin([abs(lam + mu) for mu in eig]))
            local = max(local, abs(lam + eig.pop(partner)))
        worst = max(worst, local / scale)
    return worst


def classify_matrices(
    matrices,
    tol: float = 1e-6,
    normal_samples: int = 16,
) -> Classification:
    """Classify from raw shape-operator matrices A^{q+1..n} (each q x q)."""
    matrices = np.asarray(matrices, dtype=float)
    m, q, _ = matrices.shape
    trace_res = float(np.max(np.abs(np.trace(matrices, axis1=1, axis2=2))))
    minimal = trace_res < tol

    if m == 1:
        directions = np.array([[1.0]])
    else:
        # unit normals: coordinate axes plus a deterministic sample of the sphere
        rng = np.random.default_rng(1234)
        extra = rng.standard_normal((normal_samples, m))
        extra /= np.linalg.norm(extra, axis=1, keepdims=True)
        directions = np.vstack([np.eye(m), extra])
    austere_res = _austere_residual(matrices, directions)
    austere = austere_res < tol

    residuals = {"trace": trace_res, "austere": austere_res}
    sm_plus = sm_minus = False
    if q == 2 and m == 2:
        a3, a4 = matrices
        res = {}
        for sign, key in ((+1.0, "superminimal_plus"), (-1.0, "superminimal_minus")):
            worst = 0.0
            for theta in np.linspace(0.0, np.pi, 9):
                a_nu = np.cos(theta) * a3 + np.sin(theta) * a4
                a_jn = np.cos(theta) * a4 - np.sin(theta) * a3  # A^{J_N nu}
                worst = max(worst, float(np.max(np.abs(a_jn - sign * _JT @ a_nu))))
            res[key] = worst
        residuals.update(res)
        sm_plus = res["superminimal_plus"] < tol
        sm_minus = res["superminimal_minus"] < tol

    return Classification(
        minimal=minimal,
        austere=austere,
        superminimal_plus=sm_plus,
        superminimal_minus=sm_minus,
        residuals=residuals,
    )


def classify(point: AdaptedFramePoint, tol: float = 1e-6) -> Classification:
    return classify_matrices(point.second_fund, tol=tol)


# -- normal frames ----------------------------------------------------------


def normal_frame_field(
    chart: ImmersionChart,
    u0,
    fd_step: float = DEFAULT_FD_STEP,
    steps_per_unit: int = 64,
):
    """Frame field along chart rays from u0 whose covariant derivatives have
    no tangential/normal rotation at u0.

    The frame at u is obtained by transporting the frame at u0 along the
    straight chart ray: project onto the tangent/normal spaces at each step
    and re-orthonormalise.  For the infinitesimal arcs used by the FD
    machinery this collapses to a single projection, which reproduces
    parallel transport to first order - all that the centre-point data needs.
    """
    u0 = np.asarray(u0, dtype=float)
    base = adapted_frame(chart, u0, fd_step)
    e0, nu0 = base.e.copy(), base.nu.copy()
    q = chart.q

    def tangent_basis(u):
        jac = jacobian(chart.xmap, u, fd_step)
        return gram_schmidt(jac.T)

    def transport_to(u):
        u = np.asarray(u, dtype=float)
        arc = float(np.linalg.norm(u - u0))
        nsteps = max(1, int(np.ceil(steps_per_unit * arc)))
        e_cur, nu_cur = e0, nu0
        for s in range(1, nsteps + 1):
            us = u0 + (u - u0) * (s / nsteps)
            x = chart.xmap(us)
            tb = tangent_basis(us)
            proj_t = tb.T @ tb
            e_cur = gram_schmidt(e_cur @ proj_t)
            nu_proj = nu_cur - (nu_cur @ x)[:, None] * x[None, :]
            nu_proj = nu_proj - (nu_proj @ tb.T) @ tb
            nu_cur = gram_schmidt(nu_proj)
        return np.vstack([e_cur, nu_cur])

    return transport_to


def with_normal_frame(
    chart: ImmersionChart, u0, fd_step: float = DEFAULT_FD_STEP
) -> ImmersionChart:
    """The same chart equipped with a frame field that is normal at u0."""
    return chart.with_frame_field(normal_frame_field(chart, u0, fd_step))


def rotate_frame_field(chart: ImmersionChart, alpha: float, beta: float) -> ImmersionChart:
    """Rotate (e_1, e_2) by alpha and (nu_3, nu_4) by beta (surfaces in S^4)."""
    if chart.frame_field is None or chart.q != 2 or chart.n != 4:
        raise DomainError("frame rotation needs a framed surface chart in S^4")
    ca, sa, cb, sb = np.cos(alpha), np.sin(alpha), np.cos(beta), np.sin(beta)
    rot = np.array(
        [
            [ca, sa, 0.0, 0.0],
            [-sa, ca, 0.0, 0.0],
            [0.0, 0.0, cb, sb],
            [0.0, 0.0, -sb, cb],
        ]
    )
    inner = chart.frame_field

    def rotated(u):
        return rot @ inner(u)

    return dataclasses.replace(
        chart, name=f"{chart.name}@rot({alpha:.3f},{beta:.3f})", frame_field=rotated
    )


# -- registry ---------------------------------------------------------------

_REGISTRY: dict[str, ImmersionChart] = {}


def register_chart(chart: ImmersionChart) -> ImmersionChart:
    _REGISTRY[chart.name] = chart
    return chart


def get_chart(name: str) -> ImmersionChart:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise DomainError(
            f"unknown chart {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def chart_names() -> list[str]:
    return sorted(_REGISTRY)
