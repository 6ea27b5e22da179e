"""Worked geometries: the equatorial 2-sphere and the Veronese surface in S^4,
holomorphic section families over them, and the cross-chart consistency checks.

Registered chart names: ``equatorial``, ``veronese``, ``veronese-hat`` and
``veronese-antipodal`` (the composition with the antipodal map of S^4, whose
natural adapted frame is the Veronese one with the two normals swapped).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_FD_STEP, directional_derivative
from .submanifold import (
    ImmersionChart,
    adapted_frame,
    register_chart,
)

__all__ = [
    "equatorial_chart",
    "veronese_chart",
    "compose_antipodal",
    "SectionFamily",
    "EtaFamily",
    "make_section_family",
    "make_eta_family",
    "pde_residual",
    "boundedness_scan",
    "frame_change_check",
    "golden_table",
    "golden_table_names",
    "golden_residuals",
]


# -- equatorial sphere -------------------------------------------------------


def equatorial_chart(q: int = 2, n: int = 4) -> ImmersionChart:
    """Stereographic chart of the equatorial S^q inside S^n.

    For (q, n) = (2, 4) the classical adapted frame is attached; other
    dimensions fall back to the automatic frame construction.
    """
    if not 1 <= q < n:
        raise DomainError("need 1 <= q < n")

    def xmap(u):
        u = np.asarray(u, dtype=float)
        r2 = float(u @ u)
        out = np.zeros(n + 1)
        out[0] = (r2 - 1.0) / (r2 + 1.0)
        out[1 : q + 1] = 2.0 * u / (r2 + 1.0)
        return out

    frame_field = None
    if (q, n) == (2, 4):

        def frame_field(u):
            u1, u2 = float(u[0]), float(u[1])
            r2 = u1 * u1 + u2 * u2
            d = r2 + 1.0
            e1 = np.array([2 * u1, 1 - u1 * u1 + u2 * u2, -2 * u1 * u2, 0.0, 0.0]) / d
            e2 = np.array([2 * u2, -2 * u1 * u2, 1 + u1 * u1 - u2 * u2, 0.0, 0.0]) / d
            nu3 = np.array([0.0, 0.0, 0.0, 1.0, 0.0])
            nu4 = np.array([0.0, 0.0, 0.0, 0.0, -1.0])
            return np.vstack([e1, e2, nu3, nu4])

    box = np.array([[-2.5, 2.5]] * q)
    return ImmersionChart(
        name="equatorial" if (q, n) == (2, 4) else f"equatorial-{q}-{n}",
        q=q,
        n=n,
        xmap=xmap,
        sample_box=box,
        frame_field=frame_field,
    )


# -- Veronese immersion ------------------------------------------------------


def _veronese_point(p):
    """The degree-two immersion of the radius-sqrt(3) sphere into S^4."""
    x, y, z = p
    return np.array(
        [
            x * y,
            x * z,
            y * z,
            (x * x - y * y) / 2.0,
            (x * x + y * y - 2.0 * z * z) / (2.0 * math.sqrt(3.0)),
        ]
    ) / math.sqrt(3.0)


def _y_vectors(theta):
    s2, c2 = math.sin(2 * theta), math.cos(2 * theta)
    s, c = math.sin(theta), math.cos(theta)
    y1 = np.array([s2, 0.0, 0.0, c2, 0.0])
    y2 = np.array([0.0, c, s, 0.0, 0.0])
    y3 = np.array([c2, 0.0, 0.0, -s2, 0.0])
    y4 = np.array([0.0, -s, c, 0.0, 0.0])
    return y1, y2, y3, y4


def _y_hat_vectors(theta):
    s, c = math.sin(theta), math.cos(theta)
    s2, c2 = math.sin(2 * theta), math.cos(2 * theta)
    sq3 = math.sqrt(3.0)
    y1 = np.array([s, 0.0, c, 0.0, 0.0])
    y2 = np.array([0.0, sq3 * s * c, 0.0, sq3 / 2.0 * s * s, 0.5 * (1 - 3 * c * c)])
    y3 = np.array([c, 0.0, -s, 0.0, 0.0])
    y4 = np.array([0.0, c2, 0.0, 0.5 * s2, sq3 / 2.0 * s2])
    return y1, y2, y3, y4


_E5 = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
_W_HAT = np.array([0.0, 0.0, 0.0, -math.sqrt(3.0) / 2.0, 0.5])


def veronese_chart(which: str = "psi") -> ImmersionChart:
    """Spherical-coordinate charts of the Veronese surface.

    ``psi`` uses (phi, theta) with the z-axis pole; ``psi_hat`` uses the
    rotated coordinates (phi_hat, theta_hat) with the y-axis pole.  Both carry
    the classical positively oriented adapted frames.
    """
    sq3 = math.sqrt(3.0)
    if which == "psi":

        def xmap(u):
            phi, theta = float(u[0]), float(u[1])
            p = sq3 * np.array(
                [math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta), math.cos(phi)]
            )
            return _veronese_point(p)

        def frame_field(u):
            phi, theta = float(u[0]), float(u[1])
            y1, y2, y3, y4 = _y_vectors(theta)
            s, c = math.sin(phi), math.cos(phi)
            s2, c2 = math.sin(2 * phi), math.cos(2 * phi)
            e1 = 0.5 * s2 * y1 + c2 * y2 + (sq3 / 2.0) * s2 * _E5
            e2 = s * y3 + c * y4
            nu3 = -c * y3 + s * y4
            nu4 = 0.5 * ((1 + c * c) * y1 - s2 * y2 - sq3 * s * s * _E5)
            return np.vstack([e1, e2, nu3, nu4])

        box = np.array([[0.35, math.pi - 0.35], [0.35, 2 * math.pi - 0.35]])
        name = "veronese"
    elif which == "psi_hat":

        def xmap(u):
            phi, theta = float(u[0]), float(u[1])
            p = sq3 * np.array(
                [math.sin(phi) * math.sin(theta), math.cos(phi), math.sin(phi) * math.cos(theta)]
            )
            return _veronese_point(p)

        def frame_field(u):
            phi, theta = float(u[0]), float(u[1])
            y1, y2, y3, y4 = _y_hat_vectors(theta)
            s, c = math.sin(phi), math.cos(phi)
            s2, c2 = math.sin(2 * phi), math.cos(2 * phi)
            e1 = c2 * y1 + (s2 / sq3) * y2 - (s2 / sq3) * _W_HAT
            e2 = c * y3 + s * y4
            nu3 = s * y3 - c * y4
            nu4 = -s * c * y1 + ((1 + c * c) / sq3) * y2 + ((1 + s * s) / sq3) * _W_HAT
            return np.vstack([e1, e2, nu3, nu4])

        box = np.array([[0.35, math.pi - 0.35], [-math.pi / 2 + 0.35, 3 * math.pi / 2 - 0.35]])
        name = "veronese-hat"
    else:
        raise DomainError(f"unknown veronese chart {which!r}")

    return ImmersionChart(name=name, q=2, n=4, xmap=xmap, sample_box=box, frame_field=frame_field)


def compose_antipodal(chart: ImmersionChart) -> ImmersionChart:
    """Compose a framed surface chart with the antipodal map of S^4.

    The image point flips sign; the tangent vectors still span the image of
    the differential, and swapping the two normals restores positive
    orientation for the new immersion.
    """
    if chart.frame_field is None or chart.q != 2 or chart.n != 4:
        raise DomainError("antipodal composition needs a framed surface chart in S^4")
    inner_map, inner_frame = chart.xmap, chart.frame_field

    def xmap(u):
        return -inner_map(u)

    def frame_field(u):
        f = inner_frame(u)
        return np.vstack([f[0], f[1], f[3], f[2]])

    return dataclasses.replace(
        chart, name=f"{chart.name}-antipodal", xmap=xmap, frame_field=frame_field
    )


# -- section families --------------------------------------------------------


@dataclass(frozen=True)
class SectionFamily:
    """A complex coefficient function G = a + ib over a chart.

    The pair (a, b) feeds the rank-two twists: G multiplies the complex frame
    of the twisted bundle, so |section|^2 = 2 |G|^2 in the determinant
    convention.
    """

    kind: str
    params: dict = field(default_factory=dict)
    evaluator: Callable[[np.ndarray], complex] = None  # set by factory

    def value(self, u) -> complex:
        return self.evaluator(np.asarray(u, dtype=float))

    def ab(self, u) -> tuple[float, float]:
        g = self.value(u)
        return g.real, g.imag

    def describe(self) -> str:
        inside = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inside})" if inside else self.kind


def make_section_family(kind: str, **params) -> SectionFamily:
    """Factory for the section families used by the verification suites.

    kinds:
      zero                         G = 0
      const(re, im)                G = re + i*im (constant coefficients)
      equatorial-hol(coeffs)       G = H(z)(z conj(z) + 1), H polynomial with
                                   complex coefficients, z = u1 + i u2
      veronese-strip(coeffs)       G = sin(phi) * sum_k c_k exp(i k w) with
                                   w = theta - i log tan(phi/2)
      sinphi(C, D)                 shorthand: veronese-strip with c_0 = C + iD
    """
    if kind == "zero":
        ev = lambda u: 0.0 + 0.0j
    elif kind == "const":
        c = complex(params.get("re", 0.0), params.get("im", 0.0))
        ev = lambda u: c
    elif kind == "equatorial-hol":
        coeffs = [complex(c) for c in params["coeffs"]]

        def ev(u):
            z = complex(u[0], u[1])
            h = sum(c * z**k for k, c in enumerate(coeffs))
            return h * (z * z.conjugate() + 1.0)

    elif kind in ("veronese-strip", "sinphi"):
        if kind == "sinphi":
            terms = {0: complex(params.get("C", 0.0), params.get("D", 0.0))}
            params = {"C": params.get("C", 0.0), "D": params.get("D", 0.0)}
        else:
            terms = {int(k): complex(c) for k, c in params["coeffs"].items()}

        def ev(u):
            phi, theta = float(u[0]), float(u[1])
            t = math.tan(phi / 2.0)
            total = 0.0 + 0.0j
            for k, c in terms.items():
                total += c * np.exp(1j * k * theta) * t**k
            return math.sin(phi) * total

    else:
        raise DomainError(f"unknown section kind {kind!r}")
    return SectionFamily(kind=kind, params=dict(params), evaluator=ev)


@dataclass(frozen=True)
class EtaFamily:
    """A real coefficient function gamma(u) for rank-one twists."""

    kind: str
    params: dict = field(default_factory=dict)
    evaluator: Callable[[np.ndarray], float] = None

    def value(self, u) -> float:
        return float(self.evaluator(np.asarray(u, dtype=float)))

    def describe(self) -> str:
        inside = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inside})" if inside else self.kind


def make_eta_family(kind: str, **params) -> EtaFamily:
    """kinds: const(c); coord(axis) with gamma = u_axis."""
    if kind == "const":
        c = float(params.get("c", 0.0))
        ev = lambda u: c
    elif kind == "coord":
        axis = int(params.get("axis", 1)) - 1
        ev = lambda u: float(u[axis])
    else:
        raise DomainError(f"unknown eta kind {kind!r}")
    return EtaFamily(kind=kind, params=dict(params), evaluator=ev)


# -- holomorphicity PDE ------------------------------------------------------


def holomorphicity_coeffs(gamma: np.ndarray) -> complex:
    """p + iq with p = Gamma^1_{22} - Gamma^3_{24}, q = Gamma^3_{14} - Gamma^1_{12}.

    A rank-two twist coefficient G is holomorphic when
    dG(e_1) + i dG(e_2) = (p + iq) G.
    """
    p = gamma[1, 1, 0] - gamma[1, 3, 2]
    q = gamma[0, 3, 2] - gamma[0, 1, 0]
    return complex(p, q)


def pde_residual(
    family: SectionFamily,
    chart: ImmersionChart,
    u,
    fd_step: float = DEFAULT_FD_STEP,
) -> complex:
    """dG(e_1) + i dG(e_2) - (p + iq) G at a chart point."""
    point = adapted_frame(chart, u, fd_step)
    g = family.value(point.u)
    g1, g2 = (
        complex(directional_derivative(family.value, point.u, w, fd_step))
        for w in point.velocities
    )
    return (g1 + 1j * g2) - holomorphicity_coeffs(point.gamma) * g


# -- boundedness -------------------------------------------------------------


@dataclass(frozen=True)
class BoundednessReport:
    sup_abs_g: float
    sup_section_norm_sq: float  # sup of 2 |G|^2
    growth_flag: bool
    log_slope: float


def boundedness_scan(
    family: SectionFamily,
    chart: ImmersionChart,
    *,
    interior_samples: int = 400,
    seed: int = 0,
) -> BoundednessReport:
    """Estimate sup 2|G|^2 including annuli near the chart boundary.

    For the stereographic chart the boundary is |u| -> infinity; growth is
    flagged when log sup|G| keeps increasing along a geometric radius ladder.
    For the spherical charts the boundary is phi -> 0, pi.
    """
    rng = np.random.default_rng(seed)
    pts = chart.sample(rng, interior_samples)
    values = [abs(family.value(p)) for p in pts]

    ladder_sups = []
    if chart.name.startswith("equatorial"):
        radii = np.geomspace(2.0, 40.0, 12)
        for r in radii:
            angles = np.linspace(0.0, 2 * np.pi, 24, endpoint=False)
            ring = [abs(family.value(np.array([r * np.cos(a), r * np.sin(a)]))) for a in angles]
            ladder_sups.append(max(ring))
        ladder_x = radii
    else:
        margins = np.geomspace(0.3, 0.005, 10)
        for m in margins:
            thetas = np.linspace(*chart.sample_box[1], 24)
            ring = []
            for phi in (m, math.pi - m):
                ring.extend(abs(family.value(np.array([phi, t]))) for t in thetas)
            ladder_sups.append(max(ring))
        ladder_x = 1.0 / margins

    values.extend(ladder_sups)
    sup_abs = max(values) if values else 0.0

    slope = 0.0
    if sup_abs > 0 and len(ladder_sups) >= 4:
        ys = np.array(ladder_sups[-4:])
        xs = np.array(ladder_x[-4:])
        if np.all(ys > 0):
            slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    return BoundednessReport(
        sup_abs_g=sup_abs,
        sup_section_norm_sq=2.0 * sup_abs * sup_abs,
        growth_flag=slope > 0.1,
        log_slope=slope,
    )


# -- chart overlap consistency ----------------------------------------------


def hat_coordinates(phi: float, theta: float) -> np.ndarray:
    """(phi_hat, theta_hat) of the point with unhatted coordinates (phi, theta)."""
    sp, cp = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)
    phi_hat = math.acos(min(1.0, max(-1.0, sp * st)))
    theta_hat = math.atan2(sp * ct, cp)
    if theta_hat < -math.pi / 2.0:
        theta_hat += 2.0 * math.pi
    return np.array([phi_hat, theta_hat])


def _wedge_matrix(a, b):
    return np.outer(a, b) - np.outer(b, a)


def frame_change_check(
    phi: float,
    theta: float,
    C: float = 1.0,
    D: float = 0.0,
    fd_step: float = DEFAULT_FD_STEP,
) -> dict:
    """Residuals of the overlap identities between the two Veronese charts.

    Checks the vector transformation rules, the induced rule for the complex
    pair of normal-mixing 2-forms, the sin(phi) compatibility, and that the
    transformed coefficients of sigma = C sin(phi) f^2 + D sin(phi) f^3
    satisfy the hatted holomorphicity PDE.
    """
    chart = get_registered("veronese")
    chart_hat = get_registered("veronese-hat")
    u = np.array([phi, theta])
    u_hat = hat_coordinates(phi, theta)
    if not (chart.contains(u) and chart_hat.contains(u_hat)):
        raise DomainError("point is outside the chart overlap")

    f = chart.frame_field(u)
    fh = chart_hat.frame_field(u_hat)
    e1, e2, nu3, nu4 = f
    e1h, e2h, nu3h, nu4h = fh
    ph, th = u_hat
    sp = math.sin(phi)
    cph, cth, sth = math.cos(ph), math.cos(th), math.sin(th)

    res = {}
    res["sin_phi"] = abs(sp - math.sqrt(1.0 - math.sin(ph) ** 2 * cth**2))
    res["e1"] = float(np.max(np.abs(sp * e1 - (-cph * cth * e1h + sth * e2h))))
    res["e2"] = float(np.max(np.abs(sp * e2 - (-sth * e1h - cph * cth * e2h))))
    diag = 0.25 * (-1.0 + 3.0 * math.cos(2 * th) + 2.0 * cth**2 * math.cos(2 * ph))
    off = cph * math.sin(2 * th)
    res["nu3"] = float(np.max(np.abs(sp**2 * nu3 - (diag * nu3h - off * nu4h))))
    res["nu4"] = float(np.max(np.abs(sp**2 * nu4 - (off * nu3h + diag * nu4h))))

    # 2-forms as ambient bivectors built from the actual frame vectors
    f2 = _wedge_matrix(e1, nu3) + _wedge_matrix(e2, nu4)
    f3 = _wedge_matrix(e1, nu4) - _wedge_matrix(e2, nu3)
    f2h = _wedge_matrix(e1h, nu3h) + _wedge_matrix(e2h, nu4h)
    f3h = _wedge_matrix(e1h, nu4h) - _wedge_matrix(e2h, nu3h)
    res["f2"] = float(
        np.max(np.abs(sp**3 * f2 - sp**2 * (-cph * cth * f2h + sth * f3h)))
    )
    res["f3"] = float(
        np.max(np.abs(sp**3 * f3 - sp**2 * (-sth * f2h - cph * cth * f3h)))
    )

    # transformed section coefficients satisfy the hatted PDE
    def hat_family_value(uh):
        phh, thh = float(uh[0]), float(uh[1])
        a_hat = -C * math.cos(phh) * math.cos(thh) - D * math.sin(thh)
        b_hat = C * math.sin(thh) - D * math.cos(phh) * math.cos(thh)
        return complex(a_hat, b_hat)

    hat_family = SectionFamily(kind="transformed", params={"C": C, "D": D}, evaluator=hat_family_value)
    res["hat_pde"] = abs(pde_residual(hat_family, chart_hat, u_hat, fd_step))

    # the transformed coefficients agree with transporting sigma itself
    sigma = C * sp * f2 + D * sp * f3
    g_hat = hat_family_value(u_hat)
    sigma_hat = g_hat.real * f2h + g_hat.imag * f3h
    res["sigma_transport"] = float(np.max(np.abs(sigma - sigma_hat)))
    res["max"] = max(v for k, v in res.items() if k != "max") if res else 0.0
    return res


# -- golden tables -----------------------------------------------------------

_SAFE_EVAL_NAMES = {
    "sqrt": math.sqrt,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "cot": lambda x: math.cos(x) / math.sin(x),
    "pi": math.pi,
}


def _load_tables() -> dict:
    path = resources.files("twistcal").joinpath("data/golden_tables.json")
    with path.open() as fh:
        return json.load(fh)


def golden_table_names() -> list[str]:
    return sorted(_load_tables())


def golden_table(name: str) -> dict:
    tables = _load_tables()
    if name not in tables:
        raise DomainError(f"unknown golden table {name!r}; have {sorted(tables)}")
    return tables[name]


def _eval_expr(expr: str, variables: dict) -> float:
    return float(eval(expr, {"__builtins__": {}}, {**_SAFE_EVAL_NAMES, **variables}))


def golden_residuals(name: str, u, fd_step: float = DEFAULT_FD_STEP) -> dict:
    """Compare the FD frame data against the reference coefficient table."""
    table = golden_table(name)
    chart = get_registered(table["chart"])
    point = adapted_frame(chart, u, fd_step)
    variables = {v: float(point.u[i]) for i, v in enumerate(table["variables"])}

    expected = np.zeros_like(point.gamma)
    for entry in table["gamma"]:
        j, k, l = entry["j"] - 1, entry["k"] - 1, entry["l"] - 1
        expected[j, k, l] = _eval_expr(entry["expr"], variables)
    gamma_res = float(np.max(np.abs(point.gamma - expected)))

    a_res = 0.0
    for key, mat in table.get("second_fund", {}).items():
        k = int(key) - (chart.q + 1)
        exp_mat = np.array([[_eval_expr(e, variables) for e in row] for row in mat])
        a_res = max(a_res, float(np.max(np.abs(point.second_fund[k] - exp_mat))))
    return {"gamma": gamma_res, "second_fund": a_res, "max": max(gamma_res, a_res)}


# -- registration -------------------------------------------------------------

_charts_registered = False


def get_registered(name: str):
    from .submanifold import get_chart

    _ensure_registered()
    return get_chart(name)


def _ensure_registered():
    global _charts_registered
    if _charts_registered:
        return
    register_chart(equatorial_chart(2, 4))
    ver = register_chart(veronese_chart("psi"))
    register_chart(veronese_chart("psi_hat"))
    register_chart(compose_antipodal(ver))
    _charts_registered = True


_ensure_registered()
