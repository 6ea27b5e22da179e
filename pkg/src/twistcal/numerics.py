"""Finite-difference plumbing shared by the geometric modules.

Central differences with one Richardson extrapolation level; the relative
step is scaled by (1 + |u|).  All quantities verified downstream involve at
most first derivatives of smooth frame fields, so the resulting accuracy
(~1e-10 for well-scaled data) comfortably supports 1e-6 tolerances.
"""

from __future__ import annotations

import numpy as np

from .errors import ImmersionDegenerateError

DEFAULT_FD_STEP = 1e-5


def directional_derivative(f, u, w, step: float = DEFAULT_FD_STEP):
    """d/ds f(u + s w) at s = 0 via central differences plus Richardson."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    h = step * (1.0 + float(np.linalg.norm(u)))

    def central(hh):
        return (np.asarray(f(u + hh * w)) - np.asarray(f(u - hh * w))) / (2.0 * hh)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def jacobian(f, u, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Columns are derivatives of f along the coordinate directions."""
    u = np.asarray(u, dtype=float)
    cols = []
    for i in range(u.size):
        w = np.zeros(u.size)
        w[i] = 1.0
        cols.append(directional_derivative(f, u, w, step))
    return np.stack(cols, axis=-1)


def gram_schmidt(rows, tol: float = 1e-10) -> np.ndarray:
    """Orthonormalise the rows (in order); raises if they are dependent."""
    rows = np.asarray(rows, dtype=float)
    out = []
    for r in rows:
        v = r.copy()
        for q in out:
            v -= (v @ q) * q
        n = np.linalg.norm(v)
        if n < tol:
            raise ImmersionDegenerateError("vectors are numerically dependent")
        out.append(v / n)
    return np.array(out)


def complete_orthonormal(existing, ambient_dim: int, count: int, accept: float = 0.3) -> np.ndarray:
    """Extend orthonormal rows by projecting standard basis vectors.

    Candidates are taken in ascending index order and accepted when their
    residual after projection is at least ``accept``; this keeps the
    completion deterministic and smooth wherever the acceptance pattern is
    locally constant.
    """
    existing = [np.asarray(r, dtype=float) for r in existing]
    added = []
    for i in range(ambient_dim):
        if len(added) == count:
            break
        v = np.zeros(ambient_dim)
        v[i] = 1.0
        for q in existing + added:
            v -= (v @ q) * q
        n = np.linalg.norm(v)
        if n >= accept:
            added.append(v / n)
    if len(added) < count:
        raise ImmersionDegenerateError("could not complete orthonormal frame")
    return np.array(added)
