"""Hot numeric kernels, compiled with numba when available.

Every kernel has a pure-numpy twin with identical semantics.  Setting the
environment variable ``QMAPS_NO_NUMBA=1`` (or running without numba
installed) selects the numpy versions; ``BACKEND`` records the choice.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("QMAPS_NO_NUMBA", "").strip() not in ("", "0", "false", "False")

try:  # pragma: no cover - exercised by whichever backend is installed
    if _DISABLED:
        raise ImportError
    import numba

    _njit = numba.njit(cache=True, fastmath=False)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _njit = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ------------------------------------------------------- Jacobi eigensolver


def _jacobi_loops(a, tol, max_sweeps):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    for _sweep in range(max_sweeps):
        off = 0.0
        scale = 0.0
        for i in range(n):
            scale += abs(a[i, i]) ** 2
            for j in range(n):
                if i != j:
                    off += abs(a[i, j]) ** 2
        if off <= tol * tol * max(scale, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag < 1e-300:
                    continue
                phase = b / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, app - aqq)
                c = np.cos(theta)
                s = np.sin(theta)
                # unitary acting on columns p, q
                u_pp = c
                u_pq = -s * phase
                u_qp = s * np.conj(phase)
                u_qq = c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * u_pp + akq * u_qp
                    a[k, q] = akp * u_pq + akq * u_qq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(u_pp) * apk + np.conj(u_qp) * aqk
                    a[q, k] = np.conj(u_pq) * apk + np.conj(u_qq) * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * u_pp + vkq * u_qp
                    v[k, q] = vkp * u_pq + vkq * u_qq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v


def _jacobi_numpy(a, tol, max_sweeps):
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for _sweep in range(max_sweeps):
        diag = np.diag(a)
        off = np.sum(np.abs(a - np.diag(diag)) ** 2)
        if off <= tol * tol * max(np.sum(np.abs(diag) ** 2), 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag < 1e-300:
                    continue
                phase = b / mag
                theta = 0.5 * np.arctan2(2.0 * mag, a[p, p].real - a[q, q].real)
                c, s = np.cos(theta), np.sin(theta)
                u = np.array([[c, -s * phase], [s * np.conj(phase), c]])
                cols = a[:, [p, q]] @ u
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = u.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                vc = v[:, [p, q]] @ u
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    return np.real(np.diag(a)).copy(), v


# ------------------------------------------------------------ group of S


def _s_mul_loops(p, r):
    n = p.shape[0]
    out = np.empty((n, 3), dtype=np.complex128)
    for k in range(n):
        s, t, x = p[k, 0], p[k, 1], p[k, 2]
        s2, t2, x2 = r[k, 0], r[k, 1], r[k, 2]
        out[k, 0] = 2.0 * (x * np.conj(t) - s * np.conj(x)) * x2 + s * s2 + np.conj(t) * t2
        out[k, 1] = 2.0 * (t * np.conj(x) - x * np.conj(s)) * x2 + t * s2 + np.conj(s) * t2
        out[k, 2] = (abs(s) ** 2 - abs(t) ** 2) * x2 + x * s2 + np.conj(x) * t2
    return out


def _s_mul_numpy(p, r):
    s, t, x = p[:, 0], p[:, 1], p[:, 2]
    s2, t2, x2 = r[:, 0], r[:, 1], r[:, 2]
    out = np.empty((p.shape[0], 3), dtype=np.complex128)
    out[:, 0] = 2.0 * (x * np.conj(t) - s * np.conj(x)) * x2 + s * s2 + np.conj(t) * t2
    out[:, 1] = 2.0 * (t * np.conj(x) - x * np.conj(s)) * x2 + t * s2 + np.conj(s) * t2
    out[:, 2] = (np.abs(s) ** 2 - np.abs(t) ** 2) * x2 + x * s2 + np.conj(x) * t2
    return out


def _s_inv_loops(p):
    n = p.shape[0]
    out = np.empty((n, 3), dtype=np.complex128)
    for k in range(n):
        s, t, x = p[k, 0], p[k, 1], p[k, 2]
        out[k, 0] = np.conj(s)
        out[k, 1] = t
        if x != 0:
            out[k, 2] = abs(s) * t / x
        else:
            out[k, 2] = 0.0
    return out


def _s_inv_numpy(p):
    s, t, x = p[:, 0], p[:, 1], p[:, 2]
    out = np.empty_like(p, dtype=np.complex128)
    out[:, 0] = np.conj(s)
    out[:, 1] = t
    nz = x != 0
    third = np.zeros(p.shape[0], dtype=np.complex128)
    third[nz] = np.abs(s[nz]) * t[nz] / x[nz]
    out[:, 2] = third
    return out


# ------------------------------------------- Kronecker matrix-free products


def _kron3_loops(a, b, c, x):
    """(a (x) b (x) c) x for a vector x, without forming the product."""
    na, nb, nc = a.shape[0], b.shape[0], c.shape[0]
    ma, mb, mc = a.shape[1], b.shape[1], c.shape[1]
    t1 = np.zeros((ma, mb, nc), dtype=np.complex128)
    for i in range(ma):
        for j in range(mb):
            for k in range(mc):
                xv = x[(i * mb + j) * mc + k]
                if xv != 0:
                    for kk in range(nc):
                        t1[i, j, kk] += c[kk, k] * xv
    t2 = np.zeros((ma, nb, nc), dtype=np.complex128)
    for i in range(ma):
        for j in range(mb):
            for jj in range(nb):
                bv = b[jj, j]
                if bv != 0:
                    for kk in range(nc):
                        t2[i, jj, kk] += bv * t1[i, j, kk]
    out = np.zeros(na * nb * nc, dtype=np.complex128)
    for i in range(ma):
        for ii in range(na):
            av = a[ii, i]
            if av != 0:
                for jj in range(nb):
                    for kk in range(nc):
                        out[(ii * nb + jj) * nc + kk] += av * t2[i, jj, kk]
    return out


def _kron3_numpy(a, b, c, x):
    xt = x.reshape(a.shape[1], b.shape[1], c.shape[1])
    y = np.einsum("ai,bj,ck,ijk->abc", a, b, c, xt, optimize=True)
    return y.reshape(-1)


if HAVE_NUMBA:
    _jacobi_fast = _njit(_jacobi_loops)
    _s_mul_fast = _njit(_s_mul_loops)
    _s_inv_fast = _njit(_s_inv_loops)
    _kron3_fast = _njit(_kron3_loops)
else:  # pragma: no cover
    _jacobi_fast = _jacobi_numpy
    _s_mul_fast = _s_mul_numpy
    _s_inv_fast = _s_inv_numpy
    _kron3_fast = _kron3_numpy


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 100, backend: str | None = None):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns eigenvalues sorted descending and the matching unitary of
    eigenvectors (columns).
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    fn = _pick(backend, _jacobi_fast, _jacobi_numpy)
    w, v = fn(a, tol, max_sweeps)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def s_mul_batch(p, r, backend: str | None = None):
    p = np.ascontiguousarray(np.atleast_2d(p), dtype=np.complex128)
    r = np.ascontiguousarray(np.atleast_2d(r), dtype=np.complex128)
    return _pick(backend, _s_mul_fast, _s_mul_numpy)(p, r)


def s_inv_batch(p, backend: str | None = None):
    p = np.ascontiguousarray(np.atleast_2d(p), dtype=np.complex128)
    return _pick(backend, _s_inv_fast, _s_inv_numpy)(p)


def kron_apply(factors, x, backend: str | None = None):
    """Apply the Kronecker product of 1-3 matrices to a vector."""
    factors = [np.ascontiguousarray(f, dtype=np.complex128) for f in factors]
    x = np.ascontiguousarray(x, dtype=np.complex128)
    one = np.ones((1, 1), dtype=np.complex128)
    while len(factors) < 3:
        factors.append(one)
    a, b, c = factors
    return _pick(backend, _kron3_fast, _kron3_numpy)(a, b, c, x)


def _pick(backend, fast, slow):
    if backend is None:
        return fast
    if backend == "numpy":
        return slow
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return fast
    raise ValueError(f"unknown backend {backend!r}")
