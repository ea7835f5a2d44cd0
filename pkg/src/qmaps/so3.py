"""The group S of triples (s, t, r) with st = -r^2 and |s| + |t| = 1.

A point p acts on M2 by the automorphism sending n to
N(p) = [[-r, s], [t, r]]; this identifies S with SO(3).  Batch versions of
the group law run through the compiled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import InvalidSPoint, InvariantDrift, NonOrthogonalOutput

POINT_TOL = 1e-10

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class SPoint:
    s: complex
    t: complex
    r: complex

    def __post_init__(self):
        for f in ("s", "t", "r"):
            object.__setattr__(self, f, complex(getattr(self, f)))

    def defect(self) -> float:
        """Largest violation of the two defining equations."""
        return max(abs(self.s * self.t + self.r * self.r), abs(abs(self.s) + abs(self.t) - 1.0))

    def validate(self, tol: float = POINT_TOL) -> "SPoint":
        if not self.defect() < tol:
            raise InvalidSPoint(f"{self} is off the group (defect {self.defect():.2e})")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.t, self.r], dtype=np.complex128)

    @classmethod
    def from_array(cls, a) -> "SPoint":
        return cls(a[0], a[1], a[2])

    def distance(self, other: "SPoint") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def s_unit() -> SPoint:
    return SPoint(1.0, 0.0, 0.0)


def _drift_guard(out: SPoint, tol: float) -> SPoint:
    if out.defect() > 10 * tol:
        raise InvariantDrift(f"product left the group: defect {out.defect():.2e}")
    return out


def s_mul(p: SPoint, p2: SPoint, tol: float = POINT_TOL) -> SPoint:
    s, t, r = p.s, p.t, p.r
    s2, t2, r2 = p2.s, p2.t, p2.r
    out = SPoint(
        2 * (r * t.conjugate() - s * r.conjugate()) * r2 + s * s2 + t.conjugate() * t2,
        2 * (t * r.conjugate() - r * s.conjugate()) * r2 + t * s2 + s.conjugate() * t2,
        (abs(s) ** 2 - abs(t) ** 2) * r2 + r * s2 + r.conjugate() * t2,
    )
    return _drift_guard(out, max(tol, p.defect(), p2.defect()))


def s_inv(p: SPoint) -> SPoint:
    x = abs(p.s) * p.t / p.r if p.r != 0 else 0.0
    return SPoint(p.s.conjugate(), p.t, x)


def s_mul_batch(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Row-wise products of (n, 3) arrays of points."""
    return _kernels.s_mul_batch(p, r)


def s_inv_batch(p: np.ndarray) -> np.ndarray:
    return _kernels.s_inv_batch(p)


def batch_defect(p: np.ndarray) -> np.ndarray:
    p = np.atleast_2d(p)
    return np.maximum(
        np.abs(p[:, 0] * p[:, 1] + p[:, 2] ** 2), np.abs(np.abs(p[:, 0]) + np.abs(p[:, 1]) - 1.0)
    )


# ------------------------------------------------------------ action on M2


@dataclass(frozen=True)
class PointAction:
    """Image of n under the automorphism attached to a point."""

    N: np.ndarray
    nilpotency: float  # ||N^2||
    unit_defect: float  # ||N N* + N* N - 1||

    @property
    def is_automorphism(self) -> bool:
        return self.nilpotency < 1e-10 and self.unit_defect < 1e-10

    def apply(self, m) -> np.ndarray:
        """alpha_p(m) for any 2x2 matrix m (linear in the matrix units)."""
        m = np.asarray(m, dtype=np.complex128)
        N, Ns = self.N, self.N.conj().T
        return m[0, 0] * (N @ Ns) + m[0, 1] * N + m[1, 0] * Ns + m[1, 1] * (Ns @ N)


def s_point_action(p: SPoint) -> PointAction:
    N = np.array([[-p.r, p.s], [p.t, p.r]], dtype=np.complex128)
    Ns = N.conj().T
    return PointAction(
        N,
        float(np.linalg.norm(N @ N, 2)),
        float(np.linalg.norm(N @ Ns + Ns @ N - np.eye(2), 2)),
    )


def s_to_so3(p: SPoint, tol: float = 1e-9) -> np.ndarray:
    """Matrix of the automorphism on the Pauli basis of traceless
    self-adjoint 2x2 matrices; a rotation."""
    act = s_point_action(p)
    R = np.empty((3, 3))
    for l, sl in enumerate(PAULI):
        img = act.apply(sl)
        for k, sk in enumerate(PAULI):
            R[k, l] = 0.5 * np.trace(sk @ img).real
    err = np.linalg.norm(R.T @ R - np.eye(3), 2)
    det = np.linalg.det(R)
    if err > tol or abs(det - 1.0) > tol:
        raise NonOrthogonalOutput(f"rotation defect {err:.2e}, det {det:.6f}")
    return R


def spoint_from_unitary(u) -> SPoint:
    """Point whose automorphism is m -> u m u* (u in U(2))."""
    u = np.asarray(u, dtype=np.complex128)
    # u n u* = (u e1)(u e2)^*
    N = np.outer(u[:, 0], u[:, 1].conj())
    return SPoint(N[0, 1], N[1, 0], -N[0, 0])


def spoint_from_so3(R) -> SPoint:
    """A right inverse of ``s_to_so3``: solve u sigma_l u* = sum_k R_kl sigma_k."""
    R = np.asarray(R, dtype=float)
    rows = []
    # unknown u as a 4-vector (row-major); u sigma_l - tau_l u = 0
    for l in range(3):
        tau = sum(R[k, l] * PAULI[k] for k in range(3))
        left = np.kron(np.eye(2), PAULI[l].T)  # u @ sigma
        right = np.kron(tau, np.eye(2))  # tau @ u
        rows.append(left - right)
    M = np.vstack(rows)
    vh = np.linalg.svd(M)[2]
    u = vh[-1].conj().reshape(2, 2)
    u = u / np.sqrt(abs(np.linalg.det(u)))
    return spoint_from_unitary(u)


# ------------------------------------------------------------ sampling


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random rotation: Gram-Schmidt of a Gaussian frame, sign-fixed."""
    z = rng.normal(size=(3, 3))
    qm, rm = np.linalg.qr(z)
    qm = qm * np.sign(np.diag(rm))
    if np.linalg.det(qm) < 0:
        qm[:, 0] = -qm[:, 0]
    return qm


def haar_spoints(n: int, seed: int = 0, method: str = "su2") -> np.ndarray:
    """(n, 3) array of Haar-distributed points.

    ``su2`` pushes uniform unit quaternions through u -> Ad(u) (exact and
    vectorized); ``rotation`` samples rotation matrices and pulls them back
    with ``spoint_from_so3``.
    """
    rng = np.random.default_rng(seed)
    if method == "su2":
        g = rng.normal(size=(n, 4))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        a = g[:, 0] + 1j * g[:, 1]
        b = g[:, 2] + 1j * g[:, 3]
        # u = [[a, -conj b], [b, conj a]]; n -> u n u* gives (s, t, r) below
        return np.stack([a * a, -b * b, a * b], axis=1)
    if method == "rotation":
        return np.array([spoint_from_so3(random_rotation(rng)).as_array() for _ in range(n)])
    raise ValueError("method must be 'su2' or 'rotation'")


def random_spoint(rng: np.random.Generator) -> SPoint:
    return SPoint.from_array(haar_spoints(1, int(rng.integers(2**63 - 1)))[0])


def iter_spoints(n: int, seed: int = 0) -> Iterator[SPoint]:
    for row in haar_spoints(n, seed):
        yield SPoint.from_array(row)
