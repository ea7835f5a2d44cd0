"""Classification of classical group actions on M2 up to unitary conjugation.

An action is averaged against Haar measure to produce an invariant state;
its density matrix is u rho_q u* for a unique q in [0, 1] (and, away from
degeneracy, a unique canonical u).  Conjugating the action by u yields an
action preserving the Powers state omega_q, which names the universal
object it factors through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._kernels import jacobi_eigh
from .errors import NotADensityMatrix, SamplerExhausted
from .presentations import builtin_presentation
from .reports import CheckReport, CheckStatus
from .representations import RepAssignment, rep_circle_points, rep_so3_points
from .so3 import haar_spoints
from .verifier import (
    BASIS,
    BASIS_INDEX,
    CoactionSpec,
    StateSpec,
    basis_matrix,
    check_state_preservation,
    conjugated,
    fixed_point_dimension,
)
from .words import Polynomial

DENSITY_TOL = 1e-10
MAX_SAMPLES = 10_000_000
CLASSICAL_PRESETS = ("circle", "so3-classical")


# ------------------------------------------------------------ densities


def validate_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise NotADensityMatrix(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise NotADensityMatrix("density matrix is not self-adjoint")
    if abs(np.trace(rho) - 1.0) > tol:
        raise NotADensityMatrix(f"trace {np.trace(rho).real:.6g} is not one")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -tol:
        raise NotADensityMatrix("density matrix is not positive")
    return rho


def rho_q(q: float) -> np.ndarray:
    return np.diag([1.0, q * q]).astype(np.complex128) / (1.0 + q * q)


@dataclass
class ClassificationResult:
    q: float
    u: np.ndarray
    note: str = ""

    def residual(self, rho) -> float:
        return float(np.abs(self.u @ rho_q(self.q) @ self.u.conj().T - np.asarray(rho)).max())

    def to_dict(self) -> Dict:
        return {"q": self.q, "u": [[[z.real, z.imag] for z in row] for row in self.u], "note": self.note}


def canonical_phases(v: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry of each column real and positive."""
    v = np.array(v, dtype=np.complex128)
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j]) - 1e-12 * np.arange(v.shape[0])))
        z = v[k, j]
        if z != 0:
            v[:, j] *= abs(z) / z
    return v


def classify_state(rho, tol: float = DENSITY_TOL) -> ClassificationResult:
    """(q, u) with u rho_q u* = rho.

    q snaps to 1 when 1 - q < tol and to 0 when q^2 = l2/l1 < tol (q itself
    carries only the square root of the eigenvalue roundoff near zero).
    """
    rho = validate_density(rho, max(tol, DENSITY_TOL))
    herm = (rho + rho.conj().T) / 2
    w, v = jacobi_eigh(herm)
    l1, l2 = max(w[0], 0.0), max(w[1], 0.0)
    q = math.sqrt(l2 / l1) if l1 > 0 else 1.0
    q = min(max(q, 0.0), 1.0)
    note = "eigenbasis, canonical phases"
    if q > 1.0 - tol:
        return ClassificationResult(1.0, np.eye(2, dtype=np.complex128), "degenerate spectrum: u = identity")
    if l2 < tol * l1:
        q = 0.0
        note = "pure state"
    return ClassificationResult(q, canonical_phases(v), note)


# ------------------------------------------------------------ Haar samples


@dataclass
class PointSample:
    """Generator values at sample points, with equal weights."""

    preset: str
    values: Dict[str, np.ndarray]

    @property
    def size(self) -> int:
        return len(next(iter(self.values.values())))

    def rep(self, limit: Optional[int] = None) -> RepAssignment:
        n = self.size if limit is None else min(limit, self.size)
        if self.preset == "circle":
            return rep_circle_points(np.angle(self.values["u"][:n]))
        pts = np.stack([self.values[g][:n] for g in ("S", "T", "R")], axis=1)
        return rep_so3_points(pts)


class HaarSampler:
    """Seeded Haar samples for a classical preset.

    The circle uses the uniform rule on ``n`` points (offset by a seeded
    random rotation); SO(3) uses Monte Carlo.
    """

    def __init__(self, preset: str, seed: int = 0, budget: int = MAX_SAMPLES):
        if preset not in CLASSICAL_PRESETS:
            raise ValueError(f"no Haar sampler for preset {preset!r}")
        self.preset = preset
        self.seed = seed
        self.budget = budget
        self.used = 0

    @property
    def exact_quadrature(self) -> bool:
        return self.preset == "circle"

    def sample(self, n: int, stream: int = 0) -> PointSample:
        if n < 1:
            raise ValueError("need at least one sample")
        if self.used + n > self.budget:
            raise SamplerExhausted(f"sample budget {self.budget} exhausted")
        self.used += n
        rng = np.random.default_rng([self.seed, stream])
        if self.preset == "circle":
            phis = rng.uniform(0, 2 * np.pi) + 2 * np.pi * np.arange(n) / n
            return PointSample("circle", {"u": np.exp(1j * phis)})
        pts = haar_spoints(n, int(rng.integers(2**62)))
        return PointSample("so3-classical", {"S": pts[:, 0], "T": pts[:, 1], "R": pts[:, 2]})


def _eval_pointwise(p: Polynomial, values: Dict[str, np.ndarray], q: float) -> np.ndarray:
    n = len(next(iter(values.values())))
    out = np.zeros(n, dtype=np.complex128)
    for w, c in p.items():
        term = np.full(n, c.eval(q) if not c.is_constant() else float(c.constant_value()), dtype=np.complex128)
        for l in w:
            x = values[l.gen]
            term = term * (np.conj(x) if l.star else x)
        out += term
    return out


def pointwise_images(coact: CoactionSpec, sample: PointSample, q: float = 1.0) -> Dict[str, np.ndarray]:
    """alpha_g(e) for each basis element e, as (n, 2, 2) arrays."""
    out = {}
    for name in BASIS:
        img = coact.basis_image(name)
        arr = np.zeros((sample.size, 2, 2), dtype=np.complex128)
        for k in range(2):
            for l in range(2):
                for coef, p in img[k][l]:
                    arr[:, k, l] += coef * _eval_pointwise(p, sample.values, q)
        out[name] = arr
    return out


@dataclass
class InvariantState:
    rho: np.ndarray
    n_samples: int
    stderr: float
    invariance_residual: float
    exact_quadrature: bool

    @property
    def state(self) -> StateSpec:
        return StateSpec.from_density(self.rho)


def _state_values(rho: np.ndarray, imgs: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    # phi(x) = tr(rho x) for each sampled image x
    return {name: np.einsum("ij,nji->n", rho, arr) for name, arr in imgs.items()}


def invariant_state(
    coact: CoactionSpec,
    sampler: HaarSampler,
    phi: Optional[StateSpec] = None,
    n_samples: int = 4096,
    check_samples: int = 256,
) -> InvariantState:
    """eta = (phi (x) h) Psi by averaging over Haar samples."""
    phi = phi or StateSpec.trace()
    rho_phi = phi.density(1.0)
    sample = sampler.sample(n_samples, stream=1)
    vals = _state_values(rho_phi, pointwise_images(coact, sample))
    eta = {name: v.mean() for name, v in vals.items()}
    stderr = 0.0 if sampler.exact_quadrature else max(
        float(np.std(v) / math.sqrt(len(v))) for v in vals.values()
    )
    rho = np.array([[eta["e11"], eta["e21"]], [eta["e12"], eta["e22"]]], dtype=np.complex128)
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    fresh = sampler.sample(check_samples, stream=2)
    fresh_vals = _state_values(rho, pointwise_images(coact, fresh))
    worst = 0.0
    for name, v in fresh_vals.items():
        i, j = BASIS_INDEX[name]
        worst = max(worst, float(np.abs(v - rho[j, i]).max()))
    return InvariantState(rho, n_samples, stderr, worst, sampler.exact_quadrature)


def conjugate_action(coact: CoactionSpec, u) -> CoactionSpec:
    """m -> (u* (x) 1) Psi(u m u*) (u (x) 1)."""
    return conjugated(coact, u)


# ------------------------------------------------------------ pipeline


def target_preset(q: float) -> str:
    if q == 0.0:
        return "circle"
    if q == 1.0:
        return "so3-classical"
    return f"sqo3(q={q:.12g})"


@dataclass
class PipelineResult:
    q: float
    u: np.ndarray
    target: str
    fixed_dimension: int
    report: CheckReport
    eta: Optional[InvariantState] = None
    notes: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        out = {
            "q": self.q,
            "u": [[[float(z.real), float(z.imag)] for z in row] for row in self.u],
            "target": self.target,
            "fixed_dimension": self.fixed_dimension,
            "report": self.report.to_dict(),
        }
        out["notes"] = dict(sorted(self.notes.items()))
        return out


def _fixed_algebra(coact: CoactionSpec, rep: RepAssignment, rtol: float = 1e-8) -> List[np.ndarray]:
    """Basis of {m : Psi(m) = m (x) 1}, from the null space of the linear system."""
    from .verifier import _full_block, _shape_for  # local: shared internals

    cols = []
    for name in BASIS:
        block = _full_block(coact.basis_image(name), rep)
        i, j = BASIS_INDEX[name]
        e = np.kron(basis_matrix(name), np.eye(rep.dim))
        cols.append((block - e).reshape(-1))
    mat = np.stack(cols, axis=1)
    _, s, vh = np.linalg.svd(mat)
    top = max(s.max(), 1.0)
    null = vh[np.sum(s > rtol * top):].conj()
    return [np.array([[v[0], v[1]], [v[2], v[3]]]) for v in null]


def _pure_invariant_state(coact, fixed: List[np.ndarray], sample: PointSample) -> Tuple[np.ndarray, str]:
    """For a two-dimensional fixed algebra spanned by 1 and h: the invariant
    pure states are the eigenprojections of h.  The one kept makes the
    coefficient of n correlate with the first generator (positive winding)."""
    h = None
    for m in fixed:
        x = m - np.trace(m) / 2 * np.eye(2)
        for cand in (x + x.conj().T, 1j * (x - x.conj().T)):
            if np.linalg.norm(cand) > 1e-8:
                h = cand
                break
        if h is not None:
            break
    w, v = jacobi_eigh(h)
    v = canonical_phases(v)
    gen = coact.presentation.generators[0]
    g = sample.values[gen]
    best = None
    for frame in (v, v[:, ::-1]):
        trial = conjugated(coact, frame)
        img = pointwise_images(trial, sample)["e12"][:, 0, 1]
        score = abs(np.mean(img * np.conj(g)))
        if best is None or score > best[0] + 1e-9:
            best = (score, frame)
    frame = best[1]
    p = np.outer(frame[:, 0], frame[:, 0].conj())
    return p, "pure invariant state from the fixed algebra"


def classify_action_pipeline(
    coact: CoactionSpec,
    preset: Optional[str] = None,
    phi: Optional[StateSpec] = None,
    tol: float = 1e-9,
    seed: int = 0,
    n_samples: int = 4096,
    second_phi: Optional[StateSpec] = None,
) -> PipelineResult:
    """invariant state -> (q, u) -> conjugated action -> omega_q check."""
    preset = preset or coact.presentation.name
    sampler = HaarSampler(preset, seed)
    n_fixed = 8 if preset == "circle" else 64
    fixed_sample = sampler.sample(n_fixed, stream=3)
    frep = fixed_sample.rep()
    dim_fixed = fixed_point_dimension(coact, frep)
    report = CheckReport(f"classify[{coact.name}]")
    notes: Dict[str, object] = {"preset": preset, "fixed_dimension": dim_fixed}

    eta = invariant_state(coact, sampler, phi, n_samples)
    snap = max(tol, 6.0 * eta.stderr)
    notes["snap_tolerance"] = snap
    if dim_fixed == 2:
        rho, how = _pure_invariant_state(coact, _fixed_algebra(coact, frep), fixed_sample)
        notes["state"] = how
    else:
        rho = eta.rho
        notes["state"] = "Haar average"
    result = classify_state(rho, snap)
    report.numeric("invariant-state", eta.invariance_residual, max(tol, 10.0 * snap), samples=eta.n_samples)
    report.numeric("u rho_q u* = rho", result.residual(rho), max(tol, snap))

    if dim_fixed == 1:
        other = second_phi or StateSpec.from_density(_random_density(seed + 1))
        eta2 = invariant_state(coact, HaarSampler(preset, seed + 1), other, n_samples)
        r2 = classify_state(eta2.rho, max(tol, 6.0 * eta2.stderr))
        dq = abs(r2.q - result.q)
        du = float(np.abs(r2.u - result.u).max()) if result.q < 1.0 else 0.0
        report.numeric("ergodic-uniqueness", max(dq, du), max(tol, 10.0 * snap), dq=dq, du=du)

    tilde = conjugate_action(coact, result.u)
    check_rep = sampler.sample(64, stream=4).rep()
    state = StateSpec.powers(result.q) if 0.0 < result.q < 1.0 else (
        StateSpec.trace() if result.q == 1.0 else StateSpec.omega0())
    pres_report = check_state_preservation(tilde, state, check_rep, max(tol, 10.0 * snap), symbolic=False)
    report.extend(pres_report)
    notes["u_note"] = result.note
    return PipelineResult(result.q, result.u, target_preset(result.q), dim_fixed, report, eta, notes)


def _random_density(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_density(seed: int) -> np.ndarray:
    """Seeded full-rank density matrix (Hilbert-Schmidt measure)."""
    return _random_density(seed)


def random_unitary(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    qm, rm = np.linalg.qr(z)
    return qm * (np.diag(rm) / np.abs(np.diag(rm)))


def coaction_for_preset(preset: str) -> CoactionSpec:
    return CoactionSpec.of(builtin_presentation(preset))


def mc_convergence(n_values=(1000, 10000), seeds: int = 16, phi: Optional[StateSpec] = None) -> Dict[int, float]:
    """RMS distance of the averaged SO(3) state from the normalized trace."""
    coact = coaction_for_preset("so3-classical")
    phi = phi or StateSpec.from_density(np.diag([0.8, 0.2]))
    out = {}
    for n in n_values:
        errs = []
        for s in range(seeds):
            eta = invariant_state(coact, HaarSampler("so3-classical", 1000 + s), phi, n, check_samples=8)
            errs.append(np.linalg.norm(eta.rho - np.eye(2) / 2))
        out[n] = float(np.sqrt(np.mean(np.square(errs))))
    return out
