"""Quantum discord, Bures distance discord and trace distance discord.

Closed forms operate on correlation triples and are vectorised over a
trailing axis of length 3. Each returns ``(value, branch)`` where ``branch``
is the 1-based index selected by the max / intermediate step, which is what
changes at a sudden-change point.

``quantum_discord_oracle`` and ``uhlmann_fidelity`` work on full density
matrices and share no code with the closed forms.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.optimize import minimize_scalar

from .bellstate import PAULIS, I2, BellDiagonalState, coefficients
from .errors import NumericalError

TIE_TOL = 1e-12
SQRT_CLIP = 1e-12
FIDELITY_CLIP = 1e-10

# cyclic permutations (i, j, k) used by F_max, 0-based
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class MeasureKind(enum.Enum):
    QUANTUM_DISCORD = "qd"
    BURES_DISTANCE_DISCORD = "bdd"
    TRACE_DISTANCE_DISCORD = "tdd"


QD = MeasureKind.QUANTUM_DISCORD
BDD = MeasureKind.BURES_DISTANCE_DISCORD
TDD = MeasureKind.TRACE_DISTANCE_DISCORD


def _xlog2x(x):
    x = np.where(x < 0, 0.0, x)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log2(safe), 0.0)


def _scalarize(value, branch=None):
    if np.ndim(value) == 0:
        value = float(value)
        if branch is not None:
            branch = int(branch)
    return value if branch is None else (value, branch)


def _first_max(q):
    """Index of the maximum along the last axis, ties to the smallest index."""
    top = q.max(axis=-1, keepdims=True)
    return np.argmax(q >= top - TIE_TOL, axis=-1)


def max_is_tied(q) -> np.ndarray:
    top = q.max(axis=-1, keepdims=True)
    return (q >= top - TIE_TOL).sum(axis=-1) > 1


def _middle(q):
    """Index of the intermediate value, ties to the smallest index."""
    mid = np.sort(q, axis=-1)[..., 1:2]
    return np.argmax(np.abs(q - mid) <= TIE_TOL, axis=-1)


def middle_is_tied(q) -> np.ndarray:
    mid = np.sort(q, axis=-1)[..., 1:2]
    return (np.abs(q - mid) <= TIE_TOL).sum(axis=-1) > 1


def _h(x):
    """``(1 + x) ln(1 + x) - x`` without cancellation; ``h(-1) = 1``."""
    x = np.maximum(np.asarray(x, dtype=float), -1.0)
    small = np.abs(x) < 1e-3
    xs = np.where(small, x, 0.0)
    # Σ_{k>=2} (-1)^k x^k / (k (k - 1))
    series = sum((-1) ** k * xs**k / (k * (k - 1)) for k in range(2, 10))
    safe = np.where(small | (x <= -1), 0.5, x)
    direct = (1 + safe) * np.log1p(safe) - safe
    return np.where(small, series, np.where(x <= -1, 1.0, direct))


def mutual_information(s):
    """Total correlations in bits. Marginals are I/2, so this is 2 - H(λ).

    Evaluated as ``Σ_ab h(4 λ_ab - 1) / (4 ln 2)`` which is exact
    algebraically (the linear terms sum to zero) and keeps precision for
    nearly maximally mixed states.
    """
    d = coefficients(s)
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    # 4 λ_ab - 1, formed from d directly so tiny correlations survive
    x = np.stack([d1 - d2 + d3, d1 + d2 - d3, -d1 + d2 + d3, -d1 - d2 - d3], axis=-1)
    return _scalarize(_h(x).sum(axis=-1) / (4 * np.log(2)))


def classical_correlation(s):
    """Maximal classical correlation in bits: ``1 - H_b((1 + d)/2)``, d = max|d_i|."""
    d = np.abs(coefficients(s)).max(axis=-1)
    return _scalarize((_h(d) + _h(-d)) / (2 * np.log(2)))


def quantum_discord(s):
    """Closed-form quantum discord (bits) and the index of max |d_i|.

    ``-H(λ) - Σ_j (1 + (-1)^j d)/2 log2((1 + (-1)^j d)/4)`` with ``d = max|d_i|``,
    i.e. mutual information minus classical correlation.
    """
    d = coefficients(s)
    value = np.asarray(mutual_information(d)) - np.asarray(classical_correlation(d))
    return _scalarize(value, _first_max(np.abs(d)) + 1)


def _fmax_gaps(d):
    # 2 - A_ijk for each cyclic (i, j, k), rationalised:
    # (1 + d_i) - sqrt(u) = (d_j - d_k)^2 / ((1 + d_i) + sqrt(u)), same for v
    gaps = []
    for i, j, k in CYCLIC:
        u = (1 + d[..., i]) ** 2 - (d[..., j] - d[..., k]) ** 2
        v = (1 - d[..., i]) ** 2 - (d[..., j] + d[..., k]) ** 2
        worst = min(np.min(u, initial=np.inf), np.min(v, initial=np.inf))
        if worst < -SQRT_CLIP:
            raise NumericalError(f"negative square-root argument {worst:.3e} in F_max")
        den_u = 1 + d[..., i] + np.sqrt(np.maximum(u, 0))
        den_v = 1 - d[..., i] + np.sqrt(np.maximum(v, 0))
        nu, nv = (d[..., j] - d[..., k]) ** 2, (d[..., j] + d[..., k]) ** 2
        gu = np.divide(nu, den_u, out=np.zeros_like(nu), where=den_u > 0)
        gv = np.divide(nv, den_v, out=np.zeros_like(nv), where=den_v > 0)
        gaps.append(gu + gv)
    return np.stack(gaps, axis=-1)


def fmax_terms(s) -> np.ndarray:
    """The three ``A_ijk`` of the Bures fidelity maximisation, cyclic order.

    ``A_ijk = sqrt((1 + d_i)^2 - (d_j - d_k)^2) + sqrt((1 - d_i)^2 - (d_j + d_k)^2)``.
    Raises :class:`NumericalError` if a square-root argument is below
    ``-SQRT_CLIP``; smaller negatives are clipped to zero.
    """
    return 2 - _fmax_gaps(coefficients(s))


def bures_fmax(s):
    """Maximal fidelity to the classical-quantum set and the winning ``i`` of (i,j,k).

    The branch label is the first index of the cyclic permutation, so
    ``1 -> (1,2,3)``, ``2 -> (2,3,1)``, ``3 -> (3,1,2)``.
    """
    a = fmax_terms(s)
    return _scalarize(0.5 + 0.25 * a.max(axis=-1), _first_max(a) + 1)


def bures_distance_discord(s):
    """``sqrt((2 + √2)(1 - √F_max))``, normalised to 1 on pure Bell states."""
    d = coefficients(s)
    gaps = _fmax_gaps(d)
    one_minus_f = 0.25 * gaps.min(axis=-1)
    f = 1 - one_minus_f
    value = np.sqrt((2 + np.sqrt(2)) * one_minus_f / (1 + np.sqrt(f)))
    return _scalarize(value, _first_max(2 - gaps) + 1)


def trace_distance_discord(s):
    """Intermediate value of ``|d1|, |d2|, |d3|`` and its original index."""
    a = np.abs(coefficients(s))
    return _scalarize(np.sort(a, axis=-1)[..., 1], _middle(a) + 1)


MEASURES = {
    QD: quantum_discord,
    BDD: bures_distance_discord,
    TDD: trace_distance_discord,
}


def evaluate(measure: MeasureKind, s):
    return MEASURES[measure](s)


def branch_quantities(measure: MeasureKind, d) -> np.ndarray:
    """Per-index competing quantities whose selection defines the branch."""
    d = coefficients(d)
    if measure is BDD:
        return fmax_terms(d)
    return np.abs(d)


def branch_tied(measure: MeasureKind, d) -> np.ndarray:
    """True where the branch label is decided by the tie-break rule only."""
    q = branch_quantities(measure, d)
    return middle_is_tied(q) if measure is TDD else max_is_tied(q)


# --------------------------------------------------------------------------
# density-matrix level oracles


def von_neumann_entropy(rho) -> float:
    lam = np.linalg.eigvalsh(rho)
    return float(-_xlog2x(lam).sum())


def partial_trace(rho, keep: str) -> np.ndarray:
    t = np.asarray(rho).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _bloch_directions(theta, phi):
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta) * np.ones_like(phi)], axis=-1)


class _ConditionalEntropy:
    """Average entropy of A after a projective measurement of B along ``n̂``."""

    def __init__(self, rho):
        t = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
        # M_j = Tr_B[(I ⊗ σ_j) rho], j = 0..3
        ops = (I2,) + PAULIS
        self.m = np.stack([np.einsum("lk,ikjl->ij", s, t) for s in ops])

    def __call__(self, theta, phi):
        nvec = _bloch_directions(theta, phi)
        proj = np.einsum("...j,jab->...ab", nvec, self.m[1:])
        total = 0.0
        for sign in (1.0, -1.0):
            r = 0.5 * (self.m[0] + sign * proj)
            tr = (r[..., 0, 0] + r[..., 1, 1]).real
            half_gap = np.sqrt(
                np.maximum(((r[..., 0, 0] - r[..., 1, 1]).real / 2) ** 2 + np.abs(r[..., 0, 1]) ** 2, 0)
            )
            mu1, mu2 = tr / 2 + half_gap, tr / 2 - half_gap
            # p_k S(rho_k / p_k) = -Σ μ log μ + p_k log p_k
            total = total - _xlog2x(mu1) - _xlog2x(mu2) + _xlog2x(tr)
        return total


def quantum_discord_oracle(rho, n_theta: int = 181, n_phi: int = 361,
                           angle_tol: float = 1e-10, sweeps: int = 4) -> float:
    """Discord by brute-force minimisation over projective measurements on B.

    A ``n_theta x n_phi`` grid over the Bloch sphere seeds a coordinate-wise
    bounded scalar minimisation in ``θ`` and ``φ``. The result is an upper
    bound on the true discord.
    """
    rho = np.asarray(rho, dtype=complex)
    cond = _ConditionalEntropy(rho)
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi)
    grid = cond(thetas[:, None], phis[None, :])
    # argmin returns the first hit: lexicographically smallest (θ, φ) on ties
    it, ip = np.unravel_index(np.argmin(grid), grid.shape)
    best = float(grid[it, ip])
    theta, phi = thetas[it], phis[ip]
    h_t, h_p = thetas[1] - thetas[0], phis[1] - phis[0]
    for _ in range(sweeps):
        before = best
        r = minimize_scalar(lambda t: float(cond(t, phi)), bounds=(theta - h_t, theta + h_t),
                            method="bounded", options={"xatol": angle_tol})
        if r.fun < best:
            best, theta = float(r.fun), float(r.x)
        r = minimize_scalar(lambda f: float(cond(theta, f)), bounds=(phi - h_p, phi + h_p),
                            method="bounded", options={"xatol": angle_tol})
        if r.fun < best:
            best, phi = float(r.fun), float(r.x)
        if before - best < 1e-15:
            break
    s_b = von_neumann_entropy(partial_trace(rho, "B"))
    return s_b - von_neumann_entropy(rho) + best


def _psd_sqrt(rho):
    w, v = np.linalg.eigh(rho)
    if w.min() < -FIDELITY_CLIP:
        raise NumericalError(f"matrix has eigenvalue {w.min():.3e} below PSD tolerance")
    return (v * np.sqrt(np.maximum(w, 0))) @ v.conj().T


def uhlmann_fidelity(rho, sigma) -> float:
    """``F = [tr sqrt(√ρ σ √ρ)]²`` via spectral square roots."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    s = _psd_sqrt(rho)
    inner = s @ sigma @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    if w.min() < -FIDELITY_CLIP:
        raise NumericalError(f"√ρ σ √ρ has eigenvalue {w.min():.3e} below PSD tolerance")
    return float(np.sqrt(np.maximum(w, 0)).sum() ** 2)


def classical_quantum_state(probs, basis, states_b) -> np.ndarray:
    """``Σ_i p_i |φ_i><φ_i| ⊗ ρ_i^B`` for an orthonormal qubit basis ``basis`` (columns)."""
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        v = basis[:, i]
        out += probs[i] * np.kron(np.outer(v, v.conj()), states_b[i])
    return out


def as_state(d) -> BellDiagonalState:
    return d if isinstance(d, BellDiagonalState) else BellDiagonalState.from_array(d)
