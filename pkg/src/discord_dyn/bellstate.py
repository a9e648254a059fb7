"""Bell-diagonal two-qubit states.

A Bell-diagonal state is fixed by its correlation triple ``(d1, d2, d3)``::

    rho = (I⊗I + d1 σx⊗σx + d2 σy⊗σy + d3 σz⊗σz) / 4

and is physical iff the triple lies in the tetrahedron spanned by
``(1,1,-1), (1,-1,1), (-1,-1,-1), (-1,1,1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import NonPhysicalState, NotBellDiagonal

PHYS_EPS = 1e-12
BD_PATTERN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# sigma_i ⊗ sigma_i, i = 1..3
_CORRELATORS = np.stack([np.kron(s, s) for s in PAULIS])

# positions of the entries that vanish for every Bell-diagonal matrix
_OFF_PATTERN = np.ones((4, 4), dtype=bool)
for _i, _j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
    _OFF_PATTERN[_i, _j] = False

TETRAHEDRON_VERTICES = np.array(
    [(1.0, 1.0, -1.0), (1.0, -1.0, 1.0), (-1.0, -1.0, -1.0), (-1.0, 1.0, 1.0)]
)


@dataclass(frozen=True)
class BellDiagonalState:
    """Correlation triple of a physical Bell-diagonal state.

    Construction validates physicality and raises
    :class:`~discord_dyn.errors.NonPhysicalState` for points outside the
    tetrahedron (with ``PHYS_EPS`` slack).
    """

    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for name in ("d1", "d2", "d3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not is_physical(self.as_array()):
            raise NonPhysicalState(
                f"({self.d1}, {self.d2}, {self.d3}) lies outside the tetrahedron"
            )

    @classmethod
    def from_array(cls, d) -> "BellDiagonalState":
        d1, d2, d3 = np.asarray(d, dtype=float).reshape(3)
        return cls(d1, d2, d3)

    def as_array(self) -> np.ndarray:
        return np.array([self.d1, self.d2, self.d3])

    def __iter__(self):
        return iter((self.d1, self.d2, self.d3))


class EigenQuad(NamedTuple):
    """Bell-basis eigenvalues ``λ_ab``."""

    l00: float
    l01: float
    l10: float
    l11: float


StateLike = Union[BellDiagonalState, np.ndarray, tuple, list]


def coefficients(s: StateLike) -> np.ndarray:
    """Return the correlation triple(s) of ``s`` as a float array ``(..., 3)``."""
    if isinstance(s, BellDiagonalState):
        return s.as_array()
    d = np.asarray(s, dtype=float)
    if d.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {d.shape}")
    return d


def eigenvalue_array(d) -> np.ndarray:
    """Vectorised ``λ_ab`` ordered ``(λ00, λ01, λ10, λ11)`` along the last axis.

    λ_ab = [1 + (-1)^a d1 - (-1)^(a+b) d2 + (-1)^b d3] / 4
    """
    d = coefficients(d)
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    return 0.25 * np.stack(
        [
            1 + d1 - d2 + d3,
            1 + d1 + d2 - d3,
            1 - d1 + d2 + d3,
            1 - d1 - d2 - d3,
        ],
        axis=-1,
    )


def eigenvalues(s: StateLike) -> EigenQuad:
    """Bell-basis eigenvalues of a single state, evaluated in closed form."""
    return EigenQuad(*(float(x) for x in eigenvalue_array(coefficients(s).reshape(3))))


def is_physical(s, eps: float = PHYS_EPS):
    """True iff every eigenvalue is ``>= -eps``. Vectorised over ``(..., 3)``."""
    lam = eigenvalue_array(coefficients(s))
    ok = np.all(lam >= -eps, axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok


def to_density_matrix(s: StateLike) -> np.ndarray:
    """Explicit 4x4 matrix in the computational basis ``|00>, |01>, |10>, |11>``."""
    d = coefficients(s)
    if not np.all(is_physical(d)):
        raise NonPhysicalState(f"{d} lies outside the tetrahedron")
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    rho = np.zeros(d.shape[:-1] + (4, 4), dtype=complex)
    rho[..., 0, 0] = rho[..., 3, 3] = 1 + d3
    rho[..., 1, 1] = rho[..., 2, 2] = 1 - d3
    rho[..., 0, 3] = rho[..., 3, 0] = d1 - d2
    rho[..., 1, 2] = rho[..., 2, 1] = d1 + d2
    return rho / 4


def coefficients_from_density_matrix(rho, tol: float = BD_PATTERN_TOL) -> np.ndarray:
    """Vectorised ``d_i = tr(rho σi⊗σi)`` after checking the Bell-diagonal pattern."""
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected (..., 4, 4) matrices, got {rho.shape}")
    off = np.abs(rho[..., _OFF_PATTERN]).max(initial=0.0)
    # within the pattern: equal diagonal pairs and real symmetric corners
    dev = max(
        off,
        np.abs(rho[..., 0, 0] - rho[..., 3, 3]).max(initial=0.0),
        np.abs(rho[..., 1, 1] - rho[..., 2, 2]).max(initial=0.0),
        np.abs(rho[..., 0, 3] - rho[..., 3, 0]).max(initial=0.0),
        np.abs(rho[..., 1, 2] - rho[..., 2, 1]).max(initial=0.0),
        np.abs(rho[..., 0, 3].imag).max(initial=0.0),
        np.abs(rho[..., 1, 2].imag).max(initial=0.0),
    )
    if dev > tol:
        raise NotBellDiagonal(f"entries deviate from Bell-diagonal form by {dev:.3e}")
    return np.einsum("kij,...ji->...k", _CORRELATORS, rho).real


def from_density_matrix(rho, tol: float = BD_PATTERN_TOL) -> BellDiagonalState:
    """Recover the correlation triple of a single Bell-diagonal density matrix."""
    return BellDiagonalState.from_array(coefficients_from_density_matrix(rho, tol))


def validate_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-10) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def bell_state(a: int, b: int) -> np.ndarray:
    """State vector ``|ψ_ab> = (|0,b> + (-1)^a |1,1⊕b>) / √2``."""
    v = np.zeros(4, dtype=complex)
    v[b] = 1
    v[2 + (1 ^ b)] = (-1) ** a
    return v / np.sqrt(2)


def sample_physical(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform samples from the tetrahedron, shape ``(size, 3)``."""
    w = rng.dirichlet(np.ones(4), size=size)
    return w @ TETRAHEDRON_VERTICES
