"""Single-qubit decoherence channels acting on Bell-diagonal states.

Two levels of description are provided and cross-checked in the tests:

* Kraus operator sets applied to full 4x4 density matrices, one round at a
  time, on qubit A, qubit B, or both;
* closed-form maps of the correlation triple after ``n`` rounds.

The GADC is used on its ``p_mix = 1/2`` slice with the decay ``γ`` exposed as
the swept probability.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bellstate import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, BellDiagonalState, StateLike, coefficients
from .errors import DomainError, UnsupportedPair


class ChannelKind(enum.Enum):
    BIT_FLIP = "bitflip"
    PHASE_FLIP = "phaseflip"
    BIT_PHASE_FLIP = "bitphaseflip"
    DEPOLARIZING = "depolarizing"
    GADC = "gadc"

    @classmethod
    def parse(cls, name: str) -> "ChannelKind":
        try:
            return cls(name)
        except ValueError:
            names = "|".join(k.value for k in cls)
            raise ValueError(f"unknown channel {name!r}; expected one of {names}") from None


PAULI_CHANNELS = (ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP)

GADC_MIX = 0.5

# Per-component exponent e_i such that one round scales d_i by (1 - p)**e_i.
# Valid for either side: sigma_k conjugation on one qubit flips d_i for i != k.
DECAY_EXPONENTS = {
    ChannelKind.BIT_FLIP: np.array([0.0, 1.0, 1.0]),
    ChannelKind.PHASE_FLIP: np.array([1.0, 1.0, 0.0]),
    ChannelKind.BIT_PHASE_FLIP: np.array([1.0, 0.0, 1.0]),
    ChannelKind.GADC: np.array([0.5, 0.5, 1.0]),
}

SUPPORTED_PAIRS = (
    (ChannelKind.BIT_FLIP, ChannelKind.BIT_FLIP),
    (ChannelKind.PHASE_FLIP, ChannelKind.PHASE_FLIP),
    (ChannelKind.BIT_PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP),
    (ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP),
    (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP),
    (ChannelKind.PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP),
)


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators of one channel.

    ``ops`` has shape ``(..., m, 2, 2)``; leading axes follow the shape of
    ``p`` so a whole probability grid can be carried by a single set.
    """

    kind: ChannelKind
    p: float | np.ndarray
    ops: np.ndarray
    p_mix: float | None = None

    @property
    def label(self) -> str:
        return self.kind.value

    def completeness_error(self) -> float:
        """Max entry of ``|Σ K†K - I|`` over the whole set (and grid)."""
        s = np.einsum("...mji,...mjk->...ik", self.ops.conj(), self.ops)
        return float(np.abs(s - I2).max())


def _check_probability(p, name="p"):
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise DomainError(f"{name} must lie in [0, 1]")
    return p


def _check_rounds(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return int(n)


def _scaled(coefs, mats):
    # coefs: list of (...)-shaped arrays; mats: list of 2x2
    return np.stack([c[..., None, None] * m for c, m in zip(coefs, mats)], axis=-3)


def gadc_kraus(p_mix, gamma) -> np.ndarray:
    """General amplitude damping Kraus operators, shape ``(..., 4, 2, 2)``."""
    p_mix = _check_probability(p_mix, "p_mix")
    g = _check_probability(gamma, "gamma")
    p_mix, g = np.broadcast_arrays(p_mix, g)
    sq = np.sqrt(1 - g)
    zero, one = np.zeros_like(g), np.ones_like(g)
    a, b = np.sqrt(p_mix), np.sqrt(1 - p_mix)
    rows = [
        [[a * one, zero], [zero, a * sq]],
        [[b * sq, zero], [zero, b * one]],
        [[zero, a * np.sqrt(g)], [zero, zero]],
        [[zero, zero], [b * np.sqrt(g), zero]],
    ]
    ops = np.array(rows, dtype=complex)  # (4, 2, 2, ...)
    return np.moveaxis(ops, (0, 1, 2), (-3, -2, -1))


def kraus_set(kind: ChannelKind, p) -> KrausSet:
    """Kraus operators of ``kind`` at decoherence probability ``p``.

    ``p`` may be a scalar or an array; for the GADC it is the decay ``γ`` with
    the mixing parameter held at ``1/2``.
    """
    pa = _check_probability(p)
    if kind in PAULI_CHANNELS:
        sigma = {ChannelKind.BIT_FLIP: SIGMA_X,
                 ChannelKind.PHASE_FLIP: SIGMA_Z,
                 ChannelKind.BIT_PHASE_FLIP: SIGMA_Y}[kind]
        ops = _scaled([np.sqrt(1 - pa / 2), np.sqrt(pa / 2)], [I2, sigma])
        return KrausSet(kind, p, ops)
    if kind is ChannelKind.DEPOLARIZING:
        c = np.sqrt(pa / 3)
        ops = _scaled([np.sqrt(1 - pa), c, c, c], [I2, SIGMA_X, SIGMA_Y, SIGMA_Z])
        return KrausSet(kind, p, ops)
    if kind is ChannelKind.GADC:
        return KrausSet(kind, p, gadc_kraus(GADC_MIX, pa), p_mix=GADC_MIX)
    raise DomainError(f"unknown channel kind {kind!r}")


def _lift(ops, side):
    if side == "A":
        big = np.einsum("...ij,kl->...ikjl", ops, I2)
    elif side == "B":
        big = np.einsum("ij,...kl->...ikjl", I2, ops)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return big.reshape(big.shape[:-4] + (4, 4))


def _one_round(rho, big_ops):
    return np.einsum("...mij,...jk,...mlk->...il", big_ops, rho, big_ops.conj())


def apply_one_sided(rho, k: KrausSet, n: int = 1, side: str = "A") -> np.ndarray:
    """Pass one qubit of ``rho`` through the channel ``n`` times.

    Rounds are applied sequentially; this equals the sum over all ``m**n``
    operator strings by composition. ``rho`` may carry leading batch axes
    that broadcast against those of ``k.ops``.
    """
    n = _check_rounds(n)
    big = _lift(k.ops, side)
    out = np.asarray(rho, dtype=complex)
    for _ in range(n):
        out = _one_round(out, big)
    return out


def apply_two_sided(rho, k_a: KrausSet, k_b: KrausSet, n: int = 1) -> np.ndarray:
    """``n`` rounds of ``ε_A ⊗ ε_B``; within a round A acts first, then B."""
    n = _check_rounds(n)
    big_a, big_b = _lift(k_a.ops, "A"), _lift(k_b.ops, "B")
    out = np.asarray(rho, dtype=complex)
    for _ in range(n):
        out = _one_round(_one_round(out, big_a), big_b)
    return out


def decay_factors(kind: ChannelKind, p, n: int) -> np.ndarray:
    """Multipliers of ``(d1, d2, d3)`` after ``n`` rounds, shape ``p.shape + (3,)``."""
    p = _check_probability(p)
    n = _check_rounds(n)
    if kind is ChannelKind.DEPOLARIZING:
        # sign flip past p = 3/4 drives the revival; do not clamp
        f = (1 - 4 * p / 3) ** n
        return np.repeat(f[..., None], 3, axis=-1)
    try:
        e = DECAY_EXPONENTS[kind]
    except KeyError:
        raise DomainError(f"unknown channel kind {kind!r}") from None
    return (1 - p[..., None]) ** (n * e)


def coefficients_one_sided(kind: ChannelKind, d: StateLike, p, n: int) -> np.ndarray:
    """Vectorised closed-form correlation triple after ``n`` one-sided rounds."""
    return coefficients(d) * decay_factors(kind, p, n)


def coefficient_map_one_sided(kind: ChannelKind, d: StateLike, p: float, n: int) -> BellDiagonalState:
    """Closed-form evolved state after qubit A passes ``n`` times through ``kind``.

    =============  =======================================================
    bit flip       (d1, d2 (1-p)^n, d3 (1-p)^n)
    phase flip     (d1 (1-p)^n, d2 (1-p)^n, d3)
    bit-phase      (d1 (1-p)^n, d2, d3 (1-p)^n)
    depolarizing   d (1 - 4p/3)^n
    GADC           (d1 (1-p)^(n/2), d2 (1-p)^(n/2), d3 (1-p)^n)
    =============  =======================================================
    """
    if np.ndim(p) != 0:
        raise TypeError("use coefficients_one_sided for array-valued p")
    return BellDiagonalState.from_array(coefficients_one_sided(kind, d, p, n))


def check_pair(kind_a: ChannelKind, kind_b: ChannelKind) -> None:
    if kind_a not in PAULI_CHANNELS or kind_b not in PAULI_CHANNELS:
        raise UnsupportedPair(
            f"{kind_a.value}-{kind_b.value} has no Bell-diagonal two-sided closed form"
        )


def pair_exponents(kind_a: ChannelKind, kind_b: ChannelKind) -> tuple[np.ndarray, np.ndarray]:
    """Exponent vectors ``(a, b)``: ``d_i' = d_i (1-p)^(n a_i) (1-q)^(n b_i)``."""
    check_pair(kind_a, kind_b)
    return DECAY_EXPONENTS[kind_a], DECAY_EXPONENTS[kind_b]


def coefficients_two_sided(kind_a, kind_b, d: StateLike, p, q, n: int) -> np.ndarray:
    """Vectorised closed form for both qubits; ``p`` and ``q`` broadcast."""
    check_pair(kind_a, kind_b)
    p, q = np.broadcast_arrays(_check_probability(p), _check_probability(q, "q"))
    return coefficients(d) * decay_factors(kind_a, p, n) * decay_factors(kind_b, q, n)


def coefficient_map_two_sided(kind_a, kind_b, d: StateLike, p: float, q: float, n: int) -> BellDiagonalState:
    """Closed-form evolved state for qubit A through ``kind_a`` and B through ``kind_b``.

    Supported: any pair of bit flip, phase flip and bit-phase flip. E.g.
    bit flip on A with phase flip on B gives
    ``((1-q)^n d1, (1-p)^n (1-q)^n d2, (1-p)^n d3)``.
    """
    if np.ndim(p) != 0 or np.ndim(q) != 0:
        raise TypeError("use coefficients_two_sided for array-valued p, q")
    return BellDiagonalState.from_array(coefficients_two_sided(kind_a, kind_b, d, p, q, n))
