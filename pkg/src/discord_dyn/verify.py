"""Self-checks run by ``discord-dyn verify``.

Each suite returns a list of :class:`Check` rows; the CLI writes them to CSV
and exits non-zero if any fails. Closed forms are looked up through their
modules at call time so a patched map is what gets checked.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bellstate as bs
from . import channels as ch
from . import measures as ms
from .channels import ChannelKind

KRAUS_TOL = 1e-12
ORACLE_TOL = 1e-6
VERTEX_TOL = 1e-9
NONNEG_TOL = 1e-12
SIGN_TOL = 1e-12
CONTRACT_TOL = 1e-10
ROUND_COUNTS = (1, 2, 3, 10, 50)
REFERENCE = (0.3, -0.4, 0.56)


@dataclass(frozen=True)
class Check:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)


def worker_count() -> int:
    raw = os.environ.get("DISCORD_DYN_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


def kraus_equivalence(d0=REFERENCE, grid: int = 51, rounds=ROUND_COUNTS) -> list[Check]:
    """Closed-form maps against full density-matrix Kraus evolution."""
    rho0 = bs.to_density_matrix(d0)
    p = np.linspace(0.0, 1.0, grid)
    checks = []
    for kind in ChannelKind:
        k = ch.kraus_set(kind, p)
        dev = trace_dev = 0.0
        for n in rounds:
            rho = ch.apply_one_sided(rho0, k, n)
            got = bs.coefficients_from_density_matrix(rho)
            want = ch.coefficients_one_sided(kind, d0, p, n)
            dev = max(dev, float(np.abs(got - want).max()))
            trace_dev = max(trace_dev, float(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1).max()))
        checks.append(Check(f"kraus_one_sided:{kind.value}", dev, KRAUS_TOL))
        checks.append(Check(f"trace_one_sided:{kind.value}", trace_dev, KRAUS_TOL))
        checks.append(Check(f"completeness:{kind.value}", k.completeness_error(), KRAUS_TOL))
    pp, qq = p[:, None], p[None, :]
    for ka, kb in ch.SUPPORTED_PAIRS:
        k_a, k_b = ch.kraus_set(ka, pp), ch.kraus_set(kb, qq)
        dev = 0.0
        for n in rounds:
            rho = ch.apply_two_sided(rho0, k_a, k_b, n)
            got = bs.coefficients_from_density_matrix(rho)
            want = ch.coefficients_two_sided(ka, kb, d0, pp, qq, n)
            dev = max(dev, float(np.abs(got - want).max()))
        checks.append(Check(f"kraus_two_sided:{ka.value}-{kb.value}", dev, KRAUS_TOL))
    return checks


def oracle_agreement(seed: int = 42, states: int = 50, workers: int | None = None) -> list[Check]:
    """Closed-form quantum discord against the measurement-minimisation oracle."""
    rng = np.random.default_rng(seed)
    ds = bs.sample_physical(rng, states)
    rhos = bs.to_density_matrix(ds)
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        oracle = np.array(list(pool.map(ms.quantum_discord_oracle, rhos)))
    closed = ms.quantum_discord(ds)[0]
    checks = [Check("qd_oracle_random", float(np.abs(oracle - closed).max()), ORACLE_TOL)]
    special = [((0.0, 0.0, 0.0), 0.0)] + [(tuple(v), 1.0) for v in bs.TETRAHEDRON_VERTICES]
    dev = 0.0
    for d, want in special:
        dev = max(dev, abs(ms.quantum_discord(d)[0] - want),
                  abs(ms.quantum_discord_oracle(bs.to_density_matrix(d)) - want))
    checks.append(Check("qd_vertices_origin", dev, VERTEX_TOL))
    return checks


def _two_flips(d):
    return [d * np.array(s) for s in ((-1, -1, 1), (-1, 1, -1), (1, -1, -1))]


def measure_axioms(seed: int = 42, samples: int = 10_000, p_grid: int = 21) -> list[Check]:
    """Non-negativity, sign-flip invariance, contractivity under channels on B."""
    rng = np.random.default_rng(seed + 1)
    d = bs.sample_physical(rng, samples)
    checks = []
    ps = np.linspace(0.0, 1.0, p_grid)
    rho = bs.to_density_matrix(d)[:, None]
    # one round on B via Kraus; every channel here is unital so the output stays Bell-diagonal
    after_b = [bs.coefficients_from_density_matrix(ch.apply_one_sided(rho, ch.kraus_set(k, ps), 1, side="B"))
               for k in ChannelKind]
    for m in (ms.QD, ms.BDD, ms.TDD):
        v = ms.evaluate(m, d)[0]
        checks.append(Check(f"nonnegative:{m.value}", float(max(0.0, -v.min())), NONNEG_TOL))
        flip = max(float(np.abs(ms.evaluate(m, f)[0] - v).max()) for f in _two_flips(d))
        checks.append(Check(f"sign_flip_invariance:{m.value}", flip, SIGN_TOL))
        worst = 0.0
        for d_b in after_b:
            worst = max(worst, float((ms.evaluate(m, d_b)[0] - v[:, None]).max()))
        checks.append(Check(f"contractivity_B:{m.value}", max(worst, 0.0), CONTRACT_TOL))
    return checks


def run_all(seed: int = 42, states: int = 50, samples: int = 10_000) -> list[Check]:
    return kraus_equivalence() + oracle_agreement(seed, states) + measure_axioms(seed, samples)
