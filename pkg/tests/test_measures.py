import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discord_dyn import bellstate as bs
from discord_dyn import measures as ms
from discord_dyn.errors import NumericalError

from oracles import max_cq_fidelity

REF = (0.3, -0.4, 0.56)

# frozen from quantum_discord_oracle (181x361 grid + coordinate refinement)
QD_ORACLE = {
    (0.3, -0.4, 0.56): 0.12570350351112003,
    (0.1, 0.2, -0.3): 0.030366359318143132,
    (-0.5, 0.5, 0.2): 0.19203741982228428,
}
# frozen from tests/oracles.py::max_cq_fidelity (40-start Nelder-Mead)
FMAX_ORACLE = {
    (0.3, -0.4, 0.56): 0.9556540647850121,
    (0.1, 0.2, -0.3): 0.9894328467737264,
    (-0.5, 0.5, 0.2): 0.9316624790355414,
}


@st.composite
def physical(draw):
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=4, max_size=4)))
    if w.sum() == 0:
        w = np.ones(4)
    return (w / w.sum()) @ bs.TETRAHEDRON_VERTICES


def test_reference_values():
    assert ms.quantum_discord(REF) == (pytest.approx(0.12570350351112, abs=1e-12), 3)
    assert ms.bures_distance_discord(REF) == (pytest.approx(0.2766977977460712, abs=1e-12), 3)
    assert ms.bures_fmax(REF) == (pytest.approx(0.9556540647850117, abs=1e-12), 3)
    assert ms.trace_distance_discord(REF) == (pytest.approx(0.4, abs=1e-15), 2)


def test_mutual_information_from_entropies():
    rho = bs.to_density_matrix(REF)
    brute = (ms.von_neumann_entropy(ms.partial_trace(rho, "A")) + ms.von_neumann_entropy(ms.partial_trace(rho, "B"))
             - ms.von_neumann_entropy(rho))
    assert ms.mutual_information(REF) == pytest.approx(brute, abs=1e-13)
    assert brute == pytest.approx(0.36553600054915447, abs=1e-12)


@pytest.mark.parametrize("d", list(QD_ORACLE))
def test_qd_matches_frozen_oracle(d):
    assert ms.quantum_discord(d)[0] == pytest.approx(QD_ORACLE[d], abs=1e-10)


def test_qd_oracle_live():
    assert ms.quantum_discord_oracle(bs.to_density_matrix(REF)) == pytest.approx(QD_ORACLE[REF], abs=1e-10)


@pytest.mark.parametrize("d", list(FMAX_ORACLE))
def test_fmax_matches_frozen_oracle(d):
    assert ms.bures_fmax(d)[0] == pytest.approx(FMAX_ORACLE[d], abs=1e-10)


def test_fmax_oracle_live():
    got = max_cq_fidelity(bs.to_density_matrix((0.1, 0.2, -0.3)), starts=6)
    assert got == pytest.approx(FMAX_ORACLE[(0.1, 0.2, -0.3)], abs=1e-8)


def test_fmax_bounds_random_cq_fidelity():
    rng = np.random.default_rng(5)
    rho = bs.to_density_matrix(REF)
    fmax = ms.bures_fmax(REF)[0]
    from oracles import cq_from_params
    for _ in range(300):
        x = np.concatenate([rng.uniform(0, np.pi, 1), rng.uniform(0, 2 * np.pi, 1), rng.normal(size=9)])
        assert ms.uhlmann_fidelity(rho, cq_from_params(x)) <= fmax + 1e-12


def test_printed_discord_form_equals_i_minus_c():
    # -H(λ) - Σ_j (1 + (-1)^j d)/2 log2((1 + (-1)^j d)/4)
    lam = np.array(bs.eigenvalues(REF))
    d = 0.56
    printed = np.sum(lam * np.log2(lam)) - sum((1 + s * d) / 2 * np.log2((1 + s * d) / 4) for s in (1, -1))
    assert printed == pytest.approx(ms.quantum_discord(REF)[0], abs=1e-14)


@pytest.mark.parametrize("v", bs.TETRAHEDRON_VERTICES.tolist())
def test_vertices_normalised(v):
    for m in (ms.QD, ms.BDD, ms.TDD):
        assert ms.evaluate(m, v)[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d", [(0.7, 0, 0), (0, -0.4, 0), (0, 0, 1), (0, 0, 0)])
def test_classical_states_vanish(d):
    for m in (ms.QD, ms.BDD, ms.TDD):
        assert abs(ms.evaluate(m, d)[0]) < 1e-12


def test_tie_breaking():
    assert ms.quantum_discord((0.3, 0.3, 0.2))[1] == 1
    assert ms.trace_distance_discord((0.3, 0.3, 0.2))[1] == 1
    assert ms.trace_distance_discord((0.1, 0.3, 0.3))[1] == 2
    assert ms.trace_distance_discord((0.3, 0.1, 0.3))[1] == 1
    assert ms.bures_fmax((0.2, 0.2, 0.2))[1] == 1


def test_precision_near_maximally_mixed():
    # QD ~ O(d^2) must not collapse to rounding noise
    tiny = np.array([1e-7, 2e-7, 3e-7])
    q = ms.quantum_discord(tiny)[0]
    assert 0 < q < 1e-12
    assert ms.quantum_discord(tiny * 2)[0] == pytest.approx(4 * q, rel=1e-5)
    assert ms.bures_distance_discord(tiny)[0] > 0


def test_sqrt_guard():
    with pytest.raises(NumericalError):
        ms.fmax_terms((1.5, 1.5, 1.5))


def test_fidelity_basics():
    rho = bs.to_density_matrix(REF)
    assert ms.uhlmann_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)
    sigma = bs.to_density_matrix((0, 0, 0))
    # F(ρ, I/4) = (Σ √λ / 2)^2
    want = (np.sqrt(np.array(bs.eigenvalues(REF))).sum() / 2) ** 2
    assert ms.uhlmann_fidelity(rho, sigma) == pytest.approx(want, abs=1e-12)


def test_vectorised_matches_scalar():
    d = bs.sample_physical(np.random.default_rng(3), 50)
    for m in (ms.QD, ms.BDD, ms.TDD):
        vals, br = ms.evaluate(m, d)
        for k in range(0, 50, 7):
            assert ms.evaluate(m, d[k]) == (pytest.approx(vals[k], abs=1e-15), br[k])


@settings(max_examples=300)
@given(physical(), st.sampled_from([(-1, -1, 1), (-1, 1, -1), (1, -1, -1)]))
def test_two_sign_flip_invariance(d, s):
    for m in (ms.QD, ms.BDD, ms.TDD):
        assert ms.evaluate(m, d * np.array(s))[0] == pytest.approx(ms.evaluate(m, d)[0], abs=1e-12)


@settings(max_examples=300)
@given(physical())
def test_measures_in_unit_interval(d):
    for m in (ms.QD, ms.BDD, ms.TDD):
        v = ms.evaluate(m, d)[0]
        assert -1e-12 <= v <= 1 + 1e-12


@settings(max_examples=300)
@given(physical())
def test_branch_consistency(d):
    a = np.abs(d)
    assert ms.quantum_discord(d)[1] - 1 == int(np.argmax(a >= a.max() - 1e-12))
    t = ms.fmax_terms(d)
    assert ms.bures_fmax(d)[1] - 1 == int(np.argmax(t >= t.max() - 1e-12))
    assert abs(a[ms.trace_distance_discord(d)[1] - 1] - np.median(a)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(physical())
def test_qd_against_oracle_property(d):
    oracle = ms.quantum_discord_oracle(bs.to_density_matrix(d), n_theta=61, n_phi=121)
    assert ms.quantum_discord(d)[0] == pytest.approx(oracle, abs=1e-6)
