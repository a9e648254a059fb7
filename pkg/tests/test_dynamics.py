import math

import numpy as np
import pytest

from discord_dyn import dynamics as dy
from discord_dyn import measures as ms
from discord_dyn.bellstate import BellDiagonalState
from discord_dyn.channels import SUPPORTED_PAIRS, ChannelKind
from discord_dyn.errors import DomainError, OrderingViolation, UnsupportedPair

REF = BellDiagonalState(0.3, -0.4, 0.56)
BF, PF, BPF, DEP, GADC = (ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP,
                          ChannelKind.DEPOLARIZING, ChannelKind.GADC)
ROUNDS = (1, 2, 3, 10, 50)


def sweep(kind, n=1, **kw):
    return dy.sweep_one_sided(dy.SweepConfig(kind, REF, n, **kw))


def test_time_conversion_round_trip():
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(dy.time_at(dy.probability_at(t, 2.0), 2.0), t, atol=1e-14)


def test_config_validation():
    with pytest.raises(DomainError):
        dy.SweepConfig(BF, REF, 0)
    with pytest.raises(DomainError):
        dy.SweepConfig(BF, REF, 1, grid=2)
    with pytest.raises(DomainError):
        dy.SweepConfig(BF, REF, 1, gamma=0.0)
    with pytest.raises(UnsupportedPair):
        dy.SweepConfig(BF, REF, 1, channel_b=DEP)


def test_grid_defaults():
    assert dy.SweepConfig(BF, REF).points() == 2001
    assert dy.SweepConfig(BF, REF, channel_b=PF).points() == 201


def test_predictions_reference():
    assert dy.predict_scp_one_sided(BF, ms.TDD, REF, 1) == pytest.approx([0.25, 1 - 0.3 / 0.56], abs=1e-15)
    assert dy.predict_scp_one_sided(BPF, ms.TDD, REF, 10) == pytest.approx([1 - (0.4 / 0.56) ** 0.1])
    assert dy.predict_scp_one_sided(GADC, ms.TDD, REF, 1)[1] == pytest.approx(1 - (0.3 / 0.56) ** 2)
    assert dy.predict_scp_one_sided(PF, ms.QD, REF, 1) == []


def test_ordering_precondition():
    with pytest.raises(OrderingViolation):
        dy.predict_scp_one_sided(BF, ms.QD, (0.5, -0.4, 0.3), 1)
    # detection still works without the ordering
    r = dy.sweep_one_sided(dy.SweepConfig(BF, BellDiagonalState(0.5, -0.4, 0.3)))
    assert dy.scp_reports(r)[0].predicted is None


@pytest.mark.parametrize("kind", [BF, BPF, GADC])
@pytest.mark.parametrize("n", ROUNDS)
def test_detected_match_predicted(kind, n):
    r = sweep(kind, n)
    for rep in dy.scp_reports(r):
        assert len(rep.detected) == len(rep.predicted)
        assert max(rep.deviations, default=0.0) < 1e-8


@pytest.mark.parametrize("kind", [PF, DEP])
@pytest.mark.parametrize("n", ROUNDS)
def test_no_sudden_change(kind, n):
    r = sweep(kind, n)
    for m in dy.ALL_MEASURES:
        assert dy.detect_sudden_changes(r, m) == []


@pytest.mark.parametrize("kind", [BF, BPF, GADC])
def test_qd_bdd_share_points(kind):
    r = sweep(kind, 3)
    np.testing.assert_allclose(dy.detect_sudden_changes(r, ms.QD), dy.detect_sudden_changes(r, ms.BDD), atol=1e-8)


@pytest.mark.parametrize("kind", [BF, BPF, GADC])
def test_scp_decreasing_in_n(kind):
    first = [dy.detect_sudden_changes(sweep(kind, n), ms.QD)[0] for n in ROUNDS]
    assert all(a > b for a, b in zip(first, first[1:]))


def test_coarse_grid_still_refines():
    r = sweep(BF, 1, grid=51)
    assert dy.detect_sudden_changes(r, ms.TDD) == pytest.approx([0.25, 1 - 0.3 / 0.56], abs=1e-10)


def test_freezing_bit_flip():
    r = sweep(BF, 2)
    rep = dy.scp_reports(r, 1.0)[2]
    (lo, hi), = rep.freeze
    inside = (r.p > lo) & (r.p < hi)
    assert np.ptp(r.values[ms.TDD][inside]) < 1e-12
    assert r.values[ms.TDD][inside][0] == pytest.approx(0.3, abs=1e-15)
    assert rep.freeze_durations[0] == pytest.approx(math.log(0.56 / 0.4) / 2, abs=1e-8)


def test_freezing_bit_phase_flip():
    r = sweep(BPF, 1)
    rep = dy.scp_reports(r, 1.0)[2]
    (lo, hi), = rep.freeze
    assert lo == 0.0
    assert hi == pytest.approx(1 - 0.4 / 0.56, abs=1e-10)
    assert np.ptp(r.values[ms.TDD][r.p < hi]) < 1e-12
    assert dy.freeze_interval(BPF, REF, 1, 1.0) == pytest.approx(rep.freeze_durations[0], abs=1e-8)


def test_gadc_gap_formula():
    for n in (1, 3):
        a, b = dy.predict_scp_one_sided(GADC, ms.TDD, REF, n)
        assert dy.time_at(b, 1.0) - dy.time_at(a, 1.0) == pytest.approx(dy.scp_gap_gadc(REF, n, 1.0), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 50])
def test_depolarizing_revival(n):
    r = sweep(DEP, n)
    assert dy.detect_revival(r) == [pytest.approx(0.75, abs=1e-9)]


def test_no_revival_without_zero():
    assert dy.detect_revival(sweep(BF, 1)) == []


@pytest.mark.parametrize("n", [2, 4])
def test_depolarizing_reflection_even_n(n):
    # at even n the reflected point gives identical coefficients; odd n flips all signs
    p = np.linspace(0.0, 0.75, 41)
    p_ref = 1.5 - p
    keep = p_ref <= 1
    cfg = dy.SweepConfig(DEP, REF, n)
    a, b = cfg.coefficients_at(p[keep]), cfg.coefficients_at(p_ref[keep])
    for m in dy.ALL_MEASURES:
        np.testing.assert_allclose(ms.evaluate(m, a)[0], ms.evaluate(m, b)[0], atol=1e-12)


@pytest.mark.parametrize("n", [1, 3])
def test_depolarizing_reflection_odd_n(n):
    p = np.linspace(0.0, 0.75, 41)
    p_ref = 1.5 - p
    keep = p_ref <= 1
    cfg = dy.SweepConfig(DEP, REF, n)
    a, b = cfg.coefficients_at(p[keep]), cfg.coefficients_at(p_ref[keep])
    np.testing.assert_allclose(b, -a, atol=1e-15)
    np.testing.assert_allclose(ms.evaluate(ms.TDD, a)[0], ms.evaluate(ms.TDD, b)[0], atol=1e-12)
    # d -> -d is not a two-component flip: QD and BDD are not symmetric about 3/4 at odd n
    for m in (ms.QD, ms.BDD):
        assert np.abs(ms.evaluate(m, a)[0] - ms.evaluate(m, b)[0]).max() > 1e-6


def test_two_sided_reduction():
    for ka, kb in SUPPORTED_PAIRS:
        r2 = dy.sweep_two_sided(dy.SweepConfig(ka, REF, 2, grid=101, channel_b=kb))
        r1 = dy.sweep_one_sided(dy.SweepConfig(ka, REF, 2, grid=101))
        for m in dy.ALL_MEASURES:
            np.testing.assert_allclose(r2.values[m][:, 0], r1.values[m], atol=1e-12)


def test_bf_bf_curve():
    curves = dy.constraint_curve_two_sided(BF, BF, ms.QD, REF, 1)
    (c,) = curves
    assert (c.exponent_p, c.exponent_q) == (1, 1)
    assert c.rhs == pytest.approx(0.3 / 0.56, abs=1e-15)
    at_q0 = c.points[np.argmin(c.points[:, 1])]
    assert at_q0[1] == 0.0
    assert at_q0[0] == pytest.approx(1 - 0.3 / 0.56, abs=1e-9)
    assert np.abs(c.residual(c.points[:, 0], c.points[:, 1])).max() < 1e-12


def test_bf_pf_tdd_vertical_line():
    curves = dy.constraint_curve_two_sided(BF, PF, ms.TDD, REF, 1)
    lines = [c for c in curves if c.exponent_q == 0]
    assert any(np.allclose(c.points[:, 0], 0.25) and c.span == (0.0, 1.0) for c in lines)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bf_bpf_split(n):
    q0 = dy.branch_split_q0(BF, BPF, REF, n)
    assert q0 == pytest.approx(1 - (0.4 / 0.56) ** (1 / n), abs=1e-12)
    curves = {c.name: c for c in dy.constraint_curve_two_sided(BF, BPF, ms.QD, REF, n)}
    assert curves["qd:d1=d3"].split == pytest.approx(q0, abs=1e-12)
    assert curves["qd:d1=d2"].span[0] == pytest.approx(q0, abs=1e-12)


def test_pf_pf_has_no_curves():
    for m in dy.ALL_MEASURES:
        assert dy.constraint_curve_two_sided(PF, PF, m, REF, 1) == []


@pytest.mark.parametrize("ka,kb", SUPPORTED_PAIRS)
@pytest.mark.parametrize("m", dy.ALL_MEASURES)
def test_curve_points_verified(ka, kb, m):
    for c in dy.constraint_curve_two_sided(ka, kb, m, REF, 2, samples=41):
        assert all(v is None or v is True for v in c.verified)
        assert np.abs(c.residual(c.points[:, 0], c.points[:, 1])).max() < 1e-12


@pytest.mark.parametrize("ka,kb", [(BF, BF), (BF, PF), (BF, BPF), (PF, BPF)])
def test_curves_explain_grid_branch_changes(ka, kb):
    # every labelled change between 2-D grid neighbours must straddle an analytic curve
    cfg = dy.SweepConfig(ka, REF, 1, grid=41, channel_b=kb)
    r = dy.sweep_two_sided(cfg)
    curves = dy.constraint_curve_two_sided(ka, kb, ms.QD, REF, 1)
    assert dy.detect_branch_changes_2d(r, ms.QD)
    for p, q in dy.detect_branch_changes_2d(r, ms.QD):
        dist = min(np.hypot(c.points[:, 0] - p, c.points[:, 1] - q).min() for c in curves)
        assert dist < 0.05


def test_curve_requires_ordering():
    with pytest.raises(OrderingViolation):
        dy.constraint_curve_two_sided(BF, BF, ms.QD, (0.5, -0.4, 0.3), 1)
    with pytest.raises(UnsupportedPair):
        dy.constraint_curve_two_sided(BF, GADC, ms.QD, REF, 1)
