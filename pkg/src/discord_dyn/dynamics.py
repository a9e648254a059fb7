"""Sweeps over decoherence probability, sudden-change detection and prediction.

A sudden change is a switch of the branch selected inside a measure (max of
``|d_i'|`` for QD, max of ``A_ijk`` for BDD, intermediate ``|d_i'|`` for TDD).
Detection looks for label changes between neighbouring grid points and then
bisects the signed difference of the two competing quantities, which is
smooth through the switch.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from . import channels as ch
from . import measures as ms
from .bellstate import BellDiagonalState, coefficients
from .channels import ChannelKind
from .errors import DomainError, OrderingViolation, UnsupportedChannel
from .measures import BDD, QD, TDD, MeasureKind

ALL_MEASURES = (QD, BDD, TDD)
BISECT_XTOL = 1e-13
REVIVAL_ZERO = 1e-10
FREEZE_TOL = 1e-12
CURVE_PROBE = 1e-6
CURVE_TOL = 1e-9
DEFAULT_GRID_1D = 2001
DEFAULT_GRID_2D = 201


def probability_at(t, gamma):
    """``p = 1 - exp(-γ t)``."""
    return -np.expm1(-gamma * np.asarray(t, dtype=float))


def time_at(p, gamma):
    """Inverse of :func:`probability_at`, in units of ``1/γ`` when ``γ = 1``."""
    return -np.log1p(-np.asarray(p, dtype=float)) / gamma


@dataclass(frozen=True)
class SweepConfig:
    channel_a: ChannelKind
    d0: BellDiagonalState
    n: int = 1
    grid: int | None = None
    channel_b: ChannelKind | None = None
    gamma: float | None = None
    gamma_b: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if self.grid is not None and self.grid < 3:
            raise DomainError(f"grid must have at least 3 points, got {self.grid}")
        for g in (self.gamma, self.gamma_b):
            if g is not None and not g > 0:
                raise DomainError(f"decoherence rates must be positive, got {g}")
        if self.channel_b is not None:
            ch.check_pair(self.channel_a, self.channel_b)

    @property
    def two_sided(self) -> bool:
        return self.channel_b is not None

    def points(self) -> int:
        if self.grid is not None:
            return self.grid
        return DEFAULT_GRID_2D if self.two_sided else DEFAULT_GRID_1D

    def coefficients_at(self, p, q=0.0) -> np.ndarray:
        if self.two_sided:
            return ch.coefficients_two_sided(self.channel_a, self.channel_b, self.d0, p, q, self.n)
        return ch.coefficients_one_sided(self.channel_a, self.d0, p, self.n)


@dataclass
class SweepResult:
    """Measure values and branch labels over a ``p`` (or ``p x q``) grid."""

    config: SweepConfig
    p: np.ndarray
    q: np.ndarray | None
    coefficients: np.ndarray
    values: dict[MeasureKind, np.ndarray]
    branches: dict[MeasureKind, np.ndarray]
    tied: dict[MeasureKind, np.ndarray]


def _evaluate(cfg, p, q, d):
    values, branches, tied = {}, {}, {}
    for m in ALL_MEASURES:
        values[m], branches[m] = ms.evaluate(m, d)
        tied[m] = ms.branch_tied(m, d)
    return SweepResult(cfg, p, q, d, values, branches, tied)


def sweep_one_sided(cfg: SweepConfig) -> SweepResult:
    if cfg.two_sided:
        raise ValueError("sweep_one_sided needs a config without channel_b")
    p = np.linspace(0.0, 1.0, cfg.points())
    return _evaluate(cfg, p, None, cfg.coefficients_at(p))


def sweep_two_sided(cfg: SweepConfig) -> SweepResult:
    """Evaluate on the ``p x q`` grid; arrays are indexed ``[i_p, i_q]``."""
    if not cfg.two_sided:
        raise ValueError("sweep_two_sided needs channel_b")
    p = np.linspace(0.0, 1.0, cfg.points())
    q = p.copy()
    d = cfg.coefficients_at(p[:, None], q[None, :])
    return _evaluate(cfg, p, q, d)


# --------------------------------------------------------------------------
# detection


def _indicator(cfg, measure, i, j, q=None):
    def g(x):
        d = cfg.coefficients_at(x) if q is None else cfg.coefficients_at(x, q)
        b = ms.branch_quantities(measure, d)
        return float(b[..., i] - b[..., j])
    return g


def _refine_interval(cfg, measure, a, b, depth=0):
    """Roots of branch switches inside ``[a, b]``."""
    d = cfg.coefficients_at(np.array([a, b]))
    lab = ms.evaluate(measure, d)[1] - 1
    if lab[0] == lab[1]:
        return []
    g = _indicator(cfg, measure, lab[0], lab[1])
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return [a]
    if gb == 0.0:
        return [b]
    if ga * gb < 0:
        return [bisect(g, a, b, xtol=BISECT_XTOL, maxiter=200)]
    if depth >= 3:
        return []
    # more than one crossing in the cell: split it
    sub = np.linspace(a, b, 17)
    roots = []
    for lo, hi in zip(sub[:-1], sub[1:]):
        roots += _refine_interval(cfg, measure, lo, hi, depth + 1)
    return roots


def _dedupe(xs, tol=1e-9):
    out = []
    for x in sorted(xs):
        if not out or x - out[-1] > tol:
            out.append(float(x))
    return out


def detect_sudden_changes(r: SweepResult, measure: MeasureKind = QD) -> list[float]:
    """Sudden-change points of ``measure`` along a one-dimensional sweep.

    Grid points whose label is fixed only by the tie-break (e.g. all
    ``d_i' = 0``) are skipped when comparing neighbours.
    """
    if r.q is not None:
        raise ValueError("detect_sudden_changes needs a one-dimensional sweep")
    lab, tied = r.branches[measure], r.tied[measure]
    idx = np.flatnonzero(~tied)
    roots = []
    for i, j in zip(idx[:-1], idx[1:]):
        if lab[i] != lab[j]:
            roots += _refine_interval(r.config, measure, r.p[i], r.p[j])
    return _dedupe(roots)


def detect_branch_changes_2d(r: SweepResult, measure: MeasureKind) -> list[tuple[float, float]]:
    """Midpoints of grid edges whose endpoint labels differ (untied endpoints only)."""
    if r.q is None:
        raise ValueError("detect_branch_changes_2d needs a two-dimensional sweep")
    lab, tied = r.branches[measure], r.tied[measure]
    hits = []
    # along p (axis 0) and along q (axis 1)
    diff_p = (lab[1:, :] != lab[:-1, :]) & ~tied[1:, :] & ~tied[:-1, :]
    for i, j in zip(*np.nonzero(diff_p)):
        hits.append((0.5 * (r.p[i] + r.p[i + 1]), float(r.q[j])))
    diff_q = (lab[:, 1:] != lab[:, :-1]) & ~tied[:, 1:] & ~tied[:, :-1]
    for i, j in zip(*np.nonzero(diff_q)):
        hits.append((float(r.p[i]), 0.5 * (r.q[j] + r.q[j + 1])))
    return sorted(hits)


def detect_revival(r: SweepResult) -> list[float]:
    """Points where all measures vanish with non-zero values on both sides.

    Candidates are interior local minima of ``max |d_i'|``. Each is refined
    on the one-round map, by bisection on the dominant signed component if
    it changes sign and by bounded minimisation otherwise.
    """
    if r.q is not None:
        raise ValueError("detect_revival needs a one-dimensional sweep")
    cfg = r.config
    amp = np.abs(r.coefficients).max(axis=-1)
    found = []
    for i in range(1, len(r.p) - 1):
        if not (amp[i] <= amp[i - 1] and amp[i] <= amp[i + 1]):
            continue
        if not (amp[i] < amp[i - 1] or amp[i] < amp[i + 1]):
            continue
        a, b = r.p[i - 1], r.p[i + 1]
        k = int(np.argmax(np.abs(r.coefficients[i - 1])))
        # n rounds are the n-th power of one round: same zeros, no underflow
        one = replace(cfg, n=1)
        comp = lambda x: float(one.coefficients_at(x)[k])  # noqa: E731
        if comp(a) * comp(b) < 0:
            x = bisect(comp, a, b, xtol=1e-15, maxiter=200)
        else:
            res = minimize_scalar(lambda x: float(np.abs(one.coefficients_at(x)).max()),
                                  bounds=(a, b), method="bounded", options={"xatol": 1e-14})
            x = float(res.x)
        d_mid = cfg.coefficients_at(x)
        if not all(abs(ms.evaluate(m, d_mid)[0]) < REVIVAL_ZERO for m in ALL_MEASURES):
            continue
        if _revives(r, i, -1) and _revives(r, i, 1):
            found.append(x)
    return _dedupe(found)


def _revives(r, i, step, reach=0.05):
    # measures near the zero underflow for large n; walk out until resolvable
    limit = max(1, int(reach * len(r.p)))
    for k in range(1, limit + 1):
        j = i + step * k
        if j < 0 or j >= len(r.p):
            return False
        vals = [r.values[m][j] for m in ALL_MEASURES]
        if all(v > 0 for v in vals):
            return True
    return False


def freeze_intervals(r: SweepResult, scp: list[float] | None = None) -> list[tuple[float, float]]:
    """Intervals between consecutive TDD sudden changes on which TDD is constant.

    Includes the segment starting at ``p = 0`` and requires at least one grid
    point strictly inside.
    """
    if scp is None:
        scp = detect_sudden_changes(r, TDD)
    edges = [0.0] + list(scp) + [1.0]
    vals = r.values[TDD]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = (r.p > lo) & (r.p < hi)
        if lo == 0.0:
            inside |= r.p == 0.0
        if hi == 1.0 or inside.sum() < 2:
            continue
        seg = vals[inside]
        if seg.max() - seg.min() < FREEZE_TOL:
            out.append((float(lo), float(hi)))
    return out


# --------------------------------------------------------------------------
# analytic predictions


def check_ordering(d0) -> np.ndarray:
    a = np.abs(coefficients(d0))
    if not (a[0] < a[1] < a[2]):
        raise OrderingViolation(f"expected |d1| < |d2| < |d3|, got {tuple(float(v) for v in a)}")
    return a


def predict_scp_one_sided(kind: ChannelKind, measure: MeasureKind, d0, n: int) -> list[float]:
    """Closed-form sudden-change probabilities for ``|d1| < |d2| < |d3|``."""
    a1, a2, a3 = check_ordering(d0)
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    e = 1.0 / n
    if kind is ChannelKind.BIT_FLIP:
        out = [1 - (a1 / a3) ** e]
        if measure is TDD:
            out = [1 - (a1 / a2) ** e] + out
    elif kind is ChannelKind.BIT_PHASE_FLIP:
        out = [1 - (a2 / a3) ** e]
    elif kind is ChannelKind.GADC:
        out = [1 - (a2 / a3) ** (2 * e)]
        if measure is TDD:
            out.append(1 - (a1 / a3) ** (2 * e))
    elif kind in (ChannelKind.PHASE_FLIP, ChannelKind.DEPOLARIZING):
        out = []
    else:
        raise UnsupportedChannel(kind)
    return sorted(float(v) for v in out)


def freeze_interval(kind: ChannelKind, d0, n: int, gamma: float) -> float:
    """Duration TDD stays frozen: ``ln(|d3|/|d2|) / (n γ)``.

    Between the two TDD sudden changes for bit flip, and from ``t = 0`` to
    the sudden change for bit-phase flip.
    """
    _, a2, a3 = check_ordering(d0)
    if kind not in (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP):
        raise UnsupportedChannel(f"no TDD freezing formula for {kind.value}")
    return math.log(a3 / a2) / (n * gamma)


def scp_gap_gadc(d0, n: int, gamma: float) -> float:
    a1, a2, _ = check_ordering(d0)
    return 2 * math.log(a2 / a1) / (n * gamma)


@dataclass
class ScpReport:
    measure: MeasureKind
    predicted: list[float] | None
    detected: list[float]
    freeze: list[tuple[float, float]] = field(default_factory=list)
    freeze_durations: list[float | None] = field(default_factory=list)
    revivals: list[float] = field(default_factory=list)

    @property
    def deviations(self) -> list[float] | None:
        if self.predicted is None or len(self.predicted) != len(self.detected):
            return None
        return [abs(a - b) for a, b in zip(self.detected, self.predicted)]


def scp_reports(r: SweepResult, gamma: float | None = None) -> list[ScpReport]:
    """Predicted vs detected sudden changes, freezing and revival per measure.

    ``predicted`` is ``None`` when the initial state violates the ordering
    required by the closed forms.
    """
    cfg = r.config
    revivals = detect_revival(r)
    out = []
    for m in ALL_MEASURES:
        try:
            pred = predict_scp_one_sided(cfg.channel_a, m, cfg.d0, cfg.n)
        except (OrderingViolation, UnsupportedChannel):
            pred = None
        det = detect_sudden_changes(r, m)
        rep = ScpReport(m, pred, det, revivals=revivals)
        if m is TDD:
            rep.freeze = freeze_intervals(r, det)
            g = gamma if gamma is not None else cfg.gamma
            rep.freeze_durations = [
                None if g is None else float(time_at(hi, g) - time_at(lo, g)) for lo, hi in rep.freeze
            ]
        out.append(rep)
    return out


# --------------------------------------------------------------------------
# two-sided constraint curves


@dataclass
class ConstraintCurve:
    """Sudden-change locus ``(1-p)^exponent_p (1-q)^exponent_q = rhs``.

    ``free`` names the sampling variable (``"q"`` unless the locus is a line
    of constant ``q``); ``span`` is its operative range and ``split`` the end
    of that range imposed by the measure's selection rule, if any.
    """

    kind_a: ChannelKind
    kind_b: ChannelKind
    measure: MeasureKind
    n: int
    crossing: tuple[int, int]
    exponent_p: int
    exponent_q: int
    rhs: float
    free: str
    span: tuple[float, float]
    split: float | None
    points: np.ndarray
    verified: np.ndarray

    @property
    def name(self) -> str:
        i, j = self.crossing
        return f"{self.measure.value}:d{i}=d{j}"

    def residual(self, p, q) -> np.ndarray:
        """Condition with negative powers cleared, finite on the whole square."""
        u, v = 1 - np.asarray(p, dtype=float), 1 - np.asarray(q, dtype=float)
        ep, eq = self.exponent_p, self.exponent_q
        lhs = u ** max(ep, 0) * v ** max(eq, 0)
        return lhs - self.rhs * u ** max(-ep, 0) * v ** max(-eq, 0)


def _interval_on_line(ep, eq, c, constraints):
    """Range of the free log-coordinate on ``ep x + eq y = c`` within constraints.

    ``x = ln(1-p)``, ``y = ln(1-q)``; each constraint is ``α x + β y <= γ``.
    Returns ``(lo, hi, binding)`` in the free coordinate, where ``binding``
    maps ``"lo"/"hi"`` to the index of the constraint that set that end.
    """
    lo, hi = -np.inf, np.inf
    bind = {}
    for idx, (al, be, ga) in enumerate(constraints):
        if ep != 0:  # free coordinate y, x = (c - eq y) / ep
            coef, const = be - al * eq / ep, ga - al * c / ep
        else:  # free coordinate x, y = c / eq
            coef, const = al, ga - be * c / eq
        if abs(coef) < 1e-15:
            if const < 0:
                return None
            continue
        bound = const / coef
        if coef > 0 and bound < hi:
            hi, bind["hi"] = bound, idx
        elif coef < 0 and bound > lo:
            lo, bind["lo"] = bound, idx
    if lo > hi:
        return None
    return lo, hi, bind


def constraint_curve_two_sided(kind_a: ChannelKind, kind_b: ChannelKind, measure: MeasureKind,
                               d0, n: int, samples: int = 101) -> list[ConstraintCurve]:
    """Sudden-change curves on the ``p-q`` plane for a two-sided channel pair.

    Every pair of components with different decay exponents crosses on a
    straight line in ``(ln(1-p), ln(1-q))``. For QD and BDD only the stretch
    where the crossing pair holds the maximum is a sudden change; for TDD
    every crossing moves the intermediate value. Each sampled point is
    checked by probing the crossing indicator ``|d_i'| - |d_j'|`` at
    ``±CURVE_PROBE`` along the sampled-off coordinate.
    """
    absd = check_ordering(d0)
    a, b = ch.pair_exponents(kind_a, kind_b)
    log_d = np.log(absd)
    cfg = SweepConfig(kind_a, BellDiagonalState.from_array(coefficients(d0)), n, channel_b=kind_b)
    curves = []
    for i, j in itertools.combinations(range(3), 2):
        ep, eq = int(a[i] - a[j]), int(b[i] - b[j])
        if ep == 0 and eq == 0:
            continue
        c = (log_d[j] - log_d[i]) / n
        cons = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]  # p >= 0, q >= 0
        if measure is not TDD:
            k = 3 - i - j
            cons.append((n * (a[k] - a[i]), n * (b[k] - b[i]), log_d[i] - log_d[k]))
        span = _interval_on_line(ep, eq, c, cons)
        if span is None:
            continue
        lo, hi, bind = span
        free = "q" if ep != 0 else "p"
        # back to probabilities; the log coordinate decreases as p, q grow
        v_lo, v_hi = -math.expm1(hi) + 0.0, (1.0 if lo == -np.inf else -math.expm1(lo) + 0.0)
        if v_hi - v_lo < 1e-12:
            continue
        split = None
        for end, val in (("hi", v_lo), ("lo", v_hi)):
            if bind.get(end, -1) == 2:
                split = val
        t = np.linspace(v_lo, v_hi, samples)
        with np.errstate(divide="ignore"):
            y_or_x = np.log1p(-t)
        if free == "q":
            x = (c - eq * y_or_x) / ep if eq else np.full_like(t, c / ep)
            p = -np.expm1(x)
            pts = np.column_stack([p, t])
        else:
            q = -math.expm1(c / eq)
            pts = np.column_stack([t, np.full_like(t, q)])
        pts = np.clip(pts, 0.0, 1.0)
        # normalise so the printed exponent of (1-p) is non-negative
        sp = -1 if ep < 0 or (ep == 0 and eq < 0) else 1
        curve = ConstraintCurve(kind_a, kind_b, measure, n, (i + 1, j + 1), sp * ep, sp * eq,
                                float(math.exp(sp * c)), free, (float(v_lo), float(v_hi)), split,
                                pts, np.zeros(len(pts), dtype=object))
        curve.verified = _probe(cfg, curve)
        curves.append(curve)
    return curves


def _probe(cfg, curve) -> np.ndarray:
    i, j = curve.crossing[0] - 1, curve.crossing[1] - 1
    axis = 0 if curve.exponent_p != 0 else 1
    flags = np.empty(len(curve.points), dtype=object)
    for k, pt in enumerate(curve.points):
        if np.any(pt < CURVE_PROBE) or np.any(pt > 1 - CURVE_PROBE):
            flags[k] = None
            continue
        signs = []
        for s in (-1, 1):
            probe = pt.copy()
            probe[axis] += s * CURVE_PROBE
            d = np.abs(cfg.coefficients_at(probe[0], probe[1]))
            signs.append(d[i] - d[j])
        flags[k] = bool(signs[0] * signs[1] < 0)
    return flags


def branch_split_q0(kind_a: ChannelKind, kind_b: ChannelKind, d0, n: int) -> float | None:
    """Printed threshold ``q0 = 1 - (|d2|/|d3|)^(1/n)`` for bit flip / bit-phase flip."""
    if (kind_a, kind_b) != (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP):
        return None
    _, a2, a3 = check_ordering(d0)
    return 1 - (a2 / a3) ** (1.0 / n)
