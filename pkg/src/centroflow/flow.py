"""Time integration of the support-function evolution dh/dt = -1/(h^2 S).

The stepper is explicit RK4 with a curvature-aware step size
dt = cfl * min( dtheta^2 * min(h^2 S^2), min(h^3 S) ); the first term is the
parabolic stability bound of the linearized operator, the second keeps a
single step from collapsing the support.  After each step, spectral modes
above 2n/3 are zeroed (the nonlinearity feeds energy into the tail, which
would otherwise trigger spurious convexity loss), and for symmetric data the
odd modes are projected out.

A trace row is recorded every ``renormalize_every`` accepted steps; each row
carries the monitored functionals, the SL(2)-normalized view of the body
(warm-started from the previous row), and the quantities needed to verify
the evolution laws after the run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops, spectral
from .errors import AsymmetricData, ConvexityLost, StepUnderflow
from .normalize import SearchConfig, banach_mazur_to_disk, family_map, sl2_normalize
from .support import GridFn, SupportFn, apply_linear_map, area, curvature_function, scaled

__all__ = [
    "FlowConfig",
    "FlowTrace",
    "flow_speed",
    "flow_run",
    "normalized_view",
    "conservation_checks",
    "harnack_and_bounds_monitor",
    "ConservationReport",
    "HarnackReport",
    "TRACE_CSV_COLUMNS",
]

TRACE_CSV_COLUMNS = (
    "t", "area", "polar_area", "bp_ratio", "min_S",
    "max_ca2", "max_ca3", "d_bm", "harnack",
)

ROUND_RATIO = 1.5 ** 0.25  # radii-ratio threshold monitored per run


@dataclass(frozen=True)
class FlowConfig:
    """Stepper and trace settings.

    ``n``        grid size the flow runs at (None: inherit from the body);
    ``cfl``      step-safety factor in (0, 0.5];
    ``t_stop_area``  terminal area threshold;
    ``renormalize_every``  accepted steps between trace rows / normalizations;
    ``max_steps``    hard step cap;
    ``t_stop``   optional time cap (the last step is clipped to land on it).
    """

    n: int | None = None
    cfl: float = 0.1
    t_stop_area: float = 1e-3
    renormalize_every: int = 25
    max_steps: int = 2_000_000
    t_stop: float | None = None

    def __post_init__(self):
        if not (0.0 < self.cfl <= 0.5):
            raise ValueError("cfl must lie in (0, 0.5]")
        if self.t_stop_area <= 0.0:
            raise ValueError("t_stop_area must be positive")
        if self.renormalize_every < 1 or self.max_steps < 1:
            raise ValueError("cadence and step cap must be positive")
        if self.t_stop is not None and self.t_stop <= 0.0:
            raise ValueError("t_stop must be positive")


@dataclass
class FlowTrace:
    """Time series of geometric functionals along one run.

    Scalar columns are 1-D arrays over rows; ``h_rows`` and ``ca2_rows``
    store the support samples and the per-direction G/h^2 field at each row;
    ``polar_probe`` and ``polar_probe_rate`` hold the polar support and its
    predicted time derivative at three fixed angles.
    """

    t: np.ndarray
    area: np.ndarray
    polar_area: np.ndarray
    bp_ratio: np.ndarray
    min_S: np.ndarray
    max_ca2: np.ndarray
    max_ca3: np.ndarray
    d_bm: np.ndarray
    harnack: np.ndarray
    min_ca3: np.ndarray
    bp_rhs: np.ndarray
    norm_disk_dist: np.ndarray
    norm_s: np.ndarray
    norm_phi: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    h_rows: np.ndarray
    ca2_rows: np.ndarray
    polar_probe: np.ndarray
    polar_probe_rate: np.ndarray
    probe_indices: tuple
    estimated_T: float
    stop_reason: str
    steps: int
    config: FlowConfig

    @property
    def rows(self) -> int:
        return self.t.size

    def row_body(self, i: int) -> SupportFn:
        return SupportFn(self.h_rows[i], symmetric=True)

    def to_csv(self, target) -> None:
        """Write the trace in the stable 9-column format (17 significant digits)."""
        close = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", encoding="utf-8")
            close = True
        try:
            target.write(",".join(TRACE_CSV_COLUMNS) + "\n")
            cols = [getattr(self, name) for name in TRACE_CSV_COLUMNS]
            for i in range(self.rows):
                target.write(",".join(f"{c[i]:.17g}" for c in cols) + "\n")
        finally:
            if close:
                target.close()


def flow_speed(h: SupportFn) -> GridFn:
    """Pointwise speed -1/(h^2 S)."""
    s = curvature_function(h).samples
    return GridFn(-1.0 / (h.samples ** 2 * s))


class _StageBlowup(Exception):
    pass


def _rhs(x: np.ndarray) -> np.ndarray:
    s = x + spectral.deriv(x, 2)
    if np.min(s) <= 0.0 or np.min(x) <= 0.0:
        raise _StageBlowup
    return -1.0 / (x * x * s)


# search settings for the first row (cold) and subsequent rows (warm)
_COLD_SEARCH = SearchConfig(grid=(32, 32), angle_oversample=2, maxiter=200)


def _warm_search(params: tuple[float, float]) -> SearchConfig:
    return SearchConfig(angle_oversample=1, warm_start=params, maxiter=24,
                        modes=32, xatol=1e-7, fatol=1e-11)


def _normalized_body(body: SupportFn, s: float, phi: float) -> SupportFn:
    image = apply_linear_map(body, family_map(s, phi))
    return scaled(image, np.sqrt(np.pi / area(image)))


def _estimate_extinction(t: np.ndarray, v: np.ndarray) -> float:
    """Extinction time from a weighted linear fit of V^2 against t.

    The area of a shrinking disk satisfies V^2 = c (T - t) exactly, and every
    run approaches that law; the fit uses the last decade of area decay (or
    the last half of the rows if the run is short)."""
    if t.size < 3:
        return float("nan")
    mask = v <= 10.0 * v[-1]
    if np.count_nonzero(mask) < max(6, t.size // 10):
        mask = np.zeros_like(mask)
        mask[t.size // 2:] = True
    tt, vv = t[mask], v[mask]
    if tt.size < 2:
        tt, vv = t, v
    wgt = 1.0 / vv ** 2
    coef = np.polyfit(tt, vv ** 2, 1, w=wgt)
    slope, intercept = coef[0], coef[1]
    if slope >= 0.0:
        return float("nan")
    return float(-intercept / slope)


class _RowRecorder:
    """Accumulates trace rows; owns the warm-start state of the searches."""

    def __init__(self, n: int):
        self.n = n
        self.probe_idx = (0, n // 3, (2 * n) // 3)
        self.sl2_params: tuple[float, float] | None = None
        self.dbm_params: tuple[float, float] | None = None
        self.scalar_rows: list[dict] = []
        self.h_rows: list[np.ndarray] = []
        self.ca2_rows: list[np.ndarray] = []
        self.probe_rows: list[np.ndarray] = []
        self.probe_rate_rows: list[np.ndarray] = []

    def record(self, t: float, arr: np.ndarray, s: np.ndarray, v: float) -> None:
        n = self.n
        body = SupportFn(arr, symmetric=True)
        ca2 = 1.0 / (s * arr ** 2)
        ca3 = ca2 / arr

        chain = ops.polar_chain(body)
        factor = chain.polar_dense.size // n
        p = chain.polar_dense
        sp = p + spectral.deriv(p, 2)
        idx = np.array(self.probe_idx) * factor
        probe = p[idx]
        probe_rate = p[idx] ** 4 * sp[idx]

        gamma = ops.centroid_samples_from_polar(p, v, n)
        v_gamma = 0.5 * (2.0 * np.pi / n) * np.dot(
            gamma, gamma + spectral.deriv(gamma, 2))
        bp = v_gamma / v
        rhs_val = 32.0 * (chain.v_lambda_star - chain.v_star) / (
            3.0 * v * v * chain.v_star)

        scale = np.sqrt(np.pi / v)
        body_scaled = scaled(body, scale)
        sl2_cfg = _warm_search(self.sl2_params) if self.sl2_params else _COLD_SEARCH
        nbody, witness = sl2_normalize(body_scaled, sl2_cfg)
        # recover (s, phi) from the witness diag(s,1/s).R(phi)
        ws = float(np.hypot(witness.a, witness.b))
        wphi = float(np.arctan2(-witness.b, witness.a)) % np.pi
        self.sl2_params = (ws, wphi)
        norm_dist = float(np.max(np.abs(nbody.samples - 1.0)))
        _, r_hi = spectral.refine_periodic_max(nbody.samples)
        _, r_lo = spectral.refine_periodic_min(nbody.samples)
        r_plus = r_hi / scale
        r_minus = r_lo / scale

        dbm_cfg = _warm_search(self.dbm_params) if self.dbm_params else _COLD_SEARCH
        cert = banach_mazur_to_disk(body, dbm_cfg)
        cs = float(np.hypot(cert.witness.a, cert.witness.b))
        cphi = float(np.arctan2(-cert.witness.b, cert.witness.a)) % np.pi
        self.dbm_params = (cs, cphi)

        self.scalar_rows.append({
            "t": t,
            "area": v,
            "polar_area": chain.v_star,
            "bp_ratio": bp,
            "min_S": float(np.min(s)),
            "max_ca2": float(np.max(ca2)),
            "max_ca3": float(np.max(ca3)),
            "d_bm": cert.distance,
            "harnack": float(np.sqrt(max(t, 0.0)) * np.min(ca2)),
            "min_ca3": float(np.min(ca3)),
            "bp_rhs": rhs_val,
            "norm_disk_dist": norm_dist,
            "norm_s": ws,
            "norm_phi": wphi,
            "r_plus": r_plus,
            "r_minus": r_minus,
        })
        self.h_rows.append(arr.copy())
        self.ca2_rows.append(ca2)
        self.probe_rows.append(probe)
        self.probe_rate_rows.append(probe_rate)

    def build(self, stop_reason: str, steps: int, cfg: FlowConfig) -> FlowTrace:
        keys = self.scalar_rows[0].keys()
        cols = {k: np.array([r[k] for r in self.scalar_rows]) for k in keys}
        if cols["t"].size > 1:
            if not np.all(np.diff(cols["t"]) > 0):
                raise ValueError("trace times are not strictly increasing")
            if not np.all(np.diff(cols["area"]) < 0):
                raise ValueError("trace areas are not strictly decreasing")
        trace = FlowTrace(
            **cols,
            h_rows=np.array(self.h_rows),
            ca2_rows=np.array(self.ca2_rows),
            polar_probe=np.array(self.probe_rows),
            polar_probe_rate=np.array(self.probe_rate_rows),
            probe_indices=self.probe_idx,
            estimated_T=_estimate_extinction(cols["t"], cols["area"]),
            stop_reason=stop_reason,
            steps=steps,
            config=cfg,
        )
        return trace


def flow_run(h0: SupportFn, cfg: FlowConfig | None = None) -> FlowTrace:
    """Run the flow from ``h0`` until the area threshold, time cap, or step cap."""
    cfg = cfg or FlowConfig()
    if not h0.symmetric:
        raise AsymmetricData("flow_run expects an origin-symmetric body")
    arr = np.array(h0.samples)
    if cfg.n is not None and cfg.n != arr.size:
        arr = spectral.resample(arr, cfg.n)
        SupportFn(arr, symmetric=True)  # validate the regridded data
    n = arr.size
    dth = 2.0 * np.pi / n
    quad_w = 0.5 * dth
    kmax = n // 3

    recorder = _RowRecorder(n)
    t = 0.0
    steps = 0
    stop_reason = None

    while True:
        s = arr + spectral.deriv(arr, 2)
        if np.min(s) <= 0.0 or np.min(arr) <= 0.0:
            raise ConvexityLost(t)
        v = quad_w * float(np.dot(arr, s))

        if v <= cfg.t_stop_area:
            stop_reason = "area_threshold"
        elif cfg.t_stop is not None and t >= cfg.t_stop * (1.0 - 1e-14):
            stop_reason = "t_stop"
        elif steps >= cfg.max_steps:
            stop_reason = "max_steps"

        if stop_reason or steps % cfg.renormalize_every == 0:
            recorder.record(t, arr, s, v)
        if stop_reason:
            break

        dt = cfg.cfl * min(
            dth * dth * float(np.min((arr * s) ** 2)),
            float(np.min(arr ** 3 * s)),
        )
        if dt < 1e-16 * max(t, 1e-3):
            raise StepUnderflow(f"dt={dt:.3g} at t={t:.9g}")
        if cfg.t_stop is not None:
            dt = min(dt, cfg.t_stop - t)

        try:
            k1 = _rhs(arr)
            k2 = _rhs(arr + 0.5 * dt * k1)
            k3 = _rhs(arr + 0.5 * dt * k2)
            k4 = _rhs(arr + dt * k3)
        except _StageBlowup:
            raise ConvexityLost(t) from None
        arr = arr + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        spec = np.fft.rfft(arr)
        spec[kmax + 1:] = 0.0
        spec[1::2] = 0.0  # origin symmetry is preserved exactly
        arr = np.fft.irfft(spec, n)

        t += dt
        steps += 1

    return recorder.build(stop_reason, steps, cfg)


def normalized_view(trace: FlowTrace, index: int) -> SupportFn:
    """SL(2)-normalized, area-pi body at a recorded row."""
    if not (-trace.rows <= index < trace.rows):
        raise IndexError(f"trace has {trace.rows} rows")
    body = trace.row_body(index)
    body = scaled(body, np.sqrt(np.pi / trace.area[index]))
    return _normalized_body(body, trace.norm_s[index], trace.norm_phi[index])


def _central_diff(t: np.ndarray, y: np.ndarray, stride: int = 1):
    """Non-uniform 3-point central differences at interior rows."""
    i = np.arange(stride, t.size - stride)
    tm, t0, tp = t[i - stride], t[i], t[i + stride]
    ym, y0, yp = y[i - stride], y[i], y[i + stride]
    dl, dr = t0 - tm, tp - t0
    d = (yp - y0) / dr * (dl / (dl + dr)) + (y0 - ym) / dl * (dr / (dl + dr))
    return i, d


def gated_central_difference(t: np.ndarray, y: np.ndarray, agree: float = 0.05):
    """Richardson-extrapolated central differences with a self-consistency mask.

    Rows are kept where the stride-1 and stride-2 estimates agree to
    ``agree`` relative: there the row spacing resolves dy/dt and the
    difference quotient is trustworthy.  On kept rows the returned value is
    the extrapolation (4 d1 - d2) / 3, which cancels the leading
    second-order truncation term.
    """
    i1, d1 = _central_diff(t, y, 1)
    i2, d2 = _central_diff(t, y, 2)
    fine = np.full(t.size, np.nan)
    fine[i1] = d1
    coarse = np.full(t.size, np.nan)
    coarse[i2] = d2
    deriv = fine.copy()
    both = np.isfinite(fine) & np.isfinite(coarse)
    deriv[both] = (4.0 * fine[both] - coarse[both]) / 3.0
    mask = np.zeros(t.size, dtype=bool)
    denom = np.maximum(np.abs(fine), np.abs(coarse))
    ok = both & (denom > 0)
    mask[ok] = np.abs(fine[ok] - coarse[ok]) <= agree * denom[ok]
    return deriv, mask


@dataclass(frozen=True)
class ConservationReport:
    """Deviations of the run from the proved evolution laws."""

    area_law_max_rel_dev: float       # dV/dt vs -2 V(K*)
    min_ca2_monotone: bool            # min G/h^2 non-decreasing
    min_ca2_worst_drop: float
    polar_law_max_rel_dev: float      # dh*/dt vs h*^4 S* at probe angles
    rows_checked: int

    def as_dict(self) -> dict:
        return {
            "area_law_max_rel_dev": self.area_law_max_rel_dev,
            "min_ca2_monotone": self.min_ca2_monotone,
            "min_ca2_worst_drop": self.min_ca2_worst_drop,
            "polar_law_max_rel_dev": self.polar_law_max_rel_dev,
            "rows_checked": self.rows_checked,
        }


def conservation_checks(trace: FlowTrace) -> ConservationReport:
    """Verify the area law, speed monotonicity, and polar evolution law."""
    if trace.rows < 10:
        raise ValueError("need at least 10 trace rows")
    t = trace.t

    deriv, mask = gated_central_difference(t, trace.area)
    rel = np.abs(deriv[mask] + 2.0 * trace.polar_area[mask]) / (
        2.0 * trace.polar_area[mask])
    area_dev = float(np.max(rel)) if mask.any() else float("nan")

    min_ca2 = np.min(trace.ca2_rows, axis=1)
    drops = min_ca2[:-1] - min_ca2[1:]
    worst = float(np.max(drops / np.abs(min_ca2[:-1])))
    monotone = worst <= 1e-8

    polar_dev = 0.0
    checked = int(np.count_nonzero(mask))
    for j in range(trace.polar_probe.shape[1]):
        dcol, mcol = gated_central_difference(t, trace.polar_probe[:, j])
        good = mcol & (trace.polar_probe_rate[:, j] > 0)
        if good.any():
            rel = np.abs(dcol[good] - trace.polar_probe_rate[good, j]) / \
                trace.polar_probe_rate[good, j]
            polar_dev = max(polar_dev, float(np.max(rel)))
    return ConservationReport(
        area_law_max_rel_dev=area_dev,
        min_ca2_monotone=monotone,
        min_ca2_worst_drop=worst,
        polar_law_max_rel_dev=polar_dev,
        rows_checked=checked,
    )


@dataclass(frozen=True)
class HarnackReport:
    """Harnack monotonicity, curvature sandwich, and displacement bounds."""

    harnack_ok: bool                  # per-direction t^(1/2) G/h^2 non-decreasing
    harnack_worst_drop: float
    band_low: float                   # min over final half of (T-t) * min G/h^3
    band_high: float                  # max over final half of (T-t) * max G/h^3
    shrinking_ok: bool                # h(t) <= h(0) pointwise
    displacement_ok: bool             # h(0) <= h(t) (1 + 2 t max G/h^3)
    sandwich_ok: bool                 # r-^4/4 <= T-t <= r+^4/4
    first_round_time: float | None    # first row with r+/r- below 1.5^(1/4)

    def as_dict(self) -> dict:
        return {
            "harnack_ok": self.harnack_ok,
            "harnack_worst_drop": self.harnack_worst_drop,
            "band_low": self.band_low,
            "band_high": self.band_high,
            "shrinking_ok": self.shrinking_ok,
            "displacement_ok": self.displacement_ok,
            "sandwich_ok": self.sandwich_ok,
            "first_round_time": self.first_round_time,
        }


def harnack_and_bounds_monitor(trace: FlowTrace) -> HarnackReport:
    """Check the pointwise Harnack quantity, the centro-affine curvature
    sandwich around the extinction time, and the displacement bounds."""
    t = trace.t
    ca2 = trace.ca2_rows
    weighted = np.sqrt(np.maximum(t, 0.0))[:, None] * ca2
    diffs = weighted[1:] - weighted[:-1]
    scale = np.abs(weighted[:-1]) + 1e-300
    worst = float(np.min(diffs / scale))
    harnack_ok = worst >= -1e-6

    T = trace.estimated_T
    half = trace.rows // 2
    rem = T - t[half:]
    band_low = float(np.min(rem * trace.min_ca3[half:]))
    band_high = float(np.max(rem * trace.max_ca3[half:]))

    h0 = trace.h_rows[0]
    shrink_margin = float(np.max(trace.h_rows - h0[None, :]))
    shrinking_ok = shrink_margin <= 1e-10 * float(np.max(h0))

    ca3_rows = trace.ca2_rows / trace.h_rows
    bound = trace.h_rows * (1.0 + 2.0 * t[:, None] * ca3_rows)
    displacement_ok = bool(np.all(h0[None, :] <= bound * (1.0 + 1e-6)))

    rem_all = T - t
    ratio = trace.r_plus / trace.r_minus
    lo = trace.r_minus ** 4 / 4.0
    hi = trace.r_plus ** 4 / 4.0
    slack = 1e-3
    sandwich_ok = bool(np.all(lo <= rem_all * (1.0 + slack) + 1e-12)
                       and np.all(rem_all <= hi * (1.0 + slack) + 1e-12))

    below = np.nonzero(ratio < ROUND_RATIO)[0]
    first_round = float(t[below[0]]) if below.size else None

    return HarnackReport(
        harnack_ok=harnack_ok,
        harnack_worst_drop=worst,
        band_low=band_low,
        band_high=band_high,
        shrinking_ok=shrinking_ok,
        displacement_ok=displacement_ok,
        sandwich_ok=sandwich_ok,
        first_round_time=first_round,
    )
