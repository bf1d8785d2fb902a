"""Deficit functionals, a seeded body generator, fuzzing campaigns, and the
stability experiment relating the centroid-ratio deficit to the
Banach-Mazur distance from the disk."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ops, spectral
from .errors import AsymmetricData
from .normalize import SearchConfig, banach_mazur_to_disk, pinching_to_bm_bound
from .support import SupportFn, area, check_same_grid, disk

__all__ = [
    "BP_CONSTANT",
    "BodySpec",
    "DeficitReport",
    "random_body",
    "bp_deficit",
    "santalo_product",
    "petty_projection_product",
    "groemer_gap",
    "ratio_derivative_rhs",
    "deficit_report",
    "affine_support_bracket",
    "StabilitySample",
    "StabilityResult",
    "stability_experiment",
    "FuzzReport",
    "fuzz_campaign",
]

# sharp constant of the planar centroid-ratio inequality, (4 / 3 pi)^2
BP_CONSTANT = (4.0 / (3.0 * np.pi)) ** 2

MIN_CURVATURE = 0.05  # generated bodies keep S at least this large


@dataclass(frozen=True)
class BodySpec:
    """Seeded recipe for a random origin-symmetric body.

    The support function is 1 plus even harmonics 2..2*mode_count with
    coefficients amplitude * decay^-k * U[-1, 1]; the perturbation is then
    rescaled so the curvature stays above ``MIN_CURVATURE``.
    """

    seed: int
    mode_count: int = 4
    decay: float = 1.5
    amplitude: float = 0.6
    n: int = 256

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count must be at least 1")
        if self.decay <= 1.0:
            raise ValueError("decay must exceed 1")
        if self.amplitude < 0.0:
            raise ValueError("amplitude must be non-negative")
        if 2 * self.mode_count >= self.n // 4:
            raise ValueError("highest mode must stay below n/4")


def random_body(spec: BodySpec) -> SupportFn:
    """Deterministic random body; identical output for identical specs."""
    rng = np.random.default_rng(spec.seed)
    th = spectral.angles(spec.n)
    pert = np.zeros(spec.n)
    curv = np.zeros(spec.n)
    for k in range(2, 2 * spec.mode_count + 1, 2):
        ca, cb = spec.amplitude * spec.decay ** (-k) * rng.uniform(-1.0, 1.0, 2)
        pert += ca * np.cos(k * th) + cb * np.sin(k * th)
        curv += (1.0 - k * k) * (ca * np.cos(k * th) + cb * np.sin(k * th))
    # curvature is affine in the perturbation scale; solve for the scale
    # that keeps min S at the floor instead of iterating
    low = float(np.min(curv))
    scale = 1.0
    if 1.0 + low < MIN_CURVATURE:
        scale = (1.0 - MIN_CURVATURE) / (-low)
    return SupportFn(1.0 + scale * pert, symmetric=True)


def bp_deficit(h: SupportFn) -> float:
    """Normalized centroid-ratio deficit: V(Gamma K)/V(K) / (4/3pi)^2 - 1."""
    gamma = ops.centroid_body(h)
    return float(area(gamma) / area(h) / BP_CONSTANT - 1.0)


def santalo_product(h: SupportFn) -> float:
    """Volume product V(K) V(K*); at most pi^2, equality on ellipses."""
    if not h.symmetric:
        raise AsymmetricData("santalo_product requires a symmetric body")
    return float(area(h) * ops.polar_area(h))


def petty_projection_product(h: SupportFn) -> float:
    """V(K) V((Pi K)*); at most (pi/2)^2, equality on ellipses."""
    if not h.symmetric:
        raise AsymmetricData("petty_projection_product requires a symmetric body")
    pi_k = ops.projection_body(h)
    return float(area(h) * ops.polar_area(pi_k))


def groemer_gap(h_k: SupportFn, h_l: SupportFn) -> float:
    """Slack in the strengthened mixed-volume inequality.

    Returns [V(K,L)^2 / (V(K)V(L)) - 1] minus the support-difference term
    (V(K) / 4 D(K)^2) max |h_K / sqrt(V(K)) - h_L / sqrt(V(L))|^2, which is
    non-negative for origin-symmetric bodies.
    """
    check_same_grid(h_k, h_l)
    if not (h_k.symmetric and h_l.symmetric):
        raise AsymmetricData("groemer_gap requires symmetric bodies")
    vk, vl = area(h_k), area(h_l)
    vkl = ops.mixed_volume(h_k, h_l)
    lhs = vkl * vkl / (vk * vl) - 1.0
    diam = 2.0 * float(np.max(h_k.samples))
    diff = h_k.samples / np.sqrt(vk) - h_l.samples / np.sqrt(vl)
    rhs = vk / (4.0 * diam * diam) * float(np.max(np.abs(diff)) ** 2)
    return float(lhs - rhs)


def ratio_derivative_rhs(h: SupportFn) -> float:
    """Predicted time derivative of V(Gamma K_t)/V(K_t) at this body:
    32 (V(Lambda K*) - V(K*)) / (3 V(K)^2 V(K*)); non-positive, zero
    exactly on origin-centered ellipses."""
    chain = ops.polar_chain(h)
    v = area(h)
    return float(32.0 * (chain.v_lambda_star - chain.v_star)
                 / (3.0 * v * v * chain.v_star))


@dataclass(frozen=True)
class DeficitReport:
    """Per-body inequality audit; all gaps are >= 0 up to roundoff."""

    body_id: str
    bp_deficit: float
    santalo_gap: float
    petty_gap: float
    groemer_gap: float
    lambda_gap: float
    lutwak_residual_rel: float
    d_bm: float | None = None
    pinching_bound: float | None = None

    def as_dict(self) -> dict:
        return {
            "body_id": self.body_id,
            "bp_deficit": self.bp_deficit,
            "santalo_gap": self.santalo_gap,
            "petty_gap": self.petty_gap,
            "groemer_gap": self.groemer_gap,
            "lambda_gap": self.lambda_gap,
            "lutwak_residual_rel": self.lutwak_residual_rel,
            "d_bm": self.d_bm,
            "pinching_bound": self.pinching_bound,
        }


def deficit_report(h: SupportFn, body_id: str = "", with_bm: bool = False,
                   bm_config: SearchConfig | None = None) -> DeficitReport:
    """Evaluate every audited inequality on one body.

    The centroid body and the identity residual share one polar computation.
    """
    v = area(h)
    chain = ops.polar_chain(h)
    gamma = SupportFn(
        ops.centroid_samples_from_polar(chain.polar_dense, v, h.n),
        symmetric=True)
    s_lam = chain.lambda_dense + spectral.deriv(chain.lambda_dense, 2)
    pi_dense = 0.5 * ops._abs_cos_transform(s_lam)
    rhs = (2.0 / (3.0 * chain.v_star)) * spectral.resample(pi_dense, h.n)
    lut = float(np.max(np.abs(gamma.samples - rhs)) / np.max(gamma.samples))
    lam = ops.curvature_image(h)
    d_bm = None
    pinch = None
    if with_bm:
        d_bm = banach_mazur_to_disk(h, bm_config).distance
        pinch = pinching_to_bm_bound(h)
    return DeficitReport(
        body_id=body_id,
        bp_deficit=float(area(gamma) / v / BP_CONSTANT - 1.0),
        santalo_gap=float(np.pi ** 2 - santalo_product(h)),
        petty_gap=float((np.pi / 2.0) ** 2 - petty_projection_product(h)),
        groemer_gap=groemer_gap(h, disk(1.0, h.n)),
        lambda_gap=float((v - area(lam)) / v),
        lutwak_residual_rel=lut,
        d_bm=d_bm,
        pinching_bound=pinch,
    )


def affine_support_bracket(h: SupportFn) -> tuple[float, float]:
    """(min, max) of h S^(1/3) after rescaling the body to area pi; the
    bracket straddles 1 for every convex body."""
    factor = np.sqrt(np.pi / area(h))
    s = h.samples + spectral.deriv(h.samples, 2)
    q = factor * h.samples * np.cbrt(factor * s)
    return float(np.min(q)), float(np.max(q))


# --- stability experiment -----------------------------------------------------

@dataclass(frozen=True)
class StabilitySample:
    seed: int
    eps: float
    d_bm_minus_1: float
    pinch_bound: float
    gamma_witness: float


@dataclass(frozen=True)
class StabilityResult:
    samples: list[StabilitySample]
    gamma: float             # smallest gamma with d-1 <= gamma eps^(1/4) everywhere
    fit_exponent: float      # log-log slope over the small-deficit samples
    fit_count: int
    control_eps: float       # deficit of the disk control body
    control_d_minus_1: float

    def to_csv(self, target) -> None:
        close = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", encoding="utf-8")
            close = True
        try:
            target.write("seed,eps,d_bm_minus_1,pinch_bound,gamma_witness\n")
            for s in self.samples:
                target.write(
                    f"{s.seed},{s.eps:.17g},{s.d_bm_minus_1:.17g},"
                    f"{s.pinch_bound:.17g},{s.gamma_witness:.17g}\n")
        finally:
            if close:
                target.close()


def _interpolate_to_disk(h: SupportFn, lam: float) -> SupportFn:
    """Support-function interpolation (1 - lam) disk + lam K."""
    return SupportFn(1.0 + lam * (h.samples - 1.0), symmetric=True)


def _square_perturbation(n: int) -> np.ndarray:
    """Mollified-square support minus its mean, the highest-deficit direction
    available to origin-symmetric bodies (parallelograms maximize the planar
    centroid ratio, so deficits are capped near 0.026)."""
    th = spectral.angles(n)
    hs = np.abs(np.cos(th)) + np.abs(np.sin(th))
    f = np.fft.rfft(hs)
    k = np.arange(n // 2 + 1)
    f *= np.exp(-0.5 * (0.04 * k) ** 2)
    hs = np.fft.irfft(f, n)
    return hs - hs.mean()


def _stability_base(seed: int, n: int) -> SupportFn:
    """Random body blended with the square direction, curvature floored."""
    rng = np.random.default_rng(seed)
    mix = rng.uniform(0.0, 1.0)
    wob = random_body(BodySpec(seed=seed, n=n, mode_count=4,
                               decay=1.4, amplitude=0.8))
    pert = (1.0 - mix) * (wob.samples - 1.0) + mix * _square_perturbation(n)
    curv = pert + spectral.deriv(pert, 2)
    low = float(np.min(curv))
    scale = 1.0
    if 1.0 + low < MIN_CURVATURE:
        scale = (1.0 - MIN_CURVATURE) / (-low)
    return SupportFn(1.0 + scale * pert, symmetric=True)


def _deficit_targeted_body(base: SupportFn, target: float,
                           rtol: float = 0.01) -> tuple[SupportFn, float]:
    """Bisect the disk-interpolation weight until the deficit hits target.

    When the base body cannot reach the target, the base itself is returned
    with its actual deficit (the target is clamped)."""
    f_hi = bp_deficit(base)
    if f_hi < target:
        return base, f_hi
    lo, hi = 0.0, 1.0
    body, f = base, f_hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        body = _interpolate_to_disk(base, mid)
        f = bp_deficit(body)
        if abs(f - target) <= rtol * target:
            break
        if f < target:
            lo = mid
        else:
            hi = mid
    return body, f


def stability_experiment(count: int, seed: int,
                         eps_low: float = 1e-6, eps_high: float = 1e-1,
                         n: int = 256,
                         bm_config: SearchConfig | None = None) -> StabilityResult:
    """Scatter of (deficit, Banach-Mazur distance - 1) across target deficits.

    Bodies are drawn from the seeded generator (blended with a mollified
    square for the high-deficit end) and pulled toward the disk by bisection
    until the deficit lands on a log-spaced target (1% relative); targets
    beyond the symmetric-class maximum are clamped to the body's own deficit.
    Reports the least admissible witness gamma for the quarter-power bound
    and the log-log slope fitted on the samples with deficit <= 1e-2.
    """
    if count < 10:
        raise ValueError("need at least 10 samples")
    if bm_config is None:
        bm_config = SearchConfig(grid=(48, 48), angle_oversample=2)
    targets = np.geomspace(eps_low, eps_high, count)
    samples = []
    for i, target in enumerate(targets):
        best: tuple[SupportFn, float] | None = None
        base_seed = 0
        for retry in range(6):
            base_seed = seed + 1000 * i + retry
            base = _stability_base(base_seed, n)
            body, eps = _deficit_targeted_body(base, float(target))
            if best is None or eps > best[1]:
                best = (body, eps)
            if eps >= target * 0.99:
                break
        body, eps = best
        cert = banach_mazur_to_disk(body, bm_config)
        d1 = cert.distance - 1.0
        pinch = pinching_to_bm_bound(body)
        samples.append(StabilitySample(
            seed=base_seed, eps=eps, d_bm_minus_1=d1, pinch_bound=pinch,
            gamma_witness=d1 / eps ** 0.25))
    gamma = max(s.gamma_witness for s in samples)
    small = [s for s in samples if s.eps <= 1e-2 and s.d_bm_minus_1 > 0]
    if len(small) >= 2:
        logs_e = np.log([s.eps for s in small])
        logs_d = np.log([s.d_bm_minus_1 for s in small])
        slope = float(np.polyfit(logs_e, logs_d, 1)[0])
    else:
        slope = float("nan")
    control = disk(1.0, n)
    control_eps = bp_deficit(control)
    control_d = banach_mazur_to_disk(control, bm_config).distance - 1.0
    return StabilityResult(samples=samples, gamma=gamma, fit_exponent=slope,
                           fit_count=len(small), control_eps=control_eps,
                           control_d_minus_1=control_d)


# --- fuzzing -------------------------------------------------------------------

@dataclass
class FuzzReport:
    """Worst-case slacks over a seeded corpus; negative min_gap flags a
    violated inequality."""

    count: int
    seed: int
    checks: dict = field(default_factory=dict)

    def worst(self) -> float:
        return min(v["min_gap"] for k, v in self.checks.items()
                   if "min_gap" in v)

    def as_dict(self) -> dict:
        return {"count": self.count, "seed": self.seed, "checks": self.checks}


def fuzz_campaign(count: int, seed: int, n: int = 256) -> FuzzReport:
    """Evaluate the inequality suite on ``count`` seeded bodies.

    Checks: centroid-ratio deficit, volume-product bound, projection-product
    bound, mixed-volume inequality (against the previous body and the disk),
    the strengthened mixed-volume gap, the curvature-image area drop, the
    centroid/projection identity residual, and the affine-support bracket.
    """
    report = FuzzReport(count=count, seed=seed)
    mins: dict[str, tuple[float, int]] = {}
    max_lutwak = (-np.inf, -1)
    reference = disk(1.0, n)
    prev = None

    def see(name: str, value: float, body_seed: int):
        if name not in mins or value < mins[name][0]:
            mins[name] = (value, body_seed)

    for i in range(count):
        spec = BodySpec(seed=seed + i, n=n,
                        mode_count=2 + (i % 4), decay=1.3 + 0.2 * (i % 5),
                        amplitude=0.1 + 0.08 * (i % 11))
        body = random_body(spec)
        v = area(body)
        rep = deficit_report(body, body_id=str(spec.seed))
        see("bp_deficit", rep.bp_deficit, spec.seed)
        see("santalo_gap", rep.santalo_gap / np.pi ** 2, spec.seed)
        see("petty_gap", rep.petty_gap / (np.pi / 2.0) ** 2, spec.seed)
        see("groemer_vs_disk", rep.groemer_gap, spec.seed)
        see("lambda_area_drop", rep.lambda_gap, spec.seed)
        if rep.lutwak_residual_rel > max_lutwak[0]:
            max_lutwak = (rep.lutwak_residual_rel, spec.seed)
        lo, hi = affine_support_bracket(body)
        see("affine_bracket_low", 1.0 - lo, spec.seed)
        see("affine_bracket_high", hi - 1.0, spec.seed)
        for other, tag in ((reference, "minkowski_vs_disk"),
                           (prev, "minkowski_vs_prev")):
            if other is None:
                continue
            vkl = ops.mixed_volume(body, other)
            gap = (vkl * vkl - v * area(other)) / (v * area(other))
            see(tag, gap, spec.seed)
        if prev is not None:
            see("groemer_vs_prev", groemer_gap(body, prev), spec.seed)
        prev = body

    for name, (value, argmin_seed) in mins.items():
        report.checks[name] = {"min_gap": value, "argmin_seed": argmin_seed}
    report.checks["lutwak_residual_rel"] = {
        "max": max_lutwak[0], "argmax_seed": max_lutwak[1]}
    return report
