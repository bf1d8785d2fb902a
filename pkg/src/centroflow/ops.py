"""Affinely associated bodies and functionals.

Polar, centroid, projection and curvature-image bodies, the mixed volume,
the Fourier curvature-prescription solver, and Steiner symmetrization.

The centroid and projection bodies integrate |<u, v>| against a density on
the circle.  That kernel has kinks, so a plain Riemann sum is only
second-order accurate; instead the integral is carried out exactly on the
trigonometric interpolant of the density, which makes it a diagonal
multiplier in Fourier space:

    integral |cos(psi - phi)| e^{i k psi} d psi
        = e^{i k phi} * 4 (-1)^(k/2 + 1) / (k^2 - 1)     (k even)
        = 0                                              (k odd)

with value 4 at k = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import (
    AsymmetricData,
    ClosureViolated,
    NonConvex,
    NonConvexSolution,
    NonPositive,
)
from .support import (
    CurvatureFn,
    SupportFn,
    area,
    check_same_grid,
    curvature_function,
    make_support_fn,
)

__all__ = [
    "polar_area",
    "polar_body",
    "centroid_body",
    "projection_body",
    "mixed_volume",
    "MinkowskiSolution",
    "minkowski_solve",
    "curvature_image",
    "steiner_symmetrize",
    "lutwak_identity_check",
]


def _require_symmetric(h: SupportFn, op: str) -> None:
    if not h.symmetric:
        raise AsymmetricData(f"{op} requires an origin-symmetric body")


def polar_area(h: SupportFn) -> float:
    """Area of the polar body, (1/2) * integral of h^-2 d theta."""
    return float(0.5 * (2.0 * np.pi / h.n) * np.sum(h.samples ** -2))


def _polar_samples(samples: np.ndarray, n_out: int, oversample: int = 8) -> np.ndarray:
    """Support samples of the polar body on an n_out uniform grid.

    The polar body is the convex hull of the points u(t)/h(t); its support
    function is the max over t of cos(t - phi)/h(t).  The max is located on
    an oversampled grid, refined by a parabola through the three samples
    around the argmax, and the refined objective is evaluated exactly
    through the trigonometric interpolant of h.
    """
    n = samples.size
    m = oversample * n
    hh = spectral.resample(samples, m)
    th = spectral.angles(m)
    phi = spectral.angles(n_out)
    fvals = np.cos(th[None, :] - phi[:, None]) / hh[None, :]
    j = np.argmax(fvals, axis=1)
    rows = np.arange(n_out)
    f0 = fvals[rows, (j - 1) % m]
    f1 = fvals[rows, j]
    f2 = fvals[rows, (j + 1) % m]
    denom = f0 - 2.0 * f1 + f2
    delta = np.where(denom != 0.0, 0.5 * (f0 - f2) / np.where(denom == 0, 1, denom), 0.0)
    t_hat = th[j] + delta * (2.0 * np.pi / m)
    h_at = spectral.trig_eval(samples, t_hat)
    return np.cos(t_hat - phi) / h_at


def polar_body(h: SupportFn, oversample: int = 8) -> SupportFn:
    """Polar (dual) body K* = {x : <x, y> <= 1 for all y in K}."""
    out = _polar_samples(h.samples, h.n, oversample)
    return SupportFn(out, symmetric=h.symmetric)


# --- |cos| kernel as a Fourier multiplier -----------------------------------

def _abs_cos_multipliers(num_modes: int) -> np.ndarray:
    k = np.arange(num_modes)
    lam = np.zeros(num_modes)
    lam[0] = 4.0
    even = k[2::2]
    lam[2::2] = 4.0 * (-1.0) ** (even // 2 + 1) / (even ** 2 - 1.0)
    return lam


def _abs_cos_transform(density: np.ndarray) -> np.ndarray:
    """Grid samples of integral |cos(psi - phi)| g(psi) d psi, exact for the
    interpolant of g.  Odd modes drop out, so the result is symmetric."""
    f = np.fft.rfft(density)
    f *= _abs_cos_multipliers(f.size)
    return np.fft.irfft(f, density.size)


# the polar support of a mildly convex body decays slowly; evaluating the
# downstream integrals on a denser internal grid keeps its tail from
# aliasing into the low modes of the results
DENSE_FACTOR = 4


def centroid_samples_from_polar(polar_dense: np.ndarray, v_body: float,
                                n_out: int) -> np.ndarray:
    """Centroid-body support on the n_out grid from dense polar samples."""
    rho = 1.0 / polar_dense
    dense = _abs_cos_transform(rho ** 3) / (3.0 * v_body)
    return spectral.resample(dense, n_out)


def centroid_body(h: SupportFn) -> SupportFn:
    """Centroid body: support = (1/3V) * integral of |<u, v>| rho(v)^3 d v."""
    _require_symmetric(h, "centroid_body")
    polar_dense = _polar_samples(h.samples, DENSE_FACTOR * h.n)
    out = centroid_samples_from_polar(polar_dense, area(h), h.n)
    return SupportFn(out, symmetric=True)


def projection_body(h: SupportFn) -> SupportFn:
    """Projection body: support = (1/2) * integral of |<u, v>| S(v) d v.

    For symmetric bodies this equals the body rotated a quarter turn and
    doubled, which the multiplier reproduces exactly.
    """
    s = curvature_function(h).samples
    out = 0.5 * _abs_cos_transform(s)
    return SupportFn(out, symmetric=True)


def mixed_volume(h_k: SupportFn, h_l: SupportFn) -> float:
    """V(K, L) = (1/2) * integral of h_L dS_K; symmetric in its arguments."""
    check_same_grid(h_k, h_l)
    s_k = curvature_function(h_k).samples
    return float(0.5 * (2.0 * np.pi / h_k.n) * np.dot(h_l.samples, s_k))


@dataclass(frozen=True)
class MinkowskiSolution:
    """Solution of the curvature prescription h'' + h = f.

    ``residual`` is the sup-norm of h'' + h - f; ``translation_modes_removed``
    are the (cos, sin) first-harmonic coefficients of f that were dropped to
    fix the translation gauge.
    """

    h: SupportFn
    residual: float
    translation_modes_removed: tuple[float, float]


# first-harmonic mass beyond this (relative) fraction of max f is rejected
CLOSURE_RTOL = 1e-6


def minkowski_solve(f, symmetric: bool | None = None) -> MinkowskiSolution:
    """Solve h'' + h = f for the support function of a convex body.

    Diagonal in Fourier space: h_k = f_k / (1 - k^2) for k != 1.  The
    first harmonic of f must vanish (closure of the boundary curve); the
    first harmonic of h is set to zero, fixing the body up to translation.

    Accepts a CurvatureFn or a raw sample array.
    """
    if isinstance(f, CurvatureFn):
        density = f.density()
    else:
        density = np.asarray(f, dtype=float)
        if density.ndim != 1 or not np.all(np.isfinite(density)):
            raise ValueError("curvature density must be a finite 1-D sequence")
        if np.min(density) <= 0.0:
            raise NonConvex("curvature density must be strictly positive")
    n = density.size
    spec = np.fft.rfft(density)
    fmax = float(np.max(np.abs(density)))
    a1 = 2.0 * spec[1].real / n
    b1 = -2.0 * spec[1].imag / n
    if np.hypot(a1, b1) > CLOSURE_RTOL * fmax:
        raise ClosureViolated(
            f"first-harmonic amplitude {np.hypot(a1, b1):.3g} exceeds "
            f"{CLOSURE_RTOL:g} * max f"
        )
    k = np.arange(n // 2 + 1, dtype=float)
    mult = np.zeros_like(k)
    mult[0] = 1.0
    mult[2:] = 1.0 / (1.0 - k[2:] ** 2)
    hvals = np.fft.irfft(spec * mult, n)
    if symmetric is None:
        half = n // 2
        symmetric = bool(
            np.max(np.abs(hvals - np.roll(hvals, half)))
            <= 1e-12 * max(1.0, np.max(np.abs(hvals)))
        )
    try:
        body = SupportFn(hvals, symmetric=symmetric)
    except (NonConvex, NonPositive) as exc:
        raise NonConvexSolution(str(exc)) from exc
    resid = float(
        np.max(np.abs(hvals + spectral.deriv(hvals, 2) - density))
    )
    return MinkowskiSolution(h=body, residual=resid,
                             translation_modes_removed=(a1, b1))


def curvature_image(h: SupportFn) -> SupportFn:
    """Curvature-image body: the body whose surface density is
    (V(K)/V(K*)) * h^-3."""
    _require_symmetric(h, "curvature_image")
    weight = area(h) / polar_area(h)
    sol = minkowski_solve(weight * h.samples ** -3, symmetric=True)
    return sol.h


# --- Steiner symmetrization ---------------------------------------------------

def _boundary_xy(samples: np.ndarray, th: np.ndarray):
    """Boundary point and its abscissa derivative at given normal angles."""
    hv = spectral.trig_eval(samples, th)
    hp = spectral.trig_eval(spectral.deriv(samples, 1), th)
    x = hv * np.cos(th) - hp * np.sin(th)
    y = hv * np.sin(th) + hp * np.cos(th)
    return x, y


def steiner_symmetrize(h: SupportFn, axis_angle: float, oversample: int = 8) -> SupportFn:
    """Steiner symmetral about the line through the origin at ``axis_angle``.

    Chords perpendicular to the axis are re-centered on it.  The body is
    rotated so the axis is horizontal, dense chord endpoints are matched by
    Newton iteration on the boundary parametrization (x is strictly monotone
    along each chain since dx/dtheta = -S sin theta), the support function is
    rebuilt as a refined vertex supremum, and the result is smoothed by
    spectral truncation to n/4 modes before rotating back.
    """
    n = h.n
    m = oversample * n
    work = spectral.rotate(h.samples, -axis_angle)

    th_up = spectral.angles(m)[1 : m // 2]  # upper chain, normals pointing up
    x_up, y_up = _boundary_xy(work, th_up)

    # lower chain sampled densely; x is monotone increasing there
    th_dense = np.pi + spectral.angles(2 * m) * 0.5
    th_dense = th_dense[1:-1]
    x_dense, _ = _boundary_xy(work, th_dense)

    # initial matching angles by inverse interpolation, then Newton
    idx = np.clip(np.searchsorted(x_dense, x_up), 1, x_dense.size - 1)
    frac = (x_up - x_dense[idx - 1]) / (x_dense[idx] - x_dense[idx - 1])
    th_lo = th_dense[idx - 1] + frac * (th_dense[idx] - th_dense[idx - 1])

    hder = spectral.deriv(work, 1)
    hdd = spectral.deriv(work, 2)
    for _ in range(6):
        hv = spectral.trig_eval(work, th_lo)
        hp = spectral.trig_eval(hder, th_lo)
        hpp = spectral.trig_eval(hdd, th_lo)
        x_lo = hv * np.cos(th_lo) - hp * np.sin(th_lo)
        dx = -(hv + hpp) * np.sin(th_lo)
        th_lo = np.clip(th_lo - (x_lo - x_up) / dx,
                        np.pi + 1e-12, 2.0 * np.pi - 1e-12)
    hv = spectral.trig_eval(work, th_lo)
    hp = spectral.trig_eval(hder, th_lo)
    y_lo = hv * np.sin(th_lo) + hp * np.cos(th_lo)

    half_width = 0.5 * (y_up - y_lo)
    # end vertices of the axis: chords degenerate to points there
    x_right, _ = _boundary_xy(work, np.array([0.0]))
    x_left, _ = _boundary_xy(work, np.array([np.pi]))
    xs = np.concatenate([x_right, x_up, x_left])
    ws = np.concatenate([[0.0], half_width, [0.0]])

    phi = spectral.angles(n)
    proj = xs[None, :] * np.cos(phi)[:, None] + ws[None, :] * np.abs(np.sin(phi))[:, None]
    j = np.argmax(proj, axis=1)
    rows = np.arange(n)
    interior = (j >= 1) & (j <= xs.size - 2)
    jc = np.clip(j, 1, xs.size - 2)
    f0, f1, f2 = proj[rows, jc - 1], proj[rows, jc], proj[rows, jc + 1]
    denom = f0 - 2.0 * f1 + f2
    safe = np.where(denom == 0.0, 1.0, denom)
    vertex = f1 - 0.125 * (f0 - f2) ** 2 / safe
    new_h = np.where(interior & (denom != 0.0), vertex, proj[rows, j])

    out = spectral.low_pass(new_h, n // 4)
    if h.symmetric:
        out = spectral.project_even(out)
    out = spectral.rotate(out, axis_angle)
    return SupportFn(out, symmetric=h.symmetric)


@dataclass(frozen=True)
class PolarChain:
    """Quantities derived from one dense-grid polar computation.

    ``polar_dense`` holds support samples of K* on a ``DENSE_FACTOR`` finer
    grid; the areas are evaluated with the same dense quadrature so that the
    discrete deficit ``v_lambda_star - v_star`` inherits the exact-arithmetic
    sign guarantee of the mixed-volume inequality.
    """

    polar_dense: np.ndarray
    v_star: float          # V(K*)
    v_dstar: float         # V(K**), from the dense polar samples
    lambda_dense: np.ndarray  # support of Lambda K* on the dense grid
    v_lambda_star: float   # V(Lambda K*)


def polar_chain(h: SupportFn, factor: int = DENSE_FACTOR,
                polar_dense: np.ndarray | None = None) -> PolarChain:
    """Polar body, its curvature image, and their areas on a dense grid."""
    _require_symmetric(h, "polar_chain")
    m = factor * h.n
    p = _polar_samples(h.samples, m) if polar_dense is None else polar_dense
    m = p.size
    w = 2.0 * np.pi / m
    sp = p + spectral.deriv(p, 2)
    v_star = float(0.5 * w * np.dot(p, sp))
    v_dstar = float(0.5 * w * np.sum(p ** -2))
    f = (v_star / v_dstar) * p ** -3
    spec = np.fft.rfft(f)
    k = np.arange(m // 2 + 1, dtype=float)
    mult = np.zeros_like(k)
    mult[0] = 1.0
    mult[2:] = 1.0 / (1.0 - k[2:] ** 2)
    lam = np.fft.irfft(spec * mult, m)
    s_lam = lam + spectral.deriv(lam, 2)
    v_lam = float(0.5 * w * np.dot(lam, s_lam))
    return PolarChain(polar_dense=p, v_star=v_star, v_dstar=v_dstar,
                      lambda_dense=lam, v_lambda_star=v_lam)


def lutwak_identity_check(h: SupportFn) -> float:
    """Sup-norm residual of the identity relating the centroid body to the
    projection of the curvature image of the polar body:

        h_{Gamma K} = (2 / (3 V(K*))) * h_{Pi Lambda K*}
    """
    _require_symmetric(h, "lutwak_identity_check")
    gamma = centroid_body(h)
    chain = polar_chain(h)
    s_lam = chain.lambda_dense + spectral.deriv(chain.lambda_dense, 2)
    pi_dense = 0.5 * _abs_cos_transform(s_lam)
    rhs = (2.0 / (3.0 * chain.v_star)) * spectral.resample(pi_dense, h.n)
    return float(np.max(np.abs(gamma.samples - rhs)))
