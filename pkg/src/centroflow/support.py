"""Support-function representation of planar convex bodies.

A body K is stored through n uniform samples of its support function
h(theta) = max_{x in K} <x, u(theta)>, u(theta) = (cos theta, sin theta).
Strict convexity is equivalent to positivity of the curvature function
S = h'' + h (the reciprocal curvature of the boundary as a function of the
outer normal angle), which is evaluated spectrally.  Bodies are immutable;
every operation returns a new body.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import AsymmetricData, GridMismatch, NonConvex, NonPositive

__all__ = [
    "SupportFn",
    "CurvatureFn",
    "GridFn",
    "LinearMap2",
    "make_support_fn",
    "curvature_function",
    "area",
    "perimeter",
    "apply_linear_map",
    "radial_function",
    "scaled",
    "disk",
    "ellipse",
    "CONVEXITY_FLOOR",
    "SYMMETRY_TOL",
]

# relative floors: strict positivity with roundoff headroom
CONVEXITY_FLOOR = 1e-10
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SupportFn:
    """Validated support-function samples on the uniform angular grid.

    Construction enforces the body invariants: positive samples (origin
    interior), positive spectral curvature h'' + h (strict convexity, with a
    roundoff floor of ``CONVEXITY_FLOOR * max h``), and, when ``symmetric``
    is set, agreement of antipodal samples to ``SYMMETRY_TOL * max h``.
    """

    samples: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1:
            raise ValueError("support samples must be a 1-D sequence")
        if x.size < 16 or x.size % 2:
            raise ValueError("grid size must be an even integer >= 16")
        if not np.all(np.isfinite(x)):
            raise ValueError("support samples must be finite")
        hmax = float(np.max(x))
        if np.min(x) <= 0.0:
            raise NonPositive(f"min support sample {np.min(x):.6g} <= 0")
        if self.symmetric:
            half = x.size // 2
            mismatch = float(np.max(np.abs(x - np.roll(x, half))))
            if mismatch > SYMMETRY_TOL * hmax:
                raise AsymmetricData(
                    f"antipodal mismatch {mismatch:.3g} exceeds "
                    f"{SYMMETRY_TOL:g} * max h"
                )
        curv = x + spectral.deriv(x, 2)
        if np.min(curv) <= -CONVEXITY_FLOOR * hmax:
            raise NonConvex(
                f"min curvature {np.min(curv):.6g} at grid node "
                f"{int(np.argmin(curv))}"
            )
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def theta(self) -> np.ndarray:
        return spectral.angles(self.n)


@dataclass(frozen=True)
class CurvatureFn:
    """Samples of a curvature function S = h'' + h, with a scalar weight.

    The represented surface-density is ``weight * samples``.  Positivity is
    enforced; the closure condition (vanishing first harmonics) holds
    automatically for curvature functions of bodies and is exposed through
    :meth:`closure_residual` so candidate densities can be screened.
    """

    samples: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1 or x.size < 16 or x.size % 2:
            raise ValueError("curvature samples must be 1-D with even size >= 16")
        if not np.all(np.isfinite(x)):
            raise ValueError("curvature samples must be finite")
        if np.min(x) <= 0.0 or self.weight <= 0.0:
            raise NonConvex("curvature density must be strictly positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size

    def density(self) -> np.ndarray:
        return self.weight * self.samples

    def closure_residual(self) -> float:
        """max of |integral of density * cos| and |integral of density * sin|."""
        d = self.density()
        th = spectral.angles(self.n)
        w = 2.0 * np.pi / self.n
        return float(
            max(abs(w * np.sum(d * np.cos(th))), abs(w * np.sum(d * np.sin(th))))
        )


@dataclass(frozen=True)
class GridFn:
    """Generic periodic scalar field on the angular grid."""

    samples: np.ndarray

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1 or not np.all(np.isfinite(x)):
            raise ValueError("grid samples must be a finite 1-D sequence")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class LinearMap2:
    """Invertible 2x2 matrix [[a, b], [c, d]] acting on bodies."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if abs(self.det) <= 1e-12:
            raise ValueError(f"map is numerically singular (det={self.det:.3g})")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def is_sl2(self, tol: float = 1e-10) -> bool:
        return abs(self.det - 1.0) <= tol

    def require_sl2(self, tol: float = 1e-10) -> "LinearMap2":
        if not self.is_sl2(tol):
            raise ValueError(f"det={self.det:.12g} is not 1 within {tol:g}")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @classmethod
    def from_array(cls, m) -> "LinearMap2":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "LinearMap2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, phi: float) -> "LinearMap2":
        c, s = np.cos(phi), np.sin(phi)
        return cls(c, -s, s, c)

    @classmethod
    def diagonal(cls, sx: float, sy: float) -> "LinearMap2":
        return cls(sx, 0.0, 0.0, sy)

    def __matmul__(self, other: "LinearMap2") -> "LinearMap2":
        return LinearMap2.from_array(self.as_array() @ other.as_array())

    def inverse(self) -> "LinearMap2":
        return LinearMap2.from_array(np.linalg.inv(self.as_array()))

    def transpose(self) -> "LinearMap2":
        return LinearMap2(self.a, self.c, self.b, self.d)

    def inverse_transpose(self) -> "LinearMap2":
        return self.inverse().transpose()


def make_support_fn(samples, symmetric: bool = False) -> SupportFn:
    """Validated constructor; accepts any 1-D float sequence."""
    return SupportFn(np.asarray(samples, dtype=float), symmetric=symmetric)


def curvature_function(h: SupportFn) -> CurvatureFn:
    """Curvature samples S = h'' + h, computed spectrally."""
    s = h.samples + spectral.deriv(h.samples, 2)
    if np.min(s) <= 0.0:
        raise NonConvex(f"min curvature {np.min(s):.6g} <= 0")
    return CurvatureFn(s)


def _curvature_samples(samples: np.ndarray) -> np.ndarray:
    return samples + spectral.deriv(samples, 2)


def area(h: SupportFn) -> float:
    """Enclosed area, (1/2) * integral of h * (h'' + h) d theta."""
    s = _curvature_samples(h.samples)
    return float(0.5 * (2.0 * np.pi / h.n) * np.dot(h.samples, s))


def perimeter(h: SupportFn) -> float:
    """Boundary length, integral of h d theta."""
    return float((2.0 * np.pi / h.n) * np.sum(h.samples))


def scaled(h: SupportFn, factor: float) -> SupportFn:
    """Dilate by a positive factor about the origin."""
    if factor <= 0.0:
        raise ValueError("scale factor must be positive")
    return SupportFn(factor * h.samples, symmetric=h.symmetric)


def apply_linear_map(h: SupportFn, phi: LinearMap2, oversample: int = 4) -> SupportFn:
    """Image body under an invertible linear map.

    Uses h_{Phi K}(u) = |Phi^T u| * h(angle(Phi^T u)), evaluated through the
    trigonometric interpolant on an oversampled output grid and spectrally
    truncated back to n samples to control aliasing from anisotropic maps.
    """
    n = h.n
    m = oversample * n
    th = spectral.angles(m)
    u = np.vstack([np.cos(th), np.sin(th)])
    w = phi.as_array().T @ u
    r = np.hypot(w[0], w[1])
    psi = np.arctan2(w[1], w[0])
    vals = r * spectral.trig_eval(h.samples, psi)
    out = spectral.resample(vals, n)
    if h.symmetric:
        out = spectral.project_even(out)
    return SupportFn(out, symmetric=h.symmetric)


def radial_function(h: SupportFn) -> GridFn:
    """Radial function rho on the grid, the reciprocal polar support."""
    from .ops import polar_body

    return GridFn(1.0 / polar_body(h).samples)


def disk(radius: float = 1.0, n: int = 256) -> SupportFn:
    """Origin-centered disk."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    return SupportFn(np.full(n, float(radius)), symmetric=True)


def ellipse(a: float, b: float, angle: float = 0.0, n: int = 256) -> SupportFn:
    """Origin-centered ellipse with semi-axes a, b, major axis at ``angle``."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("semi-axes must be positive")
    th = spectral.angles(n) - angle
    hs = np.sqrt((a * np.cos(th)) ** 2 + (b * np.sin(th)) ** 2)
    return SupportFn(hs, symmetric=True)


def check_same_grid(*bodies) -> int:
    """Common grid size of the arguments, or GridMismatch."""
    ns = {b.n for b in bodies}
    if len(ns) != 1:
        raise GridMismatch(f"mixed grid sizes {sorted(ns)}")
    return ns.pop()
