"""FFT calculus for 2*pi-periodic samples on a uniform grid.

An array of n real values is identified with the trigonometric interpolant
through the points theta_j = 2*pi*j/n.  Differentiation, resampling,
low-pass filtering and pointwise evaluation are exact for bandlimited data
(all spectral mass strictly below the Nyquist wavenumber n/2), and the
derivative of the Nyquist mode follows the usual convention: zeroed for odd
orders, kept with multiplier (-1)^(order/2) * k^order for even orders.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "angles",
    "deriv",
    "fourier_coeffs",
    "from_coeffs",
    "trig_eval",
    "resample",
    "low_pass",
    "rotate",
    "project_even",
    "tail_fraction",
    "refine_periodic_max",
    "refine_periodic_min",
]


def angles(n: int) -> np.ndarray:
    """Grid angles theta_j = 2*pi*j/n."""
    return (2.0 * np.pi / n) * np.arange(n)


def deriv(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of the given order."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    f = np.fft.rfft(x)
    k = np.arange(n // 2 + 1, dtype=float)
    f *= (1j * k) ** order
    if order % 2:
        f[-1] = 0.0  # Nyquist mode of odd derivatives is ambiguous
    return np.fft.irfft(f, n)


def fourier_coeffs(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real coefficients (a, b) of the interpolant, each of length n//2 + 1.

    The interpolant is ``a[0] + sum_k a[k] cos(k t) + b[k] sin(k t)``;
    ``b[0]`` and ``b[n//2]`` are identically zero.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    f = np.fft.rfft(x)
    a = 2.0 * f.real / n
    b = -2.0 * f.imag / n
    a[0] = f[0].real / n
    a[-1] = f[-1].real / n
    b[0] = 0.0
    b[-1] = 0.0
    return a, b


def from_coeffs(a: np.ndarray, b: np.ndarray, n: int | None = None) -> np.ndarray:
    """Synthesize grid samples from real coefficients (inverse of fourier_coeffs)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if n is None:
        n = 2 * (a.size - 1)
    m = n // 2 + 1
    f = np.zeros(m, dtype=complex)
    kmax = min(a.size, m)
    f[:kmax] = (n / 2.0) * (a[:kmax] - 1j * b[:kmax])
    f[0] = n * a[0]
    if a.size >= m:
        f[-1] = n * a[m - 1]
    return np.fft.irfft(f, n)


def trig_eval(samples: np.ndarray, theta) -> np.ndarray | float:
    """Evaluate the trigonometric interpolant at arbitrary angles."""
    a, b = fourier_coeffs(samples)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(1, a.size)
    arg = k[:, None] * th[None, :]
    out = a[0] + a[1:] @ np.cos(arg) + b[1:] @ np.sin(arg)
    return out if np.ndim(theta) else float(out[0])


def resample(samples: np.ndarray, m: int) -> np.ndarray:
    """Resample onto an m-point grid by zero-padding or truncating the spectrum."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if m == n:
        return x.copy()
    f = np.fft.rfft(x)
    if m > n:
        g = np.zeros(m // 2 + 1, dtype=complex)
        g[: n // 2 + 1] = f
        g[n // 2] = 0.5 * f[n // 2]  # source Nyquist becomes an interior cosine mode
    else:
        g = f[: m // 2 + 1].copy()
        g[-1] = 0.0
    return np.fft.irfft(g * (m / n), m)


def low_pass(samples: np.ndarray, kmax: int) -> np.ndarray:
    """Zero all modes with wavenumber above kmax."""
    x = np.asarray(samples, dtype=float)
    f = np.fft.rfft(x)
    f[kmax + 1 :] = 0.0
    return np.fft.irfft(f, x.size)


def rotate(samples: np.ndarray, phi: float) -> np.ndarray:
    """Samples of f(theta - phi) for the interpolant f."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    f = np.fft.rfft(x)
    nyquist = f[-1].real
    k = np.arange(n // 2 + 1)
    f *= np.exp(-1j * k * phi)
    # the rotated Nyquist mode has an unrepresentable sine part; keep the cos part
    f[-1] = nyquist * np.cos((n // 2) * phi)
    return np.fft.irfft(f, n)


def project_even(samples: np.ndarray) -> np.ndarray:
    """Project onto pi-periodic (origin-symmetric) functions: zero odd modes."""
    x = np.asarray(samples, dtype=float)
    f = np.fft.rfft(x)
    f[1::2] = 0.0
    return np.fft.irfft(f, x.size)


def tail_fraction(samples: np.ndarray, kmax: int | None = None) -> float:
    """Fraction of non-constant spectral energy above kmax (default n//4).

    Diagnostic for whether the grid resolves the data: trustworthy inputs
    should report a tiny value.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if kmax is None:
        kmax = n // 4
    f = np.fft.rfft(x)
    power = np.abs(f) ** 2
    total = power[1:].sum()
    if total == 0.0:
        return 0.0
    return float(power[kmax + 1 :].sum() / total)


def _parabola_vertex(fm, f0, fp):
    """Offset (in grid units, in [-1/2, 1/2]-ish) and value of the vertex of the
    parabola through three consecutive samples."""
    denom = fm - 2.0 * f0 + fp
    if denom == 0.0:
        return 0.0, f0
    delta = 0.5 * (fm - fp) / denom
    value = f0 - 0.125 * (fm - fp) ** 2 / denom
    return delta, value


def refine_periodic_max(values: np.ndarray) -> tuple[float, float]:
    """(position_in_grid_units, value) of the max, parabola-refined."""
    v = np.asarray(values, dtype=float)
    j = int(np.argmax(v))
    delta, val = _parabola_vertex(v[j - 1], v[j], v[(j + 1) % v.size])
    return j + delta, val


def refine_periodic_min(values: np.ndarray) -> tuple[float, float]:
    """(position_in_grid_units, value) of the min, parabola-refined."""
    pos, val = refine_periodic_max(-np.asarray(values, dtype=float))
    return pos, -val
