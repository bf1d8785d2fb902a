import numpy as np
import pytest
from hypothesis import settings

from centroflow import BodySpec, disk, ellipse, make_support_fn, random_body
from centroflow.spectral import angles

settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def unit_disk():
    return disk(1.0, 256)


@pytest.fixture(scope="session")
def wobble():
    """The canonical mildly non-elliptical body 1 + 0.2 cos(2 theta)."""
    th = angles(256)
    return make_support_fn(1.0 + 0.2 * np.cos(2.0 * th), symmetric=True)


@pytest.fixture(scope="session")
def ellipse_21():
    return ellipse(2.0, 1.0, 0.0, 256)


@pytest.fixture(scope="session")
def mild_bodies():
    """Spectrally well-resolved symmetric test corpus."""
    th = angles(256)
    out = [
        disk(1.0, 256),
        disk(0.7, 256),
        ellipse(1.4, 0.8, 0.3, 256),
        make_support_fn(1.0 + 0.2 * np.cos(2.0 * th), symmetric=True),
        make_support_fn(1.0 + 0.1 * np.cos(2.0 * th) + 0.03 * np.sin(4.0 * th),
                        symmetric=True),
    ]
    out += [random_body(BodySpec(seed=s, mode_count=3, decay=2.0, amplitude=0.3))
            for s in (11, 12, 13)]
    return out


def smoothed_square(n=256, sigma=0.04, pad=0.02):
    """Square support mollified to a bandlimited strictly convex body."""
    th = angles(n)
    hs = np.abs(np.cos(th)) + np.abs(np.sin(th))
    f = np.fft.rfft(hs)
    k = np.arange(n // 2 + 1)
    f *= np.exp(-0.5 * (sigma * k) ** 2)
    return make_support_fn(np.fft.irfft(f, n) + pad, symmetric=True)
