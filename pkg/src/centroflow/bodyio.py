"""Body JSON serialization.

Two interchangeable on-disk forms are accepted:

    {"n": 256, "h": [h_0, ..., h_{n-1}], "symmetric": true}
    {"n": 256, "fourier": {"a": [a_0, a_1, ...], "b": [b_1, ...]},
     "symmetric": true}

Writers always emit the grid form.  Loading validates the body, so a
non-convex file is rejected at the boundary.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from . import spectral
from .support import SupportFn, make_support_fn

__all__ = ["body_to_dict", "body_from_dict", "load_body", "save_body",
           "sha256_of_file", "atomic_write_text"]


def body_to_dict(h: SupportFn) -> dict:
    return {
        "n": int(h.n),
        "h": [float(v) for v in h.samples],
        "symmetric": bool(h.symmetric),
    }


def body_from_dict(data: dict) -> SupportFn:
    if "h" in data:
        samples = np.asarray(data["h"], dtype=float)
        if "n" in data and int(data["n"]) != samples.size:
            raise ValueError("n does not match the number of samples")
    elif "fourier" in data:
        n = int(data["n"])
        coeffs = data["fourier"]
        a_in = np.asarray(coeffs.get("a", []), dtype=float)
        b_in = np.asarray(coeffs.get("b", []), dtype=float)
        a = np.zeros(n // 2 + 1)
        b = np.zeros(n // 2 + 1)
        a[: a_in.size] = a_in
        b[1: 1 + b_in.size] = b_in  # b starts at the first harmonic
        samples = spectral.from_coeffs(a, b, n)
    else:
        raise ValueError("body JSON needs an 'h' or 'fourier' field")
    return make_support_fn(samples, symmetric=bool(data.get("symmetric", False)))


def load_body(path) -> SupportFn:
    with open(path, "r", encoding="utf-8") as fh:
        return body_from_dict(json.load(fh))


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so failures leave no partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_body(h: SupportFn, path) -> None:
    atomic_write_text(path, json.dumps(body_to_dict(h)) + "\n")


def sha256_of_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
