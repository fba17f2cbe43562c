"""Deterministic quasi-random sample clouds.

Every cloud is a prefix of a scrambled Sobol sequence keyed by ``seed``, so
regenerating with the same ``(seed, count)`` is bit-identical and the first
``n`` points of a longer cloud equal the cloud of size ``n``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

DEFAULT_SEED = 42


def unit_cube(dim: int, count: int, seed: int) -> np.ndarray:
    """First ``count`` points of a scrambled Sobol sequence in [0, 1)^dim."""
    if count <= 0:
        return np.zeros((0, dim))
    engine = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        pts = engine.random(count)
    # keep strictly inside the open cube
    return np.clip(pts, 1e-15, 1.0 - 1e-15)


def ball_points(r: float, u: np.ndarray, axis_tube: float = 0.0) -> np.ndarray:
    """Map unit-cube points of shape (N, 4) to volume-uniform points of B(r) in C^2.

    Uses that |z_1|^2 / |z|^2 is uniform on S^3; ``axis_tube`` keeps both
    coordinates at relative modulus at least that value.
    """
    rad = r * u[:, 0] ** 0.25
    c = u[:, 1]
    if axis_tube > 0:
        c = axis_tube**2 + (1.0 - 2.0 * axis_tube**2) * c
    z1 = rad * np.sqrt(c) * np.exp(2j * np.pi * u[:, 2])
    z2 = rad * np.sqrt(1.0 - c) * np.exp(2j * np.pi * u[:, 3])
    return np.stack([z1, z2], axis=1)


def sphere_points(r: float, u: np.ndarray, axis_tube: float = 0.0) -> np.ndarray:
    """Uniform points of the sphere S^3(r) from unit-cube points of shape (N, 3)."""
    c = u[:, 0]
    if axis_tube > 0:
        c = axis_tube**2 + (1.0 - 2.0 * axis_tube**2) * c
    z1 = r * np.sqrt(c) * np.exp(2j * np.pi * u[:, 1])
    z2 = r * np.sqrt(1.0 - c) * np.exp(2j * np.pi * u[:, 2])
    return np.stack([z1, z2], axis=1)


def cp2_points(u: np.ndarray) -> np.ndarray:
    """Fubini-Study-uniform points of CP^2 from unit-cube points of shape (N, 4).

    The moment map pushes the Fubini-Study measure to the uniform measure on a
    triangle and the torus angles are uniform, so we sample both directly.
    Returned rows are unit vectors in C^3.
    """
    s = np.sqrt(u[:, 0])
    w0 = 1.0 - s
    w1 = s * (1.0 - u[:, 1])
    w2 = s * u[:, 1]
    z0 = np.sqrt(w0) * np.exp(2j * np.pi * u[:, 2])
    z1 = np.sqrt(w1) * np.exp(2j * np.pi * u[:, 3])
    z2 = np.sqrt(w2).astype(complex)
    return np.stack([z0, z1, z2], axis=1)


@dataclass(frozen=True)
class SampleCloud:
    seed: int
    count: int
    points: np.ndarray = field(repr=False)
    kind: str = "ball"

    @classmethod
    def ball(cls, r: float, count: int, seed: int = DEFAULT_SEED,
             axis_tube: float = 1e-6, shrink: float = 1.0) -> "SampleCloud":
        """Interior samples of B(shrink * r) avoiding a tube around the axes."""
        pts = ball_points(r * shrink, unit_cube(4, count, seed), axis_tube)
        return cls(seed, count, pts, "ball")

    @classmethod
    def sphere(cls, r: float, count: int, seed: int = DEFAULT_SEED,
               axis_tube: float = 1e-6) -> "SampleCloud":
        pts = sphere_points(r, unit_cube(3, count, seed), axis_tube)
        return cls(seed, count, pts, "sphere")

    @classmethod
    def cp2(cls, count: int, seed: int = DEFAULT_SEED) -> "SampleCloud":
        return cls(seed, count, cp2_points(unit_cube(4, count, seed)), "cp2")

    def __len__(self) -> int:
        return self.count
