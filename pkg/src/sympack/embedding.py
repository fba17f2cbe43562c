"""Ball embeddings and packings: the objects every verification consumes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .projective import fd_jacobian, fd_projective_jacobian


class CapacityError(ValueError):
    """A ball does not fit: its capacity pi r^2 exceeds what the target allows."""


@dataclass(frozen=True)
class BallEmbedding:
    """A symplectic embedding B(radius) -> CP^2 (or C^k when ``target == 'c2'``).

    ``map`` takes complex domain points (N, 2) to homogeneous vectors (N, 3).
    ``jacobian`` returns (N, 3, 4) w.r.t. real domain coordinates; when absent a
    central finite difference is used. ``radial`` sends image points back to
    the (extended) domain radius of their preimage and ``region`` tests
    membership of image points in the embedded open ball; both may be NaN /
    False outside the construction's chart. When the singular locus is not a
    finite point set, ``singular_distance`` measures the distance to it.
    """

    radius: float
    map: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    inverse: Callable[[np.ndarray], np.ndarray] | None = None
    radial: Callable[[np.ndarray], np.ndarray] | None = None
    singular_set: tuple = ()
    singular_kind: str = "point"
    chart_hint: int = 2
    target: str = "cp2"
    exact: bool = True
    label: str = ""
    radius_sq: Fraction | None = None
    singular_distance: Callable[[np.ndarray], np.ndarray] | None = None
    info: dict = field(default_factory=dict, compare=False)

    def differential(self, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, complex))
        if self.jacobian is not None:
            return self.jacobian(x)
        if self.target == "cp2":
            return fd_projective_jacobian(self.map, x, step)[1]
        return fd_jacobian(self.map, x, step)

    def tangent_map(self, x: np.ndarray, step: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
        """Image representatives Z and a Jacobian J of the same lift."""
        x = np.atleast_2d(np.asarray(x, complex))
        if self.jacobian is not None:
            return self.map(x), self.jacobian(x)
        if self.target == "cp2":
            return fd_projective_jacobian(self.map, x, step)
        return self.map(x), fd_jacobian(self.map, x, step)

    def image(self, x: np.ndarray) -> np.ndarray:
        Z = self.map(np.atleast_2d(np.asarray(x, complex)))
        if self.target == "cp2":
            Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True)
        return Z

    def contains(self, Z: np.ndarray) -> np.ndarray:
        """Membership of image points in the open embedded ball."""
        rho = self.radial(np.atleast_2d(Z))
        with np.errstate(invalid="ignore"):
            return np.nan_to_num(rho, nan=np.inf) < self.radius

    @property
    def volume(self) -> float:
        return np.pi**2 * self.radius**4 / 2

    def near_singular(self, x: np.ndarray, tol: float = 1e-4) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, complex))
        if self.singular_distance is not None:
            return self.singular_distance(x) < tol
        if not self.singular_set:
            return np.zeros(len(x), bool)
        S = np.array(self.singular_set, complex).reshape(-1, 2)
        d = np.linalg.norm(x[:, None, :] - S[None, :, :], axis=-1)
        return d.min(axis=1) < tol


@dataclass(frozen=True)
class Packing:
    balls: tuple[BallEmbedding, ...]
    label: str = ""
    normalization: str = "line-area-pi"
    construction_choices: tuple[str, ...] = ()
    params: dict = field(default_factory=dict, compare=False)
    regions: tuple[Callable, ...] = ()

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def __getitem__(self, i: int) -> BallEmbedding:
        return self.balls[i]

    @property
    def radii(self) -> list[float]:
        return [b.radius for b in self.balls]

    @property
    def fill_fraction(self) -> float:
        return float(sum(r**4 for r in self.radii))


def identity_ball(r: float) -> BallEmbedding:
    """Inclusion B(r) -> C^2 with the standard form; the round-sphere reference."""

    def jac(x):
        J = np.zeros((len(x), 2, 4), complex)
        J[:, 0, 0], J[:, 0, 1], J[:, 1, 2], J[:, 1, 3] = 1, 1j, 1, 1j
        return J

    return BallEmbedding(
        radius=r, map=lambda x: np.asarray(x, complex), jacobian=jac,
        inverse=lambda Z: np.asarray(Z, complex),
        radial=lambda Z: np.linalg.norm(Z, axis=-1),
        target="c2", label=f"identity B({r:g})",
    )


def standard_chart_ball(r: float) -> BallEmbedding:
    """z -> [z1 : z2 : sqrt(1 - |z|^2)], an exact embedding of B(r), r <= 1."""
    if not 0 < r <= 1:
        raise CapacityError(f"radius {r} exceeds the capacity of CP^2 (non-squeezing)")

    def fmap(x):
        x = np.asarray(x, complex)
        t = np.sqrt(np.clip(1.0 - np.sum(np.abs(x) ** 2, axis=-1), 0.0, None))
        return np.stack([x[:, 0], x[:, 1], t.astype(complex)], axis=1)

    def jac(x):
        x = np.asarray(x, complex)
        t = np.sqrt(1.0 - np.sum(np.abs(x) ** 2, axis=-1))
        J = np.zeros((len(x), 3, 4), complex)
        J[:, 0, 0], J[:, 0, 1], J[:, 1, 2], J[:, 1, 3] = 1, 1j, 1, 1j
        re = np.stack([x[:, 0].real, x[:, 0].imag, x[:, 1].real, x[:, 1].imag], axis=1)
        J[:, 2, :] = -re / t[:, None]
        return J

    def inverse(Z):
        Z = np.asarray(Z, complex)
        Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True)
        ph = np.abs(Z[:, 2]) / np.where(Z[:, 2] == 0, 1, Z[:, 2])
        return Z[:, :2] * ph[:, None]

    def radial(Z):
        Z = np.asarray(Z, complex)
        n = np.linalg.norm(Z, axis=-1)
        return np.sqrt(np.clip(1.0 - (np.abs(Z[:, 2]) / n) ** 2, 0.0, None))

    full = r >= 1.0
    return BallEmbedding(
        radius=r, map=fmap, jacobian=jac, inverse=inverse, radial=radial,
        chart_hint=2, label=f"chart ball B({r:g})",
        radius_sq=Fraction(1) if full else None,
        # at r = 1 each boundary Hopf circle collapses to a point of the line Z_2 = 0
        singular_kind="collapsed boundary" if full else "point",
        singular_distance=(lambda x: r - np.linalg.norm(np.atleast_2d(x), axis=-1)) if full else None,
    )
