"""Ellipsoids, trivial disc bundles over them, and the straightening map Phi.

Conventions: the standard form on C^n is sum dx ^ dy, so the disc bundle
E(a) x D with form pi^* omega + d(|w|^2 alpha), where alpha restricts to
(1/(2k)) d theta on fibers and d alpha = -pi^* omega, has fibers of area pi/k.
The map

    Phi(z, w) = (sqrt(1 - |w|^2) z, exp(i h(z)) w / sqrt(k))

identifies it with the ellipsoid E(a, pi/k), where dh is the base part of
beta = 2k [alpha - (1/(2k)) d theta + sum (|z_i|^2 / 2) d theta_i].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .embedding import BallEmbedding, CapacityError
from .projective import real_coords, standard_form

W_REF = 0.5 + 0.0j  # fiber point at which beta is sampled; beta is fiber independent


class DomainError(ValueError):
    pass


class NonClosedFormError(ValueError):
    """beta failed the loop-integral test, so the supplied alpha is inconsistent."""


@dataclass(frozen=True)
class Ellipsoid:
    caps: tuple[float, ...]

    def __post_init__(self):
        if not self.caps or any(not a > 0 for a in self.caps):
            raise ValueError("ellipsoid capacities must be positive")

    @property
    def dim(self) -> int:
        return len(self.caps)

    @property
    def volume(self) -> float:
        return float(np.prod(self.caps)) / math.factorial(self.dim)

    def gauge(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, complex))
        return np.sum(np.pi * np.abs(z) ** 2 / np.asarray(self.caps), axis=-1)

    def contains(self, z: np.ndarray) -> np.ndarray:
        return self.gauge(z) < 1.0

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        """Volume-uniform interior points."""
        rng = np.random.default_rng(seed)
        n = self.dim
        g = rng.standard_normal((count, 2 * n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        g *= rng.random((count, 1)) ** (1.0 / (2 * n))
        z = g[:, 0::2] + 1j * g[:, 1::2]
        return z * np.sqrt(np.asarray(self.caps) / np.pi)


def canonical_alpha(n: int, k: int) -> Callable:
    """alpha = (1/(2k)) d theta - sum (|z_i|^2 / 2) d theta_i; makes beta = 0."""

    def alpha(z, w):
        z = np.atleast_2d(np.asarray(z, complex))
        w = np.atleast_1d(np.asarray(w, complex))
        out = np.zeros((len(z), 2 * n + 2))
        out[:, 0 : 2 * n : 2] = z.imag / 2
        out[:, 1 : 2 * n : 2] = -z.real / 2
        r2 = np.abs(w) ** 2
        out[:, 2 * n] = -w.imag / (2 * k * r2)
        out[:, 2 * n + 1] = w.real / (2 * k * r2)
        return out

    return alpha


@dataclass(frozen=True)
class DiscBundleModel:
    """Trivial disc bundle over an ellipsoid with a chosen connection form alpha.

    ``alpha(z, w)`` returns real covectors of shape (N, 2n + 2) in the ordering
    (x_1, y_1, ..., x_n, y_n, u, v) with w = u + i v.
    """

    base: Ellipsoid
    k: int = 1
    alpha: Callable | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.alpha is None:
            object.__setattr__(self, "alpha", canonical_alpha(self.base.dim, self.k))

    @property
    def n(self) -> int:
        return self.base.dim

    @property
    def fiber_capacity(self) -> float:
        return np.pi / self.k

    @property
    def target(self) -> Ellipsoid:
        return Ellipsoid(self.base.caps + (self.fiber_capacity,))

    def beta(self, z: np.ndarray, w: complex | np.ndarray = W_REF) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, complex))
        w = np.broadcast_to(np.asarray(w, complex), (len(z),))
        n = self.n
        return 2 * self.k * (self.alpha(z, w) - canonical_alpha(n, self.k)(z, w))

    def form(self, x: np.ndarray) -> np.ndarray:
        """Model symplectic form (1 - |w|^2) omega_base + d|w|^2 ^ alpha on (N, n+1) points."""
        x = np.atleast_2d(np.asarray(x, complex))
        n = self.n
        z, w = x[:, :n], x[:, n]
        S = np.zeros((len(x), 2 * n + 2, 2 * n + 2))
        S[:, : 2 * n, : 2 * n] = standard_form(n)[None] * (1 - np.abs(w) ** 2)[:, None, None]
        dr2 = np.zeros((len(x), 2 * n + 2))
        dr2[:, 2 * n] = 2 * w.real
        dr2[:, 2 * n + 1] = 2 * w.imag
        a = self.alpha(z, w)
        S += dr2[:, :, None] * a[:, None, :] - a[:, :, None] * dr2[:, None, :]
        return S

    def check(self, count: int = 100, seed: int = 0, step: float = 1e-5) -> dict:
        """Fiber restriction of alpha and d alpha + omega_base by finite differences."""
        rng = np.random.default_rng(seed)
        n = self.n
        z = self.base.sample(count, seed)
        w = 0.9 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
        a = self.alpha(z, w)
        r2 = np.abs(w) ** 2
        fib = np.stack([-w.imag, w.real], axis=1) / (2 * self.k * r2[:, None])
        fiber_err = float(np.abs(a[:, 2 * n :] - fib).max())
        X = np.concatenate([real_coords(z), real_coords(w[:, None])], axis=1)
        m = 2 * n + 2
        D = np.zeros((count, m, m))  # D[:, i, j] = d_i alpha_j
        for i in range(m):
            e = np.zeros(m)
            e[i] = step
            Xp, Xm = X + e, X - e
            ap = self.alpha(Xp[:, 0:2 * n:2] + 1j * Xp[:, 1:2 * n:2], Xp[:, 2 * n] + 1j * Xp[:, 2 * n + 1])
            am = self.alpha(Xm[:, 0:2 * n:2] + 1j * Xm[:, 1:2 * n:2], Xm[:, 2 * n] + 1j * Xm[:, 2 * n + 1])
            D[:, i, :] = (ap - am) / (2 * step)
        dalpha = D - D.transpose(0, 2, 1)
        target = np.zeros((m, m))
        target[: 2 * n, : 2 * n] = -standard_form(n)
        d_err = float(np.abs(dalpha - target[None]).max())
        return {"fiber_error": fiber_err, "dalpha_error": d_err}


@dataclass(frozen=True)
class PotentialH:
    """h with dh = beta on the base, h(anchor) = 0, by radial Gauss-Legendre."""

    beta: Callable[[np.ndarray], np.ndarray]
    n: int
    anchor: np.ndarray
    tol: float = 1e-9
    record: dict = field(default_factory=dict, compare=False)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, complex))
        d = z - self.anchor[None, :]
        out = np.zeros(len(z))
        if len(z) == 0:
            return out
        length = np.linalg.norm(d, axis=1)
        nodes = 64 * np.maximum(1, np.ceil(length)).astype(int)
        # each point doubles its own node count until the value settles
        groups = {}
        for i, m in enumerate(nodes):
            groups.setdefault(int(m), []).append(i)
        used = 0
        for m, idx in groups.items():
            idx = np.array(idx)
            prev = self._integrate(d[idx], m)
            while idx.size:
                m *= 2
                cur = self._integrate(d[idx], m)
                done = (np.abs(cur - prev) < self.tol) | (m >= 8192)
                out[idx[done]] = cur[done]
                used = max(used, m)
                idx, prev = idx[~done], cur[~done]
        self.record["nodes"] = used
        return out

    def _integrate(self, d: np.ndarray, nodes: int) -> np.ndarray:
        t, wt = np.polynomial.legendre.leggauss(nodes)
        t = (t + 1) / 2
        wt = wt / 2
        N = len(d)
        pts = self.anchor[None, None, :] + t[None, :, None] * d[:, None, :]
        b = self.beta(pts.reshape(-1, self.n))[:, : 2 * self.n].reshape(N, nodes, 2 * self.n)
        dr = real_coords(d)
        return np.einsum("ntk,nk,t->n", b, dr, wt)


def loop_residual(beta: Callable, n: int, points: np.ndarray, nodes: int = 64) -> np.ndarray:
    """Integral of beta around triangles points[:, 0] -> points[:, 1] -> points[:, 2]."""
    t, wt = np.polynomial.legendre.leggauss(nodes)
    t = (t + 1) / 2
    wt = wt / 2
    total = np.zeros(len(points))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        p, q = points[:, a], points[:, b]
        d = q - p
        pts = p[:, None, :] + t[None, :, None] * d[:, None, :]
        bb = beta(pts.reshape(-1, n))[:, : 2 * n].reshape(len(points), nodes, 2 * n)
        total += np.einsum("ntk,nk,t->n", bb, real_coords(d), wt)
    return total


def solve_h(model: DiscBundleModel, anchor: np.ndarray | None = None,
            loops: int = 100, seed: int = 0, loop_tol: float = 1e-6) -> PotentialH:
    """Integrate beta radially from ``anchor`` (default: base origin).

    Raises ``NonClosedFormError`` if beta integrates to more than ``loop_tol``
    around any of ``loops`` random triangles in the base.
    """
    n = model.n
    anchor = np.zeros(n, complex) if anchor is None else np.asarray(anchor, complex).reshape(n)
    beta = lambda z: model.beta(z)
    tri = model.base.sample(3 * loops, seed).reshape(loops, 3, n)
    res = float(np.abs(loop_residual(beta, n, tri)).max()) if loops else 0.0
    if res > loop_tol:
        raise NonClosedFormError(f"beta is not closed: loop residual {res:.3g}")
    return PotentialH(beta, n, anchor, record={"path": "radial segment", "nodes": 64,
                                                "loop_residual": res})


def phi_map(model: DiscBundleModel, z, w, h: PotentialH | None = None) -> np.ndarray:
    """(z, w) -> (sqrt(1 - |w|^2) z, exp(i h(z)) w / sqrt(k)) into E(a, pi/k)."""
    z = np.atleast_2d(np.asarray(z, complex))
    w = np.atleast_1d(np.asarray(w, complex))
    if np.any(np.abs(w) >= 1):
        raise DomainError("fiber coordinate must satisfy |w| < 1")
    hz = np.zeros(len(z)) if h is None else h(z)
    first = np.sqrt(1 - np.abs(w) ** 2)[:, None] * z
    second = np.exp(1j * hz) * w / np.sqrt(model.k)
    return np.concatenate([first, second[:, None]], axis=1)


def phi_inverse(model: DiscBundleModel, zeta: np.ndarray, h: PotentialH | None = None):
    zeta = np.atleast_2d(np.asarray(zeta, complex))
    n = model.n
    wk = zeta[:, n] * np.sqrt(model.k)
    z = zeta[:, :n] / np.sqrt(1 - np.abs(wk) ** 2)[:, None]
    hz = np.zeros(len(z)) if h is None else h(z)
    return z, wk * np.exp(-1j * hz)


@dataclass(frozen=True)
class PhiEmbedding:
    """Phi packaged as a map on (N, n+1) domain points for defect sweeps."""

    model: DiscBundleModel
    h: PotentialH | None = None
    target: str = "c2"

    def map(self, x):
        x = np.atleast_2d(np.asarray(x, complex))
        return phi_map(self.model, x[:, : self.model.n], x[:, self.model.n], self.h)

    def jacobian(self, x):
        """Analytic Jacobian for h = 0 (canonical alpha)."""
        if self.h is not None:
            raise NotImplementedError("analytic Jacobian only for the canonical model")
        x = np.atleast_2d(np.asarray(x, complex))
        n, k = self.model.n, self.model.k
        z, w = x[:, :n], x[:, n]
        s = np.sqrt(1 - np.abs(w) ** 2)
        J = np.zeros((len(x), n + 1, 2 * n + 2), complex)
        for i in range(n):
            J[:, i, 2 * i] = s
            J[:, i, 2 * i + 1] = 1j * s
            J[:, i, 2 * n] = -z[:, i] * w.real / s
            J[:, i, 2 * n + 1] = -z[:, i] * w.imag / s
        J[:, n, 2 * n] = 1 / np.sqrt(k)
        J[:, n, 2 * n + 1] = 1j / np.sqrt(k)
        return J


def ball_in_ellipsoid(R: float, E: Ellipsoid, strict: bool = True,
                      tol: float = 1e-12) -> BallEmbedding:
    """Identity inclusion B(R) in E; requires pi R^2 <= min capacity."""
    if strict and np.pi * R**2 > min(E.caps) * (1 + tol):
        raise CapacityError(f"pi R^2 = {np.pi * R**2:.6g} exceeds min capacity {min(E.caps):.6g}")
    n = E.dim

    def jac(x):
        J = np.zeros((len(x), n, 2 * n), complex)
        for i in range(n):
            J[:, i, 2 * i], J[:, i, 2 * i + 1] = 1, 1j
        return J

    return BallEmbedding(
        radius=R, map=lambda x: np.asarray(x, complex), jacobian=jac,
        inverse=lambda Z: np.asarray(Z, complex),
        radial=lambda Z: np.linalg.norm(Z, axis=-1), target="c2",
        label=f"B({R:g}) in E{tuple(round(a, 6) for a in E.caps)}", info={"ellipsoid": E},
    )
