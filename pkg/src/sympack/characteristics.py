"""Characteristic foliations of embedded ball boundaries and digging Hamiltonians.

On the round sphere S^3(r) the characteristic line at x is spanned by i x and
its leaves are the Hopf circles t -> e^{it} x. A symplectic embedding carries
these leaves to the characteristics of the image boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .embedding import BallEmbedding
from .projective import flat_gram, fs_gram, real_coords

TWO_PI = 2 * np.pi


class DegeneracyError(ValueError):
    """The restricted form vanishes on the frame, so there is no characteristic line."""


class ResolutionError(ValueError):
    pass


class GeometryError(RuntimeError):
    """No cover by charts with injective sections could be found."""


class ConstructionInvalidError(RuntimeError):
    """A built Hamiltonian failed its own verification sweep."""


# --- Hopf geometry ---------------------------------------------------------

def hopf_projection(x: np.ndarray) -> np.ndarray:
    """S^3(r) -> unit S^2 in R^3, constant exactly on the circles e^{it} x."""
    x = np.atleast_2d(np.asarray(x, complex))
    a, b = x[:, 0], x[:, 1]
    n2 = np.abs(a) ** 2 + np.abs(b) ** 2
    c = 2 * a * np.conj(b)
    return np.stack([c.real, c.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=1) / n2[:, None]


def hopf_lift(p: np.ndarray, r: float = 1.0) -> np.ndarray:
    """A point of S^3(r) over p in S^2 (phase: first nonzero coordinate real)."""
    p = np.atleast_2d(np.asarray(p, float))
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    up = p[:, 2] > -0.5
    a = np.sqrt((1 + p[:, 2]) / 2)
    b = np.sqrt((1 - p[:, 2]) / 2)
    phase = np.exp(-1j * np.arctan2(p[:, 1], p[:, 0]))
    x_up = np.stack([a + 0j, b * phase], axis=1)
    x_dn = np.stack([a * np.conj(phase), b + 0j], axis=1)
    return r * np.where(up[:, None], x_up, x_dn)


def tangent_frame(x: np.ndarray, kind: str = "projected") -> np.ndarray:
    """Orthonormal real frames (N, 4, 3) of T_x S^3(|x|); the first vector is i x / |x|.

    ``projected`` projects the fixed ambient basis and orthonormalizes;
    ``quaternion`` uses (i x, j x, k x).
    """
    x = np.atleast_2d(np.asarray(x, complex))
    X = real_coords(x)
    nx = np.linalg.norm(X, axis=1, keepdims=True)
    n = X / nx
    ix = real_coords(1j * x) / nx
    if kind == "quaternion":
        jx = np.stack([-np.conj(x[:, 1]), np.conj(x[:, 0])], axis=1)
        J = real_coords(jx) / nx
        K = real_coords(1j * jx) / nx
        return np.stack([ix, J, K], axis=2)
    if kind != "projected":
        raise ValueError(f"unknown frame kind {kind!r}")
    N = len(x)
    frame = np.zeros((N, 4, 3))
    frame[:, :, 0] = ix
    basis = [n, ix]
    cand = np.eye(4)[None].repeat(N, 0)  # (N, 4 vectors, 4 coords)
    for v in basis:
        cand = cand - np.einsum("nkc,nc->nk", cand, v)[:, :, None] * v[:, None, :]
    for col in (1, 2):
        norms = np.linalg.norm(cand, axis=2)
        k = np.argmax(norms, axis=1)
        v = cand[np.arange(N), k] / norms[np.arange(N), k][:, None]
        frame[:, :, col] = v
        cand = cand - np.einsum("nkc,nc->nk", cand, v)[:, :, None] * v[:, None, :]
    return frame


@dataclass(frozen=True)
class HopfCircle:
    ball_index: int
    base: tuple[complex, complex]
    radius: float

    def __post_init__(self):
        if abs(np.linalg.norm(np.asarray(self.base)) - self.radius) > 1e-12 * max(1.0, self.radius):
            raise ValueError("base point must lie on the boundary sphere")

    def points(self, count: int = 360) -> np.ndarray:
        t = np.arange(count) * TWO_PI / count
        return np.exp(1j * t)[:, None] * np.asarray(self.base)[None, :]

    @property
    def projection(self) -> np.ndarray:
        return hopf_projection(np.asarray(self.base)[None])[0]


@dataclass(frozen=True)
class HopfDisc:
    circle: HopfCircle

    @property
    def area(self) -> float:
        return np.pi * self.circle.radius**2

    def domain_points(self, rho: np.ndarray, ang: np.ndarray) -> np.ndarray:
        u = np.asarray(self.circle.base) / self.circle.radius
        return (rho * np.exp(1j * ang))[:, None] * u[None, :]

    def image_area(self, emb: BallEmbedding, nodes: int = 48) -> float:
        """Symplectic area of the embedded disc by polar Gauss-Legendre quadrature."""
        r = self.circle.radius
        g, wg = np.polynomial.legendre.leggauss(nodes)
        rho = (g + 1) * r / 2
        ang = np.arange(2 * nodes) * TWO_PI / (2 * nodes)
        R, A = np.meshgrid(rho, ang, indexing="ij")
        x = self.domain_points(R.ravel(), A.ravel())
        u = np.asarray(self.circle.base) / r
        E = np.stack([real_coords(np.broadcast_to(u, x.shape)),
                      real_coords(np.broadcast_to(1j * u, x.shape))], axis=2)
        dens = _restricted_gram(emb, x, E)[:, 0, 1]
        w = (np.outer(wg * r / 2 * rho, np.full(2 * nodes, TWO_PI / (2 * nodes)))).ravel()
        return float(np.sum(dens * w))


def _restricted_gram(emb: BallEmbedding, x: np.ndarray, E: np.ndarray,
                     J: np.ndarray | None = None, Z: np.ndarray | None = None) -> np.ndarray:
    """Gram array of the target form on the pushforwards of frame vectors E (N, 4, m)."""
    if J is None:
        Z, J = emb.tangent_map(x)
    JE = np.einsum("nik,nkm->nim", J, E.astype(complex))
    if emb.target == "cp2":
        return fs_gram(Z, JE)
    return flat_gram(JE)


# --- characteristic direction ---------------------------------------------

@dataclass(frozen=True)
class CharacteristicDirection:
    """Kernel line of the restricted form: domain vector (N, 4) and image vector."""

    domain: np.ndarray
    image: np.ndarray
    base: np.ndarray
    strength: np.ndarray  # nonzero singular value of the restricted Gram array


def _horizontal_unit(Z: np.ndarray, V: np.ndarray, target: str) -> np.ndarray:
    if target == "cp2":
        n2 = np.sum(np.abs(Z) ** 2, axis=1, keepdims=True)
        V = V - np.sum(np.conj(Z) * V, axis=1, keepdims=True) / n2 * Z
        return V / (np.linalg.norm(V, axis=1, keepdims=True) / np.sqrt(n2))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def characteristic_direction(emb: BallEmbedding, x: np.ndarray, frame: str = "projected",
                             tol: float = 1e-9) -> CharacteristicDirection:
    x = np.atleast_2d(np.asarray(x, complex))
    if np.any(np.abs(np.linalg.norm(x, axis=1) - emb.radius) > tol * max(1.0, emb.radius)):
        raise ValueError("points must lie on the boundary sphere")
    return _direction(emb, x, frame)


def _direction(emb: BallEmbedding, x: np.ndarray, frame: str = "projected",
               step: float = 1e-6) -> CharacteristicDirection:
    E = tangent_frame(x, frame)
    Z, J = emb.tangent_map(x, step)
    G = _restricted_gram(emb, x, E, J, Z)
    # rows where the construction is undefined stay NaN
    ok = np.all(np.isfinite(G), axis=(1, 2))
    S = np.full((len(G), 3), np.nan)
    Vt = np.full((len(G), 3, 3), np.nan)
    if np.any(ok):
        _, S[ok], Vt[ok] = np.linalg.svd(G[ok])
    if np.any(S[ok, 0] < 1e-12):
        raise DegeneracyError("restricted form has rank 0 on the tangent frame")
    c = Vt[:, 2, :]
    dom = np.einsum("nkm,nm->nk", E, c)
    img = np.einsum("nik,nk->ni", J, dom.astype(complex))
    ref = np.einsum("nik,nk->ni", J, real_coords(1j * x).astype(complex))
    sgn = np.sign(np.sum(np.conj(ref) * img, axis=1).real)
    sgn = np.where(sgn == 0, 1.0, sgn)
    dom = dom * sgn[:, None]
    img = _horizontal_unit(Z, img * sgn[:, None], emb.target)
    return CharacteristicDirection(dom, img, Z, S[:, 0])


def preservation_defect(emb: BallEmbedding, x: np.ndarray, step: float = 1e-6) -> float:
    """Max sine of the angle between the image characteristic and the pushed Hopf tangent.

    ``step`` is the finite-difference step used when ``emb`` has no Jacobian.
    """
    return float(np.max(preservation_defects(emb, x, step)))


def preservation_defects(emb: BallEmbedding, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Per-sample sine of the angle in :func:`preservation_defect`."""
    x = np.atleast_2d(np.asarray(x, complex))
    d = _direction(emb, x, step=step)
    _, J = emb.tangent_map(x, step)
    hop = np.einsum("nik,nk->ni", J, real_coords(1j * x).astype(complex))
    hop = _horizontal_unit(d.base, hop, emb.target)
    n2 = np.sum(np.abs(d.base) ** 2, axis=1) if emb.target == "cp2" else np.ones(len(x))
    cos = np.sum(np.conj(hop) * d.image, axis=1).real / n2
    perp = hop - cos[:, None] * d.image
    # sine from the perpendicular part avoids the sqrt(1 - cos^2) rounding floor
    return np.linalg.norm(perp, axis=1) / np.sqrt(n2)


# --- tracing ---------------------------------------------------------------

@dataclass(frozen=True)
class Trace:
    points: np.ndarray  # (steps + 1, 2) domain polyline
    step: float
    return_distance: float
    period: float
    final_point: np.ndarray
    truncated: bool = False

    def image(self, emb: BallEmbedding) -> np.ndarray:
        return emb.image(self.points)


def _velocity(emb: BallEmbedding, x: np.ndarray) -> np.ndarray:
    d = _direction(emb, x, "quaternion").domain
    X = real_coords(x)
    return d * np.linalg.norm(X, axis=1, keepdims=True)


def _to_complex(X: np.ndarray) -> np.ndarray:
    return X[:, 0::2] + 1j * X[:, 1::2]


def trace_characteristic(emb: BallEmbedding, start, step: float = 1e-3,
                         max_steps: int | None = None, singular_tol: float = 1e-4) -> Trace:
    """Fixed-step RK4 along the characteristic field, retracted onto |x| = r."""
    if not step > 0:
        raise ValueError("step must be positive")
    x0 = np.asarray(start, complex).reshape(1, 2)
    r = float(np.linalg.norm(x0))
    if max_steps is None:
        max_steps = int(np.ceil(1.25 * TWO_PI / step))
    X = real_coords(x0)
    pts = [X[0].copy()]
    vel = []
    truncated = False
    for _ in range(max_steps):
        if emb.near_singular(_to_complex(X), singular_tol)[0]:
            truncated = True
            break
        k1 = _velocity(emb, _to_complex(X))
        k2 = _velocity(emb, _to_complex(X + step / 2 * k1))
        k3 = _velocity(emb, _to_complex(X + step / 2 * k2))
        k4 = _velocity(emb, _to_complex(X + step * k3))
        vel.append(k1[0])
        X = X + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        X = X * (r / np.linalg.norm(X))
        pts.append(X[0].copy())
    P = np.array(pts)
    if not truncated:
        vel.append(_velocity(emb, _to_complex(X))[0])
    dist, period = _first_return(P, np.array(vel), step)
    return Trace(_to_complex(P), step, dist, period, _to_complex(P[-1:])[0], truncated)


def _first_return(P: np.ndarray, V: np.ndarray, step: float) -> tuple[float, float]:
    """Closest approach to P[0] after leaving it, refined by cubic Hermite interpolation."""
    d = np.linalg.norm(P - P[0], axis=1)
    far = np.flatnonzero(d > 0.5 * d.max()) if d.max() > 0 else np.array([], int)
    if far.size == 0 or len(V) < len(P):
        return float("nan"), float("nan")
    k0 = far[0]
    k = k0 + int(np.argmin(d[k0:]))
    best, tbest = d[k], k * step
    for a in (k - 1, k):
        if a < k0 or a + 1 >= len(P):
            continue

        def dist(s, a=a):
            h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
            h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
            C = h00 * P[a] + h10 * step * V[a] + h01 * P[a + 1] + h11 * step * V[a + 1]
            return float(np.linalg.norm(C - P[0]))

        res = minimize_scalar(dist, bounds=(0.0, 1.0), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best:
            best, tbest = res.fun, (a + res.x) * step
    return float(best), float(tbest)


def step_order(emb: BallEmbedding, start, divisions=(16, 32, 64), period: float = TWO_PI) -> dict:
    """Observed RK4 order from endpoint errors after one exact period at steps period/N."""
    errs = []
    for N in divisions:
        tr = trace_characteristic(emb, start, step=period / N, max_steps=N)
        errs.append(float(np.linalg.norm(tr.final_point - np.asarray(start))))
    orders = [float(np.log2(errs[i] / errs[i + 1])) for i in range(len(errs) - 1)]
    return {"divisions": list(divisions), "errors": errs, "orders": orders}


# --- compact boundary sets -------------------------------------------------

@dataclass(frozen=True)
class CompactBoundarySet:
    """Samples of a compact subset K of S^3(radius); circles are found, not declared."""

    ball_index: int
    radius: float
    points: np.ndarray = field(repr=False)
    inclusion_tol: float | None = None
    circles: tuple[HopfCircle, ...] = ()

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("K must be non-empty")
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, complex)))
        if self.inclusion_tol is None:
            object.__setattr__(self, "inclusion_tol", float(np.radians(0.75) * self.radius))

    def with_circles(self, circles) -> "CompactBoundarySet":
        return CompactBoundarySet(self.ball_index, self.radius, self.points,
                                  self.inclusion_tol, tuple(circles))


def cluster_by_projection(x: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Labels grouping points with (numerically) equal Hopf projection."""
    p = hopf_projection(x)
    pairs = cKDTree(p).query_pairs(tol, output_type="ndarray")
    n = len(p)
    A = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    return connected_components(A, directed=False)[1]


def contained_circles(K: CompactBoundarySet, resolution_deg: float = 1.0,
                      cluster_tol: float = 1e-6) -> list[HopfCircle]:
    """Hopf circles whose every point (at the given angular resolution) lies in K."""
    if resolution_deg > 1.0:
        raise ResolutionError(f"resolution {resolution_deg} deg is coarser than 1 deg")
    labels = cluster_by_projection(K.points, cluster_tol)
    tree = cKDTree(real_coords(K.points))
    m = int(np.ceil(360.0 / resolution_deg))
    _, first = np.unique(labels, return_index=True)
    reps = K.points[first]
    alive = np.ones(len(reps), bool)
    # coarse rotations first, so most non-saturated clusters drop out after a few queries
    order = np.argsort([_bit_reverse(k, m) for k in range(m)], kind="stable")
    for k in order:
        if not np.any(alive):
            break
        d, _ = tree.query(real_coords(np.exp(1j * k * TWO_PI / m) * reps[alive]))
        alive[np.flatnonzero(alive)[d > K.inclusion_tol]] = False
    out = []
    for rep in reps[alive]:
        base = rep * (K.radius / np.linalg.norm(rep))
        out.append(HopfCircle(K.ball_index, (complex(base[0]), complex(base[1])), K.radius))
    return out


def _bit_reverse(k: int, m: int) -> float:
    """Van der Corput position of k / m, spreading consecutive indices around the circle."""
    x, f, v = 0.0, 0.5, k
    while v:
        x += f * (v & 1)
        v >>= 1
        f /= 2
    return x


# --- digging Hamiltonian ---------------------------------------------------

def _smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1 - s, 1)), 0.0)
    return a / (a + b)


def _bump(d: np.ndarray, radius: float) -> np.ndarray:
    """Smooth bump of a distance: 1 for d <= radius / 2, 0 for d >= radius."""
    return 1.0 - _smooth_step(2 * d / radius - 1)


@dataclass(frozen=True)
class LocalChart:
    center: np.ndarray        # point of S^2
    lift: np.ndarray          # unit lift of the center
    gap_end: float            # fiber angle where the charted interval starts
    length: float             # length of the charted interval

    def fiber_angle(self, x: np.ndarray) -> np.ndarray:
        """Angle of x relative to the phase-aligned local section."""
        p = hopf_projection(x)
        s = hopf_lift(p)
        c = np.sum(np.conj(s) * self.lift[None, :], axis=1)
        s = s * (c / np.abs(c))[:, None]
        r = np.linalg.norm(x, axis=1)
        return np.angle(np.sum(np.conj(s) * x, axis=1) / r)

    def h(self, x: np.ndarray) -> np.ndarray:
        """-t on the charted interval, closed up smoothly across the gap."""
        t = np.mod(self.fiber_angle(x) - self.gap_end, TWO_PI)
        gap = TWO_PI - self.length
        return -t + TWO_PI * _smooth_step((t - self.length) / gap)


@dataclass(frozen=True)
class DiggingHamiltonian:
    radius: float
    charts: tuple[LocalChart, ...]
    support: float
    circle_points: np.ndarray     # projections of the saturated circles
    theta_scale: float = 0.2
    margin: float = float("nan")
    circle_gradient: float = 0.0

    def theta(self, p: np.ndarray) -> np.ndarray:
        out = np.ones(len(p))
        for c in self.circle_points:
            d2 = np.sum((p - c[None, :]) ** 2, axis=1)
            out *= 1.0 - np.exp(-d2 / self.theta_scale**2)
        return out

    def weights(self, p: np.ndarray) -> np.ndarray:
        psi = np.stack([_bump(np.linalg.norm(p - ch.center[None, :], axis=1), self.support)
                        for ch in self.charts], axis=1)
        denom = psi.sum(axis=1) + np.prod(1 - psi, axis=1)
        return psi / denom[:, None]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, complex))
        p = hopf_projection(x)
        out = np.zeros(len(x))
        if self.charts:
            W = self.weights(p)
            for a, ch in enumerate(self.charts):
                on = W[:, a] > 0
                if np.any(on):
                    out[on] += W[on, a] * ch.h(x[on])
        return self.theta(p) * out


def hopf_derivative(H: Callable, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """dH(i x): derivative of H along t -> e^{it} x."""
    x = np.atleast_2d(np.asarray(x, complex))
    return (H(np.exp(1j * eps) * x) - H(np.exp(-1j * eps) * x)) / (2 * eps)


def sphere_gradient_norm(H: Callable, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """|dH| on T S^3 by central differences along an orthonormal frame (retracted)."""
    x = np.atleast_2d(np.asarray(x, complex))
    r = np.linalg.norm(x, axis=1, keepdims=True)
    E = tangent_frame(x, "quaternion")
    g2 = np.zeros(len(x))
    for k in range(3):
        v = E[:, :, k]
        v = v[:, 0::2] + 1j * v[:, 1::2]
        xp, xm = x + eps * r * v, x - eps * r * v
        xp *= r / np.linalg.norm(xp, axis=1, keepdims=True)
        xm *= r / np.linalg.norm(xm, axis=1, keepdims=True)
        g2 += ((H(xp) - H(xm)) / (2 * eps * r[:, 0])) ** 2
    return np.sqrt(g2)


def _greedy_net(p: np.ndarray, delta: float) -> np.ndarray:
    centers = []
    uncovered = np.ones(len(p), bool)
    while np.any(uncovered):
        i = int(np.flatnonzero(uncovered)[0])
        centers.append(p[i])
        uncovered &= np.linalg.norm(p - p[i], axis=1) > delta
    return np.array(centers)


def _largest_gap(angles: np.ndarray) -> tuple[float, float]:
    """(start, length) of the largest empty arc among circle angles."""
    a = np.sort(np.mod(angles, TWO_PI))
    gaps = np.diff(np.r_[a, a[0] + TWO_PI])
    i = int(np.argmax(gaps))
    return float(a[i]), float(gaps[i])


def build_digging_hamiltonian(K: CompactBoundarySet, circles: list[HopfCircle] | None = None,
                              delta: float = 0.3, min_delta: float = 0.01,
                              min_gap: float = np.radians(10.0)) -> DiggingHamiltonian:
    """H with dH(i x) < 0 on K minus its saturated circles and dH = 0 on the circles."""
    circles = contained_circles(K) if circles is None else list(circles)
    cproj = np.array([c.projection for c in circles]).reshape(-1, 3)
    on_circle = np.zeros(len(K.points), bool)
    if len(cproj):
        pk = hopf_projection(K.points)
        dmin = np.min(np.linalg.norm(pk[:, None, :] - cproj[None, :, :], axis=2), axis=1)
        on_circle = dmin < 1e-6
    rest = K.points[~on_circle]
    prest = hopf_projection(rest) if len(rest) else np.zeros((0, 3))
    charts: list[LocalChart] = []
    d = delta
    while len(rest):
        support = 1.5 * d
        centers = _greedy_net(prest, d)
        charts = []
        ok = True
        for c in centers:
            near = np.linalg.norm(prest - c[None, :], axis=1) < support
            lift = hopf_lift(c[None])[0]
            probe = LocalChart(c, lift, 0.0, TWO_PI)
            ang = probe.fiber_angle(rest[near])
            start, gap = _largest_gap(ang)
            if gap < min_gap:
                ok = False
                break
            pad = 0.1 * gap
            charts.append(LocalChart(c, lift, start + gap - pad, TWO_PI - gap + 2 * pad))
        if ok:
            break
        d /= 2
        if d < min_delta:
            raise GeometryError("fiber angles of K fill whole circles at every cover scale")
    H = DiggingHamiltonian(K.radius, tuple(charts), 1.5 * d, cproj)
    margin = float(np.min(-hopf_derivative(H, rest))) if len(rest) else float("inf")
    cgrad = float(np.max(sphere_gradient_norm(H, K.points[on_circle]))) if on_circle.any() else 0.0
    H = DiggingHamiltonian(K.radius, H.charts, H.support, cproj, margin=margin, circle_gradient=cgrad)
    if not margin > 0 or not cgrad < 1e-6:
        raise ConstructionInvalidError(f"sweep failed: margin {margin:.3g}, |dH| on circles {cgrad:.3g}")
    return H


def digging_sign(H: Callable, emb: BallEmbedding, x, eps: float = 1e-6, zero_tol: float = 1e-12) -> int:
    """Sign of dH on the oriented characteristic direction at the boundary point x."""
    x = np.asarray(x, complex).reshape(1, 2)
    r = np.linalg.norm(x)
    v = _direction(emb, x).domain[0]
    v = (v[0::2] + 1j * v[1::2]) * r
    xp = (x + eps * v) * (r / np.linalg.norm(x + eps * v))
    xm = (x - eps * v) * (r / np.linalg.norm(x - eps * v))
    dH = float((H(xp)[0] - H(xm)[0]) / (2 * eps))
    return 0 if abs(dH) < zero_tol else int(np.sign(dH))
