"""Moment-map constructions on CP^2: corner triangles, toric balls, Karshon packings.

Action coordinates are mu_j = |Z_j|^2 / (2 |Z|^2) for j = 0, 1, so the moment
image of CP^2 is the Delzant triangle {mu_1, mu_2 >= 0, mu_1 + mu_2 <= 1/2}
and a ball of radius r corresponds to a corner triangle with legs r^2 / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .embedding import BallEmbedding, CapacityError, Packing, standard_chart_ball
from .projective import fd_projective_jacobian

HALF = Fraction(1, 2)
AMBIENT = ((Fraction(0), Fraction(0)), (HALF, Fraction(0)), (Fraction(0), HALF))

# Delzant corner charts. Columns are the edge directions leaving the vertex.
CORNERS = {
    (Fraction(0), Fraction(0)): ((1, 0), (0, 1)),
    (HALF, Fraction(0)): ((-1, 0), (-1, 1)),
    (Fraction(0), HALF): ((1, -1), (0, -1)),
}


class ContainmentError(ValueError):
    """The corner triangle is degenerate or leaves the Delzant triangle."""


def moment_map(Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, complex)
    n2 = np.sum(np.abs(Z) ** 2, axis=-1)
    return np.stack([np.abs(Z[:, 0]) ** 2, np.abs(Z[:, 1]) ** 2], axis=1) / (2 * n2[:, None])


def _in_ambient(p) -> bool:
    return p[0] >= 0 and p[1] >= 0 and p[0] + p[1] <= HALF


@dataclass(frozen=True)
class MomentTriangle:
    """Image triangle vertex + leg * A * simplex, A integral with det +-1.

    ``A`` is given as its two columns, i.e. the primitive edge vectors.
    """

    vertex: tuple
    A: tuple
    leg: Fraction | float

    def __post_init__(self):
        M = self.matrix
        det = round(np.linalg.det(M))
        if abs(det) != 1 or not np.allclose(M, np.round(M)):
            raise ContainmentError(f"corner matrix {self.A} is not in GL(2, Z)")
        if not self.leg > 0:
            raise ContainmentError("degenerate triangle: leg must be positive")
        for p in self.vertices:
            if not _in_ambient(p):
                raise ContainmentError(f"vertex {p} lies outside the Delzant triangle")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, float).T

    @property
    def vertices(self) -> tuple:
        v = tuple(Fraction(c) if isinstance(c, (int, Fraction)) else c for c in self.vertex)
        a, b = self.A
        L = self.leg
        return (v, (v[0] + L * a[0], v[1] + L * a[1]), (v[0] + L * b[0], v[1] + L * b[1]))

    @property
    def radius(self) -> float:
        return float(np.sqrt(2 * float(self.leg)))

    @property
    def radius_sq(self) -> Fraction | None:
        return 2 * self.leg if isinstance(self.leg, Fraction) else None

    def local_actions(self, mu: np.ndarray) -> np.ndarray:
        """Domain actions m = A^{-1} (mu - vertex)."""
        v = np.array([float(c) for c in self.vertex])
        return (mu - v) @ np.linalg.inv(self.matrix).T

    def point_actions(self, Z: np.ndarray) -> np.ndarray:
        """Domain actions of points [Z], read off the vanishing coordinates.

        Each domain action of a corner chart is one of |Z_j|^2 / (2|Z|^2), so
        this avoids the cancellation of :meth:`local_actions` near the axes.
        """
        Z = np.asarray(Z, complex)
        mu3 = np.abs(Z) ** 2 / (2 * np.sum(np.abs(Z) ** 2, axis=-1, keepdims=True))
        A3 = np.vstack([self.matrix, -self.matrix.sum(axis=0)])
        v = [float(c) for c in self.vertex]
        v3 = np.array(v + [0.5 - sum(v)])
        cols = []
        for k in range(2):
            e = np.eye(2)[k]
            j = next(j for j in range(3) if np.allclose(A3[j], e) and v3[j] == 0)
            cols.append(mu3[:, j])
        return np.stack(cols, axis=1)


def corner_triangle(corner: int, leg) -> MomentTriangle:
    """Corner 0, 1, 2 = vertices (0,0), (1/2,0), (0,1/2) of the ambient triangle."""
    v = AMBIENT[corner]
    return MomentTriangle(v, CORNERS[v], leg)


def toric_ball(tri: MomentTriangle) -> BallEmbedding:
    """Exact action-angle embedding of B(sqrt(2 leg)) onto a corner triangle.

    mu = A m + vertex on actions and theta = A^{-T} phi on angles; both
    preserve sum d mu ^ d theta. The Jacobian is exact away from the axes.
    """
    A = tri.matrix
    Ainv = np.linalg.inv(A)
    B = np.round(Ainv.T).astype(int)  # angle map theta = B phi
    AT = np.round(A.T).astype(int)    # inverse angle map phi = A^T theta
    v = np.array([float(c) for c in tri.vertex])
    # third action as its own integral row, avoiding 1 - 2 sum(mu) cancellation
    A3 = np.vstack([A, -A.sum(axis=0)])
    v3 = np.append(v, 0.5 - v.sum())
    r = tri.radius

    def fmap(x):
        x = np.asarray(x, complex)
        m = np.abs(x) ** 2 / 2
        mu = m @ A.T + v
        u = x / np.where(np.abs(x) == 0, 1, np.abs(x))
        u = np.where(np.abs(x) == 0, 1, u)
        e = np.ones((len(x), 2), complex)
        for j in range(2):
            for k in range(2):
                e[:, j] *= u[:, k] ** B[j, k] if B[j, k] >= 0 else np.conj(u[:, k]) ** (-B[j, k])
        amp = np.sqrt(np.clip(2 * mu, 0, None))
        last = np.sqrt(np.clip(2 * (m @ A3[2] + v3[2]), 0, None))
        return np.stack([amp[:, 0] * e[:, 0], amp[:, 1] * e[:, 1], last.astype(complex)], axis=1)

    def jac(x):
        x = np.asarray(x, complex)
        Z = fmap(x)
        m = np.abs(x) ** 2 / 2
        mu = m @ A.T + v
        N = len(x)
        x = np.where(np.abs(x) == 0, 1e-300, x)  # axis rows are replaced below
        dm = np.zeros((N, 2, 4))
        dphi = np.zeros((N, 2, 4))
        for k in range(2):
            xr, yr = x[:, k].real, x[:, k].imag
            dm[:, k, 2 * k], dm[:, k, 2 * k + 1] = xr, yr
            n2 = xr**2 + yr**2
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                dphi[:, k, 2 * k], dphi[:, k, 2 * k + 1] = -yr / n2, xr / n2
        dmu = np.einsum("jk,nka->nja", A, dm)
        dth = np.einsum("jk,nka->nja", B, dphi)
        J = np.zeros((N, 3, 4), complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            J = _angle_jacobian(J, Z, dmu, dth, mu)
        # the angle formulas are singular on the axes, where the map itself is smooth
        # (and so is the real last coordinate where it vanishes)
        axis = (np.min(np.abs(x), axis=1) < 1e-6) | (np.abs(Z[:, 2]) < 1e-6)
        if np.any(axis):
            J[axis] = fd_projective_jacobian(fmap, x[axis], 1e-7)[1]
        return J

    # chart coordinate that never vanishes on this corner's triangle
    center = {(0.0, 0.0): 2, (0.5, 0.0): 0, (0.0, 0.5): 1}[tuple(float(c) for c in tri.vertex)]
    C = np.zeros((2, 3), int)  # phi_k = sum_j C[k, j] arg(Z_j / Z_center)
    C[:, :2] = AT
    C[:, 2] = -AT.sum(axis=1)

    def inverse(Z):
        Z = np.asarray(Z, complex)
        m = tri.point_actions(Z)
        ref = np.conj(Z[:, center:center + 1])
        ph = Z * ref
        ab = np.abs(ph)
        ph = np.where(ab > 0, ph / np.where(ab > 0, ab, 1), 1.0)
        e = np.ones((len(Z), 2), complex)
        for k in range(2):
            for j in range(3):
                p = C[k, j]
                e[:, k] *= ph[:, j] ** p if p >= 0 else np.conj(ph[:, j]) ** (-p)
        return np.sqrt(np.clip(2 * m, 0, None)) * e

    def radial(Z):
        m = tri.point_actions(Z)
        out = np.sqrt(np.clip(2 * m.sum(axis=1), 0, None))
        return np.where(m.min(axis=1) < -1e-12, np.inf, out)

    return BallEmbedding(
        radius=r, map=fmap, jacobian=jac, inverse=inverse, radial=radial,
        label=f"toric ball at {tuple(float(c) for c in tri.vertex)} leg {float(tri.leg):g}",
        radius_sq=tri.radius_sq, info={"triangle": tri},
    )


def _angle_jacobian(J, Z, dmu, dth, mu):
    for j in range(2):
        J[:, j, :] = Z[:, j, None] * (dmu[:, j, :] / (2 * mu[:, j, None]) + 1j * dth[:, j, :])
    J[:, 2, :] = -(dmu[:, 0, :] + dmu[:, 1, :]) / Z[:, 2, None].real
    return J


def triangles_disjoint(t1: MomentTriangle, t2: MomentTriangle) -> bool:
    """Exact separating-axis test for disjoint interiors (touching allowed)."""
    P, Q = t1.vertices, t2.vertices
    for poly in (P, Q):
        for i in range(3):
            a, b = poly[i], poly[(i + 1) % 3]
            nx, ny = b[1] - a[1], a[0] - b[0]
            dp = [nx * p[0] + ny * p[1] for p in P]
            dq = [nx * q[0] + ny * q[1] for q in Q]
            if max(dp) <= min(dq) or max(dq) <= min(dp):
                return True
    return False


def karshon_packing(kind: str, r1: float | Fraction | None = None) -> Packing:
    """Karshon's maximal packings: ``two_balls`` with radii (r1, sqrt(1 - r1^2)),
    ``three_balls`` with three radii 1/sqrt(2), or ``one_ball`` (the full ball).
    """
    if kind == "two_balls":
        if r1 is None or not 0 < float(r1) < 1:
            raise ValueError(f"two_balls needs 0 < r1 < 1, got {r1}")
        if isinstance(r1, Fraction):
            l1 = r1 * r1 / 2
        else:
            l1 = float(r1) ** 2 / 2
        tris = [corner_triangle(0, l1), corner_triangle(1, HALF - l1)]
        label = f"karshon2:{float(r1):g}"
    elif kind == "three_balls":
        tris = [corner_triangle(c, Fraction(1, 4)) for c in range(3)]
        label = "karshon3"
    elif kind == "one_ball":
        ball = standard_chart_ball(1.0)
        return Packing((ball,), label="full1")
    else:
        raise ValueError(f"unknown Karshon packing {kind!r}")
    for t1, t2 in combinations(tris, 2):
        if not triangles_disjoint(t1, t2):
            raise CapacityError("corner triangles overlap")
    return Packing(tuple(toric_ball(t) for t in tris), label=label,
                   params={"kind": kind, "r1": None if r1 is None else float(r1)})
