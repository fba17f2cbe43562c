"""The conic Q = {z0^2 + z1^2 + z2^2 = 0} and the disc fibration of CP^2 - RP^2 over it.

Every point off RP^2 is uniquely [x + w conj(x)] with x on Q and |w| < 1.
Fiber discs have area pi/2 and Q has area 2pi. Cutting Q into n congruent
lunes between the poles t = 0 and t = oo of the parameterization

    [s : t] -> [s^2 - t^2 : i (s^2 + t^2) : 2 s t]

splits CP^2 - RP^2 into n regions, each a disc bundle with fibers of area
pi/2 over a disc of area 2pi/n, which straightens to E(2pi/n, pi/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .embedding import BallEmbedding, CapacityError, Packing
from .model_spaces import DiscBundleModel, Ellipsoid, PotentialH, solve_h
from .projective import ProjectivePoint, fs_gram

FIBER_AREA = np.pi / 2
QUADRIC_AREA = 2 * np.pi
K_FIBER = 2  # fibers of area pi / k
NEAR_REAL_TOL = 1e-9


class NearRealError(ValueError):
    """The point is (numerically) on RP^2, where the fibration is undefined."""


class ResolutionError(RuntimeError):
    """A quadrature did not converge to the requested tolerance."""


def q_value(Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, complex)
    return np.sum(Z * Z, axis=-1)


def pencil(s, t) -> np.ndarray:
    """Unit representative of [s^2 - t^2 : i (s^2 + t^2) : 2 s t]."""
    s, t = np.broadcast_arrays(np.asarray(s, complex), np.asarray(t, complex))
    n = np.sqrt(np.abs(s) ** 2 + np.abs(t) ** 2)
    with np.errstate(invalid="ignore"):  # NaN parameters stay NaN
        s, t = s / n, t / n
    return np.stack([s * s - t * t, 1j * (s * s + t * t), 2 * s * t], axis=-1) / np.sqrt(2)


def section(t: np.ndarray) -> np.ndarray:
    """Unit lift x(t) of the affine parameter t (pole t = oo excluded)."""
    return pencil(np.ones_like(np.asarray(t, complex)), t)


def pencil_parameter(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized [s : t] of points on Q with s >= 0, robust at both poles."""
    x = np.atleast_2d(np.asarray(x, complex))
    a = np.stack([x[:, 0] - 1j * x[:, 1], x[:, 2]], axis=1)          # ~ (s^2, s t)
    b = np.stack([x[:, 2], -(x[:, 0] + 1j * x[:, 1])], axis=1)       # ~ (s t, t^2)
    use_a = np.linalg.norm(a, axis=1) >= np.linalg.norm(b, axis=1)
    st = np.where(use_a[:, None], a, b)
    st = st / np.linalg.norm(st, axis=1, keepdims=True)
    ph = np.abs(st[:, 0]) / np.where(st[:, 0] == 0, 1, st[:, 0])
    ph = np.where(st[:, 0] == 0, 1, ph)
    return st[:, 0] * ph, st[:, 1] * ph


@dataclass(frozen=True)
class QuadricPoint:
    point: ProjectivePoint
    t: tuple[complex, complex]

    def __post_init__(self):
        if abs(q_value(self.point.vector / np.linalg.norm(self.point.vector))) > 1e-12:
            raise ValueError("point is not on the quadric")

    @property
    def vector(self) -> np.ndarray:
        return self.point.vector / np.linalg.norm(self.point.vector)


@dataclass(frozen=True)
class FiberCoordinates:
    base: QuadricPoint
    w: complex
    s: float

    def __post_init__(self):
        if not abs(self.w) < 1:
            raise ValueError("fiber coordinate must satisfy |w| < 1")

    @property
    def point(self) -> np.ndarray:
        x = self.base.vector
        return x + self.w * np.conj(x)


def quadric_param(t) -> QuadricPoint:
    """Point of Q for a CP^1 parameter, given as ``(s, t)`` or an affine complex t."""
    if isinstance(t, tuple):
        s, tt = complex(t[0]), complex(t[1])
    elif t == np.inf:
        s, tt = 0j, 1 + 0j
    else:
        s, tt = 1 + 0j, complex(t)
    if s == 0 and tt == 0:
        raise ValueError("[0:0] is not a point of CP^1")
    v = np.array([s * s - tt * tt, 1j * (s * s + tt * tt), 2 * s * tt])
    n = np.sqrt(abs(s) ** 2 + abs(tt) ** 2)
    return QuadricPoint(ProjectivePoint(*v), (s / n, tt / n))


def refine_to_quadric(x: np.ndarray) -> np.ndarray:
    """One Newton step on q along conj(x); restores |q| to rounding level."""
    x = np.atleast_2d(np.asarray(x, complex))
    d = np.conj(x)
    qv = q_value(x)
    dq = 2 * np.sum(x * d, axis=-1)
    return x - (qv / np.where(dq == 0, 1, dq))[:, None] * d


def project_arrays(Z: np.ndarray, tol: float = NEAR_REAL_TOL):
    """Vectorized projection: unit x on Q, raw w with Z ~ x + w conj(x).

    Points within ``tol`` of RP^2 get NaN entries instead of raising.
    """
    Z = np.atleast_2d(np.asarray(Z, complex))
    Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True)
    qz = q_value(Z)
    # 1 - |q| / |Z|^2 measures the distance to RP^2
    near = 1 - np.abs(qz) < tol
    disc = np.sqrt(np.clip(1 - np.abs(qz) ** 2, 0, None))
    lam = -qz / (1 + disc)
    x = Z + lam[:, None] * np.conj(Z)
    x = refine_to_quadric(x)
    with np.errstate(invalid="ignore"):  # near-real rows are NaN and masked below
        x = x / np.linalg.norm(x, axis=-1, keepdims=True)
        # Z ~ x - lam conj(x) up to the refinement; read w off the (x, conj x) basis
        c1 = np.sum(np.conj(x) * Z, axis=-1)
        c2 = np.sum(x * Z, axis=-1)  # <conj x, Z>; x and conj x are orthonormal on Q
        w = c2 / np.where(c1 == 0, 1, c1)
    x[near] = np.nan
    w[near] = np.nan
    return x, w


def project_to_quadric(z) -> FiberCoordinates:
    """Fiber coordinates of a projective point off RP^2."""
    Z = z.vector if isinstance(z, ProjectivePoint) else np.asarray(z, complex)
    Z = Z / np.linalg.norm(Z)
    if 1 - abs(q_value(Z)) < NEAR_REAL_TOL:
        raise NearRealError("point lies within 1e-9 of RP^2")
    qz = q_value(Z)
    roots = [(-1.0 + sgn * np.sqrt(1 - abs(qz) ** 2)) / np.conj(qz)
             if qz != 0 else (0j if sgn > 0 else -np.inf) for sgn in (1, -1)]
    good = [lam for lam in roots if np.isfinite(lam) and abs(lam) < 1]
    assert len(good) == 1, "exactly one quadric root must give |w| < 1"
    x, w = project_arrays(Z[None])
    x, w = x[0], complex(w[0])
    s, t = pencil_parameter(x[None])
    base = QuadricPoint(ProjectivePoint(*x), (complex(s[0]), complex(t[0])))
    return FiberCoordinates(base, w, float(normalized_radius(abs(w))))


def fiber_points(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, complex))
    return x + np.asarray(w, complex)[:, None] * np.conj(x)


def _fiber_density(x: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Fubini-Study area density of w -> [x + w conj(x)] at w = rho (per dudv)."""
    rho = np.atleast_1d(np.asarray(rho, float))
    X = np.broadcast_to(x, (len(rho), 3))
    Z = fiber_points(X, rho)
    J = np.stack([np.conj(X), 1j * np.conj(X)], axis=-1)
    return fs_gram(Z, J)[:, 0, 1]


def _quantize(x: np.ndarray) -> tuple:
    x = np.asarray(x, complex)
    x = x * np.exp(-1j * np.angle(x[np.argmax(np.abs(x))]))
    return tuple(np.round(np.r_[x.real, x.imag], 12))


@lru_cache(maxsize=4096)
def _profile_cached(key: tuple, rho: float) -> float:
    x = np.array(key[:3]) + 1j * np.array(key[3:])
    if rho <= 0:
        return 0.0
    # density is rotation invariant in w, so the disc area is a 1-D integral
    val, err = integrate.quad(lambda r: 2 * np.pi * r * _fiber_density(x, r)[0], 0.0, rho,
                              epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-8:
        raise ResolutionError(f"fiber area quadrature error {err:.3g}")
    return float(val)


def fiber_area_profile(x) -> callable:
    """rho -> FS area of {[x + w conj x] : |w| <= rho}, by quadrature."""
    vec = x.vector if isinstance(x, QuadricPoint) else np.asarray(x, complex)
    key = _quantize(vec / np.linalg.norm(vec))
    return lambda rho: _profile_cached(key, float(min(rho, 1.0)))


def profile_radius(x, s: float, tol: float = 1e-10) -> float:
    """Raw fiber radius whose sub-disc has area (pi/2) s^2, by bisection."""
    prof = fiber_area_profile(x)
    target = FIBER_AREA * s * s
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if prof(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# The profile has the closed form pi rho^2 / (1 + rho^2); the vectorized
# constructions below use it, and the tests pin it to the quadrature.
def normalized_radius(rho):
    rho = np.asarray(rho, float)
    return np.sqrt(2 * rho**2 / (1 + rho**2))


def raw_radius(s):
    s = np.asarray(s, float)
    return np.sqrt(s**2 / (2 - s**2))


def _quadric_density(alpha: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """FS area density of the parameterization in (colatitude, longitude)."""
    r = np.tan(alpha / 2)
    t = r * np.exp(1j * phi)
    h = 1e-6
    Z = section(t)
    e = np.exp(1j * phi)
    # derivative of the section along d/dr and d/dphi by central differences
    Jr = (section(t + h * e) - section(t - h * e)) / (2 * h)
    Jp = (section(t * np.exp(1j * h)) - section(t * np.exp(-1j * h))) / (2 * h)
    dens = fs_gram(Z, np.stack([Jr, Jp], axis=-1))[:, 0, 1]
    return dens * 0.5 / np.cos(alpha / 2) ** 2  # dr / d alpha


def quadric_area(phi0: float = 0.0, phi1: float = 2 * np.pi, nphi: int = 16) -> float:
    """FS area of the sector phi0 <= arg t <= phi1 of Q by adaptive quadrature."""
    g, wg = np.polynomial.legendre.leggauss(nphi)
    phis = phi0 + (g + 1) * (phi1 - phi0) / 2
    wts = wg * (phi1 - phi0) / 2

    def inner(a):
        return float(np.sum(wts * _quadric_density(np.full(nphi, a), phis)))

    val, err = integrate.quad(inner, 0.0, np.pi - 1e-12, epsabs=1e-11, epsrel=1e-11, limit=200)
    if err > 1e-7:
        raise ResolutionError(f"quadric area quadrature error {err:.3g}")
    return float(val)


# --- lune coordinates ------------------------------------------------------

def area_coords(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(v, phi): v = |t|^2 / (1 + |t|^2) in [0, 1] and the longitude arg t."""
    s, t = pencil_parameter(x)
    v = np.abs(t) ** 2
    phi = np.angle(t) - np.angle(s)
    return v, phi


def _disc_cdf(X):
    return (X * np.sqrt(np.clip(1 - X * X, 0, None)) + np.arcsin(np.clip(X, -1, 1))) / np.pi + 0.5


def disc_abscissa(v: np.ndarray) -> np.ndarray:
    """Solve F(X) = v on [-1, 1], F the area fraction of the unit disc left of X."""
    v = np.clip(np.asarray(v, float), 0.0, 1.0)
    lo = -np.ones_like(v)
    hi = np.ones_like(v)
    for _ in range(12):
        mid = (lo + hi) / 2
        left = _disc_cdf(mid) < v
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    X = (lo + hi) / 2
    for _ in range(6):
        d = 2 * np.sqrt(np.clip(1 - X * X, 1e-300, None)) / np.pi
        X = np.clip(X - (_disc_cdf(X) - v) / d, lo, hi)
    return X


@dataclass(frozen=True)
class LunePartition:
    """n congruent lunes 2 pi j / n <= arg t <= 2 pi (j + 1) / n between the poles."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two lunes")

    @property
    def boundaries(self) -> tuple[float, ...]:
        return tuple(2 * np.pi * j / self.n for j in range(self.n))

    @property
    def piece_area(self) -> float:
        return QUADRIC_AREA / self.n

    @property
    def disc_radius(self) -> float:
        return float(np.sqrt(2.0 / self.n))

    def piece_areas(self) -> list[float]:
        b = self.boundaries + (2 * np.pi,)
        return [quadric_area(b[j], b[j + 1]) for j in range(self.n)]

    def index(self, x: np.ndarray) -> np.ndarray:
        _, phi = area_coords(x)
        return np.floor(np.mod(phi, 2 * np.pi) * self.n / (2 * np.pi)).astype(int) % self.n

    def lune_u(self, j: int, phi: np.ndarray) -> np.ndarray:
        """Longitude fraction across lune j, extended continuously past its edges."""
        center = 2 * np.pi * (j + 0.5) / self.n
        d = np.angle(np.exp(1j * (phi - center)))
        return 0.5 + d * self.n / (2 * np.pi)

    def to_disc(self, j: int, x: np.ndarray) -> np.ndarray:
        """Area-preserving lune j -> disc of area 2pi/n (complex coordinate)."""
        v, phi = area_coords(x)
        u = self.lune_u(j, phi)
        X = disc_abscissa(v)
        Y = (2 * u - 1) * np.sqrt(np.clip(1 - X * X, 0, None))
        return self.disc_radius * (X + 1j * Y)

    def from_disc(self, j: int, zb: np.ndarray) -> np.ndarray:
        """Inverse of ``to_disc``: the affine parameter t."""
        zb = np.asarray(zb, complex) / self.disc_radius
        X = np.clip(zb.real, -1, 1)
        c = np.sqrt(np.clip(1 - X * X, 0, None))
        u = 0.5 * (zb.imag / np.where(c == 0, 1, c) + 1)
        v = _disc_cdf(X)
        phi = 2 * np.pi * (j + u) / self.n
        r = np.sqrt(v / np.where(v >= 1, np.finfo(float).tiny, 1 - v))
        return r * np.exp(1j * phi)

    def alpha(self, zb: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Connection 1-form of the region over a lune in (disc, fiber) coordinates.

        alpha = (1/4) d theta - (2 pi / n) v du, with theta = arg W.
        """
        zb = np.atleast_2d(np.asarray(zb, complex))[:, 0] / self.disc_radius
        W = np.atleast_1d(np.asarray(W, complex))
        X, Y = zb.real, zb.imag
        c2 = np.clip(1 - X * X, 1e-300, None)
        du_dX = Y * X * c2**-1.5 / 2
        du_dY = c2**-0.5 / 2
        v = _disc_cdf(X)
        coef = -(2 * np.pi / self.n) * v / self.disc_radius
        out = np.zeros((len(zb), 4))
        out[:, 0] = coef * du_dX
        out[:, 1] = coef * du_dY
        r2 = np.abs(W) ** 2
        out[:, 2] = -W.imag / (4 * r2)
        out[:, 3] = W.real / (4 * r2)
        return out

    def model(self) -> DiscBundleModel:
        return DiscBundleModel(Ellipsoid((self.piece_area,)), K_FIBER, self.alpha)

    def h_closed_form(self, zb: np.ndarray) -> np.ndarray:
        """Potential with dh = beta and h(0) = 0, in closed form."""
        z = np.asarray(zb, complex) / self.disc_radius
        X = np.clip(z.real, -1, 1)
        c = np.sqrt(np.clip(1 - X * X, 1e-300, None))
        return -(4.0 / self.n) * (z.imag / c) * (np.pi / 2 + np.arcsin(X))


# --- packings --------------------------------------------------------------

def _lune_ball(part: LunePartition, j: int, R: float, h, strict: bool,
               radius_sq: Fraction | None = None) -> BallEmbedding:
    caps = (part.piece_area, FIBER_AREA)
    if strict and np.pi * R * R > min(caps) * (1 + 1e-12):
        raise CapacityError(f"B({R:g}) does not fit in E{tuple(round(c, 6) for c in caps)}")
    rb = part.disc_radius

    def fmap(zeta):
        zeta = np.atleast_2d(np.asarray(zeta, complex))
        s2 = np.clip(2 * np.abs(zeta[:, 1]) ** 2, 0, 1 - 1e-15)
        zb = zeta[:, 0] / np.sqrt(1 - s2)
        # slightly past the disc the slab map continues smoothly except past the poles
        zb = np.where(np.abs(zb.real) < rb, zb, np.nan)
        W = np.sqrt(2) * zeta[:, 1] * np.exp(-1j * h(zb[:, None]))
        t = part.from_disc(j, zb)
        rho = raw_radius(np.sqrt(s2))
        w = rho * np.exp(1j * np.angle(W))
        return fiber_points(section(t), w)

    def coords(Z):
        x, w = project_arrays(Z)
        bad = ~np.isfinite(w)
        x = np.where(bad[:, None], 1.0, x)
        s_, t_ = pencil_parameter(x)
        # phase of x relative to the section: x = c * section(t)
        xs = pencil(s_, t_)
        c = np.sum(np.conj(xs) * x, axis=1)
        c = c / np.abs(c)
        w = np.where(bad, np.nan, w) * np.conj(c) ** 2
        zb = part.to_disc(j, xs)
        s = normalized_radius(np.abs(w))
        return zb, s, w, bad

    def radial(Z):
        zb, s, _, bad = coords(np.atleast_2d(Z))
        r2 = (1 - s * s) * np.abs(zb) ** 2 + s * s / 2
        return np.where(bad, np.nan, np.sqrt(r2))

    def inverse(Z):
        zb, s, w, bad = coords(np.atleast_2d(Z))
        W = s * np.exp(1j * np.angle(w))
        zeta1 = np.sqrt(1 - s * s) * zb
        zeta2 = np.exp(1j * h(zb[:, None])) * W / np.sqrt(2)
        out = np.stack([zeta1, zeta2], axis=1)
        out[bad] = np.nan
        return out

    sing = ((R, 0j), (-R, 0j)) if np.pi * R * R >= part.piece_area * (1 - 1e-12) else ()
    kind, dist = "pole fibers", None
    if np.pi * R * R >= FIBER_AREA * (1 - 1e-12) and sing:
        # the whole sphere lies over the lune boundary: two discs map to the
        # pole fibers and the circle zeta_1 = 0 to the real locus
        kind = "pole discs"

        def dist(x):
            x = np.atleast_2d(np.asarray(x, complex))
            s2 = np.clip(2 * np.abs(x[:, 1]) ** 2, 0, 1)
            c = np.sqrt(1 - s2)
            return np.minimum(np.minimum(np.abs(x[:, 0] - R * c), np.abs(x[:, 0] + R * c)),
                              R * c)

    return BallEmbedding(
        radius=R, map=fmap, inverse=inverse, radial=radial,
        singular_set=tuple((complex(a), complex(b)) for a, b in sing),
        singular_kind=kind, singular_distance=dist, exact=False,
        label=f"lune {j}/{part.n} ball B({R:.6g})",
        radius_sq=radius_sq, info={"lune": j, "partition": part, "ellipsoid": Ellipsoid(caps)},
    )


@dataclass(frozen=True)
class LunePotential:
    """Closed-form h for the lune model; ``solve_h`` on the same model is the oracle."""

    part: LunePartition

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, complex))
        return self.part.h_closed_form(z[:, 0])

    @property
    def record(self) -> dict:
        return {"path": "closed form", "nodes": 0}


@lru_cache(maxsize=16)
def _lune_potential(n: int, numeric: bool = False) -> PotentialH | LunePotential:
    part = LunePartition(n)
    return solve_h(part.model()) if numeric else LunePotential(part)


def region_membership(part: LunePartition, j: int):
    def member(Z):
        x, w = project_arrays(Z)
        ok = np.isfinite(w)
        idx = np.full(len(ok), -1)
        idx[ok] = part.index(x[ok])
        return idx == j

    return member


def lune_packing(n: int, radius: float | None = None, strict: bool = True,
                 label: str | None = None) -> Packing:
    """n equal balls, one over each lune, each straightened into E(2pi/n, pi/2)."""
    part = LunePartition(n)
    cap = min(part.piece_area, FIBER_AREA)
    R = float(np.sqrt(cap / np.pi)) if radius is None else float(radius)
    r2 = min(Fraction(2, n), Fraction(1, 2)) if radius is None else None
    h = _lune_potential(n)
    balls = tuple(_lune_ball(part, j, R, h, strict, r2) for j in range(n))
    return Packing(
        balls, label=label or f"lune{n}",
        construction_choices=(
            f"{n} congruent lunes between the poles t = 0, oo of the conic",
            "lune -> disc by cumulative-area slabs (equal-area, orientation preserving)",
            "fiber coordinate normalized by sub-disc area",
        ),
        params={"n": n, "radius": R, "strict": strict},
        regions=tuple(region_membership(part, j) for j in range(n)),
    )


def full4_packing(radius: float | None = None, strict: bool = True) -> Packing:
    """Four balls of radius 1/sqrt(2) filling CP^2 up to measure zero."""
    return lune_packing(4, radius, strict, label="full4")


def regular5_packing(radius: float | None = None, strict: bool = True) -> Packing:
    """Five balls of radius sqrt(2/5), each inside E(2pi/5, pi/2)."""
    return lune_packing(5, radius, strict, label="regular5")
