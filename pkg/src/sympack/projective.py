"""Fubini-Study geometry of CP^2, pullback defects and Monte-Carlo volumes.

Points of CP^2 are rows of complex arrays of shape (N, 3) (homogeneous
coordinates); tangent vectors are representatives in C^3 taken modulo the base
line. Domain points of C^n are complex arrays of shape (N, n) whose real
coordinates are ordered (x_1, y_1, ..., x_n, y_n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sampling import DEFAULT_SEED, SampleCloud, cp2_points, unit_cube

CP2_VOLUME = np.pi**2 / 2


class InvalidPointError(ValueError):
    """Raised for the zero vector, which is not a point of projective space."""


@dataclass(frozen=True)
class ProjectivePoint:
    h0: complex
    h1: complex
    h2: complex

    def __post_init__(self):
        if abs(self.h0) == 0 and abs(self.h1) == 0 and abs(self.h2) == 0:
            raise InvalidPointError("all homogeneous coordinates vanish")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.h0, self.h1, self.h2], dtype=complex)

    def normalize(self) -> "ProjectivePoint":
        """Unit representative whose first nonzero coordinate is real positive."""
        v = canonical(self.vector[None, :])[0]
        return ProjectivePoint(*v)

    def isclose(self, other: "ProjectivePoint", tol: float = 1e-12) -> bool:
        return float(fs_distance(self.vector[None], other.vector[None])[0]) < tol


@dataclass(frozen=True)
class TangentVector:
    base: ProjectivePoint
    v: np.ndarray

    def horizontal(self) -> np.ndarray:
        """Representative with the component along the base line projected out."""
        return horizontal(self.base.vector[None], np.asarray(self.v, complex)[None])[0]


@dataclass
class FormDefect:
    max_abs: float
    argmax_sample: int
    samples: int
    failed: list[int] = field(default_factory=list)

    def __post_init__(self):
        assert self.max_abs >= 0
        assert self.samples == 0 or self.argmax_sample < self.samples


def canonical(Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    norms = np.linalg.norm(Z, axis=-1)
    if np.any(norms == 0):
        raise InvalidPointError("zero homogeneous vector")
    Z = Z / norms[..., None]
    nz = np.abs(Z) > 1e-300
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(Z, first[..., None], axis=-1)
    return Z * (np.abs(lead) / lead)


def horizontal(Z: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Project V orthogonally (Hermitian) off the complex line spanned by Z."""
    n2 = np.sum(np.abs(Z) ** 2, axis=-1)
    coef = np.sum(np.conj(Z) * V, axis=-1) / n2
    return V - coef[..., None] * Z


def fubini_study(p, v, w) -> np.ndarray | float:
    """Fubini-Study form omega(v, w) at p, with lines of area pi.

    Accepts ``ProjectivePoint``/``TangentVector`` objects or arrays of shape
    (..., 3). omega = Im<v', w'> / |p|^2 where primes denote the horizontal
    parts; this is invariant under rescaling p -> c p, v -> c v.
    """
    scalar = isinstance(p, ProjectivePoint)
    if scalar:
        Z = p.vector
        V = v.v if isinstance(v, TangentVector) else np.asarray(v, complex)
        W = w.v if isinstance(w, TangentVector) else np.asarray(w, complex)
    else:
        Z, V, W = (np.asarray(a, complex) for a in (p, v, w))
    n2 = np.sum(np.abs(Z) ** 2, axis=-1)
    if np.any(n2 == 0):
        raise InvalidPointError("zero homogeneous vector")
    Vh = horizontal(Z, V)
    Wh = horizontal(Z, W)
    val = np.sum(np.conj(Vh) * Wh, axis=-1).imag / n2
    return float(val) if scalar else val


def fs_gram(Z: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Matrix omega_FS(J[:, :, a], J[:, :, b]) for image frames J of shape (N, 3, m)."""
    n2 = np.sum(np.abs(Z) ** 2, axis=-1)
    coef = np.einsum("ni,nim->nm", np.conj(Z), J) / n2[:, None]
    Jh = J - Z[:, :, None] * coef[:, None, :]
    return np.einsum("nia,nib->nab", np.conj(Jh), Jh).imag / n2[:, None, None]


def flat_gram(J: np.ndarray) -> np.ndarray:
    """Standard form of C^k evaluated on frames J of shape (N, k, m)."""
    return np.einsum("nia,nib->nab", np.conj(J), J).imag


def standard_form(n: int) -> np.ndarray:
    """sum dx_i ^ dy_i on R^{2n} in the (x_1, y_1, ..., x_n, y_n) ordering."""
    S = np.zeros((2 * n, 2 * n))
    for i in range(n):
        S[2 * i, 2 * i + 1] = 1.0
        S[2 * i + 1, 2 * i] = -1.0
    return S


def fs_distance(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """sin of the Fubini-Study angle between [A] and [B]; chart independent."""
    a = A / np.linalg.norm(A, axis=-1, keepdims=True)
    b = B / np.linalg.norm(B, axis=-1, keepdims=True)
    # norm of the component of b orthogonal to a; avoids the sqrt(1 - c^2) cancellation
    c = np.sum(np.conj(a) * b, axis=-1, keepdims=True)
    return np.linalg.norm(b - c * a, axis=-1)


def affine_chart(Z: np.ndarray, k: int) -> np.ndarray:
    """Coordinates of [Z] in the affine chart {h_k = 1}."""
    Z = np.asarray(Z, complex)
    idx = [i for i in range(3) if i != k]
    return Z[..., idx] / Z[..., k : k + 1]


def chart_point(u: np.ndarray, k: int) -> np.ndarray:
    """Inverse of ``affine_chart``: homogeneous vector with h_k = 1."""
    u = np.asarray(u, complex)
    out = np.ones(u.shape[:-1] + (3,), complex)
    idx = [i for i in range(3) if i != k]
    out[..., idx] = u
    return out


def real_coords(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, complex)
    return np.stack([x.real, x.imag], axis=-1).reshape(x.shape[:-1] + (2 * x.shape[-1],))


def complex_coords(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, float)
    return r[..., 0::2] + 1j * r[..., 1::2]


def _central(g, x: np.ndarray, e: np.ndarray, step: float, order: int) -> np.ndarray:
    if order == 2:
        return (g(x + step * e) - g(x - step * e)) / (2 * step)
    if order == 4:
        return (8 * (g(x + step * e) - g(x - step * e))
                - (g(x + 2 * step * e) - g(x - 2 * step * e))) / (12 * step)
    raise ValueError("order must be 2 or 4")


def fd_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                step: float = 1e-5, order: int = 2) -> np.ndarray:
    """Central-difference Jacobian w.r.t. the real coordinates of complex x (N, n).

    Returns an array of shape (N, m, 2n) where m is the width of f's output.
    """
    x = np.asarray(x, complex)
    n = x.shape[1]
    cols = []
    for a in range(2 * n):
        e = np.zeros(n, complex)
        e[a // 2] = 1.0 if a % 2 == 0 else 1.0j
        cols.append(_central(f, x, e, step, order))
    return np.stack(cols, axis=-1)


def _rephase(Zp: np.ndarray, Z0: np.ndarray) -> np.ndarray:
    # align representatives of nearby points so differences are tangent-like
    ph = np.sum(np.conj(Zp) * Z0, axis=-1)
    return Zp * (ph / np.abs(ph))[:, None]


def fd_projective_jacobian(f, x: np.ndarray, step: float = 1e-5, order: int = 2) -> np.ndarray:
    """Finite-difference Jacobian of a map into CP^2 with phase-aligned representatives."""
    x = np.asarray(x, complex)
    n = x.shape[1]
    # points where the map is undefined come back as NaN rows
    with np.errstate(invalid="ignore"):
        Z0 = f(x)
        Z0 = Z0 / np.linalg.norm(Z0, axis=-1, keepdims=True)

        def unit(y):
            Z = f(y)
            Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True)
            return _rephase(Z, Z0)

        cols = []
        for a in range(2 * n):
            e = np.zeros(n, complex)
            e[a // 2] = 1.0 if a % 2 == 0 else 1.0j
            cols.append(_central(unit, x, e, step, order))
    return Z0, np.stack(cols, axis=-1)


def _safe_eval(fn, x):
    try:
        return fn(x)
    except Exception:
        out = []
        for row in x:
            try:
                out.append(fn(row[None])[0])
            except Exception:
                out.append(None)
        width = next((o.shape for o in out if o is not None), None)
        if width is None:
            raise
        return np.stack([np.full(width, np.nan) if o is None else o for o in out])


def pullback_defect(emb, samples: SampleCloud | np.ndarray, mode: str = "analytic",
                    fd_step: float = 1e-5, target: str | None = None,
                    source_form: Callable | np.ndarray | None = None,
                    fd_order: int = 2) -> FormDefect:
    """Max |phi^* omega_target - omega_source| over samples and real basis pairs.

    ``emb`` needs ``map`` (domain -> homogeneous C^3, or C^k for target 'c2')
    and, for analytic mode, ``jacobian`` returning (N, m, 2n). The source form
    defaults to the standard form; a callable receives the sample array and
    returns (N, 2n, 2n). Samples whose evaluation fails are recorded in
    ``failed`` and skipped.
    """
    x = samples.points if isinstance(samples, SampleCloud) else np.asarray(samples, complex)
    if mode not in ("analytic", "finite-difference", "fd"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "analytic" and not fd_step > 0:
        raise ValueError("fd_step must be positive")
    target = target or getattr(emb, "target", "cp2")
    N, n = x.shape
    if N == 0:
        return FormDefect(0.0, 0, 0)
    if mode == "analytic":
        Z = _safe_eval(emb.map, x)
        J = _safe_eval(emb.jacobian, x)
    elif target == "cp2":
        Z, J = fd_projective_jacobian(lambda y: _safe_eval(emb.map, y), x, fd_step, fd_order)
    else:
        Z = _safe_eval(emb.map, x)
        J = fd_jacobian(lambda y: _safe_eval(emb.map, y), x, fd_step, fd_order)
    bad = ~(np.all(np.isfinite(Z), axis=-1) & np.all(np.isfinite(J), axis=(1, 2)))
    G = np.full((N, 2 * n, 2 * n), np.nan)
    ok = ~bad
    if target == "cp2":
        G[ok] = fs_gram(Z[ok], J[ok])
    else:
        G[ok] = flat_gram(J[ok])
    if source_form is None:
        S = standard_form(n)[None]
    elif callable(source_form):
        S = source_form(x)
    else:
        S = np.asarray(source_form)[None]
    iu = np.triu_indices(2 * n, 1)
    per = np.abs((G - S)[:, iu[0], iu[1]]).max(axis=1)
    per[bad] = -np.inf
    k = int(np.argmax(per))
    m = float(per[k]) if np.isfinite(per[k]) else 0.0
    return FormDefect(m, k, N, failed=[int(i) for i in np.flatnonzero(bad)])


class VolumeEstimate(tuple):
    """``(estimate, stderr)`` pair that also carries the failure tally."""

    def __new__(cls, estimate: float, stderr: float, failures: int = 0):
        self = super().__new__(cls, (float(estimate), float(stderr)))
        self.failures = failures
        return self

    @property
    def estimate(self) -> float:
        return self[0]

    @property
    def stderr(self) -> float:
        return self[1]


def mc_volume(region: Callable[[np.ndarray], np.ndarray], n: int,
              seed: int = DEFAULT_SEED, batch: int = 200_000):
    """Estimate the Fubini-Study volume of ``region`` (a predicate on (N, 3) arrays).

    Returns ``(estimate, stderr)``; samples on which the predicate raises or
    returns NaN count as outside and are tallied in ``.failures``.
    """
    if n < 1000:
        raise ValueError("mc_volume needs n >= 1000")
    pts = cp2_points(unit_cube(4, n, seed))
    hits = 0
    failures = 0
    for i in range(0, n, batch):
        Z = pts[i : i + batch]
        try:
            inside = np.asarray(region(Z))
        except Exception:
            inside = np.zeros(len(Z), bool)
            for j in range(len(Z)):
                try:
                    inside[j] = bool(np.asarray(region(Z[j : j + 1]))[0])
                except Exception:
                    failures += 1
        if inside.dtype != bool:
            nanmask = ~np.isfinite(inside.astype(float))
            failures += int(nanmask.sum())
            inside = np.where(nanmask, False, inside).astype(bool)
        hits += int(inside.sum())
    p = hits / n
    est = CP2_VOLUME * p
    stderr = CP2_VOLUME * np.sqrt(max(p * (1 - p), 0.0) / n)
    return VolumeEstimate(est, stderr, failures)
