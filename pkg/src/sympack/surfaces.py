"""Where ball boundaries meet, the Hopf-circle graph, and supporting surfaces.

Boundaries of maximal packings touch along arcs of Hopf circles. Circles
shared in full by exactly two balls bound a sphere made of two Hopf discs;
partially shared circles form a graph whose all-black components assemble
into closed surfaces covered by the balls. The arithmetic certificates bound
the degrees and disc multiplicities such surfaces can have.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .characteristics import (HopfCircle, HopfDisc, _direction, hopf_lift, hopf_projection)
from .embedding import Packing

BLACK, RED = "black", "red"


class UndersamplingError(ValueError):
    pass


class RoutingError(ValueError):
    """A circle that is not fully shared by two balls was sent to the sphere constructor."""


# --- boundary sampling -----------------------------------------------------

def hopf_grid(rings: int = 8, per_ring: int = 12) -> np.ndarray:
    """Points of S^2: both poles plus ``rings`` latitude circles of ``per_ring`` points."""
    pts = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    for k in range(1, rings + 1):
        th = np.pi * k / (rings + 1)
        for m in range(per_ring):
            ph = 2 * np.pi * (m + 0.5 * (k % 2)) / per_ring
            pts.append(np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]))
    return np.array(pts)


def boundary_samples(radius: float, resolution: int = 360, rings: int = 8,
                     per_ring: int = 12) -> np.ndarray:
    """Fiber-aligned grid on S^3(radius): (fibers, resolution, 2), angles offset by half a step."""
    base = hopf_lift(hopf_grid(rings, per_ring), radius)
    t = (np.arange(resolution) + 0.5) * 2 * np.pi / resolution
    return np.exp(1j * t)[None, :, None] * base[:, None, :]


@dataclass(frozen=True)
class SharedArc:
    pair: tuple[int, int]           # (ball carrying the circle, partner ball)
    circle: HopfCircle
    indices: np.ndarray = field(repr=False)   # fiber sample indices in the arc
    samples: np.ndarray = field(repr=False)   # domain points of ball pair[0]
    quality: float                  # max boundary residual over the arc
    tangent: bool
    resolution: int = 360
    covered: np.ndarray | None = field(default=None, repr=False)  # incl. excluded singular samples

    @property
    def full(self) -> bool:
        cov = self.covered if self.covered is not None else self.indices
        return len(np.unique(cov)) == self.resolution


def _residual(p: Packing, j: int, Z: np.ndarray) -> np.ndarray:
    rho = p[j].radial(Z)
    return np.abs(np.nan_to_num(rho, nan=np.inf) - p[j].radius)


def _tangency(p: Packing, i: int, j: int, x: np.ndarray, tol: float) -> bool:
    """Characteristic lines of both boundaries agree (as real lines) at the arc samples."""
    bi, bj = p[i], p[j]
    if bj.inverse is None:
        return False
    y = bj.inverse(bi.map(x))
    ok = np.all(np.isfinite(y), axis=1)
    if not ok.any():
        return False
    y = y[ok] * (bj.radius / np.linalg.norm(y[ok], axis=1, keepdims=True))
    di = _direction(bi, x[ok]).image
    dj = _direction(bj, y).image
    Zi = bi.map(x[ok])
    Zj = bj.map(y)
    # compare in a common representative: rescale Zj's tangent to Zi's phase/norm
    lam = np.sum(np.conj(Zj) * Zi, axis=1) / np.sum(np.abs(Zj) ** 2, axis=1)
    dj = dj * lam[:, None]
    n2 = np.sum(np.abs(Zi) ** 2, axis=1)
    di_n = di / np.sqrt(np.sum(np.abs(di) ** 2, axis=1) / n2)[:, None]
    dj_n = dj / np.sqrt(np.sum(np.abs(dj) ** 2, axis=1) / n2)[:, None]
    cos = np.abs(np.sum(np.conj(di_n) * dj_n, axis=1).real / n2)
    perp = np.linalg.norm(dj_n - np.sign(np.sum(np.conj(di_n) * dj_n, axis=1).real)[:, None] * cos[:, None] * di_n, axis=1)
    ang = np.arcsin(np.clip(perp / np.sqrt(n2), 0, 1))
    return bool(np.max(ang) < tol)


def detect_shared_arcs(p: Packing, resolution: int = 360, eps_match: float | None = None,
                       rings: int = 8, per_ring: int = 12, tangency_tol: float = 1e-3,
                       singular_exclusion: float = 0.15, cluster_tol: float = 0.5,
                       contact_tol: float = 1e-6) -> list[SharedArc]:
    """Arcs of Hopf circles of ball i lying (within ``eps_match``) on the boundary of ball j.

    A boundary point of ball i is matched to ball j when the radial function of
    ball j at its image equals r_j within ``eps_match``. Matched fibers whose
    Hopf projections are within ``cluster_tol`` are one circle; the fiber with
    the smallest residual represents it. Samples within ``singular_exclusion * r``
    of a declared singular point are ignored and count as covered. Since the
    residual is an exact distance between boundaries, a cluster is kept only if
    some sample actually touches ball j (residual below ``contact_tol``);
    near misses within ``eps_match`` are discarded.
    """
    if resolution < 360:
        raise UndersamplingError("resolution must be at least 360 samples per fiber")
    arcs: list[SharedArc] = []
    for i, bi in enumerate(p.balls):
        density = 2 * np.pi * bi.radius / resolution
        eps = 3 * density if eps_match is None else eps_match
        if eps < density:
            raise UndersamplingError(f"eps_match {eps:.3g} is below the sampling density {density:.3g}")
        X = boundary_samples(bi.radius, resolution, rings, per_ring)
        F = X.shape[0]
        flat = X.reshape(-1, 2)
        Z = bi.map(flat)
        excluded = bi.near_singular(flat, singular_exclusion * bi.radius).reshape(F, resolution)
        for j in range(len(p)):
            if j == i:
                continue
            res = _residual(p, j, Z).reshape(F, resolution)
            hit = (res < eps) & ~excluded
            fibers = np.flatnonzero(hit.sum(axis=1) >= 3)
            if fibers.size == 0:
                continue
            proj = hopf_projection(X[fibers, 0])
            d = np.linalg.norm(proj[:, None] - proj[None], axis=2)
            A = coo_matrix(d < cluster_tol)
            _, lab = connected_components(A, directed=False)
            for c in np.unique(lab):
                members = fibers[lab == c]
                if min(res[f][hit[f]].min() for f in members) > contact_tol:
                    continue
                score = [np.mean(res[f][hit[f]]) for f in members]
                f = members[int(np.argmin(score))]
                idx = np.flatnonzero(hit[f])
                base = X[f, 0] * np.exp(-1j * np.pi / resolution)
                circle = HopfCircle(i, (complex(base[0]), complex(base[1])), bi.radius)
                arcs.append(SharedArc(
                    (i, j), circle, idx, X[f, idx], float(res[f, idx].max()),
                    _tangency(p, i, j, X[f, idx[:: max(1, len(idx) // 24)]], tangency_tol),
                    resolution, np.flatnonzero(hit[f] | excluded[f]),
                ))
    return arcs


def _same_circle(a: HopfCircle, b: HopfCircle, tol: float = 1e-9) -> bool:
    return a.ball_index == b.ball_index and np.linalg.norm(a.projection - b.projection) < tol


def fully_shared_circles(arcs: list[SharedArc]) -> list[tuple[int, int, HopfCircle]]:
    """Circles shared in full by exactly one partner, reported once per unordered pair."""
    out = []
    for a in arcs:
        i, j = a.pair
        if i > j or not a.full:
            continue
        partners = {b.pair[1] for b in arcs if _same_circle(b.circle, a.circle)}
        back = [b for b in arcs if b.pair == (j, i) and b.full]
        if partners == {j} and back:
            out.append((i, j, a.circle))
    return out


# --- circle graph ----------------------------------------------------------

@dataclass
class CircleGraph:
    vertices: list[HopfCircle]
    colors: list[str]
    edges: set[tuple[int, int]]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"v{k}" for k in range(len(self.vertices))]
        self.edges = {tuple(sorted(e)) for e in self.edges if e[0] != e[1]}

    def neighbors(self, v: int) -> set[int]:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    @property
    def all_black(self) -> bool:
        return all(c == BLACK for c in self.colors)

    def components(self) -> list[list[int]]:
        n = len(self.vertices)
        if n == 0:
            return []
        e = np.array(sorted(self.edges), int).reshape(-1, 2)
        A = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
        _, lab = connected_components(A, directed=False)
        return [list(np.flatnonzero(lab == c)) for c in np.unique(lab)]

    def to_dict(self) -> dict:
        return {
            "vertices": [{"label": l, "ball": v.ball_index, "color": c,
                          "projection": [float(t) for t in v.projection]}
                         for l, v, c in zip(self.labels, self.vertices, self.colors)],
            "edges": [list(map(int, e)) for e in sorted(self.edges)],
        }


def build_circle_graph(arcs: list[SharedArc], p: Packing) -> CircleGraph:
    """Vertices: partially shared circles; edges: circle pairs sharing an arc."""
    routed = fully_shared_circles(arcs)
    skip = [c for i, j, c in routed]
    skip += [b.circle for i, j, c in routed for b in arcs if b.pair == (j, i) and b.full]
    verts: list[HopfCircle] = []
    members: list[list[SharedArc]] = []
    for a in arcs:
        if any(_same_circle(a.circle, s) for s in skip):
            continue
        for k, v in enumerate(verts):
            if _same_circle(v, a.circle):
                members[k].append(a)
                break
        else:
            verts.append(a.circle)
            members.append([a])
    order = sorted(range(len(verts)), key=lambda k: (verts[k].ball_index, tuple(np.round(verts[k].projection, 9))))
    verts = [verts[k] for k in order]
    members = [members[k] for k in order]
    colors = []
    for v, ms in zip(verts, members):
        cov = np.unique(np.concatenate([m.covered for m in ms]))
        colors.append(BLACK if len(cov) == ms[0].resolution else RED)
    edges = set()
    for a_idx, ms in enumerate(members):
        for m in ms:
            i, j = m.pair
            for b_idx, ns in enumerate(members):
                if verts[b_idx].ball_index == j and any(n.pair == (j, i) for n in ns):
                    if _arcs_meet(p, m, next(n for n in ns if n.pair == (j, i))):
                        edges.add((a_idx, b_idx))
    return CircleGraph(verts, colors, edges)


def _arcs_meet(p: Packing, a: SharedArc, b: SharedArc) -> bool:
    Za = p[a.pair[0]].image(a.samples)
    Zb = p[b.pair[0]].image(b.samples)
    ov = np.abs(Za @ np.conj(Zb).T)  # |<Za, Zb>| = 1 iff the same projective point
    spacing = 2 * np.pi / a.resolution
    return bool(np.sqrt(np.clip(1 - ov.max() ** 2, 0, None)) < 3 * spacing)


def reduce_graph(g: CircleGraph, pick: str = "lowest") -> tuple[CircleGraph, list[str]]:
    """Erase red vertices one at a time, turning their neighbours red, until none are left."""
    alive = list(range(len(g.vertices)))
    colors = list(g.colors)
    edges = set(g.edges)
    log: list[str] = []
    n0 = len(alive)
    while True:
        reds = [v for v in alive if colors[v] == RED]
        if not reds:
            break
        v = min(reds) if pick == "lowest" else max(reds)
        nbrs = {b if a == v else a for a, b in edges if v in (a, b)}
        edges = {e for e in edges if v not in e}
        for u in nbrs:
            colors[u] = RED
        alive.remove(v)
        log.append(g.labels[v])
    assert len(log) <= n0
    remap = {v: k for k, v in enumerate(alive)}
    out = CircleGraph([g.vertices[v] for v in alive], [colors[v] for v in alive],
                      {(remap[a], remap[b]) for a, b in edges}, [g.labels[v] for v in alive])
    assert out.all_black
    return out, log


# --- surfaces --------------------------------------------------------------

def _radius_sq(p: Packing, i: int) -> Fraction | float:
    b = p[i]
    return b.radius_sq if b.radius_sq is not None else b.radius**2


@dataclass(frozen=True)
class SupportingSurface:
    discs: tuple[HopfDisc, ...]
    area_over_pi: Fraction | float
    multiplicities: tuple[int, ...]   # discs per ball, indexed by ball
    degree: int | None = None

    @property
    def area(self) -> float:
        return float(self.area_over_pi) * np.pi

    @classmethod
    def hypothetical(cls, degree: int, multiplicities) -> "SupportingSurface":
        return cls((), Fraction(degree), tuple(multiplicities), degree)

    def image_area(self, p: Packing, nodes: int = 16) -> float:
        return float(sum(d.image_area(p[d.circle.ball_index], nodes) for d in self.discs))

    def to_dict(self) -> dict:
        return {"discs": [{"ball": d.circle.ball_index, "base": [[z.real, z.imag] for z in d.circle.base]}
                          for d in self.discs],
                "area_over_pi": str(self.area_over_pi), "area": self.area,
                "multiplicities": list(self.multiplicities), "degree": self.degree}


def _surface(p: Packing, circles: list[HopfCircle]) -> SupportingSurface:
    mult = [0] * len(p)
    total: Fraction | float = Fraction(0)
    for c in circles:
        mult[c.ball_index] += 1
        total = total + _radius_sq(p, c.ball_index)
    deg = None
    if isinstance(total, Fraction) and total.denominator == 1:
        deg = int(total)
    elif abs(float(total) - round(float(total))) < 1e-9:
        deg = int(round(float(total)))
    return SupportingSurface(tuple(HopfDisc(c) for c in circles), total, tuple(mult), deg)


def assemble_surfaces(g: CircleGraph, p: Packing) -> list[SupportingSurface]:
    if not g.all_black:
        raise ValueError("reduce the graph first: red vertices remain")
    return [_surface(p, [g.vertices[v] for v in comp]) for comp in g.components()]


def two_ball_sphere(p: Packing, i: int, j: int, c: HopfCircle,
                    arcs: list[SharedArc] | None = None) -> SupportingSurface:
    """Two Hopf discs glued along a circle shared in full by balls i and j."""
    if c.ball_index not in (i, j):
        raise RoutingError("circle does not belong to either ball")
    if arcs is not None:
        routed = fully_shared_circles(arcs)
        ok = any({a, b} == {i, j} and (_same_circle(cc, c) or a != c.ball_index) for a, b, cc in routed)
        if not ok:
            raise RoutingError("circle is not fully shared by the two balls")
    other = j if c.ball_index == i else i
    partner = None
    if arcs is not None:
        partner = next((a.circle for a in arcs if a.pair == (other, c.ball_index) and a.full), None)
    if partner is None:
        ob = p[other]
        y = ob.inverse(p[c.ball_index].map(np.asarray(c.base)[None]))[0] if ob.inverse else None
        if y is None or not np.all(np.isfinite(y)):
            raise RoutingError("cannot locate the partner circle")
        y = y * (ob.radius / np.linalg.norm(y))
        partner = HopfCircle(other, (complex(y[0]), complex(y[1])), ob.radius)
    return _surface(p, sorted([c, partner], key=lambda h: h.ball_index))


# --- arithmetic certificates -----------------------------------------------

@dataclass(frozen=True)
class DreamRecord:
    degree: int
    k: Fraction
    multiset: tuple[int, ...]
    discs: int
    delta: int
    bound: int


@dataclass(frozen=True)
class DreamCertificate:
    n: int
    r2: Fraction
    d_max: int
    feasible: tuple[DreamRecord, ...]

    @property
    def minimal(self) -> tuple[DreamRecord, ...]:
        if not self.feasible:
            return ()
        d0 = min(r.degree for r in self.feasible)
        return tuple(r for r in self.feasible if r.degree == d0)

    def to_dict(self) -> dict:
        return {"n": self.n, "r2": str(self.r2), "d_max": self.d_max,
                "feasible": [{"degree": r.degree, "k": str(r.k), "multiset": list(r.multiset),
                              "discs": r.discs, "delta": r.delta, "adjunction_bound": r.bound}
                             for r in self.feasible]}


def _partitions(m: int, parts: int, largest: int | None = None):
    """Non-increasing tuples of positive integers summing to m with at most ``parts`` entries."""
    largest = m if largest is None else largest
    if m == 0:
        yield ()
        return
    if parts == 0:
        return
    for k in range(min(m, largest), 0, -1):
        for rest in _partitions(m - k, parts - 1, k):
            yield (k,) + rest


def dream_certificate(n: int, r2, d_max: int) -> DreamCertificate:
    """Degrees d <= d_max and disc multiplicities compatible with area and adjunction.

    A degree-d surface made of Hopf discs of area pi r^2 uses m = d / r^2 discs;
    the ball carrying k discs contributes k (k - 1) / 2 double points, and the
    total delta may not exceed (d - 1)(d - 2) / 2.
    """
    if d_max < 1:
        raise ValueError("d_max must be at least 1")
    if n < 2:
        raise ValueError("need at least two balls")
    r2 = Fraction(r2).limit_denominator(10**6) if not isinstance(r2, Fraction) else r2
    d0 = r2.numerator  # smallest degree with an integral disc count
    recs = []
    for d in range(1, d_max + 1):
        m = Fraction(d) / r2
        if m.denominator != 1:
            continue
        bound = (d - 1) * (d - 2) // 2
        for part in _partitions(int(m), n):
            delta = sum(k * (k - 1) // 2 for k in part)
            if delta <= bound:
                recs.append(DreamRecord(d, Fraction(d, d0), part, int(m), delta, bound))
    return DreamCertificate(n, r2, d_max, tuple(recs))


def uniqueness_count_check(surfaces: list[SupportingSurface]) -> dict:
    """Compare d d' with sum_i k_i k_i' for every pair of distinct surfaces."""
    pairs = []
    for (a, s), (b, t) in itertools.combinations(enumerate(surfaces), 2):
        if s.degree is None or t.degree is None:
            raise ValueError("surfaces must carry a degree")
        product = s.degree * t.degree
        count = sum(x * y for x, y in zip(s.multiplicities, t.multiplicities))
        pairs.append({"pair": [a, b], "homological_product": product,
                      "center_count": count, "contradiction": product != count})
    return {"pairs": pairs, "contradiction": any(q["contradiction"] for q in pairs)}
