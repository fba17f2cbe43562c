"""Packing files, verification suites and deterministic JSON reports.

Every float is written with 17 significant digits so a report parses back to
the same bits. Wall times and the timestamp live under ``volatile``, which is
left out of :func:`determinism_hash`.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .characteristics import preservation_defects
from .embedding import CapacityError, Packing, standard_chart_ball
from .obstructions import maximality_check, volume_obstruction
from .projective import CP2_VOLUME, mc_volume, pullback_defect
from .quadric import (FIBER_AREA, LunePartition, _lune_ball, _lune_potential, fiber_area_profile,
                      lune_packing, quadric_area, quadric_param)
from .sampling import DEFAULT_SEED, SampleCloud
from .toric import corner_triangle, karshon_packing, toric_ball

SCHEMA = 1
EXAMPLES = ("karshon2", "karshon3", "full1", "full4", "regular5")
STATUSES = ("pass", "fail", "skipped")

DEFAULT_TOLERANCES = {
    "pullback_analytic": 1e-8,
    "pullback_fd": 1e-4,
    "disjointness": 1e-9,
    "volume_sigma": 3.0,
    "volume_abs": 5e-3,
    "fiber_area": 1e-5,
    "quadric_area": 1e-5,
    "preservation": 1e-6,
}


class PackingFileError(ValueError):
    """A packing file is missing, malformed or names an unknown example."""


def env_seed(flag: int | None = None) -> int:
    """The CLI flag wins over SYMPACK_SEED, which wins over the default."""
    if flag is not None:
        return int(flag)
    raw = os.environ.get("SYMPACK_SEED")
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


# --- JSON with fixed float precision ---------------------------------------

def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits (non-finite -> null)."""
    return _emit(_plain(obj), indent, 0) + "\n"


def write_json(path: str, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def determinism_hash(doc: dict) -> str:
    stable = {k: v for k, v in doc.items() if k != "volatile"}
    return hashlib.sha256(dumps(stable).encode()).hexdigest()


# --- packing files ---------------------------------------------------------

def build_packing(example: str, r1: float | None = None, radii=None) -> Packing:
    """Construct a named example; ``radii`` overrides the radii without capacity checks."""
    if example not in EXAMPLES:
        raise PackingFileError(f"unknown example {example!r}; choose from {', '.join(EXAMPLES)}")
    if example == "karshon2":
        r1 = 0.8 if r1 is None else r1
        if isinstance(r1, str):
            r1 = Fraction(r1)
        base = karshon_packing("two_balls", r1)
    elif example == "karshon3":
        base = karshon_packing("three_balls")
    elif example == "full1":
        base = karshon_packing("one_ball")
    elif example == "full4":
        base = lune_packing(4, label="full4")
    else:
        base = lune_packing(5, label="regular5")
    if radii is None or np.allclose(radii, base.radii, rtol=0, atol=0):
        return base
    if len(radii) != len(base):
        raise PackingFileError(f"{example} has {len(base)} balls, got {len(radii)} radii")
    balls = []
    for j, (b, r) in enumerate(zip(base, radii)):
        r = float(r)
        if r == b.radius:
            balls.append(b)
        elif example in ("karshon2", "karshon3"):
            tri = b.info["triangle"]
            corner = [k for k in range(3) if corner_triangle(k, Fraction(1, 4)).vertex == tri.vertex][0]
            balls.append(toric_ball(corner_triangle(corner, r * r / 2)))
        elif example == "full1":
            balls.append(standard_chart_ball(r))
        else:
            part = b.info["partition"]
            balls.append(_lune_ball(part, j, r, _lune_potential(part.n), strict=False))
    return Packing(tuple(balls), label=base.label + ":modified",
                   construction_choices=base.construction_choices,
                   params=dict(base.params), regions=base.regions)


def packing_document(p: Packing, example: str, seed: int, r1=None) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "packing",
        "version": __version__,
        "example": example,
        "label": p.label,
        "r1": r1 if r1 is None or isinstance(r1, str) else float(r1),
        "seed": seed,
        "normalization": p.normalization,
        "radii": [float(r) for r in p.radii],
        "radius_sq": [None if b.radius_sq is None else str(b.radius_sq) for b in p],
        "balls": [{"label": b.label, "singular_kind": b.singular_kind,
                   "singular_set": [[complex(z) for z in pt] for pt in b.singular_set]} for b in p],
        "construction_choices": list(p.construction_choices),
    }


def load_packing(path: str) -> tuple[Packing, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PackingFileError(f"cannot read packing file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA or doc.get("kind") != "packing":
        raise PackingFileError(f"{path} is not a schema-{SCHEMA} packing file")
    try:
        p = build_packing(doc["example"], doc.get("r1"), doc.get("radii"))
    except (KeyError, TypeError) as exc:
        raise PackingFileError(f"malformed packing file {path}: {exc}") from exc
    return p, doc


# --- verification report ---------------------------------------------------

@dataclass(frozen=True)
class CheckRecord:
    name: str
    status: str
    value: float | None
    tolerance: float | None
    samples: int
    seed: int
    argmax: list | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": self.value,
                "tolerance": self.tolerance, "samples": self.samples, "seed": self.seed,
                "argmax": self.argmax, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    label: str
    checks: tuple[CheckRecord, ...]
    construction_choices: tuple[str, ...] = ()
    seed: int = DEFAULT_SEED
    version: str = __version__
    volatile: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "verification",
            "version": self.version,
            "label": self.label,
            "seed": self.seed,
            "passed": self.passed,
            "construction_choices": list(self.construction_choices),
            "checks": [c.to_dict() for c in self.checks],
            "volatile": dict(self.volatile),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        checks = tuple(CheckRecord(**c) for c in d["checks"])
        return cls(d["label"], checks, tuple(d["construction_choices"]), d["seed"],
                   d["version"], dict(d.get("volatile", {})))

    def dumps(self) -> str:
        return dumps(self.to_dict())


def _argmax_point(x: np.ndarray, k: int) -> list:
    z = np.asarray(x[k], complex)
    return [[float(v.real), float(v.imag)] for v in z]


class _Suite:
    def __init__(self, seed: int):
        self.seed = seed
        self.records: list[CheckRecord] = []
        self.times: dict[str, float] = {}

    def add(self, name, value, tol, samples, argmax=None, detail="", status=None):
        t = time.perf_counter() - self._t0
        if status is None:
            status = "pass" if value is not None and math.isfinite(value) and value <= tol else "fail"
        self.records.append(CheckRecord(name, status, None if value is None else float(value),
                                        None if tol is None else float(tol), int(samples), self.seed,
                                        argmax if status == "fail" else None, detail))
        self.times[name] = t

    def start(self):
        self._t0 = time.perf_counter()


def _pullback(s: _Suite, p: Packing, samples: int, tol: dict) -> None:
    for i, b in enumerate(p):
        s.start()
        cloud = SampleCloud.ball(b.radius, samples, s.seed + i)
        analytic = b.jacobian is not None
        mode = "analytic" if analytic else "finite-difference"
        t = tol["pullback_analytic"] if analytic else tol["pullback_fd"]
        # at 1e-6 the central-difference truncation stays below the gate even at
        # samples next to the real locus, where the lune maps steepen
        d = pullback_defect(b, cloud, mode=mode, fd_step=1e-6)
        detail = mode + (f"; {len(d.failed)} samples outside the construction" if d.failed else "")
        s.add(f"pullback[{i}]", d.max_abs, t, samples, _argmax_point(cloud.points, d.argmax_sample), detail)


def _disjointness(s: _Suite, p: Packing, samples: int, tol: dict) -> None:
    """Depth of ball-j membership reached by interior samples of ball i."""
    s.start()
    if len(p) < 2:
        s.add("disjointness", None, tol["disjointness"], 0, status="skipped", detail="single ball")
        return
    worst, where = -np.inf, None
    for i, b in enumerate(p):
        x = SampleCloud.ball(b.radius, samples, s.seed + 100 + i).points
        Z = b.map(x)
        for j, c in enumerate(p):
            if j == i:
                continue
            with np.errstate(invalid="ignore"):
                depth = c.radius - np.nan_to_num(c.radial(Z), nan=np.inf)
            k = int(np.argmax(depth))
            if depth[k] > worst:
                worst, where = float(depth[k]), (i, j, _argmax_point(x, k))
    detail = f"ball {where[0]} sample inside ball {where[1]}" if worst > tol["disjointness"] else ""
    s.add("disjointness", max(worst, 0.0), tol["disjointness"], samples * len(p),
          [where[0], where[1], where[2]], detail)


def _sigmas(dev: float, err: float) -> str:
    return f"{dev / err:.2f} stderr" if err > 0 else "zero stderr"


def _volume(s: _Suite, p: Packing, mc: int, tol: dict) -> None:
    s.start()
    fill = p.fill_fraction
    ok = volume_obstruction(p.radii)
    biggest = [int(np.argmax(p.radii))]  # arithmetic gates point at the largest ball
    s.add("volume_bound", fill, 1.0, 0, biggest, detail="sum r^4 <= 1",
          status="pass" if ok else "fail")
    s.start()
    est, err = mc_volume(lambda Z: np.any([b.contains(Z) for b in p], axis=0), mc, s.seed)
    dev = abs(est / CP2_VOLUME - fill)
    sigma = err / CP2_VOLUME
    ok = dev <= max(tol["volume_sigma"] * sigma, 1e-12) and dev <= tol["volume_abs"]
    s.add("volume_mc", est / CP2_VOLUME, tol["volume_abs"], mc, biggest,
          detail=f"expected fill {fill:.6f}, deviation {dev:.3g} ({_sigmas(dev, sigma)})",
          status="pass" if ok else "fail")
    for j, region in enumerate(p.regions):
        s.start()
        est, err = mc_volume(region, mc, s.seed + 1 + j)
        expect = CP2_VOLUME / len(p.regions)
        dev = abs(est - expect)
        ok = dev <= tol["volume_sigma"] * err and dev / CP2_VOLUME <= tol["volume_abs"]
        s.add(f"region_volume[{j}]", est, tol["volume_abs"], mc,
              detail=f"expected {expect:.6f}, deviation {dev:.3g} ({_sigmas(dev, err)})",
              status="pass" if ok else "fail")


def _fiber_area(s: _Suite, p: Packing, tol: dict) -> None:
    if not p.regions:
        return
    s.start()
    rng = np.random.default_rng(s.seed)
    t = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    worst, k = -1.0, 0
    for m, tm in enumerate(t):
        dev = abs(fiber_area_profile(quadric_param(complex(tm)))(1.0) - FIBER_AREA)
        if dev > worst:
            worst, k = dev, m
    s.add("fiber_area", worst, tol["fiber_area"], 20, [[float(t[k].real), float(t[k].imag)]])
    s.start()
    part = LunePartition(len(p.regions))
    b = part.boundaries + (2 * np.pi,)
    areas = [quadric_area(b[j], b[j + 1]) for j in range(part.n)]
    dev = max(abs(a - part.piece_area) for a in areas)
    s.add("lune_areas", dev, tol["quadric_area"], part.n, [int(np.argmax([abs(a - part.piece_area) for a in areas]))])


def _preservation(s: _Suite, p: Packing, samples: int, tol: dict) -> None:
    for i, b in enumerate(p):
        s.start()
        n = min(samples, 2000)
        x = SampleCloud.sphere(b.radius, n, s.seed + 200 + i).points
        x = x[~b.near_singular(x, 0.15 * b.radius)]
        with np.errstate(all="ignore"):
            d = preservation_defects(b, x, 1e-6 if b.jacobian is not None else 1e-7)
        finite = np.isfinite(d)
        if not finite.any():
            s.add(f"preservation[{i}]", None, tol["preservation"], 0, status="skipped",
                  detail="no regular boundary samples")
            continue
        k = int(np.nanargmax(np.where(finite, d, -np.inf)))
        s.add(f"preservation[{i}]", d[k], tol["preservation"], int(finite.sum()),
              _argmax_point(x, k), f"{int((~finite).sum())} samples outside the construction")


def _maximality(s: _Suite, p: Packing) -> None:
    s.start()
    v = maximality_check(p.radii)
    s.add("maximality", v.margin, None, 0, [int(np.argmax(p.radii))], detail=f"{v.binding}; maximal={v.maximal}",
          status="pass" if v.feasible else "fail")


def run_verification(p: Packing, samples: int = 10_000, mc_samples: int = 100_000,
                     seed: int = DEFAULT_SEED, tolerances: dict | None = None) -> VerificationReport:
    """Pullback, disjointness, volume, fiber-area and characteristic-preservation checks."""
    if samples < 1:
        raise ValueError("samples must be positive")
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in (tolerances or {}).items():
        if k not in tol:
            raise ValueError(f"unknown tolerance {k!r}; known: {', '.join(tol)}")
        tol[k] = float(v)
    s = _Suite(seed)
    _pullback(s, p, samples, tol)
    _disjointness(s, p, samples, tol)
    _volume(s, p, mc_samples, tol)
    _fiber_area(s, p, tol)
    _preservation(s, p, samples, tol)
    _maximality(s, p)
    volatile = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "wall_time": s.times}
    return VerificationReport(p.label, tuple(s.records), tuple(p.construction_choices), seed,
                              __version__, volatile)


def construction_failure(label: str, exc: Exception, seed: int) -> VerificationReport:
    rec = CheckRecord("construction", "fail", None, None, 0, seed, None, str(exc))
    return VerificationReport(label, (rec,), (), seed, __version__,
                              {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())})


__all__ = [
    "CapacityError", "CheckRecord", "DEFAULT_TOLERANCES", "EXAMPLES", "PackingFileError", "SCHEMA",
    "VerificationReport", "build_packing", "construction_failure", "determinism_hash", "dumps",
    "env_seed", "load_packing", "packing_document", "run_verification", "write_json",
]
