"""Acceptance criteria 1-10, one test each; every test prints a single PASS/FAIL line."""

import json
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from ksets import EXPECTED_CIRCLES, KINDS

from sympack import CP2_VOLUME, SampleCloud, pullback_defect
from sympack.characteristics import (build_digging_hamiltonian, contained_circles,
                                     preservation_defect, step_order, trace_characteristic)
from sympack.cli import main
from sympack.embedding import identity_ball, standard_chart_ball
from sympack.model_spaces import DiscBundleModel, Ellipsoid, PhiEmbedding
from sympack.obstructions import PACKING_NUMBERS, max_equal_radius_sq, pratique_test
from sympack.quadric import (FIBER_AREA, fiber_area_profile, fiber_points, pencil, project_arrays,
                             q_value, quadric_area)
from sympack.report import determinism_hash
from sympack.surfaces import (SupportingSurface, assemble_surfaces, build_circle_graph,
                              detect_shared_arcs, dream_certificate, fully_shared_circles,
                              reduce_graph, two_ball_sphere, uniqueness_count_check)
from sympack.toric import karshon_packing

ROOT = Path(__file__).resolve().parents[1]
MC = 1_000_000


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for a criterion, then assert it."""

    def report(number: int, title: str, results: dict):
        ok = all(bool(v[0]) for v in results.values())
        bad = [f"{k}: {v[1]}" for k, v in results.items() if not v[0]]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if bad:
            line += "  [" + "; ".join(bad) + "]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return report


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_criterion_01_exactness_gates(verdict):
    res = {}
    balls = [("chart 0.9", standard_chart_ball(0.9))]
    balls += [(f"karshon2 ball {k}", b) for k, b in enumerate(karshon_packing("two_balls", 0.8))]
    balls += [(f"karshon3 ball {k}", b) for k, b in enumerate(karshon_packing("three_balls"))]
    for name, b in balls:
        d, dt = _timed(lambda b=b: pullback_defect(b, SampleCloud.ball(b.radius, 10_000, seed=1)))
        res[name] = (d.max_abs < 1e-8 and dt < 10 and d.samples >= 10_000,
                     f"defect {d.max_abs:.2e} in {dt:.2f}s")
    m = DiscBundleModel(Ellipsoid((1.2,)), 2)
    rng = np.random.default_rng(1)
    z = m.base.sample(10_000, 1)
    w = np.sqrt(rng.random(10_000)) * 0.99 * np.exp(2j * np.pi * rng.random(10_000))
    x = np.concatenate([z, w[:, None]], axis=1)
    d, dt = _timed(lambda: pullback_defect(PhiEmbedding(m), x, target="c2", source_form=m.form))
    res["canonical phi"] = (d.max_abs < 1e-8 and dt < 10, f"defect {d.max_abs:.2e} in {dt:.2f}s")
    verdict(1, "analytic pullback defect < 1e-8 on 1e4 samples, < 10 s each", res)


def _mc_fraction(inside):
    p = float(np.mean(inside))
    return p * CP2_VOLUME, np.sqrt(p * (1 - p) / len(inside)) * CP2_VOLUME


def _volume_ok(est, err, expect):
    dev = abs(est - expect)
    return dev <= 3 * err + 1e-12 and dev / CP2_VOLUME <= 5e-3, f"{est:.6f} vs {expect:.6f} (err {err:.1e})"


@pytest.mark.slow
def test_criterion_02_volume_ledger(verdict, full4, regular5, karshon3):
    Z = SampleCloud.cp2(MC, seed=2).points
    res = {"CP^2": _volume_ok(*_mc_fraction(np.ones(MC, bool)), CP2_VOLUME)}
    inside = np.array([b.contains(Z) for b in karshon3])
    res["karshon3 fill"] = _volume_ok(*_mc_fraction(inside.any(axis=0)), 0.75 * CP2_VOLUME)
    inside = np.array([b.contains(Z) for b in full4])
    res["full4 fill"] = _volume_ok(*_mc_fraction(inside.any(axis=0)), CP2_VOLUME)
    for k, row in enumerate(inside):
        res[f"full4 ball {k}"] = _volume_ok(*_mc_fraction(row), np.pi**2 / 8)
    inside = np.array([b.contains(Z) for b in regular5])
    res["regular5 fill"] = _volume_ok(*_mc_fraction(inside.any(axis=0)), 0.8 * CP2_VOLUME)
    for k, row in enumerate(inside):
        res[f"regular5 ball {k}"] = _volume_ok(*_mc_fraction(row), 2 * np.pi**2 / 25)
    for k, region in enumerate(regular5.regions):
        res[f"regular5 region {k}"] = _volume_ok(*_mc_fraction(region(Z)), np.pi**2 / 10)
    verdict(2, "Monte-Carlo volumes at 1e6 samples within 3 sigma and 0.5%", res)


def test_criterion_03_quadric_structure(verdict):
    rng = np.random.default_rng(3)
    res = {}
    area = quadric_area()
    res["area(Q)"] = (abs(area - 2 * np.pi) <= 1e-5, f"{area:.9f}")
    xs = pencil(rng.normal(size=20) + 1j * rng.normal(size=20), rng.normal(size=20) + 1j * rng.normal(size=20))
    fib = np.array([fiber_area_profile(x)(1.0) for x in xs])
    res["fiber areas"] = (np.max(np.abs(fib - FIBER_AREA)) <= 1e-5, f"max dev {np.max(np.abs(fib - FIBER_AREA)):.1e}")
    x = pencil(rng.normal(size=1000) + 1j * rng.normal(size=1000), rng.normal(size=1000) + 1j * rng.normal(size=1000))
    w = rng.uniform(1e-3, 0.99, 1000) * np.exp(2j * np.pi * rng.random(1000))
    xr, wr = project_arrays(fiber_points(x, w))
    err = max(np.max(np.abs(wr - w)), np.max(np.linalg.norm(xr - x, axis=1)))
    res["round trip"] = (err < 1e-8, f"{err:.1e}")
    Z = rng.normal(size=(10_000, 3)) + 1j * rng.normal(size=(10_000, 3))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    q = q_value(Z)
    disc = np.sqrt(1 - np.abs(q) ** 2)
    roots = np.abs(np.stack([(-1 + disc) / np.conj(q), (-1 - disc) / np.conj(q)], axis=1))
    res["unique root"] = (np.all((roots < 1).sum(axis=1) == 1), "")
    verdict(3, "quadric area, fiber areas, projection round trip, unique root", res)


def test_criterion_04_characteristics(verdict):
    res = {}
    tr = trace_characteristic(identity_ball(1.0), (1, 0), step=1e-3)
    res["closure"] = (tr.return_distance < 1e-6, f"{tr.return_distance:.1e}")
    res["period"] = (abs(tr.period - 2 * np.pi) <= 1e-4, f"{tr.period:.8f}")
    orders = step_order(identity_ball(1.0), (0.6, 0.8j))["orders"]
    res["RK4 order"] = (min(orders) >= 3.9, f"{orders}")
    exact = [standard_chart_ball(0.9), *karshon_packing("three_balls"), *karshon_packing("two_balls", 0.8)]
    worst = max(preservation_defect(b, SampleCloud.sphere(b.radius, 2000, seed=4, axis_tube=1e-3).points)
                for b in exact)
    res["preservation"] = (worst < 1e-6, f"{worst:.1e}")
    verdict(4, "round-sphere trace, RK4 order, characteristic preservation", res)


def test_criterion_05_digging_hamiltonian(verdict):
    res = {}
    rng = np.random.default_rng(5)
    for kind, make in KINDS.items():
        K = make(rng)
        circles = contained_circles(K)
        H = build_digging_hamiltonian(K, circles)
        ok = len(circles) == EXPECTED_CIRCLES[kind] and H.margin > 0 and H.circle_gradient < 1e-6
        res[kind] = (ok, f"{len(circles)} circles, margin {H.margin:.3g}, |dH| {H.circle_gradient:.1e}")
    verdict(5, "digging Hamiltonian passes its sweep on 5 compact sets", res)


def test_criterion_06_intersection_pattern(verdict, karshon3, karshon3_arcs):
    res = {}
    for r1 in (0.8, 1 / np.sqrt(2)):
        p = karshon_packing("two_balls", r1)
        arcs = detect_shared_arcs(p)
        shared = fully_shared_circles(arcs)
        res[f"karshon2({r1:.4g}) circles"] = (len(shared) == 1 and all(a.tangent for a in arcs),
                                              f"{len(shared)} shared")
        for i, j, c in shared:
            s = two_ball_sphere(p, i, j, c, arcs)
            res[f"karshon2({r1:.4g}) area"] = (abs(s.area - np.pi) <= 1e-9, f"{s.area:.12f}")
    shared = fully_shared_circles(karshon3_arcs)
    res["karshon3 circles"] = (len(shared) == 3 and all(a.tangent for a in karshon3_arcs),
                               f"{len(shared)} shared")
    for i, j, c in shared:
        s = two_ball_sphere(karshon3, i, j, c, karshon3_arcs)
        res[f"karshon3 area {i}{j}"] = (abs(s.area - np.pi) <= 1e-9, f"{s.area:.12f}")
    verdict(6, "Karshon packings share 1 / 3 tangent Hopf circles; spheres of area pi", res)


def test_criterion_07_regular5_graph(verdict, regular5, regular5_arcs):
    g = build_circle_graph(regular5_arcs, regular5)
    reduced, log = reduce_graph(g)
    surfs = assemble_surfaces(reduced, regular5)
    res = {
        "cycle": (len(g.vertices) == 5 and g.all_black and len(g.edges) == 5
                  and all(len(g.neighbors(v)) == 2 for v in range(5)) and len(g.components()) == 1,
                  f"{len(g.vertices)} vertices, {len(g.edges)} edges"),
        "no-op reduction": (log == [] and reduced.edges == g.edges, f"log {log}"),
        "one surface": (len(surfs) == 1, f"{len(surfs)} surfaces"),
    }
    if len(surfs) == 1:
        s = surfs[0]
        img = s.image_area(regular5)
        res["discs"] = (len(s.discs) == 5 and s.multiplicities == (1,) * 5, f"{s.multiplicities}")
        res["domain area"] = (s.area_over_pi == Fraction(2), f"{s.area_over_pi} pi")
        res["image area"] = (abs(img - 2 * np.pi) <= 1e-3, f"{img:.9f}")
    verdict(7, "regular5: black 5-cycle, one surface of area 2 pi", res)


def test_criterion_08_certificates(verdict):
    t = time.perf_counter()
    c5 = dream_certificate(5, Fraction(2, 5), 4)
    c7 = dream_certificate(7, Fraction(3, 8), 3)
    c8 = dream_certificate(8, Fraction(6, 17), 6)
    s = SupportingSurface.hypothetical(2, (1,) * 5)
    check = uniqueness_count_check([s, s])
    dt = time.perf_counter() - t
    m5, m7, m8 = c5.minimal, c7.minimal, c8.minimal
    res = {
        "n=5": (len(m5) == 1 and (m5[0].k, m5[0].delta) == (1, 0)
                and not [r for r in c5.feasible if r.degree == 4], f"{m5}"),
        "n=7": (len(m7) == 1 and (m7[0].degree, m7[0].discs, m7[0].multiset) == (3, 8, (2,) + (1,) * 6), f"{m7}"),
        "n=8": (len(m8) == 1 and (m8[0].degree, m8[0].discs, m8[0].multiset) == (6, 17, (3,) + (2,) * 7), f"{m8}"),
        "4k' = 5k'": (check["contradiction"] and check["pairs"][0]["homological_product"] == 4
                      and check["pairs"][0]["center_count"] == 5, f"{check['pairs']}"),
        "runtime": (dt < 1.0, f"{dt:.3f}s"),
    }
    verdict(8, "degree/multiplicity certificates and the uniqueness contradiction", res)


def test_criterion_09_obstructions(verdict):
    out = subprocess.run([sys.executable, str(ROOT / "scripts" / "derive_packing_numbers.py")],
                         capture_output=True, text=True, timeout=300)
    table = [PACKING_NUMBERS[k] for k in range(1, 9)]
    expected = [Fraction(1), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(4, 5),
                Fraction(24, 25), Fraction(63, 64), Fraction(288, 289)]
    res = {
        "r(5)^2 = 2/5": (max_equal_radius_sq(5) == Fraction(2, 5), f"{max_equal_radius_sq(5)}"),
        "pratique": (pratique_test(1 / np.sqrt(2), 1 / np.sqrt(2))
                     and not pratique_test(np.sqrt(0.4), np.sqrt(0.4)) and pratique_test(1, 1), ""),
        "table": (table == expected, f"{table}"),
        "Cremona script": (out.returncode == 0, out.stdout.strip().splitlines()[-1:] if out.stdout else out.stderr),
    }
    verdict(9, "equal-ball radius, integer-area test, packing numbers from exceptional classes", res)


def test_criterion_10_determinism(verdict, tmp_path):
    pack = tmp_path / "regular5.json"
    assert main(["construct", "--example", "regular5", "--seed", "7", "--out", str(pack)]) == 0
    texts = []
    for k in range(2):
        rep = tmp_path / f"report{k}.json"
        code = main(["verify", str(pack), "--seed", "7", "--report", str(rep)])
        texts.append((code, rep.read_text()))
    docs = [json.loads(t) for _, t in texts]
    stripped = []
    for d in docs:
        d = dict(d)
        d.pop("volatile")
        stripped.append(json.dumps(d, sort_keys=True))
    res = {
        "exit codes": (texts[0][0] == texts[1][0] == 0, f"{texts[0][0]}, {texts[1][0]}"),
        "bytes": (stripped[0] == stripped[1], ""),
        "hash": (determinism_hash(docs[0]) == determinism_hash(docs[1]), determinism_hash(docs[0])[:12]),
    }
    verdict(10, "verify twice with one seed gives identical reports outside the volatile block", res)
