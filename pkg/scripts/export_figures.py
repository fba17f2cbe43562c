"""Write the standard figures: moment-triangle SVG, supporting-surface OBJ and a traced characteristic.

Usage: python scripts/export_figures.py [--out DIR]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from sympack.exports import polytope_svg, surfaces_obj, trace_document
from sympack.report import build_packing, write_json
from sympack.surfaces import assemble_surfaces, build_circle_graph, detect_shared_arcs, reduce_graph


@dataclass(frozen=True)
class FigureConfig:
    out: Path = Path("figures")
    svg_example: str = "karshon3"
    obj_example: str = "regular5"
    trace_example: str = "karshon3"
    trace_ball: int = 1
    trace_step: float = 1e-2


def export(cfg: FigureConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    written = []

    path = cfg.out / f"{cfg.svg_example}_polytope.svg"
    path.write_text(polytope_svg(build_packing(cfg.svg_example)))
    written.append(path)

    p = build_packing(cfg.obj_example)
    graph, _ = reduce_graph(build_circle_graph(detect_shared_arcs(p), p))
    path = cfg.out / f"{cfg.obj_example}_surfaces.obj"
    path.write_text(surfaces_obj(p, assemble_surfaces(graph, p)))
    written.append(path)

    doc = trace_document(build_packing(cfg.trace_example), cfg.trace_ball, cfg.trace_step)
    path = cfg.out / f"{cfg.trace_example}_trace{cfg.trace_ball}.json"
    write_json(str(path), doc)
    print(f"trace: return distance {doc['return_distance']:.2e}, period {doc['period']:.8f}")
    written.append(path)
    return written


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=FigureConfig.out)
    for path in export(FigureConfig(out=ap.parse_args().out)):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
