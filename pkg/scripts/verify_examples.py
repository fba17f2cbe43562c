"""Build every example packing, run the verification suite and print one row per check.

Usage: python scripts/verify_examples.py [--samples N] [--mc-samples M] [--seed S]
Exits with status 1 if any example fails a check.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from sympack.report import EXAMPLES, build_packing, run_verification


@dataclass(frozen=True)
class SweepConfig:
    samples: int = 10_000
    mc_samples: int = 100_000
    seed: int = 42


def sweep(cfg: SweepConfig) -> bool:
    ok = True
    print(f"{'example':<10} {'check':<26} {'status':<8} {'value':>11} {'tolerance':>11}")
    for ex in EXAMPLES:
        t = time.perf_counter()
        p = build_packing(ex)
        rep = run_verification(p, cfg.samples, cfg.mc_samples, cfg.seed)
        for c in rep.checks:
            val = "-" if c.value is None else f"{c.value:.3e}"
            tol = "-" if c.tolerance is None else f"{c.tolerance:.1e}"
            print(f"{ex:<10} {c.name:<26} {c.status:<8} {val:>11} {tol:>11}")
        print(f"{ex:<10} {'(total)':<26} {'pass' if rep.passed else 'FAIL':<8} "
              f"{time.perf_counter() - t:>10.1f}s")
        ok &= rep.passed
    return ok


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=SweepConfig.samples)
    ap.add_argument("--mc-samples", type=int, default=SweepConfig.mc_samples)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    a = ap.parse_args()
    return 0 if sweep(SweepConfig(a.samples, a.mc_samples, a.seed)) else 1


if __name__ == "__main__":
    sys.exit(main())
