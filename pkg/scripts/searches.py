"""Run the hereditary and conditional-expectation searches and save both reports.

    python scripts/searches.py --count 10000 --out results/
"""
from __future__ import annotations

import argparse
from pathlib import Path

from hilbmod.probes import SearchConfig, hereditary_search, q1_search, report_bytes
from hilbmod.sampling import Bounds


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bounds", default="2,2,2")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    cfg = SearchConfig(count=args.count, seed=args.seed, workers=args.workers,
                       bounds=Bounds(*(int(x) for x in args.bounds.split(","))))
    args.out.mkdir(parents=True, exist_ok=True)
    for name, search in (("hereditary", hereditary_search), ("q1", q1_search)):
        rep = search(cfg)
        path = args.out / f"{name}-seed{cfg.seed}-n{cfg.count}.json"
        path.write_bytes(report_bytes(rep) + b"\n")
        extra = rep.get("violation_counts") or rep.get("cells")
        print(f"{name}: {rep['samples']} samples, {rep['errors']} errors -> {path}  {extra}")


if __name__ == "__main__":
    main()
