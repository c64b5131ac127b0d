"""Sweep random subspaces through the three ideal checkers and tally agreement.

    python scripts/equivalence_sweep.py --count 2000 --seed 0
"""
from __future__ import annotations

import argparse
import json
import time
from collections import Counter

import numpy as np

from hilbmod.ideals import as_ideal_submodule, is_linking_ideal, is_ternary_ideal
from hilbmod.sampling import Bounds, random_module, random_subspace


def sweep(count: int, seed: int, bounds: Bounds, tol: float) -> dict:
    rng = np.random.default_rng(seed)
    by_recipe: Counter = Counter()
    verdicts: Counter = Counter()
    disagreements = []
    start = time.perf_counter()
    for i in range(count):
        mod = random_module(rng, bounds)
        recipe, k = random_subspace(rng, mod, tol=tol)
        flags = (bool(is_ternary_ideal(k, tol)), bool(as_ideal_submodule(k, tol)), bool(is_linking_ideal(k, tol)))
        by_recipe[recipe] += 1
        verdicts["".join("1" if f else "0" for f in flags)] += 1
        if len(set(flags)) != 1:
            disagreements.append({"index": i, "recipe": recipe, "flags": flags,
                                  "block_dims": list(mod.base.block_dims),
                                  "multiplicities": list(mod.multiplicities)})
    return {
        "samples": count,
        "seed": seed,
        "bounds": bounds.as_list(),
        "recipes": dict(sorted(by_recipe.items())),
        "verdicts": dict(sorted(verdicts.items())),
        "disagreements": disagreements,
        "seconds": round(time.perf_counter() - start, 2),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bounds", default="3,3,3", help="max blocks, block dim, multiplicity")
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    bounds = Bounds(*(int(x) for x in args.bounds.split(",")))
    print(json.dumps(sweep(args.count, args.seed, bounds, args.tol), indent=2))


if __name__ == "__main__":
    main()
