"""Checkers and randomized searches around hereditary subspaces and ternary
conditional expectations.

Searches are split into fixed-size chunks, each seeded from
``numpy.random.SeedSequence(seed).spawn``; the chunking does not depend on
the number of workers, so reports are identical for any worker count.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import DEFAULT_TOL, HilbmodError
from .fdcstar import is_subalgebra, mul_rows
from .hmod import HModule, module_norm, product_span, ternary_rows
from .ideals import ideal_submodule, is_ternary_subspace
from .linking import LinkingAlgebra, linking_subspace
from .sampling import Bounds, block_unitary_map, random_complex, random_module, random_ternary_subspace
from .subspace import LinearMap, Subspace, from_rows, whole

CHUNK = 250


# -- hereditary subspaces ----------------------------------------------------


@dataclass(frozen=True)
class HereditaryCheck:
    hereditary: bool
    residual: float
    precondition: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.hereditary


def is_ternary_hereditary(f: Subspace, tol: float | None = None) -> HereditaryCheck:
    """F<E,F> inside F.  ``precondition`` reports whether F is ternary."""
    e = whole(f.parent, f.tol)
    chk = product_span("ternary", f, e, f, tol).issubset(f, tol)
    return HereditaryCheck(bool(chk), chk.residual, bool(is_ternary_subspace(f, tol)), chk.witness)


def is_hereditary_subalgebra(c: Subspace, ambient: Subspace | None = None,
                             tol: float | None = None) -> HereditaryCheck:
    """C D C inside C for the ambient subalgebra D (default: the whole algebra).

    ``precondition`` says whether C is a *-subalgebra contained in D; the
    hereditary verdict is only meaningful when it holds.
    """
    alg = c.parent
    d = whole(alg, c.tol) if ambient is None else ambient
    pre = bool(is_subalgebra(c, tol)) and bool(c.issubset(d, tol))
    cd = from_rows(alg, mul_rows(alg, c.rows, d.rows), c.tol)
    chk = c.contains_rows(mul_rows(alg, cd.rows, c.rows), tol)
    return HereditaryCheck(bool(chk), chk.residual, pre, chk.witness)


def range_subalgebras(f: Subspace, tol: float | None = None):
    """(B_F, B_E, K(F), K(E)) as subspaces: span<F,F> in span<E,E> and span FF^* in K(E)."""
    e = whole(f.parent, f.tol)
    return (
        product_span("inner", f, f, tol=tol),
        product_span("inner", e, e, tol=tol),
        product_span("rankone", f, f, tol=tol),
        whole(f.parent.compacts(), f.tol),
    )


def is_linking_hereditary(f: Subspace, tol: float | None = None) -> HereditaryCheck:
    """Reduced linking algebra of F, placed blockwise in that of E, is hereditary there."""
    L = LinkingAlgebra(f.parent, reduced=True)
    return is_hereditary_subalgebra(linking_subspace(L, f), None, tol)


@dataclass(frozen=True)
class HereditaryProfile:
    ternary_subspace: bool
    ternary_hereditary: bool
    linking_hereditary: bool
    range_hereditary: bool
    compacts_hereditary: bool

    def violations(self) -> list[str]:
        out = []
        if self.linking_hereditary and not self.ternary_hereditary:
            out.append("linking=>ternary")
        if (self.range_hereditary or self.compacts_hereditary) and not self.ternary_hereditary:
            out.append("range-or-compacts=>ternary")
        if self.linking_hereditary != (self.range_hereditary and self.compacts_hereditary):
            out.append("linking<=>range-and-compacts")
        return out

    @property
    def discrepancy(self) -> bool:
        return self.ternary_hereditary and not self.linking_hereditary


def hereditary_profile(f: Subspace, tol: float | None = None) -> HereditaryProfile:
    bf, be, kf, ke = range_subalgebras(f, tol)
    return HereditaryProfile(
        ternary_subspace=bool(is_ternary_subspace(f, tol)),
        ternary_hereditary=bool(is_ternary_hereditary(f, tol)),
        linking_hereditary=bool(is_linking_hereditary(f, tol)),
        range_hereditary=bool(is_hereditary_subalgebra(bf, be, tol)),
        compacts_hereditary=bool(is_hereditary_subalgebra(kf, ke, tol)),
    )


# -- ternary conditional expectations ----------------------------------------


def contraction_estimate(m: LinearMap, rng: np.random.Generator, samples: int = 64,
                         iterations: int = 20) -> float:
    """Lower estimate of sup ||m x|| / ||x|| in the module norm.

    Random directions are sampled, then a power iteration on m^* m (Euclidean)
    supplies further candidates; the best ratio seen is returned.  This is an
    estimate, not a bound.
    """
    E, F = m.source, m.target
    if E.dim == 0:
        return 0.0

    def ratio(vec):
        nx = module_norm(E.from_vec(vec))
        return module_norm(F.from_vec(m(vec))) / nx if nx > 0 else 0.0

    best = 0.0
    for _ in range(samples):
        best = max(best, ratio(random_complex(rng, E.dim)))
    vec = random_complex(rng, E.dim)
    gram = m.matrix.conj().T @ m.matrix
    for _ in range(iterations):
        nxt = gram @ vec
        size = np.linalg.norm(nxt)
        if size == 0:
            break
        vec = nxt / size
        best = max(best, ratio(vec))
    return float(best)


@dataclass(frozen=True)
class ExpectationReport:
    idempotent: bool
    range_ternary: bool
    ternary_condition: bool
    contraction_estimate: float
    contractive_estimate: bool
    residuals: dict = field(default_factory=dict)

    @property
    def cell(self) -> str:
        flags = (self.idempotent, self.range_ternary, self.ternary_condition, self.contractive_estimate)
        return "".join("1" if f else "0" for f in flags)


def is_ternary_conditional_expectation(m: LinearMap, rng: np.random.Generator | None = None,
                                       tol: float = DEFAULT_TOL, samples: int = 64) -> ExpectationReport:
    """Four separate facts about an endomorphism m of E.

    (a) m m = m, (b) range(m) is a ternary subspace, (c) the ternary condition
    m(m(x)<y, m(z)>) = m(x)<m(y), m(z)> on basis triples, (d) an estimate of
    the module-norm contraction constant.
    """
    E = m.source
    if m.target != E:
        raise HilbmodError("a conditional expectation maps a module to itself")
    rng = np.random.default_rng(0) if rng is None else rng
    scale = max(1.0, float(np.abs(m.matrix).max()) if m.matrix.size else 1.0)
    idem = float(np.abs(m.matrix @ m.matrix - m.matrix).max()) if m.matrix.size else 0.0
    rng_space = m.image(tol)
    rng_chk = is_ternary_subspace(rng_space, tol)
    basis = np.eye(E.dim, dtype=complex)
    mx = m.apply_rows(basis)
    lhs = m.apply_rows(ternary_rows(E, mx, basis, mx))
    rhs = ternary_rows(E, mx, mx, mx)
    cond = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
    est = contraction_estimate(m, rng, samples)
    return ExpectationReport(
        idempotent=idem <= tol * scale ** 2,
        range_ternary=bool(rng_chk),
        ternary_condition=cond <= tol * scale ** 4,
        contraction_estimate=est,
        contractive_estimate=est <= 1.0 + 1e-9,
        residuals={"idempotent": idem, "range_ternary": rng_chk.residual, "ternary_condition": cond},
    )


def coordinate_projection(space: Subspace) -> LinearMap:
    """Orthogonal projection onto ``space`` in flattened coordinates."""
    q = space.onb
    return LinearMap(space.parent, space.parent, q @ q.conj().T)


def oblique_projection(rng: np.random.Generator, space: Subspace) -> LinearMap:
    """A random (generally non-orthogonal) idempotent with range ``space``."""
    q = space.onb
    d = q.shape[1]
    if d == 0:
        return LinearMap.zero_map(space.parent, space.parent)
    r = q + 0.5 * random_complex(rng, q.shape)
    gram = r.conj().T @ q
    if np.linalg.cond(gram) > 1e6:
        r = q
        gram = r.conj().T @ q
    return LinearMap(space.parent, space.parent, q @ np.linalg.solve(gram, r.conj().T))


def fixed_point_average(rng: np.random.Generator, module: HModule) -> LinearMap:
    """(1 + w) / 2 for a random ternary involution w of E.

    w is x -> U x V with diagonal sign matrices U, V, transported by a random
    block unitary; the average projects onto the fixed points of w.
    """
    mat = np.zeros((module.dim, module.dim), dtype=complex)
    for k, (m, n) in enumerate(module.shapes):
        if m * n == 0:
            continue
        u = np.diag(rng.choice([-1.0, 1.0], size=m))
        v = np.diag(rng.choice([-1.0, 1.0], size=n))
        sl = module.block_slice(k)
        mat[sl, sl] = np.kron(u, v.T)
    t = block_unitary_map(rng, module).matrix
    w = t @ mat @ t.conj().T
    return LinearMap(module, module, 0.5 * (np.eye(module.dim) + w))


# -- searches ----------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    count: int = 1000
    bounds: Bounds = Bounds(2, 2, 2)
    seed: int = 0
    workers: int = 1
    tol: float = DEFAULT_TOL
    max_examples: int = 5

    def to_json(self) -> dict:
        d = asdict(self)
        d["bounds"] = self.bounds.as_list()
        d.pop("workers")
        return d


def _chunks(config: SearchConfig):
    n = math.ceil(config.count / CHUNK) if config.count > 0 else 0
    seeds = np.random.SeedSequence(config.seed).spawn(n)
    sizes = [min(CHUNK, config.count - i * CHUNK) for i in range(n)]
    return list(zip(sizes, seeds))


def _run(func, config: SearchConfig) -> list[dict]:
    jobs = _chunks(config)
    args = [(size, seq, config) for size, seq in jobs]
    if config.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(func, *zip(*args)))
    return [func(*a) for a in args]


def _describe(f: Subspace) -> dict:
    mod = f.parent
    return {
        "block_dims": list(mod.base.block_dims),
        "multiplicities": list(mod.multiplicities),
        "dim": f.dim,
    }


def _hereditary_chunk(size: int, seq: np.random.SeedSequence, config: SearchConfig) -> dict:
    rng = np.random.default_rng(seq)
    counters: dict[str, int] = {}
    recipes: dict[str, int] = {}
    violations: dict[str, list] = {}
    discrepancies, errors = [], 0

    def bump(d, key):
        d[key] = d.get(key, 0) + 1

    for _ in range(size):
        module = random_module(rng, config.bounds)
        recipe, f = random_ternary_subspace(rng, module, tol=config.tol)
        bump(recipes, recipe)
        try:
            prof = hereditary_profile(f, config.tol)
        except HilbmodError:
            errors += 1
            continue
        for name, flag in asdict(prof).items():
            if flag:
                bump(counters, name)
        for v in prof.violations():
            violations.setdefault(v, []).append({"recipe": recipe, **_describe(f)})
        if prof.discrepancy:
            discrepancies.append({"recipe": recipe, **_describe(f)})
    return {"counters": counters, "recipes": recipes, "violations": violations,
            "discrepancies": discrepancies, "errors": errors, "samples": size}


def _merge(parts: list[dict], max_examples: int) -> dict:
    out = {"counters": {}, "recipes": {}, "samples": 0, "errors": 0}
    viol: dict[str, list] = {}
    disc: list = []
    for p in parts:
        for key in ("counters", "recipes"):
            for k, v in p[key].items():
                out[key][k] = out[key].get(k, 0) + v
        out["samples"] += p["samples"]
        out["errors"] += p["errors"]
        for k, v in p.get("violations", {}).items():
            viol.setdefault(k, []).extend(v)
        disc.extend(p.get("discrepancies", []))
    out["violation_counts"] = {k: len(v) for k, v in sorted(viol.items())}
    out["violation_examples"] = {k: v[:max_examples] for k, v in sorted(viol.items())}
    out["discrepancy_count"] = len(disc)
    out["discrepancy_examples"] = disc[:max_examples]
    return out


IMPLICATIONS = ("linking=>ternary", "range-or-compacts=>ternary", "linking<=>range-and-compacts")


def hereditary_search(config: SearchConfig) -> dict:
    """Sample ternary subspaces and tally hereditary properties.

    Only the proved implications are counted as violations; the number of
    ternary hereditary but not linking hereditary samples is reported as
    ``discrepancy_count`` and never treated as a failure.
    """
    merged = _merge(_run(_hereditary_chunk, config), config.max_examples)
    for name in IMPLICATIONS:
        merged["violation_counts"].setdefault(name, 0)
    merged["violation_counts"] = dict(sorted(merged["violation_counts"].items()))
    merged["ok"] = sum(merged["violation_counts"].values()) == 0
    merged["config"] = config.to_json()
    return merged


Q1_RECIPES = ("ideal-projection", "orthogonal", "oblique", "group-average")


def _q1_sample(rng, module, recipe, tol):
    if recipe == "ideal-projection":
        blocks = [k for k in range(module.base.r) if rng.random() < 0.5]
        return coordinate_projection(ideal_submodule(module, blocks, tol))
    if recipe == "group-average":
        return fixed_point_average(rng, module)
    _, f = random_ternary_subspace(rng, module, tol=tol)
    if recipe == "orthogonal":
        return coordinate_projection(f)
    if recipe == "oblique":
        return oblique_projection(rng, f)
    raise ValueError(f"unknown recipe {recipe!r}")


def _q1_chunk(size: int, seq: np.random.SeedSequence, config: SearchConfig) -> dict:
    rng = np.random.default_rng(seq)
    cells: dict[str, int] = {}
    recipes: dict[str, int] = {}
    by_recipe: dict[str, dict] = {}
    worst = 0.0
    errors = 0
    for _ in range(size):
        module = random_module(rng, config.bounds)
        recipe = Q1_RECIPES[int(rng.integers(len(Q1_RECIPES)))]
        recipes[recipe] = recipes.get(recipe, 0) + 1
        try:
            m = _q1_sample(rng, module, recipe, config.tol)
            rep = is_ternary_conditional_expectation(m, rng, config.tol, samples=16)
        except HilbmodError:
            errors += 1
            continue
        cells[rep.cell] = cells.get(rep.cell, 0) + 1
        cell_map = by_recipe.setdefault(recipe, {})
        cell_map[rep.cell] = cell_map.get(rep.cell, 0) + 1
        if rep.idempotent and rep.ternary_condition:
            worst = max(worst, rep.contraction_estimate)
    return {"counters": cells, "recipes": recipes, "by_recipe": by_recipe,
            "worst": worst, "errors": errors, "samples": size}


def q1_search(config: SearchConfig) -> dict:
    """Cross-tabulate the four facts over sampled idempotents onto ternary subspaces.

    Cells are keyed by four digits: idempotent, range ternary, ternary
    condition, contractive (estimated).
    """
    parts = _run(_q1_chunk, config)
    merged = _merge(parts, config.max_examples)
    by_recipe: dict[str, dict] = {}
    for p in parts:
        for rec, cells in p["by_recipe"].items():
            tgt = by_recipe.setdefault(rec, {})
            for c, n in cells.items():
                tgt[c] = tgt.get(c, 0) + n
    out = {
        "samples": merged["samples"],
        "errors": merged["errors"],
        "cells": dict(sorted(merged["counters"].items())),
        "recipes": dict(sorted(merged["recipes"].items())),
        "cells_by_recipe": {k: dict(sorted(v.items())) for k, v in sorted(by_recipe.items())},
        "columns": ["idempotent", "range_ternary", "ternary_condition", "contractive_estimate"],
        "max_contraction_estimate_given_a_and_c": round(max((p["worst"] for p in parts), default=0.0), 12),
        "config": config.to_json(),
        "ok": True,
    }
    return out


def report_bytes(report: dict) -> bytes:
    """Canonical JSON encoding used for reproducibility comparisons."""
    return json.dumps(report, sort_keys=True, separators=(",", ":")).encode()


__all__ = [
    "CHUNK",
    "ExpectationReport",
    "HereditaryCheck",
    "HereditaryProfile",
    "IMPLICATIONS",
    "Q1_RECIPES",
    "SearchConfig",
    "contraction_estimate",
    "coordinate_projection",
    "hereditary_profile",
    "hereditary_search",
    "is_hereditary_subalgebra",
    "is_linking_hereditary",
    "is_ternary_conditional_expectation",
    "is_ternary_hereditary",
    "oblique_projection",
    "q1_search",
    "range_subalgebras",
    "report_bytes",
]
