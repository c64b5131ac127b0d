import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import modules, rand_c, seeds
from hilbmod.fdcstar import FdAlgebra, enumerate_ideals, mul_rows
from hilbmod.hmod import HModule
from hilbmod.ideals import ideal_submodule
from hilbmod.probes import (
    IMPLICATIONS,
    SearchConfig,
    coordinate_projection,
    hereditary_profile,
    hereditary_search,
    is_hereditary_subalgebra,
    is_linking_hereditary,
    is_ternary_conditional_expectation,
    is_ternary_hereditary,
    q1_search,
    report_bytes,
)
from hilbmod.sampling import Bounds, random_ternary_subspace
from hilbmod.subspace import LinearMap, from_rows, zero

M2 = FdAlgebra((2,))


@given(modules())
def test_ternary_ideals_are_hereditary(mod):
    for ideal in enumerate_ideals(mod.base):
        k = ideal_submodule(mod, ideal)
        assert is_ternary_hereditary(k)
        assert is_linking_hereditary(k)
    assert is_ternary_hereditary(zero(mod))


@given(modules(), seeds)
def test_ternary_hereditary_matches_oracle(mod, seed):
    _, f = random_ternary_subspace(np.random.default_rng(seed), mod)
    chk = is_ternary_hereditary(f)
    assert chk.precondition
    assert bool(chk) == oracles.is_hereditary_ternary(mod.multiplicities, mod.base.block_dims, f.rows)


def test_hereditary_subalgebra_examples():
    corner = from_rows(M2, np.array([[1, 0, 0, 0]], dtype=complex))
    chk = is_hereditary_subalgebra(corner)
    assert chk and chk.precondition
    unit = from_rows(M2, M2.unit().vec[None])
    chk = is_hereditary_subalgebra(unit)
    assert not chk and chk.precondition


@given(seeds)
def test_hereditary_subalgebra_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    B = FdAlgebra((2, 2))
    c = from_rows(B, rand_c(rng, (int(rng.integers(1, 3)), B.dim)))
    units = np.eye(B.dim)
    prods = [mul_rows(B, mul_rows(B, a[None], u[None]), b[None])[0] for a in c.rows for u in units for b in c.rows]
    assert bool(is_hereditary_subalgebra(c)) == oracles.in_span(c.rows, np.array(prods))


@given(modules(max_blocks=2, max_dim=2, max_mult=2), seeds)
def test_hereditary_implications(mod, seed):
    _, f = random_ternary_subspace(np.random.default_rng(seed), mod)
    prof = hereditary_profile(f)
    assert prof.violations() == []
    if prof.linking_hereditary:
        assert prof.ternary_hereditary


def test_non_hereditary_range_breaks_linking():
    # diagonal F = span{(1, 1)} in B = C + C over itself: B_F is spanned by the unit
    mod = HModule(FdAlgebra((1, 1)), (1, 1))
    f = from_rows(mod, np.array([[1, 1]], dtype=complex))
    prof = hereditary_profile(f)
    assert prof.ternary_subspace
    assert not prof.range_hereditary and not prof.compacts_hereditary
    assert not prof.linking_hereditary and not prof.ternary_hereditary


def test_empty_search():
    rep = hereditary_search(SearchConfig(count=0))
    assert rep["samples"] == 0 and rep["ok"] and rep["discrepancy_count"] == 0
    assert set(rep["violation_counts"]) == set(IMPLICATIONS)


def test_search_replay_and_worker_invariance():
    cfg = SearchConfig(count=300, seed=7)
    a = report_bytes(hereditary_search(cfg))
    b = report_bytes(hereditary_search(cfg))
    c = report_bytes(hereditary_search(SearchConfig(count=300, seed=7, workers=2)))
    assert a == b == c
    assert report_bytes(hereditary_search(SearchConfig(count=300, seed=8))) != a


def test_conditional_expectation_examples(rng):
    mod = HModule(FdAlgebra((2, 1)), (2, 1))
    rep = is_ternary_conditional_expectation(LinearMap.identity(mod), rng)
    assert rep.cell == "1111"
    assert rep.contraction_estimate == pytest.approx(1.0)
    p = coordinate_projection(ideal_submodule(mod, [1]))
    assert is_ternary_conditional_expectation(p, rng).cell == "1111"
    twice = LinearMap(mod, mod, 2 * p.matrix)
    assert not is_ternary_conditional_expectation(twice, rng).idempotent


def test_q1_search_schema_and_replay():
    cfg = SearchConfig(count=120, bounds=Bounds(2, 2, 2), seed=3)
    rep = q1_search(cfg)
    assert rep["columns"] == ["idempotent", "range_ternary", "ternary_condition", "contractive_estimate"]
    assert sum(rep["cells"].values()) + rep["errors"] == rep["samples"] == 120
    assert set(rep["cells_by_recipe"]["ideal-projection"]) == {"1111"}
    assert report_bytes(q1_search(cfg)) == report_bytes(rep)
