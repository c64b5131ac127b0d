import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import modules, rand_c, seeds
from hilbmod.core import StructuralError
from hilbmod.fdcstar import FdAlgebra, alg_adjoint, alg_norm, is_subalgebra
from hilbmod.hmod import (
    HModule,
    act,
    apply_compact,
    inner,
    module_norm,
    product_span,
    range_ideal,
    rank_one,
)
from hilbmod.sampling import random_ternary_subspace
from hilbmod.subspace import (
    contains,
    coordinate_subspace,
    from_rows,
    ortho_complement,
    span,
    subspace_sum,
    whole,
    zero,
)

ROWS_M2 = HModule(FdAlgebra((2,)), (1,))


def random_x(rng, mod):
    return mod.from_vec(rand_c(rng, mod.dim))


def random_b(rng, mod):
    return mod.base.element([rand_c(rng, (d, d)) for d in mod.base.block_dims])


def test_inner_with_zero(rng):
    y = random_x(rng, ROWS_M2)
    assert np.all(inner(ROWS_M2.zero(), y).vec == 0)


def test_inner_of_first_row_vector():
    x = ROWS_M2.from_vec(np.array([1, 0]))
    assert np.array_equal(inner(x, x).blocks[0], np.array([[1, 0], [0, 0]]))


@given(modules(), seeds)
def test_inner_product_laws(mod, seed):
    rng = np.random.default_rng(seed)
    x, y, b = random_x(rng, mod), random_x(rng, mod), random_b(rng, mod)
    xy = inner(x, y)
    assert np.allclose(inner(y, x).vec, alg_adjoint(xy).vec)
    assert np.allclose(inner(x, act(y, b)).vec, (xy @ b).vec)
    for blk in inner(x, x).blocks:
        assert np.linalg.eigvalsh(blk).min() >= -1e-9 * max(1, np.abs(blk).max())
    want = oracles.inner(mod.multiplicities, mod.base.block_dims, x.vec, y.vec)
    assert all(np.allclose(a, w) for a, w in zip(xy.blocks, want))


@given(modules(), seeds)
def test_cstar_identity_and_cauchy_schwarz(mod, seed):
    rng = np.random.default_rng(seed)
    x, y = random_x(rng, mod), random_x(rng, mod)
    assert alg_norm(inner(x, x)) == pytest.approx(module_norm(x) ** 2, rel=1e-9)
    assert alg_norm(inner(x, y)) <= module_norm(x) * module_norm(y) * (1 + 1e-9)


def test_cstar_identity_thousand_samples(rng):
    mod = HModule(FdAlgebra((2, 3, 1)), (3, 1, 2))
    for _ in range(1000):
        x = random_x(rng, mod)
        assert alg_norm(inner(x, x)) == pytest.approx(module_norm(x) ** 2, rel=1e-9)


def test_action_examples(rng):
    mod = HModule(FdAlgebra((2, 1)), (2, 3))
    x, b = random_x(rng, mod), random_b(rng, mod)
    assert np.array_equal(act(x, mod.base.unit()).vec, x.vec)
    assert np.all(act(x, mod.base.zero()).vec == 0)
    assert np.allclose(act(x, b).vec, oracles.act(mod.multiplicities, mod.base.block_dims, x.vec, b.blocks))


def test_action_needs_matching_base():
    with pytest.raises(StructuralError):
        act(ROWS_M2.zero(), FdAlgebra((1,)).unit())


@given(modules(), seeds)
def test_rank_one_acts_as_ternary_product(mod, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_x(rng, mod) for _ in range(3))
    want = oracles.triple(mod.multiplicities, mod.base.block_dims, x.vec, y.vec, z.vec)
    assert np.allclose(apply_compact(rank_one(x, y), z).vec, want)
    assert np.allclose(act(x, inner(y, z)).vec, want)


def test_span_examples(rng):
    mod = HModule(FdAlgebra((2, 1)), (2, 2))
    assert span([], mod).dim == 0
    x = random_x(rng, mod)
    assert span([x, x * 2]).dim == 1
    assert mod.dim == 6
    many = from_rows(mod, rand_c(rng, (50, mod.dim)))
    assert many.dim == oracles.rank(rand_c(rng, (50, mod.dim))) == 6


@given(modules(), seeds)
def test_span_is_idempotent(mod, seed):
    rng = np.random.default_rng(seed)
    s = from_rows(mod, rand_c(rng, (int(rng.integers(0, mod.dim + 1)), mod.dim)))
    again = from_rows(mod, s.rows)
    assert again.dim == s.dim and again.equals(s)


def test_product_span_zero_and_kol17(kol17):
    k = kol17.subspace("K")
    e = whole(k.parent)
    assert product_span("inner", zero(k.parent), e).dim == 0
    ke = product_span("inner", k, e)
    assert ke.equals(coordinate_subspace(k.parent.base, [0]))


def _triple_oracle_case(rng, mod):
    m, n = mod.multiplicities, mod.base.block_dims
    k = from_rows(mod, rand_c(rng, (int(rng.integers(1, 3)), mod.dim)))
    e = whole(mod)
    got = product_span("ternary", e, k, e)
    want = oracles.triple_span(m, n, np.eye(mod.dim), k.rows, np.eye(mod.dim))
    return got, want


@given(modules(), seeds)
def test_ternary_product_span_matches_triples(mod, seed):
    got, want = _triple_oracle_case(np.random.default_rng(seed), mod)
    assert got.dim == oracles.rank(want)
    assert oracles.same_span(got.rows, want)


def test_product_span_small_fixtures_exhaustive():
    for n, m in (((2,), (1,)), ((2, 1), (1, 1)), ((1, 1), (2, 2)), ((2, 1), (1, 0))):
        mod = HModule(FdAlgebra(n), m)
        e = whole(mod)
        basis = np.eye(mod.dim)
        tern = oracles.triple_span(m, n, basis, basis, basis)
        assert oracles.same_span(product_span("ternary", e, e, e).rows, tern)
        pairs = [oracles.to_vec(oracles.inner(m, n, x, y)) for x in basis for y in basis]
        assert oracles.same_span(product_span("inner", e, e).rows, np.array(pairs))


@given(modules(), seeds)
def test_product_span_is_monotone(mod, seed):
    rng = np.random.default_rng(seed)
    a = from_rows(mod, rand_c(rng, (1, mod.dim)))
    a2 = subspace_sum(a, from_rows(mod, rand_c(rng, (1, mod.dim))))
    b = from_rows(mod, rand_c(rng, (2, mod.dim)))
    assert product_span("inner", a, b).issubset(product_span("inner", a2, b))
    assert product_span("ternary", a, b, a).issubset(product_span("ternary", a2, b, a2))
    assert product_span("rankone", a, b).issubset(product_span("rankone", a2, b))


def test_product_span_kind_checks():
    e = whole(ROWS_M2)
    with pytest.raises(StructuralError):
        product_span("bogus", e, e)
    with pytest.raises(StructuralError):
        product_span("ternary", e, e)


def test_range_ideal_examples():
    mod = HModule(FdAlgebra((2, 3, 1)), (2, 0, 1))
    assert range_ideal(mod).ideal.blocks == frozenset({0, 2})
    zero_mod = HModule(FdAlgebra((2,)), (0,))
    assert range_ideal(zero_mod).ideal.blocks == frozenset()


@given(modules(), seeds)
def test_range_of_ternary_subspace_is_subalgebra(mod, seed):
    rng = np.random.default_rng(seed)
    _, f = random_ternary_subspace(rng, mod)
    bf = range_ideal(f).span
    n = mod.base.block_dims
    prods, adjs = [], []
    for a in bf.rows:
        ab = oracles.to_blocks(n, n, a)
        adjs.append(oracles.to_vec([x.conj().T for x in ab]))
        for b in bf.rows:
            prods.append(oracles.to_vec([x @ y for x, y in zip(ab, oracles.to_blocks(n, n, b))]))
    if bf.dim:
        assert oracles.in_span(bf.rows, np.array(prods + adjs))
    assert is_subalgebra(bf)


def test_complement_examples(fixture_d):
    mod = ROWS_M2
    assert ortho_complement(zero(mod)).equals(whole(mod))
    assert ortho_complement(whole(mod)).dim == 0
    e = fixture_d.modules["E"]
    k = fixture_d.subspace("K")
    comp = ortho_complement(k)
    assert comp.equals(coordinate_subspace(e, e.block_indices([0])))


def test_contains_examples(rng):
    mod = HModule(FdAlgebra((2, 2)), (1, 2))
    a = from_rows(mod, rand_c(rng, (3, mod.dim)))
    assert contains(a, np.zeros(mod.dim)).ok and contains(a, np.zeros(mod.dim)).residual == 0
    assert not contains(zero(mod), rand_c(rng, mod.dim))
    coeffs = rand_c(rng, 3)
    assert contains(a, coeffs @ a.rows)
