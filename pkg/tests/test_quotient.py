import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import modules, seeds
from hilbmod.core import RefusalError
from hilbmod.fdcstar import BlockIdeal, FdAlgebra, enumerate_ideals
from hilbmod.fixtures import FIXTURES, load_fixture
from hilbmod.hmod import HModule
from hilbmod.ideals import ideal_submodule
from hilbmod.quotient import (
    block_quotient,
    compose_quotients,
    is_generalized_isometry,
    is_phi_isometry,
    norm_defect,
    quotient_module,
)
from hilbmod.sampling import random_module, random_ternary_hom
from hilbmod.subspace import LinearMap, coordinate_subspace, whole, zero


def _fixture_ideals():
    cases = []
    for name in FIXTURES:
        for mname, mod in load_fixture(name).modules.items():
            for ideal in enumerate_ideals(mod.base):
                cases.append((f"{name}:{mname}:{sorted(ideal.blocks)}", mod, ideal))
    return cases


def _check_laws(mod, k, q):
    v, Q = q.v, q.quotient_module
    m, n = mod.multiplicities, mod.base.block_dims
    mq, nq = Q.multiplicities, Q.base.block_dims
    basis = np.eye(mod.dim)
    for x in basis:
        for y in basis:
            lhs = oracles.inner(mq, nq, v.matrix @ x, v.matrix @ y)
            rhs = oracles.to_blocks(nq, nq, q.phi.matrix @ oracles.to_vec(oracles.inner(m, n, x, y)))
            assert all(np.array_equal(a, b) for a, b in zip(lhs, rhs))
    assert mod.dim - v.rank() == k.dim
    assert v.kernel().equals(k)
    for x in basis:
        for y in basis:
            for z in basis:
                lhs = v.matrix @ oracles.triple(m, n, x, y, z)
                rhs = oracles.triple(mq, nq, v.matrix @ x, v.matrix @ y, v.matrix @ z)
                assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("label,mod,ideal", _fixture_ideals(), ids=lambda c: c if isinstance(c, str) else "")
def test_quotient_laws_on_fixture_ideals(label, mod, ideal):
    k = ideal_submodule(mod, ideal)
    rep = quotient_module(mod, k)
    assert rep.canonical.kernel_ok
    assert is_phi_isometry(rep.canonical.v, rep.canonical.phi)
    _check_laws(mod, k, rep.canonical)


def test_zero_and_whole():
    mod = HModule(FdAlgebra((2, 1)), (1, 2))
    q = quotient_module(mod, zero(mod)).canonical
    assert q.quotient_module == mod and np.array_equal(q.phi.matrix, np.eye(mod.base.dim))
    nonfull = HModule(FdAlgebra((2, 1)), (1, 0))
    q = quotient_module(nonfull, whole(nonfull)).canonical
    assert q.quotient_module.dim == 0
    assert q.ideal.blocks == frozenset({0})
    assert q.quotient_module.base.block_dims == (1,)


def test_fixture_d_quotient(fixture_d):
    E = fixture_d.modules["E"]
    q = quotient_module(E, fixture_d.subspace("K")).canonical
    assert q.quotient_module.base.block_dims == (2,)
    assert q.quotient_module.multiplicities == (1,)
    block0 = E.block_indices([0])
    assert np.array_equal(q.v.matrix, np.eye(E.dim)[block0])


def test_non_ideal_is_refused(kol17):
    k = kol17.subspace("K")
    with pytest.raises(RefusalError) as err:
        quotient_module(k.parent, k)
    assert err.value.report.is_submodule and not err.value.report.is_ternary_ideal


def test_larger_ideal_agrees_on_support():
    mod = HModule(FdAlgebra((2, 1)), (1, 0))
    k = whole(mod)
    rep = quotient_module(mod, k, ideal=BlockIdeal(mod.base, frozenset({0, 1})))
    assert rep.alternative.quotient_module.dim == 0
    assert rep.alternative.quotient_module.base.dim == 0
    with pytest.raises(RefusalError):
        quotient_module(HModule(FdAlgebra((2, 1)), (1, 1)), ideal_submodule(HModule(FdAlgebra((2, 1)), (1, 1)), [0]),
                        ideal=BlockIdeal(FdAlgebra((2, 1)), frozenset({0, 1})))


@given(modules(), seeds)
def test_composition_of_quotients(mod, seed):
    rng = np.random.default_rng(seed)
    first = [k for k in range(mod.base.r) if rng.random() < 0.4]
    k = ideal_submodule(mod, first)
    Q = quotient_module(mod, k).canonical.quotient_module
    second = [j for j in range(Q.base.r) if rng.random() < 0.5]
    k2 = ideal_submodule(Q, second)
    assert compose_quotients(mod, k, k2)


def test_phi_isometry_examples():
    mod = HModule(FdAlgebra((2, 1)), (1, 1))
    ident = LinearMap.identity(mod)
    phi = LinearMap.identity(mod.base)
    assert is_phi_isometry(ident, phi)
    chk = is_phi_isometry(LinearMap(mod, mod, 2 * np.eye(mod.dim)), phi)
    assert not chk and chk.residual == pytest.approx(3.0)


@given(seeds)
def test_ternary_homs_out_of_full_modules_are_generalized_isometries(seed):
    rng = np.random.default_rng(seed)
    v = random_ternary_hom(rng, source=random_module(rng, allow_empty_blocks=False))
    assert v.source.is_full
    gen = is_generalized_isometry(v)
    assert gen
    if gen.faithful:
        assert norm_defect(v, rng, 32) < 1e-9


def test_zero_map_gives_zero_phi():
    mod = HModule(FdAlgebra((2,)), (1,))
    gen = is_generalized_isometry(LinearMap.zero_map(mod, mod))
    assert gen and np.all(gen.phi.matrix == 0) and not gen.faithful


def test_non_isometry_has_no_phi():
    mod = HModule(FdAlgebra((1,)), (2,))
    v = LinearMap(mod, mod, np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert not is_generalized_isometry(v)


def test_coordinate_block_quotient_kernel():
    mod = HModule(FdAlgebra((1, 2, 1)), (2, 1, 0))
    q = block_quotient(mod, BlockIdeal(mod.base, frozenset({1})))
    assert q.v.kernel().equals(coordinate_subspace(mod, mod.block_indices([1])))
