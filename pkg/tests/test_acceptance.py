"""Acceptance gate: one test per criterion, each printing a single verdict line."""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from hilbmod.extensions import (
    busby_trivial_witness,
    construct_splitting,
    diagonal_extensions,
    to_blockwise_extension,
    verify_short_exact,
)
from hilbmod.fdcstar import enumerate_ideals
from hilbmod.fixtures import FIXTURES, load_fixture
from hilbmod.ideals import (
    as_ideal_submodule,
    classify,
    ideal_submodule,
    is_linking_ideal,
    is_ternary_ideal,
    supplement_correspondences,
)
from hilbmod.linking import (
    LinkingAlgebra,
    check_blockwise,
    extend_to_blockwise,
    phi_isometry_residual,
    preserves_module_corner,
)
from hilbmod.probes import IMPLICATIONS, SearchConfig, hereditary_search, q1_search, report_bytes
from hilbmod.quotient import quotient_module
from hilbmod.sampling import Bounds, random_extension, random_module, random_subspace, random_ternary_hom

TOL = 1e-9


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for the criterion, then assert."""
    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return report


def _fixture_modules():
    for name in FIXTURES:
        for mname, mod in load_fixture(name).modules.items():
            yield f"{name}:{mname}", mod


def test_criterion_1_three_checkers_agree(verdict):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    disagreements, ideals = [], 0
    for i in range(500):
        mod = random_module(rng, Bounds(3, 3, 3))
        recipe, k = random_subspace(rng, mod, tol=TOL)
        flags = (bool(is_ternary_ideal(k, TOL)), bool(as_ideal_submodule(k, TOL)), bool(is_linking_ideal(k, TOL)))
        ideals += flags[0]
        if len(set(flags)) != 1:
            disagreements.append((i, recipe, flags))
    elapsed = time.perf_counter() - start
    ok = not disagreements and elapsed < 60
    verdict(1, ok, f"500 subspaces, {ideals} ideals, {len(disagreements)} disagreements, {elapsed:.1f} s")


def test_criterion_2_kol17(verdict, kol17):
    k = kol17.subspace("K")
    cls = classify(k, TOL)
    flags = (cls.is_submodule, cls.is_ternary_ideal, cls.is_ideal_submodule, cls.is_linking_ideal)
    esc = cls.witnesses.get("ternary_ideal")
    escapes = esc is not None and not k.contains_rows(esc.vec[None])
    mod = k.parent
    m, n = mod.multiplicities, mod.base.block_dims
    # the witness must lie in E<E,K>, confirmed by direct block arithmetic
    basis = np.eye(mod.dim, dtype=complex)
    in_triple = esc is not None and oracles.in_span(oracles.triple_span(m, n, basis, basis, k.rows), esc.vec[None])
    ok = flags == (True, False, False, False) and escapes and in_triple
    verdict(2, ok, f"flags {flags}, witness escapes K: {escapes}, witness in E<E,K>: {in_triple}")


def test_criterion_3_supplement_bijections(verdict):
    bad, count = [], 0
    for label, mod in _fixture_modules():
        if mod.base.r > 3 or max(mod.base.block_dims + mod.multiplicities, default=0) > 3:
            continue
        count += 1
        table = supplement_correspondences(mod, TOL)
        want = 2 ** len(mod.support)
        corner = all(r.checks["P11"] and r.checks["P21"] and r.checks["P22"] and r.checks["block_level"]
                     for r in table.rows)
        if not (table.ok and len(table.rows) == want and table.reduced_linking_ideals == want and corner):
            bad.append((label, table.failures))
    verdict(3, not bad and count > 0, f"{count} fixture modules, failures {bad}")


def test_criterion_4_hom_extension(verdict):
    rng = np.random.default_rng(4)
    worst = {"multiplicativity": 0.0, "uniqueness": 0.0, "phi_isometry": 0.0}
    full = 0
    for _ in range(100):
        v = random_ternary_hom(rng)
        ext = extend_to_blockwise(v, tol=TOL)
        worst["multiplicativity"] = max(worst["multiplicativity"], ext.residuals["multiplicativity"])
        worst["phi_isometry"] = max(worst["phi_isometry"], phi_isometry_residual(v, ext.phi))
        if v.source.is_full:
            full += 1
            for reduced in (True, False):
                uniq = extend_to_blockwise(v, reduced=reduced, tol=TOL).residuals["uniqueness"]
                worst["uniqueness"] = max(worst["uniqueness"], uniq)
    ok = all(x < 1e-8 for x in worst.values()) and full > 0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(4, ok, f"100 homs ({full} full sources), max residuals: {detail}")


def test_criterion_5_blockwise_detection(verdict):
    scene = load_fixture("rotated-automorphism")
    src, _ = scene.map_ends("rotation")
    L = LinkingAlgebra(scene.modules[src[1]], src[2])
    rotated = not check_blockwise(scene.linear_map("rotation"), L, L, TOL)
    rng = np.random.default_rng(5)
    misses = 0
    for _ in range(100):
        ext = extend_to_blockwise(random_ternary_hom(rng), tol=TOL)
        corner = preserves_module_corner(ext.assembled, ext.source, ext.target, TOL)
        if not (corner and check_blockwise(ext.assembled, ext.source, ext.target, TOL)):
            misses += 1
    verdict(5, rotated and misses == 0, f"rotation flagged: {rotated}, {misses}/100 blockwise homs missed")


def _quotient_law_defect(mod, k, q):
    v, Q = q.v.matrix, q.quotient_module
    m, n = mod.multiplicities, mod.base.block_dims
    mq, nq = Q.multiplicities, Q.base.block_dims
    basis = np.eye(mod.dim)
    defects = []
    for x in basis:
        for y in basis:
            lhs = oracles.inner(mq, nq, v @ x, v @ y)
            rhs = oracles.to_blocks(nq, nq, q.phi.matrix @ oracles.to_vec(oracles.inner(m, n, x, y)))
            if not all(np.array_equal(a, b) for a, b in zip(lhs, rhs)):
                defects.append("inner")
            for z in basis:
                if not np.array_equal(v @ oracles.triple(m, n, x, y, z),
                                      oracles.triple(mq, nq, v @ x, v @ y, v @ z)):
                    defects.append("triple")
    if mod.dim - oracles.rank(v) != k.dim or not q.v.kernel().equals(k):
        defects.append("kernel")
    return sorted(set(defects))


def test_criterion_6_quotients(verdict):
    bad, count = [], 0
    for label, mod in _fixture_modules():
        for ideal in enumerate_ideals(mod.base):
            k = ideal_submodule(mod, ideal, TOL)
            count += 1
            defects = _quotient_law_defect(mod, k, quotient_module(mod, k, tol=TOL).canonical)
            if defects:
                bad.append((label, sorted(ideal.blocks), defects))
    verdict(6, not bad and count > 0, f"{count} ternary ideals, failures {bad}")


def test_criterion_7_extensions(verdict):
    rng = np.random.default_rng(7)
    failures = []
    worst = 0.0
    for i in range(100):
        seq = random_extension(rng, Bounds(3, 3, 3))
        steps = {}
        steps["exact"] = verify_short_exact(seq, TOL).ok
        bw = to_blockwise_extension(seq, TOL)
        steps["blockwise"] = bw.report.ok
        steps["round_trip"] = bw.round_trip == {"v": 0.0, "u": 0.0}
        ranges, compacts = diagonal_extensions(seq, TOL)
        steps["diagonal"] = ranges.report.ok and compacts.report.ok
        split = construct_splitting(seq, TOL)
        worst = max(worst, split.residual)
        steps["splitting"] = split.residual < 1e-8
        steps["witness"] = busby_trivial_witness(seq, TOL).w.verified
        if not all(steps.values()):
            failures.append((i, [k for k, v in steps.items() if not v]))
    verdict(7, not failures, f"100 extensions, max |us - id| {worst:.1e}, failures {failures}")


def test_criterion_8_hereditary_implications(verdict):
    rep = hereditary_search(SearchConfig(count=10_000, bounds=Bounds(2, 2, 2), seed=8))
    counts = rep["violation_counts"]
    ok = rep["samples"] == 10_000 and set(counts) == set(IMPLICATIONS) and not any(counts.values())
    verdict(8, ok, f"{rep['samples']} samples, {rep['errors']} errors, violations {counts}, "
                   f"discrepancy count {rep['discrepancy_count']} (reported only)")


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "hilbmod.cli", *argv, "--format", "structured"],
                          capture_output=True)
    return proc.stdout


def test_criterion_9_reproducibility(verdict):
    cfg = SearchConfig(count=400, seed=9)
    lib = (report_bytes(hereditary_search(cfg)) == report_bytes(hereditary_search(cfg))
           and report_bytes(q1_search(cfg)) == report_bytes(q1_search(cfg)))
    runs = [("search-hereditary", "--count", "200", "--seed", "9"),
            ("search-q1", "--count", "200", "--seed", "9"),
            ("classify-ideal", "--scene", "kol17"),
            ("split", "--scene", "fixture-d")]
    cli_same = all(_cli(*argv) == _cli(*argv) != b"" for argv in runs)
    parsed = json.loads(_cli(*runs[0]))
    verdict(9, lib and cli_same and parsed["seed"] == 9,
            f"library reports identical: {lib}, CLI structured output identical: {cli_same}")
