"""Ideal notions for subspaces of a Hilbert module and their correspondences.

Three independent checkers decide whether a subspace K of E is an ideal:

* ternary:  E<K,E> inside K, computed as the span of (E K^*) applied to E;
* submodule: I = span<K,E> must be a block ideal of B and span(E I) = K;
* linking:  the corner matrix of K must be an ideal of the reduced linking
  algebra, tested by multiplying with algebra generators of the carrier.

None of them calls another, so their agreement is a genuine cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, Check, RefusalError, StructuralError, VerificationError
from .fdcstar import (
    ENUMERATION_BOUND,
    BlockIdeal,
    classify_ideal,
    enumerate_ideals,
)
from .hmod import HModule, action_rows, product_span
from .linking import (
    LinkingAlgebra,
    corner_subspace,
    is_two_sided_ideal,
    linking_subspace,
)
from .subspace import Subspace, coordinate_subspace, whole


def _module_of(k: Subspace) -> HModule:
    if not isinstance(k.parent, HModule):
        raise StructuralError("expected a subspace of a Hilbert module")
    return k.parent


def ideal_submodule(module: HModule, ideal, tol: float = DEFAULT_TOL) -> Subspace:
    """span(E I) written down directly: the E-blocks indexed by ``ideal``."""
    blocks = ideal.blocks if isinstance(ideal, BlockIdeal) else frozenset(ideal)
    return coordinate_subspace(module, module.block_indices(blocks), tol)


def module_blocks(k: Subspace, tol: float | None = None) -> frozenset:
    """Blocks k (with m_k > 0) whose whole E-block lies in ``k``."""
    mod = _module_of(k)
    out = set()
    for b in mod.support:
        idx = mod.block_indices([b])
        if k.contains_rows(np.eye(mod.dim, dtype=complex)[idx], tol):
            out.add(b)
    return frozenset(out)


def is_submodule(k: Subspace, tol: float | None = None) -> Check:
    mod = _module_of(k)
    return k.contains_rows(action_rows(mod, k.rows, np.eye(mod.base.dim, dtype=complex)), tol)


def is_ternary_subspace(f: Subspace, tol: float | None = None) -> Check:
    return product_span("ternary", f, f, f, tol).issubset(f, tol)


def is_ternary_ideal(k: Subspace, tol: float | None = None) -> Check:
    """E<K,E> inside K; the witness is an escaping element of E<K,E>."""
    mod = _module_of(k)
    e = whole(mod, k.tol)
    chk = product_span("ternary", e, k, e, tol).issubset(k, tol)
    if chk:
        return chk
    return Check(False, chk.residual, mod.from_vec(chk.witness))


@dataclass(frozen=True)
class SubmoduleVerdict:
    """Outcome of :func:`as_ideal_submodule`."""

    ideal: BlockIdeal | None
    inner_span: Subspace
    witness: object = None
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ideal is not None


def as_ideal_submodule(k: Subspace, tol: float | None = None) -> SubmoduleVerdict:
    """Return I = span<K,E> if it is an ideal of B with span(E I) = K."""
    mod = _module_of(k)
    e = whole(mod, k.tol)
    inner = product_span("inner", k, e, tol=tol)
    verdict = classify_ideal(inner, tol)
    if not verdict:
        return SubmoduleVerdict(None, inner, verdict.witness, verdict.residual)
    ei = product_span("action", e, verdict.ideal.subspace(inner.tol), tol=tol)
    escape = ei.issubset(k, tol)
    if not escape:
        return SubmoduleVerdict(None, inner, mod.from_vec(escape.witness), escape.residual)
    missing = k.issubset(ei, tol)
    if not missing:
        return SubmoduleVerdict(None, inner, mod.from_vec(missing.witness), missing.residual)
    return SubmoduleVerdict(verdict.ideal, inner)


def is_linking_ideal(k: Subspace, tol: float | None = None) -> Check:
    """Corner matrix of K is a two-sided ideal of the reduced linking algebra."""
    L = LinkingAlgebra(_module_of(k), reduced=True)
    corner = linking_subspace(L, k)
    chk = is_two_sided_ideal(corner, tol)
    if chk:
        return chk
    return Check(False, chk.residual, L.carrier.from_vec(chk.witness))


@dataclass(frozen=True)
class OneSided:
    left: Check
    right: Check
    ternary_ideal: bool

    @property
    def both(self) -> bool:
        return bool(self.left) and bool(self.right)


def corollary_check(k: Subspace, tol: float | None = None) -> OneSided:
    """The conditions E<E,K> in K (left) and K<E,E> in K (right).

    Left is evaluated as K(E) acting on K, right as K acting on B_E; both are
    compared with the ternary-ideal verdict.
    """
    mod = _module_of(k)
    e = whole(mod, k.tol)
    left = product_span("compact", product_span("rankone", e, e, tol=tol), k, tol=tol).issubset(k, tol)
    right = product_span("action", k, product_span("inner", e, e, tol=tol), tol=tol).issubset(k, tol)
    ternary = bool(is_ternary_ideal(k, tol))
    if (bool(left) and bool(right)) != ternary:
        raise VerificationError(
            f"one-sided conditions (left={bool(left)}, right={bool(right)}) "
            f"disagree with the ternary ideal verdict {ternary}"
        )
    return OneSided(left, right, ternary)


@dataclass(frozen=True)
class IdealClassification:
    is_submodule: bool
    is_ternary_subspace: bool
    is_ternary_ideal: bool
    is_linking_ideal: bool
    ideal_submodule_witness: BlockIdeal | None
    minimal_ideal: BlockIdeal | None
    witnesses: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    @property
    def is_ideal_submodule(self) -> bool:
        return self.ideal_submodule_witness is not None

    @property
    def is_ideal(self) -> bool:
        return self.is_ternary_ideal


def classify(k: Subspace, tol: float | None = None) -> IdealClassification:
    """Run every checker and insist that the three ideal verdicts agree."""
    sub = is_submodule(k, tol)
    tern_sub = is_ternary_subspace(k, tol)
    tern = is_ternary_ideal(k, tol)
    link = is_linking_ideal(k, tol)
    as_sub = as_ideal_submodule(k, tol)
    flags = {"ternary": bool(tern), "submodule": bool(as_sub), "linking": bool(link)}
    if len(set(flags.values())) != 1:
        raise VerificationError(
            f"ideal checkers disagree: {flags} "
            f"(residuals {tern.residual:.3e}, {as_sub.residual:.3e}, {link.residual:.3e})",
            report=flags,
        )
    kk = product_span("inner", k, k, tol=tol)
    minimal = classify_ideal(kk, tol).ideal
    if as_sub and minimal != as_sub.ideal:
        raise VerificationError(
            f"ideal {as_sub.ideal} differs from the range ideal {minimal} of K"
        )
    witnesses, residuals = {}, {
        "submodule": sub.residual,
        "ternary_subspace": tern_sub.residual,
        "ternary_ideal": tern.residual,
        "ideal_submodule": as_sub.residual,
        "linking_ideal": link.residual,
    }
    for name, chk in (("submodule", sub), ("ternary_subspace", tern_sub)):
        if not chk:
            witnesses[name] = k.parent.from_vec(chk.witness)
    if not tern:
        witnesses["ternary_ideal"] = tern.witness
    if not as_sub:
        witnesses["ideal_submodule"] = as_sub.witness
    if not link:
        witnesses["linking_ideal"] = link.witness
    return IdealClassification(
        is_submodule=bool(sub),
        is_ternary_subspace=bool(tern_sub),
        is_ternary_ideal=bool(tern),
        is_linking_ideal=bool(link),
        ideal_submodule_witness=as_sub.ideal,
        minimal_ideal=minimal,
        witnesses=witnesses,
        residuals=residuals,
    )


# -- correspondences ---------------------------------------------------------


@dataclass(frozen=True)
class Correspondence:
    """One row: an ideal I of B_E and the objects it corresponds to.

    All block sets are 0-based indices of B (for I, K, J) or of the reduced
    linking carrier (for the linking ideal).
    """

    ideal: frozenset
    submodule: frozenset
    compact_ideal: frozenset
    linking_ideal: frozenset
    checks: dict


@dataclass(frozen=True)
class CorrespondenceTable:
    module: HModule
    rows: tuple
    reduced_linking_ideals: int
    full_linking_ideals: int
    distinct_from_base: int
    ok: bool
    failures: tuple = ()


def _same(a: Subspace, b: Subspace, tol) -> bool:
    return a.equals(b, tol)


def supplement_correspondences(module: HModule, tol: float = DEFAULT_TOL,
                               bound: int = ENUMERATION_BOUND) -> CorrespondenceTable:
    """Enumerate ideals of B_E and verify the corner formulas and bijections."""
    if module.base.r > bound:
        raise RefusalError(f"{module.base.r} blocks exceed the enumeration bound {bound}")
    E, support = module, module.support
    L = LinkingAlgebra(E, reduced=True)
    Lfull = LinkingAlgebra(E, reduced=False)
    e = whole(E, tol)
    kc = E.compacts()
    pos_of = {k: p for p, k in enumerate(support)}
    rows, failures = [], []

    for sub in enumerate_ideals(E.range_algebra(), bound):
        blocks = frozenset(support[p] for p in sub.blocks)
        ideal = BlockIdeal(E.base, blocks)
        K = product_span("action", e, ideal.subspace(tol), tol=tol)
        J = product_span("rankone", K, K, tol=tol)
        corner = linking_subspace(L, K)
        checks = {}
        vI = classify_ideal(corner, tol)
        checks["linking_is_ideal"] = bool(vI)
        vJ = classify_ideal(J, tol)
        checks["compact_is_ideal"] = bool(vJ)
        i_corner = coordinate_subspace(L.corner_algebra, L.corner_algebra.block_indices(sub.blocks), tol)
        checks["P11"] = _same(corner_subspace(L, 1, 1, corner), i_corner, tol)
        checks["P21"] = _same(corner_subspace(L, 2, 1, corner), K, tol)
        checks["P12"] = _same(corner_subspace(L, 1, 2, corner), K, tol)
        checks["P22"] = _same(corner_subspace(L, 2, 2, corner), J, tol)
        checks["K=span(JK)"] = _same(product_span("compact", J, K, tol=tol), K, tol)
        checks["J=span(KK*)"] = _same(product_span("rankone", K, K, tol=tol), J, tol)
        kk = classify_ideal(product_span("inner", K, K, tol=tol), tol)
        checks["I=span<K,K>"] = bool(kk) and kk.ideal == ideal
        checks["K is ternary ideal"] = bool(is_ternary_ideal(K, tol))
        kblocks = module_blocks(K, tol)
        jblocks = frozenset(support[p] for p in vJ.ideal.blocks) if vJ else frozenset()
        lblocks = frozenset(vI.ideal.blocks) if vI else frozenset()
        # block level: every object is indexed by the same subset of B_E
        checks["block_level"] = (
            kblocks == blocks and jblocks == blocks
            and lblocks == frozenset(pos_of[k] for k in blocks)
        )
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            failures.append((sorted(blocks), bad))
        rows.append(Correspondence(blocks, kblocks, jblocks, lblocks, checks))

    n = 2 ** len(support)
    for attr in ("ideal", "submodule", "compact_ideal", "linking_ideal"):
        if len({getattr(r, attr) for r in rows}) != n:
            failures.append(("cardinality", attr))

    # every ideal of the reduced linking algebra arises, and round-trips through P21
    red = enumerate_ideals(L.carrier, bound)
    if {r.linking_ideal for r in rows} != {i.blocks for i in red}:
        failures.append(("surjectivity", "reduced linking"))
    for lid in red:
        K = corner_subspace(L, 2, 1, lid.subspace(tol))
        expect = frozenset(support[p] for p in lid.blocks)
        if module_blocks(K, tol) != expect or K.dim != E.block_indices(expect).size:
            failures.append(("round trip", sorted(lid.blocks)))

    # full linking algebra: ideals correspond to all of B via P11; their
    # submodules collapse onto the 2^{r'} ideal submodules
    full = enumerate_ideals(Lfull.carrier, bound)
    seen = set()
    for lid in full:
        corner = lid.subspace(tol)
        p11 = classify_ideal(corner_subspace(Lfull, 1, 1, corner), tol)
        if not p11 or p11.ideal.blocks != lid.blocks:
            failures.append(("full P11", sorted(lid.blocks)))
        seen.add(module_blocks(corner_subspace(Lfull, 2, 1, corner), tol))
    base_ks = {module_blocks(product_span("action", e, i.subspace(tol), tol=tol), tol)
               for i in enumerate_ideals(E.base, bound)}
    if len(seen) != n or base_ks != seen:
        failures.append(("collapse", len(seen), len(base_ks)))

    if kc.r != len(support):
        failures.append(("compacts", kc.r))
    return CorrespondenceTable(
        module=E,
        rows=tuple(rows),
        reduced_linking_ideals=len(red),
        full_linking_ideals=len(full),
        distinct_from_base=len(base_ks),
        ok=not failures,
        failures=tuple(failures),
    )


__all__ = [
    "Correspondence",
    "CorrespondenceTable",
    "IdealClassification",
    "OneSided",
    "SubmoduleVerdict",
    "as_ideal_submodule",
    "classify",
    "corollary_check",
    "ideal_submodule",
    "is_linking_ideal",
    "is_submodule",
    "is_ternary_ideal",
    "is_ternary_subspace",
    "module_blocks",
    "supplement_correspondences",
]
