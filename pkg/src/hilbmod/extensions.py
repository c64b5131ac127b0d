"""Short exact sequences 0 -> G -> E -> F -> 0 of ternary homomorphisms.

In finite dimension every such extension splits: the coordinate orthogonal
complement of vG is again a ternary ideal, u maps it bijectively onto F, and
inverting that restriction gives a ternary splitting.  The complement and vG
then exhibit E as the external direct sum F + G.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, RefusalError, StructuralError, VerificationError
from .fdcstar import BlockIdeal, FdAlgebra, classify_ideal, is_algebra_hom
from .hmod import HModule, product_span
from .ideals import is_ternary_ideal
from .linking import BlockwiseHom, TernaryHom, extend_to_blockwise, inclusion_of_ideal_blocks
from .quotient import block_quotient
from .subspace import LinearMap, Subspace, ortho_complement


@dataclass(frozen=True, eq=False)
class ExactSequence:
    G: HModule
    E: HModule
    F: HModule
    v: LinearMap
    u: LinearMap

    def __post_init__(self):
        if self.v.source != self.G or self.v.target != self.E:
            raise StructuralError("v must map G into E")
        if self.u.source != self.E or self.u.target != self.F:
            raise StructuralError("u must map E onto F")


@dataclass(frozen=True)
class ExactnessReport:
    ok: bool
    checks: dict
    residuals: dict
    witnesses: dict = field(default_factory=dict)
    image: Subspace | None = None
    kernel: Subspace | None = None


def _exactness(inj_map, surj_map, tol: float):
    """Injectivity of inj_map, surjectivity of surj_map and image = kernel."""
    checks, residuals, witnesses = {}, {}, {}
    kernel_in = inj_map.kernel(tol)
    checks["injective"] = kernel_in.dim == 0
    if kernel_in.dim:
        witnesses["injective"] = kernel_in.rows[0]
    image_out = surj_map.image(tol)
    checks["surjective"] = image_out.dim == surj_map.target.dim
    if not checks["surjective"]:
        witnesses["surjective"] = ortho_complement(image_out).rows[0]
    image = inj_map.image(tol)
    kernel = surj_map.kernel(tol)
    into = image.issubset(kernel, tol)
    back = kernel.issubset(image, tol)
    checks["exact"] = bool(into) and bool(back)
    residuals["image_in_kernel"] = into.residual
    residuals["kernel_in_image"] = back.residual
    if not into:
        witnesses["image_not_in_kernel"] = into.witness
    if not back:
        witnesses["kernel_not_in_image"] = back.witness
    residuals["composite"] = float(np.abs(surj_map.matrix @ inj_map.matrix).max(initial=0.0))
    return checks, residuals, witnesses, image, kernel


def verify_short_exact(seq: ExactSequence, tol: float = DEFAULT_TOL) -> ExactnessReport:
    tv, tu = TernaryHom.of(seq.v, tol), TernaryHom.of(seq.u, tol)
    checks, residuals, witnesses, image, kernel = _exactness(seq.v, seq.u, tol)
    checks["v_ternary"], checks["u_ternary"] = tv.verified, tu.verified
    residuals["v_ternary"], residuals["u_ternary"] = tv.residual, tu.residual
    return ExactnessReport(all(checks.values()), checks, residuals, witnesses, image, kernel)


def _require(seq: ExactSequence, tol: float) -> ExactnessReport:
    rep = verify_short_exact(seq, tol)
    if not rep.ok:
        failed = sorted(k for k, ok in rep.checks.items() if not ok)
        raise RefusalError(f"sequence is not a short exact sequence of ternary homomorphisms: {failed}", rep)
    return rep


@dataclass(frozen=True)
class BlockwiseExtension:
    psi: BlockwiseHom
    phi: BlockwiseHom
    report: ExactnessReport
    round_trip: dict


def to_blockwise_extension(seq: ExactSequence, tol: float = DEFAULT_TOL) -> BlockwiseExtension:
    """Extend v and u to the reduced linking algebras and check exactness there."""
    _require(seq, tol)
    psi = extend_to_blockwise(seq.v, reduced=True, tol=tol)
    phi = extend_to_blockwise(seq.u, reduced=True, tol=tol)
    checks, residuals, witnesses, image, kernel = _exactness(psi.assembled, phi.assembled, tol)
    round_trip = {
        "v": float(np.abs(psi.corner_map(2, 1) - seq.v.matrix).max(initial=0.0)),
        "u": float(np.abs(phi.corner_map(2, 1) - seq.u.matrix).max(initial=0.0)),
    }
    checks["round_trip"] = round_trip["v"] == 0.0 and round_trip["u"] == 0.0
    rep = ExactnessReport(all(checks.values()), checks, residuals, witnesses, image, kernel)
    if not rep.ok:
        raise VerificationError(f"blockwise sequence is not exact: {checks}", rep)
    return BlockwiseExtension(psi, phi, rep, round_trip)


@dataclass(frozen=True)
class AlgebraSequence:
    """0 -> A -> B -> C -> 0 of algebra homomorphisms, with its verdicts."""

    first: LinearMap
    second: LinearMap
    report: ExactnessReport

    @property
    def algebras(self) -> tuple[FdAlgebra, FdAlgebra, FdAlgebra]:
        return self.first.source, self.first.target, self.second.target


def _algebra_sequence(first: LinearMap, second: LinearMap, tol: float) -> AlgebraSequence:
    checks, residuals, witnesses, image, kernel = _exactness(first, second, tol)
    for name, m in (("first_hom", first), ("second_hom", second)):
        chk = is_algebra_hom(m, tol=1e-8)
        checks[name], residuals[name] = bool(chk), chk.residual
    return AlgebraSequence(first, second, ExactnessReport(all(checks.values()), checks, residuals, witnesses))


def diagonal_extensions(seq: ExactSequence, tol: float = DEFAULT_TOL) -> tuple[AlgebraSequence, AlgebraSequence]:
    """Corner (1,1) sequence of range ideals and corner (2,2) sequence of compacts."""
    bw = to_blockwise_extension(seq, tol)
    ranges = _algebra_sequence(bw.psi.phi, bw.phi.phi, tol)
    compacts = _algebra_sequence(bw.psi.psi, bw.phi.psi, tol)
    for s, name in ((ranges, "range ideals"), (compacts, "compact operators")):
        if not s.report.ok:
            raise VerificationError(f"diagonal extension of {name} is not exact: {s.report.checks}", s.report)
    return ranges, compacts


def external_direct_sum(F: HModule, G: HModule) -> ExactSequence:
    """E = F + G over C + A (F's blocks first), with inclusion of G and projection to F."""
    base = FdAlgebra(F.base.block_dims + G.base.block_dims)
    E = HModule(base, F.multiplicities + G.multiplicities)
    v = np.zeros((E.dim, G.dim), dtype=complex)
    v[F.dim + np.arange(G.dim), np.arange(G.dim)] = 1.0
    u = np.zeros((F.dim, E.dim), dtype=complex)
    u[np.arange(F.dim), np.arange(F.dim)] = 1.0
    return ExactSequence(G, E, F, LinearMap(G, E, v), LinearMap(E, F, u))


@dataclass(frozen=True)
class Splitting:
    s: TernaryHom
    complement: Subspace
    residual: float


def construct_splitting(seq: ExactSequence, tol: float = DEFAULT_TOL) -> Splitting:
    """Ternary right inverse of u supported on the complement of vG."""
    rep = _require(seq, tol)
    comp = ortho_complement(rep.image)
    if not is_ternary_ideal(comp, tol):
        raise VerificationError("complement of the image of G is not a ternary ideal")
    q = comp.onb
    uq = seq.u.matrix @ q
    if uq.shape[0] != uq.shape[1] or np.linalg.matrix_rank(uq, tol=1e-10) != uq.shape[0]:
        raise VerificationError("u does not map the complement bijectively onto F")
    s = TernaryHom.checked(seq.F, seq.E, q @ np.linalg.inv(uq), tol)
    if not s.verified:
        raise VerificationError(f"splitting is not a ternary homomorphism ({s.residual:.3e})")
    res = float(np.linalg.norm(seq.u.matrix @ s.matrix - np.eye(seq.F.dim), 2)) if seq.F.dim else 0.0
    if res > 1e-8:
        raise VerificationError(f"u after s differs from the identity by {res:.3e}")
    return Splitting(s, comp, res)


@dataclass(frozen=True)
class BusbyWitness:
    w: TernaryHom
    external: ExactSequence
    splitting: Splitting
    residuals: dict
    range_blocks: dict


def busby_trivial_witness(seq: ExactSequence, tol: float = DEFAULT_TOL) -> BusbyWitness:
    """Ternary isomorphism w: F + G -> E under which u, v become the canonical maps."""
    split = construct_splitting(seq, tol)
    ext = external_direct_sum(seq.F, seq.G)
    mat = np.hstack([split.s.matrix, seq.v.matrix])
    w = TernaryHom.checked(ext.E, seq.E, mat, tol)
    bijective = mat.shape[0] == mat.shape[1] and w.rank(tol) == seq.E.dim
    if not (w.verified and bijective):
        raise VerificationError(f"w is not a ternary isomorphism (ternary residual {w.residual:.3e})")
    residuals = {
        "ternary": w.residual,
        "u_w_vs_projection": float(np.abs(seq.u.matrix @ mat - ext.u.matrix).max(initial=0.0)),
        "w_inclusion_vs_v": float(np.abs(mat @ ext.v.matrix - seq.v.matrix).max(initial=0.0)),
    }
    if max(residuals["u_w_vs_projection"], residuals["w_inclusion_vs_v"]) > 1e-8:
        raise VerificationError(f"canonical maps do not correspond under w: {residuals}")
    # B_E = A_G + A_{G-perp} at the level of block ideals
    g_img = seq.v.image(tol)
    a_g = classify_ideal(product_span("inner", g_img, g_img, tol=tol), tol).ideal
    a_c = classify_ideal(product_span("inner", split.complement, split.complement, tol=tol), tol).ideal
    blocks = {
        "A_G": sorted(a_g.blocks) if a_g else None,
        "A_complement": sorted(a_c.blocks) if a_c else None,
        "B_E": sorted(seq.E.support),
    }
    if a_g is None or a_c is None or a_g.blocks & a_c.blocks or sorted(a_g.blocks | a_c.blocks) != blocks["B_E"]:
        raise VerificationError(f"range ideal does not split as a direct sum: {blocks}")
    return BusbyWitness(w, ext, split, residuals, blocks)


def canonical_extension(module: HModule, blocks, tol: float = DEFAULT_TOL) -> ExactSequence:
    """0 -> span(E I) -> E -> E / span(E I) -> 0 for the block ideal ``blocks``.

    G is realised as a module over the blocks of I only.
    """
    blocks = frozenset(blocks)
    G, v = inclusion_of_ideal_blocks(module, blocks)
    q = block_quotient(module, BlockIdeal(module.base, blocks), tol)
    return ExactSequence(G, module, q.quotient_module, v, LinearMap(module, q.quotient_module, q.v.matrix))


def conjugate_sequence(seq: ExactSequence, w: LinearMap) -> ExactSequence:
    """Transport a sequence along an automorphism w of E: v -> w v, u -> u w^{-1}."""
    if w.source != seq.E or w.target != seq.E:
        raise StructuralError("w must be a map of E to itself")
    winv = np.linalg.inv(w.matrix) if w.matrix.size else w.matrix
    return ExactSequence(
        seq.G, seq.E, seq.F,
        LinearMap(seq.G, seq.E, w.matrix @ seq.v.matrix),
        LinearMap(seq.E, seq.F, seq.u.matrix @ winv),
    )


__all__ = [
    "AlgebraSequence",
    "BlockwiseExtension",
    "BusbyWitness",
    "ExactSequence",
    "ExactnessReport",
    "Splitting",
    "busby_trivial_witness",
    "canonical_extension",
    "conjugate_sequence",
    "construct_splitting",
    "diagonal_extensions",
    "external_direct_sum",
    "to_blockwise_extension",
    "verify_short_exact",
]
