"""Quotients of a module by a ternary ideal, and isometry notions for maps.

Dividing E by an ideal submodule K = span(E I) forces dividing B by I as
well: the quotient E/K is a Hilbert module over B/I only.  Here every ideal
is a set of blocks, so both quotients are block projections and all laws hold
exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, Check, RefusalError, StructuralError, VerificationError
from .fdcstar import BlockIdeal, FdAlgebra, is_algebra_hom, quotient_algebra
from .hmod import HModule, inner_rows, module_norm
from .ideals import IdealClassification, classify
from .linking import TernaryHom, phi_isometry_residual
from .subspace import LinearMap, Subspace, from_rows


@dataclass(frozen=True)
class QuotientData:
    quotient_module: HModule
    v: TernaryHom
    phi: LinearMap
    ideal: BlockIdeal
    kernel_ok: bool
    isometry_residual: float

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.ideal.algebra.r) if k not in self.ideal.blocks)


@dataclass(frozen=True)
class QuotientReport:
    """The canonical quotient (by the minimal ideal B_K) and optionally a
    second one over a larger ideal chosen by the caller."""

    classification: IdealClassification
    canonical: QuotientData
    alternative: QuotientData | None = None


def block_quotient(module: HModule, ideal: BlockIdeal, tol: float = DEFAULT_TOL) -> QuotientData:
    """E / span(E I) over B / I, both by dropping the blocks of I."""
    if ideal.algebra != module.base:
        raise StructuralError("ideal is not an ideal of the base algebra")
    qalg, phi = quotient_algebra(module.base, ideal)
    kept = [k for k in range(module.base.r) if k not in ideal.blocks]
    qmod = HModule(qalg, tuple(module.multiplicities[k] for k in kept))
    idx = module.block_indices(kept)
    mat = np.zeros((qmod.dim, module.dim), dtype=complex)
    mat[np.arange(idx.size), idx] = 1.0
    v = TernaryHom.checked(module, qmod, mat, tol)
    if not v.verified:
        raise VerificationError(f"quotient map fails the ternary identity ({v.residual:.3e})")
    res = phi_isometry_residual(v, phi)
    return QuotientData(qmod, v, phi, ideal, True, res)


def quotient_module(module: HModule, k: Subspace, ideal: BlockIdeal | None = None,
                    tol: float | None = None) -> QuotientReport:
    """Quotient of ``module`` by the ternary ideal ``k``.

    The base is divided by B_K, the smallest admissible ideal.  A larger
    ``ideal`` may be passed; it is admissible when it agrees with B_K on the
    blocks the module reaches, and its quotient is reported alongside.
    """
    if k.parent != module:
        raise StructuralError("subspace does not live in this module")
    tol = k.tol if tol is None else tol
    cls = classify(k, tol)
    if not cls.is_ternary_ideal:
        raise RefusalError(
            "subspace is not a ternary ideal, so E/K carries no inner product "
            "over any quotient of B; one must quotient B as well and that is "
            "only possible for ideal submodules",
            report=cls,
        )
    minimal = cls.ideal_submodule_witness
    canonical = _checked(module, k, minimal, tol)
    alternative = None
    if ideal is not None:
        support = set(module.support)
        if not (minimal.blocks <= ideal.blocks and ideal.blocks & support == minimal.blocks & support):
            raise RefusalError(
                f"ideal {sorted(ideal.blocks)} does not generate K "
                f"(its minimal ideal is {sorted(minimal.blocks)})"
            )
        alternative = _checked(module, k, ideal, tol)
    return QuotientReport(cls, canonical, alternative)


def _checked(module, k, ideal, tol) -> QuotientData:
    q = block_quotient(module, ideal, tol)
    if not q.v.kernel(tol).equals(k, tol):
        raise VerificationError("kernel of the quotient map differs from K")
    if q.v.rank(tol) != q.quotient_module.dim:
        raise VerificationError("quotient map is not surjective")
    return q


def is_phi_isometry(v: LinearMap, phi: LinearMap, tol: float = DEFAULT_TOL) -> Check:
    """<vx, vy> = phi(<x, y>) on all basis pairs."""
    if not isinstance(v.source, HModule) or not isinstance(v.target, HModule):
        raise StructuralError("v must map between modules")
    if not isinstance(phi.source, FdAlgebra):
        raise StructuralError("phi must act on an algebra")
    res = phi_isometry_residual(v, phi)
    scale = max(1.0, float(np.abs(v.matrix).max()) if v.matrix.size else 1.0) ** 2
    return Check(res <= tol * scale, res)


@dataclass(frozen=True)
class GeneralizedIsometry:
    phi: LinearMap | None
    residual: float
    faithful: bool | None = None

    def __bool__(self) -> bool:
        return self.phi is not None


def is_generalized_isometry(v: LinearMap, tol: float = DEFAULT_TOL) -> GeneralizedIsometry:
    """Find a homomorphism phi with <vx, vy> = phi(<x, y>), if there is one.

    phi is solved on B_E = span<E, E> and set to zero on the other blocks;
    ``faithful`` says whether it is injective on B_E.
    """
    E, F = v.source, v.target
    base_e, base_f = E.base, F.base
    idx = base_e.block_indices(E.support)
    basis = np.eye(E.dim, dtype=complex)
    imgs = v.apply_rows(basis)
    gram = inner_rows(E, basis, basis)[:, idx]
    target = inner_rows(F, imgs, imgs)
    mat = np.zeros((base_f.dim, base_e.dim), dtype=complex)
    if idx.size:
        sol, *_ = np.linalg.lstsq(gram, target, rcond=None)
        mat[:, idx] = sol.T
        res = float(np.abs(gram @ sol - target).max()) if target.size else 0.0
    else:
        res = 0.0
    scale = max(1.0, float(np.abs(v.matrix).max()) if v.matrix.size else 1.0) ** 2
    if res > tol * scale * max(1, E.dim):
        return GeneralizedIsometry(None, res)
    phi = LinearMap(base_e, base_f, mat)
    hom = is_algebra_hom(phi, tol=1e-8)
    if not hom:
        return GeneralizedIsometry(None, max(res, hom.residual))
    faithful = np.linalg.matrix_rank(mat[:, idx], tol=1e-8) == idx.size if idx.size else True
    return GeneralizedIsometry(phi, max(res, hom.residual), bool(faithful))


def norm_defect(v: LinearMap, rng: np.random.Generator, samples: int = 64) -> float:
    """max | ||vx|| - ||x|| | over random unit-norm x (module norms)."""
    E = v.source
    if E.dim == 0:
        return 0.0
    worst = 0.0
    for _ in range(samples):
        vec = rng.normal(size=E.dim) + 1j * rng.normal(size=E.dim)
        x = E.from_vec(vec)
        vec = vec / module_norm(x)
        worst = max(worst, abs(module_norm(v.target.from_vec(v(vec))) - 1.0))
    return worst


def compose_quotients(module: HModule, k: Subspace, k2: Subspace, tol: float = DEFAULT_TOL) -> Check:
    """Divide by K and then by K2 inside E/K, versus dividing by the preimage.

    The two composite maps and resulting modules must coincide exactly.
    """
    first = quotient_module(module, k, tol=tol).canonical
    if k2.parent != first.quotient_module:
        raise StructuralError("second subspace must live in E/K")
    second = quotient_module(first.quotient_module, k2, tol=tol).canonical
    # the quotient map is a coordinate projection, so its adjoint lifts rows
    lifted = k2.rows @ first.v.matrix.conj()
    pre = from_rows(module, np.vstack([k.rows, lifted]), tol)
    direct = quotient_module(module, pre, tol=tol).canonical
    composite = second.v.matrix @ first.v.matrix
    same_module = second.quotient_module == direct.quotient_module
    res = float(np.abs(composite - direct.v.matrix).max()) if composite.size and same_module else 0.0
    return Check(same_module and res == 0.0, res)


__all__ = [
    "GeneralizedIsometry",
    "QuotientData",
    "QuotientReport",
    "block_quotient",
    "compose_quotients",
    "is_generalized_isometry",
    "is_phi_isometry",
    "norm_defect",
    "quotient_module",
]
