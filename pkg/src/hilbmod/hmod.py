"""Hilbert modules in canonical block form and the product-span engine.

Over B = M_{n_1} + ... + M_{n_r} a module with multiplicities (m_1, ..., m_r)
has block k equal to the m_k x n_k complex matrices, with

    <x, y>_k = x_k^* y_k,     (x b)_k = x_k b_k.

``m_k = 0`` means the module does not reach block k.  The compact operators
K(E) form the algebra of the m_k x m_k blocks with m_k > 0, acting on the left.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, BlockSpace, StructuralError
from .fdcstar import (
    AlgElement,
    BlockElement,
    BlockIdeal,
    FdAlgebra,
    classify_ideal,
    is_subalgebra,
    mul_rows,
)
from .subspace import Subspace, from_rows, whole


@dataclass(frozen=True)
class HModule(BlockSpace):
    base: FdAlgebra
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        mults = tuple(int(m) for m in self.multiplicities)
        if len(mults) != self.base.r:
            raise StructuralError(
                f"{len(mults)} multiplicities for an algebra with {self.base.r} blocks"
            )
        if any(m < 0 for m in mults):
            raise StructuralError(f"multiplicities must be nonnegative, got {mults}")
        object.__setattr__(self, "multiplicities", mults)

    @property
    def shapes(self):
        return tuple((m, n) for m, n in zip(self.multiplicities, self.base.block_dims))

    @property
    def support(self) -> tuple[int, ...]:
        """Blocks reached by the module, i.e. the blocks of B_E."""
        return tuple(k for k, m in enumerate(self.multiplicities) if m > 0)

    @property
    def is_full(self) -> bool:
        return len(self.support) == self.base.r

    def range_ideal(self) -> BlockIdeal:
        return BlockIdeal(self.base, frozenset(self.support))

    def range_algebra(self) -> FdAlgebra:
        """B_E as an algebra in its own right."""
        return self.base.subalgebra(self.support)

    def compacts(self) -> FdAlgebra:
        """K(E) = M_{m_k} over the supported blocks."""
        return FdAlgebra(tuple(self.multiplicities[k] for k in self.support))

    def element(self, blocks) -> "ModElement":
        blocks = tuple(np.asarray(b, dtype=complex).reshape(s) for b, s in zip(blocks, self.shapes))
        self.flatten(blocks)
        return ModElement(self, blocks)

    def from_vec(self, vec) -> "ModElement":
        return ModElement(self, tuple(self.unflatten(vec)))

    def zero(self) -> "ModElement":
        return self.from_vec(np.zeros(self.dim, dtype=complex))

    def __repr__(self) -> str:
        return f"HModule(m={list(self.multiplicities)} over {self.base!r})"


@dataclass(frozen=True, eq=False)
class ModElement(BlockElement):
    parent: HModule
    blocks: tuple

    @property
    def module(self) -> HModule:
        return self.parent

    def __repr__(self) -> str:
        return f"ModElement({self.parent!r}, blocks={[b.tolist() for b in self.blocks]})"


# -- elementwise operations -------------------------------------------------


def inner(x: ModElement, y: ModElement) -> AlgElement:
    if x.parent != y.parent:
        raise StructuralError("inner product of elements from different modules")
    return x.parent.base.element([a.conj().T @ b for a, b in zip(x.blocks, y.blocks)])


def act(x: ModElement, b: AlgElement) -> ModElement:
    if x.parent.base != b.parent:
        raise StructuralError("algebra element does not act on this module")
    return ModElement(x.parent, tuple(a @ c for a, c in zip(x.blocks, b.blocks)))


def rank_one(x: ModElement, y: ModElement) -> AlgElement:
    """The compact operator x y^* as an element of K(E)."""
    if x.parent != y.parent:
        raise StructuralError("rank-one operator of elements from different modules")
    mod = x.parent
    return mod.compacts().element([x.blocks[k] @ y.blocks[k].conj().T for k in mod.support])


def apply_compact(a: AlgElement, x: ModElement) -> ModElement:
    mod = x.parent
    if a.parent != mod.compacts():
        raise StructuralError("operator is not in K(E) of this module")
    blocks = list(x.blocks)
    for j, k in enumerate(mod.support):
        blocks[k] = a.blocks[j] @ x.blocks[k]
    return ModElement(mod, tuple(blocks))


def module_norm(x: ModElement) -> float:
    """||x|| = ||<x,x>||^(1/2), i.e. the largest singular value over blocks."""
    norms = [np.linalg.norm(b, 2) for b in x.blocks if b.size]
    return float(max(norms)) if norms else 0.0


# -- batched kernels on coordinate rows --------------------------------------


def inner_rows(mod: HModule, x_rows, y_rows) -> np.ndarray:
    """<x_i, y_j> in B coordinates, row index i * len(y) + j."""
    nx, ny = len(x_rows), len(y_rows)
    xs, ys = mod.split(x_rows), mod.split(y_rows)
    out = [
        np.einsum("iab,jac->ijbc", x.conj(), y).reshape(nx * ny, n, n)
        for x, y, n in zip(xs, ys, mod.base.block_dims)
    ]
    return mod.base.join(out, nx * ny)


def action_rows(mod: HModule, x_rows, b_rows) -> np.ndarray:
    """x_i b_j in E coordinates."""
    nx, nb = len(x_rows), len(b_rows)
    xs, bs = mod.split(x_rows), mod.base.split(b_rows)
    out = [np.einsum("iab,jbc->ijac", x, b).reshape(nx * nb, *x.shape[1:]) for x, b in zip(xs, bs)]
    return mod.join(out, nx * nb)


def rankone_rows(mod: HModule, x_rows, y_rows) -> np.ndarray:
    """x_i y_j^* in K(E) coordinates."""
    nx, ny = len(x_rows), len(y_rows)
    xs, ys = mod.split(x_rows), mod.split(y_rows)
    out = [
        np.einsum("iab,jcb->ijac", xs[k], ys[k].conj()).reshape(nx * ny, m, m)
        for k, m in ((k, mod.multiplicities[k]) for k in mod.support)
    ]
    return mod.compacts().join(out, nx * ny)


def compact_rows(mod: HModule, a_rows, x_rows) -> np.ndarray:
    """a_i x_j in E coordinates, a_i in K(E)."""
    na, nx = len(a_rows), len(x_rows)
    as_ = mod.compacts().split(a_rows)
    xs = mod.split(x_rows)
    out = [np.zeros((na * nx, *s), dtype=complex) for s in mod.shapes]
    for j, k in enumerate(mod.support):
        out[k] = np.einsum("iab,jbc->ijac", as_[j], xs[k]).reshape(na * nx, *mod.shapes[k])
    return mod.join(out, na * nx)


def ternary_rows(mod: HModule, x_rows, y_rows, z_rows) -> np.ndarray:
    """x_i <y_j, z_l> for all triples, row index (i, j, l) row-major."""
    nx, ny, nz = len(x_rows), len(y_rows), len(z_rows)
    xs, ys, zs = mod.split(x_rows), mod.split(y_rows), mod.split(z_rows)
    out = [
        np.einsum("iab,jcb,lcd->ijlad", x, y.conj(), z, optimize=True).reshape(nx * ny * nz, *x.shape[1:])
        for x, y, z in zip(xs, ys, zs)
    ]
    return mod.join(out, nx * ny * nz)


# -- spans of products -------------------------------------------------------

PRODUCT_KINDS = ("inner", "action", "ternary", "rankone", "compact", "mul")


def _target_and_check(kind: str, a: Subspace, b: Subspace, c: Subspace | None):
    if kind not in PRODUCT_KINDS:
        raise StructuralError(f"unknown product kind {kind!r}; expected one of {PRODUCT_KINDS}")
    if kind == "mul":
        if not isinstance(a.parent, FdAlgebra) or a.parent != b.parent:
            raise StructuralError("'mul' needs two subspaces of one algebra")
        return a.parent
    mod = a.parent if kind != "compact" else b.parent
    if not isinstance(mod, HModule):
        raise StructuralError(f"'{kind}' needs a module operand")
    if kind in ("inner", "rankone") and b.parent != mod:
        raise StructuralError(f"'{kind}' needs both operands in the same module")
    if kind == "action" and b.parent != mod.base:
        raise StructuralError("'action' needs a subspace of the base algebra as second operand")
    if kind == "compact" and a.parent != mod.compacts():
        raise StructuralError("'compact' needs a subspace of K(E) as first operand")
    if kind == "ternary":
        if c is None or b.parent != mod or c.parent != mod:
            raise StructuralError("'ternary' needs three subspaces of the same module")
    return mod


def product_span(kind: str, a: Subspace, b: Subspace, c: Subspace | None = None,
                 tol: float | None = None) -> Subspace:
    """Span of all products of the two (three) operand subspaces.

    kind is one of ``inner`` <A,B> (in B), ``action`` A.B (A in E, B in the
    base algebra), ``ternary`` A<B,C>, ``rankone`` A B^* (in K(E)),
    ``compact`` A.B (A in K(E), B in E) or ``mul`` (two algebra subspaces).
    Products are formed from orthonormal bases; by bilinearity their span is
    the span of the set product.
    """
    target = _target_and_check(kind, a, b, c)
    tol = min(s.tol for s in (a, b, c) if s is not None) if tol is None else tol
    if kind == "inner":
        rows = inner_rows(target, a.rows, b.rows)
        return from_rows(target.base, rows, tol)
    if kind == "action":
        return from_rows(target, action_rows(target, a.rows, b.rows), tol)
    if kind == "rankone":
        return from_rows(target.compacts(), rankone_rows(target, a.rows, b.rows), tol)
    if kind == "compact":
        return from_rows(target, compact_rows(target, a.rows, b.rows), tol)
    if kind == "mul":
        return from_rows(target, mul_rows(target, a.rows, b.rows), tol)
    # a<b,c> = (a b^*) c; reducing a b^* to a basis first keeps the stack small
    ab = from_rows(target.compacts(), rankone_rows(target, a.rows, b.rows), tol)
    return from_rows(target, compact_rows(target, ab.rows, c.rows), tol)


def base_whole(mod: HModule, tol: float = DEFAULT_TOL) -> Subspace:
    return whole(mod.base, tol)


@dataclass(frozen=True)
class RangeIdeal:
    """B_F = span <F, F> together with what kind of object it is."""

    span: Subspace
    ideal: BlockIdeal | None
    is_subalgebra: bool


def range_ideal(f, tol: float | None = None) -> RangeIdeal:
    """Range ideal of a module, or the spanned C*-subalgebra of a subspace."""
    if isinstance(f, HModule):
        ideal = f.range_ideal()
        return RangeIdeal(ideal.subspace(DEFAULT_TOL if tol is None else tol), ideal, True)
    if not isinstance(f.parent, HModule):
        raise StructuralError("range_ideal expects a module or a subspace of one")
    s = product_span("inner", f, f, tol=tol)
    verdict = classify_ideal(s)
    return RangeIdeal(s, verdict.ideal, bool(is_subalgebra(s)))

