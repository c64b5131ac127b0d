"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

Blocks are indexed from 0.  An algebra with no blocks is the zero algebra.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    AMBIGUITY_FACTOR,
    DEFAULT_TOL,
    BlockSpace,
    Check,
    RankAmbiguityError,
    RefusalError,
    StructuralError,
    VerificationError,
    residual_threshold,
)
from .subspace import LinearMap, Subspace, coordinate_subspace

ENUMERATION_BOUND = 12


class BlockElement:
    """Arithmetic shared by algebra and module elements."""

    parent: BlockSpace
    blocks: tuple

    @property
    def vec(self) -> np.ndarray:
        return self.parent.flatten(self.blocks)

    def _check(self, other):
        if not isinstance(other, BlockElement) or other.parent != self.parent:
            raise StructuralError("elements live in different spaces")

    def __add__(self, other):
        self._check(other)
        return self.parent.from_vec(self.vec + other.vec)

    def __sub__(self, other):
        self._check(other)
        return self.parent.from_vec(self.vec - other.vec)

    def __neg__(self):
        return self.parent.from_vec(-self.vec)

    def __mul__(self, scalar):
        if isinstance(scalar, BlockElement):
            return NotImplemented
        return self.parent.from_vec(complex(scalar) * self.vec)

    __rmul__ = __mul__

    def allclose(self, other, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.vec, other.vec, rtol=0.0, atol=atol))


@dataclass(frozen=True)
class FdAlgebra(BlockSpace):
    """The algebra M_{n_1} + ... + M_{n_r}."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if any(n < 1 for n in dims):
            raise StructuralError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def shapes(self):
        return tuple((n, n) for n in self.block_dims)

    @property
    def r(self) -> int:
        return len(self.block_dims)

    def element(self, blocks) -> "AlgElement":
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        self.flatten(blocks)  # validates shapes
        return AlgElement(self, blocks)

    def from_vec(self, vec) -> "AlgElement":
        return AlgElement(self, tuple(self.unflatten(vec)))

    def zero(self) -> "AlgElement":
        return self.from_vec(np.zeros(self.dim, dtype=complex))

    def unit(self) -> "AlgElement":
        return self.element([np.eye(n) for n in self.block_dims])

    def matrix_unit(self, k: int, i: int, j: int) -> "AlgElement":
        blocks = [np.zeros((n, n)) for n in self.block_dims]
        blocks[k][i, j] = 1.0
        return self.element(blocks)

    def subalgebra(self, blocks) -> "FdAlgebra":
        """The algebra formed by the listed blocks (in increasing order)."""
        return FdAlgebra(tuple(self.block_dims[k] for k in sorted(blocks)))

    def generator_rows(self) -> np.ndarray:
        """Coordinates of a small set of algebra generators.

        Per block: E_11 and the nearest-neighbour units E_{a,a+1}, E_{a+1,a}.
        Their words span the block, so a subspace is a left (right) ideal as
        soon as it is stable under left (right) multiplication by these.
        """
        rows = []
        for k, n in enumerate(self.block_dims):
            units = [(0, 0)] + [(a, a + 1) for a in range(n - 1)] + [(a + 1, a) for a in range(n - 1)]
            for i, j in units:
                v = np.zeros(self.dim, dtype=complex)
                v[self.offsets[k] + i * n + j] = 1.0
                rows.append(v)
        return np.array(rows, dtype=complex).reshape(len(rows), self.dim)

    def __repr__(self) -> str:
        inner = "+".join(f"M{n}" for n in self.block_dims) or "0"
        return f"FdAlgebra({inner})"


@dataclass(frozen=True, eq=False)
class AlgElement(BlockElement):
    parent: FdAlgebra
    blocks: tuple

    @property
    def algebra(self) -> FdAlgebra:
        return self.parent

    def __matmul__(self, other):
        return alg_mul(self, other)

    def adjoint(self) -> "AlgElement":
        return alg_adjoint(self)

    def __repr__(self) -> str:
        return f"AlgElement({self.parent!r}, blocks={[b.tolist() for b in self.blocks]})"


@dataclass(frozen=True)
class BlockIdeal:
    """The ideal formed by the blocks in ``blocks`` (0-based indices)."""

    algebra: FdAlgebra
    blocks: frozenset

    def __post_init__(self):
        blocks = frozenset(int(k) for k in self.blocks)
        if any(k < 0 or k >= self.algebra.r for k in blocks):
            raise StructuralError(f"block indices {sorted(blocks)} out of range for {self.algebra}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def sorted_blocks(self) -> tuple[int, ...]:
        return tuple(sorted(self.blocks))

    @property
    def dim(self) -> int:
        return sum(self.algebra.block_dims[k] ** 2 for k in self.blocks)

    def subspace(self, tol: float = DEFAULT_TOL) -> Subspace:
        return coordinate_subspace(self.algebra, self.algebra.block_indices(self.blocks), tol)

    def meet(self, other: "BlockIdeal") -> "BlockIdeal":
        return BlockIdeal(self.algebra, self.blocks & other.blocks)

    def join(self, other: "BlockIdeal") -> "BlockIdeal":
        return BlockIdeal(self.algebra, self.blocks | other.blocks)

    def complement(self) -> "BlockIdeal":
        return BlockIdeal(self.algebra, frozenset(range(self.algebra.r)) - self.blocks)

    def __le__(self, other: "BlockIdeal") -> bool:
        return self.blocks <= other.blocks

    def __repr__(self) -> str:
        return f"BlockIdeal({list(self.sorted_blocks)} of {self.algebra!r})"


def _same_algebra(a: AlgElement, b: AlgElement) -> None:
    if a.parent != b.parent:
        raise StructuralError(f"elements of different algebras: {a.parent} vs {b.parent}")


def alg_mul(a: AlgElement, b: AlgElement) -> AlgElement:
    _same_algebra(a, b)
    return AlgElement(a.parent, tuple(x @ y for x, y in zip(a.blocks, b.blocks)))


def alg_adjoint(a: AlgElement) -> AlgElement:
    return AlgElement(a.parent, tuple(x.conj().T for x in a.blocks))


def alg_norm(a: AlgElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    norms = [np.linalg.norm(x, 2) for x in a.blocks if x.size]
    return float(max(norms)) if norms else 0.0


def mul_rows(algebra: FdAlgebra, x_rows: np.ndarray, y_rows: np.ndarray) -> np.ndarray:
    """All products x_i y_j, row index i * len(y) + j."""
    nx, ny = len(x_rows), len(y_rows)
    xs, ys = algebra.split(x_rows), algebra.split(y_rows)
    out = [np.einsum("iab,jbc->ijac", x, y).reshape(nx * ny, *x.shape[1:]) for x, y in zip(xs, ys)]
    return algebra.join(out, nx * ny)


def is_subalgebra(space: Subspace, tol: float | None = None):
    """Closed under products and adjoints (a C*-subalgebra in finite dimension)."""
    algebra = space.parent
    prod = space.contains_rows(mul_rows(algebra, space.rows, space.rows), tol)
    if not prod:
        return prod
    return space.contains_rows(algebra.adjoint_rows(space.rows), tol)


@dataclass(frozen=True)
class IdealVerdict:
    """Outcome of :func:`classify_ideal`.

    ``ideal`` is the block ideal when the subspace is one; otherwise
    ``witness`` is a product ``b v`` or ``v b`` escaping the subspace.
    """

    ideal: BlockIdeal | None
    witness: AlgElement | None = None
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ideal is not None


def classify_ideal(space: Subspace, tol: float | None = None) -> IdealVerdict:
    """Decide whether ``space`` is a (two-sided) ideal and if so which one.

    Ideals of a block algebra are sums of whole blocks, so it suffices to see
    which blocks are contained and compare dimensions.  For a non-ideal the
    largest escaping one-sided product with a matrix unit is returned.
    """
    algebra = space.parent
    if not isinstance(algebra, FdAlgebra):
        raise StructuralError("classify_ideal expects a subspace of an FdAlgebra")
    tol = space.tol if tol is None else tol
    if space.borderline is not None:
        raise RankAmbiguityError("span rank is tolerance-ambiguous", space.borderline, tol)
    units = np.eye(algebra.dim, dtype=complex)
    res = space.residuals(units)
    thr = residual_threshold(units, tol)
    gray = (res > thr) & (res <= AMBIGUITY_FACTOR * thr)
    if gray.any():
        raise RankAmbiguityError("block membership is tolerance-ambiguous", float(res[gray].max()), thr)
    full = [k for k in range(algebra.r) if (res[algebra.block_slice(k)] <= thr).all()]
    ideal = BlockIdeal(algebra, frozenset(full))
    if ideal.dim == space.dim:
        return IdealVerdict(ideal)
    prods = np.vstack([mul_rows(algebra, units, space.rows), mul_rows(algebra, space.rows, units)])
    res = space.residuals(prods)
    worst = int(np.argmax(res))
    if res[worst] <= residual_threshold(prods, tol):
        raise VerificationError("subspace is multiplicatively closed but not a sum of blocks")
    return IdealVerdict(None, algebra.from_vec(prods[worst]), float(res[worst]))


def enumerate_ideals(algebra: FdAlgebra, bound: int = ENUMERATION_BOUND) -> list[BlockIdeal]:
    """All 2^r ideals, ordered by size and then lexicographically."""
    if algebra.r > bound:
        raise RefusalError(f"{algebra.r} blocks exceed the enumeration bound {bound}")
    return [
        BlockIdeal(algebra, frozenset(c))
        for size in range(algebra.r + 1)
        for c in itertools.combinations(range(algebra.r), size)
    ]


def quotient_algebra(algebra: FdAlgebra, ideal: BlockIdeal) -> tuple[FdAlgebra, LinearMap]:
    """B/I together with the canonical surjection (a block projection)."""
    if ideal.algebra != algebra:
        raise StructuralError("ideal belongs to a different algebra")
    kept = [k for k in range(algebra.r) if k not in ideal.blocks]
    quotient = algebra.subalgebra(kept)
    idx = algebra.block_indices(kept)
    mat = np.zeros((quotient.dim, algebra.dim), dtype=complex)
    mat[np.arange(idx.size), idx] = 1.0
    return quotient, LinearMap(algebra, quotient, mat)


def block_inclusion(algebra: FdAlgebra, blocks) -> tuple[FdAlgebra, LinearMap]:
    """The subalgebra of the listed blocks and its (non-unital) inclusion."""
    sub = algebra.subalgebra(blocks)
    idx = algebra.block_indices(blocks)
    mat = np.zeros((algebra.dim, sub.dim), dtype=complex)
    mat[idx, np.arange(idx.size)] = 1.0
    return sub, LinearMap(sub, algebra, mat)


def is_algebra_hom(phi: LinearMap, tol: float = DEFAULT_TOL):
    """Multiplicativity and *-preservation of ``phi``.

    phi(g a) = phi(g) phi(a) is tested for algebra generators g against all
    matrix units a; since words in the generators span the algebra this
    gives multiplicativity on every pair.
    """
    src, tgt = phi.source, phi.target
    units = np.eye(src.dim, dtype=complex)
    gens = src.generator_rows()
    lhs = phi.apply_rows(mul_rows(src, gens, units))
    rhs = mul_rows(tgt, phi.apply_rows(gens), phi.apply_rows(units))
    mult = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
    imgs = phi.apply_rows(units)
    star = phi.apply_rows(src.adjoint_rows(units)) - tgt.adjoint_rows(imgs)
    star_res = float(np.abs(star).max()) if star.size else 0.0
    scale = max(1.0, float(np.abs(phi.matrix).max()) if phi.matrix.size else 1.0) ** 2
    res = max(mult, star_res)
    return Check(res <= tol * scale, res)
