"""Closed linear subspaces and linear maps of block spaces.

In finite dimension every closed span is a linear span, so a subspace is
just an orthonormal family of coordinate vectors together with the tolerance
that was used to decide its rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    BlockSpace,
    Check,
    StructuralError,
    numerical_rank,
    projection_residuals,
    residual_threshold,
    row_space,
)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``parent`` with orthonormal basis columns ``onb`` (dim x d)."""

    parent: BlockSpace
    onb: np.ndarray
    tol: float = DEFAULT_TOL
    borderline: float | None = field(default=None, compare=False)

    def __post_init__(self):
        onb = np.asarray(self.onb, dtype=complex)
        if onb.ndim == 1:
            onb = onb.reshape(self.parent.dim, -1)
        if onb.ndim != 2 or onb.shape[0] != self.parent.dim:
            raise StructuralError(f"basis of shape {onb.shape} for a space of dimension {self.parent.dim}")
        object.__setattr__(self, "onb", onb)

    @property
    def dim(self) -> int:
        return self.onb.shape[1]

    @property
    def rows(self) -> np.ndarray:
        """Basis vectors as rows, (d, parent.dim)."""
        return self.onb.T

    def elements(self) -> list:
        return [self.parent.from_vec(r) for r in self.rows]

    def residuals(self, rows) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=complex))
        return projection_residuals(rows, self.rows)

    def project(self, rows) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=complex))
        return (rows @ self.onb.conj()) @ self.onb.T

    def contains_rows(self, rows, tol: float | None = None) -> Check:
        """Membership of every row; the witness is the worst offending row."""
        tol = self.tol if tol is None else tol
        rows = np.atleast_2d(np.asarray(rows, dtype=complex))
        if rows.shape[0] == 0:
            return Check(True, 0.0)
        res = self.residuals(rows)
        worst = int(np.argmax(res))
        ok = bool(res[worst] <= residual_threshold(rows, tol))
        return Check(ok, float(res[worst]), None if ok else rows[worst])

    def issubset(self, other: "Subspace", tol: float | None = None) -> Check:
        _same_parent(self, other)
        return other.contains_rows(self.rows, tol)

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        _same_parent(self, other)
        return self.dim == other.dim and bool(self.issubset(other, tol))

    def adjoint(self) -> "Subspace":
        """Blockwise adjoints of the members (square-block parents only)."""
        return from_rows(self.parent, self.parent.adjoint_rows(self.rows), self.tol)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in {self.parent!r})"


def _same_parent(a: Subspace, b: Subspace) -> None:
    if a.parent != b.parent:
        raise StructuralError(f"subspaces live in different spaces: {a.parent} vs {b.parent}")


def _as_rows(generators, parent) -> tuple[BlockSpace, np.ndarray]:
    vecs = []
    for g in generators:
        if hasattr(g, "parent") and hasattr(g, "vec"):
            if parent is None:
                parent = g.parent
            elif g.parent != parent:
                raise StructuralError("generators do not share a parent")
            vecs.append(g.vec)
        else:
            vecs.append(np.asarray(g, dtype=complex).reshape(-1))
    if parent is None:
        raise StructuralError("parent space required for raw or empty generator lists")
    rows = np.array(vecs, dtype=complex).reshape(len(vecs), parent.dim)
    return parent, rows


def from_rows(parent: BlockSpace, rows, tol: float = DEFAULT_TOL) -> Subspace:
    rows = np.asarray(rows, dtype=complex)
    if rows.ndim != 2:
        rows = rows.reshape(-1, parent.dim) if parent.dim else np.zeros((0, 0), dtype=complex)
    basis, _, borderline = row_space(rows, tol)
    return Subspace(parent, basis.T, tol, borderline)


def span(generators, parent: BlockSpace | None = None, tol: float = DEFAULT_TOL) -> Subspace:
    """Span of elements (or raw coordinate vectors when ``parent`` is given)."""
    parent, rows = _as_rows(list(generators), parent)
    return from_rows(parent, rows, tol)


def whole(parent: BlockSpace, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(parent, np.eye(parent.dim, dtype=complex), tol)


def zero(parent: BlockSpace, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(parent, np.zeros((parent.dim, 0), dtype=complex), tol)


def coordinate_subspace(parent: BlockSpace, indices, tol: float = DEFAULT_TOL) -> Subspace:
    indices = np.asarray(indices, dtype=int)
    onb = np.zeros((parent.dim, indices.size), dtype=complex)
    onb[indices, np.arange(indices.size)] = 1.0
    return Subspace(parent, onb, tol)


def contains(space: Subspace, x, tol: float | None = None) -> Check:
    """Membership of an element, raw vector, or whole subspace."""
    if isinstance(x, Subspace):
        return x.issubset(space, tol)
    if hasattr(x, "vec"):
        if x.parent != space.parent:
            raise StructuralError("element and subspace live in different spaces")
        x = x.vec
    return space.contains_rows(np.asarray(x, dtype=complex).reshape(1, space.parent.dim), tol)


def ortho_complement(space: Subspace) -> Subspace:
    """Coordinate (Euclidean) orthogonal complement inside the parent."""
    n = space.parent.dim
    if space.dim == 0:
        return whole(space.parent, space.tol)
    if space.dim == n:
        return zero(space.parent, space.tol)
    q, _ = np.linalg.qr(np.hstack([space.onb, np.eye(n, dtype=complex)]))
    comp = q[:, space.dim:n]
    return Subspace(space.parent, comp, space.tol)


def intersection(a: Subspace, b: Subspace) -> Subspace:
    _same_parent(a, b)
    comp = np.vstack([ortho_complement(a).rows, ortho_complement(b).rows])
    if comp.shape[0] == 0:
        return whole(a.parent, a.tol)
    return ortho_complement(from_rows(a.parent, comp, a.tol))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_parent(a, b)
    return from_rows(a.parent, np.vstack([a.rows, b.rows]), min(a.tol, b.tol))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Complex-linear map given by its matrix in flattened coordinates."""

    source: BlockSpace
    target: BlockSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.target.dim, self.source.dim):
            raise StructuralError(
                f"matrix shape {mat.shape} does not match "
                f"({self.target.dim}, {self.source.dim})"
            )
        object.__setattr__(self, "matrix", mat)

    def __call__(self, x):
        if hasattr(x, "vec"):
            if x.parent != self.source:
                raise StructuralError("argument is not in the source space")
            return self.target.from_vec(self.matrix @ x.vec)
        return self.matrix @ np.asarray(x, dtype=complex)

    def apply_rows(self, rows) -> np.ndarray:
        return np.asarray(rows, dtype=complex) @ self.matrix.T

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """self after inner."""
        if inner.target != self.source:
            raise StructuralError("cannot compose: spaces do not match")
        return LinearMap(inner.source, self.target, self.matrix @ inner.matrix)

    def rank(self, tol: float = DEFAULT_TOL) -> int:
        return numerical_rank(self.matrix, tol)

    def image(self, tol: float = DEFAULT_TOL) -> Subspace:
        return from_rows(self.target, self.matrix.T, tol)

    def kernel(self, tol: float = DEFAULT_TOL) -> Subspace:
        if self.source.dim == 0:
            return zero(self.source, tol)
        if self.matrix.size == 0:
            return whole(self.source, tol)
        _, s, vh = np.linalg.svd(self.matrix, full_matrices=True)
        r = int((s > tol * s[0]).sum()) if s.size and s[0] > 0 else 0
        # rows of vh beyond r span the kernel; onb columns are their conjugates
        return Subspace(self.source, vh[r:].conj().T, tol)

    def image_of(self, space: Subspace, tol: float | None = None) -> Subspace:
        tol = space.tol if tol is None else tol
        return from_rows(self.target, self.apply_rows(space.rows), tol)

    @classmethod
    def identity(cls, space: BlockSpace) -> "LinearMap":
        return cls(space, space, np.eye(space.dim, dtype=complex))

    @classmethod
    def zero_map(cls, source: BlockSpace, target: BlockSpace) -> "LinearMap":
        return cls(source, target, np.zeros((target.dim, source.dim), dtype=complex))
