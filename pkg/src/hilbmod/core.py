"""Shared plumbing: block-structured coordinate spaces, check results, errors
and the rank/residual policy used everywhere else.

Every space in this package is a finite direct sum of complex rectangular
matrix blocks.  Elements are flattened block-by-block, row-major inside each
block; every matrix of a linear map is written in these coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

DEFAULT_TOL = 1e-9
# singular values / residuals in (tol, AMBIGUITY_FACTOR * tol] (relative) are
# reported as borderline by the operations that must make a hard decision
AMBIGUITY_FACTOR = 1e3


class HilbmodError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(HilbmodError, ValueError):
    """Dimension mismatch or incompatible parents."""


class RankAmbiguityError(HilbmodError):
    """A rank decision fell inside the tolerance gray band.

    The offending relative singular value (or residual) is kept in
    ``value`` so the caller can decide on a different ``tol``.
    """

    def __init__(self, msg: str, value: float, cutoff: float):
        super().__init__(f"{msg} (borderline value {value:.3e}, cutoff {cutoff:.3e})")
        self.value = value
        self.cutoff = cutoff


class RefusalError(HilbmodError):
    """A precondition of an operation does not hold."""

    def __init__(self, msg: str, report: Any = None):
        super().__init__(msg)
        self.report = report


class VerificationError(HilbmodError):
    """An internal consistency check failed.

    Raised only where the mathematics guarantees success, so it signals a
    bug (or a hopelessly ill-conditioned input), never a property of the input.
    """

    def __init__(self, msg: str, report: Any = None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class Check:
    """Boolean verdict with the residual that decided it.

    Truthiness follows ``ok`` so checks can be used directly in conditions.
    """

    ok: bool
    residual: float = 0.0
    witness: Any = None

    def __bool__(self) -> bool:
        return bool(self.ok)


class BlockSpace:
    """Mixin for a direct sum of complex matrix blocks of fixed ``shapes``."""

    @property
    def shapes(self) -> tuple[tuple[int, int], ...]:
        raise NotImplementedError

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        off = [0]
        for a, b in self.shapes:
            off.append(off[-1] + a * b)
        return tuple(off)

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    def block_slice(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k + 1])

    def block_indices(self, blocks) -> np.ndarray:
        """Flat coordinate indices of the listed blocks, in block order."""
        idx = [np.arange(self.offsets[k], self.offsets[k + 1]) for k in sorted(blocks)]
        return np.concatenate(idx) if idx else np.zeros(0, dtype=int)

    def flatten(self, blocks) -> np.ndarray:
        if len(blocks) != len(self.shapes):
            raise StructuralError(f"expected {len(self.shapes)} blocks, got {len(blocks)}")
        out = np.zeros(self.dim, dtype=complex)
        for k, (blk, shape) in enumerate(zip(blocks, self.shapes)):
            blk = np.asarray(blk, dtype=complex)
            if blk.size == 0 and shape[0] * shape[1] == 0:
                continue
            if blk.shape != shape:
                raise StructuralError(f"block {k} has shape {blk.shape}, expected {shape}")
            out[self.block_slice(k)] = blk.reshape(-1)
        return out

    def unflatten(self, vec) -> list[np.ndarray]:
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.dim,):
            raise StructuralError(f"vector of shape {vec.shape}, expected ({self.dim},)")
        return [vec[self.block_slice(k)].reshape(s) for k, s in enumerate(self.shapes)]

    def split(self, rows: np.ndarray) -> list[np.ndarray]:
        """Batched unflatten: (N, dim) -> list of (N, a_k, b_k)."""
        rows = np.asarray(rows)
        n = rows.shape[0]
        return [rows[:, self.block_slice(k)].reshape(n, *s) for k, s in enumerate(self.shapes)]

    def join(self, blocks: list[np.ndarray], n: int | None = None) -> np.ndarray:
        """Batched flatten: list of (N, a_k, b_k) -> (N, dim)."""
        if n is None:
            n = blocks[0].shape[0] if blocks else 0
        if not blocks:
            return np.zeros((n, 0), dtype=complex)
        return np.concatenate([b.reshape(n, int(np.prod(b.shape[1:]))) for b in blocks], axis=1)

    def transpose_perm(self) -> np.ndarray:
        """Permutation p with (x^T).vec == x.vec[p], block transposes in place."""
        perm = []
        for k, (a, b) in enumerate(self.shapes):
            local = np.arange(a * b).reshape(a, b).T.reshape(-1)
            perm.append(self.offsets[k] + local)
        return np.concatenate(perm) if perm else np.zeros(0, dtype=int)

    def adjoint_rows(self, rows: np.ndarray) -> np.ndarray:
        """Coordinates of blockwise conjugate transposes (square blocks only)."""
        return np.conj(np.asarray(rows)[:, self.transpose_perm()])

    def from_vec(self, vec):
        raise NotImplementedError

    def basis_rows(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


def relative_cutoff(s: np.ndarray, tol: float) -> float:
    return tol * float(s[0]) if s.size else 0.0


def row_space(rows: np.ndarray, tol: float = DEFAULT_TOL):
    """Orthonormal basis (as rows) of the span of ``rows``.

    Returns ``(basis, singular_values, borderline)`` where ``borderline`` is
    the largest kept singular value inside the ambiguity band (relative to the
    largest one), or None.
    """
    rows = np.asarray(rows, dtype=complex)
    n, dim = rows.shape
    if n == 0 or dim == 0:
        return np.zeros((0, dim), dtype=complex), np.zeros(0), None
    if n > dim:
        # row space of R equals that of rows; avoids forming the tall U
        rows = np.linalg.qr(rows, mode="r")
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, dim), dtype=complex), s, None
    cut = relative_cutoff(s, tol)
    keep = s > cut
    band = (s > cut) & (s <= AMBIGUITY_FACTOR * cut)
    band |= (s <= cut) & (s > cut / AMBIGUITY_FACTOR)
    borderline = float(s[band].max() / s[0]) if band.any() else None
    return vh[keep], s, borderline


def numerical_rank(mat: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int((s > relative_cutoff(s, tol)).sum())


def projection_residuals(rows: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Distance of every row to the span of the orthonormal ``basis`` rows."""
    rows = np.asarray(rows, dtype=complex)
    if rows.shape[0] == 0:
        return np.zeros(0)
    if basis.shape[0] == 0:
        return np.linalg.norm(rows, axis=1)
    coef = rows @ basis.conj().T
    return np.linalg.norm(rows - coef @ basis, axis=1)


def residual_threshold(rows: np.ndarray, tol: float) -> float:
    """Absolute threshold for membership residuals of a batch of rows."""
    if rows.shape[0] == 0:
        return tol
    return tol * max(1.0, float(np.linalg.norm(rows, axis=1).max()))
