"""Random algebras, modules, subspaces, ternary homomorphisms and extensions.

Every function takes a ``numpy.random.Generator`` so that runs are replayable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL
from .extensions import ExactSequence, canonical_extension, conjugate_sequence
from .fdcstar import FdAlgebra
from .hmod import HModule, action_rows, product_span
from .subspace import LinearMap, Subspace, coordinate_subspace, from_rows


@dataclass(frozen=True)
class Bounds:
    max_blocks: int = 3
    max_dim: int = 3
    max_mult: int = 3

    def as_list(self) -> list[int]:
        return [self.max_blocks, self.max_dim, self.max_mult]


def random_algebra(rng: np.random.Generator, bounds: Bounds = Bounds(), min_blocks: int = 1) -> FdAlgebra:
    r = int(rng.integers(min_blocks, bounds.max_blocks + 1))
    return FdAlgebra(tuple(int(n) for n in rng.integers(1, bounds.max_dim + 1, size=r)))


def random_module(rng: np.random.Generator, bounds: Bounds = Bounds(), min_blocks: int = 1,
                  allow_empty_blocks: bool = True) -> HModule:
    base = random_algebra(rng, bounds, min_blocks)
    low = 0 if allow_empty_blocks else 1
    mults = tuple(int(m) for m in rng.integers(low, bounds.max_mult + 1, size=base.r))
    if mults and not any(mults):
        mults = (1,) + mults[1:]
    return HModule(base, mults)


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def block_unitary_map(rng: np.random.Generator, module: HModule, left: bool = True,
                      right: bool = True) -> LinearMap:
    """x_k -> U_k x_k V_k with random unitaries; a ternary automorphism.

    In row-major coordinates vec(U X V) = (U kron V^T) vec(X).
    """
    mat = np.zeros((module.dim, module.dim), dtype=complex)
    for k, (m, n) in enumerate(module.shapes):
        if m * n == 0:
            continue
        u = random_unitary(rng, m) if left else np.eye(m)
        v = random_unitary(rng, n) if right else np.eye(n)
        sl = module.block_slice(k)
        mat[sl, sl] = np.kron(u, v.T)
    return LinearMap(module, module, mat)


def rectangle_subspace(rng: np.random.Generator, module: HModule, tol: float = DEFAULT_TOL) -> Subspace:
    """Elements supported on a chosen rows x columns rectangle in every block (P E Q)."""
    idx = []
    for k, (m, n) in enumerate(module.shapes):
        rows = np.flatnonzero(rng.random(m) < 0.6)
        cols = np.flatnonzero(rng.random(n) < 0.6)
        off = module.offsets[k]
        idx += [off + a * n + b for a in rows for b in cols]
    return coordinate_subspace(module, sorted(idx), tol)


def ternary_closure(module: HModule, rows, tol: float = DEFAULT_TOL, max_rounds: int = 20) -> Subspace:
    """Smallest ternary subspace containing the given rows."""
    f = from_rows(module, rows, tol)
    for _ in range(max_rounds):
        nxt = from_rows(module, np.vstack([f.rows, product_span("ternary", f, f, f, tol).rows]), tol)
        if nxt.dim == f.dim:
            return nxt
        f = nxt
    return f


def low_rank_element(rng: np.random.Generator, module: HModule) -> np.ndarray:
    """An element whose blocks have rank at most one (often zero)."""
    blocks = []
    for m, n in module.shapes:
        if m * n and rng.random() < 0.7:
            blocks.append(np.outer(random_complex(rng, m), random_complex(rng, n)))
        else:
            blocks.append(np.zeros((m, n), dtype=complex))
    return module.flatten(blocks)


def embedding_hom(source: HModule, copies: np.ndarray, pad_rows, pad_cols) -> LinearMap:
    """Block-diagonal embedding: target block j holds copies[j, k] copies of source block k.

    Target block j has size (sum_k copies[j,k] m_k + pad_rows[j]) x
    (sum_k copies[j,k] n_k + pad_cols[j]); every such map is a ternary
    homomorphism, and a source block with no copies is divided out.
    """
    copies = np.asarray(copies, dtype=int)
    m_t, n_t = [], []
    for j in range(copies.shape[0]):
        m_t.append(int(sum(copies[j, k] * source.multiplicities[k] for k in range(source.base.r)) + pad_rows[j]))
        n_t.append(int(sum(copies[j, k] * source.base.block_dims[k] for k in range(source.base.r)) + pad_cols[j]))
    target = HModule(FdAlgebra(tuple(n_t)), tuple(m_t))
    mat = np.zeros((target.dim, source.dim), dtype=complex)
    for j in range(copies.shape[0]):
        r0 = c0 = 0
        for k in range(source.base.r):
            m, n = source.shapes[k]
            for _ in range(copies[j, k]):
                for a in range(m):
                    for b in range(n):
                        mat[target.offsets[j] + (r0 + a) * n_t[j] + (c0 + b), source.offsets[k] + a * n + b] = 1.0
                r0, c0 = r0 + m, c0 + n
    return LinearMap(source, target, mat)


def random_ternary_hom(rng: np.random.Generator, bounds: Bounds = Bounds(), source: HModule | None = None,
                       max_target_dim: int = 6) -> LinearMap:
    """Random ternary homomorphism: block embeddings, drops and unitaries.

    Source blocks may be copied into several target blocks, permuted or
    divided out (a compression onto the complement of a ternary ideal);
    random block unitaries act on both sides.
    """
    if source is None:
        source = random_module(rng, bounds)
    r_s = source.base.r
    r_t = int(rng.integers(1, bounds.max_blocks + 1))
    copies = np.zeros((r_t, r_s), dtype=int)
    for j in range(r_t):
        for k in rng.permutation(r_s):
            room = max_target_dim - int((copies[j] * np.array(source.base.block_dims)).sum())
            fits = room // source.base.block_dims[k]
            if fits > 0 and rng.random() < 0.5:
                copies[j, k] = int(rng.integers(1, min(2, fits) + 1))
    pad_cols = []
    for j in range(r_t):
        used = int((copies[j] * np.array(source.base.block_dims)).sum())
        pad_cols.append(int(rng.integers(0 if used else 1, 2)) if used < max_target_dim else 0)
    pad_rows = [int(rng.integers(0, 2)) for _ in range(r_t)]
    emb = embedding_hom(source, copies, pad_rows, pad_cols)
    target = emb.target
    w_s = block_unitary_map(rng, source)
    w_t = block_unitary_map(rng, target)
    return LinearMap(source, target, w_t.matrix @ emb.matrix @ w_s.matrix)


def random_hom_into(rng: np.random.Generator, module: HModule, bounds: Bounds = Bounds()) -> LinearMap:
    """Random ternary homomorphism whose target is ``module``.

    Each source block is an a x b rectangle placed c times along the diagonal
    of one or more target blocks; sharing a source block between target
    blocks yields diagonal-type ranges such as {(x, x)}.
    """
    groups: list[list] = []  # [(a, b), [(j, c), ...]]
    for j, (m, n) in enumerate(module.shapes):
        if m == 0:
            continue
        a = int(rng.integers(1, m + 1))
        b = int(rng.integers(1, n + 1))
        c = int(rng.integers(0, min(m // a, n // b) + 1))
        if not c:
            continue
        same = [g for g in groups if g[0] == (a, b)]
        if same and rng.random() < 0.5:
            same[0][1].append((j, c))
        else:
            groups.append([(a, b), [(j, c)]])
    if not groups:
        zero_src = HModule(FdAlgebra((1,)), (0,))
        return LinearMap(zero_src, module, np.zeros((module.dim, 0), dtype=complex))
    source = HModule(FdAlgebra(tuple(b for (_, b), _ in groups)), tuple(a for (a, _), _ in groups))
    mat = np.zeros((module.dim, source.dim), dtype=complex)
    for k, ((a, b), places) in enumerate(groups):
        for j, c in places:
            n_t = module.base.block_dims[j]
            for t in range(c):
                for i in range(a):
                    for l in range(b):
                        mat[module.offsets[j] + (t * a + i) * n_t + (t * b + l), source.offsets[k] + i * b + l] = 1.0
    w_t = block_unitary_map(rng, module)
    w_s = block_unitary_map(rng, source)
    return LinearMap(source, module, w_t.matrix @ mat @ w_s.matrix)


TERNARY_RECIPES = ("rectangle", "conjugate", "closure", "hom-range")


def random_ternary_subspace(rng: np.random.Generator, module: HModule, recipe: str | None = None,
                            tol: float = DEFAULT_TOL) -> tuple[str, Subspace]:
    if recipe is None:
        recipe = TERNARY_RECIPES[int(rng.integers(len(TERNARY_RECIPES)))]
    if recipe == "rectangle":
        return recipe, rectangle_subspace(rng, module, tol)
    if recipe == "conjugate":
        rect = rectangle_subspace(rng, module, tol)
        return recipe, block_unitary_map(rng, module).image_of(rect, tol)
    if recipe == "closure":
        count = int(rng.integers(1, 3))
        rows = np.array([low_rank_element(rng, module) for _ in range(count)]).reshape(count, module.dim)
        return recipe, ternary_closure(module, rows, tol)
    if recipe == "hom-range":
        return recipe, random_hom_into(rng, module).image(tol)
    raise ValueError(f"unknown recipe {recipe!r}")


SUBSPACE_RECIPES = ("ideal", "ideal-plus-vector", "random-span", "generated-submodule", "rectangle",
                    "closure", "conjugate", "hom-range")


def random_subspace(rng: np.random.Generator, module: HModule, recipe: str | None = None,
                    tol: float = DEFAULT_TOL) -> tuple[str, Subspace]:
    """A varied population of subspaces for testing ideal checkers."""
    if recipe is None:
        recipe = SUBSPACE_RECIPES[int(rng.integers(len(SUBSPACE_RECIPES)))]
    blocks = [k for k in range(module.base.r) if rng.random() < 0.5]
    if recipe == "ideal":
        return recipe, coordinate_subspace(module, module.block_indices(blocks), tol)
    if recipe == "ideal-plus-vector":
        ideal = coordinate_subspace(module, module.block_indices(blocks), tol)
        extra = low_rank_element(rng, module)
        return recipe, from_rows(module, np.vstack([ideal.rows, extra]), tol)
    if recipe == "random-span":
        count = int(rng.integers(0, module.dim + 1))
        return recipe, from_rows(module, random_complex(rng, (count, module.dim)), tol)
    if recipe == "generated-submodule":
        count = int(rng.integers(1, 3))
        rows = np.array([low_rank_element(rng, module) for _ in range(count)]).reshape(count, module.dim)
        units = np.eye(module.base.dim, dtype=complex)
        return recipe, from_rows(module, np.vstack([rows, action_rows(module, rows, units)]), tol)
    return random_ternary_subspace(rng, module, recipe, tol)


def random_extension(rng: np.random.Generator, bounds: Bounds = Bounds(), tol: float = DEFAULT_TOL) -> ExactSequence:
    """Random ternary ideal G of a random E, F = E/G, transported by a block unitary."""
    module = random_module(rng, bounds)
    blocks = [k for k in range(module.base.r) if rng.random() < 0.5]
    seq = canonical_extension(module, blocks, tol)
    return conjugate_sequence(seq, block_unitary_map(rng, module))


__all__ = [
    "Bounds",
    "SUBSPACE_RECIPES",
    "TERNARY_RECIPES",
    "block_unitary_map",
    "embedding_hom",
    "low_rank_element",
    "random_algebra",
    "random_complex",
    "random_extension",
    "random_hom_into",
    "random_module",
    "random_subspace",
    "random_ternary_hom",
    "random_ternary_subspace",
    "random_unitary",
    "rectangle_subspace",
    "ternary_closure",
]
