"""Linking algebras, ternary homomorphisms and their blockwise extensions.

The linking algebra of E over B = sum M_{n_k} is realised as the block algebra
with blocks of size n_k + m_k,

    [[ b_k   x_k^* ]
     [ y_k   a_k   ]]      b in B, x, y in E, a in K(E),

and the reduced linking algebra keeps only the blocks with m_k > 0, so that
its (1,1) corner is B_E.  Corners are addressed as (i, j) with i, j in {1, 2}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import DEFAULT_TOL, Check, RefusalError, StructuralError, VerificationError
from .fdcstar import AlgElement, FdAlgebra, block_inclusion, is_algebra_hom, mul_rows
from .hmod import (
    HModule,
    ModElement,
    inner_rows,
    product_span,
    rankone_rows,
    ternary_rows,
)
from .subspace import LinearMap, Subspace, from_rows

CORNERS = ((1, 1), (1, 2), (2, 1), (2, 2))


@dataclass(frozen=True, eq=False)
class LinkingAlgebra:
    module: HModule
    reduced: bool = True

    @cached_property
    def kept(self) -> tuple[int, ...]:
        return self.module.support if self.reduced else tuple(range(self.module.base.r))

    @cached_property
    def carrier(self) -> FdAlgebra:
        E = self.module
        return FdAlgebra(tuple(E.base.block_dims[k] + E.multiplicities[k] for k in self.kept))

    @cached_property
    def corner_algebra(self) -> FdAlgebra:
        """The (1,1) corner: B_E when reduced, B otherwise."""
        return self.module.base.subalgebra(self.kept)

    @cached_property
    def compacts(self) -> FdAlgebra:
        return self.module.compacts()

    def corner_space(self, i: int, j: int):
        return {
            (1, 1): self.corner_algebra,
            (1, 2): self.module,
            (2, 1): self.module,
            (2, 2): self.compacts,
        }[(i, j)]

    @cached_property
    def corner_index(self) -> dict:
        """Carrier coordinates of each corner, ordered like the corner space.

        The (1,2) corner is ordered like E: entry p holds the conjugate of
        coordinate p of the module element x whose adjoint sits there.
        """
        E, L = self.module, self.carrier
        idx = {c: [] for c in CORNERS}
        for pos, k in enumerate(self.kept):
            n, m = E.base.block_dims[k], E.multiplicities[k]
            size, off = n + m, L.offsets[pos]
            at = lambda a, b: off + a * size + b  # noqa: E731
            idx[(1, 1)] += [at(a, b) for a in range(n) for b in range(n)]
            idx[(2, 1)] += [at(n + a, b) for a in range(m) for b in range(n)]
            idx[(1, 2)] += [at(b, n + a) for a in range(m) for b in range(n)]
            idx[(2, 2)] += [at(n + a, n + b) for a in range(m) for b in range(m)]
        return {c: np.asarray(v, dtype=int) for c, v in idx.items()}

    @cached_property
    def base_restriction(self) -> np.ndarray:
        """B coordinates that make up the (1,1) corner algebra."""
        return self.module.base.block_indices(self.kept)

    def corner_mask(self, i: int, j: int) -> np.ndarray:
        mask = np.zeros(self.carrier.dim, dtype=bool)
        mask[self.corner_index[(i, j)]] = True
        return mask

    # -- embeddings ---------------------------------------------------------

    def _place(self, corner, vec) -> AlgElement:
        out = np.zeros(self.carrier.dim, dtype=complex)
        out[self.corner_index[corner]] = vec
        return self.carrier.from_vec(out)

    def embed_b(self, b: AlgElement) -> AlgElement:
        if b.parent == self.corner_algebra:
            return self._place((1, 1), b.vec)
        if b.parent != self.module.base:
            raise StructuralError("element is not in the base algebra")
        vec = b.vec
        outside = np.delete(vec, self.base_restriction)
        if outside.size and np.abs(outside).max() > DEFAULT_TOL * max(1.0, np.abs(vec).max()):
            raise StructuralError("element of B has components outside the range ideal B_E")
        return self._place((1, 1), vec[self.base_restriction])

    def embed_e(self, x: ModElement) -> AlgElement:
        self._own(x)
        return self._place((2, 1), x.vec)

    def embed_estar(self, x: ModElement) -> AlgElement:
        """The adjoint x^* = <x, .> placed in the (1,2) corner."""
        self._own(x)
        return self._place((1, 2), np.conj(x.vec))

    def embed_k(self, a: AlgElement) -> AlgElement:
        if a.parent != self.compacts:
            raise StructuralError("element is not in K(E)")
        return self._place((2, 2), a.vec)

    def _own(self, x):
        if x.parent != self.module:
            raise StructuralError("module element belongs to a different module")

    def embed_rows(self, corner, rows) -> np.ndarray:
        """Batched embedding of corner coordinates (E coordinates for (1,2))."""
        rows = np.atleast_2d(np.asarray(rows, dtype=complex))
        out = np.zeros((rows.shape[0], self.carrier.dim), dtype=complex)
        out[:, self.corner_index[corner]] = np.conj(rows) if corner == (1, 2) else rows
        return out

    def __repr__(self) -> str:
        kind = "reduced " if self.reduced else ""
        return f"LinkingAlgebra({kind}of {self.module!r} = {self.carrier!r})"


def build_linking(module: HModule, reduced: bool = True) -> LinkingAlgebra:
    return LinkingAlgebra(module, reduced)


def corner_project(L: LinkingAlgebra, i: int, j: int, a: AlgElement):
    """P_{i,j}: the (i,j) entry of ``a``.

    For (1,2) the result is the module element y with y^* in that corner.
    """
    if (i, j) not in CORNERS:
        raise StructuralError(f"corner ({i},{j}) does not exist")
    if a.parent != L.carrier:
        raise StructuralError("element is not in this linking algebra")
    vec = a.vec[L.corner_index[(i, j)]]
    if (i, j) == (1, 2):
        vec = np.conj(vec)
    return L.corner_space(i, j).from_vec(vec)


def corner_subspace(L: LinkingAlgebra, i: int, j: int, space: Subspace) -> Subspace:
    """P_{i,j} applied to a subspace of the carrier."""
    if space.parent != L.carrier:
        raise StructuralError("subspace is not in this linking algebra")
    rows = space.rows[:, L.corner_index[(i, j)]]
    if (i, j) == (1, 2):
        rows = np.conj(rows)
    return from_rows(L.corner_space(i, j), rows, space.tol)


def embed_subspace(L: LinkingAlgebra, i: int, j: int, space: Subspace) -> Subspace:
    corner_space = L.corner_space(i, j)
    rows = space.rows
    if (i, j) == (1, 1) and space.parent == L.module.base:
        rows = rows[:, L.base_restriction]
    elif space.parent != corner_space:
        raise StructuralError(f"subspace does not live in corner ({i},{j})")
    # corners occupy disjoint coordinates, so orthonormality is preserved
    return from_rows(L.carrier, L.embed_rows((i, j), rows), space.tol)


def linking_subspace(L: LinkingAlgebra, f: Subspace) -> Subspace:
    """The corner matrix [[span<F,F>, F^*], [F, span F F^*]] inside L."""
    if f.parent != L.module:
        raise StructuralError("subspace is not in the module of this linking algebra")
    parts = [
        embed_subspace(L, 1, 1, product_span("inner", f, f)),
        embed_subspace(L, 1, 2, f),
        embed_subspace(L, 2, 1, f),
        embed_subspace(L, 2, 2, product_span("rankone", f, f)),
    ]
    return from_rows(L.carrier, np.vstack([p.rows for p in parts]), f.tol)


def is_two_sided_ideal(space: Subspace, tol: float | None = None) -> Check:
    """Stability under left and right multiplication by algebra generators."""
    alg = space.parent
    gens = alg.generator_rows()
    left = space.contains_rows(mul_rows(alg, gens, space.rows), tol)
    if not left:
        return left
    return space.contains_rows(mul_rows(alg, space.rows, gens), tol)


# -- ternary homomorphisms ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class TernaryHom(LinearMap):
    """A linear map between modules, with the outcome of the ternary check."""

    verified: bool = False
    residual: float = math.nan

    @classmethod
    def checked(cls, source: HModule, target: HModule, matrix, tol: float = DEFAULT_TOL) -> "TernaryHom":
        chk = is_ternary_hom(LinearMap(source, target, matrix), tol)
        return cls(source, target, matrix, chk.ok, chk.residual)

    @classmethod
    def of(cls, v: LinearMap, tol: float = DEFAULT_TOL) -> "TernaryHom":
        if isinstance(v, TernaryHom) and v.verified:
            return v
        return cls.checked(v.source, v.target, v.matrix, tol)


def ternary_residual(v: LinearMap) -> float:
    E, F = v.source, v.target
    if E.dim == 0:
        return 0.0
    basis = np.eye(E.dim, dtype=complex)
    lhs = v.apply_rows(ternary_rows(E, basis, basis, basis))
    imgs = v.apply_rows(basis)
    rhs = ternary_rows(F, imgs, imgs, imgs)
    return float(np.abs(lhs - rhs).max()) if lhs.size else 0.0


def is_ternary_hom(v: LinearMap, tol: float = DEFAULT_TOL) -> Check:
    """v(x<y,z>) = (vx)<vy,vz> on all triples of basis vectors."""
    if not (isinstance(v.source, HModule) and isinstance(v.target, HModule)):
        raise StructuralError("ternary homomorphisms act between modules")
    res = ternary_residual(v)
    scale = max(1.0, float(np.abs(v.matrix).max()) if v.matrix.size else 1.0) ** 3
    return Check(res <= tol * scale, res)


@dataclass(frozen=True, eq=False)
class BlockwiseHom:
    """Corner-preserving homomorphism [[phi, u^*], [u, psi]] of linking algebras."""

    u: TernaryHom
    phi: LinearMap
    psi: LinearMap
    assembled: LinearMap
    source: LinkingAlgebra
    target: LinkingAlgebra
    residuals: dict = field(default_factory=dict)

    def corner_map(self, i: int, j: int) -> np.ndarray:
        """Block of the assembled matrix between the (i,j) corners."""
        s, t = self.source.corner_index[(i, j)], self.target.corner_index[(i, j)]
        return self.assembled.matrix[np.ix_(t, s)]


def _solve_on_spanning_set(gen: np.ndarray, targets: np.ndarray, tol: float):
    """Linear map M with M g_p = t_p for all p; residual certifies consistency."""
    if gen.shape[1] == 0 or targets.shape[1] == 0:
        return np.zeros((targets.shape[1], gen.shape[1]), dtype=complex), 0.0
    sol, *_ = np.linalg.lstsq(gen, targets, rcond=None)
    res = float(np.abs(gen @ sol - targets).max()) if targets.size else 0.0
    return sol.T, res


def _word_rows(L: LinkingAlgebra, x_rows: np.ndarray) -> np.ndarray:
    """Elements x, x^*, x^* y and x y^* of L built from module rows x, y."""
    e = L.embed_rows((2, 1), x_rows)
    es = L.embed_rows((1, 2), x_rows)
    return np.vstack([e, es, mul_rows(L.carrier, es, e), mul_rows(L.carrier, e, es)])


def extend_to_blockwise(v: LinearMap, reduced: bool = True, tol: float = DEFAULT_TOL) -> BlockwiseHom:
    """Extend a ternary homomorphism to a blockwise homomorphism.

    phi on the (1,1) corner is determined by phi(<x,y>) = <vx,vy> and psi on
    K(E) by psi(x y^*) = (vx)(vy)^*; both are solved by least squares over
    all basis pairs, the residual certifying well-definedness.  A second,
    corner-agnostic assembly solves for the whole map from the words x, x^*,
    x^* y, x y^* at once; the two must agree.
    """
    u = TernaryHom.of(v, tol)
    if not u.verified:
        raise RefusalError(f"map is not a ternary homomorphism (residual {u.residual:.3e})")
    E, F = u.source, u.target
    if not reduced and not E.is_full:
        raise RefusalError(
            "the full linking algebra extension needs a full source module; "
            "use the reduced linking algebras for non-full modules"
        )
    Ls, Lt = LinkingAlgebra(E, reduced), LinkingAlgebra(F, reduced)
    basis = np.eye(E.dim, dtype=complex)
    imgs = u.apply_rows(basis)

    gen_b = inner_rows(E, basis, basis)[:, Ls.base_restriction]
    tgt_b = inner_rows(F, imgs, imgs)[:, Lt.base_restriction]
    phi_mat, phi_res = _solve_on_spanning_set(gen_b, tgt_b, tol)
    gen_k = rankone_rows(E, basis, basis)
    tgt_k = rankone_rows(F, imgs, imgs)
    psi_mat, psi_res = _solve_on_spanning_set(gen_k, tgt_k, tol)

    mat = np.zeros((Lt.carrier.dim, Ls.carrier.dim), dtype=complex)
    ci_s, ci_t = Ls.corner_index, Lt.corner_index
    mat[np.ix_(ci_t[(1, 1)], ci_s[(1, 1)])] = phi_mat
    mat[np.ix_(ci_t[(2, 1)], ci_s[(2, 1)])] = u.matrix
    mat[np.ix_(ci_t[(1, 2)], ci_s[(1, 2)])] = np.conj(u.matrix)
    mat[np.ix_(ci_t[(2, 2)], ci_s[(2, 2)])] = psi_mat
    assembled = LinearMap(Ls.carrier, Lt.carrier, mat)

    scale = max(1.0, float(np.abs(u.matrix).max()) if u.matrix.size else 1.0) ** 2
    if max(phi_res, psi_res) > tol * scale * max(1, E.dim):
        raise VerificationError(
            f"corner maps are not well defined (residuals {phi_res:.3e}, {psi_res:.3e})"
        )
    hom = is_algebra_hom(assembled, tol=1e-8)
    if not hom:
        raise VerificationError(f"assembled map is not multiplicative (residual {hom.residual:.3e})")

    words_s = _word_rows(Ls, basis)
    words_t = _word_rows(Lt, imgs)
    alt, alt_res = _solve_on_spanning_set(words_s, words_t, tol)
    spans = from_rows(Ls.carrier, words_s, tol).dim == Ls.carrier.dim
    uniq = float(np.linalg.norm(alt - mat, 2)) if mat.size else 0.0
    if spans and uniq > 1e-8 * scale:
        raise VerificationError(f"two assemblies of the extension disagree by {uniq:.3e}")

    phi = LinearMap(Ls.corner_algebra, Lt.corner_algebra, phi_mat)
    psi = LinearMap(Ls.compacts, Lt.compacts, psi_mat)
    residuals = {
        "ternary": u.residual,
        "phi_consistency": phi_res,
        "psi_consistency": psi_res,
        "multiplicativity": hom.residual,
        "second_assembly": alt_res,
        "uniqueness": uniq if spans else math.nan,
    }
    return BlockwiseHom(u, phi, psi, assembled, Ls, Lt, residuals)


def check_blockwise(phi: LinearMap, source: LinkingAlgebra, target: LinkingAlgebra,
                    tol: float = DEFAULT_TOL) -> Check:
    """Every corner of the source lands in the same corner of the target.

    The witness is ``((i, j), leak)`` for the worst corner.
    """
    if phi.source != source.carrier or phi.target != target.carrier:
        raise StructuralError("map does not act between the given linking algebras")
    worst, corner = 0.0, None
    scale = max(1.0, float(np.abs(phi.matrix).max()) if phi.matrix.size else 1.0)
    for c in CORNERS:
        cols = phi.matrix[:, source.corner_index[c]]
        leak = cols[~target.corner_mask(*c)]
        res = float(np.abs(leak).max()) if leak.size else 0.0
        if res > worst:
            worst, corner = res, c
    ok = worst <= tol * scale
    return Check(ok, worst, None if ok else (corner, worst))


def preserves_module_corner(phi: LinearMap, source: LinkingAlgebra, target: LinkingAlgebra,
                            tol: float = DEFAULT_TOL) -> Check:
    cols = phi.matrix[:, source.corner_index[(2, 1)]]
    leak = cols[~target.corner_mask(2, 1)]
    res = float(np.abs(leak).max()) if leak.size else 0.0
    scale = max(1.0, float(np.abs(phi.matrix).max()) if phi.matrix.size else 1.0)
    return Check(res <= tol * scale, res)


def ternary_iso_to_generalized_unitary(w: LinearMap, tol: float = DEFAULT_TOL) -> BlockwiseHom:
    """Blockwise isomorphism of reduced linking algebras extending a ternary iso.

    Its (1,1) corner is an isomorphism B_{E1} -> B_{E2} for which ``w`` is a
    phi-unitary: <wx, wy> = phi(<x, y>).
    """
    if w.source.dim != w.target.dim or w.rank(tol) != w.source.dim:
        raise RefusalError("map is not bijective")
    ext = extend_to_blockwise(w, reduced=True, tol=tol)
    if ext.phi.rank(tol) != ext.phi.source.dim or ext.phi.source.dim != ext.phi.target.dim:
        raise VerificationError("induced map of range ideals is not bijective")
    return ext


def phi_isometry_residual(v: LinearMap, phi: LinearMap) -> float:
    """max |<vx, vy> - phi(<x, y>)| over basis pairs.

    ``phi`` may act on the full base algebra or on the range algebra B_E.
    """
    E, F = v.source, v.target
    if E.dim == 0:
        return 0.0
    basis = np.eye(E.dim, dtype=complex)
    imgs = v.apply_rows(basis)
    gram = inner_rows(E, basis, basis)
    if phi.source != E.base:
        gram = gram[:, E.base.block_indices(E.support)]
    lhs = inner_rows(F, imgs, imgs)
    rhs = phi.apply_rows(gram)
    if phi.target != F.base:
        lhs = lhs[:, F.base.block_indices(F.support)]
    return float(np.abs(lhs - rhs).max()) if lhs.size else 0.0


def rotated_automorphism(block_dims=(1,), angle: float = math.pi / 4):
    """Ad(U) on M_2(B) = linking algebra of B over itself, U a rotation.

    Returns ``(linking_algebra, map)``.  For angles off multiples of pi/2
    the map is a *-automorphism that mixes the corners.
    """
    B = FdAlgebra(tuple(block_dims))
    E = HModule(B, tuple(block_dims))
    L = LinkingAlgebra(E, reduced=False)
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    cols = []
    for k, n in enumerate(B.block_dims):
        u = np.kron(rot, np.eye(n))
        cols.append((k, u))
    basis = np.eye(L.carrier.dim, dtype=complex)
    blocks = L.carrier.split(basis)
    images = [np.einsum("ab,ibc,dc->iad", u, blocks[k], u.conj()) for k, u in cols]
    mat = L.carrier.join(images, L.carrier.dim).T
    return L, LinearMap(L.carrier, L.carrier, mat)


def inclusion_of_ideal_blocks(module: HModule, blocks):
    """Inclusion of the submodule over the given blocks as a module over them."""
    sub_base, _ = block_inclusion(module.base, blocks)
    sub = HModule(sub_base, tuple(module.multiplicities[k] for k in sorted(blocks)))
    idx = module.block_indices(blocks)
    mat = np.zeros((module.dim, sub.dim), dtype=complex)
    mat[idx, np.arange(idx.size)] = 1.0
    return sub, LinearMap(sub, module, mat)


__all__ = [
    "CORNERS",
    "BlockwiseHom",
    "LinkingAlgebra",
    "TernaryHom",
    "build_linking",
    "check_blockwise",
    "corner_project",
    "corner_subspace",
    "embed_subspace",
    "extend_to_blockwise",
    "is_ternary_hom",
    "is_two_sided_ideal",
    "linking_subspace",
    "phi_isometry_residual",
    "preserves_module_corner",
    "rotated_automorphism",
    "ternary_iso_to_generalized_unitary",
]
