"""Brute-force reference computations.

Everything here works on plain lists of numpy blocks with explicit loops and
``numpy.linalg.matrix_rank``; nothing is imported from the package, so these
act as independent oracles for the row-kernel implementation.
"""
import itertools

import numpy as np

RANK_TOL = 1e-8


def to_blocks(m, n, vec):
    out, off = [], 0
    for a, b in zip(m, n):
        out.append(np.asarray(vec[off:off + a * b], dtype=complex).reshape(a, b))
        off += a * b
    return out


def to_vec(blocks):
    return np.concatenate([np.asarray(b, dtype=complex).reshape(-1) for b in blocks]) if blocks else np.zeros(0)


def dim(m, n):
    return sum(a * b for a, b in zip(m, n))


def rank(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    if rows.size == 0:
        return 0
    scale = max(1.0, np.abs(rows).max())
    return int(np.linalg.matrix_rank(rows, tol=RANK_TOL * scale))


def in_span(basis, rows):
    basis = np.asarray(basis, dtype=complex)
    rows = np.asarray(rows, dtype=complex)
    if rows.size == 0:
        return True
    if basis.size == 0:
        return rank(rows) == 0
    return rank(np.vstack([basis, rows])) == rank(basis)


def same_span(a, b):
    return in_span(a, b) and in_span(b, a)


# -- algebra -----------------------------------------------------------------


def entrywise_product(x, y):
    """Matrix product written out as sum_k x[i,k] y[k,j]."""
    p, q = x.shape[0], y.shape[1]
    out = np.zeros((p, q), dtype=complex)
    for i in range(p):
        for j in range(q):
            s = 0
            for k in range(x.shape[1]):
                s += x[i, k] * y[k, j]
            out[i, j] = s
    return out


def algebra_units(n):
    """Matrix units of the block algebra, as lists of blocks."""
    out = []
    for k, d in enumerate(n):
        for i in range(d):
            for j in range(d):
                blocks = [np.zeros((e, e), dtype=complex) for e in n]
                blocks[k][i, j] = 1
                out.append(blocks)
    return out


def is_two_sided_ideal(n, rows):
    """span(B V B) inside V, checked over all matrix-unit pairs."""
    if not rows:
        return True
    units = algebra_units(n)
    prods = []
    for v in rows:
        vb = to_blocks(n, n, v)
        for a in units:
            prods.append(to_vec([x @ y for x, y in zip(a, vb)]))
            prods.append(to_vec([y @ x for x, y in zip(a, vb)]))
    return in_span(np.array(rows), np.array(prods))


# -- modules -----------------------------------------------------------------


def module_basis(m, n):
    return np.eye(dim(m, n), dtype=complex)


def triple(m, n, x, y, z):
    """x <y, z> = x y^* z blockwise."""
    xb, yb, zb = to_blocks(m, n, x), to_blocks(m, n, y), to_blocks(m, n, z)
    return to_vec([a @ b.conj().T @ c for a, b, c in zip(xb, yb, zb)])


def triple_span(m, n, A, B, C):
    rows = [triple(m, n, a, b, c) for a in A for b in B for c in C]
    return np.array(rows) if rows else np.zeros((0, dim(m, n)), dtype=complex)


def inner(m, n, x, y):
    return [a.conj().T @ b for a, b in zip(to_blocks(m, n, x), to_blocks(m, n, y))]


def act(m, n, x, b_blocks):
    return to_vec([a @ b for a, b in zip(to_blocks(m, n, x), b_blocks)])


def is_submodule(m, n, K):
    rows = [act(m, n, k, u) for k in K for u in algebra_units(n)]
    return in_span(K, rows) if rows else True


def is_ternary_ideal(m, n, K):
    E = module_basis(m, n)
    return in_span(K, triple_span(m, n, E, K, E)) if len(K) else True


def is_ternary_subspace(m, n, F):
    return in_span(F, triple_span(m, n, F, F, F)) if len(F) else True


def block_coordinates(m, n, blocks):
    rows, off = [], 0
    eye = module_basis(m, n)
    for k, (a, b) in enumerate(zip(m, n)):
        if k in blocks:
            rows.extend(eye[off:off + a * b])
        off += a * b
    return np.array(rows) if rows else np.zeros((0, dim(m, n)), dtype=complex)


def ideal_submodule_blocks(m, n, K):
    """The block set S (inside the support) with span(E I_S) = K, or None."""
    support = [k for k, a in enumerate(m) if a > 0]
    for size in range(len(support) + 1):
        for subset in itertools.combinations(support, size):
            if same_span(np.array(K).reshape(-1, dim(m, n)), block_coordinates(m, n, set(subset))):
                return frozenset(subset)
    return None


def _linking_vec(m, n, support, corner_blocks):
    return to_vec([corner_blocks[k] for k in support])


def linking_ideal(m, n, K):
    """Corner matrix [[<K,K>, K^*], [K, K K^*]] is an ideal of the reduced linking algebra.

    Each supported block k is realised as an (n_k + m_k) square matrix.
    """
    support = [k for k, a in enumerate(m) if a > 0]
    sizes = [n[k] + m[k] for k in support]

    def place(part, mats):
        """One linking element whose block k holds mats[k] in the given corner."""
        blocks = {}
        for k in support:
            z = np.zeros((n[k] + m[k],) * 2, dtype=complex)
            nk = n[k]
            rows = slice(0, nk) if part[0] == 1 else slice(nk, None)
            cols = slice(0, nk) if part[1] == 1 else slice(nk, None)
            z[rows, cols] = mats[k]
            blocks[k] = z
        return blocks

    gens = []
    kb = [to_blocks(m, n, k) for k in K]
    for x in kb:
        gens.append(place((2, 1), x))
        gens.append(place((1, 2), [b.conj().T for b in x]))
        for y in kb:
            gens.append(place((1, 1), [a.conj().T @ b for a, b in zip(x, y)]))
            gens.append(place((2, 2), [a @ b.conj().T for a, b in zip(x, y)]))
    if not gens:
        return True
    J = np.array([_linking_vec(m, n, support, g) for g in gens])
    units = algebra_units(sizes)
    prods = []
    for g in gens:
        gl = [g[k] for k in support]
        for u in units:
            prods.append(to_vec([a @ b for a, b in zip(u, gl)]))
            prods.append(to_vec([b @ a for a, b in zip(u, gl)]))
    return in_span(J, np.array(prods))


def is_hereditary_ternary(m, n, F):
    E = module_basis(m, n)
    return in_span(F, triple_span(m, n, F, E, F)) if len(F) else True
