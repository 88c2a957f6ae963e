"""Coboundary, codifferential, Gauss-Bonnet and Hodge Laplacian operators.

All operators act on cochains stored against the canonical simplex tables of a
WeightedComplex.  The codifferential is the formal adjoint of the coboundary
with respect to the weighted inner products <f,g>_i = sum_s m_i(s) f(s) g*(s),
which makes every Laplacian block positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .complexes import WeightedComplex, canonical_sign

__all__ = [
    "Cochain",
    "OperatorBlock",
    "inner_product",
    "norm",
    "coboundary_apply",
    "codifferential_apply",
    "gauss_bonnet_apply",
    "coboundary_matrix",
    "codifferential_matrix",
    "laplacian_matrix",
    "gauss_bonnet_matrix",
    "symmetrized_laplacian",
    "assemble_block",
    "adjointness_check",
    "random_cochain",
    "export_coordinate_text",
]


@dataclass
class Cochain:
    """Degree-i cochain: one value per canonical i-simplex.

    Values on non-canonical orientations follow from the permutation sign,
    see :meth:`value_on`.
    """

    degree: int
    values: np.ndarray

    @classmethod
    def zeros(cls, cx: WeightedComplex, degree: int, dtype=float) -> "Cochain":
        return cls(degree, np.zeros(cx.size(degree), dtype=dtype))

    @classmethod
    def indicator(cls, cx: WeightedComplex, vertices) -> "Cochain":
        key, sign = canonical_sign(vertices)
        degree = len(key) - 1
        c = cls.zeros(cx, degree)
        c.values[cx.index_of(degree, key)] = sign
        return c

    def value_on(self, cx: WeightedComplex, vertices) -> complex:
        key, sign = canonical_sign(vertices)
        return sign * self.values[cx.index_of(self.degree, key)]

    def copy(self) -> "Cochain":
        return Cochain(self.degree, self.values.copy())


@dataclass
class OperatorBlock:
    """Sparse realization of one operator with its simplex-table indexing."""

    kind: str
    source_degree: int
    target_degree: int
    matrix: sp.spmatrix


def inner_product(cx: WeightedComplex, degree: int, f: np.ndarray, g: np.ndarray) -> complex:
    """Weighted inner product over canonical representatives.

    Equals the orientation-pair sum with its 1/(i+1)! normalization, since
    |f|^2 is invariant under vertex permutations of a simplex.
    """
    val = np.sum(cx.weights[degree] * f * np.conj(g))
    return complex(val) if np.iscomplexobj(f) or np.iscomplexobj(g) else float(val)


def norm(cx: WeightedComplex, degree: int, f: np.ndarray) -> float:
    return float(np.sqrt(abs(inner_product(cx, degree, f, f))))


def _check_degree(cx: WeightedComplex, f: Cochain, degree: int) -> None:
    if f.degree != degree:
        raise ValueError(f"cochain degree {f.degree}, expected {degree}")
    if len(f.values) != cx.size(degree):
        raise ValueError(
            f"cochain length {len(f.values)} does not match table size {cx.size(degree)}"
        )


def coboundary_apply(cx: WeightedComplex, f: Cochain) -> Cochain:
    """(df)(x_0..x_{i+1}) = sum_l (-1)^l f(x_0..x̂_l..x_{i+1})."""
    i = f.degree
    _check_degree(cx, f, i)
    if i >= cx.max_degree:
        raise ValueError(f"no degree {i + 1} in a max-degree-{cx.max_degree} complex")
    out = np.zeros(cx.size(i + 1), dtype=f.values.dtype)
    vals = f.values
    for t, row in enumerate(cx.faces[i + 1]):
        acc = 0.0
        for l, s in row:
            acc = acc + (vals[s] if l % 2 == 0 else -vals[s])
        out[t] = acc
    return Cochain(i + 1, out)


def codifferential_apply(cx: WeightedComplex, g: Cochain) -> Cochain:
    """Adjoint of the coboundary under the weighted inner products.

    (δg)(s) = (1/m(s)) * sum over coface extensions s ∪ {x} of
    m(s ∪ {x}) * g(x, s_0, .., s_{i-1}); prepending x and resolving the
    orientation sign realizes the adjoint exactly.
    """
    j = g.degree
    _check_degree(cx, g, j)
    if j < 1:
        raise ValueError("codifferential undefined at degree 0")
    out = np.zeros(cx.size(j - 1), dtype=g.values.dtype)
    vals = g.values
    m_up = cx.weights[j]
    m_dn = cx.weights[j - 1]
    upper = cx.simplices[j]
    for s_idx, exts in enumerate(cx.extensions[j - 1]):
        acc = 0.0
        for x, t in exts:
            l = upper[t].index(x)
            term = m_up[t] * vals[t]
            acc = acc + (term if l % 2 == 0 else -term)
        out[s_idx] = acc / m_dn[s_idx]
    return Cochain(j - 1, out)


def gauss_bonnet_apply(cx: WeightedComplex, F: tuple) -> tuple:
    """Apply D = d + δ to a tuple of cochains of degrees 0..n."""
    n = cx.max_degree
    if len(F) != n + 1:
        raise ValueError(f"expected {n + 1} components, got {len(F)}")
    for i, f in enumerate(F):
        _check_degree(cx, f, i)
    out = []
    for i in range(n + 1):
        acc = np.zeros(cx.size(i), dtype=complex if any(np.iscomplexobj(f.values) for f in F) else float)
        if i > 0:
            acc = acc + coboundary_apply(cx, F[i - 1]).values
        if i < n:
            acc = acc + codifferential_apply(cx, F[i + 1]).values
        out.append(Cochain(i, acc))
    return tuple(out)


def coboundary_matrix(cx: WeightedComplex, degree: int) -> sp.csr_matrix:
    """d_degree as a |P_{degree+1}| x |P_degree| signed incidence matrix."""
    if not 0 <= degree < cx.max_degree:
        raise ValueError(f"coboundary degree {degree} out of range")
    rows, cols, data = [], [], []
    for t, row in enumerate(cx.faces[degree + 1]):
        for l, s in row:
            rows.append(t)
            cols.append(s)
            data.append(1.0 if l % 2 == 0 else -1.0)
    shape = (cx.size(degree + 1), cx.size(degree))
    return sp.csr_matrix((data, (rows, cols)), shape=shape)


def _weight_diags(cx: WeightedComplex, degree: int):
    m = cx.weights[degree]
    return sp.diags(m), sp.diags(1.0 / m)


def codifferential_matrix(cx: WeightedComplex, degree: int) -> sp.csr_matrix:
    """δ_degree = M_{degree-1}^{-1} d^T M_degree, acting degree -> degree-1."""
    if not 1 <= degree <= cx.max_degree:
        raise ValueError(f"codifferential degree {degree} out of range")
    d = coboundary_matrix(cx, degree - 1)
    m_up, _ = _weight_diags(cx, degree)
    _, m_dn_inv = _weight_diags(cx, degree - 1)
    return (m_dn_inv @ d.T @ m_up).tocsr()


def laplacian_matrix(cx: WeightedComplex, degree: int) -> sp.csr_matrix:
    """L_degree = δ d + d δ with the boundary conventions d_{-1}=0, δ_{n+1}=0."""
    n = cx.max_degree
    if not 0 <= degree <= n:
        raise ValueError(f"laplacian degree {degree} out of range")
    size = cx.size(degree)
    L = sp.csr_matrix((size, size))
    if degree < n:
        L = L + codifferential_matrix(cx, degree + 1) @ coboundary_matrix(cx, degree)
    if degree > 0:
        L = L + coboundary_matrix(cx, degree - 1) @ codifferential_matrix(cx, degree)
    return L.tocsr()


def block_offsets(cx: WeightedComplex) -> list[int]:
    offs = [0]
    for i in range(cx.max_degree + 1):
        offs.append(offs[-1] + cx.size(i))
    return offs


def gauss_bonnet_matrix(cx: WeightedComplex) -> sp.csr_matrix:
    """D = d + δ on the direct sum of all cochain degrees."""
    n = cx.max_degree
    blocks = [[None] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        blocks[i + 1][i] = coboundary_matrix(cx, i)
        blocks[i][i + 1] = codifferential_matrix(cx, i + 1)
    for i in range(n + 1):
        if blocks[i][i] is None:
            blocks[i][i] = sp.csr_matrix((cx.size(i), cx.size(i)))
    return sp.bmat(blocks, format="csr")


def symmetrized_laplacian(cx: WeightedComplex, degree: int) -> sp.csr_matrix:
    """Similarity transform M^{1/2} L M^{-1/2}: symmetric PSD, same spectrum.

    Equals W_i^T W_i + W_{i-1} W_{i-1}^T with W_i = M_{i+1}^{1/2} d_i M_i^{-1/2}.
    """
    n = cx.max_degree
    size = cx.size(degree)
    A = sp.csr_matrix((size, size))
    if degree < n:
        W = _scaled_coboundary(cx, degree)
        A = A + W.T @ W
    if degree > 0:
        W = _scaled_coboundary(cx, degree - 1)
        A = A + W @ W.T
    return A.tocsr()


def _scaled_coboundary(cx: WeightedComplex, degree: int) -> sp.csr_matrix:
    d = coboundary_matrix(cx, degree)
    s_up = sp.diags(np.sqrt(cx.weights[degree + 1]))
    s_dn = sp.diags(1.0 / np.sqrt(cx.weights[degree]))
    return (s_up @ d @ s_dn).tocsr()


def assemble_block(cx: WeightedComplex, kind: str, degree: int | None = None) -> OperatorBlock:
    """Assemble one named operator block with its row/column degrees."""
    if kind == "coboundary":
        return OperatorBlock(kind, degree, degree + 1, coboundary_matrix(cx, degree))
    if kind == "codifferential":
        return OperatorBlock(kind, degree, degree - 1, codifferential_matrix(cx, degree))
    if kind == "laplacian_block":
        return OperatorBlock(kind, degree, degree, laplacian_matrix(cx, degree))
    if kind == "gauss_bonnet":
        return OperatorBlock(kind, -1, -1, gauss_bonnet_matrix(cx))
    raise ValueError(f"unknown operator kind {kind!r}")


def random_cochain(cx: WeightedComplex, degree: int, rng: np.random.Generator,
                   normalized: bool = True) -> Cochain:
    v = rng.standard_normal(cx.size(degree))
    if normalized:
        nv = norm(cx, degree, v)
        if nv > 0:
            v = v / nv
    return Cochain(degree, v)


def adjointness_check(cx: WeightedComplex, degree: int, trials: int = 100, seed: int = 0) -> float:
    """Max |<df,g> - <f,δg>| over seeded random unit cochain pairs."""
    if degree >= cx.max_degree:
        raise ValueError("need degree < max_degree")
    rng = np.random.default_rng(seed)
    d = coboundary_matrix(cx, degree)
    delta = codifferential_matrix(cx, degree + 1)
    worst = 0.0
    for _ in range(trials):
        f = random_cochain(cx, degree, rng)
        g = random_cochain(cx, degree + 1, rng)
        lhs = inner_product(cx, degree + 1, d @ f.values, g.values)
        rhs = inner_product(cx, degree, f.values, delta @ g.values)
        worst = max(worst, abs(lhs - rhs))
    return worst


def export_coordinate_text(matrix: sp.spmatrix, target) -> None:
    """Write 1-based (row, col, value) triplets with a shape header.

    ``target`` is a path or an open text stream.
    """
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))

    def emit(fh):
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for k in order:
            fh.write(f"{coo.row[k] + 1} {coo.col[k] + 1} {coo.data[k]:.17g}\n")

    if hasattr(target, "write"):
        emit(target)
    else:
        with open(target, "w") as fh:
            emit(fh)
