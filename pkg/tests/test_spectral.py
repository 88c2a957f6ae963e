import numpy as np
import pytest

from hodgelab import build_clique_complex, drop_simplices
from hodgelab.generators import offspring_tree_family, gen_lattice, gen_truncated_tree
from hodgelab.spectral import (
    boundary_weight_down,
    esa_sweep,
    hodge_decompose,
    hodge_orthogonality_residual,
    kernel_probe,
    spectrum,
)

from conftest import unit_graph
from oracles import betti_by_rank, graph_laplacian


def test_spectrum_k3(K3):
    rep = spectrum(K3, 0)
    oracle = np.sort(np.linalg.eigvalsh(
        graph_laplacian("abc", {("a", "b"): 1.0, ("a", "c"): 1.0, ("b", "c"): 1.0})))
    assert np.allclose(np.repeat(rep.eigenvalues, rep.multiplicities), oracle, atol=1e-10)
    assert rep.method == "dense"
    assert all(r <= 1e-8 for r in rep.residuals)


def test_spectrum_single_vertex():
    cx = build_clique_complex(unit_graph("ab", [("a", "b")]), 1)
    sub = drop_simplices(cx, 1, lambda s: False)
    rep = spectrum(sub, 0, how_many=2)
    assert np.allclose(np.repeat(rep.eigenvalues, rep.multiplicities), [0.0, 0.0], atol=1e-12)
    lone = build_clique_complex(unit_graph("a", []), 1)
    rep = spectrum(lone, 0, how_many=1)
    assert rep.eigenvalues == [0.0]
    assert spectrum(lone, 1).method == "empty"


def test_spectrum_four_cycle_harmonic(four_cycle):
    rep = spectrum(four_cycle, 1, how_many=4)
    vals = np.repeat(rep.eigenvalues, rep.multiplicities)
    assert abs(vals[0]) <= 1e-10
    assert vals[1] > 1e-8  # simple zero eigenvalue: one harmonic loop


def test_dense_and_iterative_agree():
    cx = gen_lattice(2, 2, 6)  # 169 vertices
    dense = spectrum(cx, 0, how_many=4, method="dense")
    iterative = spectrum(cx, 0, how_many=4, method="iterative", seed=0)
    a = np.repeat(dense.eigenvalues, dense.multiplicities)[:4]
    b = np.repeat(iterative.eigenvalues, iterative.multiplicities)[:4]
    assert np.max(np.abs(a - b)) <= 1e-8


def test_psd_across_examples(K4, four_cycle):
    for cx in (K4, four_cycle, gen_truncated_tree(2, 4)):
        for d in range(cx.max_degree + 1):
            if cx.size(d) == 0:
                continue
            rep = spectrum(cx, d, how_many=1)
            assert rep.eigenvalues[0] >= -1e-10


def test_hodge_k3_filled(K3):
    dec = hodge_decompose(K3, 1)
    assert dec.betti == 0
    assert dec.dims() == (2, 0, 1)
    assert hodge_orthogonality_residual(K3, dec) <= 1e-10


def test_hodge_hollow_triangle(hollow_triangle):
    dec = hodge_decompose(hollow_triangle, 1)
    assert dec.betti == 1
    assert sum(dec.dims()) == 3


def test_hodge_four_cycle(four_cycle):
    assert hodge_decompose(four_cycle, 1).betti == 1
    assert hodge_decompose(four_cycle, 0).betti == 1


def test_hodge_connected_degree_zero(K4):
    dec = hodge_decompose(K4, 0)
    assert dec.betti == 1  # constants


def test_hodge_dimensions_sum(K4):
    for ell in range(K4.max_degree + 1):
        dec = hodge_decompose(K4, ell)
        assert sum(dec.dims()) == K4.size(ell)


def test_hodge_matches_boundary_rank_oracle(K4, four_cycle, hollow_triangle):
    for cx in (K4, four_cycle, hollow_triangle, gen_truncated_tree(1, 3)):
        expected = betti_by_rank(cx.simplices)
        got = [hodge_decompose(cx, ell).betti for ell in range(cx.max_degree + 1)]
        assert got == expected


def test_hodge_weighted_orthogonality():
    cx = gen_lattice(2, 2, 3)
    from hodgelab.generators import radial_weighting

    rw = radial_weighting(cx, {(0, 0)}, 2.0)
    for ell in range(3):
        dec = hodge_decompose(rw, ell)
        assert hodge_orthogonality_residual(rw, dec) <= 1e-10
        assert sum(dec.dims()) == rw.size(ell)


def test_euler_characteristic_consistency(K4, four_cycle, hollow_triangle):
    for cx in (K4, four_cycle, hollow_triangle, gen_truncated_tree(2, 4)):
        euler_counts = sum((-1) ** i * cx.size(i) for i in range(cx.max_degree + 1))
        euler_betti = sum(
            (-1) ** i * hodge_decompose(cx, i).betti for i in range(cx.max_degree + 1)
        )
        assert euler_counts == euler_betti


def test_kernel_probe_matches_explicit_shifted_svd(K4, four_cycle):
    # the probe uses sigma_min(L + i I) = sqrt(lambda_min^2 + 1); compare with
    # the singular values of the explicitly formed complex-shifted block
    from hodgelab.generators import radial_weighting
    from hodgelab.operators import symmetrized_laplacian

    weighted = radial_weighting(gen_truncated_tree(2, 4), {()}, 2.0)
    for cx in (K4, four_cycle, weighted):
        for d in range(cx.max_degree + 1):
            if cx.size(d) == 0:
                continue
            A = symmetrized_laplacian(cx, d).toarray().astype(complex)
            direct = np.linalg.svd(A + 1j * np.eye(A.shape[0]), compute_uv=False).min()
            assert abs(kernel_probe(cx, d, 1j) - direct) <= 1e-10


def test_kernel_probe_lower_bound(K3, K4, four_cycle):
    for cx in (K3, K4, four_cycle):
        for d in range(cx.max_degree + 1):
            if cx.size(d) == 0:
                continue
            for shift in (1j, -1j):
                assert kernel_probe(cx, d, shift) >= 1.0 - 1e-10


def test_kernel_probe_zero_block():
    # two isolated-ish vertices at degree 0 with no edges: L_0 = 0
    cx = build_clique_complex(unit_graph("ab", [("a", "b")]), 1)
    hollow = drop_simplices(cx, 1, lambda s: False)
    assert kernel_probe(hollow, 0, 1j) == 1.0
    with pytest.raises(ValueError):
        kernel_probe(cx, 0, 2j)


def test_boundary_weight_down_scales_last_layer():
    cx = gen_truncated_tree(1, 3)
    down = boundary_weight_down(cx, 1e-3)
    dist = cx.graph.distances_from([()])
    top = max(dist.values())
    for j, v in enumerate(down.simplices[0]):
        expected = 1e-3 if dist[v[0]] == top else 1.0
        assert np.isclose(down.weights[0][j], expected)


def test_esa_sweep_arity_and_refusals():
    table = esa_sweep("n^2", range(4, 11), how_many=2, guard=5000)
    assert len(table["rows"]) == 7
    refused = [r for r in table["rows"] if r.get("refused")]
    built = [r for r in table["rows"] if not r.get("refused")]
    assert built and refused  # feasible small depths, guarded large ones
    for row in built:
        for d, vals in row["smallest_eigenvalues"].items():
            assert all(v >= -1e-10 for v in vals)
        for d, s in row["sigma_min_plus"].items():
            assert s >= 1.0 - 1e-10


def test_esa_sweep_partial_sum_column():
    from hodgelab.divergence import divergence_partial_sums

    table = esa_sweep("n^4", range(4, 11), how_many=2)
    assert len(table["rows"]) == 7
    last = table["rows"][-1]
    assert last["depth"] == 10
    assert abs(last["partial_sum"] - 1.5498) < 1e-4  # recorded even when refused
    expect = divergence_partial_sums(lambda n: n ** 4, range(1, 11)).partial_sums[-1]
    assert last["partial_sum"] == expect


def test_esa_sweep_deterministic():
    a = esa_sweep("n^2", [4, 5], how_many=2, seed=0)
    b = esa_sweep("n^2", [4, 5], how_many=2, seed=0)
    assert a == b
