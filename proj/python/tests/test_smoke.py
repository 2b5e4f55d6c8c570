"""Smoke tests for the python bindings: fast structural checks only; the
heavy numerical validation lives in the C++ suites."""

import math

import pytest

import clustersync as cs


@pytest.fixture(scope="module")
def bench():
    net = cs.example_network("fig2-case-a")
    dec = cs.decompose(net)
    return net, dec


def test_version_string():
    assert isinstance(cs.__version__, str) and cs.__version__


def test_make_and_matrices():
    net = cs.make_network(3, [(0, 1, 1.0), (1, 2, 2.0)], kappa=0.5)
    A = cs.adjacency(net)
    At = cs.shifted_adjacency(net)
    L = cs.laplacian(net)
    assert A.shape == (3, 3) and A[0, 1] == 1.0 and A[1, 2] == 2.0
    assert At[0, 0] == -0.5 and At[0, 1] == 1.0
    assert L[1, 1] == 3.0 and L[0, 1] == -1.0
    assert abs(L.sum()) < 1e-12


def test_load_save_roundtrip(tmp_path):
    net = cs.make_network(4, [(0, 1, 1.25), (2, 3, 0.5)], kappa=2.0)
    path = str(tmp_path / "net.edges")
    cs.save_network(net, path)
    back = cs.load_network(path, kappa=2.0)
    assert back.n_nodes == 4 and back.edge_count == 2
    assert [(e.i, e.j, e.w) for e in back.edges] == [(0, 1, 1.25), (2, 3, 0.5)]


def test_load_errors_are_value_errors(tmp_path):
    bad = tmp_path / "bad.edges"
    bad.write_text("1 2 not-a-number\n")
    with pytest.raises(ValueError):
        cs.load_network(str(bad))


def test_coloring_and_quotient(bench):
    net, dec = bench
    part = cs.minimum_balanced_coloring(net)
    assert part.K == 2 and sorted(part.sizes) == [5, 10]
    At = cs.shifted_adjacency(net)
    assert cs.is_equitable(At, part)
    Q = cs.quotient_matrix(At, part)
    assert Q.shape == (2, 2)


def test_decomposition_shapes(bench):
    net, dec = bench
    n = net.n_nodes
    assert dec.T.shape == (n, n)
    assert dec.Q.shape == (dec.partition.K, dec.partition.K)
    assert dec.fully_separated()
    assert len(dec.lambda_R[0]) == 9 and len(dec.lambda_R[1]) == 4
    assert math.isclose(dec.mu_min[1], 15.0, rel_tol=0, abs_tol=1e-9)
    assert cs.detect_intertwined(dec) == []


def test_complete_sync_indices():
    k4 = cs.make_network(4, [(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)])
    idx = cs.complete_sync_indices(k4)
    assert math.isclose(idx.alpha_b, 1.0, rel_tol=0, abs_tol=1e-12)
    disconnected = cs.make_network(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(ValueError):
        cs.complete_sync_indices(disconnected)


def test_profile_and_report(bench):
    net, dec = bench
    # Single-sigma grid keeps the smoke test fast; interval refinement is
    # exercised by the C++ suites.
    prof = cs.stability_profile(dec, sigma_lo=0.3, sigma_hi=0.3, sigma_step=1.0,
                                mle_horizon=200.0)
    assert [o.label for o in prof.owners] == ["cluster:0", "cluster:1"]
    assert len(prof.curve) == 1 and len(prof.curve[0].mle) == 2
    assert all(v < 0 for v in prof.curve[0].mle)  # sigma=0.3 is inside both windows
    report = cs.build_report(dec, prof, complete_sync=None, tol=1e-3)
    assert len(report.pairs) == 1
    assert report.pairs[0].type in (cs.PairType.Matryoshka, cs.PairType.Identical,
                                    cs.PairType.PartiallyDisjoint, cs.PairType.CompleteDisjoint)
    assert isinstance(report.eta_b.defined, bool)
    per = report.per_owner
    assert len(per) == 2 and per[0].eta_u_k > 0


def test_sync_errors(bench):
    net, dec = bench
    res = cs.sync_errors(net, dec, sigma=0.3, horizon=120.0, window_lo=100.0,
                         window_hi=120.0)
    assert len(res.E) == 2 and not res.diverged
    assert all(e < 1e-3 * s for e, s in zip(res.E, dec.partition.sizes))
