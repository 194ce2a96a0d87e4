import math

import pytest

from chromopt import DomainError
from chromopt.coloring import count_colorings_bruteforce
from chromopt.extremal import class_sizes, enumerate_graphs, search_extremal, verify_conjecture_instance
from chromopt.graphs import are_isomorphic, canonical_form, turan

from oracles import atlas_class_counts


@pytest.mark.parametrize("n", range(1, 8))
def test_class_counts_match_graph_atlas(n):
    ref = atlas_class_counts(n)
    for m in range(n * (n - 1) // 2 + 1):
        graphs = list(enumerate_graphs(n, m))
        assert len(graphs) == ref.get(m, 0), (n, m)


@pytest.mark.parametrize("n,m", [(4, 3), (5, 5), (6, 7), (7, 10), (7, 15)])
def test_class_sizes_sum_to_labeled_count(n, m):
    assert sum(class_sizes(n, m)) == math.comb(n * (n - 1) // 2, m)


@pytest.mark.parametrize("n,m", [(5, 4), (6, 8)])
def test_representatives_are_pairwise_non_isomorphic(n, m):
    graphs = list(enumerate_graphs(n, m))
    codes = {canonical_form(g)[0] for g in graphs}
    assert len(codes) == len(graphs)
    assert all(g.m == m and g.n == n for g in graphs)


@pytest.mark.parametrize("n,m,q", [(4, 3, 3), (5, 5, 3), (5, 6, 4), (6, 6, 3)])
def test_search_is_sound_against_labeled_brute_force(n, m, q):
    # the labeled enumeration with brute-force counts is an independent route
    best = max(count_colorings_bruteforce(g, q) for g in enumerate_graphs(n, m, dedup=False))
    res = search_extremal(n, m, q)
    assert res.max_count == best
    assert res.verified_by_bruteforce
    labeled = search_extremal(n, m, q, dedup=False)
    assert labeled.max_count == best
    assert len(labeled.maximizers) == len(res.maximizers)


def test_turan_instance_reports_uniqueness():
    res = verify_conjecture_instance(5, 2, 3)
    assert res.turan_count == count_colorings_bruteforce(turan(2, 5), 3)
    assert res.turan_is_unique_max is (len(res.maximizers) == 1 and are_isomorphic(res.maximizers[0], turan(2, 5)))


def test_non_turan_edge_count_leaves_flag_unset():
    res = search_extremal(5, 5, 3)
    assert res.turan_is_unique_max is None


def test_budget_guards():
    with pytest.raises(DomainError):
        list(enumerate_graphs(9, 3))
    with pytest.raises(DomainError):
        list(enumerate_graphs(4, 7))
    with pytest.raises(DomainError):
        search_extremal(4, 4, 7)
