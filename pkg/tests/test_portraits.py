import random

import networkx as nx
import pytest

from ppcount.exceptions import PPCycleBoundExceeded, PPUnknownLabel
from ppcount.maps import LABELS
from ppcount.portraits import (
    FunctionalGraph,
    PortraitLabel,
    admissible_completion,
    canonical_code,
    catalog_contains,
    classify,
    graph_contains,
    is_strongly_admissible,
)

from .fixtures import pp

FIXED = FunctionalGraph(1, (0,))
C4 = FunctionalGraph(4, (1, 2, 3, 0))


def test_code_of_fixed_point():
    assert canonical_code(FIXED) == canonical_code(FIXED.relabel([0]))


def random_graph(rng: random.Random, n: int) -> FunctionalGraph:
    return FunctionalGraph(n, tuple(rng.randrange(n) for _ in range(n)))


def as_digraph(graph: FunctionalGraph) -> nx.DiGraph:
    out = nx.DiGraph()
    out.add_nodes_from(range(graph.n))
    out.add_edges_from(enumerate(graph.succ))
    return out


def test_code_invariant_under_relabeling():
    rng = random.Random(7)
    graphs = [random_graph(rng, n) for n in (1, 2, 5, 8, 13, 21, 34, 50)]
    for _ in range(1000):
        graph = rng.choice(graphs)
        perm = list(range(graph.n))
        rng.shuffle(perm)
        assert canonical_code(graph.relabel(perm)) == canonical_code(graph)


def test_code_equality_is_isomorphism():
    rng = random.Random(13)
    for _ in range(300):
        n = rng.randint(1, 6)
        a, b = random_graph(rng, n), random_graph(rng, n)
        same = nx.is_isomorphic(as_digraph(a), as_digraph(b))
        assert (canonical_code(a) == canonical_code(b)) == same


def test_code_separates_leaf_placement():
    spread = FunctionalGraph(4, (1, 0, 0, 1))
    stacked = FunctionalGraph(4, (1, 0, 0, 0))
    assert canonical_code(spread) != canonical_code(stacked)


def test_admissibility():
    assert not is_strongly_admissible(C4)
    assert is_strongly_admissible(C4.with_parents(range(4)))
    assert is_strongly_admissible(FunctionalGraph.empty())
    report = is_strongly_admissible(C4)
    assert report.bad_in_degree == [0, 1, 2, 3]


def test_completion():
    completed = admissible_completion(C4)
    assert completed.n == 8
    assert str(classify(completed)) == "8(4)"
    graph = pp.catalog.graph("8(2,1,1)")
    assert canonical_code(admissible_completion(graph)) == canonical_code(graph)
    assert str(classify(admissible_completion(FIXED))) == "4(1,1)"


def test_completion_refuses_excess_cycles():
    three_fixed = FunctionalGraph(3, (0, 1, 2))
    with pytest.raises(PPCycleBoundExceeded):
        admissible_completion(three_fixed)


def test_classify():
    assert str(classify(FunctionalGraph.empty())) == "∅"
    four_two = FunctionalGraph(4, (1, 0, 0, 1))
    assert str(classify(four_two)) == "4(2)"
    label = classify(FunctionalGraph(3, (0, 1, 1)))
    assert label.is_other
    assert str(label).startswith("Other:")


def test_catalog_is_sound():
    assert pp.catalog.check() == []
    assert sorted(pp.catalog.graphs) == sorted(LABELS)


def test_containment():
    big, small = PortraitLabel.named("8(2,1,1)"), PortraitLabel.named("4(2)")
    assert catalog_contains(big, small)
    assert not catalog_contains(PortraitLabel.named("4(1,1)"), small)
    assert catalog_contains(big, big)
    assert graph_contains(C4.with_parents(range(4)), C4)
    with pytest.raises(PPUnknownLabel):
        PortraitLabel.named("12(2,2)")
