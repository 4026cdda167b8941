from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from logging import NullHandler, getLogger
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from ppcount.dynatomic import cycle_bound_R
from ppcount.exceptions import PPCycleBoundExceeded, PPUnknownLabel
from ppcount.maps import GAMMA_MAP, LABELS, SIBLING_MAP

log = getLogger(__name__)
log.addHandler(NullHandler())


@dataclass(frozen=True)
class FunctionalGraph:
    """Finite graph where every vertex has exactly one out-edge."""

    n: int
    succ: Tuple[int, ...]
    payload: Optional[Tuple[Any, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "succ", tuple(self.succ))
        if len(self.succ) != self.n:
            raise ValueError(f"{len(self.succ)} out-edges for {self.n} vertices")
        if any(not 0 <= s < self.n for s in self.succ):
            raise ValueError("out-edge points outside the vertex set")
        if self.payload is not None and len(self.payload) != self.n:
            raise ValueError("payload length differs from vertex count")

    @classmethod
    def empty(cls) -> "FunctionalGraph":
        return cls(0, ())

    def preimages(self) -> List[List[int]]:
        pre = [[] for _ in range(self.n)]
        for v, s in enumerate(self.succ):
            pre[s].append(v)
        return pre

    def in_degrees(self) -> List[int]:
        degrees = [0] * self.n
        for s in self.succ:
            degrees[s] += 1
        return degrees

    def cycles(self) -> List[List[int]]:
        """Each cycle listed from its smallest vertex along the out-edges."""
        state = [0] * self.n
        found = []
        for start in range(self.n):
            path, v = [], start
            while state[v] == 0:
                state[v] = 1
                path.append(v)
                v = self.succ[v]
            if state[v] == 1:
                cycle = path[path.index(v) :]
                low = cycle.index(min(cycle))
                found.append(cycle[low:] + cycle[:low])
            for u in path:
                state[u] = 2
        return sorted(found)

    def cycle_counts(self) -> Counter:
        return Counter(len(c) for c in self.cycles())

    def relabel(self, perm: Sequence[int]) -> "FunctionalGraph":
        """Vertex v becomes perm[v]."""
        succ = [0] * self.n
        payload = [None] * self.n
        for v, s in enumerate(self.succ):
            succ[perm[v]] = perm[s]
            if self.payload is not None:
                payload[perm[v]] = self.payload[v]
        return FunctionalGraph(
            self.n, tuple(succ), tuple(payload) if self.payload is not None else None
        )

    def with_parents(self, targets: Iterable[int]) -> "FunctionalGraph":
        """Append one fresh in-degree-0 vertex mapping to each target."""
        targets = list(targets)
        payload = None
        if self.payload is not None:
            payload = self.payload + (None,) * len(targets)
        return FunctionalGraph(
            self.n + len(targets), self.succ + tuple(targets), payload
        )

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(enumerate(self.succ))
        return graph

    def to_json(self, label: Optional["PortraitLabel"] = None) -> Dict[str, Any]:
        vertices = [
            str(p) for p in (self.payload or [str(v) for v in range(self.n)])
        ]
        out = {
            "vertices": vertices,
            "edges": [[v, s] for v, s in enumerate(self.succ)],
            "code": canonical_code(self).hex(),
        }
        if label is not None:
            out["label"] = str(label)
        return out


@dataclass(frozen=True)
class CanonicalCode:
    code: bytes

    def hex(self) -> str:
        return self.code.hex()

    @classmethod
    def fromhex(cls, text: str) -> "CanonicalCode":
        return cls(bytes.fromhex(text))

    def __str__(self) -> str:
        return self.code.decode("ascii")


def canonical_code(g: FunctionalGraph) -> CanonicalCode:
    on_cycle = [False] * g.n
    cycles = g.cycles()
    for cycle in cycles:
        for v in cycle:
            on_cycle[v] = True
    children = [[u for u in pre if not on_cycle[u]] for pre in g.preimages()]

    memo: Dict[int, str] = {}

    def tree(v: int) -> str:
        # iterative post-order; tails can be long
        stack = [(v, False)]
        while stack:
            u, ready = stack.pop()
            if u in memo:
                continue
            if ready:
                memo[u] = "(" + "".join(sorted(memo[w] for w in children[u])) + ")"
            else:
                stack.append((u, True))
                stack.extend((w, False) for w in children[u] if w not in memo)
        return memo[v]

    cycle_codes = []
    for cycle in cycles:
        codes = [tree(v) for v in cycle]
        best = min(tuple(codes[i:] + codes[:i]) for i in range(len(codes)))
        cycle_codes.append("[" + "".join(best) + "]")
    return CanonicalCode("".join(sorted(cycle_codes)).encode("ascii"))


@dataclass
class AdmissibilityReport:
    ok: bool
    bad_in_degree: List[int]
    fixed_points: int
    cycle_counts: Dict[int, int]
    excess_cycles: Dict[int, int]

    def __bool__(self) -> bool:
        return self.ok


def is_strongly_admissible(g: FunctionalGraph) -> AdmissibilityReport:
    degrees = g.in_degrees()
    bad = [v for v, d in enumerate(degrees) if d not in (0, 2)]
    counts = dict(g.cycle_counts())
    fixed = counts.get(1, 0)
    excess = {
        length: count
        for length, count in counts.items()
        if length >= 2 and count > cycle_bound_R(length)
    }
    ok = not bad and not excess and fixed in (0, 2)
    return AdmissibilityReport(ok, bad, fixed, counts, excess)


def admissible_completion(g: FunctionalGraph) -> FunctionalGraph:
    counts = g.cycle_counts()
    if counts.get(1, 0) > 2:
        raise PPCycleBoundExceeded(f"{counts[1]} fixed points")
    for length, count in counts.items():
        if length >= 2 and count > cycle_bound_R(length):
            raise PPCycleBoundExceeded(f"{count} cycles of length {length}")
    if any(d > 2 for d in g.in_degrees()):
        raise PPCycleBoundExceeded("a vertex has more than two preimages")
    out = g
    if counts.get(1, 0) == 1:
        w = out.n
        payload = out.payload + (None,) if out.payload is not None else None
        out = FunctionalGraph(out.n + 1, out.succ + (w,), payload)
    targets = [v for v, d in enumerate(out.in_degrees()) if d == 1]
    return out.with_parents(targets)


@dataclass(frozen=True)
class PortraitLabel:
    name: str
    code: Optional[CanonicalCode] = None

    @classmethod
    def named(cls, name: str) -> "PortraitLabel":
        if name not in LABELS:
            raise PPUnknownLabel(name)
        return cls(name)

    @classmethod
    def other(cls, code: CanonicalCode) -> "PortraitLabel":
        return cls("Other", code)

    @property
    def is_other(self) -> bool:
        return self.name == "Other"

    @property
    def gamma(self) -> Optional[int]:
        return GAMMA_MAP.get(self.name)

    def __str__(self) -> str:
        if self.is_other:
            return f"Other:{self.code.hex()}"
        return self.name


class _Builder(object):
    """Assembles catalog graphs from cycles with one leaf per cycle vertex."""

    def __init__(self):
        self.succ: List[int] = []
        self.leaves: Dict[Tuple[int, int], int] = {}
        self.cycle_count = 0

    def _vertex(self, target: Optional[int] = None) -> int:
        v = len(self.succ)
        self.succ.append(v if target is None else target)
        return v

    def cycle(self, length: int) -> List[int]:
        start = len(self.succ)
        ids = list(range(start, start + length))
        for i in ids:
            self._vertex()
        for pos, v in enumerate(ids):
            self.succ[v] = ids[(pos + 1) % length]
        for pos, v in enumerate(ids):
            # the preimage of the successor that is not on the cycle
            self.leaves[(self.cycle_count, pos)] = self._vertex(self.succ[v])
        self.cycle_count += 1
        return ids

    def fixed_pair(self) -> None:
        self.cycle(1)
        self.cycle(1)

    def leaf(self, cycle: int, pos: int = 0) -> int:
        return self.leaves[(cycle, pos)]

    def parents(self, target: int) -> Tuple[int, int]:
        return self._vertex(target), self._vertex(target)

    def graph(self) -> FunctionalGraph:
        return FunctionalGraph(len(self.succ), tuple(self.succ))


def _shape(name: str) -> FunctionalGraph:
    b = _Builder()
    if name == "∅":
        return b.graph()
    if name in ("4(1,1)", "6(1,1)", "8(1,1)X", "8(1,1)Y"):
        b.fixed_pair()
        if name != "4(1,1)":
            p, _ = b.parents(b.leaf(0))
            if name == "8(1,1)X":
                b.parents(b.leaf(1))
            elif name == "8(1,1)Y":
                b.parents(p)
        return b.graph()
    if name in ("4(2)", "6(2)", "8(2)X", "8(2)Y"):
        b.cycle(2)
        if name != "4(2)":
            p, _ = b.parents(b.leaf(0, 0))
            if name == "8(2)X":
                b.parents(b.leaf(0, 1))
            elif name == "8(2)Y":
                b.parents(p)
        return b.graph()
    if name in ("8(2,1,1)", "10(2,1,1)X", "10(2,1,1)Y"):
        b.fixed_pair()
        b.cycle(2)
        if name == "10(2,1,1)X":
            b.parents(b.leaf(0))
        elif name == "10(2,1,1)Y":
            b.parents(b.leaf(2, 0))
        return b.graph()
    if name in ("6(3)", "8(3)", "10(3,1,1)", "10(3,2)"):
        b.cycle(3)
        if name == "8(3)":
            b.parents(b.leaf(0))
        elif name == "10(3,1,1)":
            b.fixed_pair()
        elif name == "10(3,2)":
            b.cycle(2)
        return b.graph()
    if name == "8(4)":
        b.cycle(4)
        return b.graph()
    raise PPUnknownLabel(name)


# a/b rows: both candidate shapes, extra preimages on both leaves (X) or stacked (Y)
# for (1,1) and (2); on a fixed-point leaf (X) or a 2-cycle leaf (Y) for (2,1,1)
AB_SHAPES = {
    "8(1,1)": ("8(1,1)X", "8(1,1)Y"),
    "8(2)": ("8(2)X", "8(2)Y"),
    "10(2,1,1)": ("10(2,1,1)X", "10(2,1,1)Y"),
}

DEFAULT_PINNING = {
    "8(1,1)a": "8(1,1)X",
    "8(1,1)b": "8(1,1)Y",
    "8(2)a": "8(2)X",
    "8(2)b": "8(2)Y",
    "10(2,1,1)a": "10(2,1,1)Y",
    "10(2,1,1)b": "10(2,1,1)X",
}


def ab_candidates(label: str) -> Tuple[FunctionalGraph, FunctionalGraph]:
    stem = label[:-1]
    return tuple(_shape(s) for s in AB_SHAPES[stem])


class Catalog(object):
    """Named portrait graphs keyed by canonical code."""

    def __init__(self, pinned: Optional[Dict[str, FunctionalGraph]] = None):
        self.graphs: Dict[str, FunctionalGraph] = {}
        for label in LABELS:
            if label in SIBLING_MAP:
                graph = (pinned or {}).get(label) or _shape(DEFAULT_PINNING[label])
            else:
                graph = _shape(label)
            self.graphs[label] = graph
        self.codes: Dict[CanonicalCode, str] = {}
        for label, graph in self.graphs.items():
            code = canonical_code(graph)
            if code in self.codes:
                raise ValueError(f"{label} and {self.codes[code]} share a code")
            self.codes[code] = label

    def lookup(self, code: CanonicalCode) -> PortraitLabel:
        name = self.codes.get(code)
        if name is None:
            return PortraitLabel.other(code)
        return PortraitLabel(name)

    def graph(self, label: str) -> FunctionalGraph:
        try:
            return self.graphs[label]
        except KeyError:
            raise PPUnknownLabel(label)

    def check(self) -> List[str]:
        """Problems with the catalog itself; empty when sound."""
        problems = []
        for label, graph in self.graphs.items():
            if not is_strongly_admissible(graph):
                problems.append(f"{label} is not strongly admissible")
            expected = 0 if label == "∅" else int(label.split("(")[0])
            if graph.n != expected:
                problems.append(f"{label} has {graph.n} vertices, expected {expected}")
        return problems


_catalog: Optional[Catalog] = None


def get_catalog() -> Catalog:
    """Catalog with a/b rows pinned from exemplar portraits (built once)."""
    global _catalog
    if _catalog is None:
        from ppcount.curves import exemplar_graphs

        _catalog = Catalog(pinned=exemplar_graphs())
        log.debug(f"catalog built with {len(_catalog.codes)} codes")
    return _catalog


def classify(g: FunctionalGraph, catalog: Optional[Catalog] = None) -> PortraitLabel:
    return (catalog or get_catalog()).lookup(canonical_code(g))


@lru_cache(maxsize=None)
def _contains(outer: str, inner: str) -> bool:
    catalog = get_catalog()
    big = catalog.graph(outer).to_networkx()
    small = catalog.graph(inner).to_networkx()
    return DiGraphMatcher(big, small).subgraph_is_monomorphic()


def catalog_contains(outer: PortraitLabel, inner: PortraitLabel) -> bool:
    if outer.is_other or inner.is_other:
        raise PPUnknownLabel("containment is only defined between named labels")
    return _contains(outer.name, inner.name)


def graph_contains(outer: FunctionalGraph, inner: FunctionalGraph) -> bool:
    """Embedding test for arbitrary functional graphs."""
    matcher = DiGraphMatcher(outer.to_networkx(), inner.to_networkx())
    return matcher.subgraph_is_monomorphic()
