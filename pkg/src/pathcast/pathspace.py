"""Tuition path enumeration and the enrollment state graph.

A tuition path is the sequence of yearly enrollment selections a student
makes from registration until thesis eligibility.  The state graph turns the
set of all admissible paths into a Markov-ready structure:

* one ``start`` state (registered, nothing selected yet),
* one ``active`` state per distinct (modules selected so far, this year's
  selection) pair occurring in any path,
* one ``eligible`` absorbing state per completion set,
* one ``dropout`` absorbing sink.

Every active state carries a ``repeat`` self-edge (failing and re-attending
the same selection) and a ``dropout`` edge, alongside its ``advance`` edges.
The advance that leaves a path's final year carries an empty selection and
enters the eligible state for the completed set.

States are keyed by both the cumulative and the current selection because a
cumulative set alone cannot say which modules a repeat year re-attends (e.g.
{50,51} reached via {51} repeats one module, via {50,51} repeats two).  The
coarser cumulative-set view is recovered by :func:`aggregate_graph`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .curriculum import Curriculum, admissible_selections, completion_sets, validate_curriculum

START = "start"
ACTIVE = "active"
ELIGIBLE = "eligible"
DROPOUT = "dropout"

ADVANCE = "advance"
REPEAT = "repeat"
DROP = "dropout"

__all__ = [
    "START",
    "ACTIVE",
    "ELIGIBLE",
    "DROPOUT",
    "ADVANCE",
    "REPEAT",
    "DROP",
    "TuitionPath",
    "EnrollmentState",
    "Edge",
    "StateGraph",
    "AggregateGraph",
    "enumerate_paths",
    "build_state_graph",
    "aggregate_graph",
    "graph_to_json",
    "graph_to_dot",
    "aggregate_to_json",
    "aggregate_to_dot",
]

TuitionPath = tuple[frozenset[str], ...]


def _key(codes: frozenset[str]) -> tuple[str, ...]:
    return tuple(sorted(codes))


def _join(codes: frozenset[str]) -> str:
    return "+".join(sorted(codes))


@dataclass(frozen=True)
class EnrollmentState:
    """One node of the state graph; see module docstring for the four tags."""

    tag: str
    taken: frozenset[str]
    current: frozenset[str]

    @property
    def id(self) -> str:
        if self.tag == START:
            return "start"
        if self.tag == DROPOUT:
            return "dropout"
        if self.tag == ELIGIBLE:
            return f"eligible:{_join(self.taken)}"
        return f"{_join(self.taken)}|{_join(self.current)}"


@dataclass(frozen=True)
class Edge:
    """Directed transition; ``selection`` is empty for repeat and dropout
    edges and for the final advance into an eligible state."""

    src: int
    dst: int
    kind: str  # ADVANCE, REPEAT, or DROP
    selection: frozenset[str] = frozenset()


@dataclass(frozen=True)
class StateGraph:
    """Canonically ordered states and edges for one curriculum.

    State order: start, then active states sorted by (len(taken), taken,
    current), then eligible states sorted by taken, then dropout.  Edge
    order: by source, then advance (by selection) before repeat before
    dropout.  Both orders are stable across runs and platforms.
    """

    states: tuple[EnrollmentState, ...]
    edges: tuple[Edge, ...]

    def index_of(self, state_id: str) -> int:
        return self._by_id[state_id]

    @property
    def _by_id(self) -> dict[str, int]:
        cached = getattr(self, "_id_cache", None)
        if cached is None:
            cached = {s.id: i for i, s in enumerate(self.states)}
            object.__setattr__(self, "_id_cache", cached)
        return cached

    def out_edges(self, index: int) -> tuple[Edge, ...]:
        cached = getattr(self, "_out_cache", None)
        if cached is None:
            cached = {}
            for e in self.edges:
                cached.setdefault(e.src, []).append(e)
            cached = {k: tuple(v) for k, v in cached.items()}
            object.__setattr__(self, "_out_cache", cached)
        return cached.get(index, ())

    @property
    def start_index(self) -> int:
        return 0

    @property
    def dropout_index(self) -> int:
        return len(self.states) - 1

    @property
    def active_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.states) if s.tag == ACTIVE)

    @property
    def eligible_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.states) if s.tag == ELIGIBLE)

    @property
    def absorbing_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.states) if s.tag in (ELIGIBLE, DROPOUT))


def enumerate_paths(c: Curriculum) -> list[TuitionPath]:
    """All admissible tuition paths, in lexicographic order.

    A path is a sequence of disjoint yearly selections whose prefixes are
    each admissible at their year index and whose union is exactly one
    completion set.  A curriculum with no legal route yields an empty list.
    """
    validate_curriculum(c)
    targets = completion_sets(c)
    paths: list[TuitionPath] = []

    def grow(completed: frozenset[str], year: int, acc: tuple[frozenset[str], ...]):
        if completed in targets:
            paths.append(acc)
            return
        for selection in sorted(admissible_selections(completed, year, c), key=_key):
            grow(completed | selection, year + 1, acc + (selection,))

    grow(frozenset(), 1, ())
    return paths


def build_state_graph(c: Curriculum) -> StateGraph:
    """Construct the refined enrollment state graph from the path space."""
    validate_curriculum(c)
    paths = enumerate_paths(c)

    active: set[tuple[frozenset[str], frozenset[str]]] = set()
    advances: set[tuple[tuple[frozenset[str], frozenset[str]] | None,
                        tuple[frozenset[str], frozenset[str]],
                        frozenset[str]]] = set()
    for path in paths:
        taken = frozenset()
        previous: tuple[frozenset[str], frozenset[str]] | None = None  # None = start
        for selection in path:
            taken = taken | selection
            node = (taken, selection)
            active.add(node)
            advances.add((previous, node, selection))
            previous = node

    start = EnrollmentState(START, frozenset(), frozenset())
    dropout = EnrollmentState(DROPOUT, frozenset(), frozenset())
    actives = [
        EnrollmentState(ACTIVE, taken, current)
        for taken, current in sorted(active, key=lambda n: (len(n[0]), _key(n[0]), _key(n[1])))
    ]
    eligibles = [
        EnrollmentState(ELIGIBLE, s, frozenset())
        for s in sorted(completion_sets(c), key=_key)
    ]
    states = tuple([start] + actives + eligibles + [dropout])
    index = {(s.taken, s.current): i for i, s in enumerate(states) if s.tag == ACTIVE}
    eligible_index = {s.taken: i for i, s in enumerate(states) if s.tag == ELIGIBLE}
    dropout_index = len(states) - 1

    targets = completion_sets(c)
    edges: list[Edge] = []
    for src, dst, selection in advances:
        src_index = 0 if src is None else index[src]
        edges.append(Edge(src_index, index[dst], ADVANCE, selection))
    for (taken, current), i in index.items():
        if taken in targets:
            # passing the final year's selection grants thesis eligibility
            edges.append(Edge(i, eligible_index[taken], ADVANCE, frozenset()))
        edges.append(Edge(i, i, REPEAT))
        edges.append(Edge(i, dropout_index, DROP))

    kind_rank = {ADVANCE: 0, REPEAT: 1, DROP: 2}
    edges.sort(key=lambda e: (e.src, kind_rank[e.kind], _key(e.selection), e.dst))
    return StateGraph(states=states, edges=tuple(edges))


@dataclass(frozen=True)
class AggregateGraph:
    """Quotient of a state graph under (taken, current) -> taken.

    Nodes are cumulative selection sets (plus start and dropout); parallel
    edges are merged and their labels unioned.  This reproduces the coarse
    enrollment view where thesis-eligible sets appear as sinks.
    """

    nodes: tuple[str, ...]  # node ids
    taken: tuple[frozenset[str], ...]
    edges: tuple[tuple[int, int, tuple[str, ...]], ...]  # (src, dst, labels)
    member_map: tuple[int, ...]  # refined state index -> aggregate node index


def _aggregate_node_id(tag: str, taken: frozenset[str]) -> str:
    if tag == START:
        return "start"
    if tag == DROPOUT:
        return "dropout"
    return _join(taken)


def _edge_label(e: Edge) -> str:
    if e.kind == ADVANCE:
        return f"advance:{_join(e.selection)}" if e.selection else "advance"
    return e.kind


def aggregate_graph(g: StateGraph) -> AggregateGraph:
    """Merge refined states that share a cumulative selection set."""
    node_ids: list[str] = []
    node_taken: list[frozenset[str]] = []
    node_index: dict[str, int] = {}
    member_map: list[int] = []
    for s in g.states:
        node_id = _aggregate_node_id(s.tag, s.taken)
        if node_id not in node_index:
            node_index[node_id] = len(node_ids)
            node_ids.append(node_id)
            node_taken.append(s.taken)
        member_map.append(node_index[node_id])

    merged: dict[tuple[int, int], set[str]] = {}
    for e in g.edges:
        key = (member_map[e.src], member_map[e.dst])
        merged.setdefault(key, set()).add(_edge_label(e))
    edges = tuple(
        (src, dst, tuple(sorted(labels)))
        for (src, dst), labels in sorted(merged.items())
    )
    return AggregateGraph(
        nodes=tuple(node_ids),
        taken=tuple(node_taken),
        edges=edges,
        member_map=tuple(member_map),
    )


# -- exports -----------------------------------------------------------------


def graph_to_json(g: StateGraph, indent: int | None = 2) -> str:
    """Serialize a refined graph to the documented JSON schema."""
    doc = {
        "states": [
            {
                "id": s.id,
                "tag": s.tag,
                "taken": sorted(s.taken),
                "current": sorted(s.current),
            }
            for s in g.states
        ],
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "label": {"kind": e.kind, "selection": sorted(e.selection)},
            }
            for e in g.edges
        ],
    }
    return json.dumps(doc, indent=indent)


def aggregate_to_json(a: AggregateGraph, indent: int | None = 2) -> str:
    doc = {
        "states": [
            {"id": node, "taken": sorted(taken)}
            for node, taken in zip(a.nodes, a.taken)
        ],
        "edges": [
            {"from": src, "to": dst, "labels": list(labels)}
            for src, dst, labels in a.edges
        ],
    }
    return json.dumps(doc, indent=indent)


_DOT_SHAPES = {START: "circle", ACTIVE: "box", ELIGIBLE: "doublecircle", DROPOUT: "octagon"}


def graph_to_dot(g: StateGraph, name: str = "enrollment") -> str:
    """Graphviz rendering of the refined graph for visual inspection."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for i, s in enumerate(g.states):
        label = s.id if s.tag in (START, DROPOUT) else (
            _join(s.taken) if s.tag == ELIGIBLE else f"{_join(s.taken)}\\n[{_join(s.current)}]"
        )
        lines.append(f'  n{i} [shape={_DOT_SHAPES[s.tag]} label="{label}"];')
    for e in g.edges:
        style = ' style=dashed' if e.kind != ADVANCE else ""
        label = _edge_label(e)
        lines.append(f'  n{e.src} -> n{e.dst} [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def aggregate_to_dot(a: AggregateGraph, name: str = "enrollment_aggregate") -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for i, node in enumerate(a.nodes):
        shape = "circle" if node in ("start", "dropout") else "box"
        lines.append(f'  n{i} [shape={shape} label="{node}"];')
    for src, dst, labels in a.edges:
        label = "\\n".join(labels)
        lines.append(f'  n{src} -> n{dst} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
