"""Integer flows of words on X-digraphs.

The flow pi_w counts, for each positive edge, signed traversals by the
trace of w: +1 along the edge, -1 against it.  Values are indexed by the
edge ids of one specific graph; flows on different graphs never compare
equal directly (push them forward along a morphism instead).
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word
from .xdigraph import NotTraceable, XDigraph


@dataclass(frozen=True)
class Flow:
    graph: XDigraph
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.graph.edges):
            raise ValueError("flow length must match edge count")

    def __eq__(self, other):
        return (isinstance(other, Flow) and self.graph is other.graph
                and self.values == other.values)

    def balance(self) -> list[int]:
        """sigma(v) = outgoing minus incoming flow at each vertex."""
        sigma = [0] * self.graph.num_vertices
        for (o, t, _), f in zip(self.graph.edges, self.values):
            sigma[o] += f
            sigma[t] -= f
        return sigma


def flow_of(G: XDigraph, w: Word, start: int | None = None) -> Flow:
    """The flow of w on G; raises NotTraceable when w has no trace."""
    tr = G.trace(w, start)
    if tr is None:
        raise NotTraceable(f"{w!r} does not trace in {G!r}")
    _, steps = tr
    vals = [0] * len(G.edges)
    for eid, d in steps:
        vals[eid] += d
    return Flow(G, tuple(vals))


def is_circulation(f: Flow) -> bool:
    return all(s == 0 for s in f.balance())


def update_step(f: Flow, edge_id: int, direction: int) -> Flow:
    """One incremental letter step: add +-1 to a single component."""
    if direction not in (1, -1):
        raise ValueError("direction must be +-1")
    vals = list(f.values)
    vals[edge_id] += direction
    return Flow(f.graph, tuple(vals))


def graph_morphism(G: XDigraph, H: XDigraph) -> list[int]:
    """The unique rooted label-preserving morphism G -> H, as a vertex map.

    Raises ValueError if no morphism exists.  Uniqueness comes from H
    being folded and G connected.
    """
    phi = [-1] * G.num_vertices
    phi[G.root] = H.root
    queue = [G.root]
    while queue:
        u = queue.pop()
        for (v, s), (eid, d) in G._out.items():
            if v != u:
                continue
            o, t, _ = G.edges[eid]
            tgt = t if d > 0 else o
            hit = H.step(phi[u], s)
            if hit is None:
                raise ValueError("no label-preserving morphism exists")
            if phi[tgt] == -1:
                phi[tgt] = hit[0]
                queue.append(tgt)
            elif phi[tgt] != hit[0]:
                raise ValueError("no label-preserving morphism exists")
    return phi


def push_forward(f: Flow, H: XDigraph) -> Flow:
    """Sum f over the fibers of the morphism f.graph -> H.

    Realizes the flow identity pi(e) = sum over preimage edges; words with
    equal flows upstairs get equal flows downstairs.
    """
    G = f.graph
    phi = graph_morphism(G, H)
    vals = [0] * len(H.edges)
    for (o, t, c), fv in zip(G.edges, f.values):
        hit = H.step(phi[o], c)
        if hit is None or hit[0] != phi[t]:
            raise ValueError("morphism does not carry edge")
        _, eid, d = hit
        vals[eid] += d * fv
    return Flow(H, tuple(vals))
