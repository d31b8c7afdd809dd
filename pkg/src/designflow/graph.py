"""Stage-ordered dependency graph: nodes, canonical edges, dirty marks, closures.

Edges always point from the earlier design stage to the later one, no matter
which way the user dragged, so the graph is acyclic by construction. Closure
orderings are deterministic: stage order first, node creation order second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from .artifacts import (
    ArtifactContent,
    ArtifactKind,
    check_kind,
    check_structure,
    content_from_dict,
    content_to_dict,
)
from .errors import EdgeExistsError, EdgeIllegalError, NotFoundError

NodeId = str


class CreatedBy(str, Enum):
    MANUAL = "Manual"
    GENERATED = "Generated"


class GestureDirection(str, Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"


class MarkKind(str, Enum):
    UPDATE = "Update"
    FORWARD_PROP = "ForwardProp"
    BACK_PROP = "BackProp"


@dataclass(frozen=True)
class DirtyMark:
    kind: MarkKind
    cause: NodeId

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind.value, "cause": self.cause}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "DirtyMark":
        return cls(MarkKind(data["kind"]), data["cause"])


@dataclass(frozen=True)
class Edge:
    upstream: NodeId
    downstream: NodeId

    def to_dict(self) -> dict[str, str]:
        return {"upstream": self.upstream, "downstream": self.downstream}


@dataclass
class Node:
    id: NodeId
    kind: ArtifactKind
    content: ArtifactContent
    seq: int
    position: tuple[float, float] = (0.0, 0.0)
    created_by: CreatedBy = CreatedBy.MANUAL
    dirty: DirtyMark | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "content": content_to_dict(self.content),
            "seq": self.seq,
            "position": {"x": self.position[0], "y": self.position[1]},
            "createdBy": self.created_by.value,
            "dirty": self.dirty.to_dict() if self.dirty else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Node":
        kind = ArtifactKind(data["kind"])
        return cls(
            id=data["id"],
            kind=kind,
            content=content_from_dict(kind, data["content"]),
            seq=data["seq"],
            position=(data["position"]["x"], data["position"]["y"]),
            created_by=CreatedBy(data["createdBy"]),
            dirty=DirtyMark.from_dict(data["dirty"]) if data.get("dirty") else None,
        )


@dataclass(frozen=True)
class ConnectResult:
    edge: Edge
    gesture_direction: GestureDirection
    suggested_mark: DirtyMark | None


# Adjacent-stage pairs plus direct feeds into the storyboard sink.
_LEGAL_PAIRS = {
    (ArtifactKind.PERSONA, ArtifactKind.PROBLEM),
    (ArtifactKind.PROBLEM, ArtifactKind.SOLUTION),
    (ArtifactKind.SOLUTION, ArtifactKind.STORYBOARD),
    (ArtifactKind.PERSONA, ArtifactKind.STORYBOARD),
    (ArtifactKind.PROBLEM, ArtifactKind.STORYBOARD),
}


@dataclass
class DesignGraph:
    nodes: dict[NodeId, Node] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    next_seq: int = 0

    # -- node/edge bookkeeping ------------------------------------------

    def node(self, node_id: NodeId) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NotFoundError(f"node {node_id} does not exist", node_id=node_id) from None

    def add_node(
        self,
        node_id: NodeId,
        kind: ArtifactKind,
        content: ArtifactContent,
        position: tuple[float, float] = (0.0, 0.0),
        created_by: CreatedBy = CreatedBy.MANUAL,
    ) -> Node:
        check_kind(kind, content)
        check_structure(content)
        if node_id in self.nodes:
            raise EdgeExistsError(f"node id {node_id} already exists", node_id=node_id)
        node = Node(id=node_id, kind=kind, content=content, seq=self.next_seq,
                    position=position, created_by=created_by)
        self.next_seq += 1
        self.nodes[node_id] = node
        return node

    def remove_node(self, node_id: NodeId) -> None:
        self.node(node_id)
        del self.nodes[node_id]
        self.edges = [e for e in self.edges if node_id not in (e.upstream, e.downstream)]

    def connect(self, from_node: NodeId, to_node: NodeId) -> ConnectResult:
        """Store the canonical edge for a drag gesture and suggest a mark on
        the gesture's target so the one-click propagate flow can follow."""
        a, b = self.node(from_node), self.node(to_node)
        if from_node == to_node:
            raise EdgeIllegalError("a node cannot connect to itself", node_id=from_node)
        if (a.kind, b.kind) in _LEGAL_PAIRS:
            edge = Edge(from_node, to_node)
            gesture = GestureDirection.FORWARD
        elif (b.kind, a.kind) in _LEGAL_PAIRS:
            edge = Edge(to_node, from_node)
            gesture = GestureDirection.BACKWARD
        else:
            raise EdgeIllegalError(
                f"no legal edge between {a.kind.value} and {b.kind.value}", node_id=to_node
            )
        if edge in self.edges:
            raise EdgeExistsError(
                f"edge {edge.upstream} -> {edge.downstream} already exists", node_id=to_node
            )
        self.edges.append(edge)
        mark_kind = MarkKind.FORWARD_PROP if gesture is GestureDirection.FORWARD else MarkKind.BACK_PROP
        mark = DirtyMark(mark_kind, cause=from_node)
        b.dirty = mark
        return ConnectResult(edge=edge, gesture_direction=gesture, suggested_mark=mark)

    # -- traversal -------------------------------------------------------

    def upstream_neighbors(self, node_id: NodeId) -> list[NodeId]:
        self.node(node_id)
        found = [e.upstream for e in self.edges if e.downstream == node_id]
        return self._ordered(found, descending=False)

    def downstream_neighbors(self, node_id: NodeId) -> list[NodeId]:
        self.node(node_id)
        found = [e.downstream for e in self.edges if e.upstream == node_id]
        return self._ordered(found, descending=False)

    def _ordered(self, ids: Iterable[NodeId], *, descending: bool) -> list[NodeId]:
        def key(nid: NodeId) -> tuple[int, int]:
            node = self.nodes[nid]
            stage = node.kind.stage or 0
            return (-stage if descending else stage, node.seq)

        return sorted(set(ids), key=key)

    def downstream_closure(self, node_id: NodeId) -> list[NodeId]:
        """Every node reachable along canonical edges, stage-ascending,
        creation-order tie-broken; excludes the start node."""
        return self._closure(node_id, forward=True)

    def upstream_closure(self, node_id: NodeId) -> list[NodeId]:
        """Mirror of downstream_closure along reversed edges, stage-descending."""
        return self._closure(node_id, forward=False)

    def _closure(self, node_id: NodeId, *, forward: bool) -> list[NodeId]:
        self.node(node_id)
        succ: dict[NodeId, list[NodeId]] = {}
        for e in self.edges:
            src, dst = (e.upstream, e.downstream) if forward else (e.downstream, e.upstream)
            succ.setdefault(src, []).append(dst)
        seen: set[NodeId] = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for nxt in succ.get(current, ()):
                if nxt not in seen and nxt != node_id:
                    seen.add(nxt)
                    frontier.append(nxt)
        return self._ordered(seen, descending=not forward)

    # -- dirty marks -----------------------------------------------------

    def mark_dirty(self, cause: NodeId) -> dict[NodeId, DirtyMark]:
        """Mark the full closure of a just-updated node; newer marks replace
        older ones, and the cause itself is never marked."""
        self.node(cause)
        marks: dict[NodeId, DirtyMark] = {}
        for nid in self.downstream_closure(cause):
            marks[nid] = DirtyMark(MarkKind.FORWARD_PROP, cause)
        for nid in self.upstream_closure(cause):
            marks[nid] = DirtyMark(MarkKind.BACK_PROP, cause)
        for nid, mark in marks.items():
            self.nodes[nid].dirty = mark
        return marks

    def clear_mark(self, node_id: NodeId) -> None:
        self.node(node_id).dirty = None

    def update_eligible(self, node_id: NodeId) -> bool:
        """Direct neighbors of a mark's cause get the one-step update action."""
        node = self.node(node_id)
        if node.dirty is None:
            return False
        cause = node.dirty.cause
        return node_id in self.downstream_neighbors(cause) or node_id in self.upstream_neighbors(cause)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        ordered = sorted(self.nodes.values(), key=lambda n: n.seq)
        return {
            "nodes": [n.to_dict() for n in ordered],
            "edges": [e.to_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DesignGraph":
        graph = cls()
        for node_data in data["nodes"]:
            node = Node.from_dict(node_data)
            graph.nodes[node.id] = node
        graph.edges = [Edge(e["upstream"], e["downstream"]) for e in data["edges"]]
        graph.next_seq = max((n.seq for n in graph.nodes.values()), default=-1) + 1
        return graph
