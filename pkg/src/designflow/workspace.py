"""The persisted unit: graph + feedback + descriptions + append-only events.

Workspaces serialize to canonical JSON (stable key order, UTF-8, two-space
indent) so saves are diff-friendly and byte-reproducible. Metrics are a pure
fold over the event list, which makes them replay-exact after any reload.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .artifacts import VisualCharacterDescription
from .errors import MigrationError, ParseError
from .feedback import FeedbackQuestion
from .graph import DesignGraph, NodeId
from .runtime import Runtime

FORMAT_VERSION = 1


class EventType(str, Enum):
    NODE_CREATED = "NodeCreated"
    NODE_EDITED = "NodeEdited"
    AI_REVISED = "AiRevised"
    FEEDBACK_GENERATED = "FeedbackGenerated"
    FEEDBACK_INCORPORATED = "FeedbackIncorporated"
    CONNECTED = "Connected"
    FORWARD_PROPAGATED = "ForwardPropagated"
    BACK_PROPAGATED = "BackPropagated"
    SINGLE_UPDATED = "SingleUpdated"
    BRAINSTORMED = "Brainstormed"
    GENERATED_MORE = "GeneratedMore"
    GENERATED_NEXT = "GeneratedNext"
    STORYBOARD_BUILT = "StoryboardBuilt"
    IMAGES_REGENERATED = "ImagesRegenerated"


@dataclass
class Event:
    timestamp: float
    actor: str
    type: EventType
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "actor": self.actor,
            "type": self.type.value,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Event":
        return cls(
            timestamp=data["timestamp"],
            actor=data["actor"],
            type=EventType(data["type"]),
            payload=data.get("payload", {}),
        )


@dataclass
class Settings:
    default_variations: int = 3
    style: str = "comic-book"
    provider_mode: str = "Mock"  # "Mock" | "Real"

    def to_dict(self) -> dict[str, Any]:
        return {
            "defaultVariations": self.default_variations,
            "style": self.style,
            "providerMode": self.provider_mode,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Settings":
        return cls(
            default_variations=data.get("defaultVariations", 3),
            style=data.get("style", "comic-book"),
            provider_mode=data.get("providerMode", "Mock"),
        )


@dataclass
class Workspace:
    id: str
    name: str
    graph: DesignGraph = field(default_factory=DesignGraph)
    feedback: dict[NodeId, list[FeedbackQuestion]] = field(default_factory=dict)
    descriptions: dict[str, VisualCharacterDescription] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    settings: Settings = field(default_factory=Settings)
    format_version: int = FORMAT_VERSION
    runtime: Runtime | None = field(default=None, compare=False, repr=False)

    # -- runtime-backed helpers -------------------------------------------

    def _require_runtime(self) -> Runtime:
        if self.runtime is None:
            raise RuntimeError("workspace has no runtime attached; open it through a session")
        return self.runtime

    def log(self, event_type: str | EventType, **payload: Any) -> Event:
        runtime = self._require_runtime()
        event = Event(
            timestamp=runtime.clock.now(),
            actor=runtime.session_id,
            type=EventType(event_type),
            payload=payload,
        )
        self.events.append(event)
        return event

    def new_node_id(self) -> NodeId:
        return self._require_runtime().new_id(taken=self.graph.nodes.keys())

    def new_question_id(self) -> str:
        taken = {q.id for questions in self.feedback.values() for q in questions}
        return self._require_runtime().new_id(taken=taken)

    def questions_for(self, node_id: NodeId) -> list[FeedbackQuestion]:
        out: list[FeedbackQuestion] = []
        for questions in self.feedback.values():
            out.extend(q for q in questions if node_id in q.targets)
        return out


def workspace_to_dict(workspace: Workspace) -> dict[str, Any]:
    return {
        "formatVersion": workspace.format_version,
        "id": workspace.id,
        "name": workspace.name,
        "settings": workspace.settings.to_dict(),
        "graph": workspace.graph.to_dict(),
        "feedback": {
            node_id: [q.to_dict() for q in questions]
            for node_id, questions in sorted(workspace.feedback.items())
            if questions
        },
        "descriptions": [
            workspace.descriptions[name].to_dict() for name in sorted(workspace.descriptions)
        ],
        "events": [e.to_dict() for e in workspace.events],
    }


def workspace_from_dict(data: dict[str, Any]) -> Workspace:
    version = data.get("formatVersion")
    if version != FORMAT_VERSION:
        raise MigrationError(
            f"workspace formatVersion {version!r} is not supported (expected {FORMAT_VERSION}); "
            "migrate the file before loading"
        )
    descriptions = [VisualCharacterDescription.from_dict(d) for d in data.get("descriptions", [])]
    return Workspace(
        id=data["id"],
        name=data["name"],
        graph=DesignGraph.from_dict(data["graph"]),
        feedback={
            node_id: [FeedbackQuestion.from_dict(q) for q in questions]
            for node_id, questions in data.get("feedback", {}).items()
        },
        descriptions={d.character_name: d for d in descriptions},
        events=[Event.from_dict(e) for e in data.get("events", [])],
        settings=Settings.from_dict(data.get("settings", {})),
        format_version=version,
    )


def save_workspace(workspace: Workspace) -> bytes:
    """Canonical JSON: sorted keys, UTF-8, trailing newline."""
    text = json.dumps(workspace_to_dict(workspace), ensure_ascii=False, indent=2, sort_keys=True)
    return (text + "\n").encode("utf-8")


def load_workspace(data: bytes | str) -> Workspace:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid workspace JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return workspace_from_dict(parsed)


# -- metrics ------------------------------------------------------------------


@dataclass
class MetricsReport:
    node_counts: dict[str, int]
    individual_node_edits: int
    forward_prop_edits: int
    nodes_updated_forward: int
    back_prop_edits: int
    nodes_updated_backward: int
    feature_usage: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodeCounts": self.node_counts,
            "individualNodeEdits": self.individual_node_edits,
            "forwardPropEdits": self.forward_prop_edits,
            "nodesUpdatedForward": self.nodes_updated_forward,
            "backPropEdits": self.back_prop_edits,
            "nodesUpdatedBackward": self.nodes_updated_backward,
            "featureUsage": self.feature_usage,
        }


_FEATURE_OF_EVENT = {
    EventType.BRAINSTORMED: "Start Brainstorming",
    EventType.GENERATED_MORE: "Generate More",
    EventType.GENERATED_NEXT: "Generate Next Node",
    EventType.AI_REVISED: "Revise with AI",
    EventType.FEEDBACK_GENERATED: "View Feedback",
    EventType.FEEDBACK_INCORPORATED: "Incorporate Feedback",
    EventType.CONNECTED: "Connect Nodes",
    EventType.STORYBOARD_BUILT: "Build Storyboard",
    EventType.IMAGES_REGENERATED: "Regenerate Images",
    EventType.FORWARD_PROPAGATED: "Forward Propagate",
    EventType.BACK_PROPAGATED: "Back Propagate",
    EventType.SINGLE_UPDATED: "Update Single Node",
    EventType.NODE_EDITED: "Edit Manually",
}


def compute_metrics(workspace: Workspace) -> MetricsReport:
    """Deterministic fold over the event log; nothing else is consulted."""
    node_counts: dict[str, int] = {}
    feature_usage: dict[str, int] = {}
    individual = forward = backward = 0
    nodes_fwd = nodes_back = 0

    for event in workspace.events:
        feature = _FEATURE_OF_EVENT.get(event.type)
        if feature:
            feature_usage[feature] = feature_usage.get(feature, 0) + 1
        if event.type is EventType.NODE_CREATED:
            kind = event.payload.get("kind", "Unknown")
            node_counts[kind] = node_counts.get(kind, 0) + 1
            if event.payload.get("createdBy") == "Manual":
                feature_usage["Add Empty Node"] = feature_usage.get("Add Empty Node", 0) + 1
        elif event.type is EventType.NODE_EDITED:
            individual += 1
        elif event.type is EventType.SINGLE_UPDATED:
            individual += 1
        elif event.type is EventType.FORWARD_PROPAGATED:
            forward += 1
            nodes_fwd += int(event.payload.get("nodesUpdated", 0))
        elif event.type is EventType.BACK_PROPAGATED:
            backward += 1
            nodes_back += int(event.payload.get("nodesUpdated", 0))

    return MetricsReport(
        node_counts=node_counts,
        individual_node_edits=individual,
        forward_prop_edits=forward,
        nodes_updated_forward=nodes_fwd,
        back_prop_edits=backward,
        nodes_updated_backward=nodes_back,
        feature_usage=feature_usage,
    )
