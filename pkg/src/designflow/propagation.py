"""Turning an edit plus a direction into an ordered regeneration schedule.

Forward plans walk the downstream closure in topological order with each
target seeing its direct upstream neighbors (already updated by earlier
steps); backward plans mirror that along reversed edges. Execution clears
each target's dirty mark as it lands, and a provider failure stops the run
with everything before the failed step still applied, so a rebuilt plan can
resume from the failure point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

from .artifacts import ArtifactContent, FieldDiff, check_kind, diff_content
from .errors import NoDirtyMarkError, ProviderError
from .graph import DirtyMark, MarkKind, NodeId

if TYPE_CHECKING:
    from .pipeline import GenerationPipeline
    from .workspace import Workspace


class Trigger(str, Enum):
    MANUAL_EDIT = "ManualEdit"
    AI_REVISE = "AiRevise"
    FEEDBACK_INCORPORATED = "FeedbackIncorporated"
    NEW_CONNECTION = "NewConnection"


class Direction(str, Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"
    SINGLE_STEP = "SingleStep"


_TRIGGER_EVENT = {
    Trigger.MANUAL_EDIT: "NodeEdited",
    Trigger.AI_REVISE: "AiRevised",
    Trigger.FEEDBACK_INCORPORATED: "FeedbackIncorporated",
    Trigger.NEW_CONNECTION: "Connected",
}


@dataclass
class ChangeSet:
    changed_node: NodeId
    diff: FieldDiff
    trigger: Trigger
    marks: dict[NodeId, DirtyMark] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "changedNode": self.changed_node,
            "diff": self.diff.to_dict(),
            "trigger": self.trigger.value,
            "marks": {nid: mark.to_dict() for nid, mark in self.marks.items()},
        }


@dataclass(frozen=True)
class PlanStep:
    target: NodeId
    context_nodes: tuple[NodeId, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"targetNode": self.target, "contextNodes": list(self.context_nodes)}


@dataclass
class PropagationPlan:
    direction: Direction
    origin: NodeId
    steps: list[PlanStep]

    def to_dict(self) -> dict[str, Any]:
        return {
            "direction": self.direction.value,
            "origin": self.origin,
            "steps": [s.to_dict() for s in self.steps],
        }


@dataclass
class PropagationResult:
    plan: PropagationPlan
    updated_nodes: list[tuple[NodeId, FieldDiff]] = field(default_factory=list)
    failed_node: NodeId | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed_node is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "direction": self.plan.direction.value,
            "origin": self.plan.origin,
            "updatedNodes": [{"node": nid, "diff": diff.to_dict()} for nid, diff in self.updated_nodes],
            "failedNode": self.failed_node,
            "error": self.error,
        }


class PropagationEngine:
    def __init__(self, workspace: "Workspace", pipeline: "GenerationPipeline"):
        self.workspace = workspace
        self.pipeline = pipeline

    @property
    def graph(self):
        return self.workspace.graph

    # -- updates -----------------------------------------------------------

    def apply_update(
        self, node_id: NodeId, new_content: ArtifactContent, trigger: Trigger
    ) -> ChangeSet:
        """Replace a node's content, mark its closures, log the edit.
        Identical content is a no-op: no marks, no event."""
        node = self.graph.node(node_id)
        check_kind(node.kind, new_content)
        diff = diff_content(node.content, new_content)
        if not diff:
            return ChangeSet(node_id, diff, trigger, {})
        node.content = new_content
        marks = self.graph.mark_dirty(node_id)
        self.workspace.log(
            _TRIGGER_EVENT[trigger],
            node=node_id,
            fields=diff.field_paths,
            marked=len(marks),
        )
        return ChangeSet(node_id, diff, trigger, marks)

    # -- planning ------------------------------------------------------------

    def build_plan(self, origin: NodeId, direction: Direction) -> PropagationPlan:
        self.graph.node(origin)
        if direction is Direction.FORWARD:
            targets = self.graph.downstream_closure(origin)
            context_of = self.graph.upstream_neighbors
        elif direction is Direction.BACKWARD:
            targets = self.graph.upstream_closure(origin)
            context_of = self.graph.downstream_neighbors
        else:
            raise ValueError("single-step plans are built by update_single")
        steps = [PlanStep(t, tuple(context_of(t))) for t in targets]
        return PropagationPlan(direction=direction, origin=origin, steps=steps)

    # -- execution -------------------------------------------------------------

    def execute_plan(self, plan: PropagationPlan) -> PropagationResult:
        result = PropagationResult(plan=plan)
        for step in plan.steps:
            target = self.graph.node(step.target)
            neighbors = [self.graph.node(c) for c in step.context_nodes]
            old_content = target.content
            try:
                new_content = self.pipeline.regenerate_node_content(target, "", neighbors)
            except ProviderError as exc:
                result.failed_node = step.target
                result.error = str(exc)
                break
            target.content = new_content
            self.graph.clear_mark(step.target)
            result.updated_nodes.append((step.target, diff_content(old_content, new_content)))
        if plan.steps:
            self._log_result(result)
        return result

    def _log_result(self, result: PropagationResult) -> None:
        event_type = {
            Direction.FORWARD: "ForwardPropagated",
            Direction.BACKWARD: "BackPropagated",
            Direction.SINGLE_STEP: "SingleUpdated",
        }[result.plan.direction]
        payload: dict[str, Any] = {
            "origin": result.plan.origin,
            "nodesUpdated": len(result.updated_nodes),
            "steps": [
                {"node": nid, "changedFields": diff.field_paths}
                for nid, diff in result.updated_nodes
            ],
        }
        if result.failed_node:
            payload["failedNode"] = result.failed_node
            payload["error"] = result.error
        self.workspace.log(event_type, **payload)

    def update_single(self, target_id: NodeId) -> PropagationResult:
        """Regenerate exactly one marked node; every other mark persists."""
        target = self.graph.node(target_id)
        if target.dirty is None:
            raise NoDirtyMarkError(f"node {target_id} carries no dirty mark", node_id=target_id)
        if target.dirty.kind is MarkKind.BACK_PROP:
            context = self.graph.downstream_neighbors(target_id)
        else:
            context = self.graph.upstream_neighbors(target_id)
        plan = PropagationPlan(
            direction=Direction.SINGLE_STEP,
            origin=target_id,
            steps=[PlanStep(target_id, tuple(context))],
        )
        return self.execute_plan(plan)
