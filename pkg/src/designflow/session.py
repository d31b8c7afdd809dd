"""Session facade: one workspace, one provider, one runtime, all operations.

The CLI and the HTTP service both drive workspaces exclusively through this
class, which wires the generation pipeline, propagation engine, and feedback
engine together and owns event logging for the simple graph operations.
"""

from __future__ import annotations

from typing import Any, Sequence

from .artifacts import ArtifactContent, ArtifactKind, content_from_dict, empty_content
from .errors import PreconditionError
from .feedback import FeedbackEngine
from .graph import ConnectResult, CreatedBy, Node, NodeId
from .pipeline import BrainstormResult, BrainstormSpec, GenerateNextResult, GenerationPipeline
from .propagation import Direction, PropagationEngine, PropagationPlan, PropagationResult, Trigger
from .providers import ModelProvider, make_provider
from .runtime import make_runtime
from .workspace import Workspace

_MORE_GAP = 340.0


class DesignSession:
    def __init__(
        self,
        workspace: Workspace,
        provider: ModelProvider | None = None,
        *,
        seed: int | None = None,
        session_id: str = "local",
    ):
        self.workspace = workspace
        deterministic = workspace.settings.provider_mode == "Mock"
        workspace.runtime = make_runtime(
            seed=seed,
            deterministic=deterministic,
            event_count=len(workspace.events),
            node_seq=workspace.graph.next_seq,
            session_id=session_id,
        )
        if provider is None:
            provider = make_provider(workspace.settings.provider_mode, seed=seed or 0)
        self.provider = provider
        self.pipeline = GenerationPipeline(workspace, provider)
        self.propagation = PropagationEngine(workspace, self.pipeline)
        self.feedback = FeedbackEngine(workspace, self.pipeline, self.propagation)

    @classmethod
    def create_workspace(
        cls,
        name: str,
        *,
        provider_mode: str = "Mock",
        provider: ModelProvider | None = None,
        seed: int | None = None,
        session_id: str = "local",
    ) -> "DesignSession":
        from .runtime import RandomIdGenerator, SeededIdGenerator
        from .workspace import Settings

        # Workspace ids draw from their own salt so they never collide with
        # (or shadow) the node id stream of the first session.
        if provider_mode == "Mock" or seed is not None:
            workspace_id = SeededIdGenerator(seed or 0, salt="workspace").new_id()
        else:
            workspace_id = RandomIdGenerator().new_id()
        workspace = Workspace(
            id=workspace_id,
            name=name,
            settings=Settings(provider_mode=provider_mode),
        )
        return cls(workspace, provider, seed=seed, session_id=session_id)

    @property
    def graph(self):
        return self.workspace.graph

    # -- basic graph operations -------------------------------------------

    def add_node(
        self,
        kind: ArtifactKind,
        content: ArtifactContent | dict[str, Any] | None = None,
        position: tuple[float, float] = (0.0, 0.0),
    ) -> Node:
        if content is None:
            content = empty_content(kind)
        elif isinstance(content, dict):
            content = content_from_dict(kind, content)
        node_id = self.workspace.new_node_id()
        node = self.graph.add_node(node_id, kind, content, position, CreatedBy.MANUAL)
        self.workspace.log("NodeCreated", node=node_id, kind=kind.value, createdBy="Manual")
        return node

    def edit_node(self, node_id: NodeId, content: ArtifactContent | dict[str, Any]):
        node = self.graph.node(node_id)
        if isinstance(content, dict):
            content = content_from_dict(node.kind, content)
        return self.propagation.apply_update(node_id, content, Trigger.MANUAL_EDIT)

    def connect(self, from_node: NodeId, to_node: NodeId) -> ConnectResult:
        result = self.graph.connect(from_node, to_node)
        self.workspace.log(
            "Connected",
            upstream=result.edge.upstream,
            downstream=result.edge.downstream,
            gesture=result.gesture_direction.value,
        )
        return result

    # -- generation features -------------------------------------------------

    def brainstorm(self, spec: BrainstormSpec) -> BrainstormResult:
        return self.pipeline.run_brainstorm(spec)

    def generate_more(
        self, node_ids: Sequence[NodeId], guidance: str | None = None, n: int | None = None
    ) -> list[Node]:
        """Generate variations of the selected nodes and place them on the
        canvas as fresh unconnected nodes."""
        selected = [self.graph.node(nid) for nid in node_ids]
        count = n or self.workspace.settings.default_variations
        contents = self.pipeline.generate_more(selected, guidance, count)
        base_x = max(node.position[0] for node in selected) + _MORE_GAP
        base_y = selected[0].position[1]
        created: list[Node] = []
        for i, content in enumerate(contents):
            node_id = self.workspace.new_node_id()
            node = self.graph.add_node(
                node_id, selected[0].kind, content,
                (base_x + i * _MORE_GAP, base_y), CreatedBy.GENERATED,
            )
            self.workspace.log(
                "NodeCreated", node=node_id, kind=node.kind.value, createdBy="Generated"
            )
            created.append(node)
        self.workspace.log(
            "GeneratedMore",
            sources=list(node_ids),
            nodes=[node.id for node in created],
            kind=selected[0].kind.value,
            guidance=guidance or "",
        )
        return created

    def generate_next(
        self, node_ids: Sequence[NodeId], guidance: str | None = None, n: int | None = None
    ) -> GenerateNextResult:
        selected = [self.graph.node(nid) for nid in node_ids]
        count = n or self.workspace.settings.default_variations
        return self.pipeline.generate_next_nodes(selected, guidance, count)

    def build_storyboard_from(
        self, node_id: NodeId, guidance: str | None = None, style: str | None = None
    ) -> Node:
        """Build a storyboard from a solution node plus its upstream lineage
        and wire the solution into it."""
        source = self.graph.node(node_id)
        if source.kind is not ArtifactKind.SOLUTION:
            raise PreconditionError("storyboards are built from a solution node")
        lineage = [self.graph.node(nid) for nid in self.graph.upstream_closure(node_id)]
        content = self.pipeline.build_storyboard_from_nodes([source, *lineage], guidance, style)
        sb_id = self.workspace.new_node_id()
        position = (source.position[0], source.position[1] + 280.0)
        node = self.graph.add_node(
            sb_id, ArtifactKind.STORYBOARD, content, position, CreatedBy.GENERATED
        )
        self.workspace.log("NodeCreated", node=sb_id, kind="Storyboard", createdBy="Generated")
        self.graph.connect(node_id, sb_id)
        self.graph.clear_mark(sb_id)
        self.workspace.log("StoryboardBuilt", node=sb_id, source=node_id, frames=len(content.frames))
        return node

    # -- propagation ------------------------------------------------------------

    def propagate(
        self, origin: NodeId, direction: Direction, *, dry_run: bool = False
    ) -> PropagationPlan | PropagationResult:
        if direction is Direction.SINGLE_STEP:
            if dry_run:
                raise PreconditionError("single-step updates have no dry-run plan")
            return self.propagation.update_single(origin)
        plan = self.propagation.build_plan(origin, direction)
        if dry_run:
            return plan
        return self.propagation.execute_plan(plan)
