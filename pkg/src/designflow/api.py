"""HTTP+JSON service fronting workspaces: CRUD, generation features,
propagation with dry-run, feedback, metrics, and a long-poll event feed.

One writer per workspace: every mutating route takes that workspace's lock,
applies the change through a DesignSession, persists the file, then wakes
event-feed waiters. Error bodies are structured as {code, message, nodeId}.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .artifacts import ArtifactKind
from .errors import DesignFlowError, NotFoundError, PreconditionError
from .pipeline import BrainstormSpec
from .propagation import Direction
from .providers import ModelProvider
from .session import DesignSession
from .workspace import Workspace, compute_metrics, load_workspace, save_workspace

_STATUS_FOR_CODE = {
    "NotFound": 404,
    "EdgeExists": 409,
    "AlreadyIncorporated": 409,
    "NoDirtyMark": 409,
    "EdgeIllegal": 422,
    "KindMismatch": 422,
    "InvalidContent": 422,
    "Precondition": 422,
    "MissingBinding": 422,
    "UnknownTemplate": 422,
    "UnknownStyle": 422,
    "ProviderFailure": 502,
    "SchemaViolation": 502,
    "UnsupportedFormatVersion": 500,
    "ParseError": 500,
}


@dataclass
class ServiceConfig:
    storage_dir: Path
    provider_mode: str = "Mock"
    seed: int | None = None
    provider: ModelProvider | None = None

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        return cls(
            storage_dir=Path(os.environ.get("DESIGNFLOW_STORAGE_DIR", "./workspaces")),
            provider_mode=os.environ.get("PROVIDER_MODE", "Mock").capitalize(),
        )


@dataclass
class _Entry:
    workspace: Workspace
    lock: threading.Lock = field(default_factory=threading.Lock)
    events_changed: threading.Condition = field(default_factory=threading.Condition)


class WorkspaceStore:
    """One JSON file per workspace under the storage directory."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.config.storage_dir.mkdir(parents=True, exist_ok=True)
        self._entries: dict[str, _Entry] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.config.storage_dir.glob("*.json")):
            workspace = load_workspace(path.read_bytes())
            self._entries[workspace.id] = _Entry(workspace)

    def _path(self, workspace_id: str) -> Path:
        return self.config.storage_dir / f"{workspace_id}.json"

    def entry(self, workspace_id: str) -> _Entry:
        with self._registry_lock:
            try:
                return self._entries[workspace_id]
            except KeyError:
                raise NotFoundError(f"workspace {workspace_id} does not exist") from None

    def list_ids(self) -> list[dict[str, str]]:
        with self._registry_lock:
            return [
                {"id": e.workspace.id, "name": e.workspace.name}
                for e in self._entries.values()
            ]

    def create(self, name: str) -> Workspace:
        session = DesignSession.create_workspace(
            name,
            provider_mode=self.config.provider_mode,
            provider=self.config.provider,
            seed=self.config.seed,
            session_id="api",
        )
        workspace = session.workspace
        with self._registry_lock:
            self._entries[workspace.id] = _Entry(workspace)
        self._path(workspace.id).write_bytes(save_workspace(workspace))
        return workspace

    def delete(self, workspace_id: str) -> None:
        with self._registry_lock:
            if workspace_id not in self._entries:
                raise NotFoundError(f"workspace {workspace_id} does not exist")
            del self._entries[workspace_id]
        self._path(workspace_id).unlink(missing_ok=True)

    def session(self, workspace_id: str, session_id: str = "api") -> DesignSession:
        entry = self.entry(workspace_id)
        return DesignSession(
            entry.workspace,
            provider=self.config.provider,
            seed=self.config.seed,
            session_id=session_id,
        )

    def persist(self, workspace_id: str) -> None:
        entry = self.entry(workspace_id)
        self._path(workspace_id).write_bytes(save_workspace(entry.workspace))
        with entry.events_changed:
            entry.events_changed.notify_all()


class NodeBody(BaseModel):
    kind: str
    content: dict[str, Any] | None = None
    position: dict[str, float] | None = None


class ContentBody(BaseModel):
    content: dict[str, Any]


class ConnectBody(BaseModel):
    fromNode: str
    toNode: str


class BrainstormBody(BaseModel):
    designContext: str
    targetStage: str = "Solution"
    stageGuidance: dict[str, str] = {}
    numberOfVariations: int | None = None


class SelectionBody(BaseModel):
    nodes: list[str]
    guidance: str | None = None
    n: int | None = None


class ReviseBody(BaseModel):
    instruction: str


class PropagateBody(BaseModel):
    node: str
    direction: str  # forward | backward | single


class FeedbackGenerateBody(BaseModel):
    nodes: list[str] | None = None


class IncorporateBody(BaseModel):
    response: str


class StoryboardBody(BaseModel):
    solution: str
    guidance: str | None = None
    style: str | None = None


class StyleBody(BaseModel):
    style: str


_DIRECTIONS = {
    "forward": Direction.FORWARD,
    "fwd": Direction.FORWARD,
    "backward": Direction.BACKWARD,
    "back": Direction.BACKWARD,
    "single": Direction.SINGLE_STEP,
}


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    store = WorkspaceStore(config)
    app = FastAPI(title="designflow", version="0.1.0")
    app.state.store = store

    @app.exception_handler(DesignFlowError)
    async def handle_designflow_error(request: Request, exc: DesignFlowError):
        body = {"code": exc.code, "message": exc.message}
        if exc.node_id:
            body["nodeId"] = exc.node_id
        return JSONResponse(status_code=_STATUS_FOR_CODE.get(exc.code, 500), content=body)

    def _session(workspace_id: str, request: Request) -> DesignSession:
        return store.session(workspace_id, request.headers.get("x-session-id", "api"))

    def _workspace_payload(workspace: Workspace) -> dict[str, Any]:
        from .workspace import workspace_to_dict

        return workspace_to_dict(workspace)

    # -- workspaces ------------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok", "providerMode": config.provider_mode}

    @app.post("/workspaces", status_code=201)
    def create_workspace(body: dict[str, Any] | None = None):
        name = (body or {}).get("name", "Untitled workspace")
        workspace = store.create(name)
        return _workspace_payload(workspace)

    @app.get("/workspaces")
    def list_workspaces():
        return store.list_ids()

    @app.get("/workspaces/{workspace_id}")
    def get_workspace(workspace_id: str):
        return _workspace_payload(store.entry(workspace_id).workspace)

    @app.delete("/workspaces/{workspace_id}", status_code=204)
    def delete_workspace(workspace_id: str):
        store.delete(workspace_id)

    # -- nodes ------------------------------------------------------------

    @app.get("/workspaces/{workspace_id}/nodes")
    def list_nodes(workspace_id: str):
        workspace = store.entry(workspace_id).workspace
        return [n.to_dict() for n in sorted(workspace.graph.nodes.values(), key=lambda n: n.seq)]

    @app.post("/workspaces/{workspace_id}/nodes", status_code=201)
    def create_node(workspace_id: str, body: NodeBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            position = (body.position or {}).get("x", 0.0), (body.position or {}).get("y", 0.0)
            node = session.add_node(ArtifactKind(body.kind), body.content, position)
            store.persist(workspace_id)
            return node.to_dict()

    @app.get("/workspaces/{workspace_id}/nodes/{node_id}")
    def get_node(workspace_id: str, node_id: str):
        return store.entry(workspace_id).workspace.graph.node(node_id).to_dict()

    @app.put("/workspaces/{workspace_id}/nodes/{node_id}")
    def edit_node(workspace_id: str, node_id: str, body: ContentBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            changeset = session.edit_node(node_id, body.content)
            store.persist(workspace_id)
            return changeset.to_dict()

    @app.delete("/workspaces/{workspace_id}/nodes/{node_id}", status_code=204)
    def delete_node(workspace_id: str, node_id: str, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            entry.workspace.graph.remove_node(node_id)
            entry.workspace.feedback.pop(node_id, None)
            store.persist(workspace_id)

    # -- connections / propagation ------------------------------------------

    @app.post("/workspaces/{workspace_id}/connect")
    def connect(workspace_id: str, body: ConnectBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            result = session.connect(body.fromNode, body.toNode)
            store.persist(workspace_id)
            return {
                "edge": result.edge.to_dict(),
                "gestureDirection": result.gesture_direction.value,
                "suggestedMark": result.suggested_mark.to_dict() if result.suggested_mark else None,
            }

    @app.post("/workspaces/{workspace_id}/propagate")
    def propagate(
        workspace_id: str,
        body: PropagateBody,
        request: Request,
        dryRun: bool = Query(default=False),
    ):
        direction = _DIRECTIONS.get(body.direction.lower())
        if direction is None:
            raise PreconditionError(f"unknown direction {body.direction!r}")
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            result = session.propagate(body.node, direction, dry_run=dryRun)
            if not dryRun:
                store.persist(workspace_id)
            return result.to_dict()

    # -- generation features ---------------------------------------------------

    @app.post("/workspaces/{workspace_id}/brainstorm")
    def brainstorm(workspace_id: str, body: BrainstormBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            spec = BrainstormSpec(
                target_stage=ArtifactKind(body.targetStage),
                design_context=body.designContext,
                stage_guidance={
                    ArtifactKind(k): v for k, v in body.stageGuidance.items() if v
                },
                number_of_variations=body.numberOfVariations
                or entry.workspace.settings.default_variations,
            )
            result = session.brainstorm(spec)
            store.persist(workspace_id)
            return {
                "contextNode": result.context_node,
                "nodes": result.nodes,
                "edges": [e.to_dict() for e in result.edges],
                "storyboard": result.storyboard,
            }

    @app.post("/workspaces/{workspace_id}/generate-more")
    def generate_more(workspace_id: str, body: SelectionBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            nodes = session.generate_more(body.nodes, body.guidance, body.n)
            store.persist(workspace_id)
            return {"nodes": [n.to_dict() for n in nodes]}

    @app.post("/workspaces/{workspace_id}/generate-next")
    def generate_next(workspace_id: str, body: SelectionBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            result = session.generate_next(body.nodes, body.guidance, body.n)
            store.persist(workspace_id)
            return {
                "nodes": result.nodes,
                "edges": [e.to_dict() for e in result.edges],
            }

    @app.post("/workspaces/{workspace_id}/storyboards")
    def build_storyboard(workspace_id: str, body: StoryboardBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            node = session.build_storyboard_from(body.solution, body.guidance, body.style)
            store.persist(workspace_id)
            return node.to_dict()

    @app.post("/workspaces/{workspace_id}/nodes/{node_id}/regenerate-images")
    def regenerate_images(workspace_id: str, node_id: str, body: StyleBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            session.pipeline.regenerate_images(node_id, body.style)
            store.persist(workspace_id)
            return entry.workspace.graph.node(node_id).to_dict()

    @app.post("/workspaces/{workspace_id}/nodes/{node_id}/frames/{frame_index}/regenerate-image")
    def regenerate_frame_image(workspace_id: str, node_id: str, frame_index: int, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            session.pipeline.regenerate_frame_image(node_id, frame_index)
            store.persist(workspace_id)
            return entry.workspace.graph.node(node_id).to_dict()

    @app.post("/workspaces/{workspace_id}/nodes/{node_id}/illustrate")
    def illustrate(workspace_id: str, node_id: str, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            image = session.pipeline.generate_illustrative_image(entry.workspace.graph.node(node_id))
            store.persist(workspace_id)
            return {"node": node_id, "image": image}

    @app.get("/workspaces/{workspace_id}/nodes/{node_id}/validation")
    def validation(workspace_id: str, node_id: str):
        from .artifacts import validate_content

        node = store.entry(workspace_id).workspace.graph.node(node_id)
        return validate_content(node.kind, node.content).to_dict()

    @app.post("/workspaces/{workspace_id}/guidance-suggestions")
    def guidance_suggestions(
        workspace_id: str, body: SelectionBody, request: Request,
        differ: bool = Query(default=True),
    ):
        session = _session(workspace_id, request)
        selected = [session.workspace.graph.node(nid) for nid in body.nodes]
        return {"suggestions": session.pipeline.suggest_generation_guidance(selected, differ=differ)}

    # -- revision / feedback -----------------------------------------------------

    @app.post("/workspaces/{workspace_id}/nodes/{node_id}/revise")
    def revise(workspace_id: str, node_id: str, body: ReviseBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            changeset = session.feedback.revise_with_ai(node_id, body.instruction)
            store.persist(workspace_id)
            return changeset.to_dict()

    @app.get("/workspaces/{workspace_id}/nodes/{node_id}/suggestions")
    def suggestions(workspace_id: str, node_id: str, request: Request):
        session = _session(workspace_id, request)
        return {"suggestions": [s.to_dict() for s in session.feedback.suggest_revisions(node_id)]}

    @app.get("/workspaces/{workspace_id}/nodes/{node_id}/feedback")
    def list_feedback(workspace_id: str, node_id: str):
        workspace = store.entry(workspace_id).workspace
        workspace.graph.node(node_id)
        return {"questions": [q.to_dict() for q in workspace.questions_for(node_id)]}

    @app.post("/workspaces/{workspace_id}/nodes/{node_id}/feedback/generate")
    def generate_feedback(
        workspace_id: str, node_id: str, request: Request,
        body: FeedbackGenerateBody | None = None,
    ):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            targets = [node_id] + [n for n in ((body.nodes if body else None) or []) if n != node_id]
            questions = session.feedback.generate_feedback(targets)
            store.persist(workspace_id)
            return {"questions": [q.to_dict() for q in questions]}

    @app.post("/workspaces/{workspace_id}/feedback/{question_id}/incorporate")
    def incorporate(workspace_id: str, question_id: str, body: IncorporateBody, request: Request):
        entry = store.entry(workspace_id)
        with entry.lock:
            session = _session(workspace_id, request)
            changeset = session.feedback.incorporate_feedback(question_id, body.response)
            store.persist(workspace_id)
            return changeset.to_dict()

    # -- metrics / events -----------------------------------------------------------

    @app.get("/workspaces/{workspace_id}/metrics")
    def metrics(workspace_id: str):
        return compute_metrics(store.entry(workspace_id).workspace).to_dict()

    @app.get("/workspaces/{workspace_id}/events")
    def events(
        workspace_id: str,
        after: int = Query(default=0, ge=0),
        wait: float = Query(default=0.0, ge=0.0, le=30.0),
    ):
        """Events past the cursor; blocks up to ``wait`` seconds when empty
        so the UI can long-poll for dirty-mark changes."""
        entry = store.entry(workspace_id)
        deadline = time.monotonic() + wait
        while True:
            pending = entry.workspace.events[after:]
            if pending or time.monotonic() >= deadline:
                return {
                    "events": [e.to_dict() for e in pending],
                    "cursor": after + len(pending),
                }
            with entry.events_changed:
                entry.events_changed.wait(timeout=min(0.25, max(0.0, deadline - time.monotonic())))

    return app


def serve(config: ServiceConfig | None = None, host: str = "127.0.0.1", port: int = 8700):
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
