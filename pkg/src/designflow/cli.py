"""Headless command-line interface over workspace files.

Every command loads the workspace file, applies one operation through a
DesignSession, saves the file back, and prints a JSON result to stdout.
With --mock (and optionally --seed N) runs are fully deterministic: the same
command on the same file produces byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .artifacts import ArtifactKind
from .errors import DesignFlowError, NotFoundError
from .pipeline import BrainstormSpec
from .propagation import Direction
from .providers import MockModelProvider, make_provider
from .session import DesignSession
from .workspace import Workspace, compute_metrics, load_workspace, save_workspace

_STAGES = {
    "persona": ArtifactKind.PERSONA,
    "problem": ArtifactKind.PROBLEM,
    "solution": ArtifactKind.SOLUTION,
    "storyboard": ArtifactKind.STORYBOARD,
}

_DIRECTIONS = {
    "fwd": Direction.FORWARD,
    "forward": Direction.FORWARD,
    "back": Direction.BACKWARD,
    "backward": Direction.BACKWARD,
    "single": Direction.SINGLE_STEP,
}


def _provider_for(args, workspace: Workspace | None):
    if args.mock:
        return MockModelProvider(seed=args.seed or 0)
    if args.real:
        return make_provider("Real")
    if workspace is not None:
        return make_provider(workspace.settings.provider_mode, seed=args.seed or 0)
    return None


def _open_session(args, *, create_name: str | None = None) -> DesignSession:
    path = Path(args.workspace)
    if path.exists():
        workspace = load_workspace(path.read_bytes())
        return DesignSession(
            workspace, provider=_provider_for(args, workspace), seed=args.seed, session_id="cli"
        )
    if create_name is None:
        raise NotFoundError(f"workspace file {path} does not exist")
    mode = "Real" if args.real else "Mock"
    return DesignSession.create_workspace(
        create_name,
        provider_mode=mode,
        provider=_provider_for(args, None),
        seed=args.seed,
        session_id="cli",
    )


def _save(args, session: DesignSession) -> None:
    Path(args.workspace).write_bytes(save_workspace(session.workspace))


def _emit(payload) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))


def _resolve(session: DesignSession, ref: str) -> str:
    """Accept a full node id or a unique prefix."""
    nodes = session.workspace.graph.nodes
    if ref in nodes:
        return ref
    matches = [nid for nid in nodes if nid.startswith(ref)]
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise NotFoundError(f"no node matches {ref!r}")
    raise NotFoundError(f"node reference {ref!r} is ambiguous ({len(matches)} matches)")


# -- commands -----------------------------------------------------------------


def cmd_init(args) -> None:
    path = Path(args.workspace)
    if path.exists():
        raise DesignFlowError(f"workspace file {path} already exists")
    session = _open_session(args, create_name=args.name or "Untitled workspace")
    _save(args, session)
    _emit({"workspace": session.workspace.id, "name": session.workspace.name})


def cmd_brainstorm(args) -> None:
    session = _open_session(args, create_name=args.name or args.context)
    guidance = {}
    for stage, value in (
        (ArtifactKind.PERSONA, args.guidance_persona),
        (ArtifactKind.PROBLEM, args.guidance_problem),
        (ArtifactKind.SOLUTION, args.guidance_solution),
        (ArtifactKind.STORYBOARD, args.guidance_storyboard),
    ):
        if value:
            guidance[stage] = value
    spec = BrainstormSpec(
        target_stage=_STAGES[args.to],
        design_context=args.context,
        stage_guidance=guidance,
        number_of_variations=args.n,
    )
    result = session.brainstorm(spec)
    _save(args, session)
    graph = session.workspace.graph
    by_kind: dict[str, list[str]] = {}
    for nid in result.nodes:
        by_kind.setdefault(graph.node(nid).kind.value.lower() + "s", []).append(nid)
    _emit({
        "workspace": session.workspace.id,
        "contextNode": result.context_node,
        **by_kind,
        "edges": len(result.edges),
    })


def cmd_add_node(args) -> None:
    session = _open_session(args, create_name=args.name or "Untitled workspace")
    content = json.loads(args.content) if args.content else None
    node = session.add_node(ArtifactKind(args.kind.capitalize()), content)
    _save(args, session)
    _emit(node.to_dict())


def cmd_edit(args) -> None:
    session = _open_session(args)
    node_id = _resolve(session, args.node)
    changeset = session.edit_node(node_id, json.loads(args.content))
    _save(args, session)
    _emit(changeset.to_dict())


def cmd_connect(args) -> None:
    session = _open_session(args)
    result = session.connect(_resolve(session, args.from_node), _resolve(session, args.to_node))
    _save(args, session)
    _emit({
        "edge": result.edge.to_dict(),
        "gestureDirection": result.gesture_direction.value,
        "suggestedMark": result.suggested_mark.to_dict() if result.suggested_mark else None,
    })


def cmd_propagate(args) -> None:
    session = _open_session(args)
    node_id = _resolve(session, args.node)
    result = session.propagate(node_id, _DIRECTIONS[args.direction], dry_run=args.dry_run)
    if not args.dry_run:
        _save(args, session)
    _emit(result.to_dict())


def cmd_generate_more(args) -> None:
    session = _open_session(args)
    node_ids = [_resolve(session, ref) for ref in args.node]
    nodes = session.generate_more(node_ids, args.guidance, args.n)
    _save(args, session)
    _emit({"nodes": [n.to_dict() for n in nodes]})


def cmd_generate_next(args) -> None:
    session = _open_session(args)
    node_ids = [_resolve(session, ref) for ref in args.node]
    result = session.generate_next(node_ids, args.guidance, args.n)
    _save(args, session)
    _emit({"nodes": result.nodes, "edges": [e.to_dict() for e in result.edges]})


def cmd_storyboard(args) -> None:
    session = _open_session(args)
    node = session.build_storyboard_from(
        _resolve(session, args.solution), args.guidance, args.style
    )
    _save(args, session)
    _emit(node.to_dict())


def cmd_feedback(args) -> None:
    session = _open_session(args)
    node_ids = [_resolve(session, ref) for ref in args.node]
    questions = session.feedback.generate_feedback(node_ids)
    _save(args, session)
    _emit({"questions": [q.to_dict() for q in questions]})


def cmd_incorporate(args) -> None:
    session = _open_session(args)
    changeset = session.feedback.incorporate_feedback(args.question, args.response)
    _save(args, session)
    _emit(changeset.to_dict())


def cmd_suggest(args) -> None:
    session = _open_session(args)
    suggestions = session.feedback.suggest_revisions(_resolve(session, args.node))
    _save(args, session)
    _emit({"suggestions": [s.to_dict() for s in suggestions]})


def cmd_revise(args) -> None:
    session = _open_session(args)
    changeset = session.feedback.revise_with_ai(_resolve(session, args.node), args.instruction)
    _save(args, session)
    _emit(changeset.to_dict())


def cmd_regenerate_images(args) -> None:
    session = _open_session(args)
    node_id = _resolve(session, args.node)
    session.pipeline.regenerate_images(node_id, args.style)
    _save(args, session)
    _emit(session.workspace.graph.node(node_id).to_dict())


def cmd_export(args) -> None:
    from .report import export_markdown

    session = _open_session(args)
    if args.format != "md":
        raise DesignFlowError(f"unsupported export format {args.format!r}")
    text = export_markdown(session.workspace)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit({"written": args.out})
    else:
        print(text)


def cmd_metrics(args) -> None:
    session = _open_session(args)
    report = compute_metrics(session.workspace)
    if args.report_dir:
        from .report import write_metrics_report

        written = write_metrics_report(report, args.report_dir)
        _emit({**report.to_dict(), "reportFiles": [str(p) for p in written]})
    else:
        _emit(report.to_dict())


def cmd_serve(args) -> None:
    from .api import ServiceConfig, serve

    config = ServiceConfig(
        storage_dir=Path(args.storage_dir),
        provider_mode="Real" if args.real else "Mock",
        seed=args.seed,
    )
    serve(config, host=args.host, port=args.port)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="designflow",
        description="Staged design-artifact workspace with AI generation and change propagation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workspace=True):
        if workspace:
            p.add_argument("--workspace", "-w", required=True, help="workspace JSON file")
        p.add_argument("--mock", action="store_true", help="use the deterministic mock provider")
        p.add_argument("--real", action="store_true", help="use the real providers from env")
        p.add_argument("--seed", type=int, default=None, help="seed for deterministic runs")

    p = sub.add_parser("init", help="create an empty workspace file")
    common(p)
    p.add_argument("--name", help="workspace name")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("brainstorm", help="generate chains of ideas up to a stage")
    common(p)
    p.add_argument("--context", required=True, help="design context text")
    p.add_argument("--to", choices=sorted(_STAGES), default="solution", help="generate up to this stage")
    p.add_argument("-n", type=int, default=3, help="number of parallel chains")
    p.add_argument("--name", help="workspace name (defaults to the context)")
    p.add_argument("--guidance-persona")
    p.add_argument("--guidance-problem")
    p.add_argument("--guidance-solution")
    p.add_argument("--guidance-storyboard")
    p.set_defaults(func=cmd_brainstorm)

    p = sub.add_parser("add-node", help="add an empty or prefilled node")
    common(p)
    p.add_argument("--kind", required=True, choices=["context", "persona", "problem", "solution", "storyboard"])
    p.add_argument("--content", help="content JSON (camelCase fields)")
    p.add_argument("--name", help="workspace name when creating a new file")
    p.set_defaults(func=cmd_add_node)

    p = sub.add_parser("edit", help="manually edit a node's content")
    common(p)
    p.add_argument("--node", required=True)
    p.add_argument("--content", required=True, help="new content JSON")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("connect", help="connect two nodes (either drag direction)")
    common(p)
    p.add_argument("--from", dest="from_node", required=True)
    p.add_argument("--to", dest="to_node", required=True)
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("propagate", help="propagate changes from a node")
    common(p)
    p.add_argument("--node", required=True, help="origin node (or marked node for single)")
    p.add_argument("--direction", choices=sorted(_DIRECTIONS), required=True)
    p.add_argument("--dry-run", action="store_true", help="print the plan without executing")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("generate-more", help="generate variations of selected nodes")
    common(p)
    p.add_argument("--node", action="append", required=True, help="selected node (repeatable)")
    p.add_argument("--guidance")
    p.add_argument("-n", type=int, default=None)
    p.set_defaults(func=cmd_generate_more)

    p = sub.add_parser("generate-next", help="generate next-stage nodes from a selection")
    common(p)
    p.add_argument("--node", action="append", required=True)
    p.add_argument("--guidance")
    p.add_argument("-n", type=int, default=None)
    p.set_defaults(func=cmd_generate_next)

    p = sub.add_parser("storyboard", help="build a storyboard from a solution node")
    common(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--guidance")
    p.add_argument("--style")
    p.set_defaults(func=cmd_storyboard)

    p = sub.add_parser("feedback", help="generate feedback questions for nodes")
    common(p)
    p.add_argument("--node", action="append", required=True)
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("incorporate", help="incorporate a feedback question with a response")
    common(p)
    p.add_argument("--question", required=True, help="feedback question id")
    p.add_argument("--response", required=True)
    p.set_defaults(func=cmd_incorporate)

    p = sub.add_parser("suggest", help="list revision instruction suggestions for a node")
    common(p)
    p.add_argument("--node", required=True)
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("revise", help="revise a node with an AI instruction")
    common(p)
    p.add_argument("--node", required=True)
    p.add_argument("--instruction", required=True)
    p.set_defaults(func=cmd_revise)

    p = sub.add_parser("regenerate-images", help="redraw storyboard images in a style")
    common(p)
    p.add_argument("--node", required=True)
    p.add_argument("--style", required=True)
    p.set_defaults(func=cmd_regenerate_images)

    p = sub.add_parser("export", help="export the workspace as markdown")
    common(p)
    p.add_argument("--format", default="md")
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("metrics", help="print the metrics report as JSON")
    common(p)
    p.add_argument("--report-dir", help="also write metrics.csv and figures here")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="run the HTTP API service")
    common(p, workspace=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--storage-dir", default="./workspaces")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except DesignFlowError as exc:
        body = {"error": {"code": exc.code, "message": exc.message}}
        if exc.node_id:
            body["error"]["nodeId"] = exc.node_id
        print(json.dumps(body, ensure_ascii=False), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
