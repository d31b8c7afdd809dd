"""Report rendering: markdown export, metrics CSV, and metrics figures.

The figure path uses the Agg backend so reports render headlessly; figures
land next to the delimited metrics output in the chosen report directory.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .artifacts import ArtifactKind, ContextContent, StoryboardContent
from .graph import Node
from .workspace import MetricsReport, Workspace

_SECTION_ORDER = (
    (ArtifactKind.CONTEXT, "Context"),
    (ArtifactKind.PERSONA, "Personas"),
    (ArtifactKind.PROBLEM, "Problems"),
    (ArtifactKind.SOLUTION, "Solutions"),
    (ArtifactKind.STORYBOARD, "Storyboards"),
)

_LABELS = {
    "location": "Location",
    "bio": "Bio",
    "needs": "Needs",
    "challenges": "Challenges",
    "description": "Description",
    "context": "Context",
    "stakeholders": "Stakeholders",
    "objectives": "Objectives",
    "problems_addressed": "Problems addressed",
    "key_features": "Key features",
    "benefits": "Benefits",
}


def export_markdown(workspace: Workspace) -> str:
    """Render the workspace as markdown: one section per kind, storyboards
    as caption + image-reference sequences."""
    lines: list[str] = [f"# {workspace.name}", ""]
    nodes = sorted(workspace.graph.nodes.values(), key=lambda n: n.seq)
    if not nodes:
        lines.append("_This workspace has no nodes yet._")
        lines.append("")
        return "\n".join(lines)

    for kind, heading in _SECTION_ORDER:
        selected = [n for n in nodes if n.kind is kind]
        if not selected:
            continue
        lines.append(f"## {heading}")
        lines.append("")
        for node in selected:
            lines.extend(_render_node(node))
    return "\n".join(lines)


def _render_node(node: Node) -> list[str]:
    content = node.content
    lines: list[str] = []
    if isinstance(content, ContextContent):
        lines.append(f"- {content.label}")
        lines.append("")
        return lines

    if isinstance(content, StoryboardContent):
        lines.append(f"### {content.title or '(untitled storyboard)'}")
        lines.append("")
        lines.append(f"Style: `{content.style}`")
        lines.append("")
        for i, frame in enumerate(content.frames, start=1):
            image = f" ({frame.image})" if frame.image else ""
            lines.append(f"{i}. **{frame.frame_type.value}** — {frame.caption}{image}")
        lines.append("")
        return lines

    title = getattr(content, "name", "") or getattr(content, "title", "") or "(untitled)"
    lines.append(f"### {title}")
    lines.append("")
    for attr, label in _LABELS.items():
        value = getattr(content, attr, "")
        if value:
            lines.append(f"- {label}: {value}")
    if getattr(content, "image", None):
        lines.append(f"- Image: {content.image}")
    lines.append("")
    return lines


def metrics_csv(report: MetricsReport) -> str:
    """Flat metric,value rows; nested maps become dotted metric names."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["metric", "value"])
    for kind in ("Persona", "Problem", "Solution", "Storyboard", "Context"):
        writer.writerow([f"nodeCounts.{kind}", report.node_counts.get(kind, 0)])
    writer.writerow(["individualNodeEdits", report.individual_node_edits])
    writer.writerow(["forwardPropEdits", report.forward_prop_edits])
    writer.writerow(["nodesUpdatedForward", report.nodes_updated_forward])
    writer.writerow(["backPropEdits", report.back_prop_edits])
    writer.writerow(["nodesUpdatedBackward", report.nodes_updated_backward])
    for feature in sorted(report.feature_usage):
        writer.writerow([f"featureUsage.{feature}", report.feature_usage[feature]])
    return buffer.getvalue()


def write_metrics_report(report: MetricsReport, out_dir: Path | str) -> list[Path]:
    """Write metrics.csv plus the node-count and feature-usage figures."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    csv_path = out / "metrics.csv"
    csv_path.write_text(metrics_csv(report), encoding="utf-8")
    written.append(csv_path)

    kinds = ["Persona", "Problem", "Solution", "Storyboard"]
    counts = [report.node_counts.get(k, 0) for k in kinds]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(kinds, counts, color="#4c72b0")
    ax.set_ylabel("nodes created")
    ax.set_title("Node counts by kind")
    fig.tight_layout()
    path = out / "node_counts.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.5 * max(1, len(report.feature_usage)))))
    if report.feature_usage:
        features = sorted(report.feature_usage, key=report.feature_usage.get)
        ax.barh(features, [report.feature_usage[f] for f in features], color="#55a868")
    else:
        ax.text(0.5, 0.5, "no feature usage recorded", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("Feature usage")
    fig.tight_layout()
    path = out / "feature_usage.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    edits = {
        "Individual edits": report.individual_node_edits,
        "Forward propagations": report.forward_prop_edits,
        "Backward propagations": report.back_prop_edits,
        "Nodes updated fwd": report.nodes_updated_forward,
        "Nodes updated back": report.nodes_updated_backward,
    }
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.barh(list(edits), list(edits.values()), color="#c44e52")
    ax.set_title("Iteration activity")
    fig.tight_layout()
    path = out / "iteration_activity.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    return written
