/** Canvas controller: holds the latest server snapshot, renders the board
 * from it, and funnels every gesture through the API followed by a re-fetch.
 * The client never mutates its own copy of the graph; what you see is always
 * a render of the last snapshot the server confirmed. */

import { ApiClient, PropagateDirection } from "./api.js";
import { CardActions, renderNodeCard } from "./cards.js";
import { ViewState } from "./state.js";
import type { DirtyMark, NodeDoc, WorkspaceDoc } from "./types.js";
import { VNode, h } from "./vdom.js";

export interface CanvasDelegate {
  /** Hook for panels (feedback, revise, manual edit) to open on toolbar use. */
  openPanel?(panel: "Feedback" | "Revise" | "ManualEdit" | "StoryboardEditor", nodeId: string): void;
}

export class CanvasController {
  snapshot: WorkspaceDoc | null = null;
  readonly view = new ViewState();
  private eventCursor = 0;
  private feedRunning = false;

  constructor(
    readonly api: ApiClient,
    readonly workspaceId: string,
    private readonly delegate: CanvasDelegate = {},
  ) {}

  // -- state -------------------------------------------------------------

  async refresh(): Promise<WorkspaceDoc> {
    this.snapshot = await this.api.getWorkspace(this.workspaceId);
    return this.snapshot;
  }

  nodes(): NodeDoc[] {
    return [...(this.snapshot?.graph.nodes ?? [])].sort((a, b) => a.seq - b.seq);
  }

  node(nodeId: string): NodeDoc {
    const found = this.snapshot?.graph.nodes.find((n) => n.id === nodeId);
    if (!found) throw new Error(`node ${nodeId} not in snapshot`);
    return found;
  }

  /** Dirty marks exactly as the latest snapshot reports them. */
  dirtyMarks(): Record<string, DirtyMark> {
    const marks: Record<string, DirtyMark> = {};
    for (const node of this.snapshot?.graph.nodes ?? []) {
      if (node.dirty) marks[node.id] = node.dirty;
    }
    return marks;
  }

  // -- gestures (every one: API call, then re-fetch) ------------------------

  async connectGesture(fromNode: string, toNode: string) {
    const result = await this.api.connect(this.workspaceId, fromNode, toNode);
    await this.refresh();
    return result;
  }

  async propagate(origin: string, direction: PropagateDirection) {
    const result = await this.api.propagate(this.workspaceId, origin, direction);
    await this.refresh();
    return result;
  }

  async incorporateFeedback(questionId: string, response: string) {
    const changeset = await this.api.incorporateFeedback(this.workspaceId, questionId, response);
    await this.refresh();
    return changeset;
  }

  async generateNextFromSelection(n?: number, guidance?: string) {
    const selected = [...this.view.selection];
    const result = await this.api.generateNext(this.workspaceId, selected, guidance, n);
    await this.refresh();
    return result;
  }

  async generateMoreFromSelection(n?: number, guidance?: string) {
    const selected = [...this.view.selection];
    const result = await this.api.generateMore(this.workspaceId, selected, guidance, n);
    await this.refresh();
    return result;
  }

  async duplicateNode(nodeId: string) {
    const source = this.node(nodeId);
    const created = await this.api.createNode(this.workspaceId, source.kind, source.content, {
      x: source.position.x + 40,
      y: source.position.y + 40,
    });
    await this.refresh();
    return created;
  }

  // -- rendering ----------------------------------------------------------

  private cardActions(): CardActions {
    return {
      viewFeedback: (id) => this.delegate.openPanel?.("Feedback", id),
      reviseWithAi: (id) => this.delegate.openPanel?.("Revise", id),
      editManually: (id) => this.delegate.openPanel?.("ManualEdit", id),
      generateNext: (id) => void this.api.generateNext(this.workspaceId, [id]).then(() => this.refresh()),
      generateMore: (id) => void this.api.generateMore(this.workspaceId, [id]).then(() => this.refresh()),
      duplicate: (id) => void this.duplicateNode(id),
      propagate: (origin, direction) => void this.propagate(origin, direction),
      select: (id, additive) => {
        if (additive) this.view.toggle(id);
        else this.view.select(id);
      },
    };
  }

  renderBoard(): VNode {
    const actions = this.cardActions();
    const edges = this.snapshot?.graph.edges ?? [];
    return h(
      "div",
      { class: "canvas", "data-zoom": this.view.zoomLevel.toFixed(2) },
      h(
        "div",
        { class: "edges" },
        ...edges.map((e) =>
          h("div", {
            class: "edge",
            "data-upstream": e.upstream,
            "data-downstream": e.downstream,
          }),
        ),
      ),
      h("div", { class: "nodes" }, ...this.nodes().map((n) => renderNodeCard(n, this.view, actions))),
    );
  }

  /** Icons currently on screen, keyed by node: derived from the render tree
   * so tests can check they match the snapshot's marks exactly. */
  renderedDirtyIcons(): Record<string, { kind: string; cause: string }> {
    const board = this.renderBoard();
    const icons: Record<string, { kind: string; cause: string }> = {};
    const visit = (node: VNode, owner: string | null) => {
      const id = node.attrs["data-node-id"] ?? owner;
      const cls = node.attrs.class ?? "";
      if (cls.includes("propagate-icon") && id) {
        icons[id] = {
          kind: cls.includes("forward") ? "ForwardProp" : cls.includes("back") ? "BackProp" : "Update",
          cause: node.attrs["data-cause"],
        };
      }
      if (cls.includes("update-icon") && id && !icons[id]) {
        icons[id] = { kind: "Update", cause: node.attrs["data-cause"] };
      }
      for (const child of node.children) {
        if (typeof child !== "string") visit(child, id);
      }
    };
    visit(board, null);
    return icons;
  }

  // -- event feed ------------------------------------------------------------

  /** Long-poll the event feed; refresh the snapshot whenever events arrive so
   * dirty icons appear as propagations land. */
  async startEventFeed(pollSeconds = 10): Promise<void> {
    this.feedRunning = true;
    this.eventCursor = this.snapshot?.events.length ?? 0;
    while (this.feedRunning) {
      try {
        const batch = await this.api.events(this.workspaceId, this.eventCursor, pollSeconds);
        this.eventCursor = batch.cursor;
        if (batch.events.length > 0) {
          await this.refresh();
        }
      } catch {
        if (!this.feedRunning) return;
        await new Promise((resolve) => setTimeout(resolve, 500));
      }
    }
  }

  stopEventFeed(): void {
    this.feedRunning = false;
  }
}
