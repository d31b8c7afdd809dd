/** Node cards: full card with contextual toolbar when zoomed in, title-only
 * chip with a hover popup when zoomed out, dirty-mark icons with one-click
 * propagation on top of either. */

import { ViewState } from "./state.js";
import type { FrameDoc, NodeDoc } from "./types.js";
import { VNode, h, on, textOf } from "./vdom.js";

export interface CardActions {
  viewFeedback(nodeId: string): void;
  reviseWithAi(nodeId: string): void;
  editManually(nodeId: string): void;
  generateNext(nodeId: string): void;
  generateMore(nodeId: string): void;
  duplicate(nodeId: string): void;
  /** Click-to-propagate: direction comes from the mark kind. */
  propagate(origin: string, direction: "forward" | "backward" | "single"): void;
  select(nodeId: string, additive: boolean): void;
}

const TOOLBAR: { action: keyof CardActions & string; label: string }[] = [
  { action: "viewFeedback", label: "View feedback" },
  { action: "reviseWithAi", label: "Revise with AI" },
  { action: "editManually", label: "Edit manually" },
  { action: "generateNext", label: "Generate next" },
  { action: "generateMore", label: "Generate more" },
  { action: "duplicate", label: "Duplicate" },
];

const ATTRIBUTE_FIELDS: Record<string, string[]> = {
  Persona: ["location", "bio", "needs", "challenges", "description"],
  Problem: ["context", "stakeholders", "objectives"],
  Solution: ["problemsAddressed", "keyFeatures", "benefits"],
};

export function nodeTitle(node: NodeDoc): string {
  const content = node.content as Record<string, string>;
  return content.name || content.title || content.label || "(untitled)";
}

function dirtyIcon(node: NodeDoc, actions: CardActions): VNode | null {
  const mark = node.dirty;
  if (!mark) return null;
  const kindClass = { ForwardProp: "forward", BackProp: "back", Update: "update" }[mark.kind];
  const icons: VNode[] = [];
  if (mark.kind === "ForwardProp" || mark.kind === "BackProp") {
    const direction = mark.kind === "ForwardProp" ? "forward" : "backward";
    icons.push(
      on(
        h("button", {
          class: `dirty-icon propagate-icon ${kindClass}`,
          title: direction === "forward"
            ? "Propagate changes forward to the last connected node"
            : "Propagate changes backward to the first node in the chain",
          "data-cause": mark.cause,
        }, direction === "forward" ? "⇩" : "⇧"),
        "click",
        () => actions.propagate(mark.cause, direction),
      ),
    );
  }
  icons.push(
    on(
      h("button", {
        class: "dirty-icon update-icon",
        title: "Update this node only",
        "data-cause": mark.cause,
      }, "↻"),
      "click",
      () => actions.propagate(node.id, "single"),
    ),
  );
  return h("div", { class: "dirty-overlay" }, ...icons);
}

function attributeRows(node: NodeDoc): VNode[] {
  const content = node.content as Record<string, unknown>;
  const fields = ATTRIBUTE_FIELDS[node.kind] ?? [];
  return fields
    .filter((f) => typeof content[f] === "string" && (content[f] as string).length > 0)
    .map((f) => h("div", { class: "attribute", "data-field": f }, String(content[f])));
}

function cardImage(node: NodeDoc): VNode {
  const image = (node.content as { image?: string | null }).image;
  if (image) {
    return h("img", { class: "card-image", src: image, alt: nodeTitle(node) });
  }
  return h("div", { class: "card-image placeholder", role: "img" }, "no image yet");
}

function storyboardStrip(node: NodeDoc): VNode {
  const frames = ((node.content as { frames?: FrameDoc[] }).frames ?? []);
  return h(
    "div",
    { class: "storyboard-strip" },
    ...frames.map((frame, i) =>
      h(
        "figure",
        { class: "frame-thumb", "data-frame-index": String(i), "data-frame-type": frame.frameType },
        frame.image
          ? h("img", { src: frame.image, alt: frame.caption })
          : h("div", { class: "placeholder" }, "…"),
        h("figcaption", {}, frame.caption),
      ),
    ),
  );
}

function toolbar(node: NodeDoc, actions: CardActions): VNode {
  return h(
    "div",
    { class: "toolbar", role: "toolbar" },
    ...TOOLBAR.filter(({ action }) => {
      // Storyboards are terminal: no next stage and no generate-more.
      if (node.kind === "Storyboard" && (action === "generateNext" || action === "generateMore")) {
        return false;
      }
      return true;
    }).map(({ action, label }) =>
      on(
        h("button", { class: `toolbar-action ${action}`, title: label }, label),
        "click",
        () => (actions[action] as (id: string) => void)(node.id),
      ),
    ),
  );
}

/** Render one node for the current zoom level. */
export function renderNodeCard(node: NodeDoc, view: ViewState, actions: CardActions): VNode {
  const selected = view.isSelected(node.id);
  const base = {
    "data-node-id": node.id,
    "data-kind": node.kind,
    style: `left:${node.position.x}px;top:${node.position.y}px`,
  };

  if (view.zoomedOut) {
    const chip = h(
      "div",
      { ...base, class: `node-chip${selected ? " selected" : ""}` },
      h("span", { class: "chip-title" }, nodeTitle(node)),
      h("div", { class: "hover-popup" }, ...attributeRows(node)),
      dirtyIcon(node, actions),
    );
    return on(chip, "click", (event) =>
      actions.select(node.id, Boolean((event as MouseEvent | undefined)?.shiftKey)),
    );
  }

  const card = h(
    "div",
    { ...base, class: `node-card${selected ? " selected" : ""}` },
    node.kind === "Storyboard" ? storyboardStrip(node) : cardImage(node),
    h("h3", { class: "card-title" }, nodeTitle(node)),
    ...attributeRows(node),
    selected ? toolbar(node, actions) : null,
    dirtyIcon(node, actions),
  );
  return on(card, "click", (event) =>
    actions.select(node.id, Boolean((event as MouseEvent | undefined)?.shiftKey)),
  );
}

export function cardIsTitleOnly(card: VNode): boolean {
  return (card.attrs.class ?? "").includes("node-chip");
}

export { textOf };
