export { ApiClient, ApiError } from "./api.js";
export type { PropagateDirection } from "./api.js";
export { batchActions } from "./batch.js";
export type { BatchMenuItem } from "./batch.js";
export { CanvasController } from "./canvas.js";
export type { CanvasDelegate } from "./canvas.js";
export { cardIsTitleOnly, nodeTitle, renderNodeCard } from "./cards.js";
export type { CardActions } from "./cards.js";
export { SEMANTIC_ZOOM_THRESHOLD, ViewState } from "./state.js";
export type { Panel } from "./state.js";
export { IMAGE_STYLES, StoryboardEditor } from "./storyboard.js";
export * from "./types.js";
export { findAll, findByClass, h, on, renderToDom, textOf } from "./vdom.js";
export type { VNode } from "./vdom.js";

import { ApiClient } from "./api.js";
import { CanvasController } from "./canvas.js";
import { renderToDom } from "./vdom.js";

/** Mount a live canvas into a host element: initial fetch, render, and an
 * event-feed loop that re-renders whenever the server reports changes. */
export async function mountCanvas(
  host: HTMLElement,
  baseUrl: string,
  workspaceId: string,
): Promise<CanvasController> {
  const controller = new CanvasController(new ApiClient(baseUrl), workspaceId);
  await controller.refresh();

  const rerender = () => {
    host.replaceChildren(renderToDom(controller.renderBoard()));
  };
  rerender();

  void (async () => {
    const feed = controller.startEventFeed();
    const tick = setInterval(rerender, 500);
    await feed;
    clearInterval(tick);
  })();
  return controller;
}
