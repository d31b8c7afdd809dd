/** Client view state: zoom, selection, open panel. Purely presentational;
 * everything authoritative lives on the server. */

export type Panel =
  | "None"
  | "Brainstorm"
  | "Revise"
  | "Feedback"
  | "StoryboardEditor"
  | "ManualEdit";

/** Below this zoom level nodes render as title-only chips with a hover
 * popup; at or above it they render as full cards. */
export const SEMANTIC_ZOOM_THRESHOLD = 0.6;

export class ViewState {
  zoomLevel = 1.0;
  selection = new Set<string>();
  openPanel: Panel = "None";

  get zoomedOut(): boolean {
    return this.zoomLevel < SEMANTIC_ZOOM_THRESHOLD;
  }

  isSelected(nodeId: string): boolean {
    return this.selection.has(nodeId);
  }

  select(nodeId: string, additive = false): void {
    if (!additive) this.selection.clear();
    this.selection.add(nodeId);
  }

  toggle(nodeId: string): void {
    if (!this.selection.delete(nodeId)) this.selection.add(nodeId);
  }

  clearSelection(): void {
    this.selection.clear();
  }

  open(panel: Panel): void {
    this.openPanel = panel;
  }

  close(): void {
    this.openPanel = "None";
  }
}
