/** Batch actions for multi-node selections: next-stage generation across
 * the whole selection, and group feedback. */

import type { NodeDoc } from "./types.js";

export interface BatchMenuItem {
  id: "generate-next" | "group-feedback";
  label: string;
  enabled: boolean;
  tooltip?: string;
}

const STAGE: Record<string, number | null> = {
  Context: null,
  Persona: 0,
  Problem: 1,
  Solution: 2,
  Storyboard: 3,
};

const NEXT_LABEL: Record<number, string> = {
  0: "Generate problems",
  1: "Generate solutions",
  2: "Generate storyboards",
};

export function batchActions(selection: NodeDoc[]): BatchMenuItem[] {
  const stages = new Set(selection.map((n) => STAGE[n.kind]));

  let generateNext: BatchMenuItem;
  if (selection.length === 0) {
    generateNext = { id: "generate-next", label: "Generate next", enabled: false, tooltip: "Select at least one node" };
  } else if (stages.has(null)) {
    generateNext = { id: "generate-next", label: "Generate next", enabled: false, tooltip: "Context nodes have no next stage" };
  } else if (stages.size > 1) {
    generateNext = {
      id: "generate-next",
      label: "Generate next",
      enabled: false,
      tooltip: "Select nodes from a single stage to generate the next one",
    };
  } else {
    const stage = [...stages][0] as number;
    generateNext =
      stage === 3
        ? { id: "generate-next", label: "Generate next", enabled: false, tooltip: "Storyboards are the last stage" }
        : { id: "generate-next", label: NEXT_LABEL[stage], enabled: true };
  }

  return [
    generateNext,
    {
      id: "group-feedback",
      label: selection.length > 1 ? "View group feedback" : "View feedback",
      enabled: selection.length > 0,
    },
  ];
}
