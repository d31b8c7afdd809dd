/** Wire types mirroring the designflow service documents (docs/api.md). */

export type NodeKind = "Context" | "Persona" | "Problem" | "Solution" | "Storyboard";
export type MarkKind = "Update" | "ForwardProp" | "BackProp";
export type FrameType = "Context" | "Problem" | "Solution" | "Resolution";

export interface DirtyMark {
  kind: MarkKind;
  cause: string;
}

export interface FrameDoc {
  frameType: FrameType;
  description: string;
  caption: string;
  imagePrompt: string;
  imageNegativePrompt: string;
  image: string | null;
}

export interface StoryboardContentDoc {
  title: string;
  frames: FrameDoc[];
  style: string;
}

export interface NodeDoc {
  id: string;
  kind: NodeKind;
  seq: number;
  content: Record<string, unknown>;
  position: { x: number; y: number };
  createdBy: "Manual" | "Generated";
  dirty: DirtyMark | null;
}

export interface EdgeDoc {
  upstream: string;
  downstream: string;
}

export interface FeedbackQuestionDoc {
  id: string;
  targets: string[];
  text: string;
  incorporated: boolean;
}

export interface EventDoc {
  timestamp: number;
  actor: string;
  type: string;
  payload: Record<string, unknown>;
}

export interface WorkspaceDoc {
  formatVersion: number;
  id: string;
  name: string;
  settings: { defaultVariations: number; style: string; providerMode: string };
  graph: { nodes: NodeDoc[]; edges: EdgeDoc[] };
  feedback: Record<string, FeedbackQuestionDoc[]>;
  descriptions: { characterName: string; description: string }[];
  events: EventDoc[];
}

export interface ChangeSetDoc {
  changedNode: string;
  trigger: string;
  diff: { changes: { fieldPath: string; oldValue: string; newValue: string; changedSpans: [number, number][] }[] };
  marks: Record<string, DirtyMark>;
}

export interface PropagationResultDoc {
  direction: string;
  origin: string;
  updatedNodes: { node: string; diff: ChangeSetDoc["diff"] }[];
  failedNode: string | null;
  error: string | null;
}

export interface PlanDoc {
  direction: string;
  origin: string;
  steps: { targetNode: string; contextNodes: string[] }[];
}

export interface MetricsDoc {
  nodeCounts: Record<string, number>;
  individualNodeEdits: number;
  forwardPropEdits: number;
  nodesUpdatedForward: number;
  backPropEdits: number;
  nodesUpdatedBackward: number;
  featureUsage: Record<string, number>;
}

export interface SuggestionDoc {
  text: string;
  source: "UserTyped" | "AiSuggested" | "FillMissing";
}
