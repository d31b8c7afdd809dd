/** Typed client for the designflow HTTP API. All mutations go through here;
 * the UI never owns state the server doesn't confirm. */

import type {
  ChangeSetDoc,
  EventDoc,
  FeedbackQuestionDoc,
  MetricsDoc,
  NodeDoc,
  PlanDoc,
  PropagationResultDoc,
  SuggestionDoc,
  WorkspaceDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly nodeId?: string,
    public readonly status?: number,
  ) {
    super(message);
  }
}

export type PropagateDirection = "forward" | "backward" | "single";

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly sessionId = "canvas",
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: {
        "content-type": "application/json",
        "x-session-id": this.sessionId,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(
        payload.code ?? "Error",
        payload.message ?? response.statusText,
        payload.nodeId,
        response.status,
      );
    }
    return payload as T;
  }

  createWorkspace(name: string): Promise<WorkspaceDoc> {
    return this.request("POST", "/workspaces", { name });
  }

  getWorkspace(id: string): Promise<WorkspaceDoc> {
    return this.request("GET", `/workspaces/${id}`);
  }

  listNodes(workspaceId: string): Promise<NodeDoc[]> {
    return this.request("GET", `/workspaces/${workspaceId}/nodes`);
  }

  createNode(
    workspaceId: string,
    kind: string,
    content?: Record<string, unknown>,
    position?: { x: number; y: number },
  ): Promise<NodeDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/nodes`, { kind, content, position });
  }

  getNode(workspaceId: string, nodeId: string): Promise<NodeDoc> {
    return this.request("GET", `/workspaces/${workspaceId}/nodes/${nodeId}`);
  }

  editNode(workspaceId: string, nodeId: string, content: Record<string, unknown>): Promise<ChangeSetDoc> {
    return this.request("PUT", `/workspaces/${workspaceId}/nodes/${nodeId}`, { content });
  }

  connect(workspaceId: string, fromNode: string, toNode: string) {
    return this.request<{
      edge: { upstream: string; downstream: string };
      gestureDirection: "Forward" | "Backward";
      suggestedMark: { kind: string; cause: string } | null;
    }>("POST", `/workspaces/${workspaceId}/connect`, { fromNode, toNode });
  }

  propagate(
    workspaceId: string,
    node: string,
    direction: PropagateDirection,
  ): Promise<PropagationResultDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/propagate`, { node, direction });
  }

  propagateDryRun(workspaceId: string, node: string, direction: PropagateDirection): Promise<PlanDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/propagate?dryRun=true`, { node, direction });
  }

  brainstorm(
    workspaceId: string,
    designContext: string,
    targetStage: string,
    stageGuidance: Record<string, string> = {},
    numberOfVariations?: number,
  ) {
    return this.request<{
      contextNode: string;
      nodes: string[];
      edges: { upstream: string; downstream: string }[];
      storyboard: string | null;
    }>("POST", `/workspaces/${workspaceId}/brainstorm`, {
      designContext,
      targetStage,
      stageGuidance,
      numberOfVariations,
    });
  }

  generateMore(workspaceId: string, nodes: string[], guidance?: string, n?: number) {
    return this.request<{ nodes: NodeDoc[] }>(
      "POST", `/workspaces/${workspaceId}/generate-more`, { nodes, guidance, n });
  }

  generateNext(workspaceId: string, nodes: string[], guidance?: string, n?: number) {
    return this.request<{ nodes: string[]; edges: { upstream: string; downstream: string }[] }>(
      "POST", `/workspaces/${workspaceId}/generate-next`, { nodes, guidance, n });
  }

  buildStoryboard(workspaceId: string, solution: string, guidance?: string, style?: string): Promise<NodeDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/storyboards`, { solution, guidance, style });
  }

  regenerateImages(workspaceId: string, nodeId: string, style: string): Promise<NodeDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/nodes/${nodeId}/regenerate-images`, { style });
  }

  regenerateFrameImage(workspaceId: string, nodeId: string, frameIndex: number): Promise<NodeDoc> {
    return this.request(
      "POST", `/workspaces/${workspaceId}/nodes/${nodeId}/frames/${frameIndex}/regenerate-image`);
  }

  suggestions(workspaceId: string, nodeId: string) {
    return this.request<{ suggestions: SuggestionDoc[] }>(
      "GET", `/workspaces/${workspaceId}/nodes/${nodeId}/suggestions`);
  }

  revise(workspaceId: string, nodeId: string, instruction: string): Promise<ChangeSetDoc> {
    return this.request("POST", `/workspaces/${workspaceId}/nodes/${nodeId}/revise`, { instruction });
  }

  listFeedback(workspaceId: string, nodeId: string) {
    return this.request<{ questions: FeedbackQuestionDoc[] }>(
      "GET", `/workspaces/${workspaceId}/nodes/${nodeId}/feedback`);
  }

  generateFeedback(workspaceId: string, nodeId: string, groupNodes: string[] = []) {
    return this.request<{ questions: FeedbackQuestionDoc[] }>(
      "POST", `/workspaces/${workspaceId}/nodes/${nodeId}/feedback/generate`, { nodes: groupNodes });
  }

  incorporateFeedback(workspaceId: string, questionId: string, response: string): Promise<ChangeSetDoc> {
    return this.request(
      "POST", `/workspaces/${workspaceId}/feedback/${questionId}/incorporate`, { response });
  }

  metrics(workspaceId: string): Promise<MetricsDoc> {
    return this.request("GET", `/workspaces/${workspaceId}/metrics`);
  }

  events(workspaceId: string, after = 0, wait = 0) {
    return this.request<{ events: EventDoc[]; cursor: number }>(
      "GET", `/workspaces/${workspaceId}/events?after=${after}&wait=${wait}`);
  }
}
