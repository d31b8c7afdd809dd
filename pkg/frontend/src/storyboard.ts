/** Storyboard editor model: frame edits, insertion between frames, image
 * upload/regeneration, and the style picker. Every change round-trips
 * through the API and the edited node is re-read from the response. */

import { ApiClient } from "./api.js";
import type { FrameDoc, FrameType, NodeDoc, StoryboardContentDoc } from "./types.js";

export const IMAGE_STYLES = ["comic-book", "neon-punk", "anime", "line-art"] as const;

function emptyFrame(): FrameDoc {
  return {
    frameType: "Context",
    description: "",
    caption: "",
    imagePrompt: "",
    imageNegativePrompt: "",
    image: null,
  };
}

export class StoryboardEditor {
  constructor(
    private readonly api: ApiClient,
    private readonly workspaceId: string,
    private node: NodeDoc,
  ) {
    if (node.kind !== "Storyboard") {
      throw new Error(`storyboard editor opened on a ${node.kind} node`);
    }
  }

  get nodeId(): string {
    return this.node.id;
  }

  get content(): StoryboardContentDoc {
    return this.node.content as unknown as StoryboardContentDoc;
  }

  get frames(): FrameDoc[] {
    return this.content.frames;
  }

  get style(): string {
    return this.content.style;
  }

  private async save(content: StoryboardContentDoc): Promise<void> {
    await this.api.editNode(this.workspaceId, this.node.id, content as unknown as Record<string, unknown>);
    this.node = await this.api.getNode(this.workspaceId, this.node.id);
  }

  private cloneContent(): StoryboardContentDoc {
    return JSON.parse(JSON.stringify(this.content)) as StoryboardContentDoc;
  }

  async updateFrame(
    index: number,
    patch: Partial<Pick<FrameDoc, "description" | "caption"> & { frameType: FrameType }>,
  ): Promise<void> {
    const content = this.cloneContent();
    Object.assign(content.frames[index], patch);
    await this.save(content);
  }

  /** Insert an empty frame after the given index (the "+" between frames). */
  async insertFrameAfter(index: number): Promise<void> {
    const content = this.cloneContent();
    content.frames.splice(index + 1, 0, emptyFrame());
    await this.save(content);
  }

  async removeFrame(index: number): Promise<void> {
    const content = this.cloneContent();
    if (content.frames.length <= 1) {
      throw new Error("a storyboard keeps at least one frame");
    }
    content.frames.splice(index, 1);
    await this.save(content);
  }

  /** Attach an uploaded image reference to one frame. */
  async uploadFrameImage(index: number, imageRef: string): Promise<void> {
    const content = this.cloneContent();
    content.frames[index].image = imageRef;
    await this.save(content);
  }

  /** Redraw one frame's image from its (possibly edited) description. */
  async regenerateFrameImage(index: number): Promise<void> {
    this.node = await this.api.regenerateFrameImage(this.workspaceId, this.node.id, index);
  }

  /** Style picker: redraw every frame in the new style. */
  async pickStyle(style: string): Promise<void> {
    this.node = await this.api.regenerateImages(this.workspaceId, this.node.id, style);
  }

  async refresh(): Promise<void> {
    this.node = await this.api.getNode(this.workspaceId, this.node.id);
  }
}
