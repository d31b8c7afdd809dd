/** Minimal element-tree layer: components build plain trees that tests can
 * inspect directly; `renderToDom` turns them into real elements when a
 * browser document is available. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  on: Record<string, (event?: unknown) => void>;
}

type Child = VNode | string | null | undefined | false;

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: Child[]
): VNode {
  return {
    tag,
    attrs,
    children: children.filter((c): c is VNode | string => c !== null && c !== undefined && c !== false),
    on: {},
  };
}

export function on(node: VNode, event: string, handler: (event?: unknown) => void): VNode {
  node.on[event] = handler;
  return node;
}

/** Depth-first search over a tree in document order. */
export function findAll(root: VNode, predicate: (node: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const visit = (node: VNode) => {
    if (predicate(node)) out.push(node);
    for (const child of node.children) {
      if (typeof child !== "string") visit(child);
    }
  };
  visit(root);
  return out;
}

export function findByClass(root: VNode, className: string): VNode[] {
  return findAll(root, (n) => (n.attrs.class ?? "").split(/\s+/).includes(className));
}

export function textOf(node: VNode): string {
  const parts: string[] = [];
  const walk = (n: VNode | string) => {
    if (typeof n === "string") {
      parts.push(n);
      return;
    }
    n.children.forEach(walk);
  };
  walk(node);
  return parts.join(" ").replace(/\s+/g, " ").trim();
}

export function renderToDom(node: VNode, doc: Document = document): HTMLElement {
  const element = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    element.setAttribute(key, value);
  }
  for (const [event, handler] of Object.entries(node.on)) {
    element.addEventListener(event, handler);
  }
  for (const child of node.children) {
    element.append(typeof child === "string" ? doc.createTextNode(child) : renderToDom(child, doc));
  }
  return element;
}
