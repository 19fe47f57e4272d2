/** Minimal virtual nodes: renderers return plain trees that tests can inspect
 * and the browser entry point mounts onto the real DOM. */

export type Child = VNode | string;

export interface VNode {
  tag: string;
  props: Record<string, unknown>;
  children: Child[];
}

export function h(tag: string, props: Record<string, unknown> = {}, ...children: (Child | Child[] | null | undefined)[]): VNode {
  const flat: Child[] = [];
  for (const child of children) {
    if (child == null) continue;
    if (Array.isArray(child)) {
      for (const c of child) if (c != null) flat.push(c);
    } else {
      flat.push(child);
    }
  }
  return { tag, props, children: flat };
}

const SVG_TAGS = new Set([
  "svg", "g", "rect", "circle", "line", "path", "text", "title", "image",
]);

/** Mount a virtual tree onto a document (browser DOM or a test double). */
export function renderToDom(node: Child, doc: Document): Node {
  if (typeof node === "string") return doc.createTextNode(node);
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.props)) {
    if (value == null) continue;
    if (key.startsWith("on") && typeof value === "function") {
      el.addEventListener(key.slice(2).toLowerCase(), value as EventListener);
    } else {
      el.setAttribute(key === "className" ? "class" : key, String(value));
    }
  }
  for (const child of node.children) el.appendChild(renderToDom(child, doc));
  return el;
}

/** Depth-first search over a virtual tree; the workhorse of the contract tests. */
export function findAll(root: Child, test: (node: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const walk = (node: Child) => {
    if (typeof node === "string") return;
    if (test(node)) out.push(node);
    node.children.forEach(walk);
  };
  walk(root);
  return out;
}

export function findFirst(root: Child, test: (node: VNode) => boolean): VNode | null {
  return findAll(root, test)[0] ?? null;
}

export function textOf(node: Child): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}
