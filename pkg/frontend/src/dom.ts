/** Materialize a VNode tree into real DOM nodes (browser side only). */

import { VNode } from "./render.js";

export function toElement(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") {
    return doc.createTextNode(node);
  }
  const el = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  for (const child of node.children) {
    el.appendChild(toElement(child, doc));
  }
  return el;
}

export function mount(root: Element, node: VNode): void {
  const doc = root.ownerDocument;
  root.replaceChildren(toElement(node, doc));
}
