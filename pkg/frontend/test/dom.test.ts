import { describe, expect, it } from "vitest";

import { h, renderToDom } from "../src/vnode.js";

/** Just enough of a document to exercise the mount path without a browser. */
class FakeElement {
  attrs: Record<string, string> = {};
  listeners: Record<string, ((event: unknown) => void)[]> = {};
  children: (FakeElement | FakeText)[] = [];
  constructor(public tag: string, public namespace?: string) {}
  setAttribute(key: string, value: string) {
    this.attrs[key] = value;
  }
  addEventListener(type: string, listener: (event: unknown) => void) {
    (this.listeners[type] ??= []).push(listener);
  }
  appendChild(child: FakeElement | FakeText) {
    this.children.push(child);
    return child;
  }
}

class FakeText {
  constructor(public text: string) {}
}

const fakeDocument = {
  createElement: (tag: string) => new FakeElement(tag),
  createElementNS: (ns: string, tag: string) => new FakeElement(tag, ns),
  createTextNode: (text: string) => new FakeText(text),
} as unknown as Document;

describe("renderToDom", () => {
  it("creates elements, attributes, listeners and text", () => {
    let clicked = 0;
    const tree = h(
      "div",
      { className: "root", "data-x": "1", onclick: () => (clicked += 1) },
      "hello",
      h("svg", { width: 10 }, h("rect", { x: 1 })),
    );
    const el = renderToDom(tree, fakeDocument) as unknown as FakeElement;
    expect(el.tag).toBe("div");
    expect(el.attrs).toEqual({ class: "root", "data-x": "1" });
    el.listeners.click[0]({});
    expect(clicked).toBe(1);
    expect((el.children[0] as FakeText).text).toBe("hello");
    const svg = el.children[1] as FakeElement;
    expect(svg.namespace).toBe("http://www.w3.org/2000/svg");
    expect((svg.children[0] as FakeElement).tag).toBe("rect");
  });
});
