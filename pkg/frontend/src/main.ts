/** Browser entry point: mount the app on #app and sync state with the URL hash. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { renderToDom, type VNode } from "./vnode.js";

const mount = document.getElementById("app");
if (!mount) throw new Error("missing #app mount point");

const host = {
  present: (root: VNode) => {
    mount.replaceChildren(renderToDom(root, document));
  },
  getHash: () => window.location.hash,
  setHash: (hash: string) => {
    window.history.replaceState(null, "", "#" + hash);
  },
};

const app = new App(new ApiClient(""), host);
app.start().catch((err) => {
  mount.replaceChildren(
    renderToDom({ tag: "div", props: { class: "error-banner" }, children: [String(err)] }, document),
  );
});
