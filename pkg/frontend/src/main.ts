/** Browser bootstrap: wire the client, renderer, and edit gestures. */

import { PreviewClient } from "./client.js";
import { DocRenderer } from "./render.js";

const page = document.getElementById("page") as HTMLElement;
const status = document.getElementById("status") as HTMLElement;
const toast = document.getElementById("toast") as HTMLElement;

const renderer = new DocRenderer(page);

function showToast(message: string): void {
  toast.textContent = message;
  toast.classList.add("visible");
  setTimeout(() => toast.classList.remove("visible"), 2500);
}

const client = new PreviewClient({
  onChange(state) {
    status.textContent = state.connection;
    status.className = state.connection;
    if (state.lastError) {
      renderer.renderError(state.lastError);
    } else {
      renderer.render(state.doc, state.overrides);
    }
  },
  onToast: showToast,
});

function pathOf(target: EventTarget | null): string | null {
  let el = target as HTMLElement | null;
  while (el && el !== page) {
    if (el.dataset?.path !== undefined) return el.dataset.path;
    el = el.parentElement;
  }
  return null;
}

// click a title/paragraph/button to retype it, anything else to recolor
page.addEventListener("dblclick", (ev) => {
  const path = pathOf(ev.target);
  if (path === null) return;
  const el = ev.target as HTMLElement;
  if (/\b(title|paragraph|button)\b/.test(el.className)) {
    const text = window.prompt("Text:", el.textContent ?? "");
    if (text !== null) client.edit({ kind: "set_text", path, text });
  } else {
    const color = window.prompt("Color (CSS):", "#e8f0fe");
    if (color) client.edit({ kind: "set_color", path, color });
  }
});

// drag a file onto an image placeholder to fill it
page.addEventListener("dragover", (ev) => ev.preventDefault());
page.addEventListener("drop", (ev) => {
  ev.preventDefault();
  const path = pathOf(ev.target);
  const file = ev.dataTransfer?.files?.[0];
  if (path === null || !file) return;
  const reader = new FileReader();
  reader.onload = () => {
    client.edit({ kind: "drop_image", path, src: String(reader.result) });
  };
  reader.readAsDataURL(file);
});

void client.catchUp().then(() => client.connect());
