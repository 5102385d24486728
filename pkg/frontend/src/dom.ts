/**
 * Small DOM helpers shared by the views.
 *
 * Term content only ever enters the page through `termText` and `mathml`,
 * and both take strings straight out of server payloads.  The client never
 * assembles a formula itself; the classes these helpers set are what the
 * payload-origin audit walks.
 */

import type { Feedback } from "./protocol.js";

export function el(
  tag: string,
  className = "",
  text = "",
): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

/** A linear term line as received from the server. */
export function termText(tag: string, linear: string): HTMLElement {
  const node = el(tag, "term-text");
  node.textContent = linear;
  return node;
}

/** A pretty (markup) term pane as received from the server. */
export function mathml(markup: string): HTMLElement {
  const node = el("div", "term-mathml");
  node.innerHTML = markup;
  return node;
}

/**
 * Feedback badge: one of six kinds, each with a distinct class and the
 * kind spelled out as text.  Colour alone is never the signal.
 */
export function badge(feedback: Feedback): HTMLElement {
  const kind = feedback.kind;
  const node = el("span", `badge badge-${kind.toLowerCase()}`);
  let label: string = kind;
  if (feedback.labels && feedback.labels.length > 0) {
    label += `: ${feedback.labels.join(", ")}`;
  }
  if (kind === "SyntaxError" && feedback.position !== undefined) {
    label += ` at ${feedback.position}`;
  }
  node.textContent = label;
  if (feedback.detail) node.title = feedback.detail;
  return node;
}

export function button(label: string, onClick: () => void): HTMLButtonElement {
  const node = document.createElement("button");
  node.type = "button";
  node.textContent = label;
  node.addEventListener("click", onClick);
  return node;
}
