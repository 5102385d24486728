/**
 * Dual term display with keyboard navigation.
 *
 * The pretty pane shows the whole term as server markup whose nodes carry
 * data-path attributes; the linear line always shows the sub-term the
 * cursor is on.  Arrow keys walk the tree through term/navigate, so focus
 * movement is the server's notion of the tree, not a client guess.  Hitting
 * a boundary leaves the cursor in place and raises an assertive cue.
 */

import type { Announcer } from "./announce.js";
import type { Connection } from "./connection.js";
import { el, mathml } from "./dom.js";
import type { TermPayload } from "./protocol.js";

export type Move =
  | "to-parent"
  | "to-first-child"
  | "to-next-sibling"
  | "to-prev-sibling";

const KEY_MOVES: Record<string, Move> = {
  ArrowUp: "to-parent",
  ArrowDown: "to-first-child",
  ArrowRight: "to-next-sibling",
  ArrowLeft: "to-prev-sibling",
};

export interface TermScope {
  session?: string;
  theory?: string;
}

export class TermView {
  readonly root: HTMLElement;
  path: number[] = [];
  boundary = false;

  private text = "";
  private prettyPane: HTMLElement;
  private linearLine: HTMLElement;
  private pathLabel: HTMLElement;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly conn: Connection,
    private readonly announcer: Announcer,
    private readonly scope: TermScope = {},
  ) {
    this.root = el("section", "term-view");
    this.root.tabIndex = 0;
    this.root.setAttribute("role", "group");
    this.root.setAttribute("aria-label", "term");
    this.prettyPane = el("div", "pretty-pane");
    this.linearLine = el("output", "linear-line term-text");
    this.linearLine.setAttribute("aria-label", "current sub-term");
    this.pathLabel = el("span", "path-indicator", "path: root");
    this.root.append(this.prettyPane, this.linearLine, this.pathLabel);
    this.root.addEventListener("keydown", (event) => {
      const move = KEY_MOVES[event.key];
      if (move === undefined) return;
      event.preventDefault();
      this.move(move);
    });
  }

  /** Show a term fresh from a server payload; cursor returns to the root. */
  setTerm(payload: TermPayload): void {
    this.text = payload.linear;
    this.path = [];
    this.boundary = false;
    this.prettyPane.replaceChildren(mathml(payload.pretty));
    this.linearLine.textContent = payload.linear;
    this.pathLabel.textContent = "path: root";
    this.highlight();
  }

  move(move: Move): Promise<void> {
    this.chain = this.chain.then(() => this.doMove(move));
    return this.chain;
  }

  /** Await all keystrokes issued so far. */
  settled(): Promise<void> {
    return this.chain;
  }

  private async doMove(move: Move): Promise<void> {
    if (this.text === "") return;
    const params: Record<string, unknown> = {
      text: this.text,
      path: this.path,
      move,
      ...this.scope,
    };
    const r = await this.conn.call("term/navigate", params);
    this.path = r.path;
    this.boundary = r.boundary;
    if (r.boundary) {
      this.announcer.announce("boundary", true);
      return;
    }
    this.linearLine.textContent = r.focus.linear;
    this.pathLabel.textContent =
      this.path.length === 0 ? "path: root" : `path: ${this.path.join(".")}`;
    this.highlight();
    this.announcer.announce(r.focus.linear);
  }

  private highlight(): void {
    for (const node of this.prettyPane.querySelectorAll(".focused")) {
      node.classList.remove("focused");
    }
    const key = this.path.join(".");
    const target = this.prettyPane.querySelector(`[data-path="${key}"]`);
    if (target !== null) target.classList.add("focused");
  }
}
