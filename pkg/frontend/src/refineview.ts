/**
 * Problem-tree refinement: ask the knowledge store which sub-problems fit
 * the formula at hand.  Candidates arrive in store order and stay that way.
 * A precondition that evaluates false is styled as an error AND prefixed
 * with a literal "[false]" marker, so the verdict survives without colour;
 * undecided ones get "[undecided]".  Only an all-true candidate can be
 * taken as the new problem reference.
 */

import type { Announcer } from "./announce.js";
import type { Connection } from "./connection.js";
import { button, el, termText } from "./dom.js";

export interface RefineOptions {
  session?: string;
  onSelect?: (problem: string) => void;
}

export class RefineView {
  readonly root: HTMLElement;

  private problemInput: HTMLInputElement;
  private subjectInput: HTMLInputElement;
  private list: HTMLElement;
  private errorLine: HTMLElement;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly conn: Connection,
    private readonly announcer: Announcer,
    private readonly options: RefineOptions = {},
  ) {
    this.root = el("section", "refine-view");
    this.root.appendChild(el("h3", "", "Refine problem"));
    this.problemInput = document.createElement("input");
    this.problemInput.setAttribute("aria-label", "problem id");
    this.subjectInput = document.createElement("input");
    this.subjectInput.setAttribute("aria-label", "formula to refine against");
    const controls = el("div", "refine-controls");
    controls.append(
      this.problemInput,
      this.subjectInput,
      button("refine", () => this.refine()),
    );
    this.list = el("ol", "candidates");
    this.errorLine = el("p", "error-line");
    this.errorLine.setAttribute("role", "alert");
    this.root.append(controls, this.list, this.errorLine);
  }

  setProblem(problem: string): void {
    this.problemInput.value = problem;
  }

  setSubject(linear: string): void {
    this.subjectInput.value = linear;
  }

  settled(): Promise<void> {
    return this.chain;
  }

  refine(): Promise<void> {
    const problem = this.problemInput.value.trim();
    if (problem === "") return this.chain;
    const params: Record<string, unknown> = { problem };
    const subject = this.subjectInput.value.trim();
    if (subject !== "") params.subject = subject;
    if (this.options.session !== undefined) params.session = this.options.session;
    const run = async () => {
      const r = await this.conn.call("knowledge/refine", params);
      this.list.replaceChildren();
      let falseCount = 0;
      for (const candidate of r.candidates) {
        const row = el("li", "candidate");
        row.dataset.problem = candidate.problem;
        const head = el("div", "candidate-head");
        head.appendChild(el("span", "candidate-name", candidate.problem));
        const allTrue = candidate.conditions.every((c) => c.verdict === "true");
        const select = button("select", () => {
          this.options.onSelect?.(candidate.problem);
          this.announcer.announce(`selected ${candidate.problem}`);
        });
        select.disabled = !allTrue;
        head.appendChild(select);
        row.appendChild(head);
        const conditions = el("ul", "conditions");
        for (const c of candidate.conditions) {
          const line = el("li", `cond cond-${c.verdict}`);
          if (c.verdict !== "true") {
            line.appendChild(el("span", "verdict-marker", `[${c.verdict}] `));
          }
          if (c.verdict === "false") falseCount += 1;
          line.appendChild(termText("span", c.condition.linear));
          conditions.appendChild(line);
        }
        row.appendChild(conditions);
        this.list.appendChild(row);
      }
      this.announcer.announce(
        `${r.candidates.length} candidates, ${falseCount} false preconditions`,
      );
    };
    this.chain = this.chain.then(() =>
      run().catch((e: unknown) => {
        const message = e instanceof Error ? e.message : String(e);
        this.errorLine.textContent = message;
        this.announcer.announce(message, true);
      }),
    );
    return this.chain;
  }
}
