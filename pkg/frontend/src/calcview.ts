/**
 * Solution phase: the calculation tree plus the propose / accept / own-step
 * loop.  The tree is redrawn from the calc payload of every answer; local
 * state is only which nodes the reader has folded.  Justifications exist in
 * the payload from the start but stay hidden until asked for, mirroring how
 * a printed calculation shows formulas first and laws on request.
 */

import type { Announcer } from "./announce.js";
import type { Connection } from "./connection.js";
import { button, el, termText } from "./dom.js";
import type {
  CalcNode,
  Justification,
  RuleFields,
  Tactic,
  TermPayload,
} from "./protocol.js";

export interface CalcViewOptions {
  onFormula?: (payload: TermPayload) => void;
}

export class CalcView {
  readonly root: HTMLElement;
  finished = false;

  private envPane: HTMLElement;
  private previewPane: HTMLElement;
  private treePane: HTMLElement;
  private resultPane: HTMLElement;
  private statusLine: HTMLElement;
  private stepInput: HTMLInputElement;
  private acceptButton: HTMLButtonElement;
  private pendingTactic: Tactic | null = null;
  private lastCalc: CalcNode[] = [];
  private folded = new Map<string, boolean>();
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly conn: Connection,
    private readonly announcer: Announcer,
    private readonly session: string,
    private readonly options: CalcViewOptions = {},
  ) {
    this.root = el("section", "calc-view");
    this.root.appendChild(el("h3", "", "Solution"));

    const controls = el("div", "calc-controls");
    this.acceptButton = button("accept", () => this.accept());
    this.acceptButton.disabled = true;
    this.stepInput = document.createElement("input");
    this.stepInput.setAttribute("aria-label", "your next formula");
    this.stepInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") this.ownStep();
    });
    controls.append(
      button("start", () => this.start()),
      button("propose", () => this.propose()),
      this.acceptButton,
      this.stepInput,
      button("submit step", () => this.ownStep()),
      button("finish", () => this.finish()),
    );

    this.envPane = el("div", "env");
    this.previewPane = el("div", "preview");
    this.treePane = el("div", "tree");
    this.resultPane = el("div", "result");
    this.statusLine = el("p", "status-line");
    this.statusLine.setAttribute("role", "alert");
    this.root.append(
      controls,
      this.envPane,
      this.previewPane,
      this.treePane,
      this.resultPane,
      this.statusLine,
    );
  }

  settled(): Promise<void> {
    return this.chain;
  }

  start(): Promise<void> {
    return this.enqueue(async () => {
      const r = await this.conn.call("solve/start", { session: this.session });
      this.envPane.replaceChildren();
      const given = el("div", "given");
      given.appendChild(el("span", "", "given: "));
      for (const [name, value] of Object.entries(r.env.given)) {
        const pair = el("span", "given-pair");
        pair.append(
          termText("span", name),
          document.createTextNode(" = "),
          termText("span", value),
        );
        given.appendChild(pair);
      }
      const interval = el("div", "interval");
      interval.append(
        el("span", "", `find ${r.env.intervalVariable} in `),
        termText("span", r.env.interval),
      );
      const relations = el("ul", "relations");
      for (const rel of r.env.relations) {
        const row = el("li", "relation");
        row.appendChild(termText("span", rel));
        relations.appendChild(row);
      }
      this.envPane.append(given, interval, relations);
      this.renderCalc(r.calc);
      this.announcer.announce(
        `solving for ${r.env.intervalVariable} in ${r.env.interval}`,
      );
    });
  }

  propose(): Promise<void> {
    return this.enqueue(async () => {
      const r = await this.conn.call("solve/propose", { session: this.session });
      this.previewPane.replaceChildren();
      if (r.finished) {
        this.finished = true;
        this.pendingTactic = null;
        this.acceptButton.disabled = true;
        this.previewPane.appendChild(el("span", "", "program finished; result: "));
        for (const payload of r.result) {
          this.previewPane.appendChild(termText("span", payload.linear));
        }
        this.announcer.announce("program finished");
        return;
      }
      this.pendingTactic = r.tactic;
      this.acceptButton.disabled = false;
      const summary = el("div", "tactic-summary");
      summary.append(...describeTactic(r.tactic));
      this.previewPane.appendChild(summary);
      if (r.preview !== undefined) {
        const preview = el("div", "preview-formula");
        preview.append(
          el("span", "", "would give: "),
          termText("span", r.preview.linear),
        );
        this.previewPane.appendChild(preview);
      }
      this.announcer.announce("proposal ready");
    });
  }

  accept(): Promise<void> {
    return this.enqueue(async () => {
      if (this.pendingTactic === null) return;
      const tactic = this.pendingTactic;
      const r = await this.conn.call("solve/commit", {
        session: this.session,
        tactic,
      });
      this.pendingTactic = null;
      this.acceptButton.disabled = true;
      this.previewPane.replaceChildren();
      this.renderCalc(r.calc);
      if (r.formula !== undefined) {
        this.options.onFormula?.(r.formula);
        this.announcer.announce(r.formula.linear);
      } else {
        this.announcer.announce("step recorded");
      }
    });
  }

  ownStep(): Promise<void> {
    const text = this.stepInput.value;
    if (text.trim() === "") return this.chain;
    return this.enqueue(async () => {
      const r = await this.conn.call("solve/inputStep", {
        session: this.session,
        text,
      });
      if (r.accepted) {
        this.stepInput.value = "";
        this.renderCalc(r.calc);
        this.statusLine.textContent = `accepted (${r.matches ?? "step"})`;
        if (r.formula !== undefined) this.options.onFormula?.(r.formula);
        this.announcer.announce(`accepted: ${r.formula?.linear ?? text}`);
      } else {
        const where =
          r.mismatch_path !== undefined
            ? ` (differs at path ${r.mismatch_path.join(".") || "root"})`
            : "";
        this.statusLine.textContent = `rejected: ${r.reason ?? "no"}${where}`;
        this.announcer.announce(this.statusLine.textContent, true);
      }
    });
  }

  finish(): Promise<void> {
    return this.enqueue(async () => {
      const r = await this.conn.call("solve/finish", { session: this.session });
      this.resultPane.replaceChildren();
      this.resultPane.appendChild(el("span", "", "result: "));
      for (const payload of r.result) {
        this.resultPane.appendChild(termText("span", payload.linear));
      }
      this.renderCalc(r.calc);
      this.announcer.announce(
        `finished: ${r.result.map((p) => p.linear).join(", ")}`,
      );
    });
  }

  renderCalc(calc: CalcNode[]): void {
    this.lastCalc = calc;
    const tree = el("ul", "calc");
    tree.setAttribute("role", "tree");
    calc.forEach((node, i) => tree.appendChild(this.renderNode(node, String(i))));
    this.treePane.replaceChildren(tree);
  }

  private renderNode(node: CalcNode, key: string): HTMLElement {
    const li = el("li", "calc-node");
    li.dataset.kind = node.kind;
    if (node.detour) li.classList.add("detour");
    const row = el("div", "node-row");
    const folded = this.folded.get(key) ?? node.collapsed;
    const container = node.children !== undefined;
    const label = node.label ? `${node.kind} ${node.label}` : node.kind;

    if (container) {
      const toggle = button(folded ? "expand" : "collapse", () => {
        this.folded.set(key, !folded);
        this.renderCalc(this.lastCalc);
        this.announcer.announce(`${folded ? "expanded" : "collapsed"} ${label}`);
      });
      toggle.className = "fold-toggle";
      row.appendChild(toggle);
    }
    row.appendChild(el("span", "node-label", label));
    if (node.detour) row.appendChild(el("span", "detour-marker", "*"));
    if (container && folded) {
      row.appendChild(el("span", "collapsed-marker", "<collapsed>"));
    }
    if (node.formula !== undefined) {
      row.appendChild(termText("span", node.formula));
    }
    if (node.justification !== undefined) {
      const pane = el("div", "justification");
      pane.hidden = true;
      pane.append(...describeJustification(node.justification));
      row.appendChild(
        button("why", () => {
          pane.hidden = !pane.hidden;
        }),
      );
      li.append(row, pane);
    } else {
      li.appendChild(row);
    }
    if (node.kind === "result" && node.equations !== undefined) {
      const eqs = el("span", "result-equations");
      for (const eq of node.equations) eqs.appendChild(termText("span", eq));
      row.appendChild(eqs);
    }
    if (container && !folded) {
      const children = el("ul", "children");
      node.children!.forEach((child, i) =>
        children.appendChild(this.renderNode(child, `${key}.${i}`)),
      );
      li.appendChild(children);
    }
    return li;
  }

  private enqueue(op: () => Promise<void>): Promise<void> {
    const run = () =>
      op().catch((e: unknown) => {
        const message = e instanceof Error ? e.message : String(e);
        this.statusLine.textContent = message;
        this.announcer.announce(message, true);
      });
    this.chain = this.chain.then(run);
    return this.chain;
  }
}

/** Human phrasing for a tactic; term strings stay in term-text spans. */
export function describeTactic(tactic: Tactic): Node[] {
  const t = tactic as Record<string, unknown>;
  switch (tactic.tactic) {
    case "Rewrite":
      return [
        el(
          "span",
          "",
          `rewrite with ${String(t.rule)} at path ${
            (t.path as number[]).join(".") || "root"
          }`,
        ),
      ];
    case "Substitute":
      return [el("span", "", "substitute "), termText("span", String(t.equation))];
    case "SolveUnivariate":
      return [
        el("span", "", "solve "),
        termText("span", String(t.equation)),
        el("span", "", ` for ${String(t.for)}`),
      ];
    case "Differentiate":
      return [
        el("span", "", "differentiate "),
        termText("span", String(t.function)),
        el("span", "", ` by ${String(t.variable)}`),
      ];
    case "FilterByInterval": {
      const parts: Node[] = [el("span", "", "keep solutions inside ")];
      parts.push(termText("span", String(t.interval)));
      for (const s of t.solutions as string[]) {
        parts.push(el("span", "", " "));
        parts.push(termText("span", s));
      }
      return parts;
    }
    case "TakeEquation":
      return [el("span", "", `take equation ${String(t.index)}`)];
    case "SwitchToFloat":
      return [
        el("span", "", `switch to decimals, ${String(t.precision)} places`),
      ];
    case "SubProblem":
      return [el("span", "", `open sub-problem ${String(t.problem)}`)];
    default:
      return [el("span", "", tactic.tactic)];
  }
}

function describeRule(step: RuleFields): Node[] {
  const parts: Node[] = [
    el("span", "rule-name", `${step.text} (${step.ruleset}/${step.rule})`),
    el("span", "", ` at path ${step.path.join(".") || "root"}`),
  ];
  const bindings = el("ul", "bindings");
  for (const [name, value] of Object.entries(step.bindings)) {
    const row = el("li", "binding");
    row.append(el("span", "", `${name} = `), termText("span", value));
    bindings.appendChild(row);
  }
  parts.push(bindings);
  return parts;
}

export function describeJustification(j: Justification): Node[] {
  if (j.kind === "rule") return describeRule(j);
  if (j.kind === "chain") {
    const list = el("ol", "chain");
    for (const step of j.steps) {
      const row = el("li", "chain-step");
      row.append(...describeRule(step));
      list.appendChild(row);
    }
    return [el("span", "", "by chaining:"), list];
  }
  return describeTactic(j as unknown as Tactic);
}
