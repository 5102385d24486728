/**
 * Specification phase: Given / Find / Relate inputs with per-item feedback.
 *
 * Whatever the student types goes to the server verbatim; what the page
 * shows afterwards is rebuilt from the template the answer carries, so the
 * form displays the model the engine actually holds, never a local echo.
 */

import type { Announcer } from "./announce.js";
import type { Connection } from "./connection.js";
import { badge, button, el, termText } from "./dom.js";
import type { Feedback, Template, TemplateItem, TermPayload } from "./protocol.js";

const FIELDS = ["Given", "Find", "Relate"] as const;
const REF_SLOTS = ["RTheory", "RProblem", "RMethod"] as const;

export interface SpecFormOptions {
  /** Called with an item's term payload when the student asks to inspect it. */
  onInspect?: (payload: TermPayload) => void;
  /** Called with every fresh template so the host can track phase changes. */
  onTemplate?: (template: Template) => void;
}

export class SpecForm {
  readonly root: HTMLElement;
  template: Template | null = null;

  private itemLists = new Map<string, HTMLElement>();
  private feedbackSlots = new Map<string, HTMLElement>();
  private inputs = new Map<string, HTMLInputElement>();
  private refValues = new Map<string, HTMLElement>();
  private refChecks = new Map<string, HTMLInputElement>();
  private titleLine: HTMLElement;
  private statementLine: HTMLElement;
  private variantLine: HTMLElement;
  private reportPane: HTMLElement;
  private postcondPane: HTMLElement;
  private errorLine: HTMLElement;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly conn: Connection,
    private readonly announcer: Announcer,
    private readonly session: string,
    private readonly options: SpecFormOptions = {},
  ) {
    this.root = el("section", "spec-form");
    this.titleLine = el("h2", "example-title");
    this.statementLine = el("p", "statement");
    this.variantLine = el("p", "variant");
    this.root.append(this.titleLine, this.statementLine, this.variantLine);

    for (const field of FIELDS) {
      const box = el("fieldset", "field");
      box.dataset.field = field;
      const legend = el("legend", "", field);
      const items = el("ul", "items");
      const input = document.createElement("input");
      input.type = "text";
      input.setAttribute("aria-label", `${field} input`);
      const slot = el("span", "last-feedback");
      slot.setAttribute("aria-label", `${field} feedback`);
      const add = button("enter", () => this.submit(field));
      add.className = "add-item";
      input.addEventListener("keydown", (event) => {
        if (event.key === "Enter") this.submit(field);
      });
      box.append(legend, items, input, add, slot);
      this.root.appendChild(box);
      this.itemLists.set(field, items);
      this.feedbackSlots.set(field, slot);
      this.inputs.set(field, input);
    }

    const refs = el("fieldset", "references");
    refs.appendChild(el("legend", "", "References"));
    for (const slot of REF_SLOTS) {
      const row = el("div", "ref-row");
      row.dataset.ref = slot;
      const value = el("span", "ref-value");
      const input = document.createElement("input");
      input.type = "text";
      input.setAttribute("aria-label", `${slot} id`);
      row.append(
        el("span", "ref-name", slot),
        value,
        input,
        button("set", () => this.setReference(slot, input.value)),
      );
      refs.appendChild(row);
      this.refValues.set(slot, value);
    }
    for (const which of ["RProblem", "RMethod"] as const) {
      const label = el("label", "ref-check-label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.className = "ref-check";
      box.dataset.ref = which;
      box.addEventListener("change", () => this.toggle(which));
      label.append(box, document.createTextNode(` ${which} checked`));
      refs.appendChild(label);
      this.refChecks.set(which, box);
    }
    this.root.appendChild(refs);

    const renameBox = el("div", "rename");
    const renameFrom = document.createElement("input");
    renameFrom.setAttribute("aria-label", "rename from");
    const renameTo = document.createElement("input");
    renameTo.setAttribute("aria-label", "rename to");
    renameBox.append(
      renameFrom,
      renameTo,
      button("rename", () => this.rename(renameFrom.value, renameTo.value)),
    );
    this.root.appendChild(renameBox);

    const actions = el("div", "actions");
    actions.append(
      button("check model", () => this.check()),
      button("show postcondition", () => this.showPostcondition()),
    );
    this.root.appendChild(actions);

    this.reportPane = el("div", "check-report");
    this.postcondPane = el("div", "postcondition");
    this.errorLine = el("p", "error-line");
    this.errorLine.setAttribute("role", "alert");
    this.root.append(this.reportPane, this.postcondPane, this.errorLine);
  }

  settled(): Promise<void> {
    return this.chain;
  }

  render(template: Template): void {
    this.template = template;
    this.titleLine.textContent = template.title;
    this.statementLine.textContent = template.statement;
    this.variantLine.textContent = `variant: ${template.activeVariant}`;
    for (const field of FIELDS) {
      const list = this.itemLists.get(field)!;
      list.replaceChildren(
        ...template.fields[field].map((item) => this.renderItem(item)),
      );
    }
    for (const slot of REF_SLOTS) {
      this.refValues.get(slot)!.textContent = template.references[slot] ?? "";
    }
    for (const which of ["RProblem", "RMethod"] as const) {
      this.refChecks.get(which)!.checked = template.checkboxes[which];
    }
    this.options.onTemplate?.(template);
  }

  private renderItem(item: TemplateItem): HTMLElement {
    const row = el("li", "item");
    row.dataset.source = item.source;
    if (item.source === "revealed") {
      row.appendChild(el("span", "revealed-marker", "revealed "));
    }
    // prefer the engine's rendering of the parsed term over the raw input
    row.appendChild(termText("span", item.linear ?? item.text));
    row.appendChild(badge(item.status));
    if (item.linear !== undefined && item.pretty !== undefined) {
      const payload = { linear: item.linear, pretty: item.pretty };
      row.appendChild(button("view", () => this.options.onInspect?.(payload)));
    }
    return row;
  }

  private submit(field: string): void {
    const input = this.inputs.get(field)!;
    const text = input.value;
    if (text.trim() === "") return;
    this.enqueue(async () => {
      const r = await this.conn.call("model/input", {
        session: this.session,
        field,
        text,
      });
      input.value = "";
      this.showFeedback(field, r.feedback);
      this.render(r.template);
    });
  }

  private setReference(slot: string, id: string): void {
    if (id.trim() === "") return;
    this.enqueue(async () => {
      const r = await this.conn.call("refs/set", {
        session: this.session,
        slot,
        id,
      });
      this.announcer.announce(`${slot}: ${r.feedback.kind}`);
      this.render(r.template);
    });
  }

  private toggle(which: "RProblem" | "RMethod"): void {
    this.enqueue(async () => {
      const r = await this.conn.call("refs/toggle", {
        session: this.session,
        which,
      });
      this.render(r.template);
      this.announcer.announce(
        `${which} ${r.template.checkboxes[which] ? "checked" : "unchecked"}`,
      );
    });
  }

  private rename(from: string, to: string): void {
    if (from.trim() === "" || to.trim() === "") return;
    this.enqueue(async () => {
      const r = await this.conn.call("model/rename", {
        session: this.session,
        from,
        to,
      });
      this.announcer.announce(`rename: ${r.feedback.kind}`);
      this.render(r.template);
    });
  }

  check(): Promise<void> {
    return this.enqueue(async () => {
      const r = await this.conn.call("model/check", { session: this.session });
      this.reportPane.replaceChildren();
      const overall = el("div", "overall");
      overall.append(el("span", "", "model: "), badge(r.overall));
      this.reportPane.appendChild(overall);
      const missing = el("ul", "missing");
      for (const [field, labels] of Object.entries(r.missing)) {
        for (const label of labels) {
          const row = el("li", "missing-row");
          row.dataset.field = field;
          row.appendChild(badge({ kind: "Missing", labels: [label] }));
          missing.appendChild(row);
        }
      }
      this.reportPane.appendChild(missing);
      const where = el("ul", "where");
      for (const entry of r.where) {
        const row = el("li", "where-row");
        row.appendChild(termText("span", entry.condition));
        row.appendChild(badge({ kind: entry.status as Feedback["kind"] }));
        where.appendChild(row);
      }
      this.reportPane.appendChild(where);
      this.render(r.template);
      this.announcer.announce(`model ${r.overall.kind}`);
    });
  }

  private showPostcondition(): void {
    this.enqueue(async () => {
      const r = await this.conn.call("postcond/show", { session: this.session });
      this.postcondPane.replaceChildren(
        el("span", "", "postcondition: "),
        termText("span", r.postcondition.linear),
      );
      this.options.onInspect?.(r.postcondition);
      this.announcer.announce(`postcondition ${r.postcondition.linear}`);
    });
  }

  private showFeedback(field: string, feedback: Feedback): void {
    const slot = this.feedbackSlots.get(field)!;
    slot.replaceChildren(badge(feedback));
    this.announcer.announce(`${field}: ${feedback.kind}`);
  }

  private enqueue(op: () => Promise<void>): Promise<void> {
    const run = () =>
      op().catch((e: unknown) => {
        const message = e instanceof Error ? e.message : String(e);
        this.errorLine.textContent = message;
        this.announcer.announce(message, true);
      });
    this.chain = this.chain.then(run);
    return this.chain;
  }
}
