import { describe, expect, test } from "vitest";

import { Announcer } from "../src/announce.js";
import { CalcView } from "../src/calcview.js";
import { Connection } from "../src/connection.js";
import type { Method, TermPayload } from "../src/protocol.js";
import { FixtureTransport, loadFixture, type FixtureEntry } from "./helpers.js";

async function setup(fixture: string, onFormula?: (p: TermPayload) => void) {
  const entries = loadFixture(fixture);
  const transport = new FixtureTransport(entries);
  const conn = new Connection(transport);
  document.body.innerHTML = "";
  const announcer = new Announcer(document.body);
  // replay the model dialogue leading up to the solution phase
  for (const entry of entries) {
    if (entry.method === "solve/start") break;
    await conn.call(entry.method as Method, entry.params);
  }
  const view = new CalcView(conn, announcer, "s1", { onFormula });
  document.body.appendChild(view.root);
  return { entries, announcer, view };
}

function press(view: CalcView, label: string): Promise<void> {
  const target = [...view.root.querySelectorAll("button")].find(
    (b) => b.textContent === label,
  ) as HTMLButtonElement;
  target.click();
  return view.settled();
}

function nodeByFormula(view: CalcView, linear: string): HTMLElement {
  for (const node of view.root.querySelectorAll('.calc-node[data-kind="formula"]')) {
    if (node.querySelector(".term-text")?.textContent === linear) {
      return node as HTMLElement;
    }
  }
  throw new Error(`no calc node shows ${linear}`);
}

describe("accept-all replay", () => {
  test("the committed formulas are exactly what the engine sent", async () => {
    const shown: string[] = [];
    const { entries, announcer, view } = await setup("solution.json", (p) =>
      shown.push(p.linear),
    );
    await view.start();
    expect(view.root.querySelector(".interval .term-text")!.textContent).toBe(
      "{0<..<2*r}",
    );
    expect(view.root.querySelector(".env")!.textContent).toContain("find u in");
    expect(announcer.history).toContain("solving for u in {0<..<2*r}");

    let accepts = 0;
    for (;;) {
      await press(view, "propose");
      if (view.finished) break;
      await press(view, "accept");
      accepts += 1;
    }
    expect(accepts).toBe(19);

    const expected = entries
      .filter((e) => e.method === "solve/commit")
      .map((e) => (e.response.result as { formula?: TermPayload }).formula?.linear)
      .filter((s): s is string => s !== undefined);
    expect(shown).toEqual(expected);

    expect(view.root.querySelector(".preview")!.textContent).toContain(
      "program finished",
    );
    await press(view, "finish");
    const result = [...view.root.querySelectorAll(".result .term-text")].map(
      (n) => n.textContent,
    );
    expect(result).toEqual(["u=7.36", "v=11.91"]);
    expect(announcer.history).toContain("finished: u=7.36, v=11.91");
  });

  test("sub-calculation and collapsed specification render as tree nodes", async () => {
    const { view } = await setup("solution.json");
    await view.start();
    // server delivers the specification folded away
    const spec = view.root.querySelector('.calc-node[data-kind="specification"]')!;
    expect(spec.querySelector(".node-label")!.textContent).toBe(
      "specification F_I",
    );
    expect(spec.querySelector(".collapsed-marker")!.textContent).toBe(
      "<collapsed>",
    );
    expect(spec.querySelector(".children")).toBeNull();

    await press(view, "propose");
    await press(view, "accept"); // the make/function sub-problem
    const sub = view.root.querySelector('.calc-node[data-kind="subcalc"]')!;
    expect(sub.querySelector(".node-label")!.textContent).toBe(
      "subcalc make/function",
    );
  });

  test("folding is local and reversible", async () => {
    const { view } = await setup("solution.json");
    await view.start();
    const toggle = () =>
      view.root.querySelector(
        '.calc-node[data-kind="specification"] .fold-toggle',
      ) as HTMLButtonElement;
    expect(toggle().textContent).toBe("expand");
    toggle().click();
    const spec = () =>
      view.root.querySelector('.calc-node[data-kind="specification"]')!;
    expect(spec().querySelector(".children")).not.toBeNull();
    expect(spec().querySelector(".collapsed-marker")).toBeNull();
    toggle().click();
    expect(spec().querySelector(".collapsed-marker")).not.toBeNull();
  });

  test("justification stays hidden until asked for", async () => {
    const { entries, view } = await setup("solution.json");
    await view.start();
    for (let i = 0; i < 7; i++) {
      await press(view, "propose");
      await press(view, "accept");
    }
    const seventh = entries.filter((e) => e.method === "solve/commit")[6]!;
    const linear = (seventh.response.result as { formula: TermPayload }).formula
      .linear;
    const node = nodeByFormula(view, linear);
    const pane = node.querySelector(".justification") as HTMLElement;
    expect(pane.hidden).toBe(true);
    (node.querySelector("button")! as HTMLButtonElement).click();
    expect(pane.hidden).toBe(false);
    expect(pane.querySelector(".rule-name")!.textContent).toBe(
      "difference rule (diff/diff_sub)",
    );
    const bindings = [...pane.querySelectorAll(".binding")].map(
      (b) => b.textContent,
    );
    expect(bindings).toContain("?u = 4*u*sqrt(r^2-(u/2)^2)");
  });
});

describe("own steps", () => {
  function stepTexts(entries: FixtureEntry[]): string[] {
    return entries
      .filter((e) => e.method === "solve/inputStep")
      .map((e) => e.params.text as string);
  }

  test("rejections name the reason and where the attempt diverges", async () => {
    const { entries, view } = await setup("student.json");
    await view.start();
    for (let i = 0; i < 7; i++) {
      await press(view, "propose");
      await press(view, "accept");
    }
    const [rejected] = stepTexts(entries);
    const input = view.root.querySelector(
      '[aria-label="your next formula"]',
    ) as HTMLInputElement;
    input.value = rejected!;
    await press(view, "submit step");
    expect(view.root.querySelector(".status-line")!.textContent).toBe(
      "rejected: not reachable within 2 rule applications (differs at path 1)",
    );
    // the attempt stays in the box for another try
    expect(input.value).toBe(rejected);
  });

  test("an off-order rule application is accepted as a detour", async () => {
    const { entries, view } = await setup("student.json");
    await view.start();
    for (let i = 0; i < 7; i++) {
      await press(view, "propose");
      await press(view, "accept");
    }
    const [rejected, offOrder, twoAhead] = stepTexts(entries);
    const input = view.root.querySelector(
      '[aria-label="your next formula"]',
    ) as HTMLInputElement;

    input.value = rejected!;
    await press(view, "submit step");
    input.value = offOrder!;
    await press(view, "submit step");
    expect(view.root.querySelector(".status-line")!.textContent).toBe(
      "accepted (derivation)",
    );
    const detour = view.root.querySelector(".calc-node.detour")!;
    expect(detour.querySelector(".detour-marker")!.textContent).toBe("*");
    (detour.querySelector("button") as HTMLButtonElement).click();
    const pane = detour.querySelector(".justification")!;
    expect(pane.textContent).toContain("by chaining:");
    expect(pane.textContent).toContain("power rule with inner derivative");

    input.value = twoAhead!;
    await press(view, "submit step");
    expect(view.root.querySelector(".status-line")!.textContent).toBe(
      "accepted (program)",
    );
  });
});
