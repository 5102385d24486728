import { describe, expect, test } from "vitest";

import { Announcer } from "../src/announce.js";
import { Connection } from "../src/connection.js";
import type { OutlineNode } from "../src/protocol.js";
import { TermView } from "../src/termview.js";
import { FixtureTransport, loadFixture } from "./helpers.js";

const CIRCLE = "(u/2)^2+(v/2)^2=r^2";

function setup() {
  const transport = new FixtureTransport(loadFixture("navigation.json"));
  const conn = new Connection(transport);
  document.body.innerHTML = "";
  const announcer = new Announcer(document.body);
  const view = new TermView(conn, announcer);
  document.body.appendChild(view.root);
  return { conn, view, announcer, transport };
}

async function show(conn: Connection, view: TermView, text: string) {
  const r = await conn.call("term/render", { text });
  view.setTerm(r.term);
}

function press(view: TermView, key: string): Promise<void> {
  view.root.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
  return view.settled();
}

function linearLine(view: TermView): string {
  return view.root.querySelector(".linear-line")!.textContent ?? "";
}

describe("keyboard navigation", () => {
  test("ArrowDown at the root of a+b puts 'a' on the linear line", async () => {
    const { conn, view } = setup();
    await show(conn, view, "a+b");
    expect(linearLine(view)).toBe("a+b");
    await press(view, "ArrowDown");
    expect(linearLine(view)).toBe("a");
    expect(view.path).toEqual([0]);
  });

  test("ArrowUp at the root stays put and cues the boundary", async () => {
    const { conn, view, announcer } = setup();
    await show(conn, view, "a+b");
    await press(view, "ArrowUp");
    expect(linearLine(view)).toBe("a+b");
    expect(view.path).toEqual([]);
    expect(view.boundary).toBe(true);
    expect(announcer.history).toContain("boundary");
    expect(announcer.region.getAttribute("aria-live")).toBe("assertive");
  });

  test("focus is mirrored in the pretty markup", async () => {
    const { conn, view } = setup();
    await show(conn, view, "a+b");
    await press(view, "ArrowDown");
    const focused = view.root.querySelector(".pretty-pane .focused");
    expect(focused).not.toBeNull();
    expect(focused!.getAttribute("data-path")).toBe("0");
    expect(focused!.textContent).toBe("a");
  });

  test("moves are spoken as the sub-term they land on", async () => {
    const { conn, view, announcer } = setup();
    await show(conn, view, "a+b");
    await press(view, "ArrowDown");
    await press(view, "ArrowRight");
    expect(announcer.history.slice(-2)).toEqual(["a", "b"]);
  });
});

function preorder(node: OutlineNode): string[] {
  return [node.path.join("."), ...node.children.flatMap(preorder)];
}

describe("full traversal", () => {
  test("child/sibling/parent keys visit every node exactly once, preorder", async () => {
    const { conn, view } = setup();
    const { outline } = await conn.call("term/outline", {
      text: CIRCLE,
      depth: 10,
    });
    const expected = preorder(outline);
    expect(expected.length).toBeGreaterThan(10);

    await show(conn, view, CIRCLE);
    const visited: string[] = [view.path.join(".")];
    walk: while (true) {
      await press(view, "ArrowDown");
      if (!view.boundary) {
        visited.push(view.path.join("."));
        continue;
      }
      while (true) {
        await press(view, "ArrowRight");
        if (!view.boundary) {
          visited.push(view.path.join("."));
          continue walk;
        }
        await press(view, "ArrowUp");
        if (view.boundary) break walk; // climbed back above the root
      }
    }

    expect(visited).toEqual(expected);
    expect(new Set(visited).size).toBe(visited.length);
  });
});
