/**
 * Payload-origin audit.
 *
 * The client is not allowed to do mathematics: every term string on screen
 * must be traceable to a string the server sent.  This test drives the whole
 * UI (specification, navigation, refinement, solution) against recorded
 * traffic, then audits the resulting document: each .term-text and each
 * .term-mathml must appear verbatim somewhere in the served payloads.  A
 * planted fake proves the audit actually bites.
 */

import { expect, test } from "vitest";

import { boot } from "../src/app.js";
import { Announcer } from "../src/announce.js";
import { CalcView } from "../src/calcview.js";
import { Connection } from "../src/connection.js";
import type { Method } from "../src/protocol.js";
import { SpecForm } from "../src/specform.js";
import { TermView } from "../src/termview.js";
import { FixtureTransport, loadFixture, unservedTermTexts } from "./helpers.js";

function enter(form: SpecForm, field: string, text: string): Promise<void> {
  const box = form.root.querySelector(`[data-field="${field}"]`)!;
  (box.querySelector("input") as HTMLInputElement).value = text;
  (box.querySelector(".add-item") as HTMLButtonElement).click();
  return form.settled();
}

function setRef(form: SpecForm, slot: string, id: string): Promise<void> {
  const row = form.root.querySelector(`.ref-row[data-ref="${slot}"]`)!;
  (row.querySelector("input") as HTMLInputElement).value = id;
  (row.querySelector("button") as HTMLButtonElement).click();
  return form.settled();
}

function clickButton(root: Element, label: string): void {
  const target = [...root.querySelectorAll("button")].find(
    (b) => b.textContent === label,
  ) as HTMLButtonElement;
  target.click();
}

/** Specification dialogue end to end, through the booted app. */
async function driveSpecification(host: HTMLElement): Promise<Set<string>> {
  const transport = new FixtureTransport(loadFixture("specification.json"));
  const conn = new Connection(transport);
  const app = await boot(host, conn);
  await app.open("No123a");
  const form = app.specForm!;

  await form.check();
  await enter(form, "Given", "r=7");
  await enter(form, "Relate", "2+*3");
  await enter(form, "Relate", "u^2+v^2=(2*r)^2");
  await enter(form, "Find", "A");
  await enter(form, "Find", "u");
  await enter(form, "Find", "v");
  await enter(form, "Relate", "A=2*u*v-u^2");
  await enter(form, "Relate", "(u/2)^2+(v/2)^2=r^2");
  await setRef(form, "RTheory", "Diff_App");
  await setRef(form, "RProblem", "univariate_calculus/Optimisation");
  await setRef(form, "RMethod", "by_univariate_calculus");
  const checkbox = form.root.querySelector(
    '.ref-check[data-ref="RMethod"]',
  ) as HTMLInputElement;
  checkbox.checked = true;
  checkbox.dispatchEvent(new Event("change", { bubbles: true }));
  await form.settled();
  await form.check();
  clickButton(form.root, "show postcondition");
  await form.settled();

  // route a model item into the term view
  const viewButton = [...form.root.querySelectorAll("button")].find(
    (b) => b.textContent === "view",
  ) as HTMLButtonElement;
  viewButton.click();

  // refine against the problem the dialogue recorded
  app.refineView!.setProblem("univariate_calculus");
  clickButton(app.refineView!.root, "refine");
  await app.refineView!.settled();

  return transport.served;
}

/** A keyboard walk through a rendered term. */
async function driveNavigation(host: HTMLElement): Promise<Set<string>> {
  const transport = new FixtureTransport(loadFixture("navigation.json"));
  const conn = new Connection(transport);
  const view = new TermView(conn, new Announcer(host));
  host.appendChild(view.root);
  const r = await conn.call("term/render", { text: "(u/2)^2+(v/2)^2=r^2" });
  view.setTerm(r.term);
  for (const key of ["ArrowDown", "ArrowRight", "ArrowDown", "ArrowUp"]) {
    view.root.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
    await view.settled();
  }
  return transport.served;
}

/** The full solution replay, with a justification opened and a node unfolded. */
async function driveSolution(host: HTMLElement): Promise<Set<string>> {
  const entries = loadFixture("solution.json");
  const transport = new FixtureTransport(entries);
  const conn = new Connection(transport);
  for (const entry of entries) {
    if (entry.method === "solve/start") break;
    await conn.call(entry.method as Method, entry.params);
  }
  const view = new CalcView(conn, new Announcer(host), "s1");
  host.appendChild(view.root);
  await view.start();
  for (;;) {
    clickButton(view.root, "propose");
    await view.settled();
    if (view.finished) break;
    clickButton(view.root, "accept");
    await view.settled();
  }
  clickButton(view.root, "finish");
  await view.settled();

  // open every justification pane and unfold every folded node
  for (const why of view.root.querySelectorAll("button")) {
    if (why.textContent === "why") (why as HTMLButtonElement).click();
  }
  for (const fold of view.root.querySelectorAll(".fold-toggle")) {
    if (fold.textContent === "expand") (fold as HTMLButtonElement).click();
  }
  return transport.served;
}

test("every term string in the document came from a server payload", async () => {
  document.body.innerHTML = "";
  const specHost = document.createElement("div");
  const navHost = document.createElement("div");
  const solveHost = document.createElement("div");
  document.body.append(specHost, navHost, solveHost);

  const served = new Set<string>();
  for (const part of [
    await driveSpecification(specHost),
    await driveNavigation(navHost),
    await driveSolution(solveHost),
  ]) {
    for (const s of part) served.add(s);
  }

  // the scene is big enough for the audit to mean something
  expect(document.body.querySelectorAll(".term-text").length).toBeGreaterThan(40);
  expect(document.body.querySelectorAll(".term-mathml").length).toBeGreaterThan(0);

  expect(unservedTermTexts(document.body, served)).toEqual([]);

  // plant strings the server never sent: the audit must catch exactly those
  const fakeText = document.createElement("span");
  fakeText.className = "term-text";
  fakeText.textContent = "9*q-42";
  const fakeMath = document.createElement("div");
  fakeMath.className = "term-mathml";
  fakeMath.innerHTML = "<math><mi>q</mi></math>";
  document.body.append(fakeText, fakeMath);

  expect(unservedTermTexts(document.body, served)).toEqual([
    "9*q-42",
    "<math><mi>q</mi></math>",
  ]);
});
