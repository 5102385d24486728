import { expect, test } from "vitest";

import { boot, serverUrl, DEFAULT_SERVER } from "../src/app.js";
import { Connection } from "../src/connection.js";
import { FixtureTransport, loadFixture } from "./helpers.js";

test("the engine address comes from ?server=", () => {
  expect(serverUrl("?server=ws://example.org:8123")).toBe(
    "ws://example.org:8123",
  );
  expect(serverUrl("?foo=bar")).toBe(DEFAULT_SERVER);
  expect(serverUrl("")).toBe(DEFAULT_SERVER);
  expect(serverUrl("?server=ws://a&server=ws://b")).toBe("ws://a");
});

test("boot lists examples and opening one mounts the workspace", async () => {
  const transport = new FixtureTransport(loadFixture("specification.json"));
  const conn = new Connection(transport);
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);

  const app = await boot(root, conn);
  const pick = root.querySelector(
    'nav.examples button[data-example="No123a"]',
  ) as HTMLButtonElement;
  expect(pick.textContent).toBe("Cross-section of an electrical coil");

  await app.open("No123a");
  expect(app.specForm).not.toBeNull();
  expect(root.querySelector(".spec-form .statement")!.textContent).toContain(
    "electrical coil",
  );
  expect(root.querySelector(".term-view")).not.toBeNull();
  expect(root.querySelector(".refine-view")).not.toBeNull();
  expect(root.querySelector(".calc-view")).not.toBeNull();
  // refinement starts from the problem the template references
  expect(
    (root.querySelector('.refine-view input[aria-label="problem id"]') as HTMLInputElement)
      .value,
  ).toBe("univariate_calculus/Optimisation");
  expect(app.announcer.history.at(-1)).toBe(
    "opened Cross-section of an electrical coil",
  );
});

test("inspecting a model item routes its payload into the term view", async () => {
  const transport = new FixtureTransport(loadFixture("specification.json"));
  const conn = new Connection(transport);
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = await boot(root, conn);
  await app.open("No123a");

  const given = root.querySelector('[data-field="Given"]')!;
  const input = given.querySelector("input") as HTMLInputElement;
  input.value = "r=7";
  (given.querySelector(".add-item") as HTMLButtonElement).click();
  await app.specForm!.settled();

  const viewButton = [...given.querySelectorAll("button")].find(
    (b) => b.textContent === "view",
  ) as HTMLButtonElement;
  viewButton.click();
  expect(root.querySelector(".term-view .linear-line")!.textContent).toBe("r=7");
});
