/** Every recorded engine answer must fit the schema the client trusts. */

import { describe, expect, test } from "vitest";

import { RESULTS, Response, type Method } from "../src/protocol.js";
import { loadFixture } from "./helpers.js";

const FIXTURE_FILES = [
  "navigation.json",
  "specification.json",
  "refine.json",
  "solution.json",
  "student.json",
];

describe("fixture conformance", () => {
  for (const file of FIXTURE_FILES) {
    test(`${file} parses against the result schemas`, () => {
      const entries = loadFixture(file);
      expect(entries.length).toBeGreaterThan(0);
      for (const entry of entries) {
        expect(RESULTS).toHaveProperty(entry.method);
        if (entry.response.result !== undefined) {
          const schema = RESULTS[entry.method as Method];
          const parsed = schema.safeParse(entry.response.result);
          expect(
            parsed.success,
            `${file}: ${entry.method} ${JSON.stringify(entry.params)}: ${
              parsed.success ? "" : parsed.error.message
            }`,
          ).toBe(true);
        }
      }
    });
  }
});

describe("envelope", () => {
  test("result and error forms both parse", () => {
    expect(Response.parse({ id: "c1", result: {} }).id).toBe("c1");
    const e = Response.parse({
      id: null,
      error: { code: -32700, message: "unparsable" },
    });
    expect(e.error?.code).toBe(-32700);
  });

  test("an envelope without an id is rejected", () => {
    expect(() => Response.parse({ result: {} })).toThrow();
  });
});
