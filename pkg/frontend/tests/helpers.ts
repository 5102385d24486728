/**
 * Fixture-backed fake transport.
 *
 * Fixtures are request/response pairs recorded from the real engine
 * (scripts/record_fixtures.py).  The fake matches an outgoing request by
 * method + params and serves the recorded answer; identical requests are
 * served in recorded order.  Anything the client sends that was never
 * recorded throws, so the tests also pin exactly which traffic the UI
 * produces.  Every string served is remembered for the payload-origin
 * audit.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Transport } from "../src/connection.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export interface FixtureEntry {
  method: string;
  params: Record<string, unknown>;
  response: { result?: unknown; error?: unknown };
}

export function loadFixture(name: string): FixtureEntry[] {
  const raw = JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as {
    entries: FixtureEntry[];
  };
  return raw.entries;
}

/** JSON with object keys sorted, for order-insensitive request matching. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

function collectStrings(value: unknown, into: Set<string>): void {
  if (typeof value === "string") {
    into.add(value);
  } else if (Array.isArray(value)) {
    for (const item of value) collectStrings(item, into);
  } else if (value !== null && typeof value === "object") {
    for (const [key, item] of Object.entries(value)) {
      into.add(key);
      collectStrings(item, into);
    }
  }
}

export class FixtureTransport implements Transport {
  readonly served = new Set<string>();
  readonly sent: Array<{ method: string; params: unknown }> = [];

  private queues = new Map<string, Array<FixtureEntry["response"]>>();
  private handlers: Array<(line: string) => void> = [];

  constructor(entries: FixtureEntry[]) {
    for (const entry of entries) {
      const key = stableStringify([entry.method, entry.params]);
      const queue = this.queues.get(key);
      if (queue === undefined) this.queues.set(key, [entry.response]);
      else queue.push(entry.response);
    }
  }

  send(line: string): void {
    const request = JSON.parse(line) as {
      id: string;
      method: string;
      params: Record<string, unknown>;
    };
    this.sent.push({ method: request.method, params: request.params });
    const key = stableStringify([request.method, request.params]);
    const body = this.queues.get(key)?.shift();
    if (body === undefined) {
      throw new Error(`unrecorded request: ${key}`);
    }
    collectStrings(body, this.served);
    const response = JSON.stringify({ id: request.id, ...body });
    queueMicrotask(() => {
      for (const handler of this.handlers) handler(response);
    });
  }

  onMessage(handler: (line: string) => void): void {
    this.handlers.push(handler);
  }

  close(): void {
    this.handlers = [];
  }
}

/**
 * Elements whose text must come from a served payload, and the strings served.
 * The only client-side edit tolerated inside served markup is the focus
 * highlight (a class attribute; the server never sends any), which is
 * stripped before comparing.
 */
export function unservedTermTexts(root: Element, served: Set<string>): string[] {
  const offenders: string[] = [];
  for (const node of root.querySelectorAll(".term-text")) {
    const text = node.textContent ?? "";
    if (text !== "" && !served.has(text)) offenders.push(text);
  }
  for (const node of root.querySelectorAll(".term-mathml")) {
    const pristine = node.cloneNode(true) as Element;
    pristine.removeAttribute("class");
    for (const child of pristine.querySelectorAll("[class]")) {
      child.removeAttribute("class");
    }
    if (!served.has(pristine.innerHTML)) offenders.push(node.innerHTML);
  }
  return offenders;
}
