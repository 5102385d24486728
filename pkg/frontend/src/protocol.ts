/**
 * Wire contract with the engine: one JSON document per message, requests
 * carry an id, responses answer with the same id and either a result or
 * an error.  Every result shape the client consumes is validated here, so
 * payload drift fails loudly instead of rendering garbage.
 */

import { z } from "zod";

// -- envelope -----------------------------------------------------------

export interface Request {
  id: string;
  method: string;
  params: Record<string, unknown>;
}

export const ErrorShape = z.object({
  code: z.number(),
  message: z.string(),
  data: z.unknown().optional(),
});

export const Response = z.object({
  id: z.union([z.string(), z.number(), z.null()]),
  result: z.unknown().optional(),
  error: ErrorShape.optional(),
});

export type Response = z.infer<typeof Response>;

// -- shared payload pieces ------------------------------------------------

/** A term as the server presents it: linear ASCII line + markup. */
export const TermPayload = z.object({
  linear: z.string(),
  pretty: z.string(),
});
export type TermPayload = z.infer<typeof TermPayload>;

export const FEEDBACK_KINDS = [
  "Correct",
  "Superfluous",
  "Missing",
  "Incomplete",
  "SyntaxError",
  "False",
] as const;
export type FeedbackKind = (typeof FEEDBACK_KINDS)[number];

export const Feedback = z.object({
  kind: z.enum(FEEDBACK_KINDS),
  labels: z.array(z.string()).optional(),
  position: z.number().optional(),
  detail: z.string().optional(),
});
export type Feedback = z.infer<typeof Feedback>;

export const TemplateItem = z.object({
  field: z.string(),
  source: z.enum(["student", "revealed"]),
  text: z.string(),
  status: Feedback,
  linear: z.string().optional(),
  pretty: z.string().optional(),
});
export type TemplateItem = z.infer<typeof TemplateItem>;

export const Template = z.object({
  example: z.string(),
  title: z.string(),
  statement: z.string(),
  fields: z.object({
    Given: z.array(TemplateItem),
    Find: z.array(TemplateItem),
    Relate: z.array(TemplateItem),
  }),
  references: z.record(z.string(), z.string()),
  checkboxes: z.object({ RProblem: z.boolean(), RMethod: z.boolean() }),
  renaming: z.record(z.string(), z.string()),
  activeVariant: z.string(),
});
export type Template = z.infer<typeof Template>;

// Justifications attach to calculation steps; shown only on demand.
export const RuleFields = z.object({
  rule: z.string(),
  ruleset: z.string(),
  path: z.array(z.number()),
  bindings: z.record(z.string(), z.string()),
  text: z.string(),
});
export type RuleFields = z.infer<typeof RuleFields>;

export const RuleJustification = RuleFields.extend({ kind: z.literal("rule") });
export type RuleJustification = z.infer<typeof RuleJustification>;

export const Justification = z.union([
  RuleJustification,
  z.looseObject({ kind: z.literal("tactic"), tactic: z.string() }),
  // chain steps are bare rule records, no kind tag
  z.object({ kind: z.literal("chain"), steps: z.array(RuleFields) }),
]);
export type Justification = z.infer<typeof Justification>;

export const CALC_KINDS = [
  "specification",
  "solution",
  "subcalc",
  "formula",
  "result",
] as const;
export type CalcKind = (typeof CALC_KINDS)[number];

export interface CalcNode {
  kind: CalcKind;
  label?: string;
  formula?: string;
  justification?: Justification;
  equations?: string[];
  children?: CalcNode[];
  collapsed: boolean;
  detour?: boolean;
}

export const CalcNodeShape: z.ZodType<CalcNode> = z.lazy(() =>
  z.object({
    kind: z.enum(CALC_KINDS),
    label: z.string().optional(),
    formula: z.string().optional(),
    justification: Justification.optional(),
    equations: z.array(z.string()).optional(),
    children: z.array(CalcNodeShape).optional(),
    collapsed: z.boolean(),
    detour: z.boolean().optional(),
  }),
);

export const Tactic = z.looseObject({ tactic: z.string() });
export type Tactic = z.infer<typeof Tactic>;

export interface OutlineNode {
  path: number[];
  text: string;
  childCount: number;
  children: OutlineNode[];
}

export const OutlineNodeShape: z.ZodType<OutlineNode> = z.lazy(() =>
  z.object({
    path: z.array(z.number()),
    text: z.string(),
    childCount: z.number(),
    children: z.array(OutlineNodeShape),
  }),
);

// -- per-method result schemas --------------------------------------------

export const RESULTS = {
  "example/list": z.object({
    examples: z.array(
      z.object({ id: z.string(), title: z.string(), statement: z.string() }),
    ),
  }),
  "example/open": z.object({
    session: z.string(),
    phase: z.string(),
    template: Template,
  }),
  "model/input": z.object({ feedback: Feedback, template: Template }),
  "model/check": z.object({
    overall: Feedback,
    missing: z.record(z.string(), z.array(z.string())),
    where: z.array(z.object({ condition: z.string(), status: z.string() })),
    template: Template,
  }),
  "model/rename": z.object({ feedback: Feedback, template: Template }),
  "refs/set": z.object({ feedback: Feedback, template: Template }),
  "refs/toggle": z.object({ template: Template }),
  "postcond/show": z.object({ postcondition: TermPayload }),
  "solve/start": z.object({
    phase: z.string(),
    env: z.object({
      given: z.record(z.string(), z.string()),
      interval: z.string(),
      intervalVariable: z.string(),
      relations: z.array(z.string()),
    }),
    calc: z.array(CalcNodeShape),
  }),
  "solve/propose": z.union([
    z.object({ finished: z.literal(true), result: z.array(TermPayload) }),
    z.object({
      finished: z.literal(false),
      tactic: Tactic,
      preview: TermPayload.optional(),
    }),
  ]),
  "solve/commit": z.object({
    node: CalcNodeShape,
    calc: z.array(CalcNodeShape),
    formula: TermPayload.optional(),
  }),
  "solve/inputStep": z.looseObject({
    accepted: z.boolean(),
    calc: z.array(CalcNodeShape),
    justification: Justification.optional(),
    matches: z.string().optional(),
    depth: z.number().optional(),
    reason: z.string().optional(),
    mismatch_path: z.array(z.number()).optional(),
    node: CalcNodeShape.optional(),
    formula: TermPayload.optional(),
  }),
  "solve/finish": z.object({
    phase: z.string(),
    result: z.array(TermPayload),
    calc: z.array(CalcNodeShape),
  }),
  "term/render": z.object({ term: TermPayload }),
  "term/navigate": z.object({
    path: z.array(z.number()),
    boundary: z.boolean(),
    focus: TermPayload,
  }),
  "term/outline": z.object({ outline: OutlineNodeShape }),
  "knowledge/lookup": z.object({ entries: z.array(z.unknown()) }),
  "knowledge/refine": z.object({
    candidates: z.array(
      z.object({
        problem: z.string(),
        conditions: z.array(
          z.object({
            condition: TermPayload,
            verdict: z.enum(["true", "false", "undecided"]),
          }),
        ),
      }),
    ),
  }),
  "knowledge/outline": z.object({ outline: z.unknown() }),
  "session/close": z.object({ closed: z.string() }),
} as const;

export type Method = keyof typeof RESULTS;
export type Result<M extends Method> = z.infer<(typeof RESULTS)[M]>;
