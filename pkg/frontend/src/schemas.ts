// Runtime validation: everything the form can emit and everything the server
// returns passes through these schemas, so client-side checks mirror the
// server's rules without ever replacing them.

import { z } from "zod";
import { CATEGORIES } from "./types";

export const categoryScore = z.number().int().min(0).max(5);

export const sheetPayloadSchema = z
  .object({
    sample_id: z.number().int().nonnegative(),
    scores: z.record(z.string(), categoryScore),
  })
  .refine(
    (sheet) =>
      Object.keys(sheet.scores).length === CATEGORIES.length &&
      CATEGORIES.every((c) => c in sheet.scores),
    { message: "scores must cover exactly the five categories" },
  );

export const submitRequestSchema = z.object({
  round: z.number().int().min(1),
  sheets: z.array(sheetPayloadSchema).min(1),
});

export const feedbackSampleSchema = z.object({
  sample_id: z.number().int(),
  mean: z.number(),
  sigma: z.number().nonnegative(),
  histogram: z.record(z.string(), z.number().int().nonnegative()),
  converged: z.boolean(),
  n_scores: z.number().int().min(2),
});

export const feedbackResponseSchema = z.object({
  round: z.number().int().min(1),
  samples: z.array(feedbackSampleSchema),
});

export const openRoundResponseSchema = z.object({
  round: z.number().int().min(1),
  complete: z.boolean(),
  categories: z.array(z.string()).length(CATEGORIES.length),
  samples: z.array(
    z.object({
      sample_id: z.number().int(),
      movie: z.record(z.string(), z.unknown()),
      submitted: z.boolean(),
    }),
  ),
  feedback_rounds: z.array(z.number().int()),
});

export const submitResponseSchema = z.object({
  accepted: z.number().int().nonnegative(),
  round: z.number().int(),
  totals: z.record(z.string(), z.number()),
});

export const sessionStatusSchema = z.object({
  session_id: z.string(),
  round: z.number().int(),
  complete: z.boolean(),
  open_samples: z.array(z.number().int()),
  labeled: z.number().int(),
  total_samples: z.number().int(),
  pending_experts: z.array(z.string()),
  closed_rounds: z.array(z.number().int()),
});

export const roundResultEntrySchema = z.object({
  sample_id: z.number().int(),
  mean: z.number(),
  sigma: z.number().nonnegative(),
  converged: z.boolean(),
  n_scores: z.number().int(),
});

export const closeRoundResponseSchema = z.object({
  round: z.number().int(),
  results: z.array(roundResultEntrySchema),
  open_samples: z.array(z.number().int()),
  complete: z.boolean(),
});

export const roundHistoryResponseSchema = z.object({
  rounds: z.array(
    z.object({
      round: z.number().int(),
      results: z.array(roundResultEntrySchema),
    }),
  ),
});

export const createSessionResponseSchema = z.object({
  session_id: z.string(),
  round: z.number().int(),
  expert_tokens: z.record(z.string(), z.string()),
});
