// Contract guarantee: any payload the scoring form can emit validates against
// the shipped /v1 endpoint schema. Client-side checks duplicate the server's
// rules; they never loosen them.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";

import { submitRequestSchema } from "../src/schemas";
import { RoundState } from "../src/scoring";
import type { OpenRoundResponse } from "../src/types";
import { CATEGORIES } from "../src/types";

const here = dirname(fileURLToPath(import.meta.url));
const openapi = JSON.parse(
  readFileSync(join(here, "..", "..", "docs", "openapi.json"), "utf-8"),
);

type Schema = Record<string, any>;

function resolve(schema: Schema): Schema {
  if (schema.$ref) {
    const name = schema.$ref.split("/").at(-1)!;
    return resolve(openapi.components.schemas[name]);
  }
  return schema;
}

/** Minimal structural validator for the subset of JSON schema the API uses. */
function conforms(value: unknown, schema: Schema, path = "$"): string[] {
  const s = resolve(schema);
  if (s.anyOf) {
    const branches = s.anyOf.map((b: Schema) => conforms(value, b, path));
    return branches.some((errs: string[]) => errs.length === 0)
      ? []
      : [`${path}: no anyOf branch matched`];
  }
  const errors: string[] = [];
  switch (s.type) {
    case "object": {
      if (typeof value !== "object" || value === null || Array.isArray(value)) {
        return [`${path}: expected object`];
      }
      const obj = value as Record<string, unknown>;
      for (const key of s.required ?? []) {
        if (!(key in obj)) errors.push(`${path}.${key}: required`);
      }
      for (const [key, sub] of Object.entries(obj)) {
        const prop = s.properties?.[key];
        if (prop) {
          errors.push(...conforms(sub, prop, `${path}.${key}`));
        } else if (s.additionalProperties && typeof s.additionalProperties === "object") {
          errors.push(...conforms(sub, s.additionalProperties, `${path}.${key}`));
        }
      }
      return errors;
    }
    case "array": {
      if (!Array.isArray(value)) return [`${path}: expected array`];
      value.forEach((item, i) =>
        errors.push(...conforms(item, s.items, `${path}[${i}]`)),
      );
      if (s.minItems !== undefined && value.length < s.minItems) {
        errors.push(`${path}: fewer than ${s.minItems} items`);
      }
      return errors;
    }
    case "integer":
      return Number.isInteger(value) ? [] : [`${path}: expected integer`];
    case "number":
      return typeof value === "number" ? [] : [`${path}: expected number`];
    case "string":
      return typeof value === "string" ? [] : [`${path}: expected string`];
    case "boolean":
      return typeof value === "boolean" ? [] : [`${path}: expected boolean`];
    default:
      return [];
  }
}

function openRound(ids: number[], round = 1): OpenRoundResponse {
  return {
    round,
    complete: false,
    categories: [...CATEGORIES],
    samples: ids.map((sample_id) => ({ sample_id, movie: {}, submitted: false })),
    feedback_rounds: [],
  };
}

// deterministic pseudo-random ints for reproducible form fills
function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (1103515245 * state + 12345) % 2 ** 31;
    return state / 2 ** 31;
  };
}

describe("shipped endpoint documentation", () => {
  it("covers every endpoint the client calls", () => {
    const paths = openapi.paths;
    expect(paths["/v1/sessions"].post).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/open"].get).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/scores"].put).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/feedback/{round_index}"].get).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/status"].get).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/rounds"].get).toBeDefined();
    expect(
      paths["/v1/sessions/{session_id}/rounds/{round_index}/close"].post,
    ).toBeDefined();
    expect(paths["/v1/sessions/{session_id}/labels"].get).toBeDefined();
  });
});

describe("form payloads validate against the endpoint schema", () => {
  const submitSchema =
    openapi.paths["/v1/sessions/{session_id}/scores"].put.requestBody.content[
      "application/json"
    ].schema;

  it("accepts 60 random fully-scored forms", () => {
    const rand = lcg(2024);
    for (let trial = 0; trial < 60; trial++) {
      const nMovies = 1 + Math.floor(rand() * 8);
      const ids = Array.from({ length: nMovies }, (_, i) => i + 1);
      const state = new RoundState(openRound(ids, 1 + Math.floor(rand() * 5)));
      for (const id of ids) {
        for (const cat of CATEGORIES) {
          const ok = state.setScore(id, cat, Math.floor(rand() * 6));
          expect(ok.ok).toBe(true);
        }
      }
      const payload = state.buildSubmitPayload();
      expect(submitRequestSchema.safeParse(payload).success).toBe(true);
      expect(conforms(payload, submitSchema)).toEqual([]);
    }
  });

  it("the form cannot emit payloads the server would reject", () => {
    const state = new RoundState(openRound([1, 2]));
    // every illegal input is refused at the card level
    expect(state.setScore(1, "toys", 7).ok).toBe(false);
    expect(state.setScore(1, "toys", -2).ok).toBe(false);
    expect(state.setScore(1, "toys", 3.3).ok).toBe(false);
    // and incomplete coverage cannot reach the wire
    state.setScore(1, "toys", 3);
    expect(() => state.buildSubmitPayload()).toThrow();
  });

  it("zod mirror matches the server bounds exactly", () => {
    const good = {
      round: 1,
      sheets: [{
        sample_id: 1,
        scores: { toys: 5, stationery: 0, daily_use: 4,
                  clothes_accessories: 4, luggage_bags: 3 },
      }],
    };
    expect(submitRequestSchema.safeParse(good).success).toBe(true);
    const tooHigh = structuredClone(good);
    tooHigh.sheets[0].scores.toys = 6;
    expect(submitRequestSchema.safeParse(tooHigh).success).toBe(false);
    const fractional = structuredClone(good);
    fractional.sheets[0].scores.toys = 2.5;
    expect(submitRequestSchema.safeParse(fractional).success).toBe(false);
    const missingCategory = structuredClone(good);
    delete (missingCategory.sheets[0].scores as Record<string, number>).toys;
    expect(submitRequestSchema.safeParse(missingCategory).success).toBe(false);
  });
});
