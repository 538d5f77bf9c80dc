// Expert-screen view models: one scoring card per movie, the round state that
// gates submission, and draft wiring. The total is always computed from the
// five category inputs, never entered directly, and client-side validation
// mirrors the server's rules (integers 0..5, full coverage of open movies)
// without replacing them.

import { DraftStore } from "./drafts";
import { submitRequestSchema } from "./schemas";
import type {
  Category,
  FeedbackResponse,
  FeedbackSample,
  OpenRoundResponse,
  SubmitRequest,
} from "./types";
import { CATEGORIES } from "./types";

export interface ScoreValidation {
  ok: boolean;
  error?: string;
}

export class ScoringCard {
  readonly sampleId: number;
  readonly movie: Record<string, unknown>;
  readonly feedback: FeedbackSample | null;
  /** Converged movies render read-only with their final label badge. */
  readonly converged: boolean;
  readonly finalLabel: number | null;
  private scores: Partial<Record<Category, number>> = {};

  constructor(
    sampleId: number,
    movie: Record<string, unknown>,
    feedback: FeedbackSample | null = null,
    converged = false,
    finalLabel: number | null = null,
  ) {
    this.sampleId = sampleId;
    this.movie = movie;
    this.feedback = feedback;
    this.converged = converged;
    this.finalLabel = finalLabel;
  }

  setScore(category: Category, value: number): ScoreValidation {
    if (this.converged) {
      return { ok: false, error: "movie already converged; card is read-only" };
    }
    if (!Number.isInteger(value)) {
      return { ok: false, error: `${category}: score must be a whole number` };
    }
    if (value < 0 || value > 5) {
      return { ok: false, error: `${category}: score must lie in 0..5` };
    }
    this.scores[category] = value;
    return { ok: true };
  }

  getScore(category: Category): number | undefined {
    return this.scores[category];
  }

  /** Sum of the five category inputs; missing inputs count as nothing. */
  get total(): number {
    return CATEGORIES.reduce((sum, c) => sum + (this.scores[c] ?? 0), 0);
  }

  get complete(): boolean {
    return CATEGORIES.every((c) => this.scores[c] !== undefined);
  }

  get missingCategories(): Category[] {
    return CATEGORIES.filter((c) => this.scores[c] === undefined);
  }

  snapshot(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const c of CATEGORIES) {
      const v = this.scores[c];
      if (v !== undefined) out[c] = v;
    }
    return out;
  }

  restore(saved: Record<string, number> | undefined): void {
    if (!saved) return;
    for (const c of CATEGORIES) {
      const v = saved[c];
      if (v !== undefined) this.setScore(c, v);
    }
  }
}

export class RoundState {
  readonly round: number;
  readonly cards: ScoringCard[];
  readonly convergedCards: ScoringCard[];
  private readonly drafts: DraftStore | null;

  constructor(
    open: OpenRoundResponse,
    feedback: FeedbackResponse | null = null,
    drafts: DraftStore | null = null,
  ) {
    this.round = open.round;
    this.drafts = drafts;
    const feedbackBySample = new Map<number, FeedbackSample>();
    for (const entry of feedback?.samples ?? []) {
      feedbackBySample.set(entry.sample_id, entry);
    }
    this.cards = open.samples.map(
      (s) =>
        new ScoringCard(s.sample_id, s.movie, feedbackBySample.get(s.sample_id) ?? null),
    );
    // movies that converged in the fed-back round render as read-only cards
    this.convergedCards = (feedback?.samples ?? [])
      .filter((s) => s.converged)
      .map(
        (s) =>
          new ScoringCard(s.sample_id, {}, s, true, Math.round(s.mean)),
      );
    if (drafts) {
      const saved = drafts.load(this.round);
      for (const card of this.cards) card.restore(saved[card.sampleId]);
    }
  }

  card(sampleId: number): ScoringCard {
    const card = this.cards.find((c) => c.sampleId === sampleId);
    if (!card) throw new Error(`no open card for sample ${sampleId}`);
    return card;
  }

  setScore(sampleId: number, category: Category, value: number): ScoreValidation {
    const result = this.card(sampleId).setScore(category, value);
    if (result.ok) this.saveDraft();
    return result;
  }

  /** Persist current inputs; called on every edit and safe to call any time. */
  saveDraft(): void {
    if (!this.drafts) return;
    const snapshot: Record<number, Record<string, number>> = {};
    for (const card of this.cards) snapshot[card.sampleId] = card.snapshot();
    this.drafts.save(this.round, snapshot);
  }

  clearDraft(): void {
    this.drafts?.clear(this.round);
  }

  get missingCount(): number {
    return this.cards.filter((c) => !c.complete).length;
  }

  /** Submission stays blocked until every open movie is fully scored. */
  get canSubmit(): boolean {
    return this.cards.length > 0 && this.missingCount === 0;
  }

  buildSubmitPayload(): SubmitRequest {
    if (!this.canSubmit) {
      throw new Error(`${this.missingCount} movie(s) still unscored`);
    }
    const payload: SubmitRequest = {
      round: this.round,
      sheets: this.cards.map((card) => ({
        sample_id: card.sampleId,
        scores: card.snapshot(),
      })),
    };
    // client-side mirror of the server's validation; never a replacement
    return submitRequestSchema.parse(payload);
  }
}

/** Feedback block text for one card; contains aggregates only, no identities. */
export function describeFeedback(entry: FeedbackSample): string {
  const hist = Object.entries(entry.histogram)
    .map(([total, count]) => `${total}:${count}`)
    .join(" ");
  const state = entry.converged ? "converged" : "open";
  return (
    `panel mean ${entry.mean.toFixed(2)}, spread ${entry.sigma.toFixed(2)}, ` +
    `totals [${hist}] (${entry.n_scores} experts, ${state})`
  );
}
