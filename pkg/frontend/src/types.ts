// Payload shapes of the /v1 scoring API.

export const CATEGORIES = [
  "toys",
  "stationery",
  "daily_use",
  "clothes_accessories",
  "luggage_bags",
] as const;

export type Category = (typeof CATEGORIES)[number];

export const CATEGORY_LABELS: Record<Category, string> = {
  toys: "Toys",
  stationery: "Stationery",
  daily_use: "Daily use",
  clothes_accessories: "Clothes & Accessories",
  luggage_bags: "Luggage and bags",
};

export interface OpenSampleEntry {
  sample_id: number;
  movie: Record<string, unknown>;
  submitted: boolean;
}

export interface OpenRoundResponse {
  round: number;
  complete: boolean;
  categories: string[];
  samples: OpenSampleEntry[];
  feedback_rounds: number[];
}

export interface FeedbackSample {
  sample_id: number;
  mean: number;
  sigma: number;
  histogram: Record<string, number>;
  converged: boolean;
  n_scores: number;
}

export interface FeedbackResponse {
  round: number;
  samples: FeedbackSample[];
}

export interface SheetPayload {
  sample_id: number;
  scores: Record<string, number>;
}

export interface SubmitRequest {
  round: number;
  sheets: SheetPayload[];
}

export interface SubmitResponse {
  accepted: number;
  round: number;
  totals: Record<string, number>;
}

export interface RoundResultEntry {
  sample_id: number;
  mean: number;
  sigma: number;
  converged: boolean;
  n_scores: number;
}

export interface SessionStatus {
  session_id: string;
  round: number;
  complete: boolean;
  open_samples: number[];
  labeled: number;
  total_samples: number;
  pending_experts: string[];
  closed_rounds: number[];
}

export interface CloseRoundResponse {
  round: number;
  results: RoundResultEntry[];
  open_samples: number[];
  complete: boolean;
}

export interface RoundHistoryResponse {
  rounds: { round: number; results: RoundResultEntry[] }[];
}

export interface CreateSessionRequest {
  experts: string[];
  samples: number[];
  epsilon: number;
  max_rounds: number;
  movies?: Record<string, Record<string, unknown>>;
}

export interface CreateSessionResponse {
  session_id: string;
  round: number;
  expert_tokens: Record<string, string>;
}
