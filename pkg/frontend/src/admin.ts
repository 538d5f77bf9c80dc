// Admin dashboard view model: convergence progress, per-sample spread
// trajectories as text sparklines, the delinquent-expert list, and the
// close/export affordances.

import type { RoundHistoryResponse, SessionStatus } from "./types";

const SPARK_LEVELS = "▁▂▃▄▅▆▇█";

/** Text sparkline of a value series, scaled to the series' own max. */
export function sparkline(values: number[]): string {
  if (values.length === 0) return "";
  const top = Math.max(...values, 1e-9);
  return values
    .map((v) => SPARK_LEVELS[Math.min(7, Math.floor((v / top) * 7.999))])
    .join("");
}

export interface RoundSummary {
  round: number;
  open: number;
  converged: number;
  meanSigma: number;
}

export interface SampleTrajectory {
  sampleId: number;
  sigmas: number[];
  spark: string;
  converged: boolean;
}

export interface DashboardModel {
  progressLine: string;
  round: number;
  complete: boolean;
  perRound: RoundSummary[];
  trajectories: SampleTrajectory[];
  pendingExperts: string[];
  canCloseRound: boolean;
  canExport: boolean;
}

export function buildDashboard(
  status: SessionStatus,
  history: RoundHistoryResponse,
): DashboardModel {
  const perRound: RoundSummary[] = history.rounds.map((entry) => ({
    round: entry.round,
    open: entry.results.length,
    converged: entry.results.filter((r) => r.converged).length,
    meanSigma:
      entry.results.reduce((s, r) => s + r.sigma, 0) /
      Math.max(entry.results.length, 1),
  }));

  const bySample = new Map<number, { sigmas: number[]; converged: boolean }>();
  for (const entry of history.rounds) {
    for (const r of entry.results) {
      const t = bySample.get(r.sample_id) ?? { sigmas: [], converged: false };
      t.sigmas.push(r.sigma);
      t.converged = t.converged || r.converged;
      bySample.set(r.sample_id, t);
    }
  }
  const trajectories: SampleTrajectory[] = [...bySample.entries()]
    .sort(([a], [b]) => a - b)
    .map(([sampleId, t]) => ({
      sampleId,
      sigmas: t.sigmas,
      spark: sparkline(t.sigmas),
      converged: t.converged,
    }));

  return {
    progressLine: `converged ${status.labeled} / ${status.total_samples}`,
    round: status.round,
    complete: status.complete,
    perRound,
    trajectories,
    pendingExperts: status.pending_experts,
    canCloseRound: !status.complete && status.pending_experts.length === 0,
    canExport: status.complete,
  };
}

/** Render a 409 close-round rejection into the dashboard's warning line. */
export function describeCloseRejection(detail: string): string {
  return `round not ready to close: ${detail}`;
}
