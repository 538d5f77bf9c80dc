// Thin DOM bindings over the view models. All decisions (validation, gating,
// badge state) live in scoring.ts / admin.ts; this file only draws them.

import type { DashboardModel } from "./admin";
import { describeFeedback, RoundState, ScoringCard } from "./scoring";
import { CATEGORIES, CATEGORY_LABELS, type Category } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function movieSummary(movie: Record<string, unknown>): string {
  const film = (movie.film as string) ?? "(untitled)";
  const bits = ["year", "mpaa", "genres", "box_office"]
    .filter((k) => movie[k] !== undefined)
    .map((k) => `${k}: ${String(movie[k])}`);
  return bits.length ? `${film} — ${bits.join(", ")}` : film;
}

export function renderCard(
  card: ScoringCard,
  onEdit: (sampleId: number, category: Category, value: number) => void,
): HTMLElement {
  const box = el("div", card.converged ? "card card-converged" : "card");
  const head = el("div", "card-head", movieSummary(card.movie));
  box.appendChild(head);

  if (card.converged) {
    head.appendChild(el("span", "badge badge-converged",
      ` converged — final label ${card.finalLabel}`));
    return box; // read-only card
  }

  if (card.feedback) {
    box.appendChild(el("div", "feedback", describeFeedback(card.feedback)));
  }

  const row = el("div", "inputs");
  const totalBadge = el("span", "total", `total ${card.total}`);
  for (const category of CATEGORIES) {
    const label = el("label", "cat", CATEGORY_LABELS[category]);
    const input = el("input") as HTMLInputElement;
    input.type = "number";
    input.min = "0";
    input.max = "5";
    input.step = "1";
    const existing = card.getScore(category);
    if (existing !== undefined) input.value = String(existing);
    input.addEventListener("change", () => {
      const value = Number(input.value);
      onEdit(card.sampleId, category, value);
      totalBadge.textContent = `total ${card.total}`;
      input.setCustomValidity("");
      const check = card.getScore(category);
      if (check !== value) {
        input.setCustomValidity("score must be a whole number in 0..5");
        input.reportValidity();
      }
    });
    label.appendChild(input);
    row.appendChild(label);
  }
  row.appendChild(totalBadge); // computed, never editable
  box.appendChild(row);
  return box;
}

export function renderRound(
  state: RoundState,
  onSubmit: () => void,
): HTMLElement {
  const root = el("div", "round");
  root.appendChild(el("h2", undefined, `Round ${state.round}`));

  for (const card of state.convergedCards) {
    root.appendChild(renderCard(card, () => undefined));
  }
  for (const card of state.cards) {
    root.appendChild(
      renderCard(card, (sampleId, category, value) => {
        state.setScore(sampleId, category, value);
        refreshSubmit();
      }),
    );
  }

  const submit = el("button", "submit") as HTMLButtonElement;
  const refreshSubmit = () => {
    submit.disabled = !state.canSubmit;
    submit.textContent = state.canSubmit
      ? "Submit round"
      : `Submit blocked — ${state.missingCount} movie(s) unscored`;
  };
  refreshSubmit();
  submit.addEventListener("click", onSubmit);
  root.appendChild(submit);
  return root;
}

export function renderDashboard(
  model: DashboardModel,
  onClose: () => void,
  onExport: () => void,
): HTMLElement {
  const root = el("div", "dashboard");
  root.appendChild(el("h2", undefined, "Session progress"));
  root.appendChild(el("p", "progress", model.progressLine));

  const rounds = el("ul", "rounds");
  for (const r of model.perRound) {
    rounds.appendChild(el(
      "li", undefined,
      `round ${r.round}: ${r.converged}/${r.open} converged, ` +
      `mean spread ${r.meanSigma.toFixed(2)}`,
    ));
  }
  root.appendChild(rounds);

  const table = el("ul", "trajectories");
  for (const t of model.trajectories) {
    table.appendChild(el(
      "li", t.converged ? "done" : "open",
      `sample ${t.sampleId} ${t.spark} ${t.converged ? "✓" : ""}`,
    ));
  }
  root.appendChild(table);

  if (model.pendingExperts.length > 0) {
    root.appendChild(el(
      "p", "pending",
      `waiting on: ${model.pendingExperts.join(", ")}`,
    ));
  }

  const close = el("button", "close", "Close round") as HTMLButtonElement;
  close.disabled = !model.canCloseRound;
  close.addEventListener("click", onClose);
  root.appendChild(close);

  const exportBtn = el("button", "export", "Export labels CSV") as HTMLButtonElement;
  exportBtn.disabled = !model.canExport;
  exportBtn.addEventListener("click", onExport);
  root.appendChild(exportBtn);
  return root;
}

export function renderError(message: string): HTMLElement {
  return el("p", "error", message);
}

export function renderReauthPrompt(): HTMLElement {
  const box = el("div", "reauth");
  box.appendChild(el("p", undefined,
    "Your session token was rejected. Paste a fresh token to continue:"));
  const input = el("input") as HTMLInputElement;
  input.type = "password";
  box.appendChild(input);
  return box;
}
