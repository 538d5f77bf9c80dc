// Browser entry point. Query parameters select the view:
//   ?session=<id>&token=<expert token>            expert scoring screen
//   ?session=<id>&token=<admin token>&admin=1     admin dashboard
// The API origin defaults to the page origin; override with &api=<url>.

import { buildDashboard, describeCloseRejection } from "./admin";
import { AdminApi, ApiError, ExpertApi } from "./api";
import { renderDashboard, renderError, renderReauthPrompt, renderRound } from "./dom";
import { DraftStore } from "./drafts";
import { RoundState } from "./scoring";

function mount(node: HTMLElement): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  root.replaceChildren(node);
}

async function expertScreen(api: ExpertApi, drafts: DraftStore): Promise<void> {
  const open = await api.openSamples();
  if (open.complete) {
    mount(renderError("Session complete — nothing left to score. Thank you!"));
    return;
  }
  const lastClosed = open.feedback_rounds.at(-1);
  const feedback =
    lastClosed !== undefined ? await api.feedback(lastClosed) : null;
  const state = new RoundState(open, feedback, drafts);
  const view = renderRound(state, async () => {
    try {
      await api.submitScores(state.buildSubmitPayload());
      state.clearDraft();
      mount(renderError("Round submitted. Revisit after the round closes."));
    } catch (err) {
      if (err instanceof ApiError && err.needsReauth) {
        mount(renderReauthPrompt());
        return;
      }
      // network failure or conflict: the draft persists locally
      state.saveDraft();
      mount(renderError(`Submission failed (${String(err)}). ` +
        "Your scores are saved locally; retry when the connection returns."));
    }
  });
  mount(view);
}

async function adminScreen(api: AdminApi, sessionId: string): Promise<void> {
  const [status, history] = await Promise.all([
    api.status(sessionId),
    api.roundHistory(sessionId),
  ]);
  const model = buildDashboard(status, history);
  mount(renderDashboard(
    model,
    async () => {
      try {
        await api.closeRound(sessionId, status.round);
        await adminScreen(api, sessionId);
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          mount(renderError(describeCloseRejection(err.detail)));
        } else {
          throw err;
        }
      }
    },
    async () => {
      const csv = await api.exportLabels(sessionId);
      const blob = new Blob([csv], { type: "text/csv" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `labels-${sessionId}.csv`;
      link.click();
    },
  ));
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const token = params.get("token");
  const base = params.get("api") ?? window.location.origin;
  if (!sessionId || !token) {
    mount(renderError("Provide ?session=<id>&token=<token> in the URL."));
    return;
  }
  try {
    if (params.get("admin")) {
      await adminScreen(new AdminApi(base, token), sessionId);
    } else {
      await expertScreen(
        new ExpertApi(base, sessionId, token),
        new DraftStore(window.localStorage, sessionId),
      );
    }
  } catch (err) {
    if (err instanceof ApiError && err.needsReauth) {
      mount(renderReauthPrompt());
    } else {
      mount(renderError(String(err)));
    }
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => void boot());
}
