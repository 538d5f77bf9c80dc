#!/usr/bin/env python3
"""Watch a scoring panel converge round by round.

Each sample starts with real disagreement; every round the simulated experts
see the anonymized aggregates and drift toward the panel mean, and samples
whose total-score dispersion falls below epsilon leave the pool with their
label fixed.

Run:  python3 demos/delphi_rounds.py
"""

import numpy as np

from merchcast.delphi import SimulationProfile, open_session, simulate_experts

EXPERTS = 20
SAMPLES = 60
EPSILON = 2.0


def main():
    rng = np.random.default_rng(4)
    latents = {k: float(rng.integers(0, 26)) for k in range(SAMPLES)}
    session = open_session(
        [f"expert-{i:02d}" for i in range(EXPERTS)],
        list(range(SAMPLES)), epsilon=EPSILON, max_rounds=10,
    )
    simulate_experts(session, SimulationProfile(contraction=0.6, noise_sd=1.0),
                     seed=11, latents=latents)

    print(f"panel: {EXPERTS} experts, {SAMPLES} movies, epsilon {EPSILON}\n")
    for rnd in sorted(session.results):
        results = session.results[rnd]
        sigmas = [r.sigma for r in results]
        converged = sum(r.converged for r in results)
        print(f"round {rnd}: {len(results):>3} open, "
              f"sigma mean {np.mean(sigmas):.2f} max {np.max(sigmas):.2f}, "
              f"{converged} converged")

    print("\nrounds-to-convergence histogram:")
    rounds = session.rounds_to_convergence()
    for rnd in sorted(set(rounds.values())):
        count = sum(1 for v in rounds.values() if v == rnd)
        print(f"  round {rnd}: {'#' * count} ({count})")

    forced = sum(1 for _, (lab, f) in session.labels.items() if f)
    print(f"\nforced labels at the round cap: {forced}")
    drift = [abs(session.labels[k][0] - latents[k]) for k in latents]
    print(f"mean |consensus - latent| drift: {np.mean(drift):.2f}")


if __name__ == "__main__":
    main()
