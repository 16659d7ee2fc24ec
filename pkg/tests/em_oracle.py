"""Brute-force EM oracle for desk-scale instances.

Pure-Python reference that evaluates the posterior/update rules with naive
probability products (no log space, no numpy) so the production
implementation can be checked against an independent arithmetic path.
Only intended for tiny matrices where products cannot underflow.
"""

import math


def _clamp(x, floor):
    return min(max(x, floor), 1.0 - floor)


def oracle_majority_vote(entries, coverage):
    m = len(entries)
    n = len(entries[0]) if m else 0
    votes = []
    for j in range(n):
        present = sum(1 for i in range(m) if coverage[i][j])
        ones = sum(1 for i in range(m) if coverage[i][j] and entries[i][j] == 1)
        votes.append(1.0 if ones > present / 2.0 else 0.0)
    return votes


def oracle_iteration(entries, coverage, sensitivity, specificity, prevalence, floor):
    """One EM pass: returns (phi, mu, eta, q, new_p, new_sens, new_spec)."""
    m = len(entries)
    n = len(entries[0])
    mu, eta, phi = [], [], []
    for j in range(n):
        mu_j, eta_j = 1.0, 1.0
        for i in range(m):
            if not coverage[i][j]:
                continue
            if entries[i][j] == 1:
                mu_j *= sensitivity[i]
                eta_j *= 1.0 - specificity[i]
            else:
                mu_j *= 1.0 - sensitivity[i]
                eta_j *= specificity[i]
        mu.append(mu_j)
        eta.append(eta_j)
        num = prevalence * mu_j
        den = num + (1.0 - prevalence) * eta_j
        phi.append(num / den)

    q = 0.0
    for j in range(n):
        if phi[j] > 0.0:
            q += phi[j] * math.log(prevalence * mu[j])
        if phi[j] < 1.0:
            q += (1.0 - phi[j]) * math.log((1.0 - prevalence) * eta[j])

    new_p = _clamp(sum(phi) / n, floor)
    new_sens, new_spec = [], []
    for i in range(m):
        pos_den = sum(phi[j] for j in range(n) if coverage[i][j])
        pos_num = sum(phi[j] for j in range(n) if coverage[i][j] and entries[i][j] == 1)
        neg_den = sum(1.0 - phi[j] for j in range(n) if coverage[i][j])
        neg_num = sum(
            1.0 - phi[j] for j in range(n) if coverage[i][j] and entries[i][j] == 0
        )
        sens_i = sensitivity[i] if pos_den == 0.0 else pos_num / pos_den
        spec_i = specificity[i] if neg_den == 0.0 else neg_num / neg_den
        new_sens.append(_clamp(sens_i, floor))
        new_spec.append(_clamp(spec_i, floor))
    return phi, mu, eta, q, new_p, new_sens, new_spec


def oracle_run(
    entries,
    coverage,
    epsilon=0.000001,
    max_iterations=500,
    sensitivity_init=0.999999,
    specificity_init=0.999999,
    floor=1e-9,
):
    """Full EM history: list of per-iteration (phi, p, sens, spec, q).

    The recorded p/sens/spec are the values after that iteration's update;
    phi and q come from the same iteration's posterior pass.
    """
    m = len(entries)
    n = len(entries[0])
    votes = oracle_majority_vote(entries, coverage)
    prevalence = _clamp(sum(votes) / n, floor)
    sensitivity = [sensitivity_init] * m
    specificity = [specificity_init] * m

    history = []
    q_prev = None
    converged = False
    for _ in range(max_iterations):
        phi, _mu, _eta, q, prevalence, sensitivity, specificity = oracle_iteration(
            entries, coverage, sensitivity, specificity, prevalence, floor
        )
        history.append(
            {
                "phi": phi,
                "p": prevalence,
                "sensitivity": list(sensitivity),
                "specificity": list(specificity),
                "q": q,
            }
        )
        if q_prev is not None:
            if q_prev == 0.0:
                if abs(q) < epsilon:
                    converged = True
                    break
            elif abs(q - q_prev) / abs(q_prev) < epsilon:
                converged = True
                break
        q_prev = q
    return history, converged
