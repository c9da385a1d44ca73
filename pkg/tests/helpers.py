"""Shared test helpers: closed-form grids and independent numeric oracles.

Everything here is deliberately written from the closed-form expressions or
brute-force definitions, never by calling the code paths under test.
"""

from __future__ import annotations

import itertools

import numpy as np


def random_unit_pair(rng: np.random.Generator) -> tuple[complex, complex]:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z = z / np.linalg.norm(z)
    return complex(z[0]), complex(z[1])


def branch_amplitudes(a, b, alpha, beta) -> tuple[complex, complex]:
    """The two interference amplitudes every scenario grid is built from."""
    yes_amp = a * np.conj(alpha) + b * np.conj(beta)
    no_amp = a * beta - b * alpha
    return complex(yes_amp), complex(no_amp)


def closed_form_joint(a, b, alpha, beta) -> dict[tuple[str, str], float]:
    yes_amp, no_amp = branch_amplitudes(a, b, alpha, beta)
    return {
        ("up", "yes"): abs(alpha) ** 2 * abs(yes_amp) ** 2,
        ("down", "yes"): abs(beta) ** 2 * abs(yes_amp) ** 2,
        ("up", "no"): abs(beta) ** 2 * abs(no_amp) ** 2,
        ("down", "no"): abs(alpha) ** 2 * abs(no_amp) ** 2,
    }


def closed_form_marginal_w(a, b, alpha, beta) -> dict[str, float]:
    yes_amp, no_amp = branch_amplitudes(a, b, alpha, beta)
    return {"yes": abs(yes_amp) ** 2, "no": abs(no_amp) ** 2}


def closed_form_marginal_f(a, b, alpha, beta) -> dict[str, float]:
    yes_amp, no_amp = branch_amplitudes(a, b, alpha, beta)
    return {
        "up": abs(alpha) ** 2 * abs(yes_amp) ** 2 + abs(beta) ** 2 * abs(no_amp) ** 2,
        "down": abs(beta) ** 2 * abs(yes_amp) ** 2 + abs(alpha) ** 2 * abs(no_amp) ** 2,
    }


def closed_form_cond_w_given_f(a, b, alpha, beta) -> dict[tuple[str, str], float]:
    joint = closed_form_joint(a, b, alpha, beta)
    marg_f = closed_form_marginal_f(a, b, alpha, beta)
    return {(f, w): joint[f, w] / marg_f[f] for f, w in joint}


def closed_form_cond_f_given_w(a, b, alpha, beta) -> dict[tuple[str, str], float]:
    return {
        ("up", "yes"): abs(alpha) ** 2,
        ("down", "yes"): abs(beta) ** 2,
        ("up", "no"): abs(beta) ** 2,
        ("down", "no"): abs(alpha) ** 2,
    }


def expm_series(matrix: np.ndarray) -> np.ndarray:
    """Power-series matrix exponential summed to machine precision."""
    term = np.eye(matrix.shape[0], dtype=np.complex128)
    total = term.copy()
    for k in range(1, 200):
        term = term @ matrix / k
        total += term
        if np.max(np.abs(term)) < 1e-18:
            break
    return total


def all_assignments(schedule) -> list[dict[str, str]]:
    names = schedule.detector_labels
    label_sets = [det.kraus.outcome_labels for _, det in schedule.events]
    return [dict(zip(names, combo)) for combo in itertools.product(*label_sets)]
