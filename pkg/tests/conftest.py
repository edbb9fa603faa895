"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's vectorized code paths: word
probabilities are summed over explicit state paths, mutual informations come
from full joint tables, and rank correlations are computed from scratch.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest


def oracle_word_probability(machine, word) -> float:
    """Path-sum word probability: sum over all state sequences."""
    n = machine.n_states
    total = 0.0
    for path in itertools.product(range(n), repeat=len(word) + 1):
        value = float(machine.stationary[path[0]])
        for t, symbol in enumerate(word):
            value *= float(machine.matrices[symbol][path[t], path[t + 1]])
        total += value
    return total


def oracle_conditional_word_probability(machine, state, word) -> float:
    """Path-sum conditional word probability from a fixed start state."""
    n = machine.n_states
    total = 0.0
    for path in itertools.product(range(n), repeat=len(word)):
        value = 1.0
        prev = state
        for t, symbol in enumerate(word):
            value *= float(machine.matrices[symbol][prev, path[t]])
            prev = path[t]
        total += value
    return total


def all_words(alphabet, length):
    return ["".join(w) for w in itertools.product(alphabet, repeat=length)]


def oracle_half_excess(machine, length) -> float:
    """-log2 sum_w (sum_k pi_k sqrt(P(w|k)))^2 by explicit enumeration."""
    total = 0.0
    for word in all_words(machine.alphabet, length):
        inner = sum(
            float(machine.stationary[k])
            * np.sqrt(max(oracle_conditional_word_probability(machine, k, word), 0.0))
            for k in range(machine.n_states)
        )
        total += inner**2
    return -float(np.log2(total))


def oracle_state_overlap(machine, j, k, length) -> float:
    """sum_w sqrt(P(w|j) P(w|k)) by explicit enumeration."""
    total = 0.0
    for word in all_words(machine.alphabet, length):
        pj = max(oracle_conditional_word_probability(machine, j, word), 0.0)
        pk = max(oracle_conditional_word_probability(machine, k, word), 0.0)
        total += np.sqrt(pj * pk)
    return total


def oracle_mutual_information(joint) -> float:
    """Shannon mutual information in bits from a full joint table."""
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    total = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            if joint[i, j] > 0:
                total += joint[i, j] * np.log2(joint[i, j] / (px[i] * py[j]))
    return float(total)


def spearman(xs, ys) -> float:
    """Spearman rank correlation (no tie handling; inputs must be distinct)."""

    def ranks(values):
        order = np.argsort(np.asarray(values))
        r = np.empty(len(values))
        r[order] = np.arange(len(values))
        return r

    rx, ry = ranks(xs), ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.sum(rx * ry) / np.sqrt(np.sum(rx**2) * np.sum(ry**2)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
