"""Factories for the stochastic processes studied in this package.

Each factory returns a validated :class:`~quasihmm.machine.Machine`.  The
Perturbed Coin, Golden Mean, and Even processes have two-state models; the
Simple Nonunifilar Source (SNS) renewal process has a two-state generative
model and a countable predictive model that is truncated here at a
configurable tail mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameter, TruncationTooCoarse
from .machine import Machine, make_machine

#: default bound on the surviving probability beyond the truncated state set
DEFAULT_TRUNCATION_EPS = 1e-12


def _check_open_unit(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DegenerateParameter(f"p must lie strictly between 0 and 1, got {p}")
    return p


def _check_not_half(p: float) -> float:
    if p == 0.5:
        raise DegenerateParameter(
            "p = 1/2 collapses the process to an unbiased coin; "
            "use unbiased_coin() for the single-state model"
        )
    return p


def unbiased_coin() -> Machine:
    """Single-state IID coin: both symbols emitted with probability 1/2."""
    half = [[0.5]]
    return make_machine(("0", "1"), ("s0",), {"0": half, "1": half})


def perturbed_coin_epsilon(p: float) -> Machine:
    """Two-state predictive model of the Perturbed Coin process.

    State ``s0`` re-emits 0 with probability 1-p and defects to ``s1`` on 1
    with probability p; ``s1`` mirrors it.  Undefined at p = 1/2 where the
    process degenerates to an IID coin.
    """
    p = _check_not_half(_check_open_unit(p))
    t0 = [[1 - p, 0.0], [p, 0.0]]
    t1 = [[0.0, p], [0.0, 1 - p]]
    return make_machine(("0", "1"), ("s0", "s1"), {"0": t0, "1": t1}, stationary=[0.5, 0.5])


def perturbed_coin_rjmc(p: float) -> Machine:
    """Two-state generative model of the Perturbed Coin process.

    One model per parameter regime (p below or above 1/2); both generate the
    same process as :func:`perturbed_coin_epsilon` with a more concentrated
    stationary vector.
    """
    p = _check_not_half(_check_open_unit(p))
    if p < 0.5:
        t0 = [[0.0, 0.0], [0.0, 1 - p]]
        t1 = [
            [(1 - 2 * p) / (1 - p), p / (1 - p)],
            [p * (1 - 2 * p) / (1 - p), p * p / (1 - p)],
        ]
        pi = [(1 - 2 * p) / (2 - 2 * p), 1 / (2 - 2 * p)]
    else:
        t0 = [[1 - p, 0.0], [1.0, 0.0]]
        t1 = [[1 - p, 2 * p - 1], [0.0, 0.0]]
        pi = [1 / (2 * p), (2 * p - 1) / (2 * p)]
    return make_machine(("0", "1"), ("A", "B"), {"0": t0, "1": t1}, stationary=pi)


def golden_mean_epsilon(p: float) -> Machine:
    """Two-state predictive model of the Golden Mean process (no "11" words).

    ``s0`` self-loops on 0 with probability p and emits 1 into ``s1`` with
    probability 1-p; ``s1`` always emits 0 back to ``s0``.
    """
    p = _check_open_unit(p)
    t0 = [[p, 0.0], [1.0, 0.0]]
    t1 = [[0.0, 1 - p], [0.0, 0.0]]
    pi = [1 / (2 - p), (1 - p) / (2 - p)]
    return make_machine(("0", "1"), ("s0", "s1"), {"0": t0, "1": t1}, stationary=pi)


def even_process_epsilon() -> Machine:
    """Two-state predictive model of the Even process (1-blocks have even
    length), pinned to the standard symmetric parameterization 1/2."""
    t0 = [[0.5, 0.0], [0.0, 0.0]]
    t1 = [[0.0, 0.5], [1.0, 0.0]]
    return make_machine(("0", "1"), ("s0", "s1"), {"0": t0, "1": t1}, stationary=[2 / 3, 1 / 3])


# --- SNS renewal process -----------------------------------------------------


def sns_waiting_time(n, p: float):
    """Probability of exactly ``n`` zeros between consecutive ones."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = n * p ** (n - 1) * (1 - p) ** 2
    return np.where(n >= 1, vals, 0.0)


def sns_surviving(n, p: float):
    """Probability of at least ``n`` zeros between consecutive ones."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = p ** (n - 1) * (n * (1 - p) + p)
    return np.where(n >= 1, vals, 1.0)


def sns_default_truncation(p: float, eps: float = DEFAULT_TRUNCATION_EPS) -> int:
    """Smallest N whose surviving probability beyond N+1 drops below ``eps``."""
    p = _check_open_unit(p)
    # Phi(n) ~ n(1-p)p^(n-1) decays geometrically; walk out from a log estimate.
    n = max(2, int(math.log(eps) / math.log(p)) // 2)
    while sns_surviving(n + 1, p) >= eps:
        n += 1
    while n > 2 and sns_surviving(n, p) < eps:
        n -= 1
    return n


@dataclass(frozen=True)
class SnsRenewalData:
    """Waiting-time data of the SNS renewal process at parameter ``p``,
    truncated after ``truncation`` zeros."""

    p: float
    truncation: int
    mean_firing_rate: float
    tail_mass: float

    def waiting_time(self, n):
        return sns_waiting_time(n, self.p)

    def surviving_prob(self, n):
        return sns_surviving(n, self.p)

    def stationary_weights(self) -> np.ndarray:
        """Unnormalized predictive-state weights ``mu * Phi(n)``, n = 0..N."""
        n = np.arange(self.truncation + 1)
        return self.mean_firing_rate * sns_surviving(n, self.p)


def sns_renewal_data(
    p: float,
    truncation: int | None = None,
    eps: float = DEFAULT_TRUNCATION_EPS,
    allow_coarse: bool = False,
) -> SnsRenewalData:
    """Waiting-time distribution, survival function, and firing rate.

    The mean firing rate is summed numerically from the survival series (the
    geometric tail is cut when terms stop contributing at double precision),
    so closed-form expectations stay available as independent cross-checks.
    An explicit ``truncation`` that leaves more than ``eps`` tail mass is
    rejected unless ``allow_coarse`` is set.
    """
    p = _check_open_unit(p)
    n = truncation if truncation is not None else sns_default_truncation(p, eps)
    if n < 2:
        raise TruncationTooCoarse("need at least states 0..2")
    if truncation is not None and not allow_coarse and sns_surviving(n + 1, p) > eps:
        raise TruncationTooCoarse(
            f"tail mass {float(sns_surviving(n + 1, p)):.3e} exceeds {eps:g}; "
            "pass allow_coarse=True to override"
        )

    total = 1.0  # Phi(0)
    k = 1
    while True:
        term = float(sns_surviving(k, p))
        total += term
        if term < total * 1e-18:
            break
        k += 1
    return SnsRenewalData(
        p=p,
        truncation=n,
        mean_firing_rate=1.0 / total,
        tail_mass=float(sns_surviving(n + 1, p)),
    )


def sns_g_machine(p: float) -> Machine:
    """Two-state generative model of the SNS process.

    ``A`` emits 0 and either stays (p) or moves to ``B`` (1-p); ``B`` emits 0
    and stays (p) or emits 1 back to ``A`` (1-p).  Two 0-edges leave ``A``,
    so the model is non-unifilar; its stationary vector is uniform for all p.
    """
    p = _check_open_unit(p)
    t0 = [[p, 1 - p], [0.0, p]]
    t1 = [[0.0, 0.0], [1 - p, 0.0]]
    return make_machine(("0", "1"), ("A", "B"), {"0": t0, "1": t1}, stationary=[0.5, 0.5])


def sns_epsilon_truncated(
    p: float,
    truncation: int | None = None,
    eps: float = DEFAULT_TRUNCATION_EPS,
    allow_coarse: bool = False,
) -> Machine:
    """Truncated predictive model of the SNS process with states 0..N.

    State n (n zeros seen since the last 1) advances on 0 with probability
    Phi(n+1)/Phi(n) and resets on 1 with phi(n)/Phi(n); state 0 advances
    deterministically.  The final state closes onto itself on 0 with the
    residual mass so rows stay exactly stochastic; word errors are then
    bounded by the tail mass Phi(N+1).
    """
    p = _check_open_unit(p)
    n_max = truncation if truncation is not None else sns_default_truncation(p, eps)
    if n_max < 2:
        raise TruncationTooCoarse("need at least states 0..2")
    tail = float(sns_surviving(n_max + 1, p))
    if truncation is not None and tail > eps and not allow_coarse:
        raise TruncationTooCoarse(
            f"tail mass {tail:.3e} exceeds {eps:g}; pass allow_coarse=True to override"
        )

    size = n_max + 1
    idx = np.arange(size)
    phi = sns_waiting_time(idx, p)
    big_phi = sns_surviving(idx, p)
    t0 = np.zeros((size, size))
    t1 = np.zeros((size, size))
    for n in range(n_max):
        t0[n, n + 1] = sns_surviving(n + 1, p) / big_phi[n]
        t1[n, 0] = phi[n] / big_phi[n]
    t0[n_max, n_max] = sns_surviving(n_max + 1, p) / big_phi[n_max]
    t1[n_max, 0] = phi[n_max] / big_phi[n_max]

    states = tuple(f"s{n}" for n in range(size))
    machine = make_machine(("0", "1"), states, {"0": t0, "1": t1})
    return machine


def sns_past_future_overlap(
    p: float, truncation: int | None = None, eps: float = DEFAULT_TRUNCATION_EPS
) -> tuple[float, float]:
    """Squared Bhattacharyya overlap between the predictive-state distribution
    and the reverse-state conditionals of the SNS process:

        sum_m ( sum_n mu * sqrt(phi(m+n) * Phi(n)) )^2

    This is the quantity whose negative log is the process's half-order excess
    entropy.  Both sums are truncated at the same index; the second return
    value estimates the truncation residual by comparison with a slightly
    shallower truncation.
    """
    p = _check_open_unit(p)
    data = sns_renewal_data(p, truncation, eps)

    def overlap(n_cut: int) -> float:
        idx = np.arange(n_cut + 1)
        mu = data.mean_firing_rate
        root_phi = np.sqrt(sns_waiting_time(idx[:, None] + idx[None, :], p))
        root_sur = np.sqrt(sns_surviving(idx, p))
        inner = mu * (root_phi * root_sur[None, :]).sum(axis=1)
        return float(np.sum(inner**2))

    value = overlap(data.truncation)
    shallower = max(2, data.truncation - max(2, data.truncation // 10))
    residual = abs(value - overlap(shallower))
    return value, residual
