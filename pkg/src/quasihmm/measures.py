"""Scalar information measures, all in bits (base-2 logarithms).

Covers Renyi entropies of (quasi)probability vectors, the Sibson
alpha-mutual information, excess entropies of order 1 and 1/2 computed
through a machine's state variable, and the negativity bookkeeping used for
signed distributions (l1 norm and its logarithmic overhead, the "mana").

Order-2 entropy is the only Renyi order admitted for signed inputs: it is
real-valued, continuous, and Schur-concave there, while other orders are not
even real in general.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidAlpha,
    NegativeConditional,
    NegativeEntriesUnsupportedOrder,
    QuasiMachineUnsupported,
    UnsupportedProcess,
    ZeroBaseline,
    ZeroEntryWithQuasiOrder,
)
from .machine import ENUMERATION_CAP, Machine
from .processes import sns_past_future_overlap

#: tolerance for normalization / nonnegativity checks on distributions
DIST_TOL = 1e-9

#: default estimation horizon for machine excess entropies
DEFAULT_HORIZON = 12


@dataclass(frozen=True)
class MeasureReport:
    """One named scalar result with its parameters and, where the value is a
    horizon estimate, the change from the previous horizon."""

    name: str
    value: float
    parameters: dict = field(default_factory=dict)
    residual: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "parameters": dict(self.parameters),
            "residual": self.residual,
        }


def _as_quasi_distribution(q, tol: float) -> np.ndarray:
    v = np.asarray(q, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("distribution has non-finite entries")
    s = float(v.sum())
    if abs(s - 1.0) > tol:
        raise ValueError(f"distribution sums to {s:.12g}, expected 1 within {tol:g}")
    return v


def renyi_entropy(q, alpha: float, tol: float = DIST_TOL) -> float:
    """Renyi entropy of order ``alpha`` of a (quasi)probability vector.

    Proper distributions support any order >= 0 (order 0 counts the support,
    order 1 is the Shannon limit).  Signed vectors are admitted only at order
    2, where the collision entropy -log2(sum q_k^2) stays real; it requires
    every component nonzero and may itself be zero or negative.
    """
    v = _as_quasi_distribution(q, tol)
    if alpha < 0:
        raise InvalidAlpha(f"Renyi order must be nonnegative, got {alpha}")

    if np.min(v) < -tol:
        if alpha != 2:
            raise NegativeEntriesUnsupportedOrder(
                f"signed distributions support only order 2, got {alpha}"
            )
        if np.min(np.abs(v)) <= tol:
            raise ZeroEntryWithQuasiOrder(
                "collision entropy of a signed distribution needs nonzero components"
            )
        return -float(np.log2(np.sum(v * v)))

    v = np.clip(v, 0.0, None)
    if alpha == 0:
        return float(np.log2(np.count_nonzero(v > tol)))
    if alpha == 1:
        support = v[v > 0]
        return -float(np.sum(support * np.log2(support)))
    return float(np.log2(np.sum(v**alpha)) / (1.0 - alpha))


def shannon_entropy(q, tol: float = DIST_TOL) -> float:
    return renyi_entropy(q, 1.0, tol)


def statistical_complexity(m: Machine, alpha: float = 2.0) -> float:
    """Renyi-``alpha`` entropy of the machine's stationary distribution."""
    return renyi_entropy(m.stationary, alpha)


def negativity(q, tol: float = DIST_TOL) -> float:
    """l1 norm of a unit-sum vector; 1 exactly when it is nonnegative."""
    v = _as_quasi_distribution(q, tol)
    return float(np.sum(np.abs(v)))


def mana(q, tol: float = DIST_TOL) -> float:
    """Logarithmic negativity overhead: 2 log2 of the l1 norm.

    Splits the collision entropy of the rescaled absolute distribution as
    H2[|q|/||q||_1] = H2[q] + mana(q), so it measures the entropy cost of
    simulating the signed vector by sampling its absolute values.
    """
    return 2.0 * float(np.log2(negativity(q, tol)))


def memory_advantage(c_n2: float, c_mu2: float) -> float:
    """Relative memory advantage |c_n2 - c_mu2| / c_mu2."""
    if c_mu2 <= 0:
        raise ZeroBaseline(f"classical baseline must be positive, got {c_mu2}")
    return abs(c_n2 - c_mu2) / c_mu2


# --- Sibson alpha-mutual information -----------------------------------------


def alpha_mutual_information(px, py_given_x, alpha: float, tol: float = DIST_TOL) -> float:
    """Sibson mutual information of order ``alpha`` for the chain X -> Y:

        (alpha / (alpha - 1)) * log2 sum_y [ sum_x P(x) P(y|x)^alpha ]^(1/alpha)

    ``py_given_x`` has one row per x value.  Order 1 is the Shannon limit,
    computed directly from the joint.  Signed conditionals are rejected: the
    expression is complex-valued for them.
    """
    if alpha < 0:
        raise InvalidAlpha(f"order must be nonnegative, got {alpha}")
    p = _as_quasi_distribution(px, tol)
    if np.min(p) < -tol:
        raise NegativeConditional("input distribution must be nonnegative")
    p = np.clip(p, 0.0, None)

    cond = np.asarray(py_given_x, dtype=float)
    if cond.ndim != 2 or cond.shape[0] != p.size:
        raise ValueError(f"conditional must be ({p.size}, n_y), got {cond.shape}")
    if np.min(cond) < -tol:
        raise NegativeConditional("conditional rows must be nonnegative")
    row_sums = cond.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > max(tol, 1e-12 * cond.shape[1]):
        raise ValueError("conditional rows must sum to 1")
    cond = np.clip(cond, 0.0, None)

    if alpha == 0:
        return 0.0
    if alpha == 1:
        joint = p[:, None] * cond
        py = joint.sum(axis=0)
        mask = joint > 0
        ratio = joint[mask] / (np.outer(p, py)[mask])
        return float(np.sum(joint[mask] * np.log2(ratio)))

    inner = (p[:, None] * cond**alpha).sum(axis=0)
    total = float(np.sum(inner ** (1.0 / alpha)))
    return alpha / (alpha - 1.0) * float(np.log2(total))


# --- excess entropies through the state variable ------------------------------


def half_excess_from_futures(weights, futures) -> float:
    """-log2 sum_w ( sum_k w_k sqrt(P(w|k)) )^2 from explicit conditionals.

    ``futures[k, i]`` is the probability of word i given state k; the words
    must jointly be nonnegative even if the weights are signed, in which case
    the squared inner sums are still real.
    """
    w = np.asarray(weights, dtype=float)
    fut = np.clip(np.asarray(futures, dtype=float), 0.0, None)
    inner = w @ np.sqrt(fut)
    return -float(np.log2(np.sum(inner**2)))


def excess_entropy_half(
    m: Machine, horizon: int = DEFAULT_HORIZON, cap: int = ENUMERATION_CAP
) -> MeasureReport:
    """Half-order mutual information between the state and the next
    ``horizon`` symbols.

    Because machine states are sufficient statistics for the past, this
    equals the process's half-order past-future mutual information in the
    horizon limit.  Expanding the square turns the word sum into a quadratic
    form in the pairwise future fidelities, so unifilar machines evaluate it
    for any horizon without enumeration.  The residual is the change from
    horizon - 1; no monotonicity in the horizon is asserted.
    """
    if not m.classify().classical:
        raise QuasiMachineUnsupported(
            "half-order excess entropy is evaluated on a classical presentation; "
            "quasi machines inherit it from their source machine"
        )
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    pi = np.asarray(m.stationary)
    value = -float(np.log2(pi @ m.future_fidelity_matrix(horizon, cap) @ pi))
    prev = -float(np.log2(pi @ m.future_fidelity_matrix(horizon - 1, cap) @ pi))
    return MeasureReport(
        name="E_half",
        value=value,
        parameters={"horizon": horizon},
        residual=abs(value - prev),
    )


def excess_entropy_shannon(
    m: Machine, horizon: int = DEFAULT_HORIZON, cap: int = ENUMERATION_CAP
) -> MeasureReport:
    """Shannon mutual information between the state and the next ``horizon``
    symbols, by explicit word enumeration."""
    if not m.classify().classical:
        raise QuasiMachineUnsupported("Shannon excess entropy needs a classical machine")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")

    def estimate(length: int) -> float:
        _, fut = m.conditional_future_matrix(length, cap)
        fut = np.clip(fut, 0.0, None)
        pi = np.clip(np.asarray(m.stationary), 0.0, None)
        marginal = pi @ fut
        joint = pi[:, None] * fut
        rows, cols = np.nonzero(joint > 0)
        return float(np.sum(joint[rows, cols] * np.log2(fut[rows, cols] / marginal[cols])))

    value = estimate(horizon)
    prev = estimate(horizon - 1)
    return MeasureReport(
        name="E",
        value=value,
        parameters={"horizon": horizon},
        residual=abs(value - prev),
    )


# --- closed forms -------------------------------------------------------------


def perturbed_coin_excess_half(p: float) -> float:
    """1 - 2 log2(sqrt(p) + sqrt(1-p)), exact for the Perturbed Coin."""
    if not 0.0 < p < 1.0:
        raise UnsupportedProcess(f"p must lie in (0, 1), got {p}")
    return 1.0 - 2.0 * float(np.log2(np.sqrt(p) + np.sqrt(1.0 - p)))


def sns_excess_entropy_half(p: float, truncation: int | None = None) -> tuple[float, float]:
    """Half-order excess entropy of the SNS process with truncated series;
    returns (value, truncation residual in bits)."""
    overlap, overlap_residual = sns_past_future_overlap(p, truncation)
    value = -float(np.log2(overlap))
    residual = abs(overlap_residual / (overlap * np.log(2.0)))
    return value, residual


def excess_entropy_half_closed_form(
    process: str, p: float, truncation: int | None = None
) -> float:
    """Closed-form half-order excess entropy for the supported processes
    ("perturbed-coin" or "sns")."""
    if process == "perturbed-coin":
        return perturbed_coin_excess_half(p)
    if process == "sns":
        return sns_excess_entropy_half(p, truncation)[0]
    raise UnsupportedProcess(f"no closed form for process {process!r}")
