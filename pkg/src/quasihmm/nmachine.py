"""State-splitting construction of quasiprobabilistic generative machines.

A split specification copies each source state some number of times and, for
every (source row, emitted symbol, target state), divides the original
transition probability among the target's copies.  The division is expressed
through affine functions of named free parameters with the last share always
taking the remainder, so the coarse-grained transition structure of the
source machine is preserved identically by construction and the free
parameters explore only the interior of each split.  Negative shares are
allowed; with them the stationary vector becomes a quasiprobability and the
collision entropy of the split machine can drop all the way to the
half-order excess entropy of the process, which no nonnegative model can
reach.

Built machines ("n-machines") satisfy, exactly: coarse-grained stationary
weights equal to the source's, per-symbol and per-word conditionals equal to
the source state's, and word-for-word equality of the generated process.
``verify_nmachine_properties`` re-derives all of these numerically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateFixedSpace,
    DegenerateParameter,
    NegativeRadicand,
    NoFeasiblePoint,
    NoUnitEigenvalue,
    PropertyViolated,
    SpecMismatch,
    TruncationTooCoarse,
    ZeroEntryWithQuasiOrder,
)
from .machine import Machine, make_machine
from .measures import half_excess_from_futures, renyi_entropy
from .processes import sns_past_future_overlap

BRANCH_PLUS = "plus"
BRANCH_MINUS = "minus"

#: relative saturation tolerance |C_n2 - E_half|
SAT_TOL = 1e-6


def _branch_sign(branch: str) -> float:
    if branch == BRANCH_PLUS:
        return 1.0
    if branch == BRANCH_MINUS:
        return -1.0
    raise ValueError(f"branch must be {BRANCH_PLUS!r} or {BRANCH_MINUS!r}, got {branch!r}")


@dataclass(frozen=True)
class Affine:
    """Affine expression ``const + sum_i coeffs[name_i] * params[name_i]``."""

    const: float = 0.0
    coeffs: Mapping[str, float] = field(default_factory=dict)

    def evaluate(self, params: Mapping[str, float]) -> float:
        return self.const + sum(c * params[name] for name, c in self.coeffs.items())


@dataclass(frozen=True)
class SplitSpec:
    """How to split each source state and divide each transition.

    ``copy_counts[k]`` is the number of copies of source state k.  For a
    source transition (row j, copy l_j, symbol x, target k) the entry
    ``rules[(j, l_j, x, k)]`` lists affine expressions for the first
    ``copy_counts[k] - 1`` shares; the last share is the remainder.  Missing
    rules put the full mass on the target's copy 0.
    """

    copy_counts: tuple[int, ...]
    param_names: tuple[str, ...] = ()
    rules: Mapping[tuple[int, int, str, int], tuple[Affine, ...]] = field(default_factory=dict)

    def extended_states(self) -> list[tuple[int, int]]:
        return [(k, l) for k, count in enumerate(self.copy_counts) for l in range(count)]

    def shares(
        self, j: int, l_j: int, symbol: str, k: int, total: float, params: Mapping[str, float]
    ) -> list[float]:
        count = self.copy_counts[k]
        rule = self.rules.get((j, l_j, symbol, k))
        if rule is None:
            return [total] + [0.0] * (count - 1)
        if len(rule) != count - 1:
            raise SpecMismatch(
                f"rule for {(j, l_j, symbol, k)} has {len(rule)} shares, "
                f"expected {count - 1}"
            )
        head = [expr.evaluate(params) for expr in rule]
        return head + [total - sum(head)]


def trivial_split_spec(source: Machine) -> SplitSpec:
    """One copy per state and no parameters: rebuilds the source machine."""
    return SplitSpec(copy_counts=(1,) * source.n_states)


def generic_split_spec(source: Machine, copy_counts: Sequence[int]) -> SplitSpec:
    """Fully free split: one auto-named parameter per undetermined share."""
    counts = tuple(int(c) for c in copy_counts)
    if len(counts) != source.n_states or any(c < 1 for c in counts):
        raise SpecMismatch(f"copy counts {counts} do not fit {source.n_states} states")
    names: list[str] = []
    rules: dict[tuple[int, int, str, int], tuple[Affine, ...]] = {}
    for j in range(source.n_states):
        for l_j in range(counts[j]):
            for x in source.alphabet:
                for k in range(source.n_states):
                    if counts[k] == 1:
                        continue
                    exprs = []
                    for l_k in range(counts[k] - 1):
                        name = f"t{j}.{l_j}.{x}.{k}.{l_k}"
                        names.append(name)
                        exprs.append(Affine(coeffs={name: 1.0}))
                    rules[(j, l_j, x, k)] = tuple(exprs)
    return SplitSpec(copy_counts=counts, param_names=tuple(names), rules=rules)


def build_split_machine(
    source: Machine, spec: SplitSpec, params: Mapping[str, float]
) -> Machine:
    """Assemble the extended machine for concrete parameter values.

    The coarse-graining constraint (shares of each transition summing to the
    source probability) holds by construction; the stationary quasiprobability
    is computed fresh and a degenerate fixed space (possible at isolated
    parameter values) propagates as an error.
    """
    if len(spec.copy_counts) != source.n_states:
        raise SpecMismatch(
            f"spec covers {len(spec.copy_counts)} states, machine has {source.n_states}"
        )
    missing = [name for name in spec.param_names if name not in params]
    if missing:
        raise SpecMismatch(f"missing parameter values: {missing}")

    extended = spec.extended_states()
    index = {pair: i for i, pair in enumerate(extended)}
    size = len(extended)
    matrices = {}
    for x in source.alphabet:
        src = np.asarray(source.matrices[x])
        mat = np.zeros((size, size))
        for (j, l_j), row in ((pair, index[pair]) for pair in extended):
            for k in range(source.n_states):
                shares = spec.shares(j, l_j, x, k, float(src[j, k]), params)
                for l_k, value in enumerate(shares):
                    mat[row, index[(k, l_k)]] = value
        matrices[x] = mat

    labels = tuple(
        f"{source.states[k]}.{l}" if spec.copy_counts[k] > 1 else source.states[k]
        for k, l in extended
    )
    built = make_machine(source.alphabet, labels, matrices)
    return Machine(
        alphabet=built.alphabet,
        states=built.states,
        matrices=built.matrices,
        stationary=built.stationary,
        groups=tuple(k for k, _ in extended),
        stationary_residual=built.stationary_residual,
    )


# --- defining identities as numeric checks ------------------------------------


@dataclass(frozen=True)
class NMachineCheckReport:
    """Largest residual of each defining identity of a built split machine."""

    coarse_graining: float
    symbol_conditionals: float
    word_conditionals: float
    word_distribution: float
    half_excess_gap: float
    word_horizon: int
    distribution_horizon: int
    tol: float

    def worst(self) -> float:
        return max(
            self.coarse_graining,
            self.symbol_conditionals,
            self.word_conditionals,
            self.word_distribution,
            self.half_excess_gap,
        )

    def passed(self) -> bool:
        return self.worst() <= self.tol

    def __str__(self) -> str:
        return (
            f"coarse={self.coarse_graining:.3e} symbol={self.symbol_conditionals:.3e} "
            f"word={self.word_conditionals:.3e} dist={self.word_distribution:.3e} "
            f"half-excess={self.half_excess_gap:.3e} (tol {self.tol:g})"
        )


def verify_nmachine_properties(
    source: Machine,
    built: Machine,
    horizon: int = 8,
    tol: float = 1e-9,
) -> NMachineCheckReport:
    """Check every construction identity of ``built`` against ``source``.

    Verified, each within ``tol``: coarse-grained stationary weights, symbol
    conditionals, word conditionals up to min(horizon, 6), word-distribution
    equality up to ``horizon``, and agreement of the half-order
    state-future mutual information at horizon (the signed stationary weights
    enter that sum linearly, so it stays real).  Raises
    ``PropertyViolated`` carrying the report if any residual is too large.
    """
    if built.groups is None:
        raise SpecMismatch("built machine carries no source-state groups")
    groups = np.asarray(built.groups)
    n_src = source.n_states

    coarse = np.zeros(n_src)
    for k in range(n_src):
        coarse[k] = np.sum(np.asarray(built.stationary)[groups == k])
    coarse_res = float(np.max(np.abs(coarse - np.asarray(source.stationary))))

    symbol_res = 0.0
    for x in source.alphabet:
        built_rows = np.asarray(built.matrices[x]).sum(axis=1)
        source_rows = np.asarray(source.matrices[x]).sum(axis=1)
        symbol_res = max(symbol_res, float(np.max(np.abs(built_rows - source_rows[groups]))))

    word_horizon = min(horizon, 6)
    word_res = 0.0
    for length in range(1, word_horizon + 1):
        _, fut_built = built.conditional_future_matrix(length)
        _, fut_src = source.conditional_future_matrix(length)
        word_res = max(word_res, float(np.max(np.abs(fut_built - fut_src[groups]))))

    dist_res = 0.0
    for length in range(1, horizon + 1):
        da = built.word_distribution(length)
        db = source.word_distribution(length)
        dist_res = max(dist_res, max(abs(da[w] - db[w]) for w in da))

    _, fut_built = built.conditional_future_matrix(horizon)
    _, fut_src = source.conditional_future_matrix(horizon)
    half_built = half_excess_from_futures(built.stationary, fut_built)
    half_src = half_excess_from_futures(source.stationary, fut_src)
    half_gap = abs(half_built - half_src)

    report = NMachineCheckReport(
        coarse_graining=coarse_res,
        symbol_conditionals=symbol_res,
        word_conditionals=word_res,
        word_distribution=dist_res,
        half_excess_gap=half_gap,
        word_horizon=word_horizon,
        distribution_horizon=horizon,
        tol=tol,
    )
    if not report.passed():
        raise PropertyViolated(report)
    return report


# --- assembled results ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NMachineResult:
    """A built split machine together with its memory bookkeeping."""

    machine: Machine
    parameters: dict[str, float]
    c_n2: float
    e_half: float
    c_mu2: float
    negativity: float
    mana: float
    advantage: float
    saturated: bool
    bound_violated: bool

    def to_json_dict(self) -> dict:
        return {
            "parameters": dict(self.parameters),
            "c_n2": self.c_n2,
            "e_half": self.e_half,
            "c_mu2": self.c_mu2,
            "negativity": self.negativity,
            "mana": self.mana,
            "advantage": self.advantage,
            "saturated": self.saturated,
            "bound_violated": self.bound_violated,
        }


def assess_split_machine(
    machine: Machine,
    parameters: Mapping[str, float],
    e_half: float,
    c_mu2: float,
    sat_tol: float = SAT_TOL,
) -> NMachineResult:
    """Collision entropy, negativity bookkeeping, and bound flags for a built
    machine against a given half-order excess entropy and classical memory."""
    pi = np.asarray(machine.stationary)
    c_n2 = -float(np.log2(np.sum(pi * pi)))
    ell1 = float(np.sum(np.abs(pi)))
    threshold = sat_tol * max(1.0, abs(e_half))
    return NMachineResult(
        machine=machine,
        parameters=dict(parameters),
        c_n2=c_n2,
        e_half=e_half,
        c_mu2=c_mu2,
        negativity=ell1,
        mana=2.0 * float(np.log2(ell1)),
        advantage=abs(c_n2 - c_mu2) / c_mu2 if c_mu2 > 0 else float("nan"),
        saturated=abs(c_n2 - e_half) <= threshold,
        bound_violated=c_n2 < e_half - threshold,
    )


# --- closed-form parameter choices ---------------------------------------------


def perturbed_coin_split_spec(p: float) -> SplitSpec:
    """Canonical two-parameter split of the Perturbed Coin predictive model:
    state s0 doubled, with q1 shifting mass between the copies' self-loops
    and q2 dividing the return edge from s1."""
    return SplitSpec(
        copy_counts=(2, 1),
        param_names=("q1", "q2"),
        rules={
            (0, 0, "0", 0): (Affine(1 - p, {"q1": 1.0}),),
            (0, 1, "0", 0): (Affine(0.0, {"q1": -1.0}),),
            (1, 0, "0", 0): (Affine(0.0, {"q2": 1.0}),),
        },
    )


def perturbed_coin_ideal_params(p: float, branch: str = BRANCH_PLUS) -> tuple[float, float]:
    """Parameter pair (q1, q2) that saturates the memory bound exactly.

    With q1 = 0 the split stationary vector is [q2/2p, (p-q2)/2p, 1/2], and
    the collision entropy equals the process's half-order excess entropy when

        q2 = p/2 * (1 +- sqrt(1 + 8 sqrt(p(1-p)))).

    Both roots work (they exchange the first two stationary weights).
    """
    if p == 0.5:
        raise DegenerateParameter("the Perturbed Coin model degenerates at p = 1/2")
    if not 0.0 < p < 1.0:
        raise DegenerateParameter(f"p must lie in (0, 1), got {p}")
    sign = _branch_sign(branch)
    q2 = 0.5 * p * (1.0 + sign * math.sqrt(1.0 + 8.0 * math.sqrt(p * (1.0 - p))))
    return 0.0, q2


def sns_split_spec(p: float) -> SplitSpec:
    """Canonical two-parameter split of the SNS generative model: state A
    doubled, gamma shifting mass between the copies' 0 self-loops and eta
    dividing the firing edge from B."""
    return SplitSpec(
        copy_counts=(2, 1),
        param_names=("gamma", "eta"),
        rules={
            (0, 0, "0", 0): (Affine(p, {"gamma": 1.0}),),
            (0, 1, "0", 0): (Affine(0.0, {"gamma": -1.0}),),
            (1, 0, "1", 0): (Affine(0.0, {"eta": 1.0}),),
        },
    )


def sns_ideal_params(
    p: float, truncation: int | None = None, branch: str = BRANCH_PLUS
) -> tuple[float, float]:
    """Parameter pair (gamma, eta) saturating the memory bound for the SNS
    split, up to series truncation.

    With gamma = 0 the split stationary vector is
    [eta, 1-p-eta, 1-p] / (2(1-p)), and the saturating roots are

        eta = (1-p)/2 * (1 +- sqrt(-3 + 8 * V))

    where V is the truncated past-future overlap (so -log2 V is the excess
    entropy).  A negative radicand is reported rather than assumed away.
    """
    overlap, residual = sns_past_future_overlap(p, truncation)
    if residual > 1e-9:
        raise TruncationTooCoarse(
            f"past-future overlap truncation residual {residual:.3e} too large"
        )
    radicand = -3.0 + 8.0 * overlap
    if radicand < 0:
        raise NegativeRadicand(f"-3 + 8 * overlap = {radicand:.6f} < 0 at p = {p}")
    sign = _branch_sign(branch)
    eta = 0.5 * (1.0 - p) * (1.0 + sign * math.sqrt(radicand))
    return 0.0, eta


def golden_mean_bad_split_spec(p: float) -> SplitSpec:
    """One-parameter Golden Mean split whose reset edge is divided evenly.

    The even division pins the split stationary weights regardless of q, so
    this construction can inject negativity but never reduce memory: a
    deliberate example of negativity without advantage.
    """
    return SplitSpec(
        copy_counts=(2, 1),
        param_names=("q",),
        rules={
            (0, 0, "0", 0): (Affine(p, {"q": 1.0}),),
            (0, 1, "0", 0): (Affine(0.0, {"q": -1.0}),),
            (1, 0, "0", 0): (Affine(0.5),),
        },
    )


def golden_mean_bad_nmachine(
    p: float, q: float, horizon: int = 12, source: Machine | None = None
) -> NMachineResult:
    """Build and assess the no-advantage Golden Mean split at parameter q.

    The split stationary vector is pinned at
    (1-p)/(2-p) * [1/(2-2p), 1/(2-2p), 1] for every q; this is re-derived
    from the built machine and cross-checked before returning.
    """
    from .measures import excess_entropy_half
    from .processes import golden_mean_epsilon

    src = source if source is not None else golden_mean_epsilon(p)
    machine = build_split_machine(src, golden_mean_bad_split_spec(p), {"q": q})
    scale = (1 - p) / (2 - p)
    pinned = np.array([scale / (2 - 2 * p), scale / (2 - 2 * p), scale])
    if np.max(np.abs(np.asarray(machine.stationary) - pinned)) > 1e-9:
        raise ArithmeticError("split stationary vector moved off its pinned value")
    e_half = excess_entropy_half(src, horizon).value
    c_mu2 = renyi_entropy(src.stationary, 2)
    return assess_split_machine(machine, {"q": q}, e_half, c_mu2)


# --- derivative-free parameter optimization --------------------------------------


@dataclass(frozen=True)
class OptimizeOptions:
    """Knobs for the deterministic multi-start pattern search."""

    seed: int = 0
    extra_starts: int = 8
    start_box: float = 1.5
    initial_step: float = 0.25
    min_step: float = 1e-9
    max_evals: int = 20000
    max_params: int = 8
    sat_tol: float = SAT_TOL


def optimize_ideal(
    source: Machine,
    spec: SplitSpec,
    e_half: float,
    opts: OptimizeOptions = OptimizeOptions(),
    c_mu2: float | None = None,
) -> NMachineResult:
    """Minimize the split machine's collision entropy subject to staying at or
    above ``e_half``.

    The split parameterization keeps the coarse-graining constraints exact,
    leaving a single inequality handled by a one-sided penalty, so a
    coordinate pattern search from a deterministic grid of starts (plus
    seeded extras) suffices at these dimensions.  Parameter values where the
    stationary vector is degenerate or touches zero count as infeasible
    points, not failures.  If even the best point sits below the bound,
    ``NoFeasiblePoint`` is raised; a best point above the bound but away
    from it is returned with ``saturated=False``.
    """
    names = spec.param_names
    if len(names) > opts.max_params:
        raise ValueError(f"{len(names)} parameters exceed the cap {opts.max_params}")
    baseline = c_mu2 if c_mu2 is not None else renyi_entropy(source.stationary, 2)
    threshold = opts.sat_tol * max(1.0, abs(e_half))

    def entropy_at(vec: np.ndarray) -> float | None:
        try:
            machine = build_split_machine(source, spec, dict(zip(names, vec)))
            pi = np.asarray(machine.stationary)
            return -float(np.log2(np.sum(pi * pi)))
        except (DegenerateFixedSpace, NoUnitEigenvalue, ZeroEntryWithQuasiOrder):
            return None

    def objective(vec: np.ndarray) -> float:
        h2 = entropy_at(vec)
        if h2 is None or not np.isfinite(h2):
            return float("inf")
        if h2 >= e_half:
            return h2
        return e_half + 10.0 * (e_half - h2)

    if not names:
        machine = build_split_machine(source, spec, {})
        return assess_split_machine(machine, {}, e_half, baseline, opts.sat_tol)

    dims = len(names)
    starts = [np.zeros(dims)]
    for i, scale in itertools.product(range(dims), (0.25, 0.75)):
        for sign in (1.0, -1.0):
            vec = np.zeros(dims)
            vec[i] = sign * scale
            starts.append(vec)
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.extra_starts):
        starts.append(rng.uniform(-opts.start_box, opts.start_box, dims))

    evals = 0

    def search(start: np.ndarray) -> tuple[float, np.ndarray]:
        nonlocal evals
        x = start.copy()
        fx = objective(x)
        evals += 1
        step = opts.initial_step
        while step >= opts.min_step and evals < opts.max_evals:
            improved = False
            for i in range(dims):
                for sign in (1.0, -1.0):
                    trial = x.copy()
                    trial[i] += sign * step
                    ft = objective(trial)
                    evals += 1
                    if ft < fx - 1e-15:
                        x, fx = trial, ft
                        improved = True
            if not improved:
                step *= 0.5
        return fx, x

    results = [search(s) for s in starts]
    best_f, best_x = min(results, key=lambda r: (r[0], tuple(r[1])))
    best_h2 = entropy_at(best_x)
    if best_h2 is None or best_h2 < e_half - threshold:
        raise NoFeasiblePoint(
            f"no parameters found with collision entropy >= {e_half:.9f}"
        )
    machine = build_split_machine(source, spec, dict(zip(names, best_x)))
    return assess_split_machine(
        machine, dict(zip(names, best_x)), e_half, baseline, opts.sat_tol
    )
