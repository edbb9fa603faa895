"""Hidden Markov machines over a finite real state space.

A :class:`Machine` is the quadruple (alphabet, states, symbol-labeled
transition matrices, stationary vector).  Entry ``T[x][j, k]`` is the joint
probability of emitting symbol ``x`` and moving to state ``k`` given state
``j``; rows of ``sum_x T[x]`` sum to 1 but individual entries may be negative
(quasi-stochastic).  The same type therefore covers classical predictive
machines, generative machines, state-split quasiprobabilistic machines, and
phase-space representations of quantum models.

Machines are immutable after construction; all operations are read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import (
    EnumerationCapExceeded,
    MachineFormatError,
    QuasiMachineUnsupported,
    StationaryMismatch,
    UnknownSymbol,
)

#: default cap on the number of words enumerated by length-L operations
ENUMERATION_CAP = 2**20

#: horizon used when two machines are compared as process generators
PROCESS_EQUALITY_HORIZON = 8
PROCESS_EQUALITY_TOL = 1e-9


@dataclass(frozen=True)
class MachineClass:
    """Structural classification: sign of the model and unifilarity."""

    classical: bool
    unifilar: bool


@dataclass(frozen=True)
class Violation:
    """One failed structural invariant, with its location and residual."""

    kind: str
    index: object
    residual: float

    def __str__(self) -> str:
        return f"{self.kind}@{self.index}: residual {self.residual:.3e}"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Machine:
    """Immutable (alphabet, states, transition matrices, stationary) quadruple.

    ``groups`` optionally maps each state index to the index of a coarser
    source state; split-machine constructions fill it so that coarse-graining
    checks need no label parsing.
    """

    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    matrices: Mapping[str, np.ndarray]
    stationary: np.ndarray
    groups: tuple[int, ...] | None = None
    stationary_residual: float = field(default=0.0, compare=False)

    # -- basic structure ------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self.states)

    def transition_matrix(self) -> np.ndarray:
        """State transition matrix ``sum_x T[x]``."""
        return sum(self.matrices[x] for x in self.alphabet)

    def matrix(self, symbol: str) -> np.ndarray:
        try:
            return self.matrices[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet {self.alphabet}") from None

    # -- word probabilities ----------------------------------------------

    def word_probability(self, word: Iterable[str]) -> float:
        """Probability of emitting ``word``: stationary row vector pushed
        through the word's transition matrices and closed with the unit
        column.  The empty word has probability 1."""
        row = np.array(self.stationary, dtype=float)
        for symbol in word:
            row = row @ self.matrix(symbol)
        return float(row.sum())

    def conditional_future_matrix(self, length: int, cap: int = ENUMERATION_CAP):
        """All length-``length`` words with their per-state conditional
        probabilities.

        Returns ``(words, C)`` where ``C[k, i]`` is the probability of word
        ``words[i]`` given that the machine starts in state ``k``.
        """
        if length < 0:
            raise ValueError("length must be nonnegative")
        if len(self.alphabet) ** length > cap:
            raise EnumerationCapExceeded(
                f"{len(self.alphabet)}^{length} words exceed the cap {cap}"
            )
        words = [""]
        futures = np.ones((self.n_states, 1))
        for _ in range(length):
            futures = np.hstack([self.matrices[x] @ futures for x in self.alphabet])
            words = [x + w for x in self.alphabet for w in words]
        return words, futures

    def word_distribution(self, length: int, cap: int = ENUMERATION_CAP) -> dict[str, float]:
        """Map from every length-``length`` word to its probability."""
        words, futures = self.conditional_future_matrix(length, cap)
        probs = np.asarray(self.stationary) @ futures
        return dict(zip(words, probs.tolist()))

    def conditional_future_given_state(
        self, state: int, length: int, cap: int = ENUMERATION_CAP
    ) -> dict[str, float]:
        """Distribution of the next ``length`` symbols given a start state."""
        if not 0 <= state < self.n_states:
            raise ValueError(f"state index {state} out of range")
        words, futures = self.conditional_future_matrix(length, cap)
        return dict(zip(words, futures[state].tolist()))

    # -- classification and validation ------------------------------------

    def classify(self, tol: float = linalg.STRUCT_TOL) -> MachineClass:
        classical = bool(np.min(self.stationary) >= -tol) and all(
            np.min(self.matrices[x]) >= -tol for x in self.alphabet
        )
        unifilar = all(
            np.count_nonzero(np.abs(self.matrices[x][j]) > tol) <= 1
            for x in self.alphabet
            for j in range(self.n_states)
        )
        return MachineClass(classical=classical, unifilar=unifilar)

    def validate(
        self, tol: float = linalg.STRUCT_TOL, eigen_tol: float = linalg.EIGEN_TOL
    ) -> list[Violation]:
        """Check every structural invariant; violations are returned as data,
        never raised."""
        out: list[Violation] = []
        n = self.n_states
        for x in self.alphabet:
            a = np.asarray(self.matrices[x])
            if a.shape != (n, n):
                out.append(Violation("matrix-shape", x, float("nan")))
            if not np.all(np.isfinite(a)):
                out.append(Violation("non-finite", x, float("inf")))
        if any(v.kind == "matrix-shape" or v.kind == "non-finite" for v in out):
            return out

        total = self.transition_matrix()
        row_res = np.abs(total.sum(axis=1) - 1.0)
        for j in np.nonzero(row_res > tol)[0]:
            out.append(Violation("row-sum", int(j), float(row_res[j])))

        pi = np.asarray(self.stationary)
        if pi.shape != (n,):
            out.append(Violation("stationary-shape", None, float("nan")))
            return out
        sum_res = abs(float(pi.sum()) - 1.0)
        if sum_res > tol:
            out.append(Violation("stationary-sum", None, sum_res))
        fixed_res = float(np.max(np.abs(pi @ total - pi))) if n else 0.0
        if fixed_res > 10 * eigen_tol:
            out.append(Violation("stationary-fixed", None, fixed_res))
        if self.groups is not None and len(self.groups) != n:
            out.append(Violation("groups-shape", None, float("nan")))
        return out

    # -- conditional-future fidelities -------------------------------------

    def future_fidelity_matrix(self, horizon: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
        """Matrix of Bhattacharyya overlaps between per-state futures.

        Entry ``(j, k)`` is ``sum_w sqrt(P(w|j) P(w|k))`` over all words of
        the given length.  For unifilar machines each word has a single
        contributing path, so the sum telescopes into an exact transfer-matrix
        recursion and any horizon is cheap; otherwise words are enumerated
        (subject to ``cap``).  Requires nonnegative transitions.
        """
        if not self.classify().classical:
            raise QuasiMachineUnsupported(
                "future fidelities need nonnegative transition probabilities"
            )
        if horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.classify().unifilar:
            roots = [np.sqrt(np.clip(self.matrices[x], 0.0, None)) for x in self.alphabet]
            fid = np.ones((self.n_states, self.n_states))
            for _ in range(horizon):
                fid = sum(s @ fid @ s.T for s in roots)
            return fid
        _, futures = self.conditional_future_matrix(horizon, cap)
        roots = np.sqrt(np.clip(futures, 0.0, None))
        return roots @ roots.T

    # -- persistence -------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc: dict = {
            "alphabet": list(self.alphabet),
            "states": list(self.states),
            "matrices": {x: np.asarray(self.matrices[x]).tolist() for x in self.alphabet},
            "stationary": np.asarray(self.stationary).tolist(),
        }
        if self.groups is not None:
            doc["groups"] = list(self.groups)
        return doc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")


def make_machine(
    alphabet: Sequence[str],
    states: Sequence[str],
    matrices: Mapping[str, object],
    stationary=None,
    groups: Sequence[int] | None = None,
    tol: float = linalg.STRUCT_TOL,
) -> Machine:
    """Validating constructor.

    Row sums of the summed transition matrix must be 1 within ``tol``.  When
    ``stationary`` is omitted it is computed as the unique unit-sum left fixed
    vector; when given it is verified rather than trusted.
    """
    alphabet = tuple(str(x) for x in alphabet)
    if len(set(alphabet)) != len(alphabet):
        raise MachineFormatError("alphabet has repeated symbols")
    states = tuple(str(s) for s in states)
    n = len(states)
    mats = {}
    for x in alphabet:
        if x not in matrices:
            raise MachineFormatError(f"missing transition matrix for symbol {x!r}")
        a = np.asarray(matrices[x], dtype=float)
        if a.shape != (n, n):
            raise MachineFormatError(
                f"matrix for symbol {x!r} has shape {a.shape}, expected {(n, n)}"
            )
        mats[x] = _frozen(a)
    extra = set(matrices) - set(alphabet)
    if extra:
        raise MachineFormatError(f"matrices for symbols outside the alphabet: {sorted(extra)}")

    total = sum(mats[x] for x in alphabet)
    res = linalg.row_sum_residual(total)
    if res > tol:
        raise MachineFormatError(f"summed transition matrix row-sum residual {res:.3e}")

    if stationary is None:
        pi = linalg.left_fixed_vector(total, tol=tol)
        residual = float(np.max(np.abs(pi @ total - pi)))
    else:
        pi = np.asarray(stationary, dtype=float)
        if pi.shape != (n,):
            raise MachineFormatError(f"stationary vector has shape {pi.shape}, expected ({n},)")
        if abs(pi.sum() - 1.0) > tol:
            raise StationaryMismatch(f"stationary sums to {pi.sum():.12g}, expected 1")
        residual = float(np.max(np.abs(pi @ total - pi)))
        if residual > 10 * linalg.EIGEN_TOL:
            raise StationaryMismatch(f"stationary fixed-point residual {residual:.3e}")

    return Machine(
        alphabet=alphabet,
        states=states,
        matrices=mats,
        stationary=_frozen(pi),
        groups=tuple(int(g) for g in groups) if groups is not None else None,
        stationary_residual=residual,
    )


def same_process(
    a: Machine,
    b: Machine,
    horizon: int = PROCESS_EQUALITY_HORIZON,
    tol: float = PROCESS_EQUALITY_TOL,
) -> bool:
    """Whether two machines generate the same process, decided (by definition)
    as agreement of all word probabilities up to ``horizon``."""
    return word_distribution_distance(a, b, horizon) <= tol


def word_distribution_distance(a: Machine, b: Machine, horizon: int) -> float:
    """Largest absolute word-probability difference over lengths <= horizon."""
    if a.alphabet != b.alphabet:
        raise UnknownSymbol(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    worst = 0.0
    for length in range(horizon + 1):
        da = a.word_distribution(length)
        db = b.word_distribution(length)
        worst = max(worst, max(abs(da[w] - db[w]) for w in da))
    return worst


def load_machine(path, tol: float = linalg.STRUCT_TOL) -> Machine:
    """Read a machine definition from JSON.

    The file's stationary vector, when present, is kept verbatim (round trips
    are bit-exact) but its fixed-point residual is recomputed and checked.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MachineFormatError(f"cannot read machine file {path}: {exc}") from exc
    return machine_from_json_dict(doc, tol=tol)


def machine_from_json_dict(doc: Mapping, tol: float = linalg.STRUCT_TOL) -> Machine:
    if not isinstance(doc, Mapping):
        raise MachineFormatError("machine document must be a JSON object")
    for key in ("alphabet", "states", "matrices"):
        if key not in doc:
            raise MachineFormatError(f"machine document missing {key!r}")
    return make_machine(
        doc["alphabet"],
        doc["states"],
        doc["matrices"],
        stationary=doc.get("stationary"),
        groups=doc.get("groups"),
        tol=tol,
    )
