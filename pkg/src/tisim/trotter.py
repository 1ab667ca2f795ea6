"""Product-formula schedules over generator exponentials and their dense simulation.

A schedule is one *slice*, a left-to-right product of ``exp(dt * L_g)``
factors, repeated ``n`` times.  Slices are built recursively from a word:
a leaf is a single factor, a combination is a first-order Lie product of
its children, and a bracket at duration ``tau`` is the group commutator
``e^{sA} e^{sB} e^{-sA} e^{-sB}`` with ``s = sqrt(|tau|)`` (operands swapped
when ``tau < 0``).  Step counts therefore grow like ``4^depth``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .lattice import Sector
from .quadratic import QuadraticElement
from .spin import SpinElement, dense_realize_spin
from .words import Bracket, Combo, CommutatorWord, Leaf, combo, word_depth, word_expand, word_to_json

__all__ = [
    "Schedule",
    "GroupElement",
    "SimulationResult",
    "DepthError",
    "NumericalHealthError",
    "MAX_DEPTH",
    "SCHEMES",
    "trotter_linear",
    "group_commutator",
    "compile_word",
    "dense_generator",
    "simulate_schedule",
    "error_sweep",
]

MAX_DEPTH = 4
INVARIANT_TOL = 1e-9
HEALTH_TOL = 1e-6


class DepthError(ValueError):
    """Bracket nesting beyond the configured cap."""

    def __init__(self, message: str, subtree: CommutatorWord | None = None):
        super().__init__(message)
        self.subtree = subtree


class NumericalHealthError(RuntimeError):
    """A simulated group element drifted off its group."""


@dataclass(frozen=True)
class Schedule:
    slice: tuple  # ((generator index, dt), ...)
    t: float
    n: int
    word: CommutatorWord | None = field(default=None, compare=False)

    @property
    def steps(self) -> list[tuple[int, float]]:
        return list(self.slice) * self.n

    @property
    def step_count(self) -> int:
        return len(self.slice) * self.n

    def to_json(self) -> dict:
        out = {
            "t": self.t,
            "repetitions": self.n,
            "steps": [{"g": g, "dt": dt} for g, dt in self.slice],
            "step_count": self.step_count,
        }
        if self.word is not None:
            out["word"] = word_to_json(self.word)
        return out


def trotter_linear(terms: Sequence[tuple], t: float, n: int) -> Schedule:
    """``(prod_j exp(c_j t/n L_{g_j}))^n`` for ``terms = [(c_j, g_j), ...]``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    sl = tuple((int(g), float(c) * t / n) for c, g in terms)
    word = combo(*[(c, Leaf(int(g))) for c, g in terms])
    return Schedule(sl, float(t), n, word)


def _as_word(x) -> CommutatorWord:
    return x if isinstance(x, CommutatorWord) else Leaf(int(x))


SCHEMES = ("four-factor", "balanced")


def _slice(word: CommutatorWord, tau: float, scheme: str = "four-factor") -> list:
    if tau == 0:
        return []
    if isinstance(word, Leaf):
        return [(word.index, tau)]
    if isinstance(word, Combo):
        out = []
        for c, sub in word.terms:
            out += _slice(sub, float(c) * tau, scheme)
        return out
    a, b = (word.left, word.right) if tau > 0 else (word.right, word.left)
    s = math.sqrt(abs(tau))
    if scheme == "balanced":
        # C(s') C(-s') with s' = s/sqrt(2): the cubic BCH terms of the two blocks cancel
        s /= math.sqrt(2)
        block = _slice(a, s, scheme) + _slice(b, s, scheme) + _slice(a, -s, scheme) + _slice(b, -s, scheme)
        return block + _slice(a, -s, scheme) + _slice(b, -s, scheme) + _slice(a, s, scheme) + _slice(b, s, scheme)
    return _slice(a, s) + _slice(b, s) + _slice(a, -s) + _slice(b, -s)


def group_commutator(a, b, t: float, n: int, scheme: str = "four-factor") -> Schedule:
    """``(e^{sA} e^{sB} e^{-sA} e^{-sB})^n`` with ``s = sqrt(t/n)``, approximating ``exp(t[A, B])``.

    ``scheme="balanced"`` follows each block with its time-reversed partner
    (eight factors at ``s/sqrt(2)``), which moves the error from ``n^(-1/2)``
    to ``n^(-1)`` for a single bracket.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    word = Bracket(_as_word(a), _as_word(b))
    return compile_word(word, t, n, scheme=scheme)


def compile_word(word: CommutatorWord, t: float, n: int, max_depth: int = MAX_DEPTH,
                 scheme: str = "four-factor") -> Schedule:
    """Schedule approximating ``exp(t * word_expand(word))``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    _check_depth(word, max_depth)
    return Schedule(tuple(_slice(word, float(t) / n, scheme)), float(t), n, word)


def _check_depth(word, max_depth):
    memo: dict = {}
    if word_depth(word, memo) <= max_depth:
        return
    node = word
    # walk down to the shallowest subtree that still exceeds the cap by itself
    while True:
        kids = [node.left, node.right] if isinstance(node, Bracket) else [w for _, w in getattr(node, "terms", ())]
        deeper = [k for k in kids if word_depth(k, memo) > max_depth]
        if not deeper:
            break
        node = deeper[0]
    raise DepthError(f"bracket depth {word_depth(word, memo)} exceeds the cap {max_depth}", node)


# --------------------------------------------------------------------------
# dense simulation


def dense_generator(el) -> np.ndarray:
    """Matrix Lie-algebra image: the block matrix for quadratic elements, ``i H`` for spins."""
    if isinstance(el, QuadraticElement):
        return np.asarray(el.dense(), dtype=complex if el.kind == "complex" else float)
    if isinstance(el, SpinElement):
        return 1j * dense_realize_spin(el)
    raise TypeError(f"unsupported element {type(el).__name__}")


_SIGMA_CACHE: dict = {}


def _sigma(N: int) -> np.ndarray:
    if N not in _SIGMA_CACHE:
        one = np.eye(N)
        z = np.zeros((N, N))
        _SIGMA_CACHE[N] = np.block([[z, one], [-one, z]])
    return _SIGMA_CACHE[N]


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    sector: Sector

    @classmethod
    def identity(cls, size: int, sector: Sector) -> "GroupElement":
        return cls(np.eye(size, dtype=complex if sector is Sector.SPIN else float), sector)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.sector)

    def invariant_defect(self) -> float:
        """Distance from the sector's group (relative for the non-compact boson case)."""
        T = self.matrix
        if self.sector is Sector.FERMION:
            return float(np.linalg.norm(T @ T.T - np.eye(len(T)), 2))
        if self.sector is Sector.BOSON:
            s = _sigma(len(T) // 2)
            scale = max(1.0, float(np.linalg.norm(T, 2)) ** 2)
            return float(np.linalg.norm(T @ s @ T.T - s, 2)) / scale
        return float(np.linalg.norm(T @ T.conj().T - np.eye(len(T)), 2))

    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix))


@dataclass(frozen=True, eq=False)
class SimulationResult:
    element: GroupElement
    target: np.ndarray
    error: float
    invariant_defect: float

    @property
    def invariant_ok(self) -> bool:
        return self.invariant_defect <= INVARIANT_TOL

    def to_json(self) -> dict:
        return {"error": self.error, "invariant_defect": self.invariant_defect, "invariant_ok": self.invariant_ok}


def _sector(generators) -> Sector:
    return generators[0].lattice.sector


def simulate_schedule(schedule: Schedule, generators: Sequence, target=None) -> SimulationResult:
    """Dense product of the schedule's factors and its spectral-norm error.

    ``target`` defaults to ``exp(t * word_expand(schedule.word))``; pass a
    matrix or an element to compare against something else.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("simulation needs the generator list")
    sector = _sector(gens)
    mats = [dense_generator(g) for g in gens]
    size = len(mats[0])
    cache: dict = {}
    sl = GroupElement.identity(size, sector).matrix
    for g, dt in schedule.slice:
        if not 0 <= g < len(mats):
            raise IndexError(f"schedule step uses generator {g}, only {len(mats)} available")
        key = (g, dt)
        if key not in cache:
            cache[key] = expm(dt * mats[g])
        sl = sl @ cache[key]
    U = np.linalg.matrix_power(sl, schedule.n) if schedule.slice else sl
    if target is None:
        if schedule.word is None:
            target_mat = np.eye(size)
        else:
            target_mat = expm(schedule.t * dense_generator(word_expand(schedule.word, gens)))
    elif isinstance(target, np.ndarray):
        target_mat = target
    else:
        target_mat = expm(schedule.t * dense_generator(target))
    el = GroupElement(U, sector)
    defect = el.invariant_defect()
    if defect > HEALTH_TOL:
        raise NumericalHealthError(f"group invariant drifted by {defect:.3e}")
    err = float(np.linalg.norm(U - target_mat, 2))
    return SimulationResult(el, target_mat, err, defect)


def error_sweep(word: CommutatorWord, generators: Sequence, t: float, ns: Sequence[int],
                max_depth: int = MAX_DEPTH, scheme: str = "four-factor") -> list[dict]:
    """Error table ``[{n, steps, error, invariant_defect}, ...]`` for a compiled word."""
    rows = []
    for n in ns:
        sched = compile_word(word, t, n, max_depth, scheme)
        res = simulate_schedule(sched, generators)
        rows.append({"n": n, "steps": sched.step_count, "error": res.error, "invariant_defect": res.invariant_defect})
    return rows
