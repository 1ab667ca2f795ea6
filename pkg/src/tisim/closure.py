"""Lie closure of a generator set, with membership tests and witness words.

Elements are handled through coordinate vectors.  Exact mode keeps every
basis row as a primitive integer vector and reduces candidates by
fraction-free elimination; float mode keeps an orthonormal basis built by
Gram-Schmidt with one reorthogonalization pass.

Two worklist strategies are offered.  ``"generators"`` brackets each new
basis element with every generator, which spans the same algebra because
right-normed brackets of generators already span it.  ``"pairs"`` brackets
each new basis element with every earlier basis element.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .lattice import Circulant, LatticeMismatchError, LatticeSpec, Sector
from .quadratic import QuadraticElement
from .spin import SpinElement, enumerate_necklaces
from .words import Bracket, CommutatorWord, Leaf, combo, word_expand, word_from_json, word_to_json

__all__ = [
    "ClosureOptions",
    "ClosureReport",
    "Membership",
    "close",
    "member",
    "ambient_dimension",
    "ti_r_dimension",
    "ti_p_dimension",
    "self_inverse_count",
    "element_space",
    "LieClosure",
]

DEFAULT_TOL = 1e-9
_INT64_SAFE = 2**62


def self_inverse_count(lattice: LatticeSpec) -> int:
    """Number of offsets with ``2v = 0``."""
    return 2**lattice.d if lattice.m % 2 == 0 else 1


def _antisym_free(lattice: LatticeSpec) -> int:
    return (lattice.N - self_inverse_count(lattice)) // 2


def _sym_free(lattice: LatticeSpec) -> int:
    return (lattice.N + self_inverse_count(lattice)) // 2


def ti_r_dimension(lattice: LatticeSpec) -> int:
    """Dimension of the TI fermion space with ``Y = -X``."""
    return _antisym_free(lattice) + lattice.N


def ti_p_dimension(lattice: LatticeSpec) -> int:
    """Dimension of the TI boson space with symmetric ``W``."""
    return 3 * _sym_free(lattice)


def ambient_dimension(lattice: LatticeSpec) -> int:
    """Number of free real TI coefficients of a generator in the sector."""
    if lattice.sector is Sector.FERMION:
        return 2 * _antisym_free(lattice) + lattice.N
    if lattice.sector is Sector.BOSON:
        return 2 * _sym_free(lattice) + lattice.N
    return len(enumerate_necklaces(lattice.m, lattice.D))


# --------------------------------------------------------------------------
# coordinate spaces


class _QuadraticSpace:
    def __init__(self, lattice: LatticeSpec):
        self.lattice = lattice
        self.offsets = list(lattice.offsets())
        self.size = 3 * lattice.N

    def to_vec(self, el: QuadraticElement) -> list:
        N = self.lattice.N
        out = [0] * self.size
        for b, blk in enumerate((el.X, el.Y, el.W)):
            for v, c in blk.items():
                out[b * N + self.lattice.index(v)] = c
        return out

    def from_vec(self, vec) -> QuadraticElement:
        N = self.lattice.N
        blocks = []
        for b in range(3):
            entries = {}
            for j, v in enumerate(self.offsets):
                c = vec[b * N + j]
                if c != 0:
                    entries[v] = _py_scalar(c)
            blocks.append(Circulant(self.lattice, entries))
        return QuadraticElement(self.lattice, *blocks)

    def units(self):
        N = self.lattice.N
        zero = Circulant.zero(self.lattice)
        for b in range(3):
            for v in self.offsets:
                blk = Circulant(self.lattice, {v: 1})
                parts = [zero, zero, zero]
                parts[b] = blk
                yield QuadraticElement._raw(self.lattice, *parts)


class _SpinSpace:
    def __init__(self, lattice: LatticeSpec):
        self.lattice = lattice
        self.necklaces = enumerate_necklaces(lattice.m, lattice.D)
        self.pos = {s: i for i, s in enumerate(self.necklaces)}
        self.size = len(self.necklaces)

    def to_vec(self, el: SpinElement) -> list:
        out = [0] * self.size
        for s, c in el.items():
            out[self.pos[s]] = c
        return out

    def from_vec(self, vec) -> SpinElement:
        return SpinElement(self.lattice, {s: _py_scalar(vec[i]) for i, s in enumerate(self.necklaces) if vec[i] != 0})

    def units(self):
        for s in self.necklaces:
            yield SpinElement(self.lattice, {s: 1})


_SPACES: dict = {}


def element_space(lattice: LatticeSpec):
    """Coordinate space for elements on ``lattice`` (cached)."""
    sp = _SPACES.get(lattice)
    if sp is None:
        sp = _SpinSpace(lattice) if lattice.sector is Sector.SPIN else _QuadraticSpace(lattice)
        _SPACES[lattice] = sp
    return sp


def _py_scalar(c):
    if isinstance(c, (np.floating,)):
        return float(c)
    if isinstance(c, np.integer):
        return int(c)
    return c


# --------------------------------------------------------------------------
# exact vector helpers


def _primitive(vec) -> tuple[np.ndarray, Fraction]:
    """Split a rational vector as ``scale * ints`` with coprime integer entries."""
    fr = [Fraction(c) for c in vec]
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in fr]
    g = math.gcd(*ints) if ints else 0
    if g == 0:
        return np.array(ints, dtype=object), Fraction(0)
    return np.array([x // g for x in ints], dtype=object), Fraction(g, den)


def _content(vec: np.ndarray) -> int:
    return math.gcd(*vec.tolist())


def _first_nonzero(vec) -> int:
    for i, x in enumerate(vec):
        if x != 0:
            return i
    return -1


def _matvec(ad, vec: np.ndarray) -> np.ndarray:
    mat64, rowsum, mat_obj = ad
    bound = max((abs(x) for x in vec.tolist()), default=0)
    if mat64 is not None and bound * rowsum < _INT64_SAFE:
        return (mat64 @ np.array(vec.tolist(), dtype=np.int64)).astype(object)
    if mat_obj[0] is None:
        mat_obj[0] = mat64.astype(object)
    return mat_obj[0].dot(vec)


# --------------------------------------------------------------------------
# options / results


@dataclass(frozen=True)
class ClosureOptions:
    mode: str = "exact"
    tol: float = DEFAULT_TOL
    max_dim: int | None = None
    strategy: str = "generators"

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"mode must be 'exact' or 'float', got {self.mode!r}")
        if self.strategy not in ("generators", "pairs"):
            raise ValueError(f"strategy must be 'generators' or 'pairs', got {self.strategy!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_dim is not None and self.max_dim < 1:
            raise ValueError("max_dim must be at least 1")

    def to_json(self) -> dict:
        return {"mode": self.mode, "tol": self.tol, "max_dim": self.max_dim, "strategy": self.strategy}


@dataclass(frozen=True)
class Membership:
    in_span: bool
    coefficients: tuple | None
    residual_norm: float
    word: CommutatorWord | None = None


@dataclass(frozen=True, eq=False)
class ClosureReport:
    lattice: LatticeSpec
    generators: tuple
    basis: tuple
    words: tuple
    converged: bool
    options: ClosureOptions
    ambient_dim: int
    rows: tuple = field(repr=False, default=())

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def _row_matrix(self):
        return np.array([np.asarray(r, dtype=float) for r in self.rows]) if self.rows else None

    def expand_words(self) -> list:
        memo: dict = {}
        return [word_expand(w, self.generators, memo) for w in self.words]

    def to_json(self) -> dict:
        refs = {id(w): k for k, w in enumerate(self.words)}
        return {
            "lattice": self.lattice.to_json(),
            "generators": [g.to_json() for g in self.generators],
            "basis": [b.to_json() for b in self.basis],
            "words": [word_to_json(w, refs) for w in self.words],
            "dimension": self.dimension,
            "ambient_dimension": self.ambient_dim,
            "converged": self.converged,
            "options": self.options.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "ClosureReport":
        lattice = LatticeSpec.from_json(obj["lattice"])
        load = SpinElement.from_json if lattice.sector is Sector.SPIN else QuadraticElement.from_json
        gens = tuple(load(g) for g in obj["generators"])
        basis = tuple(load(b) for b in obj["basis"])
        words: list[CommutatorWord] = []
        for w in obj["words"]:
            words.append(word_from_json(w, words))
        opts = ClosureOptions(**obj["options"])
        space = element_space(lattice)
        rows = tuple(_row_of(space, b, opts.mode) for b in basis)
        return cls(lattice, gens, basis, tuple(words), bool(obj["converged"]), opts,
                   int(obj["ambient_dimension"]), rows)


def _row_of(space, el, mode):
    vec = space.to_vec(el)
    if mode == "exact":
        return np.array([int(Fraction(c)) for c in vec], dtype=object)
    return np.asarray([float(c) for c in vec])


# --------------------------------------------------------------------------
# validation


def _check_generators(generators: Sequence) -> LatticeSpec:
    gens = list(generators)
    if not gens:
        raise ValueError("closure needs at least one generator")
    first = gens[0]
    if not isinstance(first, (QuadraticElement, SpinElement)):
        raise TypeError(f"unsupported element type {type(first).__name__}")
    for g in gens[1:]:
        if type(g) is not type(first):
            raise TypeError("generators mix element kinds")
        if g.lattice != first.lattice:
            raise LatticeMismatchError(f"generators live on different lattices: {first.lattice} vs {g.lattice}")
    return first.lattice


# --------------------------------------------------------------------------
# bases


class _ExactBasis:
    def __init__(self, size: int):
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []
        self.size = size

    def reduce(self, vec: np.ndarray):
        """Return ``(residual, lam, mu)`` with ``residual = lam*vec - sum mu[k]*row_k``."""
        cur = vec
        lam = Fraction(1)
        mu: dict[int, Fraction] = {}
        for k, (row, p) in enumerate(zip(self.rows, self.pivots)):
            b = cur[p]
            if b == 0:
                continue
            a = row[p]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            cur = fa * cur - fb * row
            lam *= fa
            for key in mu:
                mu[key] *= fa
            mu[k] = mu.get(k, Fraction(0)) + fb
            c = _content(cur)
            if c == 0:
                break
            if c > 1:
                cur = cur // c
                lam /= c
                for key in mu:
                    mu[key] /= c
        return cur, lam, mu

    def add(self, residual: np.ndarray):
        p = _first_nonzero(residual)
        self.rows.append(residual)
        self.pivots.append(p)


class _FloatBasis:
    def __init__(self, size: int):
        self.rows: list[np.ndarray] = []
        self._mat = np.zeros((0, size))

    def reduce(self, vec: np.ndarray):
        coef = np.zeros(len(self.rows))
        cur = vec.astype(float, copy=True)
        for _ in range(2):
            if not self.rows:
                break
            c = self._mat @ cur
            cur = cur - self._mat.T @ c
            coef += c
        return cur, coef

    def add(self, unit: np.ndarray):
        self.rows.append(unit)
        self._mat = np.vstack([self._mat, unit[None, :]])


# --------------------------------------------------------------------------
# closure


def _ad_matrix(space, gen):
    """Columns ``[unit_j, gen]`` in coordinates (rational entries)."""
    cols = [space.to_vec(u.bracket(gen)) for u in space.units()]
    return [list(r) for r in zip(*cols)]


def _exact_ad(space, gen_int_el):
    """Integer ad-matrix ``den * ad(gen)`` and its denominator ``den``."""
    mat = _ad_matrix(space, gen_int_el)
    den = 1
    for row in mat:
        for c in row:
            if isinstance(c, Fraction) and c.denominator != 1:
                den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [[int(c * den) for c in row] for row in mat]
    rowsum = max((sum(abs(x) for x in row) for row in ints), default=0)
    if rowsum < _INT64_SAFE:
        return (np.array(ints, dtype=np.int64), rowsum, [None]), den
    return (None, rowsum, [np.array(ints, dtype=object)]), den


def close(generators: Sequence, options: ClosureOptions | dict | None = None, **kwargs) -> ClosureReport:
    """Lie closure of ``generators`` under brackets and real linear combinations."""
    if options is None:
        options = ClosureOptions(**kwargs)
    elif isinstance(options, dict):
        options = ClosureOptions(**{**options, **kwargs})
    elif kwargs:
        raise TypeError("pass either an options object or keyword options, not both")
    lattice = _check_generators(generators)
    gens = tuple(generators)
    if lattice.sector is Sector.SPIN and options.mode != "exact":
        raise ValueError("spin closures run in exact mode only")
    if options.mode == "exact" and any(g.kind != "exact" for g in gens):
        raise TypeError("exact mode needs rational generator coefficients; use mode='float'")
    space = element_space(lattice)
    ambient = ambient_dimension(lattice)
    cap = min(options.max_dim, ambient) if options.max_dim is not None else ambient
    if options.mode == "exact":
        return _close_exact(lattice, gens, space, options, ambient, cap)
    return _close_float(lattice, gens, space, options, ambient, cap)


def _close_exact(lattice, gens, space, options, ambient, cap) -> ClosureReport:
    basis = _ExactBasis(space.size)
    words: list[CommutatorWord] = []
    leaves = [Leaf(i) for i in range(len(gens))]
    queue: deque[int] = deque()

    def offer(vec, factor, base_word):
        # vec == factor * expand(base_word), vec integral
        residual, lam, mu = basis.reduce(vec)
        if _first_nonzero(residual) < 0:
            return False
        terms = [(lam * factor, base_word)] + [(-c, words[k]) for k, c in sorted(mu.items())]
        basis.add(residual)
        words.append(combo(*terms))
        queue.append(len(words) - 1)
        return True

    full = False
    for i, g in enumerate(gens):
        ints, scale = _primitive(space.to_vec(g))
        if scale == 0:
            continue
        offer(ints, 1 / scale, leaves[i])
        if len(words) >= cap:
            full = True
            break

    ads = None
    if options.strategy == "generators" and not full:
        ads = []
        for g in gens:
            ints, scale = _primitive(space.to_vec(g))
            if scale == 0:
                ads.append(None)
                continue
            ad, den = _exact_ad(space, space.from_vec(ints))
            # ad @ row == den * [row, g_int] == den / scale * [row, g]
            ads.append((ad, Fraction(den) / scale))

    while queue and not full:
        j = queue.popleft()
        if options.strategy == "generators":
            for i, ad in enumerate(ads):
                if ad is None:
                    continue
                mat, factor = ad
                vec = _matvec(mat, basis.rows[j])
                if all(x == 0 for x in vec.tolist()):
                    continue
                c = _content(vec)
                offer(vec // c, factor / c, Bracket(words[j], leaves[i]))
                if len(words) >= cap:
                    full = True
                    break
        else:
            ej = space.from_vec(basis.rows[j])
            for k in range(j):
                ints, scale = _primitive(space.to_vec(ej.bracket(space.from_vec(basis.rows[k]))))
                if scale == 0:
                    continue
                offer(ints, 1 / scale, Bracket(words[j], words[k]))
                if len(words) >= cap:
                    full = True
                    break

    converged = not queue or len(words) >= ambient
    if full and len(words) < ambient:
        converged = _exact_is_closed(basis, space, gens, words)
    rows = tuple(basis.rows)
    return ClosureReport(lattice, gens, tuple(space.from_vec(r) for r in rows), tuple(words),
                         converged, options, ambient, rows)


def _exact_is_closed(basis, space, gens, words) -> bool:
    for r in basis.rows:
        el = space.from_vec(r)
        for g in gens:
            ints, scale = _primitive(space.to_vec(el.bracket(g)))
            if scale == 0:
                continue
            residual, _, _ = basis.reduce(ints)
            if _first_nonzero(residual) >= 0:
                return False
    return True


def _close_float(lattice, gens, space, options, ambient, cap) -> ClosureReport:
    basis = _FloatBasis(space.size)
    words: list[CommutatorWord] = []
    leaves = [Leaf(i) for i in range(len(gens))]
    queue: deque[int] = deque()
    tol = options.tol

    def offer(vec, base_word, floor):
        norm = float(np.linalg.norm(vec))
        if norm <= tol * floor:
            return False
        unit = vec / norm
        residual, coef = basis.reduce(unit)
        r = float(np.linalg.norm(residual))
        if r <= tol:
            return False
        terms = [(1 / (norm * r), base_word)] + [(-float(c) / r, words[k]) for k, c in enumerate(coef) if c != 0]
        basis.add(residual / r)
        words.append(combo(*terms))
        queue.append(len(words) - 1)
        return True

    def fvec(el):
        return np.asarray([complex(c).real if isinstance(c, complex) else float(c) for c in space.to_vec(el)])

    full = False
    gvecs = [fvec(g) for g in gens]
    gscale = max((float(np.linalg.norm(v)) for v in gvecs), default=1.0) or 1.0
    for i, v in enumerate(gvecs):
        offer(v, leaves[i], gscale)
        if len(words) >= cap:
            full = True
            break

    ads = None
    if options.strategy == "generators" and not full:
        ads = []
        for g in gens:
            mat = np.array([[float(c) for c in row] for row in _ad_matrix(space, g)])
            ads.append((mat, float(np.linalg.norm(mat, 2)) if mat.size else 0.0))

    while queue and not full:
        j = queue.popleft()
        if options.strategy == "generators":
            for i, (mat, nrm) in enumerate(ads):
                if nrm == 0.0:
                    continue
                offer(mat @ basis.rows[j], Bracket(words[j], leaves[i]), nrm)
                if len(words) >= cap:
                    full = True
                    break
        else:
            ej = space.from_vec(basis.rows[j])
            for k in range(j):
                vec = fvec(ej.bracket(space.from_vec(basis.rows[k])))
                offer(vec, Bracket(words[j], words[k]), gscale)
                if len(words) >= cap:
                    full = True
                    break

    converged = not queue or len(words) >= ambient
    if full and len(words) < ambient:
        converged = _float_is_closed(basis, space, gens, tol, fvec)
    rows = tuple(basis.rows)
    return ClosureReport(lattice, gens, tuple(space.from_vec(r) for r in rows), tuple(words),
                         converged, options, ambient, rows)


def _float_is_closed(basis, space, gens, tol, fvec) -> bool:
    for r in basis.rows:
        el = space.from_vec(r)
        for g in gens:
            vec = fvec(el.bracket(g))
            n = float(np.linalg.norm(vec))
            if n == 0.0:
                continue
            residual, _ = basis.reduce(vec / n)
            if float(np.linalg.norm(residual)) > tol:
                return False
    return True


# --------------------------------------------------------------------------
# membership


def member(target, report: ClosureReport) -> Membership:
    """Project ``target`` onto the closure span."""
    if not isinstance(target, type(report.generators[0])):
        raise TypeError(f"target is a {type(target).__name__}, report holds {type(report.generators[0]).__name__}")
    if target.lattice != report.lattice:
        raise LatticeMismatchError(f"target lattice {target.lattice} differs from report lattice {report.lattice}")
    space = element_space(report.lattice)
    vec = space.to_vec(target)
    if report.options.mode == "exact":
        if target.kind != "exact":
            raise TypeError("exact report needs a rational target")
        basis = _ExactBasis(space.size)
        basis.rows = list(report.rows)
        basis.pivots = [_first_nonzero(r) for r in report.rows]
        ints, scale = _primitive(vec)
        if scale == 0:
            return Membership(True, tuple(Fraction(0) for _ in report.rows), 0.0, combo())
        residual, lam, mu = basis.reduce(ints)
        if _first_nonzero(residual) >= 0:
            res = np.array([float(x) for x in residual.tolist()]) * float(scale / lam)
            return Membership(False, None, float(np.linalg.norm(res)))
        coefs = tuple(scale * mu.get(k, 0) / lam for k in range(len(report.rows)))
        word = combo(*[(c, report.words[k]) for k, c in enumerate(coefs) if c != 0])
        return Membership(True, coefs, 0.0, word)
    t = np.asarray([float(complex(c).real) if isinstance(c, complex) else float(c) for c in vec])
    R = report._row_matrix
    if R is None:
        n = float(np.linalg.norm(t))
        return Membership(n == 0.0, (), n, combo() if n == 0.0 else None)
    coef = R @ t
    res = t - R.T @ coef
    coef2 = R @ res
    coef = coef + coef2
    res = res - R.T @ coef2
    rn = float(np.linalg.norm(res))
    scale = max(1.0, float(np.linalg.norm(t)))
    if rn > report.options.tol * scale:
        return Membership(False, None, rn)
    coefs = tuple(float(c) for c in coef)
    word = combo(*[(c, report.words[k]) for k, c in enumerate(coefs) if c != 0])
    return Membership(True, coefs, rn, word)


# --------------------------------------------------------------------------
# estimator


class LieClosure(BaseEstimator):
    """Estimator wrapper: ``fit`` closes a generator list, ``predict`` tests membership.

    ``transform`` returns expansion coefficients over the fitted basis, one
    row per target (``nan`` rows for targets outside the span).
    """

    def __init__(self, mode: str = "exact", tol: float = DEFAULT_TOL, max_dim: int | None = None,
                 strategy: str = "generators"):
        self.mode = mode
        self.tol = tol
        self.max_dim = max_dim
        self.strategy = strategy

    def fit(self, X, y=None) -> "LieClosure":
        opts = ClosureOptions(mode=self.mode, tol=self.tol, max_dim=self.max_dim, strategy=self.strategy)
        self.report_ = close(list(X), opts)
        self.dimension_ = self.report_.dimension
        self.converged_ = self.report_.converged
        self.basis_ = self.report_.basis
        self.words_ = self.report_.words
        return self

    def _fitted(self) -> ClosureReport:
        check_is_fitted(self, "report_")
        return self.report_

    def transform(self, X) -> np.ndarray:
        report = self._fitted()
        dtype = object if report.options.mode == "exact" else float
        out = np.full((len(X), report.dimension), np.nan, dtype=dtype)
        for i, t in enumerate(X):
            res = member(t, report)
            if res.in_span:
                out[i, :] = res.coefficients
        return out

    def predict(self, X) -> np.ndarray:
        report = self._fitted()
        return np.array([member(t, report).in_span for t in X], dtype=bool)

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)
