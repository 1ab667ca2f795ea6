"""Lie-algebraic toolkit for translation-invariant quantum simulation on periodic lattices."""
from .closure import ClosureOptions, ClosureReport, LieClosure, Membership, close, member
from .lattice import Circulant, LatticeSpec, Sector
from .obstruction import CasimirSpec, certify_no_go
from .quadratic import (
    QuadraticElement,
    boson_commutator,
    boson_named,
    boson_nn,
    boson_onsite,
    fermion_commutator,
    fermion_named,
    fermion_nn,
    fermion_onsite,
)
from .relations import relations_suite
from .spin import SpinElement, nn_generators, spin_commutator, spin_lattice, tau_symmetrize
from .trotter import compile_word, group_commutator, simulate_schedule, trotter_linear
from .witness import boson_witness, fermion_witness_1d, fermion_witness_dd, spin_recipes
from .words import Bracket, Combo, Leaf, word_expand

__version__ = "0.1.0"

__all__ = [
    "Bracket", "CasimirSpec", "Circulant", "ClosureOptions", "ClosureReport", "Combo", "LatticeSpec", "Leaf",
    "LieClosure", "Membership", "QuadraticElement", "Sector", "SpinElement", "boson_commutator", "boson_named",
    "boson_nn", "boson_onsite", "boson_witness", "certify_no_go", "close", "compile_word", "fermion_commutator",
    "fermion_named", "fermion_nn", "fermion_onsite", "fermion_witness_1d", "fermion_witness_dd", "group_commutator",
    "member", "nn_generators", "relations_suite", "simulate_schedule", "spin_commutator", "spin_lattice",
    "spin_recipes", "tau_symmetrize", "trotter_linear", "word_expand",
]
