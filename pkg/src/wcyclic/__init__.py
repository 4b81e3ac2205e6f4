"""Subgroup lattices, characters and the 2-box calculus of group subfactors."""

from .catalogue import DEFAULT_CATALOGUE, parse_group
from .errors import CapacityError, IntegrityError, ParseError, WcyclicError
from .lattice import SubgroupLattice, enumerate_subgroups
from .perm import Group, Permutation, SubgroupHandle, closure
from .reps import CharacterTable, character_table, fusion_coeffs
from .twobox import Model, TwoBoxElement
from .verifiers import SUITES, VerificationReport, run_suites

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CATALOGUE", "parse_group", "CapacityError", "IntegrityError", "ParseError",
    "WcyclicError", "SubgroupLattice", "enumerate_subgroups", "Group", "Permutation",
    "SubgroupHandle", "closure", "CharacterTable", "character_table", "fusion_coeffs",
    "Model", "TwoBoxElement", "SUITES", "VerificationReport", "run_suites",
]
