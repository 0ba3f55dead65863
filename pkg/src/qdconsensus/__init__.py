"""Consensus measures for quantum Darwinism: exact branching states, the
solvable c-maybe model, and an all-to-all spin model."""

from . import cmaybe, infotheory, measurement, qstate, spinmodel
from .cmaybe import CMaybeParams, FragmentPair, gram_reduce
from .infotheory import (
    BranchingState,
    make_branching_state,
    mutual_information,
    quantum_cmi,
    holevo,
    measured_cmi,
    refined_mi,
    theorem1_check,
    lemma1_check,
)
from .measurement import Povm, ProjectiveBasis, random_povm, tilted_basis
from .qstate import (
    DensityMatrix,
    PureState,
    QubitLabel,
    Role,
    binary_entropy,
    partial_trace,
    von_neumann_entropy,
)
from .spinmodel import SpinModelParams, SpinRealization, TimeSeriesSpec, sample_couplings

__version__ = "0.1.0"
