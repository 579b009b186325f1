"""Entanglement-aware quantum state preparation.

Compiles a ``2**n`` amplitude vector into a circuit of ``U`` and ``CX`` gates
through Schmidt decompositions, with optional low-rank truncation and a
bounded-loss product approximation search.
"""
from .baa import ApproxPlan, CostFn, baa_search, brute_force_plans, synth_plan
from .circuit import CX, Circuit, U, simulate
from .cost import baseline_sp_count, bipartition_count, lrsp_estimate, table1_bound
from .errors import InvalidInput, ParseError, ResourceLimit
from .linalg import Bipartition, random_state, reconstruct, schmidt_decompose, truncate
from .measures import fidelity, meyer_wallach, purity_from_sigma, schmidt_measure
from .qasm import emit_qasm, parse_qasm
from .sampling import ShotCounts, mae, sample, simulate_noisy
from .synthesis import LrspConfig, SynthesisReport, lrsp, prep_state, synth_isometry, synth_unitary

__version__ = "0.1.0"
