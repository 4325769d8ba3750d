"""Equivalence checking of combinational circuits by logic relaxation."""

from .netlist import Gate, Netlist, NetlistError, emit_blif, parse_blif, simulate
from .cnf import CnfFormula, build_miter, emit_dimacs, parse_dimacs, prepare_pair
from .sat import Solver, Status, solve
from .qe import cut_image, eliminate
from .pqe import CegarPqe, PqeProblem, PqeSolution, pqe_oracle, pqe_sat, pqe_solve, verify_pqe_solution
from .eclor import (EcVerdict, Mode, Verdict, build_boundary_chain, certify_boundary, ec_lor,
                    ec_lor_star, prove_inequivalence_via_beta, validate_boundary)
from .relax import (RelaxSplit, broken_interpolant, compare_relaxations, extract_interpolant,
                    relax_general)
from .bench import gen_hgated_pair, gen_mlp, inject_bug, random_pair, run_experiment

__version__ = "0.1.0"

__all__ = [
    "Gate", "Netlist", "NetlistError", "emit_blif", "parse_blif", "simulate",
    "CnfFormula", "build_miter", "emit_dimacs", "parse_dimacs", "prepare_pair",
    "Solver", "Status", "solve", "cut_image", "eliminate",
    "CegarPqe", "PqeProblem", "PqeSolution", "pqe_oracle", "pqe_sat", "pqe_solve",
    "verify_pqe_solution",
    "EcVerdict", "Mode", "Verdict", "build_boundary_chain", "certify_boundary", "ec_lor",
    "ec_lor_star", "prove_inequivalence_via_beta", "validate_boundary",
    "RelaxSplit", "broken_interpolant", "compare_relaxations", "extract_interpolant",
    "relax_general",
    "gen_hgated_pair", "gen_mlp", "inject_bug", "random_pair", "run_experiment",
]
