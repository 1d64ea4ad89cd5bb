"""Proof checking and bounded proof search for minimal logic with a
self-applicative provability predicate, plus Kripke and Tarski truth models."""

from pathlib import Path

from .diagonal import Template, diagonalize, load_defenv, parse_defenv
from .formula import (
    FALSUM,
    And,
    Atom,
    DefEnv,
    Falsum,
    Formula,
    Imp,
    Name,
    Or,
    ParseError,
    Prov,
    decode,
    defeq,
    encode,
    neg,
    parse_formula,
    print_formula,
    unfold_once,
)
from .kernel import (
    CLASSICAL,
    HT,
    INTUITIONISTIC,
    MINIMAL,
    CheckResult,
    KernelError,
    LogicConfig,
    ProofScript,
    ProofStep,
    Sequent,
    check_script,
    check_step,
    instantiate_axiom,
)
from .scriptfile import format_script, load_script, parse_script
from .search import SearchBounds, build_universe, prove_bounded, saturate

BUNDLED_SCRIPTS = Path(__file__).parent / "scripts"
BUNDLED_UNIVERSES = Path(__file__).parent / "universes"

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "BUNDLED_SCRIPTS",
    "BUNDLED_UNIVERSES",
    "CLASSICAL",
    "CheckResult",
    "DefEnv",
    "FALSUM",
    "Falsum",
    "Formula",
    "HT",
    "INTUITIONISTIC",
    "Imp",
    "KernelError",
    "LogicConfig",
    "MINIMAL",
    "Name",
    "Or",
    "ParseError",
    "ProofScript",
    "ProofStep",
    "Prov",
    "SearchBounds",
    "Sequent",
    "Template",
    "build_universe",
    "check_script",
    "check_step",
    "decode",
    "defeq",
    "diagonalize",
    "encode",
    "format_script",
    "instantiate_axiom",
    "load_defenv",
    "load_script",
    "neg",
    "parse_defenv",
    "parse_formula",
    "parse_script",
    "print_formula",
    "prove_bounded",
    "saturate",
    "unfold_once",
]
