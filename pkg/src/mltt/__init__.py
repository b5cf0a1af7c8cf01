"""A proof checker for intensional Martin-Löf type theory with a weak
propositional truncation whose judgmental beta rule can be switched on."""

from .evaluator import EvalMode, Evaluator
from .program import CheckReport, check_program
from .typechecker import Checker

__all__ = ["Checker", "CheckReport", "EvalMode", "Evaluator", "check_program"]
