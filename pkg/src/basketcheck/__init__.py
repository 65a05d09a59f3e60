"""Explicit-state model checking of DTMCs described in a PRISM subset."""

from .engine import (SolveOptions, VerificationResult, bounded_reach_probabilities,
                     check_property, curve, prob0, prob1, reach_probabilities,
                     transient_distribution)
from .errors import (BasketCheckError, BuildError, EvalError, ParseError,
                     PropertyFileError, SolverError)
from .model import (Dtmc, ProbVector, StateSpace, VariableDecl, satisfaction_set,
                    to_dot, validate)
from .pctl import Property, bind, parse_properties_file, parse_property
from .prism import build_dtmc, load_model, parse_model
from .simulate import estimate_reach, sample_path

__version__ = "0.1.0"
