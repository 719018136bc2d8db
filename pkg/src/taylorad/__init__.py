"""Taylor-mode forward automatic differentiation as a source-to-source macro
on a small typed higher-order language."""

from .evaluator import eval_jet_program, evaluate
from .jetalgebra import JetShape, JetVector, enumerate_fdb, seed_affine
from .macro import FULL, RESTRICTED22, MacroConfig, d_context, d_term, d_type, normalize
from .primops import OpSpec, Registry, builtin_registry, load_op_file, register_op
from .syntax import parse, parse_type, pretty, pretty_type
from .typecheck import TypeCheckError, check_program, infer

__all__ = [
    "FULL",
    "RESTRICTED22",
    "JetShape",
    "JetVector",
    "MacroConfig",
    "OpSpec",
    "Registry",
    "TypeCheckError",
    "builtin_registry",
    "check_program",
    "d_context",
    "d_term",
    "d_type",
    "enumerate_fdb",
    "eval_jet_program",
    "evaluate",
    "infer",
    "load_op_file",
    "normalize",
    "parse",
    "parse_type",
    "pretty",
    "pretty_type",
    "register_op",
    "seed_affine",
]
