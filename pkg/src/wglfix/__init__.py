"""wglfix パッケージの公開インターフェース。"""

from .certify import derive_fixed_point_cert, derive_known_equivalence
from .cli import main
from .depth import DepthProfile, dep, dep_mod, depth_profile, is_modalized, occurrences_by_residue, replace_by_residue
from .formula import (
    FALSUM,
    TOP,
    Box,
    Falsum,
    Formula,
    Implies,
    LogicIndex,
    Variable,
    boxdot,
    simplify,
    substitute,
)
from .kernel import Certificate, CheckReport, ProofLine, check
from .kripke import KripkeModel, countermodel, forces, frame_validates_wgl
from .propositions import (
    derive_equiv_box,
    derive_lob,
    derive_power_unfolding,
    derive_subst,
    derive_top_unfolding,
    derive_trans,
)
from .syntax import FormulaSyntaxError, parse, to_text
from .synthesis import (
    FixedPointResult,
    NotModalizedError,
    boxed_fixed_point,
    fixed_point,
    shifting_sequence,
    simple_fixed_point,
    simultaneous_fixed_points,
    zero_instance,
)
from .verification import VerificationReport, verify_fixpoint

__all__ = [
    "FALSUM",
    "TOP",
    "Box",
    "Certificate",
    "CheckReport",
    "DepthProfile",
    "Falsum",
    "FixedPointResult",
    "Formula",
    "FormulaSyntaxError",
    "Implies",
    "KripkeModel",
    "LogicIndex",
    "NotModalizedError",
    "ProofLine",
    "Variable",
    "VerificationReport",
    "boxdot",
    "boxed_fixed_point",
    "check",
    "countermodel",
    "dep",
    "dep_mod",
    "depth_profile",
    "derive_equiv_box",
    "derive_fixed_point_cert",
    "derive_known_equivalence",
    "derive_lob",
    "derive_power_unfolding",
    "derive_subst",
    "derive_top_unfolding",
    "derive_trans",
    "fixed_point",
    "forces",
    "frame_validates_wgl",
    "is_modalized",
    "main",
    "occurrences_by_residue",
    "parse",
    "replace_by_residue",
    "shifting_sequence",
    "simple_fixed_point",
    "simplify",
    "simultaneous_fixed_points",
    "substitute",
    "to_text",
    "verify_fixpoint",
    "zero_instance",
]
