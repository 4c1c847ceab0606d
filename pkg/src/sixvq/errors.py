"""Exception hierarchy shared by all sixvq modules."""


class SixvqError(Exception):
    """Base class; carries a short machine-readable code for the CLI."""

    code = "error"


# --- root-of-unity arithmetic ---------------------------------------------

class NonPrimitive(SixvqError):
    code = "non_primitive"


class OrderTooSmall(SixvqError):
    code = "order_too_small"


class ZeroLambda(SixvqError):
    code = "zero_lambda"


class DuplicateAbscissa(SixvqError):
    code = "duplicate_abscissa"


class ZeroPolynomial(SixvqError):
    code = "zero_polynomial"


class NoConvergence(SixvqError):
    code = "no_convergence"


# --- representations and the hypersurface ---------------------------------

class EvenParityCyclic(SixvqError):
    code = "even_parity_cyclic"


class HypersurfaceViolation(SixvqError):
    code = "hypersurface_violation"


class DegenerateMu(SixvqError):
    code = "degenerate_mu"


class AmbiguousBranch(SixvqError):
    code = "ambiguous_branch"


class DiscriminantPoint(SixvqError):
    code = "discriminant_point"


class EvenParity(SixvqError):
    code = "even_parity"


class NoSolution(SixvqError):
    code = "no_solution"


class ZeroEvaluationParameter(SixvqError):
    code = "zero_evaluation_parameter"


class ChartNotFound(SixvqError):
    code = "chart_not_found"


# --- six-vertex operators ---------------------------------------------------

class PoleAtZ(SixvqError):
    code = "pole_at_z"


# --- intertwiners -----------------------------------------------------------

class EvenCyclic(SixvqError):
    code = "even_cyclic"


class BranchDegenerate(SixvqError):
    code = "branch_degenerate"


class NotIsomorphic(SixvqError):
    code = "not_isomorphic"


class PoleInParams(SixvqError):
    code = "pole_in_params"


# --- auxiliary matrices -----------------------------------------------------

class OddChain(SixvqError):
    code = "odd_chain"


class LawPreconditionViolated(SixvqError):
    code = "law_precondition_violated"


# --- spectra ----------------------------------------------------------------

class NonCommuting(SixvqError):
    code = "non_commuting"


class NotBlockDiagonal(SixvqError):
    code = "not_block_diagonal"


class EigvecDrift(SixvqError):
    code = "eigvec_drift"


class ZeroCurve(SixvqError):
    code = "zero_curve"


class DivisionByZeroCurve(SixvqError):
    code = "division_by_zero_curve"


# --- CLI --------------------------------------------------------------------

class ConfigInvalid(SixvqError):
    code = "config_invalid"


class GoldenMismatch(SixvqError):
    code = "golden_mismatch"
