"""Auxiliary Q-matrix laboratory for the six-vertex model at roots of unity.

Builds the cyclic representations, L-operators, transfer and auxiliary
matrices, verifies their operator identities numerically, and extracts
spectra, complete strings and Bethe roots at desk scale.
"""

from . import errors
from .conventions import FEConvention
from .qcore import (
    ComplexPoly,
    EigenResult,
    RootContext,
    big_F,
    eig_dense,
    interpolate,
    lambda_bracket,
    make_root_context,
    poly_roots,
    q_bracket,
)
from .reps import (
    CyclicRep,
    EvalRep,
    RepParams,
    SpecZPoint,
    TwoDimRep,
    build_cyclic_rep,
    casimir_combination,
    central_values,
    chart_point,
    coadjoint_flow,
    coproduct_action,
    evaluation_rep,
    fiber,
    in_discriminant,
    mu_branch,
    point_chart,
    reversal_coordinates,
    spin_reversal_point,
    two_dim_rep,
)
from .sixvertex import (
    ChainOperator,
    boltzmann_weights,
    hamiltonian,
    partition_function,
    r_matrix,
    rst_checks,
    symmetry_ops,
    transfer_matrix,
)
from .intertwiner import (
    LOperator,
    bs_bridge,
    build_L,
    exact_sequence,
    existence_criteria,
    find_gauge,
    spin_reversal_L_check,
    verify_exact_sequence,
    verify_intertwining,
    verify_ybe,
)
from .qmatrix import (
    QMatrix,
    baxter_Q,
    build_Q,
    commute_predicate,
    fiber_sum_Q,
    qt_commutator,
    shifted_charts,
    tq_residual,
    transformation_check,
)
from .spectra import (
    BetheAnalysis,
    SectorBlock,
    baxter_comparison,
    bethe_analysis,
    characteristic_curve,
    eigenvalue_curve,
    joint_spectrum,
    sector_blocks,
    sector_report,
    tracked_joint_curves,
    transfer_eigen_from_q,
)

__version__ = "0.1.0"
