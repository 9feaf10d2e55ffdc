"""Numerical quantum harmonic analysis on locally compact groups.

Operator convolutions, admissibility, Cohen-class distributions,
mixed-state localization operators, Berezin-Lieb inequalities and
operator-window wavelet transforms, realized on a truncated affine-group
model and an exactly closed cyclic phase-space model.
"""

from .groups import (
    AffineBox,
    AffineGroup,
    CyclicBox,
    CyclicPhaseSpace,
    GroupFunction,
    build_grid,
    convolve_functions,
    indicator,
    right_haar_measure,
    scale_box,
)
from .operators import (
    OperatorRep,
    functional_calculus,
    hs_inner,
    operator_norm,
    rank_one,
    schatten_norm,
    spectral_decomposition,
)
from .representation import (
    CyclicBasis,
    FrequencyBasis,
    apply_duflo_inv,
    conjugate,
    duflo_moore,
    log_gaussian,
    make_representation,
)
from .convolution import (
    admissibility_report,
    func_op_convolve,
    make_density_operator,
    op_op_convolve,
    quantize,
)
from .cohen import cohen_map, positive_expansion, scalogram, uncertainty_check
from .localization import (
    berezin_lieb_function_side,
    berezin_lieb_operator_side,
    localization_operator,
    s_tilde,
    scaling_experiment,
    second_moment,
)
from .wavelet import (
    op_wavelet_transform,
    op_window_transform,
    operator_field_inner,
    vector_field_inner,
)

__version__ = "0.1.0"
