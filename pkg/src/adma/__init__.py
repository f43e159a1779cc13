"""Angle-domain multi-user hybrid massive MIMO.

Channel synthesis for a ULA base station, DFT beamspace AOA estimation with
zero-padded refinement, orthogonal (OBS) and non-orthogonal (NOAS) hybrid
precoding, and two-round channel estimation with ``K`` RF chains.
"""
from .angle_domain import (
    beam_transform,
    compact_decompose,
    correlation,
    dft_matrix,
    oversampled_transform,
    rotation_matrix,
    significant_indices,
    steering_inner_product,
)
from .beam_selection import SelectionResult, sig_beam_sel
from .channel_model import (
    ArrayConfig,
    LinkBudget,
    UserChannel,
    apply_link_budget,
    draw_user,
    path_loss_db,
    steering_vector,
)
from .hybrid_estimation import estimate_channels, nmse
from .precoding import (
    HybridPrecoder,
    RefinedBeam,
    fd_mmse_precoder,
    mmse_digital,
    mrt_precoder,
    noas_analog,
    obs_analog,
    refine_angle,
    sum_rate,
)

__version__ = "0.1.0"
