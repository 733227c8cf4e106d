"""Planar border-collision normal form: periodic solutions, infinite-coexistence
parameter design, closed-form verification, and figure data (portraits, basins)."""

__version__ = "0.1.0"

from .basins import (
    DIVERGED,
    UNRESOLVED,
    BasinImage,
    Window,
    basin_raster,
    default_window,
    label_points,
)
from .core import (
    EPS_SW,
    AffineMap2,
    Mat2,
    NonInvertibleMap,
    Params,
    Point,
    all_shift_matrices,
    apply_following,
    apply_map,
    half_matrix,
    invert_map,
    word_matrices,
)
from .cycles import (
    ADMISSIBLE,
    ASYM_STABLE,
    BOUNDARY,
    NON_UNIQUE,
    SADDLE,
    STABLE_NA,
    UNSTABLE,
    VIRTUAL,
    Cycle,
    CycleReport,
    NonUniqueCycle,
    admissibility,
    classify,
    multipliers,
    side_flags,
    solve_cycle,
    stability,
)
from .design import (
    DecayReport,
    DegenerateDesign,
    DesignResiduals,
    FrameError,
    SaddleFrame,
    closed_family_RLR,
    conjugate_affine,
    delta_L_of,
    design_frame,
    design_vectors,
    hat_y,
    residuals,
    saddle_frame,
    solve_codim3,
    theorem1_check,
)
from .homoclinic import (
    HomoclinicQuad,
    ManifoldPolyline,
    hausdorff,
    homoclinic_points,
    manifold_polyline,
    map_polyline_backward,
    map_polyline_forward,
    phi_chain,
    xi_crossings,
)
from .portrait import portrait, write_bundle
from .render import default_palette, render_image
from .verification import (
    ClosedFormReport,
    TheoremVerification,
    closed_detP,
    closed_prime_forms,
    closed_trace_det,
    geometric_sum,
    mrlr_power,
    verify_theorem5,
)
from .words import (
    Word,
    alpha_index,
    build_family,
    canonical_rotation,
    flip_first,
    is_primitive,
    mismatch_indices,
    parse_word,
    shift,
)
