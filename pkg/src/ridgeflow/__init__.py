"""Ridge orientation flow estimation, directional binarization and enhancement.

The core estimator finds, per location, the angle whose short perpendicular
cross-sections have the smallest mean standard deviation of intensity; the
ridge direction is that angle plus pi/2. A structure-tensor baseline, a
binarizer, a flow-guided smoother, contour tracing, an iterative pipeline
and a synthetic-pattern harness round out the toolkit.
"""

from .binarize import BinarizeConfig, binarize_image, binarize_pixel
from .contour import (
    ContourPath,
    binarize_image_contour,
    binarize_pixel_contour,
    contour_enhance_values,
    enhance_image_contour,
    enhance_pixel_contour,
    trace_contour,
)
from .enhance import EnhanceConfig, enhance_image, enhance_pixel, enhance_values, gaussian_kernel
from .flowfield import (
    FlowField,
    angle_at,
    angles_at,
    angular_distance,
    interior_site_mask,
    load_flow_csv,
    save_flow_csv,
)
from .gradient import (
    GradientField,
    StructureTensor,
    compute_flow_field_gradient,
    gradient,
    second_moment_matrix,
    tensor_orientation,
)
from .image import (
    BinaryImage,
    GrayImage,
    LineSegment,
    PgmFormatError,
    Point,
    binary_as_gray,
    invert,
    line_points,
    load_pgm,
    rotate_image,
    sample_bilinear,
    save_pgm,
    squared_intensities,
)
from .pipeline import (
    ComparisonReport,
    IterationRecord,
    PipelineConfig,
    PipelineResult,
    compare_methods,
    run_iteration,
    run_pipeline,
    save_comparison_csv,
    summary_lines,
)
from .projection import (
    DirectDeviationEvaluator,
    FlowConfig,
    RotatedDeviationEvaluator,
    compute_flow_field,
    dominant_orientation,
    mean_perpendicular_deviation,
    patch_variance_grid,
    perpendicular_deviation,
)
from .synth import SyntheticSpec, generate, seeded_normals
from .viz import flow_overlay_svg, render_flow_overlay

__all__ = [
    "BinarizeConfig",
    "BinaryImage",
    "ComparisonReport",
    "ContourPath",
    "DirectDeviationEvaluator",
    "EnhanceConfig",
    "FlowConfig",
    "FlowField",
    "GradientField",
    "GrayImage",
    "IterationRecord",
    "LineSegment",
    "PgmFormatError",
    "PipelineConfig",
    "PipelineResult",
    "Point",
    "RotatedDeviationEvaluator",
    "StructureTensor",
    "SyntheticSpec",
    "angle_at",
    "angles_at",
    "angular_distance",
    "binarize_image",
    "binarize_image_contour",
    "binarize_pixel",
    "binarize_pixel_contour",
    "binary_as_gray",
    "compare_methods",
    "compute_flow_field",
    "compute_flow_field_gradient",
    "contour_enhance_values",
    "dominant_orientation",
    "enhance_image",
    "enhance_image_contour",
    "enhance_pixel",
    "enhance_pixel_contour",
    "enhance_values",
    "flow_overlay_svg",
    "gaussian_kernel",
    "generate",
    "gradient",
    "interior_site_mask",
    "invert",
    "line_points",
    "load_flow_csv",
    "load_pgm",
    "mean_perpendicular_deviation",
    "patch_variance_grid",
    "perpendicular_deviation",
    "render_flow_overlay",
    "rotate_image",
    "run_iteration",
    "run_pipeline",
    "sample_bilinear",
    "save_comparison_csv",
    "save_flow_csv",
    "save_pgm",
    "second_moment_matrix",
    "seeded_normals",
    "squared_intensities",
    "summary_lines",
    "tensor_orientation",
    "trace_contour",
]
