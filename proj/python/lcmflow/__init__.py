"""Variational optical flow with a Laplacian cotangent mesh smoothness term."""

from ._lcmflow import (
    ConfigError,
    DimensionError,
    FormatError,
    IoError,
    NumericalError,
    SolverParams,
    angular_error,
    band_limited_noise,
    circular_shift,
    compute_flow,
    degrade,
    delta_field,
    evaluate_flow,
    flow_to_color,
    interpolate_middle_frame,
    interpolation_error,
    inverse_warp,
    read_flo,
    read_image,
    set_thread_count,
    synth_sequence,
    write_flo,
    write_png,
)

__all__ = [name for name in dir() if not name.startswith("_")]
