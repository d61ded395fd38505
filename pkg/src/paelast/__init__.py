"""Photoacoustic elastography with band-limitation texture.

2D photoacoustic simulation on a circular array, speckle-like texture
generation by hard band-limitation of the measurements, time-reversal
reconstruction, Horn-Schunck displacement estimation and the error measures
that quantify what the texture buys.
"""

__version__ = "0.1.0"

from .bandlimit import (
    abel_radial,
    apply_bandpass,
    convolve_psf,
    convolve_time,
    irf,
    irf_kernel,
    make_even,
    psf,
)
from .core import (
    BandSpec,
    DisplacementField,
    ErrorReport,
    Grid,
    Image,
    MetricsRow,
    SensorData,
    SensorGeometry,
    read_image,
    read_sensor_data,
    resample_bilinear,
    write_image,
    write_sensor_data,
)
from .flow import FlowConfig, FlowResult, default_lambda_grid, horn_schunck, lambda_sweep
from .harness import (
    ConfigError,
    ExperimentConfig,
    TextureMode,
    load_config,
    run_experiment,
    validate_config,
)
from .metrics import aae, aee, aee_rel, warping_error
from .phantom import (
    DeformationSpec,
    PhantomSpec,
    add_gaussian_texture,
    make_displacement,
    make_phantom,
    warp_image,
)
from .reconstruct import reconstruct_textured, reconstruct_time_reversal
from .wave import SolverConfig, simulate, wave_trace_oracle

__all__ = [
    "__version__",
    "BandSpec",
    "ConfigError",
    "DeformationSpec",
    "DisplacementField",
    "ErrorReport",
    "ExperimentConfig",
    "FlowConfig",
    "FlowResult",
    "Grid",
    "Image",
    "MetricsRow",
    "PhantomSpec",
    "SensorData",
    "SensorGeometry",
    "SolverConfig",
    "TextureMode",
    "abel_radial",
    "aae",
    "aee",
    "aee_rel",
    "add_gaussian_texture",
    "apply_bandpass",
    "convolve_psf",
    "convolve_time",
    "default_lambda_grid",
    "horn_schunck",
    "irf",
    "irf_kernel",
    "lambda_sweep",
    "load_config",
    "make_displacement",
    "make_even",
    "make_phantom",
    "psf",
    "read_image",
    "read_sensor_data",
    "reconstruct_textured",
    "reconstruct_time_reversal",
    "resample_bilinear",
    "run_experiment",
    "simulate",
    "validate_config",
    "warp_image",
    "warping_error",
    "wave_trace_oracle",
    "write_image",
    "write_sensor_data",
]
