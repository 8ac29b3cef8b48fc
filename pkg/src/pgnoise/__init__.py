"""Poissonian-Gaussian noise synthesis for smartphone camera images.

The signal-dependent noise model is ``z = a*K + sqrt(b)*G`` with ``K ~
Poisson(y/a)`` and ``G ~ N(0, 1)``, so a clean intensity ``y`` in [0, 1]
picks up variance ``a*y + b``. The package samples per-channel ``(a, b)``
pairs from calibrated histogram bundles, applies the model to RGB images,
and estimates fresh parameters from clean/noisy image pairs. The
``pgnoise`` command line wraps the three workflows (generate, calibrate,
validate).
"""

from .errors import (
    BundleError,
    BundleParseError,
    BundleValidationError,
    BundleVersionError,
    CalibrationError,
    DegenerateFitError,
    EmptyDataError,
    ImageIOError,
    InsufficientDynamicRangeError,
    InvalidInputError,
    PgNoiseError,
    SamplingExhaustedError,
)
from .histogram import Histogram, build_histogram, cdf, sample_histogram
from .model import (
    CHANNEL_NAMES,
    ChannelParams,
    ImagePlane,
    NoiseParams,
    RgbImage,
    add_noise_plane,
    add_noise_rgb,
    predicted_variance,
    sample_gaussian_component,
    sample_poisson_component,
)
from .generator import (
    ChannelHistograms,
    ParamBundle,
    generate_noisy_images,
    generate_realization,
    sample_channel_params,
    sample_channel_params_batch,
    sample_noise_params,
)
from .calibration import (
    AbEstimate,
    ChannelCalibration,
    LineFit,
    ScenePair,
    build_param_bundle,
    calibrate_scene,
    calibrate_scenes,
    estimate_ab_paired,
    estimate_noise_variance,
    fit_line,
)
from .bundle_io import (
    bundle_digest,
    load_bundle,
    parse_bundle,
    save_bundle,
    serialize_bundle,
)
from .image_io import (
    ImageRecord,
    load_image,
    read_sidecar,
    save_image,
    sidecar_path,
    write_sidecar,
)
from .fixtures import example_bundle

__version__ = "0.1.0"

__all__ = [
    "AbEstimate",
    "BundleError",
    "BundleParseError",
    "BundleValidationError",
    "BundleVersionError",
    "CHANNEL_NAMES",
    "CalibrationError",
    "ChannelCalibration",
    "ChannelHistograms",
    "ChannelParams",
    "DegenerateFitError",
    "EmptyDataError",
    "Histogram",
    "ImageIOError",
    "ImagePlane",
    "ImageRecord",
    "InsufficientDynamicRangeError",
    "InvalidInputError",
    "LineFit",
    "NoiseParams",
    "ParamBundle",
    "PgNoiseError",
    "RgbImage",
    "SamplingExhaustedError",
    "ScenePair",
    "add_noise_plane",
    "add_noise_rgb",
    "build_histogram",
    "build_param_bundle",
    "bundle_digest",
    "calibrate_scene",
    "calibrate_scenes",
    "cdf",
    "estimate_ab_paired",
    "estimate_noise_variance",
    "example_bundle",
    "fit_line",
    "generate_noisy_images",
    "generate_realization",
    "load_bundle",
    "load_image",
    "parse_bundle",
    "predicted_variance",
    "read_sidecar",
    "sample_channel_params",
    "sample_channel_params_batch",
    "sample_gaussian_component",
    "sample_histogram",
    "sample_noise_params",
    "sample_poisson_component",
    "save_bundle",
    "save_image",
    "serialize_bundle",
    "sidecar_path",
    "write_sidecar",
    "__version__",
]
