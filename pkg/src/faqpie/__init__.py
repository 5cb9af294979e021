"""Approximate quantum amplitude encoding of raster images.

Images become quantum states whose amplitudes are pixel values; truncating
the 2D Fourier spectrum first lets a short loader circuit (uniformly
controlled rotations, a sign-qubit fan-out, and an inverse Fourier stage)
prepare the state with far fewer gates than exact amplitude encoding.
"""
from .circuit import Circuit, Gate, GateCounts, count_gates, reduction_percent
from .compress import CompressionOptions, CompressionStats, cancel_cnots, compress, prune_rotations
from .fsl import FslLayout, UCRCascade, build_exact_qpie, build_fsl_2d, build_iqft, gray_ucr_to_gates, materialize_cascade, ucr_angles
from .image_io import ImagePlane, PadRecord, RgbImage, crop_and_merge, load_image, save_image, to_planes, zero_pad
from .partition import AggregateMetrics, PartitionPlan, aggregate_metrics, encode_blocks, reassemble, split
from .pipeline import EncodeSettings, compare_strategies, encode_image, generate_test_image, verify_image
from .simulator import Statevector, extract_image, run, run_fsl_fast, state_fidelity
from .spectrum import (
    FidelityValue,
    Spectrum,
    SpectrumBlock,
    averaged_fidelity,
    block_weight,
    classical_reconstruct,
    fidelity,
    forward_dft,
    truncate_spectrum,
)

__version__ = "0.1.0"
