"""Fault detection for three-phase voltage records.

Synthetic fault-signal generation, an orthogonal wavelet filter bank, FT and
STFT energy indices, fixed-point ICA with a fault performance index, and
threshold detectors built on top of them.
"""

__version__ = "0.1.0"

from .detect import (
    AdaptiveThreshold,
    DetectionReport,
    DetectorConfig,
    EnergyTable,
    FixedThreshold,
    Spans,
    calibrate_threshold,
    default_spans,
    energy_detect,
    energy_table,
    ica_detect,
    wavelet_detect,
)
from .dwt import (
    DecompositionTree,
    WaveletFilterPair,
    db4_filters,
    detail_series,
    dwt_decompose,
    dwt_reconstruct,
    wavelet_energy_index,
)
from .errors import (
    BoundsError,
    ConfigError,
    DegenerateInputError,
    FaultwaveError,
    NumericalError,
    ShapeError,
)
from .ica import (
    IcaConfig,
    IcaModel,
    PiSeries,
    WhiteningModel,
    build_data_matrix,
    center,
    fastica,
    fit_ica,
    negentropy_proxy,
    performance_index,
    unmix,
    whiten,
)
from .signal_model import (
    FaultSpec,
    FaultType,
    NoiseSpec,
    ThreePhaseRecord,
    Trace,
    WaveformConfig,
    add_noise,
    generate_baseline,
    inject_fault,
    select_channel,
    with_frequency_deviation,
)
from .spectral import Spectrogram, Spectrum, dft, highband_energy_index, stft

__all__ = [
    "__version__",
    # signal model
    "WaveformConfig", "FaultSpec", "FaultType", "NoiseSpec", "Trace",
    "ThreePhaseRecord", "generate_baseline", "inject_fault", "add_noise",
    "with_frequency_deviation", "select_channel",
    # wavelet
    "WaveletFilterPair", "DecompositionTree", "db4_filters", "dwt_decompose",
    "dwt_reconstruct", "detail_series", "wavelet_energy_index",
    # spectral
    "Spectrum", "Spectrogram", "dft", "stft", "highband_energy_index",
    # ica
    "IcaConfig", "IcaModel", "WhiteningModel", "PiSeries", "build_data_matrix",
    "center", "whiten", "fastica", "fit_ica", "unmix", "negentropy_proxy",
    "performance_index",
    # detect
    "DetectorConfig", "DetectionReport", "EnergyTable", "FixedThreshold",
    "AdaptiveThreshold", "Spans", "default_spans", "calibrate_threshold",
    "wavelet_detect", "ica_detect", "energy_detect", "energy_table",
    # errors
    "FaultwaveError", "ConfigError", "BoundsError", "ShapeError",
    "DegenerateInputError", "NumericalError",
]
