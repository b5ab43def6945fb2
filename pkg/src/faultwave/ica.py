"""Blind source separation by fixed-point ICA and the fault performance index.

Pipeline: pack channels into a data matrix, remove row means, whiten by PCA
(dropping near-zero principal components), then run the symmetric fixed-point
iteration that maximizes a negentropy proxy
``J(w) = (E[G(w.z)] - E[G(nu)])**2`` for ``nu`` standard normal, with
``G = log cosh`` (tanh contrast) or ``G(u) = u**4/4`` (cube contrast).

The fault performance index compares the unmixed record against an unmixed
periodic "normal" template built from pre-fault data: it stays near zero
while the record matches its healthy pattern and jumps at fault onset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundsError,
    ConfigError,
    DegenerateInputError,
    NumericalError,
    ShapeError,
)
from .signal_model import ThreePhaseRecord, Trace

# E[log cosh(nu)] for nu ~ N(0,1); frozen from high-resolution quadrature
# (tests re-derive it). E[nu**4 / 4] = 3/4 for the cube contrast.
GAUSSIAN_LOGCOSH_MEAN = 0.374567207491438
GAUSSIAN_QUARTIC_MEAN = 0.75

# Eigenvalues below this fraction of the largest are treated as rank loss.
RANK_TOLERANCE = 1e-12


@dataclass(eq=False)
class WhiteningModel:
    """Centering plus PCA whitening map fitted to one data matrix."""

    mean: np.ndarray
    projection: np.ndarray
    dewhitening: np.ndarray
    eigenvalues: np.ndarray


@dataclass(eq=False)
class IcaModel:
    """Fitted unmixing model.

    ``unmixing`` acts on whitened data; ``composite_unmixing`` (unmixing
    times the whitening projection) acts on raw centered data, and
    ``mixing_estimate`` is its pseudo-inverse.
    """

    unmixing: np.ndarray
    sources: np.ndarray
    contrast: str
    iterations_used: int
    converged: bool
    seed: int = 0
    composite_unmixing: np.ndarray | None = None
    mixing_estimate: np.ndarray | None = None


@dataclass(eq=False)
class PiSeries:
    """Per-sample performance index over an analysis span."""

    values: np.ndarray
    start_sample: int
    sample_rate_hz: float
    window_len: int
    reference: str

    def time_axis(self) -> np.ndarray:
        return (self.start_sample + np.arange(self.values.shape[0])) / self.sample_rate_hz


@dataclass(frozen=True)
class IcaConfig:
    """Options for fitting and for the performance index.

    ``retain`` caps the principal components kept while whitening. The
    default of 2 matches healthy data: balanced three-phase voltages (and a
    delay-embedded sinusoid) span two dimensions, and dropping the remainder
    keeps pure-noise directions from dominating the index.
    """

    contrast: str = "tanh"
    seed: int = 0
    max_iter: int = 500
    tol: float = 1e-6
    embedding_dim: int | None = None
    fundamental_hz: float = 50.0
    retain: int | float | None = 2

    def __post_init__(self) -> None:
        if self.contrast not in ("tanh", "cube"):
            raise ConfigError(f"contrast must be 'tanh' or 'cube', got {self.contrast!r}")
        if self.embedding_dim is not None and self.embedding_dim < 2:
            raise ConfigError("embedding_dim must be at least 2")


def build_data_matrix(
    source: ThreePhaseRecord | Trace, embedding_dim: int | None = None
) -> np.ndarray:
    """Pack a record or trace into an m x N channel matrix.

    A record packs directly as its three phase rows. A trace is delay
    embedded: row i of the d x (N-d+1) result is the trace lagged by i
    samples.

    Raises:
        ShapeError: trace shorter than the embedding dimension.
        ConfigError: trace given without an embedding dimension.
    """
    if isinstance(source, ThreePhaseRecord):
        return source.samples.copy()

    if embedding_dim is None:
        raise ConfigError("a single trace requires an embedding dimension")
    d = embedding_dim
    n = source.n_samples
    if n < d + 1:
        raise ShapeError(f"trace of length {n} is too short for embedding dimension {d}")
    cols = n - d + 1
    return np.stack([source.samples[i : i + cols] for i in range(d)])


def center(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Remove row means; returns the centered matrix and the means."""
    mean = matrix.mean(axis=1)
    return matrix - mean[:, None], mean


def whiten(
    centered: np.ndarray,
    retain: int | float | None = None,
    mean: np.ndarray | None = None,
) -> tuple[np.ndarray, WhiteningModel]:
    """PCA-whiten centered data so the channel covariance is the identity.

    Components are ordered by descending eigenvalue; eigenvalues below
    ``RANK_TOLERANCE`` times the largest are dropped. ``retain`` further caps
    the kept components: an int keeps that many, a float in (0, 1] keeps the
    smallest count reaching that variance fraction.

    Args:
        centered: m x N matrix with zero row means.
        retain: Optional component cap (count or variance fraction).
        mean: Row means removed beforehand, stored for later inversion
            (zeros if omitted).

    Raises:
        DegenerateInputError: all-zero input.
    """
    m, n_cols = centered.shape
    cov = centered @ centered.T / n_cols
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    if eigvals[0] <= 0.0:
        raise DegenerateInputError("cannot whiten all-zero data")
    keep = eigvals > RANK_TOLERANCE * eigvals[0]
    r = int(np.count_nonzero(keep))
    if isinstance(retain, int):
        r = min(r, max(retain, 1))
    elif isinstance(retain, float):
        if not 0.0 < retain <= 1.0:
            raise ConfigError(f"variance fraction must lie in (0, 1], got {retain}")
        fractions = np.cumsum(eigvals) / np.sum(eigvals)
        r = min(r, int(np.searchsorted(fractions, retain) + 1))

    eigvals = eigvals[:r]
    eigvecs = eigvecs[:, :r]
    scale = 1.0 / np.sqrt(eigvals)
    projection = scale[:, None] * eigvecs.T
    dewhitening = eigvecs * np.sqrt(eigvals)[None, :]
    model = WhiteningModel(
        mean=np.zeros(m) if mean is None else np.asarray(mean, dtype=float),
        projection=projection,
        dewhitening=dewhitening,
        eigenvalues=eigvals,
    )
    return projection @ centered, model


def _contrast_funcs(contrast: str):
    if contrast == "tanh":
        return np.tanh, lambda u: 1.0 - np.tanh(u) ** 2
    if contrast == "cube":
        return lambda u: u**3, lambda u: 3.0 * u**2
    raise ConfigError(f"unknown contrast {contrast!r}")


def _symmetric_decorrelation(w: np.ndarray) -> np.ndarray:
    """W <- (W W^T)^(-1/2) W, making the rows exactly orthonormal."""
    s, u = np.linalg.eigh(w @ w.T)
    if s[0] <= RANK_TOLERANCE * s[-1]:
        raise NumericalError("unmixing update lost rank during decorrelation")
    return (u * (1.0 / np.sqrt(s))) @ u.T @ w


def fastica(
    z: np.ndarray,
    contrast: str = "tanh",
    max_iter: int = 500,
    tol: float = 1e-6,
    seed: int = 0,
) -> IcaModel:
    """Symmetric fixed-point iteration on whitened data.

    Every sweep updates each row as ``w <- E[z g(w.z)] - E[g'(w.z)] w`` and
    re-orthonormalizes all rows symmetrically; convergence is declared when
    ``max_k |1 - |<w_new, w_old>||`` drops below ``tol``. Initialization is a
    seeded random orthonormal matrix, so results are reproducible.

    Non-convergence is reported through ``converged=False`` rather than an
    exception; NaN in the update raises :class:`NumericalError`.
    """
    r, n_cols = z.shape
    g, g_prime = _contrast_funcs(contrast)
    rng = np.random.default_rng(seed)
    w = _symmetric_decorrelation(rng.standard_normal((r, r)))

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        projected = w @ z
        w_new = (g(projected) @ z.T) / n_cols - g_prime(projected).mean(axis=1)[:, None] * w
        if not np.all(np.isfinite(w_new)):
            raise NumericalError("fixed-point update produced non-finite values")
        w_new = _symmetric_decorrelation(w_new)
        drift = np.max(np.abs(1.0 - np.abs(np.sum(w_new * w, axis=1))))
        w = w_new
        if drift < tol:
            converged = True
            break

    return IcaModel(
        unmixing=w,
        sources=w @ z,
        contrast=contrast,
        iterations_used=iterations,
        converged=converged,
        seed=seed,
    )


def fit_ica(
    matrix: np.ndarray,
    retain: int | float | None = None,
    contrast: str = "tanh",
    max_iter: int = 500,
    tol: float = 1e-6,
    seed: int = 0,
) -> tuple[IcaModel, WhiteningModel]:
    """Center, whiten, and unmix a raw data matrix in one step.

    Returns the fitted :class:`IcaModel` with its composite unmixing and
    mixing estimate filled in, plus the whitening model for later reuse.
    """
    centered, mean = center(matrix)
    z, whitening = whiten(centered, retain=retain, mean=mean)
    model = fastica(z, contrast=contrast, max_iter=max_iter, tol=tol, seed=seed)
    model.composite_unmixing = model.unmixing @ whitening.projection
    model.mixing_estimate = np.linalg.pinv(model.composite_unmixing)
    return model, whitening


def unmix(model: IcaModel, whitening: WhiteningModel, matrix: np.ndarray) -> np.ndarray:
    """Apply the fitted unmixing to new data: S = W . projection . (X - mean).

    On the training matrix this reproduces ``model.sources`` exactly.

    Raises:
        ShapeError: channel count differs from the whitening model.
    """
    if matrix.shape[0] != whitening.mean.shape[0]:
        raise ShapeError(
            f"matrix has {matrix.shape[0]} rows, whitening model expects "
            f"{whitening.mean.shape[0]}"
        )
    return model.unmixing @ whitening.projection @ (matrix - whitening.mean[:, None])


def negentropy_proxy(direction: np.ndarray, z: np.ndarray, contrast: str = "tanh") -> float:
    """Evaluate J(w) = (E[G(w.z)] - E[G(nu)])**2 for a unit direction."""
    u = np.asarray(direction, dtype=float) @ z
    if contrast == "tanh":
        value = np.mean(np.log(np.cosh(u)))
        reference = GAUSSIAN_LOGCOSH_MEAN
    elif contrast == "cube":
        value = np.mean(u**4 / 4.0)
        reference = GAUSSIAN_QUARTIC_MEAN
    else:
        raise ConfigError(f"unknown contrast {contrast!r}")
    return float((value - reference) ** 2)


def _phase_positions(
    sample_indices: np.ndarray, anchor: int, fs: float, fundamental_hz: float, period: int
) -> np.ndarray:
    """Fractional template slot for each sample, locked to the fundamental.

    The sample offset is reduced modulo the true samples-per-cycle before
    scaling to slots, so a fundamental that does not divide the sample rate
    cannot accumulate phase drift across the span, and an integer ratio
    yields exact integer slots ((k - anchor) mod period).
    """
    samples_per_cycle = fs / fundamental_hz
    remainder = np.mod(sample_indices - anchor, samples_per_cycle)
    return remainder * (period / samples_per_cycle)


def _build_template(
    samples: np.ndarray,
    prefault: tuple[int, int],
    anchor: int,
    fs: float,
    fundamental_hz: float,
    period: int,
) -> np.ndarray:
    """Average the pre-fault segment into one phase-locked cycle.

    Each sample is deposited onto its two neighboring phase slots with linear
    weights, so slot averages stay centered even when the fundamental does
    not divide the sample rate. At an integer samples-per-cycle ratio the
    deposit is an exact per-slot average.
    """
    lo, hi = prefault
    segment = samples[:, lo:hi]
    if not np.any(segment):
        raise DegenerateInputError("pre-fault segment is identically zero")

    positions = _phase_positions(np.arange(lo, hi), anchor, fs, fundamental_hz, period)
    left = np.floor(positions).astype(int) % period
    right = (left + 1) % period
    frac = positions - np.floor(positions)

    weights = np.bincount(left, weights=1.0 - frac, minlength=period)
    weights += np.bincount(right, weights=frac, minlength=period)
    if np.any(weights <= 1e-12):
        raise DegenerateInputError(
            "pre-fault span does not cover every phase of the fundamental cycle"
        )
    template = np.zeros((samples.shape[0], period))
    for row in range(samples.shape[0]):
        template[row] = np.bincount(left, weights=(1.0 - frac) * segment[row], minlength=period)
        template[row] += np.bincount(right, weights=frac * segment[row], minlength=period)
    return template / weights[None, :]


def _read_template(
    template: np.ndarray,
    sample_indices: np.ndarray,
    anchor: int,
    fs: float,
    fundamental_hz: float,
) -> np.ndarray:
    """Tile the cycle template over arbitrary samples.

    Catmull-Rom interpolation between phase slots; at integer slot positions
    (fundamental dividing the sample rate) it degenerates to exact lookup.
    """
    period = template.shape[1]
    positions = _phase_positions(sample_indices, anchor, fs, fundamental_hz, period)
    i1 = np.floor(positions).astype(int) % period
    f = positions - np.floor(positions)
    p0 = template[:, (i1 - 1) % period]
    p1 = template[:, i1]
    p2 = template[:, (i1 + 1) % period]
    p3 = template[:, (i1 + 2) % period]
    return p1 + 0.5 * f * (
        p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0))
    )


def performance_index(
    record: ThreePhaseRecord,
    prefault_span: tuple[int, int],
    analysis_span: tuple[int, int],
    config: IcaConfig = IcaConfig(),
) -> PiSeries:
    """Fault performance index over the analysis span.

    The unmixing model is fitted on the analysis-span data; a "normal"
    template is built by tiling the pre-fault segment periodically
    (phase-locked, one fundamental period long) over the analysis span; and
    the index at sample k is the squared norm of the absolute difference
    between the unmixed template and the fitted sources, aggregated over a
    trailing one-cycle window. Near zero while the record is healthy, it
    jumps at fault onset.

    Args:
        record: Record under analysis.
        prefault_span: Half-open sample range known to be fault-free; must
            start no later than the analysis span, end before it does, and
            cover at least two fundamental cycles.
        analysis_span: Half-open sample range the index is computed on.
        config: Contrast, seed, optional delay embedding, and the fundamental
            used for phase locking.

    Raises:
        BoundsError: spans out of order or outside the record.
        DegenerateInputError: pre-fault span too short or all-zero.
    """
    n = record.n_samples
    p_lo, p_hi = prefault_span
    a_lo, a_hi = analysis_span
    if not (0 <= p_lo < p_hi <= n and 0 <= a_lo < a_hi <= n):
        raise BoundsError(f"spans {prefault_span}, {analysis_span} outside record of {n} samples")
    if p_lo > a_lo or p_hi >= a_hi:
        raise BoundsError("pre-fault span must precede the analysis span")

    fs = record.sample_rate_hz
    period = int(round(fs / config.fundamental_hz))
    if period < 2:
        raise ConfigError(
            f"fundamental {config.fundamental_hz} Hz leaves fewer than 2 samples per cycle"
        )
    if p_hi - p_lo < 2 * period:
        raise DegenerateInputError(
            f"pre-fault span of {p_hi - p_lo} samples covers fewer than two "
            f"fundamental cycles ({2 * period} samples)"
        )

    anchor = p_hi
    template = _build_template(record.samples, prefault_span, anchor, fs,
                               config.fundamental_hz, period)
    normal = _read_template(template, np.arange(a_lo, a_hi), anchor, fs,
                            config.fundamental_hz)
    actual = record.samples[:, a_lo:a_hi]

    if config.embedding_dim is not None:
        d = config.embedding_dim
        fit_matrix = build_data_matrix(Trace(actual[0], fs), embedding_dim=d)
        normal_matrix = build_data_matrix(Trace(normal[0], fs), embedding_dim=d)
    else:
        fit_matrix = actual
        normal_matrix = normal

    model, whitening = fit_ica(
        fit_matrix,
        retain=config.retain,
        contrast=config.contrast,
        max_iter=config.max_iter,
        tol=config.tol,
        seed=config.seed,
    )
    composite = model.composite_unmixing
    sources = model.sources
    normal_sources = composite @ (normal_matrix - whitening.mean[:, None])

    raw = np.sum(np.abs(normal_sources - sources) ** 2, axis=0)
    values = _trailing_mean(raw, period)
    return PiSeries(
        values=values,
        start_sample=a_lo,
        sample_rate_hz=fs,
        window_len=period,
        reference=(
            f"pre-fault samples [{p_lo}, {p_hi}) averaged into one "
            f"{period}-sample cycle, tiled phase-locked at "
            f"{config.fundamental_hz} Hz; index averaged over a trailing "
            f"{period}-sample window"
        ),
    )


def _trailing_mean(raw: np.ndarray, window: int) -> np.ndarray:
    """Mean of the last ``window`` samples (shorter at the series head).

    Aggregating the per-sample squared norm over one cycle keeps the index
    near zero on healthy data without delaying the rise at fault onset; the
    window trails, so no post-onset sample leaks into earlier index values.
    """
    cumulative = np.concatenate(([0.0], np.cumsum(raw)))
    n = raw.shape[0]
    idx = np.arange(1, n + 1)
    lo = np.maximum(idx - window, 0)
    return (cumulative[idx] - cumulative[lo]) / (idx - lo)
