"""Fast-time FFT, range profiles and subject localization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import derive_waveform
from .errors import ConfigError, ProcessingError
from .simulate import RawDataCube


@dataclass(frozen=True)
class RangeCube:
    """Range-transformed cube indexed (frame, tx, rx, range bin)."""

    bins: np.ndarray  # complex64
    n_fft_range: int
    bin_width_m: float


@dataclass(frozen=True)
class SubjectLocation:
    """Range bin holding the subject, with its metric range."""

    bin: int
    range_m: float


def range_fft(cube: RawDataCube, n_fft_range: int) -> RangeCube:
    """Zero-padded FFT of every channel's fast-time vector.

    Parameters
    ----------
    cube : RawDataCube
    n_fft_range : int
        FFT length; >= n_adc and a power of two.

    Returns
    -------
    RangeCube
        bin_width_m = range_resolution * n_adc / n_fft_range, so zero
        padding refines the grid without changing the resolution.
    """
    n_adc = cube.chirp.n_adc
    if n_fft_range < n_adc:
        raise ConfigError(
            f"n_fft_range {n_fft_range} is smaller than n_adc {n_adc}"
        )
    if n_fft_range & (n_fft_range - 1):
        raise ConfigError(f"n_fft_range must be a power of two, got {n_fft_range}")
    wf = derive_waveform(cube.chirp)
    # float64 internally; the stored cube is complex64.
    bins = np.fft.fft(cube.samples.astype(np.complex128), n=n_fft_range, axis=-1)
    return RangeCube(
        bins=bins.astype(np.complex64),
        n_fft_range=n_fft_range,
        bin_width_m=wf.range_resolution * n_adc / n_fft_range,
    )


def locate_subject(rc: RangeCube) -> SubjectLocation:
    """Find the range bin with the largest magnitude summed over channels and frames.

    Ties resolve to the lowest bin (argmax returns the first maximum).
    """
    if rc.bins.size == 0:
        raise ProcessingError("empty range cube")
    profile = np.abs(rc.bins).sum(axis=(0, 1, 2))
    bin_idx = int(np.argmax(profile))
    return SubjectLocation(bin=bin_idx, range_m=bin_idx * rc.bin_width_m)


def extract_range_bin(rc: RangeCube, bin_idx: int) -> np.ndarray:
    """Slow-time matrix of one range bin.

    Returns
    -------
    ndarray, complex, shape (n_tx * n_rx, n_frames)
        Channel axis is row-major over (tx, rx).
    """
    n_bins = rc.bins.shape[-1]
    if not 0 <= bin_idx < n_bins:
        raise ProcessingError(f"range bin {bin_idx} outside 0..{n_bins - 1}")
    frames, n_tx, n_rx = rc.bins.shape[:3]
    slab = rc.bins[:, :, :, bin_idx]  # (frame, tx, rx)
    return slab.reshape(frames, n_tx * n_rx).T.copy()
