"""Azimuth/elevation spectra, near-field phase compensation, region selection.

The dense azimuth ULA is stitched from runs of different (Tx, Rx-cluster)
pairs. Under plane-wave arrival the stitching is exact, but for a close
subject the wavefront curvature differs between the physical Tx/Rx pairs
that realize adjacent ULA positions, leaving a phase step at every block
junction. Those steps are precomputed per steering angle into a table and
folded into a block-decomposed FFT.

Sign conventions. Raw IF data carry phase exp(-j pi p u) across virtual
position p (direction cosine u), so the forward DFT of raw data peaks at
negative grid indices. The region-selection pipeline therefore conjugates
the slow-time data before the azimuth transform (peak lands at
l = N sin(phi)/2, matching the grid theta_l = arcsin(2 l / N)) and
conjugates the selected spectrum value back so the slow-time phase keeps
the +4 pi R / lambda sign. The phase-error table is defined for raw-signed
data; the pipeline passes its negation to match the conjugated feed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, ProcessingError
from .geometry import ArrayGeometry, AzimuthUlaSelection
from .rangeproc import RangeCube, SubjectLocation, extract_range_bin

REGION_IDS = ("A", "P", "T", "E", "M")


@dataclass(frozen=True)
class AzimuthSpectrum:
    """Complex spectrum over the angular grid theta_l = arcsin(2l / n_fft)."""

    values: np.ndarray  # complex, length n_fft, index l + n_fft//2
    grid: np.ndarray  # rad, monotone


@dataclass(frozen=True)
class PhaseErrorTable:
    """Per-junction phase steps on the angular grid, for one subject range."""

    dphi: np.ndarray  # rad, shape (n_junctions, n_fft)
    range_z: float  # m

    @property
    def n_fft(self) -> int:
        return self.dphi.shape[1]


@dataclass(frozen=True)
class AngleMap:
    """Beamformed power over azimuth x elevation for one frame at one bin."""

    power: np.ndarray  # (n_azimuth, n_elevation), >= 0
    azimuth_grid: np.ndarray  # rad
    elevation_grid: np.ndarray  # rad


@dataclass(frozen=True)
class RegionSignal:
    """Slow-time complex signal attributed to one chest region."""

    region: str
    slowtime: np.ndarray  # complex, length n_frames

    def validate(self) -> "RegionSignal":
        if self.region not in REGION_IDS:
            raise ConfigError(f"region must be one of {REGION_IDS}, got {self.region!r}")
        return self


def _shifted_grid(n_fft: int) -> tuple[np.ndarray, np.ndarray]:
    l = np.arange(n_fft) - n_fft // 2
    return l, np.arcsin(2.0 * l / n_fft)


def _block_transform(
    x: np.ndarray,
    sel: AzimuthUlaSelection,
    n_fft: int,
    block_phasors: np.ndarray | None = None,
) -> np.ndarray:
    """Block-decomposed zero-padded DFT of ULA data, fftshifted.

    x has shape (n_ula, n_cols); each block's segment is transformed
    separately, shifted to its position with a twiddle factor, optionally
    rotated by a per-block phasor row, and accumulated.
    """
    l, _ = _shifted_grid(n_fft)
    out = np.zeros((n_fft, x.shape[1]), dtype=np.complex128)
    for b, (start, stop) in enumerate(sel.blocks):
        seg = x[start:stop + 1]
        spec = np.fft.fftshift(np.fft.fft(seg, n=n_fft, axis=0), axes=0)
        tw = np.exp(-2j * np.pi * l * start / n_fft)
        if block_phasors is not None:
            tw = tw * block_phasors[b]
        out += spec * tw[:, None]
    return out


def far_field_azimuth_fft(
    x: np.ndarray, sel: AzimuthUlaSelection, n_fft: int
) -> AzimuthSpectrum:
    """Zero-padded azimuth DFT computed through the block decomposition.

    Parameters
    ----------
    x : complex ndarray
        ULA samples ordered by ULA index.
    sel : AzimuthUlaSelection
    n_fft : int
        Transform length, >= len(x).

    Returns
    -------
    AzimuthSpectrum
        Equal to the direct zero-padded DFT of x.
    """
    x = np.asarray(x)
    _check_ula_input(x, sel, n_fft)
    values = _block_transform(x[:, None], sel, n_fft)[:, 0]
    _, grid = _shifted_grid(n_fft)
    return AzimuthSpectrum(values=values, grid=grid)


def near_field_azimuth_fft(
    x: np.ndarray,
    sel: AzimuthUlaSelection,
    table: PhaseErrorTable,
    n_fft: int,
) -> AzimuthSpectrum:
    """Azimuth DFT with cumulative junction phase corrections.

    Block b is rotated by exp(-j sum of the first b table rows), so a
    signal whose blocks carry the tabulated phase steps is re-aligned
    before recombination. An all-zero table reproduces
    far_field_azimuth_fft exactly.
    """
    x = np.asarray(x)
    _check_ula_input(x, sel, n_fft)
    if table.dphi.shape != (len(sel.junctions), n_fft):
        raise ProcessingError(
            f"phase table shape {table.dphi.shape} does not match "
            f"{len(sel.junctions)} junctions x n_fft {n_fft}"
        )
    phasors = _cumulative_phasors(table)
    values = _block_transform(x[:, None], sel, n_fft, phasors)[:, 0]
    _, grid = _shifted_grid(n_fft)
    return AzimuthSpectrum(values=values, grid=grid)


def _cumulative_phasors(table: PhaseErrorTable) -> np.ndarray:
    """Per-block correction phasors: identity for block 0, then e^{-j cumsum}."""
    cum = np.cumsum(table.dphi, axis=0)
    n_fft = table.n_fft
    phasors = np.ones((cum.shape[0] + 1, n_fft), dtype=np.complex128)
    phasors[1:] = np.exp(-1j * cum)
    return phasors


def _check_ula_input(x: np.ndarray, sel: AzimuthUlaSelection, n_fft: int) -> None:
    if x.shape[0] != len(sel.chosen):
        raise ProcessingError(
            f"expected {len(sel.chosen)} ULA samples, got {x.shape[0]}"
        )
    if n_fft < x.shape[0]:
        raise ConfigError(f"n_fft {n_fft} is smaller than the array length {x.shape[0]}")


def _element_coords(geom: ArrayGeometry, wavelength: float):
    half = wavelength / 2.0  # m
    tx = np.array([(a * half, 0.0, e * half) for a, e in geom.tx_elements])
    rx = np.array([(a * half, 0.0, e * half) for a, e in geom.rx_elements])
    return tx, rx


def _path_difference(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|p - a| - |p - b| without catastrophic cancellation.

    Uses |p-a|^2 - |p-b|^2 = (b-a) . (2p - a - b), accurate even when the
    two distances agree to many digits (far subjects).
    """
    na = np.linalg.norm(p - a, axis=-1)
    nb = np.linalg.norm(p - b, axis=-1)
    num = np.sum((b - a) * (2.0 * p - a - b), axis=-1)
    return num / (na + nb)


def junction_phase_error(
    sel: AzimuthUlaSelection,
    geom: ArrayGeometry,
    wavelength: float,
    z: float,
    theta_l,
) -> np.ndarray:
    """Phase step at every block junction for a subject at boresight range z.

    The subject sits at P = (z tan(theta_l), z, 0). Every virtual element
    carries a near-field phase error: its exact two-way (Tx -> P -> Rx)
    path against the plane-wave phase its ULA position implies,

        eps_e = (2 pi / lambda) L_e + pi p_e sin(theta_l)  (+ const)

    A block's error is the mean of eps over its elements, and the junction
    step is the later block's error minus the earlier block's. Summing the
    steps through block b telescopes to that block's own mean error, so
    the cumulative per-block correction re-focuses the whole array, not
    just the seams; referencing each block to its mean keeps the residual
    zero-centered inside every block. For single-element blocks the step
    reduces to the exact path difference of the two elements. dphi -> 0 as
    z -> infinity at rate O(1/z).

    Parameters
    ----------
    sel, geom : selection and physical geometry
    wavelength : float, m
    z : float
        Boresight range, m, > 0.
    theta_l : float or array
        Steering angle(s), rad.

    Returns
    -------
    ndarray
        Shape (n_junctions,) for scalar theta_l, else (n_junctions, len).
    """
    if not z > 0:
        raise ConfigError(f"boresight range z must be > 0, got {z}")
    theta = np.asarray(theta_l, dtype=np.float64)
    scalar = theta.ndim == 0
    th = np.atleast_1d(theta)
    p = np.stack([z * np.tan(th), np.full_like(th, z), np.zeros_like(th)], axis=-1)
    u = np.sin(th)
    tx_xyz, rx_xyz = _element_coords(geom, wavelength)
    tx_az = [a for a, _ in geom.tx_elements]
    rx_az = [a for a, _ in geom.rx_elements]

    tx_0, rx_0 = sel.chosen[0]
    eps = np.empty((len(sel.chosen), len(th)))
    for e, (ti, ri) in enumerate(sel.chosen):
        dp = (tx_az[ti] + rx_az[ri]) - (tx_az[tx_0] + rx_az[rx_0])
        d_path = (
            _path_difference(p, tx_xyz[ti], tx_xyz[tx_0])
            + _path_difference(p, rx_xyz[ri], rx_xyz[rx_0])
        )
        eps[e] = (2.0 * np.pi / wavelength) * d_path + np.pi * dp * u
    block_err = np.stack([eps[s:stop + 1].mean(axis=0) for s, stop in sel.blocks])
    out = block_err[1:] - block_err[:-1]
    return out[:, 0] if scalar else out


def build_phase_error_table(
    sel: AzimuthUlaSelection,
    geom: ArrayGeometry,
    wavelength: float,
    z: float,
    n_fft: int,
) -> PhaseErrorTable:
    """Tabulate junction phase errors over the full angular grid.

    Grid indices with |2l / n_fft| >= 1 have no real steering angle and get
    zero entries (no compensation there).
    """
    l, _ = _shifted_grid(n_fft)
    frac = 2.0 * l / n_fft
    valid = np.abs(frac) < 1.0
    dphi = np.zeros((len(sel.junctions), n_fft))
    dphi[:, valid] = junction_phase_error(
        sel, geom, wavelength, z, np.arcsin(frac[valid])
    )
    return PhaseErrorTable(dphi=dphi, range_z=z)


def elevation_spectrum(
    y: np.ndarray, row_positions: Sequence[float], grid: np.ndarray
) -> np.ndarray:
    """Matched-filter power over elevation angles for nonuniform row positions.

    Parameters
    ----------
    y : complex ndarray
        One value per elevation row (conjugate-fed convention).
    row_positions : sequence of float
        Row positions in half-wavelength units.
    grid : ndarray
        Elevation angles to evaluate, rad.

    Returns
    -------
    ndarray
        |sum_i y_i e^{-j pi p_i sin(theta)}|^2 per grid angle.
    """
    y = np.asarray(y)
    p = np.asarray(row_positions, dtype=np.float64)
    if y.shape[0] != p.shape[0]:
        raise ProcessingError("one value per elevation row required")
    phase = np.exp(-1j * np.pi * np.outer(p, np.sin(np.asarray(grid))))
    return np.abs(y @ phase) ** 2


def _elevation_rows(geom: ArrayGeometry) -> dict[int, list[tuple[int, int]]]:
    """Virtual elements grouped by elevation row: {el_pos: [(channel, az_pos)]}."""
    n_rx = geom.n_rx
    rows: dict[int, list[tuple[int, int]]] = {}
    for ti, (ta, te) in enumerate(geom.tx_elements):
        for ri, (ra, re) in enumerate(geom.rx_elements):
            rows.setdefault(te + re, []).append((ti * n_rx + ri, ta + ra))
    return rows


def select_region_signal(
    rc: RangeCube,
    loc: SubjectLocation,
    regions: Mapping[str, tuple[float, float]],
    sel: AzimuthUlaSelection,
    geom: ArrayGeometry,
    wavelength: float,
    n_fft: int,
    calibrate: bool = True,
    range_z: float | None = None,
) -> list[RegionSignal]:
    """Slow-time signal per chest region from its (azimuth, elevation) angles.

    For every frame the conjugated subject-bin data are steered to each
    region: the dense azimuth ULA through the (optionally near-field
    corrected) block FFT evaluated at the grid index nearest sin(phi), the
    elevation rows through matched sums at the same direction cosine, then
    all rows are combined with elevation matched weights at theta. The
    result is conjugated back so phase grows with range.

    Parameters
    ----------
    rc, loc : range cube and subject location
    regions : mapping region id -> (phi, theta) in rad
    sel, geom : ULA selection and geometry
    wavelength : float, m
    n_fft : int
        Azimuth transform length.
    calibrate : bool
        Apply near-field junction compensation to the azimuth ULA.
    range_z : float, optional
        Boresight range for the phase table; defaults to loc.range_m.

    Returns
    -------
    list of RegionSignal, in the order of the regions mapping.
    """
    if not 1 <= len(regions) <= 5:
        raise ProcessingError(f"expected 1..5 regions, got {len(regions)}")
    for rid in regions:
        if rid not in REGION_IDS:
            raise ConfigError(f"region must be one of {REGION_IDS}, got {rid!r}")

    channels = extract_range_bin(rc, loc.bin)  # (n_tx*n_rx, frames)
    y = np.conj(channels.astype(np.complex128))
    ula_idx = [t * geom.n_rx + r for t, r in sel.chosen]
    x_ula = y[ula_idx, :]  # (86, frames)

    phasors = None
    if calibrate:
        z = loc.range_m if range_z is None else range_z
        table = build_phase_error_table(sel, geom, wavelength, z, n_fft)
        # Conjugated feed flips the sign of the junction steps.
        phasors = _cumulative_phasors(
            PhaseErrorTable(dphi=-table.dphi, range_z=table.range_z)
        )
    spectra = _block_transform(x_ula, sel, n_fft, phasors)  # (n_fft, frames)

    rows = _elevation_rows(geom)
    upper_rows = sorted(e for e in rows if e != 0)
    n_ula = len(sel.chosen)

    out: list[RegionSignal] = []
    for rid, (phi, theta) in regions.items():
        if not (abs(phi) < np.pi / 2 and abs(theta) < np.pi / 2):
            raise ProcessingError(
                f"region {rid} angles ({phi:.3f}, {theta:.3f}) rad outside the field of view"
            )
        l_star = int(round(n_fft * np.sin(phi) / 2.0))
        if not -n_fft // 2 <= l_star <= n_fft // 2 - 1:
            raise ProcessingError(
                f"region {rid} azimuth {phi:.3f} rad falls off the angular grid"
            )
        u_star = 2.0 * l_star / n_fft

        row_values = [spectra[l_star + n_fft // 2, :] / n_ula]
        row_weights = [1.0 + 0.0j]
        for el in upper_rows:
            members = rows[el]
            ch = [c for c, _ in members]
            az = np.array([a for _, a in members], dtype=np.float64)
            w = np.exp(-1j * np.pi * az * u_star)
            row_values.append((w @ y[ch, :]) / len(members))
            row_weights.append(np.exp(-1j * np.pi * el * np.sin(theta)))

        combined = np.zeros_like(row_values[0])
        for wgt, val in zip(row_weights, row_values):
            combined += wgt * val
        combined /= len(row_values)
        out.append(RegionSignal(region=rid, slowtime=np.conj(combined)).validate())
    return out


def angle_map(
    rc: RangeCube,
    loc: SubjectLocation,
    sel: AzimuthUlaSelection,
    geom: ArrayGeometry,
    wavelength: float,
    n_fft: int,
    frame: int = 0,
    elevation_grid: np.ndarray | None = None,
    calibrate: bool = True,
    range_z: float | None = None,
) -> AngleMap:
    """Azimuth x elevation beamformed power of one frame at the subject bin."""
    n_frames = rc.bins.shape[0]
    if not 0 <= frame < n_frames:
        raise ProcessingError(f"frame {frame} outside 0..{n_frames - 1}")
    if elevation_grid is None:
        elevation_grid = np.deg2rad(np.arange(-45.0, 46.0, 1.0))

    slab = rc.bins[frame, :, :, loc.bin].reshape(-1).astype(np.complex128)
    y = np.conj(slab)
    ula_idx = [t * geom.n_rx + r for t, r in sel.chosen]
    phasors = None
    if calibrate:
        z = loc.range_m if range_z is None else range_z
        table = build_phase_error_table(sel, geom, wavelength, z, n_fft)
        phasors = _cumulative_phasors(
            PhaseErrorTable(dphi=-table.dphi, range_z=table.range_z)
        )
    s0 = _block_transform(y[ula_idx][:, None], sel, n_fft, phasors)[:, 0]
    n_ula = len(sel.chosen)
    l, az_grid = _shifted_grid(n_fft)
    u_l = 2.0 * l / n_fft

    rows = _elevation_rows(geom)
    upper_rows = sorted(e for e in rows if e != 0)
    row_vals = [s0 / n_ula]  # (n_fft,) per row
    for el in upper_rows:
        members = rows[el]
        ch = [c for c, _ in members]
        az = np.array([a for _, a in members], dtype=np.float64)
        # Matched sum of this sparse row at every grid direction cosine.
        steer = np.exp(-1j * np.pi * np.outer(u_l, az))
        row_vals.append((steer @ y[ch]) / len(members))

    el_pos = [0] + upper_rows
    weights = np.exp(
        -1j * np.pi * np.outer(np.asarray(el_pos, dtype=np.float64),
                               np.sin(elevation_grid))
    )  # (n_rows, n_el)
    stack = np.stack(row_vals, axis=0)  # (n_rows, n_fft)
    combined = np.einsum("re,rl->le", weights, stack) / len(el_pos)
    return AngleMap(
        power=np.abs(combined) ** 2,
        azimuth_grid=az_grid,
        elevation_grid=np.asarray(elevation_grid, dtype=np.float64),
    )
