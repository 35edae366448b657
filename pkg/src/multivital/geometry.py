"""Antenna array geometry, MIMO virtual array and azimuth ULA selection.

Element positions are integer multiples of half the carrier wavelength so
that selection logic stays exact; conversion to meters happens only where
physical path lengths are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, ProcessingError

# Cascade front-end layout (azimuth, elevation) in half-wavelength units.
# Transmitters: the nine azimuth-row elements in ascending position, then the
# three elevation elements. Receivers follow the board's channel order: the
# four blocks sit at azimuth {11-14}, {50-53}, {46-49}, {0-3}.
TI_CASCADE_TX: tuple[tuple[int, int], ...] = (
    (0, 0), (4, 0), (8, 0), (12, 0), (16, 0), (20, 0), (24, 0), (28, 0), (32, 0),
    (9, 1), (10, 4), (11, 6),
)
TI_CASCADE_RX: tuple[tuple[int, int], ...] = (
    (11, 0), (12, 0), (13, 0), (14, 0),
    (50, 0), (51, 0), (52, 0), (53, 0),
    (46, 0), (47, 0), (48, 0), (49, 0),
    (0, 0), (1, 0), (2, 0), (3, 0),
)


@dataclass(frozen=True)
class ArrayGeometry:
    """Physical Tx/Rx element positions in half-wavelength units."""

    tx_elements: tuple[tuple[int, int], ...]
    rx_elements: tuple[tuple[int, int], ...]

    def validate(self) -> "ArrayGeometry":
        if not self.tx_elements or not self.rx_elements:
            raise ConfigError("geometry needs at least one Tx and one Rx element")
        return self

    @classmethod
    def ti_cascade(cls) -> "ArrayGeometry":
        """12 Tx x 16 Rx layout of the supported cascade evaluation board."""
        return cls(tx_elements=TI_CASCADE_TX, rx_elements=TI_CASCADE_RX)

    @property
    def n_tx(self) -> int:
        return len(self.tx_elements)

    @property
    def n_rx(self) -> int:
        return len(self.rx_elements)


class VirtualElement(NamedTuple):
    """One (Tx, Rx) pairing with its summed position."""

    tx: int  # transmit element index
    rx: int  # receive element index
    azimuth: int  # half-wavelength units
    elevation: int


@dataclass(frozen=True)
class VirtualArray:
    """All Tx/Rx pairings; element position = Tx position + Rx position."""

    elements: tuple[VirtualElement, ...]


def build_virtual_array(geom: ArrayGeometry) -> VirtualArray:
    """Form the MIMO virtual array of all (Tx, Rx) pairs, Tx-major order.

    Parameters
    ----------
    geom : ArrayGeometry

    Returns
    -------
    VirtualArray
        One element per pair; n_tx * n_rx entries.
    """
    geom.validate()
    elements = tuple(
        VirtualElement(ti, ri, ta + ra, te + re)
        for ti, (ta, te) in enumerate(geom.tx_elements)
        for ri, (ra, re) in enumerate(geom.rx_elements)
    )
    return VirtualArray(elements=elements)


@dataclass(frozen=True)
class AzimuthUlaSelection:
    """Dense azimuth-plane ULA drawn from the virtual array.

    chosen maps ULA index (equal to azimuth position minus the base offset)
    to a (tx, rx) index pair. blocks are maximal runs sharing one Tx and one
    contiguous Rx cluster; junctions are the ULA indices that open every
    block after the first, where near-field phase steps appear.
    """

    chosen: tuple[tuple[int, int], ...]
    blocks: tuple[tuple[int, int], ...]  # (start, stop) ULA indices, stop inclusive
    junctions: tuple[int, ...]


def select_azimuth_ula(va: VirtualArray) -> AzimuthUlaSelection:
    """Pick one virtual element per azimuth position to form a dense ULA.

    Walks positions left to right, preferring to stay on the current
    (Tx, Rx-cluster) pair so runs stay long; when a run cannot continue,
    the candidate with the lowest Tx index (then lowest Rx index) starts a
    new block and the boundary is recorded as a junction.

    Parameters
    ----------
    va : VirtualArray

    Returns
    -------
    AzimuthUlaSelection

    Raises
    ------
    ProcessingError
        If the azimuth-plane position sums do not cover a contiguous range.
    """
    plane = [e for e in va.elements if e.elevation == 0]
    if not plane:
        raise ProcessingError("virtual array has no azimuth-plane elements")
    by_pos: dict[int, list[VirtualElement]] = {}
    for e in plane:
        by_pos.setdefault(e.azimuth, []).append(e)
    lo, hi = min(by_pos), max(by_pos)
    missing = [p for p in range(lo, hi + 1) if p not in by_pos]
    if missing:
        raise ProcessingError(
            f"azimuth coverage gap: no virtual element at position(s) {missing}"
        )

    # Rx cluster membership drives the run-continuation rule: within one
    # block the Tx is fixed and consecutive positions step through one
    # contiguous Rx cluster. The virtual array does not carry the geometry,
    # so recover per-index offsets from the pairwise sums first.
    rx_pos: dict[int, int | None] = {}
    tx_pos: dict[int, int | None] = {}
    for e in plane:
        tx_pos.setdefault(e.tx, None)
        rx_pos.setdefault(e.rx, None)
    _solve_positions(plane, tx_pos, rx_pos)
    clusters = _clusters_from_positions(rx_pos)

    chosen: list[tuple[int, int]] = []
    blocks: list[tuple[int, int]] = []
    junctions: list[int] = []
    state: tuple[int, int] | None = None  # (tx index, rx cluster id)
    block_start = 0
    for pos in range(lo, hi + 1):
        idx = pos - lo
        candidates = sorted((e.tx, e.rx) for e in by_pos[pos])
        pick = None
        if state is not None:
            for tx, rx in candidates:
                if tx == state[0] and clusters[rx] == state[1]:
                    pick = (tx, rx)
                    break
        if pick is None:
            pick = candidates[0]
            if state is not None:
                blocks.append((block_start, idx - 1))
                junctions.append(idx)
                block_start = idx
            state = (pick[0], clusters[pick[1]])
        chosen.append(pick)
    blocks.append((block_start, hi - lo))
    return AzimuthUlaSelection(
        chosen=tuple(chosen), blocks=tuple(blocks), junctions=tuple(junctions)
    )


def _solve_positions(plane, tx_pos: dict[int, int | None], rx_pos: dict[int, int | None]) -> None:
    """Recover per-index Tx/Rx azimuth offsets from the pairwise sums.

    Offsets are determined up to one shared constant; the split constant is
    irrelevant because only Rx-position adjacency (cluster structure) is
    consumed. Anchor the lowest Tx index at offset 0.
    """
    anchor = min(tx_pos)
    tx_pos[anchor] = 0
    changed = True
    while changed:
        changed = False
        for e in plane:
            tp, rp = tx_pos[e.tx], rx_pos[e.rx]
            if tp is not None and rp is None:
                rx_pos[e.rx] = e.azimuth - tp
                changed = True
            elif rp is not None and tp is None:
                tx_pos[e.tx] = e.azimuth - rp
                changed = True
    if any(v is None for v in tx_pos.values()) or any(v is None for v in rx_pos.values()):
        raise ProcessingError("virtual array is not connected; cannot infer Rx clusters")


def _clusters_from_positions(rx_pos: dict[int, int]) -> dict[int, int]:
    ordered = sorted(rx_pos.items(), key=lambda kv: kv[1])
    clusters: dict[int, int] = {}
    cid = 0
    for k, (idx, pos) in enumerate(ordered):
        if k > 0 and pos - ordered[k - 1][1] > 1:
            cid += 1
        clusters[idx] = cid
    return clusters


def steering_vector(
    geom: ArrayGeometry, theta: float, phi: float
) -> tuple[np.ndarray, np.ndarray]:
    """Tx and Rx steering phasors for a plane wave from direction (theta, phi).

    theta is the off-boresight angle and phi orients the deviation between
    the azimuth plane (phi = 0) and the elevation plane (phi = pi/2), so the
    direction cosines are u = cos(phi) sin(theta) along azimuth and
    v = sin(phi) sin(theta) along elevation. Tx entries carry a positive
    exponent, Rx entries a negative one:

        a[i] = exp(+j 2 pi (p_az u + p_el v) / 2)
        b[i] = exp(-j 2 pi (q_az u + q_el v) / 2)

    with positions p, q in half-wavelength units (hence the /2 to express
    them in wavelengths).

    Parameters
    ----------
    geom : ArrayGeometry
    theta, phi : float
        Angles in radians, |theta| < pi/2.

    Returns
    -------
    (a, b) : tuple of complex ndarray
        Unit-modulus vectors of length n_tx and n_rx.
    """
    u = np.cos(phi) * np.sin(theta)
    v = np.sin(phi) * np.sin(theta)
    return steering_from_cosines(geom, u, v)


def steering_from_cosines(
    geom: ArrayGeometry, u: float, v: float
) -> tuple[np.ndarray, np.ndarray]:
    """Steering phasors from direction cosines (u azimuth, v elevation)."""
    tx = np.asarray(geom.tx_elements, dtype=np.float64)
    rx = np.asarray(geom.rx_elements, dtype=np.float64)
    a = np.exp(1j * np.pi * (tx[:, 0] * u + tx[:, 1] * v))
    b = np.exp(-1j * np.pi * (rx[:, 0] * u + rx[:, 1] * v))
    return a, b


def scene_direction_cosines(position: np.ndarray) -> tuple[float, float]:
    """Direction cosines (u, v) of a scene point seen from the array origin.

    Scene frame: x lateral (azimuth axis), y boresight depth, z vertical
    (elevation axis). u = x/r, v = z/r.
    """
    p = np.asarray(position, dtype=np.float64)
    r = float(np.linalg.norm(p))
    if r == 0.0:
        raise ProcessingError("direction undefined for a point at the array origin")
    return float(p[0] / r), float(p[2] / r)
