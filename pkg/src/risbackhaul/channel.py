"""Link budget for single backhaul hops.

Direct hops use a log-distance model anchored at ``d0``; hops reflected off
a RIS panel use the combined travelled distance scaled by the squared
element count, minus the panel's beamforming gain. SNR follows from a fixed
transmit power over thermal noise, and capacity from a Shannon bound derated
by a link efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import RadioParams, RisPanel


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class HopBudget:
    pl_db: float
    snr_db: float
    capacity_bps: float
    feasible: bool


@dataclass(frozen=True)
class Direct:
    d: float


@dataclass(frozen=True)
class ViaRis:
    d1: float
    d2: float
    panel: RisPanel


def pl_direct_db(d: float, radio: RadioParams) -> float:
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    ratio = d / radio.d0_m if radio.normalize_by_d0 else d
    return radio.pl_ref_db + 10.0 * radio.alpha * math.log10(ratio)


def pl_ris_db(d1: float, d2: float, panel: RisPanel, radio: RadioParams) -> float:
    if not (d1 > 0 and d2 > 0):
        raise ValueError(f"distances must be positive, got {d1}, {d2}")
    span = panel.elements_m**2 * (d1 + d2)
    if radio.normalize_by_d0:
        span /= radio.d0_m
    return radio.pl_ref_db + 10.0 * radio.beta * math.log10(span) - panel.gain_bf_db


def snr_db(pl_db: float, radio: RadioParams) -> float:
    p_tx = min(radio.tx_power_dbm, radio.tx_power_max_dbm)
    return p_tx + radio.g_tx_dbi + radio.g_rx_dbi - pl_db - radio.noise_dbm


def capacity_bps(snr_db: float, radio: RadioParams) -> float:
    if snr_db == -math.inf:
        return 0.0
    return radio.eta * radio.b_eff_hz * math.log2(1.0 + db_to_linear(snr_db))


def hop_budget(kind: Direct | ViaRis, radio: RadioParams) -> HopBudget:
    if isinstance(kind, Direct):
        pl = pl_direct_db(kind.d, radio)
    elif isinstance(kind, ViaRis):
        pl = pl_ris_db(kind.d1, kind.d2, kind.panel, radio)
    else:
        raise TypeError(f"unknown hop kind {kind!r}")
    snr = snr_db(pl, radio)
    return HopBudget(pl, snr, capacity_bps(snr, radio), snr >= radio.snr_min_db)


def max_direct_range_m(radio: RadioParams) -> float:
    """Distance at which a direct hop's SNR lands exactly on the threshold."""
    pl_max = snr_db(0.0, radio) - radio.snr_min_db
    d = 10.0 ** ((pl_max - radio.pl_ref_db) / (10.0 * radio.alpha))
    return d * radio.d0_m if radio.normalize_by_d0 else d
