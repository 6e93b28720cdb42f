"""Link budget, RSSI/SNR maps, and Monte-Carlo uncoded BPSK error rates.

BER uses a flat-fading abstraction: one complex gain per block of bits, drawn
from the generator's fading model with the K-factor redrawn per block from
Normal(mu_KF, |sigma_KF|); tap delays do not enter. Detection is the real
part after derotating by the known channel phase. Shadow fading is excluded,
keeping the comparison purely small-scale.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .genchan import draw_fades
from .params import ChannelParamSet
from .pathdata import Condition, ScenarioDataset, mw_to_dbm


@dataclass(frozen=True)
class LinkBudget:
    """Transmit/receive chain parameters; defaults are the 28 GHz cabin setup."""

    tx_power_dbm: float = 20.0
    gain_tx_dbi: float = 0.0
    gain_rx_dbi: float = 0.0
    noise_figure_db: float = 10.0
    bandwidth_hz: float = 1e9
    carrier_hz: float = 28e9
    line_loss_db: float = 0.0
    sensitivity_dbm: float = -120.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0 or self.carrier_hz <= 0:
            raise ValueError("bandwidth and carrier frequency must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LinkBudget":
        known = {f: d[f] for f in cls.__dataclass_fields__ if f in d}
        return cls(**known)


def noise_floor(budget: LinkBudget) -> float:
    """Thermal noise power in dBm over the budget bandwidth."""
    return -174.0 + 10.0 * math.log10(budget.bandwidth_hz) + budget.noise_figure_db


@dataclass(frozen=True)
class RssiPoint:
    rx_id: int
    position_m: tuple[float, float, float]
    condition: Condition
    rssi_dbm: float
    snr_db: float


def rssi_map(ds: ScenarioDataset) -> list[RssiPoint]:
    """Total received power and SNR per receiver; outage maps to -inf."""
    nf = noise_floor(ds.link_budget)
    out = []
    for rec in ds.records:
        rssi = mw_to_dbm(rec.total_power_mw) if rec.paths else -math.inf
        out.append(RssiPoint(rec.rx_id, rec.position_m, rec.condition, rssi, rssi - nf))
    return out


# --------------------------------------------------------------------------
# BPSK Monte Carlo
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    ber: float
    n_bits: int
    ci95: float


_BATCH_BLOCKS = 10_000  # fixed so batching never affects the random streams


def _normalize_channel(channel):
    if isinstance(channel, str):
        if channel.strip().lower() != "awgn":
            raise ValueError(f"unknown channel {channel!r}")
        return None
    params, condition = channel
    condition = Condition(condition) if isinstance(condition, str) else condition
    if condition not in (Condition.LOS, Condition.NLOS):
        raise ValueError(f"BER channels are LOS or NLOS, not {condition}")
    return params.block(condition), condition


def _block_fades(chan, n_blocks: int, rng: np.random.Generator) -> np.ndarray:
    if chan is None:
        return np.ones(n_blocks, dtype=complex)
    block, condition = chan
    if condition is Condition.LOS:
        kf_db = rng.normal(block.mu_kf_db, abs(block.sigma_kf_db), n_blocks)
        return draw_fades(kf_db, rng, n_blocks)
    return draw_fades(None, rng, n_blocks)


def ber_bpsk(
    channel,
    ebn0_db: float,
    n_bits: int,
    rng_seed,
    block_bits: int = 100,
    threads: int | None = None,
) -> BerPoint:
    """Monte-Carlo BPSK bit error rate at one Eb/N0 point.

    ``channel`` is "awgn" or a (ChannelParamSet, condition) pair. A fade is
    held for ``block_bits`` bits. Batches own seeds derived from the root
    seed and their error counts are summed, so the result is identical for
    any thread count. The confidence half-width is the normal approximation
    of the binomial at 95%.
    """
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    if block_bits < 1:
        raise ValueError("block_bits must be >= 1")
    chan = _normalize_channel(channel)
    amp = math.sqrt(10.0 ** (ebn0_db / 10.0)) if ebn0_db != -math.inf else 0.0

    n_blocks_total = -(-n_bits // block_bits)
    seed_seq = rng_seed if isinstance(rng_seed, np.random.SeedSequence) else np.random.SeedSequence(rng_seed)
    n_batches = -(-n_blocks_total // _BATCH_BLOCKS)
    children = seed_seq.spawn(n_batches)

    def run_batch(batch: int) -> int:
        rng = np.random.default_rng(children[batch])
        blocks = min(_BATCH_BLOCKS, n_blocks_total - batch * _BATCH_BLOCKS)
        bits_before = batch * _BATCH_BLOCKS * block_bits
        batch_bits = min(blocks * block_bits, n_bits - bits_before)
        h = np.repeat(_block_fades(chan, blocks, rng), block_bits)[:batch_bits]
        s = rng.integers(0, 2, batch_bits) * 2 - 1
        noise = (rng.standard_normal(batch_bits) + 1j * rng.standard_normal(batch_bits)) / math.sqrt(2.0)
        y = amp * h * s + noise
        z = np.real(y * np.exp(-1j * np.angle(h)))
        detected = np.where(z > 0, 1, -1)
        return int(np.count_nonzero(detected != s))

    if threads is not None and threads > 1 and n_batches > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = sum(pool.map(run_batch, range(n_batches)))
    else:
        errors = sum(run_batch(b) for b in range(n_batches))
    ber = errors / n_bits
    ci95 = 1.96 * math.sqrt(max(ber * (1.0 - ber), 0.0) / n_bits)
    return BerPoint(ebn0_db=float(ebn0_db), ber=ber, n_bits=n_bits, ci95=ci95)


def _isotonic_nonincreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a nonincreasing sequence (equal weights)."""
    merged: list[list[float]] = []
    for v in y.astype(float):
        merged.append([v, 1])
        while len(merged) > 1 and merged[-2][0] < merged[-1][0]:
            v2, n2 = merged.pop()
            v1, n1 = merged.pop()
            merged.append([(v1 * n1 + v2 * n2) / (n1 + n2), n1 + n2])
    out: list[float] = []
    for v, n in merged:
        out.extend([v] * int(n))
    return np.array(out)


@dataclass(frozen=True)
class BerSweep:
    """BER curves over an Eb/N0 grid for several parameter sets."""

    condition: Condition
    ebn0_db: tuple[float, ...]
    curves: dict[str, tuple[BerPoint, ...]]
    monotone: dict[str, tuple[float, ...]]

    def crossing_db(self, name: str, target_ber: float = 1e-3) -> float | None:
        """Eb/N0 where the monotone curve reaches the target, by log-linear
        interpolation; None when the grid does not bracket the target."""
        m = np.array(self.monotone[name])
        x = np.array(self.ebn0_db)
        n_bits = self.curves[name][0].n_bits
        floor = 0.5 / n_bits
        below = np.nonzero(m <= target_ber)[0]
        if below.size == 0:
            return None
        j = int(below[0])
        if j == 0:
            return None if m[0] < target_ber else float(x[0])
        p_hi, p_lo = m[j - 1], max(m[j], floor)
        if p_hi <= target_ber:
            return float(x[j - 1])
        frac = (math.log10(p_hi) - math.log10(target_ber)) / (
            math.log10(p_hi) - math.log10(p_lo)
        )
        return float(x[j - 1] + frac * (x[j] - x[j - 1]))

    def gap_db(self, name_a: str, name_b: str, target_ber: float = 1e-3) -> float | None:
        """Eb/N0 penalty of name_a relative to name_b at the target BER."""
        xa = self.crossing_db(name_a, target_ber)
        xb = self.crossing_db(name_b, target_ber)
        if xa is None or xb is None:
            return None
        return xa - xb


def ber_sweep(
    presets: Sequence[ChannelParamSet],
    condition: Condition | str,
    ebn0_grid: Sequence[float],
    n_bits: int,
    rng_seed: int,
    block_bits: int = 100,
    threads: int | None = None,
) -> BerSweep:
    """BER curves for several parameter sets over one Eb/N0 grid.

    Each (preset, grid point) owns a seed derived from the root seed, so the
    sweep is deterministic and independent of evaluation order.
    """
    if len(ebn0_grid) == 0:
        raise ValueError("ebn0_grid must not be empty")
    condition = Condition(condition) if isinstance(condition, str) else condition
    curves: dict[str, tuple[BerPoint, ...]] = {}
    monotone: dict[str, tuple[float, ...]] = {}
    for pi, ps in enumerate(presets):
        points = []
        for gi, ebn0 in enumerate(ebn0_grid):
            seed = np.random.SeedSequence(rng_seed, spawn_key=(pi, gi))
            points.append(ber_bpsk((ps, condition), ebn0, n_bits, seed, block_bits, threads))
        curves[ps.name] = tuple(points)
        monotone[ps.name] = tuple(_isotonic_nonincreasing(np.array([p.ber for p in points])))
    return BerSweep(condition, tuple(float(e) for e in ebn0_grid), curves, monotone)
