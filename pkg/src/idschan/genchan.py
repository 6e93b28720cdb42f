"""Stochastic tapped-multipath realizations drawn from a ChannelParamSet.

Draw procedure per realization (all randomness from one seeded generator, in
a fixed order, so a seed pins the result bit-for-bit):

1. delay-spread target from the configured DS distribution, K-factor from
   Normal(mu_KF, |sigma_KF|) for LOS, shadow fade from Normal(0, sigma_SF);
2. n_taps - 1 excess delays from an exponential, sorted, 0 prepended;
3. tap powers proportional to exp(-delay / scale);
4. for LOS, tap 0 reassigned so the tap-0 to rest power ratio equals the
   drawn K exactly, remaining taps renormalized;
5. delays rescaled linearly so the realized RMS delay spread equals the
   target exactly;
6. per-tap departure/arrival angles from wrapped Gaussians around a
   per-realization mean, with std equal to the corresponding mean spread.

Negative sigma_KF preset entries are used via their absolute value. The
spread-of-spreads across realizations is not reproduced for the angular
dimensions; only the DS distribution is matched across draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT, fold_elevation_deg, wrap_azimuth_deg
from .params import ChannelParamSet, ConditionParams
from .pathdata import (
    Condition,
    Interaction,
    MultipathComponent,
    Provenance,
    ScenarioDataset,
    make_record,
    mw_to_dbm,
)


@dataclass(frozen=True)
class Tap:
    delay_ns: float
    power_lin: float
    aod_az_deg: float
    aoa_az_deg: float
    aod_el_deg: float
    aoa_el_deg: float


@dataclass(frozen=True)
class ChannelRealization:
    """Normalized tapped profile: powers sum to 1, first tap at delay 0."""

    condition: Condition
    taps: tuple[Tap, ...]
    kf_db: float | None
    sf_db: float
    target_ds_ns: float
    seed_used: int

    @property
    def delays_ns(self) -> np.ndarray:
        return np.array([t.delay_ns for t in self.taps])

    @property
    def powers_lin(self) -> np.ndarray:
        return np.array([t.power_lin for t in self.taps])


def _require_finite(block: ConditionParams, names: tuple[str, ...]) -> None:
    for name in names:
        v = getattr(block, name)
        if v is None or not math.isfinite(v):
            raise ValueError(f"parameter {name} is missing or non-finite: {v!r}")


def draw_ds(block: ConditionParams, rng: np.random.Generator, size=None):
    """Delay-spread draws in ns.

    With ds_log10_sigma set, draws are 10**Normal(log10(mu), sigma_lg); with
    sigma_ds_ns == 0 the draw degenerates to mu_ds_ns; otherwise a lognormal
    is moment-matched so its linear-domain mean and std equal (mu, sigma).
    """
    mu, sigma = block.mu_ds_ns, block.sigma_ds_ns
    if block.ds_log10_sigma is not None:
        return 10.0 ** rng.normal(math.log10(mu), block.ds_log10_sigma, size)
    if sigma == 0.0:
        return mu if size is None else np.full(size, mu)
    var_ln = math.log(1.0 + (sigma / mu) ** 2)
    mu_ln = math.log(mu) - var_ln / 2.0
    return np.exp(rng.normal(mu_ln, math.sqrt(var_ln), size))


def _rms_spread(delays: np.ndarray, powers: np.ndarray) -> float:
    m1 = float(np.sum(delays * powers))
    m2 = float(np.sum(delays**2 * powers))
    return math.sqrt(max(m2 - m1 * m1, 0.0))


def draw_realization(
    params: ChannelParamSet,
    condition: Condition | str,
    n_taps: int = 20,
    rng_seed: int = 0,
) -> ChannelRealization:
    """One tapped realization; deterministic given (params, condition, n_taps, seed)."""
    condition = Condition(condition) if isinstance(condition, str) else condition
    if condition not in (Condition.LOS, Condition.NLOS):
        raise ValueError(f"can only generate LOS or NLOS realizations, not {condition}")
    if n_taps < 2:
        raise ValueError(f"n_taps must be >= 2, got {n_taps}")
    block = params.block(condition)
    _require_finite(block, ("mu_ds_ns", "sigma_ds_ns", "sigma_sf_db"))
    is_los = condition is Condition.LOS
    if is_los:
        _require_finite(block, ("mu_kf_db", "sigma_kf_db"))

    rng = np.random.default_rng(rng_seed)
    ds_target = float(draw_ds(block, rng))
    kf_db = float(rng.normal(block.mu_kf_db, abs(block.sigma_kf_db))) if is_los else None
    sf_db = float(rng.normal(0.0, block.sigma_sf_db))

    excess = np.sort(rng.exponential(ds_target, n_taps - 1))
    delays = np.concatenate(([0.0], excess))
    weights = np.exp(-delays / ds_target)
    if is_los:
        k_lin = 10.0 ** (kf_db / 10.0)
        p0 = k_lin / (1.0 + k_lin)
        rest = weights[1:] / weights[1:].sum() * (1.0 / (1.0 + k_lin))
        powers = np.concatenate(([p0], rest))
    else:
        powers = weights / weights.sum()
    powers = powers / powers.sum()

    realized = _rms_spread(delays, powers)
    delays = delays * (ds_target / realized)

    means = {
        "asd": rng.uniform(-180.0, 180.0),
        "asa": rng.uniform(-180.0, 180.0),
        "esd": rng.uniform(-90.0, 90.0),
        "esa": rng.uniform(-90.0, 90.0),
    }
    aod_az = wrap_azimuth_deg(means["asd"] + rng.normal(0.0, block.mu_asd_deg, n_taps))
    aoa_az = wrap_azimuth_deg(means["asa"] + rng.normal(0.0, block.mu_asa_deg, n_taps))
    aod_el = fold_elevation_deg(means["esd"] + rng.normal(0.0, block.mu_esd_deg, n_taps))
    aoa_el = fold_elevation_deg(means["esa"] + rng.normal(0.0, block.mu_esa_deg, n_taps))

    taps = tuple(
        Tap(float(delays[i]), float(powers[i]), float(aod_az[i]), float(aoa_az[i]),
            float(aod_el[i]), float(aoa_el[i]))
        for i in range(n_taps)
    )
    return ChannelRealization(condition, taps, kf_db, sf_db, ds_target, int(rng_seed))


# --------------------------------------------------------------------------
# narrowband fading gains
# --------------------------------------------------------------------------


def draw_fades(kf_db, rng: np.random.Generator, size: int) -> np.ndarray:
    """Unit-mean-power complex fades: Rician for per-fade K in dB, Rayleigh for None.

    ``kf_db`` may be a scalar or an array of per-fade values; +inf collapses
    to a pure rotated constant of magnitude 1.
    """
    scatter = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)
    if kf_db is None:
        return scatter
    k = 10.0 ** (np.asarray(kf_db, dtype=float) / 10.0)
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size))
    with np.errstate(invalid="ignore"):
        los_amp = np.where(np.isinf(k), 1.0, np.sqrt(k / (k + 1.0)))
        nlos_amp = np.where(np.isinf(k), 0.0, np.sqrt(1.0 / (k + 1.0)))
    return los_amp * phase + nlos_amp * scatter


def narrowband_gain(real: ChannelRealization, rng_seed: int = 0) -> complex:
    """Single flat-fading gain for a realization; E[|h|^2] = 1."""
    rng = np.random.default_rng(rng_seed)
    kf = real.kf_db if real.condition is Condition.LOS else None
    return complex(draw_fades(kf, rng, 1)[0])


# --------------------------------------------------------------------------
# export as a multipath dataset
# --------------------------------------------------------------------------


def realization_components(
    real: ChannelRealization, base_delay_ns: float
) -> list[MultipathComponent]:
    """Taps to path components: tap 0 of LOS becomes the direct path, the
    rest reflections; normalized linear powers map to dBm, delays get the
    line-of-flight offset so they stay strictly positive."""
    comps = []
    for i, tap in enumerate(real.taps):
        direct = real.condition is Condition.LOS and i == 0
        comps.append(
            MultipathComponent(
                power_dbm=mw_to_dbm(tap.power_lin),
                delay_ns=tap.delay_ns + base_delay_ns,
                aod_az_deg=tap.aod_az_deg,
                aod_el_deg=tap.aod_el_deg,
                aoa_az_deg=tap.aoa_az_deg,
                aoa_el_deg=tap.aoa_el_deg,
                interactions=(Interaction.DIRECT,) if direct else (Interaction.REFLECT,),
            )
        )
    return comps


def realizations_to_dataset(
    reals: list[ChannelRealization],
    name: str,
    budget,
    rx_distance_m: float = 1.0,
) -> ScenarioDataset:
    """Pack realizations as a dataset at a nominal TX-RX separation, so they
    round-trip through the CSV schema and the extraction pipeline."""
    base_delay_ns = rx_distance_m / SPEED_OF_LIGHT * 1e9
    tx = (0.0, 0.0, 0.0)
    records = []
    for i, real in enumerate(reals):
        comps = realization_components(real, base_delay_ns)
        records.append(make_record(i, (rx_distance_m, 0.0, 0.0), tx, comps))
    return ScenarioDataset(name, tx, budget, tuple(records), Provenance.SYNTHETIC)
