"""Channel statistics from multipath datasets.

Per-record statistics work on linear powers (milliwatts): path loss against
total received power, K-factor as direct-to-rest power ratio, RMS delay
spread as the second central moment of the power delay profile, and the four
angular spreads via the power-weighted linear mean, wrapped deviation and
power-weighted RMS, computed in radians and reported in degrees.

``summarize`` aggregates these over a dataset into a ChannelParamSet plus the
LOS/NLOS/DS/Outage share vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pathdata import Condition, RxRecord, ScenarioDataset
from .params import ChannelParamSet, ConditionParams


class FitError(ValueError):
    """Path-loss fit impossible: too few points or degenerate distances."""


class NoPathError(ValueError):
    """Statistic requested for an outage record."""


ANGLE_FIELDS = {
    "ASD": "aod_az_deg",
    "ASA": "aoa_az_deg",
    "ESD": "aod_el_deg",
    "ESA": "aoa_el_deg",
}

AZIMUTH_KINDS = ("ASD", "ASA")


@dataclass(frozen=True)
class PathLossFit:
    """A/B model fit: PL = A + 10 B log10(d / 1 m) + Normal(0, sigma_SF)."""

    a_db: float
    b: float
    sigma_sf_db: float
    condition: Condition
    n_points: int


def path_loss_of(record: RxRecord, budget) -> float:
    """Loss in dB against the total (summed) received power of the record."""
    if not record.paths:
        raise NoPathError(f"rx {record.rx_id} is in outage, path loss undefined")
    rx_dbm = 10.0 * math.log10(record.total_power_mw)
    return budget.tx_power_dbm + budget.gain_tx_dbi + budget.gain_rx_dbi - rx_dbm


def fit_path_loss(ds: ScenarioDataset, condition: Condition, budget=None) -> PathLossFit:
    """Ordinary least squares of PL over 10 log10(d); shadow fading is the
    sample standard deviation (n-1 denominator) of the residuals."""
    budget = budget or ds.link_budget
    records = ds.records_of(condition)
    if len(records) < 2:
        raise FitError(f"need >= 2 {condition.value} records, have {len(records)}")
    d = np.array([r.distance_3d_m for r in records])
    pl = np.array([path_loss_of(r, budget) for r in records])
    x = 10.0 * np.log10(d)
    if np.ptp(x) < 1e-12:
        raise FitError(f"all {condition.value} records share one distance; fit is singular")
    xm = x.mean()
    ym = pl.mean()
    b = float(np.sum((x - xm) * (pl - ym)) / np.sum((x - xm) ** 2))
    a = float(ym - b * xm)
    resid = pl - (a + b * x)
    sigma = float(np.sqrt(np.sum(resid**2) / (len(records) - 1)))
    return PathLossFit(a_db=a, b=b, sigma_sf_db=sigma, condition=condition, n_points=len(records))


def k_factor(record: RxRecord, method: str = "direct") -> float | None:
    """K-factor in dB: reference-path power over the summed power of the rest.

    ``method="direct"`` uses the unobstructed direct path and returns None for
    records without one (NLOS/DS/Outage); ``method="strongest"`` uses the
    strongest path of any record that has at least one. A single-path record
    has an empty "rest" and yields +inf.
    """
    if method not in ("direct", "strongest"):
        raise ValueError(f"unknown k_factor method {method!r}")
    if not record.paths:
        return None
    powers = [p.power_mw for p in record.paths]
    if method == "direct":
        ref_idx = next((i for i, p in enumerate(record.paths) if p.is_direct()), None)
        if ref_idx is None:
            return None
    else:
        ref_idx = int(np.argmax(powers))
    rest = math.fsum(pw for i, pw in enumerate(powers) if i != ref_idx)
    if rest == 0.0:
        return math.inf
    return 10.0 * math.log10(powers[ref_idx] / rest)


def rms_delay_spread(record: RxRecord) -> float:
    """Power-weighted RMS spread of the path delays, in ns."""
    if not record.paths:
        raise NoPathError(f"rx {record.rx_id} is in outage, delay spread undefined")
    p = np.array([c.power_mw for c in record.paths])
    tau = np.array([c.delay_ns for c in record.paths])
    psum = p.sum()
    m1 = np.sum(tau * p) / psum
    m2 = np.sum(tau**2 * p) / psum
    return float(np.sqrt(max(m2 - m1**2, 0.0)))


def angular_spread(record: RxRecord, which: str) -> float:
    """RMS angular spread in degrees for one of ASD, ASA, ESD, ESA.

    Three steps on linear power weights: mean angle as the power-weighted
    average of the raw angles, deviations wrapped into (-pi, pi] via
    mod(theta - mean + pi, 2 pi) - pi, then the power-weighted RMS of the
    deviations. The linear (non-circular) mean makes the result sensitive to
    the +-180 degree seam for azimuth data that straddles it.
    """
    key = which.upper()
    if key not in ANGLE_FIELDS:
        raise ValueError(f"which must be one of {sorted(ANGLE_FIELDS)}, got {which!r}")
    if not record.paths:
        raise NoPathError(f"rx {record.rx_id} is in outage, angular spread undefined")
    p = np.array([c.power_mw for c in record.paths])
    theta = np.radians(np.array([getattr(c, ANGLE_FIELDS[key]) for c in record.paths]))
    psum = p.sum()
    nu = np.sum(theta * p) / psum
    dev = np.mod(theta - nu + np.pi, 2.0 * np.pi) - np.pi
    return float(np.degrees(np.sqrt(np.sum(dev**2 * p) / psum)))


# --------------------------------------------------------------------------
# dataset-level aggregation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSummary:
    params: ChannelParamSet
    ratios: dict[Condition, float]
    counts: dict[Condition, int]


def _mean_std(values: list[float]) -> tuple[float, float]:
    """Compensated mean and n-1 sample std; std is 0 for a single value."""
    n = len(values)
    mu = math.fsum(values) / n
    if n < 2:
        return mu, 0.0
    var = math.fsum((v - mu) ** 2 for v in values) / (n - 1)
    return mu, math.sqrt(var)


def _condition_block(ds: ScenarioDataset, condition: Condition, budget) -> ConditionParams | None:
    records = ds.records_of(condition)
    if not records:
        return None
    try:
        fit = fit_path_loss(ds, condition, budget)
        a_db, b, sigma_sf = fit.a_db, fit.b, fit.sigma_sf_db
    except FitError:
        a_db = b = sigma_sf = None

    mu_kf = sigma_kf = None
    if condition is Condition.LOS:
        kfs = [k_factor(r) for r in records]
        finite = [k for k in kfs if k is not None and math.isfinite(k)]
        if finite:
            mu_kf, sigma_kf = _mean_std(finite)

    ds_vals = [rms_delay_spread(r) for r in records]
    mu_ds, sigma_ds = _mean_std(ds_vals)
    spreads = {}
    for kind in ANGLE_FIELDS:
        spreads[kind] = _mean_std([angular_spread(r, kind) for r in records])

    return ConditionParams(
        a_db=a_db,
        b=b,
        sigma_sf_db=sigma_sf,
        mu_kf_db=mu_kf,
        sigma_kf_db=sigma_kf,
        mu_ds_ns=mu_ds,
        sigma_ds_ns=sigma_ds,
        mu_asd_deg=spreads["ASD"][0],
        sigma_asd_deg=spreads["ASD"][1],
        mu_asa_deg=spreads["ASA"][0],
        sigma_asa_deg=spreads["ASA"][1],
        mu_esd_deg=spreads["ESD"][0],
        sigma_esd_deg=spreads["ESD"][1],
        mu_esa_deg=spreads["ESA"][0],
        sigma_esa_deg=spreads["ESA"][1],
        n_records=len(records),
    )


def summarize(ds: ScenarioDataset, budget=None) -> DatasetSummary:
    """Parameter set plus condition shares for one dataset.

    LOS and NLOS get full statistics blocks (absent when no records fall in
    the condition); DS and Outage records only contribute to the shares, as
    the parameter tables carry LOS/NLOS columns only. Single-path LOS records
    have an infinite K-factor and are left out of the K-factor moments.
    """
    if not ds.records:
        raise ValueError("cannot summarize an empty dataset")
    budget = budget or ds.link_budget
    counts = {c: len(ds.records_of(c)) for c in Condition}
    total = len(ds.records)
    ratios = {c: counts[c] / total for c in Condition}
    params = ChannelParamSet(
        name=ds.scenario_name,
        los=_condition_block(ds, Condition.LOS, budget),
        nlos=_condition_block(ds, Condition.NLOS, budget),
    )
    return DatasetSummary(params=params, ratios=ratios, counts=counts)
