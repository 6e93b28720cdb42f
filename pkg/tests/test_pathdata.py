import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from idschan.linksim import LinkBudget
from idschan.pathdata import (
    Condition,
    DatasetFormatError,
    DatasetValidationError,
    Interaction,
    MultipathComponent,
    Provenance,
    RxRecord,
    ScenarioDataset,
    classify,
    load_dataset,
    make_record,
    save_dataset,
)

L, R, D, S = (
    Interaction.DIRECT,
    Interaction.REFLECT,
    Interaction.DIFFRACT,
    Interaction.DIFFUSE_SCATTER,
)


def comp(tags, power=-50.0, delay=10.0, **kw):
    defaults = dict(
        power_dbm=power,
        delay_ns=delay,
        aod_az_deg=10.0,
        aod_el_deg=5.0,
        aoa_az_deg=-20.0,
        aoa_el_deg=-5.0,
        interactions=tuple(tags),
    )
    defaults.update(kw)
    return MultipathComponent(**defaults)


class TestClassify:
    def test_direct_present_is_los(self):
        assert classify([comp([L]), comp([R])]) is Condition.LOS

    def test_no_direct_not_all_scatter_is_nlos(self):
        assert classify([comp([R, R]), comp([D])]) is Condition.NLOS

    def test_all_paths_scattered_is_ds(self):
        assert classify([comp([S]), comp([R, S])]) is Condition.DS

    def test_empty_is_outage(self):
        assert classify([]) is Condition.OUTAGE

    @given(
        st.lists(
            st.sampled_from([(L,), (R,), (R, R), (D,), (S,), (R, S), (D, S)]),
            max_size=6,
        ),
        st.randoms(use_true_random=False),
    )
    def test_permutation_invariant(self, tag_lists, rnd):
        paths = [comp(t) for t in tag_lists]
        shuffled = paths[:]
        rnd.shuffle(shuffled)
        assert classify(paths) is classify(shuffled)


class TestComponentValidation:
    def test_nonpositive_delay_rejected(self):
        with pytest.raises(DatasetValidationError):
            comp([R], delay=-1.0)
        with pytest.raises(DatasetValidationError):
            comp([R], delay=0.0)

    def test_azimuth_range(self):
        with pytest.raises(DatasetValidationError):
            comp([R], aod_az_deg=-180.0)
        assert comp([R], aod_az_deg=180.0).aod_az_deg == 180.0

    def test_elevation_range(self):
        with pytest.raises(DatasetValidationError):
            comp([R], aoa_el_deg=90.5)

    def test_direct_must_be_alone(self):
        with pytest.raises(DatasetValidationError):
            comp([L, R])

    def test_empty_interactions_rejected(self):
        with pytest.raises(DatasetValidationError):
            comp([])


def small_dataset():
    tx = (0.0, 1.7, 2.1)
    records = (
        make_record(0, (3.0, 1.7, 0.9), tx, [comp([L], power=-45.0, delay=11.0), comp([R, R])]),
        make_record(1, (5.5, 0.3, 0.7), tx, [comp([R]), comp([D, S])]),
        make_record(2, (7.0, 3.9, 0.6), tx, []),  # outage
        make_record(3, (2.0, 2.0, 1.0), tx, [comp([S]), comp([R, S])]),
    )
    return ScenarioDataset("unit", tx, LinkBudget(), records, Provenance.SYNTHETIC)


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        ds = small_dataset()
        path = tmp_path / "ds.csv"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.scenario_name == ds.scenario_name
        assert back.tx_position_m == ds.tx_position_m
        assert back.link_budget == ds.link_budget
        assert back.provenance == ds.provenance
        assert back.records == ds.records

    def test_outage_record_preserved(self, tmp_path):
        ds = small_dataset()
        path = tmp_path / "ds.csv"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.records[2].condition is Condition.OUTAGE
        assert back.records[2].paths == ()

    def test_empty_dataset_header_only(self, tmp_path):
        ds = ScenarioDataset("empty", (0, 0, 1), LinkBudget(), (), Provenance.SYNTHETIC)
        path = tmp_path / "empty.csv"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("rx_id,")
        assert load_dataset(path).records == ()

    def test_conditions_recomputed_on_load(self, tmp_path):
        ds = small_dataset()
        path = tmp_path / "ds.csv"
        save_dataset(ds, path)
        back = load_dataset(path)
        for rec in back.records:
            assert rec.condition is classify(rec.paths)

    @given(
        specs=st.lists(
            st.tuples(
                st.sampled_from([(L,), (R,), (R, R, D), (S,), (R, S)]),
                st.floats(-120, 30),
                st.floats(0.1, 5000),
                st.floats(-179.99, 180.0),
                st.floats(-90.0, 90.0),
            ),
            min_size=0,
            max_size=5,
        ),
        n_outage=st.integers(0, 3),
    )
    def test_roundtrip_property(self, tmp_path_factory, specs, n_outage):
        tx = (0.0, 0.0, 1.0)
        paths = [
            comp(tags, power=p, delay=d, aod_az_deg=az, aoa_el_deg=el)
            for tags, p, d, az, el in specs
        ]
        records = [make_record(0, (4.0, 1.0, 1.0), tx, paths)]
        for i in range(n_outage):
            records.append(make_record(i + 1, (5.0 + i, 1.0, 1.0), tx, []))
        ds = ScenarioDataset("prop", tx, LinkBudget(), tuple(records), Provenance.INGESTED)
        path = tmp_path_factory.mktemp("rt") / "ds.csv"
        save_dataset(ds, path)
        assert load_dataset(path).records == ds.records


class TestLoaderErrors:
    def write(self, tmp_path, body, meta=True):
        p = tmp_path / "bad.csv"
        header = "rx_id,rx_x_m,rx_y_m,rx_z_m,power_dbm,delay_ns,aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,interactions\n"
        p.write_text(header + body)
        if meta:
            (tmp_path / "bad.meta.json").write_text(
                '{"scenario_name": "x", "tx_position_m": [0, 0, 1], "provenance": "Ingested"}'
            )
        return p

    def test_malformed_row_names_line(self, tmp_path):
        p = self.write(tmp_path, "0,1.0,0.0,1.0,notafloat,5.0,0.0,0.0,0.0,0.0,R\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(p)

    def test_short_row_names_line(self, tmp_path):
        p = self.write(tmp_path, "0,1.0,0.0\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(p)

    def test_negative_delay_names_rx(self, tmp_path):
        p = self.write(tmp_path, "7,1.0,0.0,1.0,-50.0,-1.0,0.0,0.0,0.0,0.0,R\n")
        with pytest.raises(DatasetValidationError, match="rx 7"):
            load_dataset(p)

    def test_angle_out_of_range_names_rx(self, tmp_path):
        p = self.write(tmp_path, "3,1.0,0.0,1.0,-50.0,5.0,200.0,0.0,0.0,0.0,R\n")
        with pytest.raises(DatasetValidationError, match="rx 3"):
            load_dataset(p)

    def test_unknown_tag(self, tmp_path):
        p = self.write(tmp_path, "0,1.0,0.0,1.0,-50.0,5.0,0.0,0.0,0.0,0.0,R+Q\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(p)

    def test_missing_sidecar(self, tmp_path):
        p = self.write(tmp_path, "", meta=False)
        with pytest.raises(DatasetFormatError, match="sidecar"):
            load_dataset(p)

    def test_extra_condition_column_ignored(self, tmp_path):
        p = self.write(tmp_path, "0,1.0,0.0,1.0,-50.0,5.0,0.0,0.0,0.0,0.0,R,LOS\n")
        ds = load_dataset(p)
        assert ds.records[0].condition is Condition.NLOS  # recomputed, not trusted

    def test_inconsistent_rx_position(self, tmp_path):
        body = (
            "0,1.0,0.0,1.0,-50.0,5.0,0.0,0.0,0.0,0.0,R\n"
            "0,2.0,0.0,1.0,-52.0,6.0,0.0,0.0,0.0,0.0,R\n"
        )
        p = self.write(tmp_path, body)
        with pytest.raises(DatasetValidationError, match="rx 0"):
            load_dataset(p)

    def test_outage_row_mixed_with_paths(self, tmp_path):
        body = (
            "0,1.0,0.0,1.0,-50.0,5.0,0.0,0.0,0.0,0.0,R\n"
            "0,1.0,0.0,1.0,-INF,0.0,0.0,0.0,0.0,0.0,\n"
        )
        p = self.write(tmp_path, body)
        with pytest.raises(DatasetValidationError, match="outage"):
            load_dataset(p)

    def test_empty_interactions_needs_inf_sentinel(self, tmp_path):
        p = self.write(tmp_path, "0,1.0,0.0,1.0,-50.0,0.0,0.0,0.0,0.0,0.0,\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(p)


class TestDatasetInvariants:
    def test_duplicate_rx_id_rejected(self):
        tx = (0.0, 0.0, 1.0)
        rec = make_record(0, (1.0, 0.0, 1.0), tx, [comp([R])])
        with pytest.raises(DatasetValidationError, match="duplicate"):
            ScenarioDataset("d", tx, LinkBudget(), (rec, rec), Provenance.SYNTHETIC)

    def test_distance_mismatch_rejected(self):
        tx = (0.0, 0.0, 1.0)
        rec = RxRecord(0, (1.0, 0.0, 1.0), 2.0, (comp([R]),), Condition.NLOS)
        with pytest.raises(DatasetValidationError, match="distance"):
            ScenarioDataset("d", tx, LinkBudget(), (rec,), Provenance.SYNTHETIC)

    def test_condition_must_match_paths(self):
        with pytest.raises(DatasetValidationError, match="inconsistent"):
            RxRecord(0, (1.0, 0.0, 1.0), 1.0, (comp([R]),), Condition.LOS)

    def test_outage_iff_no_paths(self):
        rec = make_record(0, (1.0, 0.0, 1.0), (0.0, 0.0, 1.0), [])
        assert rec.condition is Condition.OUTAGE
        with pytest.raises(DatasetValidationError):
            RxRecord(0, (1.0, 0.0, 1.0), 1.0, (), Condition.NLOS)


def test_power_dbm_mw_helpers():
    from idschan.pathdata import dbm_to_mw, mw_to_dbm

    assert dbm_to_mw(0.0) == 1.0
    assert math.isclose(dbm_to_mw(10.0), 10.0)
    assert mw_to_dbm(0.0) == -math.inf
    assert math.isclose(mw_to_dbm(dbm_to_mw(-37.25)), -37.25)
