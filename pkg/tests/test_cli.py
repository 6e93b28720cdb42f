import csv
import json
import math

import pytest

from idschan.cli import main, _parse_ebn0
from idschan.pathdata import Condition, load_dataset

SCENE_CFG = {
    "name": "cli-box",
    "cabin_dims_m": [6.0, 4.0, 2.4],
    "walls": {"all": "metal_pec"},
    "tx_m": [0.2, 1.7, 2.1],
    "rx_grid": {"rows": 3, "heights_m": [0.7, 0.9], "lateral_step_m": 0.5,
                "lateral_margin_m": 0.25, "first_row_x_m": 2.0, "row_pitch_m": 1.2},
    "blockers": [
        {"min_m": [2.6, 1.0, 0.0], "max_m": [3.0, 3.0, 1.3], "material": "nylon", "label": "Seat"}
    ],
    "max_reflections": 1,
    "sensitivity_dbm": -110.0,
}


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.fixture()
def scene_file(tmp_path):
    p = tmp_path / "scene.json"
    p.write_text(json.dumps(SCENE_CFG))
    return p


class TestParseEbn0:
    def test_range(self):
        assert _parse_ebn0("0:2:6") == [0.0, 2.0, 4.0, 6.0]

    def test_comma_list(self):
        assert _parse_ebn0("1,3.5,9") == [1.0, 3.5, 9.0]

    def test_bad_step(self):
        with pytest.raises(ValueError):
            _parse_ebn0("0:0:6")


class TestTraceExtract:
    def test_trace_then_extract(self, tmp_path, scene_file, capsys):
        ds_path = tmp_path / "ds.csv"
        assert main(["trace", "--scene", str(scene_file), "--out", str(ds_path)]) == 0
        ds = load_dataset(ds_path)
        assert len(ds.records) == 48  # 3 rows x 2 heights x 8 lateral
        out = tmp_path / "params.csv"
        assert main(["extract", "--in", str(ds_path), "--out", str(out)]) == 0
        rows = read_rows(out)
        assert rows[0][0] == "param"
        ratios = read_rows(tmp_path / "params.ratios.csv")
        assert ratios[0] == ["scenario", "los", "nlos", "ds", "outage"]
        shares = [float(v) for v in ratios[1][1:]]
        assert math.isclose(sum(shares), 1.0, abs_tol=1e-12)

    def test_trace_deterministic_bytes(self, tmp_path, scene_file):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["trace", "--scene", str(scene_file), "--out", str(a)])
        main(["trace", "--scene", str(scene_file), "--out", str(b), "--threads", "4"])
        assert a.read_bytes() == b.read_bytes()

    def test_trace_preset_smoke(self, tmp_path):
        # order 0 keeps the full 2400-point grid cheap
        out = tmp_path / "bl.csv"
        assert main(["trace", "--preset", "EmV", "--out", str(out), "--max-reflections", "0"]) == 0
        ds = load_dataset(out)
        assert len(ds.records) == 2400

    def test_missing_args_error(self, tmp_path, capsys):
        rc = main(["trace", "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestGen:
    def test_gen_round_trips_through_loader(self, tmp_path):
        out = tmp_path / "gen.csv"
        rc = main(["gen", "--preset", "BL", "--cond", "LOS", "--count", "25",
                   "--taps", "8", "--seed", "7", "--out", str(out)])
        assert rc == 0
        ds = load_dataset(out)
        assert len(ds.records) == 25
        assert all(r.condition is Condition.LOS for r in ds.records)
        assert all(len(r.paths) == 8 for r in ds.records)

    def test_gen_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["gen", "--preset", "BL", "--count", "10", "--seed", "3", "--out", str(a)])
        main(["gen", "--preset", "BL", "--count", "10", "--seed", "3", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_gen_seed_env_fallback(self, tmp_path, monkeypatch):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        monkeypatch.setenv("IDS_CHAN_SEED", "99")
        main(["gen", "--preset", "BL", "--count", "5", "--out", str(a)])
        main(["gen", "--preset", "BL", "--count", "5", "--seed", "99", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_preset(self, tmp_path, capsys):
        rc = main(["gen", "--preset", "nope", "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err


class TestRssi:
    def test_rssi_csv(self, tmp_path, scene_file):
        ds_path = tmp_path / "ds.csv"
        main(["trace", "--scene", str(scene_file), "--out", str(ds_path)])
        out = tmp_path / "rssi.csv"
        assert main(["rssi", "--in", str(ds_path), "--out", str(out)]) == 0
        rows = read_rows(out)
        assert rows[0] == ["rx_id", "x", "y", "z", "condition", "rssi_dbm", "snr_db"]
        assert len(rows) == 49  # header + 48 receivers


class TestBer:
    def test_ber_csv_and_gap_line(self, tmp_path, capsys):
        out = tmp_path / "ber.csv"
        rc = main(["ber", "--presets", "BL,3GPP-InO", "--cond", "LOS",
                   "--ebn0", "0:4:8", "--bits", "20000", "--seed", "1", "--out", str(out)])
        assert rc == 0
        rows = read_rows(out)
        assert rows[0] == ["preset", "condition", "ebn0_db", "ber", "ci95", "n_bits"]
        assert len(rows) == 1 + 2 * 3
        captured = capsys.readouterr().out
        assert "gap at BER" in captured

    def test_ber_deterministic_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["ber", "--presets", "BL", "--cond", "NLOS", "--ebn0", "0:4:4",
                "--bits", "10000", "--seed", "5"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestPresets:
    def test_presets_table_values(self, tmp_path):
        out = tmp_path / "presets.csv"
        assert main(["presets", "--out", str(out)]) == 0
        rows = read_rows(out)
        header = rows[0]
        col = header.index("BL:LOS")
        by_param = {r[0]: r for r in rows[1:]}
        assert float(by_param["A_dB"][col]) == 58.49
        assert float(by_param["B"][col]) == 1.45
        assert float(by_param["sigma_SF_dB"][col]) == 5.58
        assert float(by_param["mu_KF_dB"][header.index("3GPP-InO:LOS")]) == 7.0

    def test_presets_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["presets", "--out", str(a)])
        main(["presets", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
