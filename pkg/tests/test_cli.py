import copy
import json

import pytest

from hypwalk.cli import main, serialize_report
from hypwalk.config import ConfigError, validate_config
from hypwalk.presets import PRESETS, preset_config

SMALL_DRIFT = {
    "experiment": "drift",
    "seed": 99,
    "model": {"type": "free", "rank": 2},
    "measure": {
        "atoms": [
            {"word": "a", "weight": "1/4"},
            {"word": "A", "weight": "1/4"},
            {"word": "b", "weight": "1/4"},
            {"word": "B", "weight": "1/4"},
        ],
        "attest_non_elementary": True,
    },
    "params": {"n": 200, "trials": 40, "expected": 0.5, "tolerance": 0.1},
}


def _write(tmp_path, config):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_run_drift_exit_zero(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", str(_write(tmp_path, SMALL_DRIFT)), "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["passed"] is True
    assert report["config"]["seed"] == 99
    assert (out / "d.csv").exists()


def test_report_roundtrip_byte_identical(tmp_path):
    out = tmp_path / "out"
    main(["run", str(_write(tmp_path, SMALL_DRIFT)), "--out", str(out)])
    raw = (out / "report.json").read_text()
    assert serialize_report(json.loads(raw)) == raw


def test_csv_sorted_and_rfc4180(tmp_path):
    out = tmp_path / "out"
    main(["run", str(_write(tmp_path, SMALL_DRIFT)), "--out", str(out)])
    body = (out / "d.csv").read_bytes().decode()
    assert body.endswith("\r\n")
    lines = body.split("\r\n")
    assert lines[0] == "trial,n,observable,value"
    data = [line.split(",") for line in lines[1:] if line]
    keys = [(int(r[0]), int(r[1])) for r in data]
    assert keys == sorted(keys)


def test_bad_weights_exit_one(tmp_path, capsys):
    config = copy.deepcopy(SMALL_DRIFT)
    config["measure"]["atoms"][0]["weight"] = "1/5"
    code = main(["run", str(_write(tmp_path, config)), "--out", str(tmp_path / "o")])
    assert code == 1
    err = capsys.readouterr().err
    assert "$.measure.atoms" in err and "sum to 1" in err


def test_unknown_key_exit_one(tmp_path, capsys):
    config = copy.deepcopy(SMALL_DRIFT)
    config["params"]["bogus"] = 1
    code = main(["run", str(_write(tmp_path, config)), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "bogus" in capsys.readouterr().err


def test_tolerance_failure_exit_two(tmp_path):
    config = copy.deepcopy(SMALL_DRIFT)
    config["params"]["expected"] = 0.9
    config["params"]["tolerance"] = 0.01
    code = main(["run", str(_write(tmp_path, config)), "--out", str(tmp_path / "o")])
    assert code == 2


def test_resource_failure_exit_three(tmp_path):
    config = {
        "experiment": "drift",
        "seed": 5,
        "model": {"type": "cremona", "degree_cap": 8},
        "measure": {
            "atoms": [
                {"gen": {"name": "henon", "n": 2}, "weight": "1/2"},
                {"gen": {"name": "sigma"}, "weight": "1/2"},
            ],
            "attest_non_elementary": True,
        },
        "params": {"n": 20, "trials": 30},
    }
    code = main(["run", str(_write(tmp_path, config)), "--out", str(tmp_path / "o")])
    assert code == 3


def test_missing_config_file(tmp_path, capsys):
    code = main(["run", str(tmp_path / "absent.json")])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_malformed_json_names_line(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"experiment": "drift",\n  "seed": }')
    code = main(["run", str(path)])
    assert code == 1
    assert "line 2" in capsys.readouterr().err


def test_list_presets_and_version(capsys):
    assert main(["list-presets"]) == 0
    listing = capsys.readouterr().out
    assert "drift-f2" in listing and "sigma-involution" in listing
    assert main(["version"]) == 0
    from hypwalk import __version__

    assert __version__ in capsys.readouterr().out


def test_unknown_preset(capsys):
    assert main(["preset", "no-such-thing"]) == 1
    assert "unknown preset" in capsys.readouterr().err


def test_preset_sigma_involution(tmp_path):
    code = main(["preset", "sigma-involution", "--out", str(tmp_path / "o")])
    assert code == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["result"]["aggregates"]["henon_degrees"] == [2, 4, 8, 16, 32, 64]


def test_preset_seed_override():
    config = preset_config("drift-f2", seed=4242)
    assert config["seed"] == 4242
    assert PRESETS["drift-f2"]["config"]["seed"] != 4242


def test_all_preset_configs_validate():
    for name in PRESETS:
        validate_config(preset_config(name))


def test_validate_rejects_monomial_weighted_wrong():
    config = {
        "experiment": "drift",
        "seed": 1,
        "model": {"type": "monomial"},
        "measure": {"atoms": [{"matrix": [2, 1, 1], "weight": "1"}]},
        "params": {"n": 10, "trials": 30},
    }
    with pytest.raises(ConfigError) as info:
        validate_config(config)
    assert "matrix" in str(info.value)
