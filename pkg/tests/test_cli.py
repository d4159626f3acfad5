import csv
import io
import json
import math

import numpy as np
import pytest

from plurilag.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from plurilag.forms import fields_to_dict
from plurilag.lattice import box_corner_surface, surface_to_dict
from plurilag.models import get_model
from plurilag.solve import propagate_box


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


SQUARE = {"m": 2, "squares": [{"base": [0, 0], "dirs": [1, 2]}]}
SQUARE_FIELDS = {"fields": [{"vertex": [0, 0], "value": 0}, {"vertex": [1, 0], "value": 1},
                            {"vertex": [1, 1], "value": 3}, {"vertex": [0, 1], "value": 2}]}


def test_verify_consistency_passes(capsys):
    assert main(["verify", "consistency", "--trials", "10", "--seed", "1"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_verify_json_report(capsys):
    assert main(["verify", "quad", "--model", "h1", "--trials", "5", "--format", "json", "--no-runtime"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["suite"] == "quad" and doc["model"] == "h1" and doc["trials"] == 5
    assert "runtime_ms" not in doc


def test_verify_csv_one_row_per_trial(capsys):
    assert main(["verify", "consistency", "--trials", "4", "--format", "csv"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4


def test_verify_quad_only_model_is_usage_error(capsys):
    assert main(["verify", "consistency", "--model", "h1", "--trials", "1"]) == EXIT_USAGE
    assert "Lagrangian" in capsys.readouterr().err


def test_unknown_suite_and_model(capsys):
    assert main(["verify", "bogus"]) == EXIT_USAGE
    assert main(["verify", "consistency", "--model", "q9"]) == EXIT_USAGE


def test_bad_seed_and_trials():
    assert main(["verify", "consistency", "--seed", "-1"]) == EXIT_USAGE
    assert main(["verify", "consistency", "--trials", "0"]) == EXIT_USAGE


def test_negative_control_exit_code(capsys):
    assert main(["verify", "closedness", "--trials", "5", "--form", "perturbed"]) == EXIT_FAILED


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("PLURILAG_SEED", "5")
    main(["verify", "consistency", "--trials", "3", "--format", "json", "--no-runtime"])
    env = capsys.readouterr().out
    monkeypatch.delenv("PLURILAG_SEED")
    main(["verify", "consistency", "--trials", "3", "--seed", "5", "--format", "json", "--no-runtime"])
    assert capsys.readouterr().out == env
    assert json.loads(env)["seed"] == 5


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "gamma", "--trials", "3", "--format", "json", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["model"] == "exp-gamma"


def test_propagate_h1_box(capsys):
    assert main(["propagate", "--model", "h1", "--box", "4,4,4", "--seed", "1", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_rel_spread"] < 1e-10
    assert len(doc["fields"]) == 125


def test_propagate_single_cube_from_file(tmp_path, capsys):
    data = {"alpha": [1, 2, 3], "fields": [{"vertex": [0, 0, 0], "value": 0.1}, {"vertex": [1, 0, 0], "value": 0.7},
                                           {"vertex": [0, 1, 0], "value": -0.4}, {"vertex": [0, 0, 1], "value": 1.3}]}
    assert main(["propagate", "--data", write(tmp_path / "c.json", data)]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_propagate_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"fields": [\n  {"vertex": [0, 0, 0] "value": 1}]}')
    assert main(["propagate", "--data", str(bad)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_propagate_singular(tmp_path, capsys):
    data = {"fields": [{"vertex": [0, 0, 0], "value": 0.3}, {"vertex": [1, 0, 0], "value": 1.1},
                       {"vertex": [0, 1, 0], "value": 1.1}, {"vertex": [0, 0, 1], "value": 1.1}]}
    code = main(["propagate", "--model", "h1", "--alpha", "0.7,0.7,0.7", "--data", write(tmp_path / "s.json", data)])
    assert code == EXIT_FAILED
    assert "singular" in capsys.readouterr().err


def test_action_single_square(tmp_path, capsys):
    args = ["action", "--surface", write(tmp_path / "s.json", SQUARE), "--fields", write(tmp_path / "f.json", SQUARE_FIELDS),
            "--alpha", "1,2", "--format", "json"]
    assert main(args) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["action"] == pytest.approx(-2 * math.log(2), abs=1e-12)
    assert main(args + ["--form", "zero"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["action"] == 0.0


def test_action_missing_vertex(tmp_path, capsys):
    fields = {"fields": SQUARE_FIELDS["fields"][:3]}
    args = ["action", "--surface", write(tmp_path / "s.json", SQUARE), "--fields", write(tmp_path / "f.json", fields)]
    assert main(args) == EXIT_USAGE
    assert "(0, 1)" in capsys.readouterr().err


def test_action_flips_on_quad_solution(tmp_path, capsys):
    model = get_model("q1d0")
    alpha = (1.0, 2.0, 3.0)
    rng = np.random.default_rng(2)
    axes = {}
    for d in range(3):
        for t in range(4):
            v = [0, 0, 0]
            v[d] = t
            axes[tuple(v)] = float(rng.uniform(-2, 2))
    f, spread = propagate_box(model, (3, 3, 3), axes, alpha)
    assert spread < 1e-10
    surf = write(tmp_path / "s.json", surface_to_dict(box_corner_surface((3, 3, 3))))
    flds = write(tmp_path / "f.json", fields_to_dict(f))
    code = main(["action", "--surface", surf, "--fields", flds, "--flip", "--flips", "6", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert len(doc["flips"]) == 6
    assert max(abs(ch["delta"]) for ch in doc["flips"]) < 1e-8
