"""Command line interface: exit codes, payload shapes, file round trips."""

import json
from fractions import Fraction

from mmdist import load_space, save_excursion, save_space, tent
from mmdist.cli import main
from mmdist.prohorov import CommonSpaceMeasures, prohorov
from mmdist.spaces import dumps_json

F = Fraction


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def sample_file(capsys, tmp_path, seed="3", name="space.json"):
    path = tmp_path / name
    code, _, _ = run(capsys, "sample", "--seed", seed, "--out", str(path))
    assert code == 0
    return path


def test_sample_writes_a_valid_deterministic_space(capsys, tmp_path):
    p1 = sample_file(capsys, tmp_path, name="a.json")
    p2 = sample_file(capsys, tmp_path, name="b.json")
    assert p1.read_text() == p2.read_text()
    space = load_space(p1)
    assert space.n >= 1


def test_validate_good_file(capsys, tmp_path):
    path = sample_file(capsys, tmp_path)
    code, out, _ = run(capsys, "validate", "--in", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["format"] == "mmspace/1"
    assert payload["valid"] is True
    assert payload["violations"] == []
    code, out, _ = run(capsys, "validate", "--in", str(path), "--raw")
    assert code == 0
    assert out.strip() == "true"


def test_validate_reports_violations_with_exit_zero(capsys, tmp_path):
    bad = {
        "format": "mmspace/1",
        "labels": ["a", "b"],
        "dist": [["0", "1"], ["1", "0"]],
        "weights": ["3/4", "1/2"],
    }
    path = tmp_path / "bad.json"
    path.write_text(dumps_json(bad))
    code, out, _ = run(capsys, "validate", "--in", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["valid"] is False
    assert payload["violations"] != []


def test_validate_detects_excursion_files(capsys, tmp_path):
    path = tmp_path / "h.json"
    save_excursion(path, tent())
    code, out, _ = run(capsys, "validate", "--in", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["format"] == "excursion/1"
    assert payload["valid"] is True


def test_missing_file_is_a_domain_error(capsys, tmp_path):
    code, out, err = run(capsys, "validate", "--in", str(tmp_path / "nope.json"))
    assert code == 1
    assert out == ""
    assert err != ""


def test_malformed_json_is_a_domain_error(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "validate", "--in", str(path))
    assert code == 1
    assert "line" in err


def test_usage_errors_exit_two(capsys):
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys, "dist", "gp", "--a")[0] == 2
    assert run(capsys)[0] == 2


def test_canonicalize_round_trips_through_the_cli(capsys, tmp_path):
    path = sample_file(capsys, tmp_path)
    out_path = tmp_path / "canon.json"
    code, _, _ = run(capsys, "canonicalize", "--in", str(path), "--out", str(out_path))
    assert code == 0
    space = load_space(out_path)
    code, out, _ = run(capsys, "validate", "--in", str(out_path))
    assert code == 0 and json.loads(out)["valid"] is True
    assert space.n >= 1


def test_dist_gp_payload_and_raw(capsys, tmp_path):
    a = sample_file(capsys, tmp_path, seed="3", name="a.json")
    b = sample_file(capsys, tmp_path, seed="17", name="b.json")
    code, out, err = run(capsys, "dist", "gp", "--a", str(a), "--b", str(b))
    assert code == 0
    payload = json.loads(out)
    assert payload["rounding"] == "round-half-even-12"
    assert payload["exact"] is True
    value = F(payload["value"])
    assert F(payload["box_half"]) == 2 * value
    assert payload["decimal"].count(".") == 1
    code, raw_out, _ = run(capsys, "dist", "gp", "--a", str(a), "--b", str(b), "--raw")
    assert code == 0
    assert F(raw_out.strip()) == value
    code, out, _ = run(
        capsys, "dist", "gp", "--a", str(a), "--b", str(b), "--witness"
    )
    pairs = json.loads(out)["pairs"]
    assert isinstance(pairs, list) and pairs


def test_dist_gp_float_mode(capsys, tmp_path):
    a = sample_file(capsys, tmp_path, seed="3", name="a.json")
    b = sample_file(capsys, tmp_path, seed="17", name="b.json")
    code, out, _ = run(capsys, "dist", "gp", "--a", str(a), "--b", str(b), "--float")
    payload = json.loads(out)
    assert code == 0
    assert payload["rounding"] == "ieee-754-double"
    assert isinstance(payload["value"], float)
    assert "decimal" not in payload


def test_dist_box_needs_lambda(capsys, tmp_path):
    a = sample_file(capsys, tmp_path, seed="3", name="a.json")
    b = sample_file(capsys, tmp_path, seed="17", name="b.json")
    assert run(capsys, "dist", "box", "--a", str(a), "--b", str(b))[0] == 2
    code, out, _ = run(
        capsys, "dist", "box", "--a", str(a), "--b", str(b), "--lambda", "1/2"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["lambda"] == "1/2"
    box_half = F(payload["value"])
    code, out, _ = run(capsys, "dist", "gp", "--a", str(a), "--b", str(b))
    assert F(json.loads(out)["value"]) == box_half / 2


def test_dist_prohorov_requires_a_shared_space(capsys, tmp_path):
    a = sample_file(capsys, tmp_path, seed="3", name="a.json")
    b = sample_file(capsys, tmp_path, seed="17", name="b.json")
    code, _, err = run(capsys, "dist", "prohorov", "--a", str(a), "--b", str(b))
    assert code == 1
    assert "prohorov" in err
    # Same labels and distances, different weights: the intended input.
    space = load_space(a)
    twin = tmp_path / "twin.json"
    if space.n == 1:
        a = sample_file(capsys, tmp_path, seed="5", name="a.json")
        space = load_space(a)
    weights = list(space.weights)
    weights[0], weights[-1] = weights[-1], weights[0]
    save_space(twin, type(space)(space.labels, space.dist, tuple(weights)))
    code, out, _ = run(capsys, "dist", "prohorov", "--a", str(a), "--b", str(twin))
    assert code == 0
    payload = json.loads(out)
    expected = prohorov(CommonSpaceMeasures(space.dist, space.weights, tuple(weights)))
    assert F(payload["value"]) == expected


def test_dist_dh_on_an_excursion_file(capsys, tmp_path):
    path = tmp_path / "tent.json"
    save_excursion(path, tent())
    code, out, _ = run(
        capsys, "dist", "dh", "--in", str(path), "--s", "1/4", "--t", "5/8"
    )
    assert code == 0
    assert F(json.loads(out)["value"]) == F(1, 4)


def test_dist_excursion_reports_certified_interval(capsys, tmp_path):
    path = tmp_path / "tent.json"
    save_excursion(path, tent())
    shrunk = tmp_path / "shrunk.json"
    from mmdist import pl_excursion

    save_excursion(shrunk, pl_excursion((0, F(1, 2), 1), (0, F(9, 10), 0)))
    code, out, _ = run(capsys, "dist", "excursion", "--a", str(path), "--b", str(shrunk))
    assert code == 0
    payload = json.loads(out)
    assert payload["certified"] is True
    assert F(payload["lambda"]) == F(1, 11)
    lo, hi = F(payload["lo"]), F(payload["hi"])
    assert lo <= F(payload["value"]) <= hi
    assert hi - lo <= F(1, 10**8)
    gamma = payload["gamma"]
    assert F(gamma["lo"]) <= F(gamma["value"]) <= F(gamma["hi"])


def test_code_excursion_output_reloads_as_a_space(capsys, tmp_path):
    path = tmp_path / "tent.json"
    save_excursion(path, tent())
    out_path = tmp_path / "coded.json"
    code, _, _ = run(
        capsys,
        "code-excursion",
        "--in",
        str(path),
        "--resolution",
        "1/16",
        "--out",
        str(out_path),
    )
    assert code == 0
    obj = json.loads(out_path.read_text())
    assert obj["format"] == "mmspace/1"
    assert "projection" in obj and "resolution_bound" in obj
    space = load_space(out_path)
    assert space.n >= 2


def test_glue_search_and_explicit_glue(capsys, tmp_path):
    a = sample_file(capsys, tmp_path, seed="3", name="a.json")
    b = sample_file(capsys, tmp_path, seed="17", name="b.json")
    code, out, _ = run(capsys, "glue", "--a", str(a), "--b", str(b))
    assert code == 0
    payload = json.loads(out)
    value = F(payload["value"])
    assert payload["source"] in ("full", "clique", "random")
    assert payload["evaluations"] >= 1
    code, gp_out, _ = run(capsys, "dist", "gp", "--a", str(a), "--b", str(b))
    assert value == F(json.loads(gp_out)["value"])
    if "pairs" in payload:
        code, out2, _ = run(
            capsys,
            "glue",
            "--a",
            str(a),
            "--b",
            str(b),
            "--pairs",
            json.dumps(payload["pairs"]),
            "--eps",
            payload["eps"],
            "--check",
        )
        assert code == 0
        explicit = json.loads(out2)
        assert F(explicit["value"]) == value
        assert explicit["eps"] == payload["eps"]
        assert explicit["triangle_violations"] == []
    # One of pairs/eps alone is a domain error.
    assert run(capsys, "glue", "--a", str(a), "--b", str(b), "--eps", "1")[0] == 1


def test_experiment_passes_and_writes_csv(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    code, _, err = run(
        capsys,
        "experiment",
        "counterexample",
        "--n-list",
        "2,3",
        "--out",
        str(out_path),
        "--csv",
        str(csv_path),
    )
    assert code == 0
    assert "counterexample" in err
    report = json.loads(out_path.read_text())
    assert report["totals"]["passed"] is True
    assert csv_path.read_text().startswith("checks.")


def test_experiment_output_is_byte_identical_across_thread_counts(
    capsys, tmp_path, monkeypatch
):
    args = ["experiment", "theorem-check", "--count", "4"]
    p1 = tmp_path / "r1.json"
    p2 = tmp_path / "r2.json"
    assert main(args + ["--out", str(p1), "--threads", "1"]) == 0
    monkeypatch.setenv("MMSPACE_THREADS", "4")
    assert main(args + ["--out", str(p2)]) == 0
    capsys.readouterr()
    assert p1.read_text() == p2.read_text()


def test_stdout_carries_only_the_payload(capsys, tmp_path):
    path = sample_file(capsys, tmp_path)
    code, out, err = run(capsys, "validate", "--in", str(path))
    assert code == 0
    json.loads(out)  # parses as a whole
    assert "s" in err  # human timing line mentions seconds
