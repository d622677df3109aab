import json
from pathlib import Path

import pytest

from lefsum import cli

MANIFESTS = Path(__file__).resolve().parent.parent / "manifests"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_manifest(capsys, tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    return run(capsys, "--manifest", str(path))


def test_iterate_E1(capsys, tmp_path):
    code, out, _ = run_manifest(capsys, tmp_path, {"surface": "E1", "operations": [{"op": "iterate", "n": 3}]})
    assert code == 0
    rec = json.loads(out)["results"][0]
    inv = rec["invariants"]
    assert (inv["euler"], inv["sigma"]) == (36, -24)
    K = rec["normal_form"]["K"]
    assert K["expression"] == "1·Σ" and K["P_zero"] and K["B"] == 0 and K["Sigma"] == 1


def test_quintic_obstruction(capsys, tmp_path):
    code, out, _ = run_manifest(
        capsys, tmp_path, {"surface": "quintic", "operations": [{"op": "obstruction", "a": 1, "n": 2}]})
    assert code == 0
    rec = json.loads(out)["results"][0]
    assert rec["obstructed"] is True and rec["d"] == 2


@pytest.mark.parametrize("text", [
    "{not json",
    json.dumps({"surface": "E1", "operations": [{"op": "iterate"}]}),
    json.dumps({"surface": "E1", "operations": [], "extra": 1}),
    json.dumps({"surface": "K3", "operations": []}),
    json.dumps({"surface": "E1", "operations": [{"op": "iterate", "n": 0}]}),
    json.dumps({"operations": [{"op": "classify"}]}),
])
def test_malformed_manifest_exits_2(capsys, tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, out, err = run(capsys, "--manifest", str(path))
    assert code == 2 and out == "" and err.startswith("error:")


def test_missing_manifest_exits_2(capsys, tmp_path):
    code, _, _ = run(capsys, "--manifest", str(tmp_path / "absent.json"))
    assert code == 2


def test_precondition_exits_3(capsys):
    code, out, err = run(capsys, "sw-classes", "--surface", "E1")
    assert code == 3 and out == ""
    assert "general type" in err


def test_embedding_on_fibred_preset_exits_3(capsys):
    code, _, err = run(capsys, "invariants", "--surface", "E1", "--s", "1", "--k", "1")
    assert code == 3 and "already fibred" in err


def test_classify_E2(capsys):
    code, out, _ = run(capsys, "classify", "--surface", "E1", "--n", "2")
    assert code == 0
    assert json.loads(out)["results"][0]["form"] == "2·E8(−1) ⊕ 3·H"


def test_pencil_params(capsys):
    code, out, _ = run(capsys, "pencil-params", "--d", "3", "--s0", "5", "--k0", "10")
    rec = json.loads(out)["results"][0]
    assert code == 0 and (rec["s"], rec["k"]) == (6, 11)
    assert "base" not in json.loads(out)


def test_sw_classes_quintic(capsys):
    code, out, _ = run(capsys, "sw-classes")
    rec = json.loads(out)["results"][0]
    assert code == 0
    assert rec["count"] == 64 and rec["max_fibre_survivors"] == 1 and rec["survivor_is_K"]


def test_mst_subcommand(capsys):
    code, out, _ = run(capsys, "mst", "--n", "2")
    rec = json.loads(out)["results"][0]
    assert code == 0 and rec["mst_K"] == 1 and rec["only_K_nonzero"]


def test_canonical_subcommand(capsys):
    code, out, _ = run(capsys, "canonical", "--n", "4", "--m", "2", "--a", "1", *["0"] * 11)
    rec = json.loads(out)["results"][0]
    assert code == 0 and rec["closed_form_matches_gluing"]
    # gcd(2 + 4 - 2, 1·(11·4 - 1), 2) = 1
    assert rec["divisibility_formula"] == rec["divisibility_lattice"] == 1


@pytest.mark.parametrize("surface,m,n", [("E1", 1, 2), ("E1", 2, 2), ("quintic", 1, 2), ("quintic", 2, 1)])
def test_untwisted_fibresum_matches_iterate(capsys, surface, m, n):
    _, a, _ = run(capsys, "fibresum", "--surface", surface, "--m", str(m), "--n", str(n))
    _, b, _ = run(capsys, "invariants", "--surface", surface, "--n", str(m + n))
    assert json.loads(a)["results"][0]["invariants"] == json.loads(b)["results"][0]["invariants"]


def test_gram_serialization(capsys):
    code, out, _ = run(capsys, "invariants", "--surface", "E1", "--n", "2", "--gram")
    nf = json.loads(out)["results"][0]["normal_form"]
    assert nf["lattice"]["rank"] == 22 == len(nf["lattice"]["gram"]) == len(nf["labels"])
    assert nf["labels"][-2:] == ["B", "Sigma"]
    assert nf["lattice"]["gram"][-2] == [0] * 20 + [-2, 1]


@pytest.mark.parametrize("path", sorted(MANIFESTS.glob("*.json")), ids=lambda p: p.name)
def test_bundled_manifests_are_deterministic(capsys, path):
    code1, out1, _ = run(capsys, "--manifest", str(path))
    code2, out2, _ = run(capsys, "--manifest", str(path))
    assert code1 == code2 == 0
    assert out1 == out2
    assert cli.dump_json(json.loads(out1)) + "\n" == out1


def test_big_integers_become_strings():
    report = {"small": 2**53 - 1, "big": 2**53, "neg": -(2**60), "nested": [{"x": 3**50}]}
    text = cli.dump_json(report)
    back = json.loads(text)
    assert back["small"] == 2**53 - 1
    assert back["big"] == str(2**53) and back["neg"] == str(-(2**60))
    assert back["nested"][0]["x"] == str(3**50)
    assert cli.dump_json(back) == text


def test_human_output(capsys):
    code, out, _ = run(capsys, "obstruction", "--a", "1", "--n", "2", "--output", "human")
    assert code == 0
    assert "verdict: obstructed: does not extend" in out


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "7", "--count", "10")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] == 10 and rep["seed"] == 7


def test_selftest_top_level_seed(capsys):
    code, out, _ = run(capsys, "--seed", "5", "selftest", "--count", "3")
    assert code == 0 and json.loads(out)["seed"] == 5


def test_manifest_and_subcommand_conflict(capsys):
    code, _, _ = run(capsys, "--manifest", str(MANIFESTS / "e1_iterate.json"), "classify")
    assert code == 2


def test_schema_is_closed():
    for item in cli.MANIFEST_SCHEMA["properties"]["operations"]["items"]["oneOf"]:
        assert item["additionalProperties"] is False
    assert cli.MANIFEST_SCHEMA["additionalProperties"] is False
