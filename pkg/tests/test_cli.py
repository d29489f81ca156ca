import json

import numpy as np
import pytest

from opmeasure import instances
from opmeasure.cli import main
from opmeasure.errors import BadInstanceFile
from opmeasure.scenarios import fixture_dir


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, [json.loads(line) for line in out.out.splitlines() if line.strip()], out.err


def strip_times(records):
    return [{k: v for k, v in r.items() if k != "wall_time"} for r in records]


def test_generate_dimension_example(tmp_path):
    out = tmp_path / "rep.json"
    assert main(["generate", "--kind", "representation", "--atoms", "2", "--domain", "2",
                 "--multiplicities", "1,2", "--seed", "7", "--out", str(out)]) == 0
    inst = instances.load(out)
    assert inst.codomain.ambient_dim == 6 and inst.space.atom_count == 2


def test_generate_is_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        main(["generate", "--kind", "measure", "--domain", "2,1", "--codomain-dim", "3", "--seed", "11", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("name", sorted(p.name for p in fixture_dir().glob("*.json")))
def test_schema_roundtrip_is_byte_identical(name):
    text = (fixture_dir() / name).read_text()
    assert instances.dumps(instances.loads(text)) == text


def test_generated_cp_measure_is_choi_certified(tmp_path, capsys):
    out = tmp_path / "m.json"
    main(["generate", "--kind", "measure", "--domain", "2", "--codomain-dim", "3", "--seed", "1", "--out", str(out)])
    code, records, _ = run(capsys, "run", "validate", "--in", str(out))
    assert code == 0
    assert set(records[0]["info"]["verdicts"].values()) == {"certified"}


def test_validate_not_spectral_fixture(capsys):
    code, records, _ = run(capsys, "run", "validate", "--in", "not-spectral.json")
    assert code == 1
    failed = [c for c in records[0]["checks"] if not c["passed"]]
    assert failed and all(c["witness"] is not None for c in failed)
    assert any("atom" in c["witness"] or "atoms" in c["witness"] for c in failed)


@pytest.mark.parametrize("name", ["identity-3atoms.json", "representation-2atoms.json",
                                  "transpose-measure.json", "positive-family.json"])
def test_valid_fixtures_pass(capsys, name):
    code, records, _ = run(capsys, "run", "validate", "--in", name)
    assert code == 0 and records[0]["passed"]


def test_semivariation_fixture(capsys):
    code, records, _ = run(capsys, "run", "semivariation", "--in", "identity-3atoms.json")
    assert code == 0
    assert records[0]["info"]["lower"] >= 3 - 1e-6 and records[0]["info"]["upper"] == 12


def test_build_from_family_fixtures(capsys):
    assert run(capsys, "run", "build-from-family", "--in", "positive-family.json")[0] == 0
    assert run(capsys, "run", "build-from-family", "--in", "nonadditive-family.json")[0] == 1


@pytest.mark.parametrize("scenario", ["roundtrip", "validate", "build-from-family", "semivariation",
                                      "convergence", "multiplicativity"])
def test_scenarios_are_deterministic(capsys, scenario):
    first = run(capsys, "run", scenario, "--seed", "5", "--trials", "3")
    second = run(capsys, "run", scenario, "--seed", "5", "--trials", "3", "--workers", "3")
    assert first[0] == second[0] == 0
    assert strip_times(first[1]) == strip_times(second[1])
    assert [r["trial"] for r in second[1]] == [0, 1, 2]


def test_exit_code_matches_failures(capsys):
    code, records, _ = run(capsys, "run", "validate", "--in", "scaled-representation.json")
    assert code == 1 and not all(r["passed"] for r in records)
    code, records, _ = run(capsys, "run", "roundtrip", "--trials", "2")
    assert code == 0 and all(r["passed"] for r in records)


def test_full_suite_small(capsys):
    code, records, err = run(capsys, "run", "full-suite", "--seed", "42", "--trials", "3")
    assert code == 0
    controls = [r for r in records if r["scenario"] == "negative-control"]
    assert len(controls) == 4 and all(r["passed"] for r in controls)
    assert "records passed" in err


def test_usage_and_io_errors(tmp_path, capsys):
    assert main(["run", "validate", "--in", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "validate", "--in", str(bad)]) == 2
    assert main(["run", "roundtrip", "--trials", "-1"]) == 2
    assert main(["run", "roundtrip", "--in", "identity-3atoms.json"]) == 2
    assert main(["generate", "--kind", "measure", "--variant", "scaled"]) == 2
    with pytest.raises(SystemExit) as err:
        main(["run", "nonsense"])
    assert err.value.code == 2


def test_fixture_dir_env(tmp_path, monkeypatch, capsys):
    src = fixture_dir() / "identity-3atoms.json"
    (tmp_path / "copy.json").write_text(src.read_text())
    monkeypatch.setenv("OPMEASURE_FIXTURES", str(tmp_path))
    assert run(capsys, "run", "validate", "--in", "copy.json")[0] == 0


def test_bad_instance_paths():
    doc = json.loads((fixture_dir() / "identity-3atoms.json").read_text())
    doc["payload"]["maps"] = doc["payload"]["maps"][:1]
    with pytest.raises(BadInstanceFile) as err:
        instances.from_document(doc)
    assert err.value.path == "payload.maps"
    doc["format"] = "other"
    with pytest.raises(BadInstanceFile):
        instances.from_document(doc)


def test_complex_encoding_roundtrip(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    assert np.array_equal(instances.decode_complex(instances.encode_complex(a), (2, 3), "x"), a)
