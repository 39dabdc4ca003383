import json

import pytest

from divseq import cli
from divseq.deduce import SCHEMA


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_kernel_worked_example(capsys):
    code, out, _ = run(capsys, "kernel", "--p", "7", "--q", "16", "--domain", "pos",
                       "--element", "8", "--seed-bound", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "divseq-report/1" and doc["result"] == "yes"
    assert doc["certificate"]["terms"] == [{"coefficient": 1, "kind": "OrbitStep", "c": 1}]


def test_kernel_unknown(capsys):
    code, out, _ = run(capsys, "kernel", "--p", "3", "--q", "2", "--element", "11")
    assert code == 0 and json.loads(out)["result"] == "unknown"


def test_census_json(capsys):
    code, out, _ = run(capsys, "census", "--p", "3", "--q", "2", "--domain", "pos",
                       "--seeds", "1..1000")
    doc = json.loads(out)
    assert code == 0
    assert (doc["cycles"], doc["lower_bound"], doc["unresolved"]) == (1, 1, 0)


def test_census_jobs_invisible(capsys):
    outs = []
    for jobs in ("1", "3"):
        code, out, _ = run(capsys, "census", "--p", "3", "--q", "2", "--domain", "nonzero",
                           "--seeds=-200..200", "--jobs", jobs)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["cycles"] == 4


def test_census_csv(capsys):
    code, out, _ = run(capsys, "census", "--p", "5", "--q", "2", "--seeds", "1..10",
                       "--max-steps", "1000", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "seed,status,cycle_id,cycle_min" and len(lines) == 11
    assert any(",budget_exceeded," in ln or ",magnitude_exceeded," in ln for ln in lines)


@pytest.mark.parametrize("argv", [
    ["orbit", "--p", "3", "--q", "2", "--domain", "pos", "--seed", "0"],
    ["census", "--p", "3", "--q", "2", "--seeds", "-5..5"],
    ["census", "--p", "3", "--q", "2", "--seeds", "9..1"],
    ["census", "--p", "3", "--q", "2", "--seeds", "1-5"],
    ["orbit", "--p", "3", "--q", "1", "--seed", "5"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "usage"


def test_orbit_and_present(capsys):
    code, out, _ = run(capsys, "orbit", "--p", "3", "--q", "2", "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["status"]["cycle"] == [1, 4, 2]
    code, out, _ = run(capsys, "present", "--p", "7", "--q", "16", "--seed-bound", "1")
    doc = json.loads(out)
    assert doc["quotient"]["order"] == 1 and doc["kernel_flags"] == {"2": True}
    code, out, _ = run(capsys, "present", "--p", "3", "--q", "2", "--seed-bound", "5",
                       "--prime-bound", "5")
    assert json.loads(out)["basis"] == [2, 3, 5]


def test_overline(capsys):
    code, out, _ = run(capsys, "overline", "--p", "3", "--q", "2", "--domain", "nonzero",
                       "--seeds=-20..20")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "Certified"
    assert -1 in [r["value"] for r in doc["rows"]]


def test_size_guard_exit_code(capsys, monkeypatch):
    from divseq import lattice
    monkeypatch.setattr(lattice, "_MAX_BITS", 1)
    code, _, err = run(capsys, "present", "--p", "3", "--q", "2", "--seed-bound", "40")
    assert code == 2 and json.loads(err)["error"] == "size_guard"


def test_replay_failure_exit_code(capsys, monkeypatch):
    from divseq.presentation import KernelCertificate
    monkeypatch.setattr(KernelCertificate, "replay", lambda self: False)
    code, _, err = run(capsys, "kernel", "--p", "7", "--q", "2", "--element", "8")
    assert code == 3 and json.loads(err)["error"] == "replay_failure"


def test_deduce_pipeline(capsys, tmp_path):
    store = str(tmp_path / "facts.json")
    facts = []
    for p, q, x in [(7, 2, 8), (7, 16, 8)]:
        _, out, _ = run(capsys, "kernel", "--p", str(p), "--q", str(q), "--element", str(x),
                        "--seed-bound", "10")
        facts.append(out)
    code, out, _ = run(capsys, "deduce", "--store", store, "--assert", facts[0],
                       "--assert", facts[1], "--apply", "--query", "QuotientOf(H(7,16), ?)")
    assert code == 0
    doc = json.loads(out)
    hits = doc["queries"]["QuotientOf(H(7,16), ?)"]
    assert any(h["fact"]["text"] == "QuotientOf(H(7,16), H(7,2))"
               and h["fact"]["derivation"]["rule"] == "R4" for h in hits)
    with open(store) as fh:
        saved = json.load(fh)
    assert saved["schema"] == SCHEMA
    # reopening is lossless and idempotent
    code, out, _ = run(capsys, "deduce", "--store", store, "--apply")
    assert code == 0 and json.loads(out)["derived"] == []
    with open(store) as fh:
        assert json.load(fh) == saved


def test_deduce_hypothesis_text(capsys, tmp_path):
    store = str(tmp_path / "s.json")
    code, out, _ = run(capsys, "deduce", "--store", store, "--assert", "SingleClass(C(3,2,pos))",
                       "--apply", "--query", "OrderAtMost(?, ?)")
    hits = json.loads(out)["queries"]["OrderAtMost(?, ?)"]
    assert code == 0 and hits[0]["fact"]["status"] == "Conditional"


def test_deduce_rejects_bad_certificate(capsys, tmp_path):
    _, out, _ = run(capsys, "kernel", "--p", "7", "--q", "2", "--element", "8")
    doc = json.loads(out)
    doc["fact"]["derivation"]["kernel"]["element"] = 9
    doc["fact"]["statement"]["args"][0] = 9
    code, _, err = run(capsys, "deduce", "--store", str(tmp_path / "s.json"),
                       "--assert", json.dumps(doc))
    assert code == 3 and json.loads(err)["error"] == "replay_failure"


def test_deduce_schema_mismatch(capsys, tmp_path):
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"schema": "divseq-facts/0", "facts": [], "log": []}))
    code, _, err = run(capsys, "deduce", "--store", str(path))
    assert code == 1
