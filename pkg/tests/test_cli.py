import json
import shutil
import subprocess
import sys

import pytest

from galkan.cli import main, run
from galkan.corpus import DATA, MUTATIONS


def _walk(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield k
            yield from _walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _walk(v)


def test_gal_report():
    code, rep = run(["gal", str(DATA / "extensions" / "q8_to_v4.json")])
    assert code == 0 and rep["pass"]
    assert rep["report"]["gal_invariants"] == [2] and rep["report"]["paths_agree"]
    assert {"command", "version", "pass", "report", "ms"} <= rep.keys()


def test_h2_report():
    code, rep = run(["h2", "v4"])
    assert code == 0
    assert rep["report"]["H2"] == [2] and rep["report"]["H1"] == [2, 2]
    code, rep = run(["h2", "q8", "--sparse"])
    assert rep["report"]["H2"] == [] and rep["report"]["mode"] == "sparse"


def test_kan_exit_codes():
    assert run(["kan", str(DATA / "scenarios" / "v4.json")])[0] == 0
    code, rep = run(["kan", "v4_mutated"])
    assert code == 1 and not rep["pass"]
    assert rep["report"]["witnesses"][0]["square"].startswith("kappa(d4xz2_to_v4)")
    code, rep = run(["kan", "v4_unnatural"])
    assert code == 1 and rep["report"]["witnesses"][0]["square"] == "d4xz2_onto_d4"


def test_check_failures_exit_one():
    code, rep = run(["gal", "s3_to_z2"])
    assert code == 1 and rep["report"]["normal"] is False
    code, rep = run(["pi1", "a5", "--cover", "id_a5", "--family", "sl25_to_a5"])
    assert code == 1 and "NoLifting" in rep["report"]["error"]


def test_other_commands():
    assert run(["group", "a5"])[1]["report"]["order"] == 60
    assert run(["ext", "s3_to_z2"])[1]["report"]["normal"] is False
    assert run(["pi1", "a5"])[1]["report"]["pi1_invariants"] == [2]
    assert run(["graph", "deck", "c6_to_c3"])[1]["report"]["deck_order"] == 2
    code, rep = run(["graph", "galois", "irregular3"])
    assert code == 0 and rep["report"]["regular"] is False
    code, rep = run(["graph", "exactseq", "c6_to_c3", "--max-word-len", "4"])
    assert code == 0 and rep["report"]["L"] == 4


def test_input_errors_exit_two(tmp_path, capsys):
    assert main(["gal", str(tmp_path / "missing.json")]) == 2
    assert "missing.json" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{oops", encoding="utf-8")
    assert main(["group", str(bad)]) == 2
    assert "invalid JSON" in capsys.readouterr().err
    assert main(["frobnicate", "x"]) == 2
    assert main(["suite", str(tmp_path / "nowhere")]) == 2
    schema = tmp_path / "scenario.json"
    schema.write_text(json.dumps({"bases": [], "kind": "nope"}), encoding="utf-8")
    assert main(["kan", str(schema)]) == 2


def test_no_timing_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert main(["gal", "q8_to_v4", "--no-timing"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "ms" not in set(_walk(json.loads(outs[0])))


def test_pretty_output(capsys):
    assert main(["h2", "v4", "--pretty", "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "H2: [2]" in out and not out.lstrip().startswith("{")


def test_suite_on_empty_directory(tmp_path):
    code, rep = run(["suite", str(tmp_path)])
    assert code == 0 and rep["report"]["files"] == 0 and rep["report"]["checks"] == 0


@pytest.fixture()
def small_corpus(tmp_path):
    """The V4 family of extensions with their groups, and one cover."""
    family = ["id_v4", "v4xz2_to_v4", "v4xz3_to_v4", "d4_to_v4", "d4xz2_to_v4"]
    groups = {"z2"}  # the scenario's functor value
    for e in family:
        spec = json.loads((DATA / "extensions" / f"{e}.json").read_text(encoding="utf-8"))
        groups |= {spec["dom"], spec["cod"]}
    for kind, names in (("groups", sorted(groups)), ("extensions", family),
                        ("graphs", ["c3", "c6"]), ("covers", ["c6_to_c3"])):
        (tmp_path / kind).mkdir()
        for n in names:
            shutil.copy(DATA / kind / f"{n}.json", tmp_path / kind)
    return tmp_path


def test_suite_on_a_corpus_with_a_mutation(small_corpus):
    code, rep = run(["suite", str(small_corpus), "--no-timing"])
    assert code == 0, rep["report"]["failed"]
    files = [r["file"] for r in rep["report"]["results"]]
    assert files == sorted(files)
    (small_corpus / "scenarios").mkdir()
    shutil.copy(MUTATIONS / "v4_mutated.json", small_corpus / "scenarios")
    code, rep = run(["suite", str(small_corpus), "--no-timing"])
    assert code == 1
    assert rep["report"]["failed"] == [str(small_corpus / "scenarios" / "v4_mutated.json")]
    bad = next(r for r in rep["report"]["results"] if not r["pass"])
    assert bad["checks"][0]["report"]["witnesses"][0]["square"].startswith("kappa(")


def test_suite_reports_dangling_references(small_corpus):
    (small_corpus / "groups" / "z2.json").unlink()
    (small_corpus / "scenarios").mkdir()
    shutil.copy(DATA / "scenarios" / "v4.json", small_corpus / "scenarios")
    code, rep = run(["suite", str(small_corpus), "--no-timing"])
    assert code == 1
    bad = next(r for r in rep["report"]["results"] if not r["pass"])
    assert bad["checks"][0] == {"check": "input", "pass": False,
                                "report": {"error": "unknown group z2"}}


def test_suite_threads_match_serial(small_corpus):
    serial = run(["suite", str(small_corpus), "--no-timing"])[1]["report"]
    threaded = run(["suite", str(small_corpus), "--no-timing", "--threads", "2"])[1]["report"]
    assert serial == threaded


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "galkan.cli", "h2", "v4", "--no-timing"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["report"]["H2"] == [2]
