"""
End-to-end tests of the command line front end
"""

import json

from src.main import attach_values, main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_text(capsys):
    code, out, _ = _run(capsys, "gen", "--k", "2", "--format", "text")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 3
    assert lines[0] == "1 2 3 4 5 6 7 8 9"
    assert lines[1] == "9 7 8 3 1 2 6 4 5"


def test_gen_builders_agree(capsys):
    outputs = {}
    for builder in ("recursive", "tensor", "dense"):
        code, out, _ = _run(capsys, "gen", "--k", "3", "--builder", builder, "--format", "text")
        assert code == 0
        outputs[builder] = out
    assert len(set(outputs.values())) == 1


def test_gen_json_and_csv(capsys):
    _, out, _ = _run(capsys, "gen", "--k", "1", "--variant", "L", "--format", "json")
    payload = json.loads(out)
    assert payload["k"] == 1
    assert payload["variant"] == "L"
    _, out, _ = _run(capsys, "gen", "--k", "1", "--format", "csv")
    assert out.splitlines()[0] == "position,perm1,perm2,perm3"
    assert out.splitlines()[1] == "1,1,3,2"


def test_metrics_from_family_file(capsys, tmp_path):
    family_file = tmp_path / "s1.txt"
    family_file.write_text("1 2 3\n3 1 2\n2 3 1\n")
    code, out, _ = _run(capsys, "metrics", "--family", str(family_file), "--coloring=+-+", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["l_plus"] == 4
    assert payload["l_minus"] == -1
    assert payload["cuts"]["l_plus"] == [1, 2, 3]
    assert payload["prefix_disc"] == 2
    assert payload["total"] == 1


def test_metrics_text_output(capsys):
    code, out, _ = _run(capsys, "metrics", "--k", "1", "--coloring", "+-+", "--format", "text")
    assert code == 0
    assert "l_plus: 4\n" in out
    assert "cuts.r_minus: 2 3 4\n" in out


def test_metrics_bad_coloring_length(capsys):
    code, _, err = _run(capsys, "metrics", "--k", "1", "--coloring", "+-")
    assert code == 2
    assert "error:" in err


def test_malformed_family_file(capsys, tmp_path):
    family_file = tmp_path / "broken.txt"
    family_file.write_text("1 2 3\n3 1 x\n2 3 1\n")
    code, _, err = _run(capsys, "metrics", "--family", str(family_file), "--coloring", "+-+")
    assert code == 2
    assert f"{family_file}:2:5:" in err


def test_family_and_k_conflict(capsys, tmp_path):
    family_file = tmp_path / "s1.txt"
    family_file.write_text("1 2 3\n3 1 2\n2 3 1\n")
    code, _, _ = _run(capsys, "solve", "--k", "1", "--family", str(family_file))
    assert code == 2


def test_solve_exact(capsys):
    code, out, _ = _run(capsys, "solve", "--k", "1", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["value"] == 2
    assert payload["witness"] == "++-"
    assert payload["nodes"] == 4


def test_solve_decide(capsys):
    code, out, _ = _run(capsys, "solve", "--k", "1", "--mode", "decide", "--t", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["feasible"] is False
    code, out, _ = _run(capsys, "solve", "--k", "1", "--mode", "decide", "--t", "2", "--format", "json")
    assert json.loads(out)["witness"] == "+-+"


def test_solve_decide_needs_threshold(capsys):
    code, _, _ = _run(capsys, "solve", "--k", "1", "--mode", "decide")
    assert code == 2


def test_solve_budget_exhausted_is_inconclusive(capsys):
    code, out, _ = _run(
        capsys, "solve", "--k", "3", "--mode", "decide", "--t", "2", "--node-budget", "3", "--format", "json"
    )
    assert code == 3
    assert json.loads(out)["status"] == "indeterminate"


def test_solve_heuristic(capsys):
    code, out, _ = _run(capsys, "solve", "--k", "1", "--mode", "heuristic", "--format", "json")
    assert code == 0
    assert json.loads(out)["witness"] == "+-+"


def test_witness_single(capsys):
    code, out, _ = _run(
        capsys, "witness", "--k", "1", "--coloring", "+-+", "--side", "L", "--sign", "+", "--format", "json"
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["cuts"] == [1, 2, 3]
    assert payload["achieved"] == 4
    assert payload["certified"] is True


def test_witness_all_with_bad_prefix(capsys):
    code, out, _ = _run(capsys, "witness", "--k", "2", "--coloring", "+" * 9, "--bad-prefix", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert len(payload["witnesses"]) == 4
    assert payload["bad_prefix"]["value"] == 9


def test_verify_theorem_json(capsys):
    code, out, err = _run(capsys, "verify", "theorem", "--k", "1", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["value"] == 2
    assert payload["status"] == "pass"
    assert "PASS" in err


def test_verify_text_summary(capsys):
    code, out, _ = _run(capsys, "verify", "identity", "--k", "1", "--format", "text")
    assert code == 0
    assert out.startswith("identity k=1")
    assert "PASS: checked=4 violations=0" in out


def test_verify_csv_to_file(capsys, tmp_path):
    target = tmp_path / "report.csv"
    code, out, _ = _run(capsys, "verify", "lemma2", "--k", "2", "--format", "csv", "--out", str(target))
    assert code == 0
    assert out == ""
    header, row = target.read_text().splitlines()
    assert header.startswith("k,variant,claim")
    assert row.startswith("2,RR,lemma2,")


def test_verify_sample_mode(capsys):
    code, out, _ = _run(
        capsys, "verify", "witness", "--k", "4", "--mode", "sample", "--samples", "200", "--seed", "7",
        "--format", "json",
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["checked"] == 200
    assert payload["seed"] == 7


def test_verify_exhaustive_cap(capsys):
    code, _, err = _run(capsys, "verify", "lemma2", "--k", "4")
    assert code == 2
    assert "sample" in err


def test_verify_variants_csv(capsys):
    code, out, _ = _run(capsys, "verify", "variants", "--k", "1", "--format", "csv")
    rows = out.splitlines()
    assert code == 0
    assert len(rows) == 3
    assert rows[1].split(",")[1] == "R"
    assert rows[2].split(",")[1] == "L"


def test_verify_inconclusive_exit_code(capsys):
    code, _, _ = _run(capsys, "verify", "theorem", "--k", "4", "--method", "decide", "--node-budget", "5")
    assert code == 3


def test_metrics_coloring_starting_with_minus(capsys):
    code, out, _ = _run(capsys, "metrics", "--k", "1", "--coloring", "-+-", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["total"] == -1
    assert payload["l_minus"] == -4
    assert payload["l_plus"] == 1


def test_witness_numeric_coloring_starting_with_minus(capsys):
    code, out, _ = _run(
        capsys, "witness", "--k", "1", "--coloring", "-1 1 -1", "--side", "L", "--sign", "-", "--format", "json"
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["achieved"] == -4
    assert payload["certified"] is True


def test_attach_values_joins_only_value_options():
    assert attach_values(["metrics", "--coloring", "-+-", "--k", "1"]) == ["metrics", "--coloring=-+-", "--k", "1"]
    assert attach_values(["witness", "--coloring=+-+"]) == ["witness", "--coloring=+-+"]
    assert attach_values(["metrics", "--coloring"]) == ["metrics", "--coloring"]


def test_non_positive_workers_rejected(capsys):
    code, _, err = _run(capsys, "solve", "--k", "1", "--workers", "0")
    assert code == 2
    assert "--workers must be positive" in err


def test_non_positive_budgets_rejected(capsys):
    code, _, err = _run(capsys, "solve", "--k", "1", "--mode", "decide", "--t", "2", "--node-budget", "0")
    assert code == 2
    assert "--node-budget" in err
    code, _, err = _run(capsys, "verify", "witness", "--k", "1", "--mode", "sample", "--samples", "0")
    assert code == 2
    assert "--samples" in err


def test_verify_variants_rejects_variant_flag(capsys):
    code, out, err = _run(capsys, "verify", "variants", "--k", "1", "--variant", "L")
    assert code == 2
    assert out == ""
    assert "--variant does not apply" in err
