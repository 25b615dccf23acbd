import json

import pytest
from click.testing import CliRunner

import sumsetlab.cli as cli
from sumsetlab.engine import BoundCheck, VerificationReport
from sumsetlab.groups import SubsetMask


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli.main, list(args))


def test_verify_exhaustive_cyclic_7(runner):
    result = invoke(runner, "verify", "--group", "cyclic:7", "--theorem", "cd",
                    "--mode", "exhaustive", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["pairs_checked"] == 16129
    assert payload["violations"] == []
    assert payload["theorem"] == "cd"


def test_verify_text_output_mentions_pairs(runner):
    result = invoke(runner, "verify", "--group", "cyclic:5")
    assert result.exit_code == 0
    assert "pairs checked   961" in result.output
    assert "violations      0" in result.output


def test_trace_command_emits_a_full_proof_trace(runner):
    result = invoke(runner, "trace", "--group", "heisenberg:3",
                    "--set-a", "0,1", "--set-b", "0,3", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["kind"] == "inductive"
    assert payload["final_chain"]["target"] == 3
    assert payload["final_chain"]["holds"]


def test_trace_text_mode_shows_the_chain(runner):
    result = invoke(runner, "trace", "--group", "heisenberg:3",
                    "--set-a", "0,1", "--set-b", "0,3")
    assert result.exit_code == 0
    assert "chain: |A*B| = 4 >= 4 = 4 >= 3" in result.output


def test_decompose_quaternion_with_named_kernel_and_reps(runner):
    result = invoke(runner, "decompose", "--group", "quaternion",
                    "--kernel", "6", "--rep-policy", "explicit:0,4", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["kernel"] == [0, 1, 6, 7]
    assert payload["representatives"] == [0, 4]
    assert payload["pairs"] == [
        [0, 0], [1, 0], [7, 1], [6, 1], [0, 1], [1, 1], [6, 0], [7, 0]
    ]
    assert payload["carry"][1][1] == 1


def test_decompose_defaults_to_the_decomposition_policy_kernel(runner):
    result = invoke(runner, "decompose", "--group", "quaternion", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["kernel"] == [0, 1]
    assert payload["policy"] == "lowest_index"


def test_decompose_seeded_policy_is_stable(runner):
    first = invoke(runner, "decompose", "--group", "quaternion",
                   "--kernel", "6", "--rep-policy", "seeded_random:3", "--json")
    second = invoke(runner, "decompose", "--group", "quaternion",
                    "--kernel", "6", "--rep-policy", "seeded_random:3", "--json")
    assert first.exit_code == second.exit_code == 0
    assert first.output == second.output


def test_extremal_command_counts_pairs(runner):
    result = invoke(runner, "extremal", "--group", "cyclic:7",
                    "--size-a", "2", "--size-b", "3", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["bound"] == 4
    assert payload["count"] == 147
    assert {"a": [0, 1], "b": [0, 1, 2]} in payload["pairs"]


def test_validate_command_exit_codes(runner, tmp_path):
    good = invoke(runner, "validate", "--group", "quaternion")
    assert good.exit_code == 0
    assert "all group axioms hold" in good.output

    bad_table = tmp_path / "bad.cay"
    bad_table.write_text("2\n0 1\n1 1\n")
    result = invoke(runner, "validate", "--group", f"table:{bad_table}")
    assert result.exit_code == 2


def test_usage_errors_exit_2(runner, tmp_path):
    assert invoke(runner, "verify", "--group", "nonsense:1").exit_code == 2
    assert invoke(runner, "verify", "--group", "cyclic:25").exit_code == 2
    assert invoke(runner, "verify", "--group", "cyclic:5",
                  "--mode", "sampled").exit_code == 2
    assert invoke(runner, "verify", "--group", "cyclic:5",
                  "--mode", "capped").exit_code == 2
    missing = tmp_path / "missing.cay"
    assert invoke(runner, "verify", "--group", f"table:{missing}").exit_code == 2
    assert invoke(runner, "trace", "--group", "heisenberg:3",
                  "--set-a", "0,1,3", "--set-b", "0,1").exit_code == 2
    assert invoke(runner, "trace", "--group", "cyclic:5",
                  "--set-a", "zero", "--set-b", "0").exit_code == 2


def test_sampled_runs_are_byte_identical_across_workers(runner):
    args = ("verify", "--group", "frobenius:7:3:2", "--mode", "sampled",
            "--seed", "42", "--count", "2000", "--json")
    one = invoke(runner, *args, "--workers", "1")
    three = invoke(runner, *args, "--workers", "3")
    again = invoke(runner, *args, "--workers", "1")
    assert one.exit_code == three.exit_code == again.exit_code == 0
    assert one.output == three.output == again.output


def test_exhaustive_json_is_byte_identical_across_runs(runner):
    args = ("verify", "--group", "cyclic:7", "--json")
    assert invoke(runner, *args).output == invoke(runner, *args).output


def test_out_flag_writes_the_report_to_a_file(runner, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(runner, "verify", "--group", "cyclic:5", "--json",
                    "--out", str(out))
    assert result.exit_code == 0
    payload = json.loads(out.read_text())
    assert payload["group"] == "cyclic:5"


def test_workers_env_variable_is_honoured(runner, monkeypatch):
    monkeypatch.setenv("SUMSETLAB_WORKERS", "2")
    result = invoke(runner, "verify", "--group", "cyclic:5", "--json")
    assert result.exit_code == 0
    monkeypatch.setenv("SUMSETLAB_WORKERS", "soup")
    result = invoke(runner, "verify", "--group", "cyclic:5", "--json")
    assert result.exit_code == 2


def test_violations_drive_exit_code_1(runner, monkeypatch):
    # a genuine failing BoundCheck is not reachable through real verification,
    # so inject a report double carrying one violation
    fake_check = BoundCheck(
        group="cyclic:5", a=SubsetMask.from_elements(5, (0,)),
        b=SubsetMask.from_elements(5, (1,)), a_size=1, b_size=1,
        product_size=0, p_g=5, bound=1, holds=False,
    )
    fake_report = VerificationReport(
        group="cyclic:5", group_order=5, theorem="cd",
        mode={"kind": "exhaustive"}, p_g=5, pairs_checked=1,
        violations=(fake_check,), extremal_count=0, wall_time=0.0,
    )
    monkeypatch.setattr(cli, "verify_exhaustive", lambda *a, **k: fake_report)
    result = invoke(runner, "verify", "--group", "cyclic:5", "--json")
    assert result.exit_code == 1
    payload = json.loads(result.output)
    assert payload["violations"][0]["holds"] is False

    text = invoke(runner, "verify", "--group", "cyclic:5")
    assert text.exit_code == 1
    assert "VIOLATION" in text.output


def test_json_reports_carry_no_wall_time(runner):
    result = invoke(runner, "verify", "--group", "cyclic:5", "--json")
    payload = json.loads(result.output)
    assert "wall_time" not in payload
    assert "wall time" not in result.output.lower()
