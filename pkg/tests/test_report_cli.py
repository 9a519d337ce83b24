import json
import math
import subprocess
import sys

import numpy as np
import pytest

from depfid import (
    DataMatrix,
    IndexOutOfRange,
    ParseError,
    RaggedRows,
    d_sigma,
    emit_report,
    estimate_covariance,
    ingest_csv,
    make_eigengap_pair,
    make_sign_flip_pair,
    pca_project,
    report_to_dict,
    run_audit,
)
from depfid.cli import exit_code_policy, main


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestIngestCsv:
    def test_header_parsing(self, tmp_path):
        path = write(tmp_path, "a.csv", "a,b\n1,2\n3,4\n")
        dm = ingest_csv(path, has_header=True)
        assert dm.column_names == ("a", "b")
        assert np.allclose(dm.values, [[1, 2], [3, 4]])

    def test_crlf_accepted(self, tmp_path):
        path = write(tmp_path, "crlf.csv", "1,2\r\n3,4\r\n")
        dm = ingest_csv(path, has_header=False)
        assert np.allclose(dm.values, [[1, 2], [3, 4]])

    def test_ragged_row_coordinates(self, tmp_path):
        path = write(tmp_path, "ragged.csv", "1,2\n3\n5,6\n")
        with pytest.raises(RaggedRows) as err:
            ingest_csv(path, has_header=False)
        assert err.value.row == 2

    def test_parse_error_coordinates(self, tmp_path):
        path = write(tmp_path, "bad.csv", "1,2\n3,x\n")
        with pytest.raises(ParseError) as err:
            ingest_csv(path, has_header=False)
        assert (err.value.row, err.value.col) == (2, 2)


class TestPcaProject:
    def test_full_basis_preserves_distances(self):
        rng = np.random.default_rng(71)
        ref = DataMatrix(rng.standard_normal((60, 4)))
        syn = DataMatrix(rng.standard_normal((50, 4)))
        proj = pca_project(ref, syn, 4)
        assert proj.variance_explained == pytest.approx(1.0, abs=1e-12)
        before = np.linalg.norm(ref.values[0] - ref.values[1])
        after = np.linalg.norm(proj.ref_proj.values[0] - proj.ref_proj.values[1])
        assert after == pytest.approx(before, abs=1e-8)

    def test_full_basis_preserves_d_sigma(self):
        rng = np.random.default_rng(72)
        ref = DataMatrix(rng.standard_normal((80, 5)))
        syn = DataMatrix(rng.standard_normal((80, 5)) * 1.3)
        proj = pca_project(ref, syn, 5)
        before = d_sigma(estimate_covariance(ref), estimate_covariance(syn))
        after = d_sigma(
            estimate_covariance(proj.ref_proj), estimate_covariance(proj.syn_proj)
        )
        assert after == pytest.approx(before, abs=1e-8)

    def test_rank_one_reference(self):
        base = np.outer(np.arange(10.0), [1.0, 2.0])
        ref = DataMatrix(base)
        syn = DataMatrix(base + 0.0)
        proj = pca_project(ref, syn, 1)
        assert proj.variance_explained == pytest.approx(1.0, abs=1e-12)

    def test_output_shape_at_scale(self):
        # Wide-data protocol shape: project down to 50 columns.
        rng = np.random.default_rng(73)
        ref = DataMatrix(rng.standard_normal((300, 80)))
        syn = DataMatrix(rng.standard_normal((300, 80)))
        proj = pca_project(ref, syn, 50)
        assert proj.ref_proj.values.shape == (300, 50)
        assert proj.syn_proj.values.shape == (300, 50)
        assert 0.0 < proj.variance_explained <= 1.0

    def test_p_larger_than_d_rejected(self):
        rng = np.random.default_rng(74)
        data = DataMatrix(rng.standard_normal((10, 3)))
        with pytest.raises(IndexOutOfRange):
            pca_project(data, data, 4)


class TestRunAudit:
    def test_identical_inputs(self):
        rng = np.random.default_rng(75)
        base = rng.standard_normal((200, 3)) @ np.diag([2.0, 1.0, 0.5])
        data = DataMatrix(base)
        report = run_audit(data, data, bootstrap_b=None, seed=1)
        assert report.verdict.regime == "stable"
        assert report.verdict.ratio == 0.0
        assert all(entry.sin_theta < 1e-6 for entry in report.subspace)
        assert report.slopes.sign_flips == 0
        assert report.ks.median_statistic == 0.0

    def test_sign_flip_scenario_narrative(self):
        pair = make_sign_flip_pair(0.6, 1.0, 100_000, 42)
        report = run_audit(pair.samples_ref, pair.samples_syn, bootstrap_b=None, seed=2)
        assert report.ks.median_statistic < 0.01
        observed = abs(report.slopes.slopes_ref[0] - report.slopes.slopes_syn[0])
        assert observed == pytest.approx(1.2, abs=0.03)
        assert report.verdict.d_sigma == pytest.approx(1.697, abs=0.03)
        assert report.slopes.sign_flips == 1

    def test_eigengap_unstable_scenario(self):
        # The largest sampleable perturbation is eps < sqrt(3); eps = 1.6
        # puts the ratio at sqrt(2)*1.6/2 ~ 1.13, past the threshold.
        pair = make_eigengap_pair(1.6, 50_000, 42)
        report = run_audit(pair.samples_ref, pair.samples_syn, bootstrap_b=None, seed=3)
        assert report.verdict.regime == "unstable"
        assert report.verdict.ratio == pytest.approx(np.sqrt(2) * 1.6 / 2, abs=0.05)
        assert report.subspace[0].vacuous

    def test_subspace_dims_truncated_below_d(self):
        rng = np.random.default_rng(76)
        ref = DataMatrix(rng.standard_normal((100, 3)))
        syn = DataMatrix(rng.standard_normal((100, 3)))
        report = run_audit(ref, syn, bootstrap_b=None, seed=4)
        assert [e.r for e in report.subspace] == [1, 2]

    def test_pca_projection_audit_path(self):
        rng = np.random.default_rng(80)
        mixing = rng.standard_normal((8, 8))
        ref = DataMatrix(rng.standard_normal((300, 8)) @ mixing)
        syn = DataMatrix(rng.standard_normal((300, 8)) @ mixing)
        report = run_audit(ref, syn, pca_dims=4, bootstrap_b=None, seed=6)
        assert report.dataset_meta.d == 4
        assert report.dataset_meta.pca_dims == 4
        assert 0.0 < report.dataset_meta.variance_explained <= 1.0
        assert [e.r for e in report.subspace] == [1, 2, 3]

    def test_ledoit_wolf_mode(self):
        rng = np.random.default_rng(81)
        ref = DataMatrix(rng.standard_normal((30, 6)))
        syn = DataMatrix(rng.standard_normal((30, 6)))
        emp = run_audit(ref, syn, bootstrap_b=None, seed=7, cov_mode="empirical")
        shrunk = run_audit(ref, syn, bootstrap_b=None, seed=7, cov_mode="ledoit_wolf")
        assert shrunk.verdict.d_sigma != emp.verdict.d_sigma

    def test_report_internal_consistency(self):
        rng = np.random.default_rng(77)
        ref = DataMatrix(rng.standard_normal((150, 4)) @ np.diag([3.0, 2.0, 1.0, 0.5]))
        syn = DataMatrix(rng.standard_normal((150, 4)) @ np.diag([3.1, 1.9, 1.0, 0.5]))
        report = run_audit(ref, syn, bootstrap_b=None, seed=5)
        v = report.verdict
        if v.eigengap > 0:
            assert v.ratio * v.eigengap == pytest.approx(v.d_sigma, abs=1e-9)
        for entry in report.subspace:
            if not entry.vacuous:
                assert entry.sin_theta <= entry.dk_bound + 1e-12


class TestEmitReport:
    def _report(self):
        pair = make_sign_flip_pair(0.5, 1.0, 400, 3)
        return run_audit(
            pair.samples_ref,
            pair.samples_syn,
            bootstrap_b=25,
            subsets=(5, 2),
            mmd=True,
            copula_mmd_flag=True,
            seed=11,
        )

    def test_json_round_trip_six_significant_digits(self):
        report = self._report()
        parsed = json.loads(emit_report(report, "json"))
        direct = report_to_dict(report)
        assert parsed == direct
        assert parsed["verdict"]["d_sigma"] == float(f"{report.verdict.d_sigma:.6g}")

    def test_infinite_ratio_serialized_as_string(self):
        # Zero eigengap forces ratio = inf; the JSON encoding is the string "inf".
        base = self._report()
        from dataclasses import replace

        verdict = replace(base.verdict, eigengap=0.0, ratio=math.inf, regime="unstable")
        report = replace(base, verdict=verdict)
        parsed = json.loads(emit_report(report, "json"))
        assert parsed["verdict"]["ratio"] == "inf"
        assert parsed["verdict"]["regime"] == "unstable"

    def test_markdown_tables(self):
        report = self._report()
        text = emit_report(report, "markdown")
        assert "| Median KS |" in text
        assert "stable" in text or "unstable" in text

    def test_vacuous_bound_renders_dashes(self):
        pair = make_eigengap_pair(1.6, 5_000, 42)
        report = run_audit(pair.samples_ref, pair.samples_syn, bootstrap_b=None, seed=3)
        md = emit_report(report, "markdown")
        assert "---" in md.split("Principal subspace angles")[1]
        js = json.loads(emit_report(report, "json"))
        assert js["subspace"][0]["dk_bound"] is None
        assert js["subspace"][0]["vacuous"] is True


class TestExitCodePolicy:
    def _stable_report(self):
        rng = np.random.default_rng(79)
        data = DataMatrix(rng.standard_normal((100, 2)) @ np.diag([2.0, 1.0]))
        return run_audit(data, data, bootstrap_b=None, seed=1)

    def _unstable_report(self):
        pair = make_eigengap_pair(1.6, 2_000, 42)
        return run_audit(pair.samples_ref, pair.samples_syn, bootstrap_b=None, seed=1)

    def test_stable_with_flag(self):
        assert exit_code_policy(self._stable_report(), True) == 0

    def test_unstable_with_flag(self):
        assert exit_code_policy(self._unstable_report(), True) == 2

    def test_unstable_without_flag(self):
        assert exit_code_policy(self._unstable_report(), False) == 0


class TestCliSubcommands:
    def test_synth_then_audit_json(self, tmp_path):
        ref = str(tmp_path / "ref.csv")
        syn = str(tmp_path / "syn.csv")
        code = main(
            [
                "synth", "--scenario", "sign-flip", "--rho", "0.6", "--n", "400",
                "--seed", "42", "--out-ref", ref, "--out-syn", syn,
            ]
        )
        assert code == 0
        out = str(tmp_path / "report.json")
        code = main(
            [
                "audit", "--real", ref, "--syn", syn, "--bootstrap", "20",
                "--seed", "42", "--out", out,
            ]
        )
        assert code == 0
        parsed = json.loads(open(out).read())
        assert parsed["dataset_meta"]["n_ref"] == 400

    def test_synth_prints_closed_forms(self, tmp_path, capsys):
        main(
            [
                "synth", "--scenario", "sign-flip", "--rho", "0.6", "--n", "100",
                "--seed", "42",
                "--out-ref", str(tmp_path / "r.csv"), "--out-syn", str(tmp_path / "s.csv"),
            ]
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["d_sigma"] == pytest.approx(1.697056, abs=1e-6)

    def test_synth_rejects_non_pd_eigengap(self, tmp_path):
        code = main(
            [
                "synth", "--scenario", "eigengap", "--eps", "1.8", "--n", "10",
                "--seed", "1",
                "--out-ref", str(tmp_path / "r.csv"), "--out-syn", str(tmp_path / "s.csv"),
            ]
        )
        assert code == 1

    def test_synth_rerun_byte_identical(self, tmp_path):
        paths = [str(tmp_path / name) for name in ("r1.csv", "s1.csv", "r2.csv", "s2.csv")]
        for ref, syn in (paths[:2], paths[2:]):
            main(
                [
                    "synth", "--scenario", "eigengap", "--eps", "0.5", "--n", "120",
                    "--seed", "7", "--out-ref", ref, "--out-syn", syn,
                ]
            )
        assert open(paths[0], "rb").read() == open(paths[2], "rb").read()
        assert open(paths[1], "rb").read() == open(paths[3], "rb").read()

    def test_sweep_table(self, tmp_path):
        out = str(tmp_path / "sweep.csv")
        code = main(
            ["sweep", "--scenario", "eigengap", "--eps", "0:1.4:0.2", "--n", "5000",
             "--seed", "42", "--out", out]
        )
        assert code == 0
        lines = open(out).read().strip().split("\n")
        header = lines[0].split(",")
        assert header == ["epsilon", "d_sigma", "dk_bound", "vacuous", "exact_sin_theta", "sample_sin_theta"]
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 0.0 and float(first[4]) == 0.0 and float(first[5]) == 0.0
        for line in lines[1:]:
            parts = line.split(",")
            eps, dsig, bound, exact = (float(parts[i]) for i in (0, 1, 2, 4))
            assert exact <= bound + 1e-12
            sample = float(parts[5])
            assert abs(sample - exact) < 0.05

    def test_tail_table(self, tmp_path):
        out = str(tmp_path / "tail.csv")
        code = main(
            ["tail", "--rho", "0.5", "--nu", "3", "--u=-10:2:12", "--n", "20000",
             "--seed", "42", "--out", out]
        )
        assert code == 0
        lines = open(out).read().strip().split("\n")
        assert lines[0] == "u,p_gaussian,p_tcopula,ratio"
        first = lines[1].split(",")
        assert float(first[1]) == 1.0 and float(first[2]) == 1.0
        last = lines[-1].split(",")
        assert float(last[2]) > float(last[1])  # heavier joint tail at u = 2

    def test_audit_markdown_format(self, tmp_path):
        ref = str(tmp_path / "ref.csv")
        syn = str(tmp_path / "syn.csv")
        main(
            ["synth", "--scenario", "diagonal-collapse", "--rho", "0.8", "--n", "300",
             "--seed", "5", "--out-ref", ref, "--out-syn", syn]
        )
        out = str(tmp_path / "report.md")
        code = main(
            ["audit", "--real", ref, "--syn", syn, "--bootstrap", "10",
             "--format", "md", "--out", out, "--seed", "9"]
        )
        assert code == 0
        assert "| Median KS |" in open(out).read()

    def test_fail_on_unstable_exit_code(self, tmp_path):
        ref = str(tmp_path / "ref.csv")
        syn = str(tmp_path / "syn.csv")
        main(
            ["synth", "--scenario", "eigengap", "--eps", "1.6", "--n", "20000",
             "--seed", "42", "--out-ref", ref, "--out-syn", syn]
        )
        code = main(
            ["audit", "--real", ref, "--syn", syn, "--bootstrap", "0",
             "--fail-on-unstable", "--out", str(tmp_path / "r.json"), "--seed", "1"]
        )
        assert code == 2

    def test_audit_with_pca_and_ledoit_wolf_flags(self, tmp_path):
        ref = str(tmp_path / "ref.csv")
        syn = str(tmp_path / "syn.csv")
        main(
            ["synth", "--scenario", "sign-flip", "--rho", "0.5", "--n", "200",
             "--d", "5", "--seed", "3", "--out-ref", ref, "--out-syn", syn]
        )
        out = str(tmp_path / "r.json")
        code = main(
            ["audit", "--real", ref, "--syn", syn, "--pca-dims", "3",
             "--cov-mode", "ledoit-wolf", "--bootstrap", "0", "--out", out]
        )
        assert code == 0
        parsed = json.loads(open(out).read())
        assert parsed["dataset_meta"]["pca_dims"] == 3
        assert parsed["dataset_meta"]["d"] == 3

    def test_missing_file_is_error_exit(self, tmp_path):
        code = main(
            ["audit", "--real", str(tmp_path / "nope.csv"), "--syn", str(tmp_path / "nope2.csv")]
        )
        assert code == 1

    def test_module_entry_point(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "depfid", "--help"], capture_output=True, text=True
        )
        assert result.returncode == 0
        assert "audit" in result.stdout
