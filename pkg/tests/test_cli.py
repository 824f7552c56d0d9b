import json

import numpy as np
import pytest

from qpp.cli import main
from qpp.core import matched_projection
from qpp.matrixio import write_matrix
from qpp.supplementary import supplementary_projection

Q_UPPER = np.array([[1.0, 1.0], [0.0, 0.0]])


@pytest.fixture
def files(tmp_path):
    paths = {}
    write_matrix(tmp_path / "q.json", Q_UPPER, "q")
    write_matrix(tmp_path / "proj.json", np.diag([1.0, 0.0]), "proj")
    write_matrix(tmp_path / "bad.json", np.array([[1.0, 1.0], [0.0, 1.0]]), "bad")
    write_matrix(tmp_path / "m.json", matched_projection(Q_UPPER), "m")
    write_matrix(tmp_path / "s.json", supplementary_projection(Q_UPPER), "s")
    write_matrix(tmp_path / "t.json", np.array([[0.0, 1.0], [0.0, 1.0]]), "t")
    write_matrix(tmp_path / "odd.json", np.eye(3), "odd")
    for name in ("q", "proj", "bad", "m", "s", "t", "odd"):
        paths[name] = str(tmp_path / f"{name}.json")
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestAnalyze:
    def test_pass_and_embedded_matched(self, files, capsys):
        code, out, _ = run(capsys, "--json", "analyze", files["q"])
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "pass"
        matched = next(o for o in payload["outputs"] if o["name"] == "matched_projection")
        data = np.array(matched["data"])
        expect = matched_projection(Q_UPPER).reshape(-1)
        assert np.allclose(data[:, 0] + 1j * data[:, 1], expect, atol=1e-9)

    def test_projection_skips_norms(self, files, capsys):
        code, out, _ = run(capsys, "--json", "analyze", files["proj"])
        assert code == 0
        payload = json.loads(out)
        assert payload["properties"]["is_projection"] is True
        names = {c["name"] for c in payload["checks"]}
        assert "matched_norm_identities" not in names

    def test_non_idempotent_fails(self, files, capsys):
        code, out, _ = run(capsys, "--json", "analyze", files["bad"])
        assert code == 1
        payload = json.loads(out)
        assert payload["verdict"] == "fail"
        assert payload["checks"][0]["name"] == "is_idempotent"
        assert not payload["checks"][0]["pass"]

    def test_missing_file_usage_error(self, files, capsys):
        code, _, err = run(capsys, "analyze", str(files["dir"] / "nope.json"))
        assert code == 2
        assert "error" in err


class TestDecompose:
    def test_2x2(self, files, capsys):
        code, out, _ = run(capsys, "--json", "decompose", "--mode", "2x2", files["m"], files["q"])
        assert code == 0
        payload = json.loads(out)
        a = next(o for o in payload["outputs"] if o["name"] == "block_a")
        assert np.isclose(a["data"][0][0], (1 + np.sqrt(2)) / 2, atol=1e-9)

    def test_6x6_commuting(self, files, capsys):
        code, out, _ = run(capsys, "--json", "decompose", "--mode", "6x6", files["proj"], files["proj"])
        assert code == 0
        payload = json.loads(out)
        assert payload["properties"]["subspace_dims"] == [1, 0, 0, 1, 0, 0]

    def test_matched4_ignores_p(self, files, capsys):
        code, out, _ = run(capsys, "--json", "decompose", "--mode", "matched4", files["q"])
        assert code == 0
        payload = json.loads(out)
        s = next(o for o in payload["outputs"] if o["name"] == "block_s")
        assert np.isclose(s["data"][0][0], 0.5, atol=1e-9)

    def test_non_pair_fails(self, files, capsys):
        code, out, _ = run(capsys, "--json", "decompose", "--mode", "2x2", files["proj"], files["q"])
        assert code == 1
        assert json.loads(out)["verdict"] == "fail"

    def test_dim_mismatch_usage(self, files, capsys):
        code, _, err = run(capsys, "decompose", "--mode", "2x2", files["odd"], files["q"])
        assert code == 2


class TestReconstruct:
    def test_roundtrip(self, files, capsys, tmp_path):
        emit = tmp_path / "emitted"
        code, out, _ = run(
            capsys, "--json", "--emit-dir", str(emit), "reconstruct", files["m"], files["s"]
        )
        assert code == 0
        payload = json.loads(out)
        q = next(o for o in payload["outputs"] if o["name"] == "idempotent")
        data = np.array(q["data"])
        assert np.allclose(data[:, 0] + 1j * data[:, 1], Q_UPPER.reshape(-1), atol=1e-8)
        assert (emit / "idempotent.json").exists()

    def test_non_projection_input(self, files, capsys):
        code, out, _ = run(capsys, "--json", "reconstruct", files["q"], files["s"])
        assert code == 1
        assert json.loads(out)["verdict"] == "fail"

    def test_singular_pair(self, files, capsys, tmp_path):
        write_matrix(tmp_path / "p1.json", np.diag([1.0, 0.0]), "p1")
        write_matrix(tmp_path / "p2.json", np.diag([0.0, 1.0]), "p2")
        code, _, err = run(capsys, "reconstruct", str(tmp_path / "p1.json"), str(tmp_path / "p2.json"))
        assert code == 1
        assert "IllConditioned" in err


class TestQuadratic:
    def test_autodetect(self, files, capsys):
        code, out, _ = run(capsys, "--json", "quadratic", files["t"])
        assert code == 0
        payload = json.loads(out)
        assert np.isclose(payload["properties"]["a"][0], 0.0, atol=1e-9)
        assert np.isclose(payload["properties"]["b"][0], 1.0, atol=1e-9)
        b = next(o for o in payload["outputs"] if o["name"] == "block_b")
        assert np.isclose(b["data"][0][0], 1.0, atol=1e-8)

    def test_explicit_roots(self, files, capsys):
        code, out, _ = run(capsys, "--json", "quadratic", files["t"], "--a", "0,0", "--b", "1,0")
        assert code == 0

    def test_non_quadratic(self, files, capsys, tmp_path):
        write_matrix(tmp_path / "c.json", np.diag([1.0, 2.0, 3.0]), "c")
        code, _, err = run(capsys, "quadratic", str(tmp_path / "c.json"))
        assert code == 1
        assert "NotQuadratic" in err

    def test_half_roots_usage(self, files, capsys):
        code, _, err = run(capsys, "quadratic", files["t"], "--a", "0,0")
        assert code == 2


class TestVerify:
    def test_small_run_passes(self, capsys):
        code, out, _ = run(capsys, "--json", "verify", "--suite", "core",
                           "--seed", "3", "--trials", "4", "--dims", "2..5")
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "pass"
        assert payload["properties"]["suite"] == "core"

    def test_zero_trials_usage(self, capsys):
        code, _, err = run(capsys, "verify", "--trials", "0")
        assert code == 2

    def test_determinism(self, capsys):
        code1, out1, _ = run(capsys, "--json", "verify", "--suite", "supp",
                             "--seed", "5", "--trials", "3", "--dims", "2..4")
        code2, out2, _ = run(capsys, "--json", "verify", "--suite", "supp",
                             "--seed", "5", "--trials", "3", "--dims", "2..4")
        assert code1 == code2 == 0
        assert out1 == out2


class TestToleranceFlags:
    def test_flag_overrides_env(self, files, capsys, monkeypatch):
        monkeypatch.setenv("QPP_EQ_TOL", "1e-30")
        # env alone would fail everything; the flag must win
        code, out, _ = run(capsys, "--json", "--eq-tol", "1e-9", "analyze", files["q"])
        assert code == 0

    def test_env_applies(self, files, capsys, monkeypatch):
        monkeypatch.setenv("QPP_EQ_TOL", "1e-30")
        code, out, _ = run(capsys, "--json", "analyze", files["q"])
        assert code == 1  # impossible threshold: residual checks now fail
