import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from fatdist.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, json.loads(out.out), out.out, out.err


class TestCheck:
    def test_holomorphic_model(self, capsys):
        code, doc, _, _ = run(capsys, "check", DATA / "holomorphic_model_n1.json")
        assert code == 0
        assert doc["report"]["info"]["fat"] is True
        assert doc["report"]["info"]["degree"] == [2]

    def test_holomorphic_tuple(self, capsys):
        code, doc, _, _ = run(capsys, "check", DATA / "holomorphic_tuple_n1.json")
        assert code == 0 and doc["report"]["info"]["degree"] == 2

    def test_equal_forms_not_fat(self, capsys):
        code, doc, _, _ = run(capsys, "check", DATA / "equal_forms.json")
        assert code == 1
        assert doc["report"]["info"]["fat"] is False
        fails = [c for c in doc["report"]["checks"] if not c["passed"]]
        assert [c["name"] for c in fails] == ["fat"]

    def test_malformed(self, capsys):
        code, doc, _, _ = run(capsys, "check", DATA / "malformed.json")
        assert code == 2
        assert "malformed.json:4:1" in doc["error"]["message"]

    def test_qcont(self, capsys):
        code, doc, _, _ = run(capsys, "check", DATA / "qcont_dim8.json")
        assert code == 0 and doc["report"]["info"]["degree"] == 2

    def test_liouville(self, capsys):
        code, _, _, _ = run(capsys, "check", DATA / "liouville_holomorphic.json")
        assert code == 0

    def test_wrong_kind(self, capsys):
        code, _, _, _ = run(capsys, "check", DATA / "grid_planar.json")
        assert code == 2

    def test_with_frame_file(self, capsys, tmp_path):
        code, doc, _, _ = run(capsys, "frame", DATA / "tuple_dim8_deg2.json", "--regime", "horizontal_deg2",
                              "--k", "2")
        assert code == 0
        fr = tmp_path / "frame.json"
        fr.write_text(json.dumps({"schema_version": "1.0", "kind": "frame", "payload": doc["frame"]}))
        code, doc, _, _ = run(capsys, "check", DATA / "tuple_dim8_deg2.json", fr)
        assert code == 0
        assert "frame regular" in [c["name"] for c in doc["report"]["checks"]]


class TestFrame:
    def test_dim8_k2(self, capsys):
        code, doc, _, _ = run(capsys, "frame", DATA / "tuple_dim8_deg2.json", "--regime", "horizontal_deg2",
                              "--k", "2", "--seed", "5")
        assert code == 0
        assert np.array(doc["frame"]["vectors"]).shape == (2, 8)

    def test_dim4_k2_no_frame(self, capsys):
        code, doc, _, _ = run(capsys, "frame", DATA / "tuple_dim4_deg2.json", "--regime", "horizontal_deg2",
                              "--k", "2")
        assert code == 4
        assert "frame" not in doc

    def test_deterministic(self, capsys):
        args = ("frame", DATA / "qcont_dim8.json", "--regime", "isocontact_qcont", "--k", "1", "--seed", "9")
        _, _, a, err_a = run(capsys, *args)
        _, _, b, _ = run(capsys, *args)
        assert a == b
        assert " in " in err_a and " in " not in a.split('"exit_code"')[1]

    def test_regime_kind_mismatch(self, capsys):
        code, _, _, _ = run(capsys, "frame", DATA / "tuple_dim8_deg2.json", "--regime", "horizontal_qcont",
                            "--k", "1")
        assert code == 2

    def test_missing_regime(self, capsys):
        code, _, _, _ = run(capsys, "frame", DATA / "tuple_dim8_deg2.json")
        assert code == 2


class TestVerify:
    @pytest.mark.parametrize("suite", ["fat2-props", "deg2-identities", "qcont-props", "curvature-cross",
                                       "jets-oracle", "liouville"])
    def test_suites_pass(self, capsys, suite):
        code, doc, _, _ = run(capsys, "verify", "--suite", suite, "--trials", "5", "--seed", "1")
        assert code == 0
        stats = doc["report"]["info"]["stats"]
        assert all({"min", "median", "max"} <= set(s) for s in stats.values())

    def test_corrupted_tolerance(self, capsys):
        code, doc, _, _ = run(capsys, "verify", "--suite", "fat2-props", "--trials", "5", "--tol", "10")
        assert code == 1
        assert doc["report"]["passed"] is False

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "nope"])
        assert exc.value.code == 2

    def test_file_context(self, capsys):
        code, doc, _, _ = run(capsys, "verify", DATA / "jets_k2.json", "--suite", "jets-oracle", "--trials", "3")
        assert code == 0

    def test_deterministic(self, capsys):
        _, _, a, _ = run(capsys, "verify", "--suite", "qcont-props", "--trials", "4", "--seed", "3")
        _, _, b, _ = run(capsys, "verify", "--suite", "qcont-props", "--trials", "4", "--seed", "3")
        assert a == b


class TestLift:
    def test_planar(self, capsys):
        code, doc, _, _ = run(capsys, "lift", DATA / "liouville_holomorphic.json", DATA / "grid_planar.json")
        assert code == 0
        assert doc["report"]["info"]["max_residual"] <= 1e-12
        assert np.array(doc["lifted"]).shape == (30, 6)

    def test_circle_refine(self, capsys):
        code, doc, _, _ = run(capsys, "lift", DATA / "liouville_holomorphic.json", DATA / "grid_circle.json",
                              "--refine", "3")
        assert code == 0
        ratios = doc["report"]["info"]["refinement"]["ratios"]
        assert len(ratios) == 3 and all(3.0 <= r <= 5.0 for r in ratios)

    def test_nonexact(self, capsys):
        code, doc, _, _ = run(capsys, "lift", DATA / "liouville_holomorphic.json", DATA / "grid_nonexact.json")
        assert code == 5
        assert "edge (0,)-(1,)" in doc["error"]["message"]

    def test_refine_needs_curve(self, capsys):
        code, _, _, _ = run(capsys, "lift", DATA / "liouville_holomorphic.json", DATA / "grid_nonexact.json",
                            "--refine", "2")
        assert code == 2


class TestJets:
    def test_shipped(self, capsys):
        code, doc, _, err = run(capsys, "jets", DATA / "jets_k2.json", "--oracle")
        assert code == 0
        assert doc["report"]["checks"][0]["residual"] <= 1e-9
        assert doc["report"]["checks"][1]["residual"] <= 1e-6
        assert "residual" in err

    def test_nonregular(self, capsys):
        code, doc, _, _ = run(capsys, "jets", DATA / "jets_nonregular.json")
        assert code == 6
        assert doc["error"]["type"] == "NotRegularError"

    def test_homogeneous_zero(self, capsys):
        code, doc, _, _ = run(capsys, "jets", DATA / "jets_homogeneous.json")
        assert code == 0
        assert all(v == 0.0 for vec in doc["solution"]["values"] for v in vec)


@pytest.mark.skipif(shutil.which("fatdist") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["fatdist", "check", str(DATA / "equal_forms.json")], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["exit_code"] == 1
