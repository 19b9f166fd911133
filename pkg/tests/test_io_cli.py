import csv
import io as stdio
import json
import subprocess
import sys

import numpy as np
import pytest

from fermigauss import io
from fermigauss.channel import GaussianChannel, apply
from fermigauss.cli import fitted_exponents, main, run_bench
from fermigauss.errors import InvalidInputError, InvalidStateError
from fermigauss.fidelity import fidelity, overlap
from fermigauss.linalg import block_diag_j
from fermigauss.models import erasure, random_channel, random_dilation, random_state
from fermigauss.recovery import petz


@pytest.fixture
def files(tmp_path):
    """Writes JSON documents into a temporary directory and returns their paths."""

    def write(name, doc):
        path = tmp_path / name
        io.write_json(path, doc)
        return str(path)

    return write


class TestDocuments:
    def test_state_roundtrip_exact(self, tmp_path):
        G = random_state(1, 3)
        io.write_json(tmp_path / "s.json", io.state_to_doc(G))
        assert np.array_equal(io.load_state(tmp_path / "s.json").G, G.G)

    def test_channel_roundtrip_exact(self, tmp_path):
        ch = random_channel(2, 2, 1)
        io.write_json(tmp_path / "c.json", io.channel_to_doc(ch))
        back = io.load_channel(tmp_path / "c.json")
        assert np.array_equal(back.A, ch.A) and np.array_equal(back.B, ch.B) and back.C == ch.C

    def test_dilation_loads_as_channel(self, tmp_path):
        d = random_dilation(3, 1, 1)
        io.write_json(tmp_path / "d.json", io.dilation_to_doc(d))
        back = io.dilation_from_doc(io.read_json(tmp_path / "d.json"))
        assert np.array_equal(back.R, d.R)
        assert io.load_channel(tmp_path / "d.json").B.shape == (2, 2)

    def test_optional_fields_default(self):
        ch = io.channel_from_doc({"n_in": 1, "n_out": 1, "A": [[0, 0], [0, 0]], "B": [[1, 0], [0, 1]]})
        assert ch.C == 1 and np.array_equal(ch.D, np.zeros((2, 2)))

    def test_complex_constant(self):
        ch = GaussianChannel(np.zeros((2, 2)), np.eye(2), 0.5 - 0.25j)
        assert io.channel_from_doc(io.channel_to_doc(ch)).C == 0.5 - 0.25j

    @pytest.mark.parametrize(
        "doc",
        [
            {"n": 1, "G": [[0, 1], [-1]]},
            {"n": 2, "G": [[0, 1], [-1, 0]]},
            {"n": -1, "G": []},
            {"n": 1},
            {"n": 1, "G": [["a", 0], [0, 0]]},
        ],
    )
    def test_malformed_state(self, doc):
        with pytest.raises(InvalidInputError):
            io.state_from_doc(doc)

    def test_invalid_state_values(self):
        with pytest.raises(InvalidStateError):
            io.state_from_doc(io.state_to_doc(block_diag_j([1.2])))

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            io.document_kind({"x": 1})


class TestValidateCommand:
    def test_valid_state(self, files, capsys):
        assert main(["validate", files("s.json", io.state_to_doc(random_state(1, 2)))]) == 0
        assert "state: valid (n=2)" in capsys.readouterr().out

    def test_invalid_state(self, files, capsys):
        assert main(["validate", files("s.json", io.state_to_doc(block_diag_j([1.5, 0.2])))]) == 2
        out = capsys.readouterr().out
        assert "INVALID" in out and "1.5" in out

    def test_cptp_channel(self, files, capsys):
        assert main(["validate", files("c.json", io.channel_to_doc(random_channel(1, 1, 1)))]) == 0
        assert "CP: yes, TP: yes" in capsys.readouterr().out

    def test_non_cp_channel(self, files, capsys):
        ch = GaussianChannel(np.zeros((2, 2)), 1.2 * np.eye(2))
        assert main(["validate", files("c.json", io.channel_to_doc(ch))]) == 2
        assert "1.2" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1,\n "G": [[0, 1]', encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 1


class TestPetzCommand:
    def test_writes_recovery_channel(self, files, tmp_path, capsys):
        sigma, ch = random_state(1, 2), random_channel(2, 2, 1)
        out = str(tmp_path / "p.json")
        code = main(["petz", files("s.json", io.state_to_doc(sigma)), files("c.json", io.channel_to_doc(ch)), "-o", out])
        assert code == 0
        residual = float(capsys.readouterr().out.split("residual:")[1])
        assert residual < 1e-11
        P = io.load_channel(out)
        assert np.array_equal(P.B, petz(sigma, ch).B)

    def test_rotated(self, files, capsys):
        s = files("s.json", io.state_to_doc(random_state(1, 1)))
        c = files("c.json", io.channel_to_doc(random_channel(2, 1, 1)))
        assert main(["petz", s, c, "--t", "0.5"]) == 0
        doc = json.loads(capsys.readouterr().out.splitlines()[0])
        assert doc["n_in"] == 1

    def test_non_faithful_exit_code(self, files, capsys):
        s = files("s.json", io.state_to_doc(random_state(1, 1)))
        c = files("c.json", io.channel_to_doc(erasure(block_diag_j([1.0]))))
        assert main(["petz", s, c]) == 3
        assert "pure modes" in capsys.readouterr().err

    def test_support_mode(self, files, capsys):
        s = files("s.json", io.state_to_doc(random_state(1, 1)))
        c = files("c.json", io.channel_to_doc(erasure(block_diag_j([1.0]))))
        assert main(["petz", s, c, "--support"]) == 0
        assert "pure modes [0]" in capsys.readouterr().out


class TestFidelityCommand:
    def test_identical_states(self, files, capsys):
        s = files("s.json", io.state_to_doc(random_state(1, 2)))
        assert main(["fidelity", s, s]) == 0
        assert "F = 1.000000000000" in capsys.readouterr().out

    def test_json_matches_library(self, files, capsys):
        a, b = random_state(1, 2), random_state(2, 2)
        assert main(["fidelity", files("a.json", io.state_to_doc(a)), files("b.json", io.state_to_doc(b)), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["fidelity"] == fidelity(a, b) and doc["overlap"] == overlap(a, b)

    def test_mode_mismatch(self, files, capsys):
        a = files("a.json", io.state_to_doc(random_state(1, 1)))
        b = files("b.json", io.state_to_doc(random_state(2, 2)))
        assert main(["fidelity", a, b]) == 2


class TestOtherCommands:
    def test_apply(self, files, tmp_path):
        G, ch = random_state(1, 2), random_channel(2, 2, 1)
        out = str(tmp_path / "o.json")
        assert main(["apply", files("s.json", io.state_to_doc(G)), files("c.json", io.channel_to_doc(ch)), "-o", out]) == 0
        assert np.array_equal(io.load_state(out).G, apply(ch, G).G)

    def test_compose(self, files, capsys):
        c1, c2 = random_channel(1, 1, 1), random_channel(2, 1, 1)
        assert main(["compose", files("2.json", io.channel_to_doc(c2)), files("1.json", io.channel_to_doc(c1))]) == 0
        assert json.loads(capsys.readouterr().out)["n_out"] == 1

    def test_random_is_deterministic(self, capsys):
        main(["random", "channel", "--seed", "5", "--n", "2"])
        first = capsys.readouterr().out
        main(["random", "channel", "--seed", "5", "--n", "2"])
        assert capsys.readouterr().out == first

    def test_verify_deterministic_and_passing(self, capsys):
        assert main(["verify", "--trials", "3"]) == 0
        first = capsys.readouterr().out
        main(["verify", "--trials", "3"])
        assert capsys.readouterr().out == first
        assert "17/17 properties passed" in first

    def test_verify_failure_exit(self, capsys):
        assert main(["verify", "--trials", "2", "--tol", "1e-30"]) == 4
        assert "FAIL" in capsys.readouterr().out

    def test_verify_dense(self, capsys):
        assert main(["verify", "--trials", "2", "--dense"]) == 0
        assert "24/24 properties passed" in capsys.readouterr().out

    def test_bench_csv(self, capsys):
        assert main(["bench", "--sizes", "2,4,8", "--reps", "1"]) == 0
        rows = list(csv.reader(stdio.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["op", "n", "mean_ms", "std_ms"]
        assert len(rows) == 1 + 4 * 3

    def test_fitted_exponents(self):
        rows = [("x", 4, 1.0, 0.0), ("x", 8, 8.0, 0.0), ("x", 16, 64.0, 0.0)]
        assert fitted_exponents(rows)["x"] == pytest.approx(3.0)
        assert {r[0] for r in run_bench([2], reps=1)} == {"canonical_decompose", "pfaffian", "petz", "fidelity"}

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "fermigauss", "random", "state", "--n", "1"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["n"] == 1
