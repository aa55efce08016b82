import json

import numpy as np
import pytest

from ergoxeb.cli import main
from ergoxeb.ensembles import haar_state_probs
from ergoxeb.noise import sample_bitstrings, write_probabilities, write_samples
from ergoxeb.statevector import OutputDistribution, SystemDims


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "ergoxeb" in capsys.readouterr().out


def test_missing_subcommand_exits_1():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_scan_writes_expected_rows(tmp_path, capsys):
    code = main([
        "--seed", "3", "--out-dir", str(tmp_path),
        "scan", "--qubits", "6..8", "--instances", "4",
        "--scheme", "neglog",
    ])
    assert code == 0
    out = capsys.readouterr().out
    csv_path = [l.split()[-1] for l in out.splitlines() if l.endswith(".csv")]
    lines = open(csv_path[0]).read().splitlines()
    assert len(lines) == 1 + 3 * 4  # header + (qubit counts x instances)
    summary = [p for p in tmp_path.iterdir() if p.suffix == ".json"]
    doc = json.load(open(summary[0]))
    assert doc["config"]["n_range"] == [6, 7, 8]


def test_scan_reproducible(tmp_path):
    tail = ["scan", "--qubits", "5", "--instances", "3", "--samples", "200"]
    main(["--seed", "9", "--out-dir", str(tmp_path / "a")] + tail)
    main(["--seed", "9", "--out-dir", str(tmp_path / "b")] + tail)
    a = sorted((tmp_path / "a").iterdir())
    b = sorted((tmp_path / "b").iterdir())
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_scan_strict_exit_2_on_violation(tmp_path):
    code = main([
        "--out-dir", str(tmp_path),
        "scan", "--qubits", "8", "--instances", "2",
        "--scheme", "monomial2", "--noise", "completely-noisy",
        "--alpha", "1", "--strict",
    ])
    assert code == 2


def test_scan_depolarizing_requires_fidelity(tmp_path, capsys):
    code = main([
        "--out-dir", str(tmp_path),
        "scan", "--qubits", "4", "--noise", "depolarizing",
    ])
    assert code == 1
    assert "fidelity" in capsys.readouterr().err


def test_scan_unknown_scheme_suggests(tmp_path, capsys):
    code = main([
        "--out-dir", str(tmp_path),
        "scan", "--qubits", "4", "--scheme", "monomal2",
    ])
    assert code == 1
    assert "did you mean" in capsys.readouterr().err


def test_oracle_values(capsys):
    assert main(["oracle", "--covariance", "1", "1", "4"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(-0.0125)
    assert main(["oracle", "--moment", "1", "1", "4"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.05)
    assert main(["oracle", "--haar-mean", "monomial2", "4"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.6)
    assert main(["oracle", "--plogp-cov", "64"]) == 0
    assert float(capsys.readouterr().out) < 0.0


def _write_pair(tmp_path, n=6, T=5000, seed=21):
    rng = np.random.default_rng(seed)
    P = OutputDistribution(SystemDims(n), haar_state_probs(1 << n, rng))
    samples = sample_bitstrings(P, T, seed=seed + 1)
    probs_path = tmp_path / "p.csv"
    samples_path = tmp_path / "s.txt"
    write_probabilities(P, probs_path)
    write_samples(samples, samples_path)
    return probs_path, samples_path


def test_xeb_csv_output(tmp_path, capsys):
    probs_path, samples_path = _write_pair(tmp_path)
    code = main(["xeb", "--probs", str(probs_path),
                 "--samples", str(samples_path)])
    assert code == 0
    out = capsys.readouterr().out
    fields = dict(line.split(",", 1) for line in out.splitlines())
    assert fields["n"] == "6"
    assert fields["T"] == "5000"
    # noiseless samples from the ideal distribution: F_XEB near 1
    assert abs(float(fields["f_xeb"]) - 1.0) < 0.3
    assert "log_xeb" in fields


def test_xeb_json_output(tmp_path, capsys):
    probs_path, samples_path = _write_pair(tmp_path, seed=23)
    code = main(["--format", "json", "xeb", "--probs", str(probs_path),
                 "--samples", str(samples_path)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["T"] == 5000
    assert "de_plogp" in doc


def test_xeb_zero_probability_reported(tmp_path, capsys):
    # P concentrated on one bitstring; samples include others
    dims = SystemDims(2)
    P = OutputDistribution(dims, np.array([1.0, 0.0, 0.0, 0.0]))
    probs_path = tmp_path / "p.csv"
    write_probabilities(P, probs_path)
    samples_path = tmp_path / "s.txt"
    samples_path.write_text("00\n10\n")
    code = main(["xeb", "--probs", str(probs_path),
                 "--samples", str(samples_path)])
    assert code == 0  # monomial summaries still valid
    out = capsys.readouterr().out
    assert "log_xeb_error" in out


def test_xeb_bad_sample_length_exit_1(tmp_path, capsys):
    probs_path, samples_path = _write_pair(tmp_path, seed=25)
    samples_path.write_text("010101\n0101\n")
    code = main(["xeb", "--probs", str(probs_path),
                 "--samples", str(samples_path)])
    assert code == 1
    assert "length" in capsys.readouterr().err


def test_xeb_missing_file_exit_1(tmp_path, capsys):
    code = main(["xeb", "--probs", str(tmp_path / "nope.csv"),
                 "--samples", str(tmp_path / "nope.txt")])
    assert code == 1
