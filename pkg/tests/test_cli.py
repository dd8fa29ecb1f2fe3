import numpy as np
import pytest

from qweinstein import LatticeWindow, QParams, lp_norm
from qweinstein.cli import (
    FileFormatError,
    JobConfig,
    main,
    random_even_bump,
    read_gridfunction,
    write_gridfunction,
)


def test_file_round_trip_csv(tmp_path):
    p = QParams(q=0.5, alpha=0.5)
    f = random_even_bump(p, LatticeWindow(-2, 3, -1, 2), seed=3, pad=1)
    path = tmp_path / "f.csv"
    write_gridfunction(f, str(path), "csv")
    g = read_gridfunction(str(path))
    assert g.params == f.params
    assert g.window.shape == f.window.shape
    assert np.array_equal(g.samples, f.samples)
    assert g.parity_y == f.parity_y


def test_file_round_trip_json(tmp_path):
    p = QParams(q=0.7, alpha=0.0)
    f = random_even_bump(p, LatticeWindow(0, 2, 0, 2), seed=4)
    path = tmp_path / "f.json"
    write_gridfunction(f, str(path), "json")
    g = read_gridfunction(str(path))
    assert np.array_equal(g.samples, f.samples)


def test_malformed_header_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("# nonsense v1\n1,0,0,1.0,0.0\n")
    rc = main(["transform", "--input", str(path), "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    err = capsys.readouterr().err
    assert ":1:" in err


def test_malformed_row_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# qweinstein v1 q=0.5 alpha=0.0 parity=even n1=[0,2] n2=[0,2]\n"
                    "sign,n1,n2,re,im\n"
                    "1,0,0,1.0\n")
    with pytest.raises(FileFormatError, match=":3:"):
        read_gridfunction(str(path))


def test_duplicate_point_rejected(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("# qweinstein v1 q=0.5 alpha=0.0 parity=even n1=[0,2] n2=[0,2]\n"
                    "1,0,0,1.0,0.0\n"
                    "1,0,0,2.0,0.0\n")
    with pytest.raises(FileFormatError, match="duplicate"):
        read_gridfunction(str(path))


def test_gen_is_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        rc = main(["--q", "0.5", "--alpha", "0.0", "--seed", "9",
                   "gen", "--support=-1,2,-1,2", "--out", str(out)])
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_transform_round_trip_cli(tmp_path, capsys):
    src = tmp_path / "f.csv"
    fwd = tmp_path / "F.csv"
    back = tmp_path / "g.csv"
    assert main(["--q", "0.5", "--alpha", "0.0", "--seed", "5",
                 "gen", "--support=-1,2,-1,2", "--out", str(src)]) == 0
    assert main(["transform", "--input", str(src), "--direction", "forward",
                 "--out", str(fwd)]) == 0
    err = capsys.readouterr().err
    assert "tail_bound=" in err
    f = read_gridfunction(str(src))
    w = f.window
    window_arg = f"{w.n1_min},{w.n1_max},{w.n2_min},{w.n2_max}"
    assert main([f"--window={window_arg}", "transform", "--input", str(fwd),
                 "--direction", "inverse", "--out", str(back)]) == 0
    g = read_gridfunction(str(back))
    diff = f.with_samples(g.samples - f.samples)
    assert lp_norm(diff, 2.0) / lp_norm(f, 2.0) < 1e-6


def test_empty_function_file(tmp_path):
    path = tmp_path / "z.csv"
    path.write_text("# qweinstein v1 q=0.5 alpha=0.0 parity=even n1=[0,2] n2=[0,2]\n"
                    "sign,n1,n2,re,im\n")
    out = tmp_path / "o.csv"
    rc = main(["--window=0,4,0,4", "transform", "--input", str(path), "--out", str(out)])
    assert rc == 0
    g = read_gridfunction(str(out))
    assert np.all(g.samples == 0)


def test_bandwidth_cli(tmp_path, capsys):
    src = tmp_path / "f.csv"
    fwd = tmp_path / "F.csv"
    csv_out = tmp_path / "a.csv"
    assert main(["--q", "0.5", "--alpha", "0.0", "--seed", "6",
                 "gen", "--support=0,2,0,2", "--out", str(src)]) == 0
    assert main(["transform", "--input", str(src), "--out", str(fwd)]) == 0
    capsys.readouterr()
    rc = main(["--window=-2,4,-2,4", "bandwidth", "--input", str(fwd),
               "--N", "20", "--out", str(csv_out)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "estimate=" in out and "exponent_normalization=sup||x||" in out
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "n,a_n_literal,a_n_spectral"
    assert len(lines) == 21


def test_bandwidth_usage_error(tmp_path):
    src = tmp_path / "f.csv"
    assert main(["--q", "0.5", "--seed", "6", "gen", "--support=0,2,0,2",
                 "--out", str(src)]) == 0
    rc = main(["bandwidth", "--input", str(src), "--N", "0"])
    assert rc == 1


def test_verify_plancherel_ok(capsys):
    rc = main(["--q", "0.5", "--alpha", "0.0", "--seed", "2", "--tol", "1e-6",
               "verify", "--suite", "plancherel"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "[ok]" in out


def test_verify_shrunken_window_fails(capsys):
    rc = main(["--q", "0.5", "--alpha", "0.0", "--seed", "2", "--tol", "1e-6",
               "--window=-1,3,-1,3", "verify", "--suite", "plancherel"])
    assert rc == 3
    out = capsys.readouterr().out
    assert "tail=" in out and "FAIL" in out


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nonsense"]) == 1


@pytest.mark.parametrize("suite", ["identities", "sonine", "bounds", "orthogonality", "pw-m"])
def test_verify_suites_pass_at_aligned_q(suite, capsys):
    rc = main(["--q", "0.5", "--alpha", "0.5", "--seed", "3",
               "verify", "--suite", suite])
    out = capsys.readouterr().out
    assert rc == 0, out


def test_config_round_trip(tmp_path):
    cfg = JobConfig(q=0.7, alpha=0.25, seed=13, tol=1e-5, n1_min=-2, n1_max=4,
                    n2_min=-1, n2_max=3, fmt="json", N=33)
    path = tmp_path / "job.cfg"
    cfg.to_file(str(path))
    back = JobConfig.from_file(str(path))
    assert back == cfg


def test_config_cli_override(tmp_path):
    path = tmp_path / "job.cfg"
    JobConfig(q=0.7, seed=1).to_file(str(path))
    src = tmp_path / "f.csv"
    rc = main(["--config", str(path), "--q", "0.5", "--seed", "8",
               "gen", "--support=0,1,0,1", "--out", str(src)])
    assert rc == 0
    f = read_gridfunction(str(src))
    assert f.params.q == 0.5


def test_bandwidth_divergence_diagnostic_exit_2(tmp_path):
    # constant spectral data cannot come from a compactly supported
    # preimage; the inverse's edge diagnostics map to exit 2
    path = tmp_path / "F.csv"
    lines = ["# qweinstein v1 q=0.5 alpha=0.0 parity=even n1=[-3,3] n2=[-3,3]",
             "sign,n1,n2,re,im"]
    for sgn in (1, -1):
        for n1 in range(-3, 4):
            for n2 in range(-3, 4):
                lines.append(f"{sgn},{n1},{n2},1.0,0.0")
    path.write_text("\n".join(lines) + "\n")
    rc = main(["--window=-2,4,-2,4", "bandwidth", "--input", str(path), "--N", "5"])
    assert rc == 2
