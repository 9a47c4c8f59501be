import math
import os
import subprocess

import pytest

import waverate


def test_version():
    assert waverate.__version__ == "0.1.0"


def test_filters():
    h, g = waverate.daubechies_filter(2)
    assert len(h) == 4
    assert sum(h) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert h[0] == pytest.approx(0.482963, abs=1e-6)
    assert g[0] == pytest.approx(h[3])
    with pytest.raises(ValueError):
        waverate.daubechies_filter(13)


def test_scaling_table():
    x, y = waverate.scaling_table(1, resolution=4)
    assert x[0] == 0.0
    assert y[0] == 1.0
    assert y[-1] == 0.0


def test_select_jn():
    assert waverate.select_jn(1 << 16, 1, 1.0) == 6
    assert waverate.select_jn(1024, 1, 4.0) == 2


def test_path_fit_and_reference():
    cfg = '[process]\nkind = "ma"\ntaps = [1.0, 1.0, 1.0, 1.0]\n[innovation]\nkind = "chi_squared"\ndf = 6\n'
    path = waverate.gen_path(cfg, 4096, 3)
    assert path == waverate.gen_path(cfg, 4096, 3)
    assert abs(sum(path) / len(path) - 24.0) < 1.0
    xs = [float(v) for v in range(0, 61, 5)]
    out = waverate.fit_evaluate(path, xs, vm=4, M=4, beta=1.0)
    assert out["jn"] == 2
    assert abs(out["mass"] - 1.0) < 1e-3
    ref = waverate.reference_density("chisq_ma4", xs)
    assert max(abs(a - b) for a, b in zip(out["fhat"], ref)) < 0.02


def test_haar_single_point():
    out = waverate.fit_evaluate([0.0], [0.25, 0.75], vm=1, jn=0)
    assert out["fhat"] == [2.0, 0.0]


def test_config_errors_surface():
    with pytest.raises(ValueError, match="fractional requires d < 1/2"):
        waverate.gen_path('[process]\nkind = "fractional"\nd = 0.5\n[innovation]\nkind = "gaussian"\n', 10, 1)
    with pytest.raises(ValueError):
        waverate.fit_evaluate([0.0], [0.0], vm=2, M=1, beta=4.0)


def test_imse_and_rate():
    res = waverate.run_imse("chisq_ma4", ns=[512, 1024, 2048], reps=3, seed=7)
    assert len(res["records"]) == 9
    again = waverate.run_imse("chisq_ma4", ns=[512, 1024, 2048], reps=3, seed=7, threads=2)
    assert res["records"] == again["records"]
    ns = [s["n"] for s in res["summary"]]
    means = [s["mean"] for s in res["summary"]]
    fit = waverate.fit_rate(ns, means, 4, 1.0)
    assert fit["slope"] < 0
    assert fit["theoretical_slope"] == pytest.approx(-8 / 9)
    with pytest.raises(RuntimeError):
        waverate.fit_rate(ns[:2], means[:2], 4, 1.0)


def test_audit():
    assert waverate.audit("chi_squared:6", 1.0, 0.5)["integrable"]
    assert not waverate.audit("chi_squared:4", 1.0, 0.5)["integrable"]


def test_scenarios_and_cli():
    assert len(waverate.scenario_names()) == 10
    code, out, _ = waverate.cli(["scenarios", "--list"])
    assert code == 0
    assert len(out.strip().splitlines()) == 10
    code, _, err = waverate.cli(["nope"])
    assert code == 1
    assert "unknown subcommand" in err


@pytest.mark.skipif("WAVERATE_CLI" not in os.environ, reason="CLI binary path not provided")
def test_cli_binary(tmp_path):
    exe = os.environ["WAVERATE_CLI"]
    done = subprocess.run([exe, "filters", "--vm", "4"], capture_output=True, text=True)
    assert done.returncode == 0
    assert '"taps": 8' in done.stdout
