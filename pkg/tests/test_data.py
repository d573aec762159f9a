import math

import numpy as np
import pytest

from chirpcast.data import PRESETS, read_series, read_table, simulate, write_series, write_table
from chirpcast.model import ChirpParams, mean_vector


def test_noiseless_simulation_is_the_mean():
    y = simulate(2.0, 1.25, 1.75, 1.05, 0.0, 50, np.random.default_rng(0))
    np.testing.assert_allclose(y, mean_vector(ChirpParams.from_amplitudes(2.0, 1.25, 1.75, 1.05), 50), atol=1e-14)
    y = simulate(2.0, 1.25, 1.75, 1.05, 0.0, 50, np.random.default_rng(0), rho=0.5)
    np.testing.assert_allclose(y, mean_vector(ChirpParams.from_amplitudes(2.0, 1.25, 1.75, 1.05), 50), atol=1e-14)


def test_presets():
    s2 = PRESETS["sample2"]
    assert (s2["A"], s2["B"], s2["alpha"], s2["beta"], s2["T"]) == (1.5, 1.5, 1.0, 1.0, 101)
    assert s2["sigma"] ** 2 == pytest.approx(0.5)
    assert PRESETS["sample4"]["T"] == 20
    assert PRESETS["dependent"]["rho"] == pytest.approx(math.log(2))


def test_dependent_lag1_autocorrelation():
    n = 100_000
    y = simulate(2.93, 1.91, 2.5, 0.1, 1.0, n, np.random.default_rng(1), rho=math.log(2))
    e = y - mean_vector(ChirpParams.from_amplitudes(2.93, 1.91, 2.5, 0.1), n)
    r1 = np.corrcoef(e[:-1], e[1:])[0, 1]
    # large-sample sd of the lag-1 autocorrelation of an AR(1): sqrt((1 - phi^2) / n)
    assert abs(r1 - 0.5) < 3 * math.sqrt(0.75 / n)
    assert e.var() == pytest.approx(1.0, rel=0.03)


def test_invalid_parameters():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        simulate(1, 1, 0.0, 1.0, 1.0, 10, rng)
    with pytest.raises(ValueError):
        simulate(1, 1, 1.0, 1.0, -1.0, 10, rng)
    with pytest.raises(ValueError):
        simulate(1, 1, 1.0, 1.0, 1.0, 10, rng, rho=0.0)
    with pytest.raises(ValueError):
        simulate(1, 1, 1.0, 1.0, 1.0, 0, rng)


def test_series_round_trip(tmp_path):
    y = np.random.default_rng(2).normal(size=30)
    write_series(tmp_path / "y.txt", y)
    np.testing.assert_array_equal(read_series(tmp_path / "y.txt"), y)


def test_read_series_formats(tmp_path):
    f = tmp_path / "s.csv"
    f.write_text("t,value\n# comment\n1,0.5\n\n2,-1.25\n3,2\n")
    np.testing.assert_array_equal(read_series(f), [0.5, -1.25, 2.0])
    f.write_text("1\n2\nabc\n")
    with pytest.raises(ValueError):
        read_series(f)
    f.write_text("1\nnan\n")
    with pytest.raises(ValueError):
        read_series(f)


def test_table_round_trip(tmp_path):
    cols = {"a": np.arange(3.0), "b": np.array([0.1, 1 / 3, 2e-300])}
    write_table(tmp_path / "t.csv", cols)
    back = read_table(tmp_path / "t.csv")
    assert list(back) == ["a", "b"]
    np.testing.assert_array_equal(back["b"], cols["b"])


def test_malformed_table(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ValueError):
        read_table(f)
    f.write_text("")
    with pytest.raises(ValueError):
        read_table(f)
