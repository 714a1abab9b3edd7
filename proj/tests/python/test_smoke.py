import math

import pytest

import forkvol


def test_constants_and_statistics():
    assert forkvol.expected_abs_z(3.0) == pytest.approx(2.0 / math.pi, abs=1e-12)
    assert forkvol.std_t_log_density(0.5, 5.0) == forkvol.std_t_log_density(-0.5, 5.0)
    stat, p = forkvol.jarque_bera(0.5, 1.0, 60)
    assert stat == 5.0
    assert 0.0 < p < 1.0
    w = forkvol.welch_test([1, 2, 3, 4], [2, 4, 6, 8])
    assert w["t_value"] == pytest.approx(-1.7321, abs=1e-4)
    assert w["df"] == pytest.approx(4.4118, abs=1e-4)
    assert forkvol.information_criteria(5825, 6, 2297)["akaike"] == pytest.approx(-5.06661, abs=1e-5)


def test_returns_and_describe():
    assert forkvol.to_returns([100, 110])[0] == pytest.approx(math.log(1.1))
    assert forkvol.to_returns([100, 110], "simple")[0] == pytest.approx(0.1)
    s = forkvol.describe([1, 2, 3, 4, 5])
    assert s["mean"] == 3
    assert s["std_dev"] == pytest.approx(math.sqrt(2.5))


def test_event_regressors():
    dates = ["2017-12-10", "2017-12-11", "2017-12-12", "2017-12-14"]
    r = forkvol.event_regressors(["2017-12-12"] * 6 + ["2017-12-13"], dates)
    assert r["count"] == [0, 0, 6, 1]
    assert r["dummy"] == [0, 0, 1, 1]


def test_spec_validation():
    with pytest.raises(ValueError):
        forkvol.ModelSpec(dummy_location="mean", regressor="count")
    spec = forkvol.ModelSpec(dummy_location="variance", include_index=True)
    assert spec.slug() == "variance_dummy_index"
    assert spec.parameter_names()[-1] == "delta_fork_variance"
    with pytest.raises(ValueError):
        forkvol.ParameterSet(spec, beta=1.2)
    with pytest.raises(ValueError):
        forkvol.ParameterSet(spec, delta_fork_mean=0.1)


def test_simulate_filter_fit_round_trip():
    spec = forkvol.ModelSpec(dummy_location="variance")
    params = forkvol.ParameterSet(
        spec, mu=0.001, omega=-0.15, alpha=0.05, gamma=0.2, beta=0.97, delta_fork_variance=0.2
    )
    events = [1.0 if (t + 1) % 20 == 0 else 0.0 for t in range(2000)]
    sim = forkvol.simulate(params, spec, 2000, seed=4, events=events)
    assert sim["seed_consistent"]
    path = forkvol.filter(sim["returns"], params, spec, events=events)
    assert path["sigma"] == sim["sigma"]

    result = forkvol.fit(sim["returns"], spec, events=events)
    assert result["convergence"]["converged"]
    coefs = {c["name"]: c for c in result["coefficients"]}
    assert abs(coefs["beta"]["estimate"] - 0.97) < 4 * coefs["beta"]["robust_se"]
    assert result["n_obs"] == 2000


def test_errors_surface_as_python_exceptions():
    spec = forkvol.ModelSpec()
    with pytest.raises(forkvol.InputError):
        forkvol.fit([0.01, -0.01] * 50, spec)
    with pytest.raises(ValueError):
        forkvol.filter([0.01], forkvol.ParameterSet(spec), forkvol.ModelSpec(dummy_location="mean"))
