import json
import os
import subprocess
import math
import pathlib

import jsonschema
import numpy as np
import pytest

import compreg

SCHEMA = json.loads((pathlib.Path(__file__).resolve().parents[2] / "docs" / "fit_result.schema.json").read_text())


def test_closure_and_alr_round_trip():
    y = compreg.closure(np.array([2.0, 3.0, 5.0]))
    assert np.allclose(y, [0.2, 0.3, 0.5])
    z = compreg.alr(y)
    assert np.allclose(z, [math.log(1.5), math.log(2.5)])
    assert np.allclose(compreg.alr_inverse(z), y)
    assert abs(compreg.clr(y).sum()) < 1e-12


def test_divergences():
    assert compreg.esov(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(2 * math.log(2))
    x = np.array([0.2, 0.3, 0.5])
    assert compreg.esov(x, x) == 0.0
    assert compreg.kl(x, np.array([0.3, 0.3, 0.4])) > 0.0


def test_fit_predict_and_schema():
    responses, design, _ = compreg.generate_logistic_normal(40, 4, covariates=2, seed=3)
    result = compreg.fit(responses, design, model="esov")
    assert result.model == "esov"
    assert result.coefficients.shape == (3, 3)
    assert np.allclose(result.fitted.sum(axis=1), 1.0)
    assert np.allclose(compreg.predict(result, design), result.fitted)
    jsonschema.validate(json.loads(result.to_json()), SCHEMA)


def test_zero_handling_and_errors():
    y = np.array([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5]])
    replaced = compreg.replace_zeros(y)
    assert (replaced > 0).all()
    assert np.allclose(replaced.sum(axis=1), 1.0)
    with pytest.raises(compreg.CompregError):
        compreg.closure(np.array([1.0, -1.0, 2.0]))
    with pytest.raises(compreg.CompregError):
        compreg.fit(y, np.ones((2, 1)), model="aitchison")


def test_run_comparison_is_reproducible():
    a = compreg.run_comparison(20, 3, covariates=1, replications=3, seed=5, workers=1)
    b = compreg.run_comparison(20, 3, covariates=1, replications=3, seed=5, workers=1)
    assert a == b
    assert a["valid_replications"] == 3
    assert 0.0 <= a["win_proportion"] <= 1.0


def test_ternary_point_vertices():
    assert compreg.ternary_point(1.0, 0.0, 0.0) == pytest.approx((0.0, 0.0))


@pytest.mark.skipif("COMPREG_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_fit_output_matches_schema(tmp_path):
    out = tmp_path / "fit.json"
    smoke = pathlib.Path(__file__).resolve().parents[2] / "data" / "smoke.csv"
    result = subprocess.run(
        [os.environ["COMPREG_CLI"], "fit", "--input", str(smoke), "--parts", "y1,y2,y3", "--out", str(out)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0, result.stderr
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)
