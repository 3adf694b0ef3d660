import logging
import math

import numpy as np
import pytest

from bellwalk.asymptotics import (
    AsymptoticModel,
    BasisTerm,
    ModelTerm,
    eval_model,
    fit_tail,
    reference_model,
    tail_basis,
    tail_constant,
)
from bellwalk.errors import InvalidArgument
from bellwalk.measures import MeasureSeries

PI = math.pi


def series_from(model, T=1000, label="x"):
    t = np.arange(1, T + 1)
    return MeasureSeries(label, t, model(t))


class TestEvaluation:
    def test_constant_only(self):
        assert eval_model(AsymptoticModel(0.7), 5) == 0.7

    def test_decaying_sine(self):
        model = AsymptoticModel(0.5, [ModelTerm(2.0, BasisTerm(PI / 2, 0.0, 1.0, "sin"))])
        assert model(1) == pytest.approx(2.5)
        assert model(2) == pytest.approx(0.5, abs=1e-15)

    def test_squared_kinds(self):
        assert BasisTerm(PI / 4, 0.0, 1.0, "sin2")(2) == pytest.approx(0.5)
        assert BasisTerm(PI / 4, 0.0, 0.0, "cos2")(2) == pytest.approx(0.0, abs=1e-15)
        t = np.linspace(1, 50, 97)
        np.testing.assert_allclose(
            BasisTerm(0.3, 0.1, 0.5, "cos2")(t), np.cos(0.3 * t + 0.1) ** 2 / np.sqrt(t), atol=1e-15
        )

    def test_array_input(self):
        model = AsymptoticModel(1.0, [ModelTerm(1.0, BasisTerm(0.0, PI / 2, 0.0, "sin"))])
        np.testing.assert_allclose(model(np.array([1, 2, 3])), [2.0, 2.0, 2.0])

    @pytest.mark.parametrize("t", [0, -1])
    def test_non_positive_time(self, t):
        with pytest.raises(InvalidArgument):
            eval_model(AsymptoticModel(0.7), t)

    def test_bad_basis_term(self):
        with pytest.raises(InvalidArgument):
            BasisTerm(1.0, kind="tan")
        with pytest.raises(InvalidArgument):
            BasisTerm(1.0, decay=-0.5)


class TestFit:
    @pytest.mark.parametrize("key", [("entanglement", "p3"), ("epower", "p2"), ("epower", "p3")])
    def test_recovers_exact_model(self, key):
        truth = reference_model(key[0], key[1])
        report = fit_tail(series_from(truth), truth.basis)
        assert report.model.constant == pytest.approx(truth.constant, abs=1e-9)
        for got, want in zip(report.model.terms, truth.terms):
            assert got.amplitude == pytest.approx(want.amplitude, abs=1e-9)
        assert report.rms_residual < 1e-12
        assert report.window == (500.0, 1000.0)
        assert report.n_samples == 501

    def test_recovers_fast_decay_model(self):
        truth = reference_model("entanglement", "p1")
        report = fit_tail(series_from(truth), truth.basis, window=(50, 1000))
        assert report.model.constant == pytest.approx(truth.constant, abs=1e-9)
        assert report.max_residual < 1e-10

    def test_constant_series(self):
        series = MeasureSeries("flat", np.arange(1, 101), np.full(100, 0.42))
        report = fit_tail(series, [])
        assert report.model.constant == pytest.approx(0.42)
        assert report.max_residual < 1e-14

    def test_rank_deficient(self):
        term = BasisTerm(PI / 3, 0.2, 0.5, "cos")
        series = series_from(AsymptoticModel(0.1, [ModelTerm(1.0, term)]), T=200)
        with pytest.raises(InvalidArgument):
            fit_tail(series, [term, term])

    def test_basis_term_equal_to_constant(self):
        series = MeasureSeries("flat", np.arange(1, 101), np.full(100, 0.42))
        with pytest.raises(InvalidArgument):
            fit_tail(series, [BasisTerm(0.0, 0.0, 0.0, "cos")])

    def test_too_few_samples(self):
        series = MeasureSeries("x", np.arange(1, 11), np.linspace(0, 1, 10))
        with pytest.raises(InvalidArgument):
            fit_tail(series, [BasisTerm(1.0)], window=(9, 10))

    def test_window_must_start_after_zero(self):
        series = MeasureSeries("x", np.arange(0, 20), np.linspace(0, 1, 20))
        with pytest.raises(InvalidArgument):
            fit_tail(series, [], window=(0, 19))

    def test_non_finite_samples_dropped(self, caplog):
        values = np.full(100, 0.3)
        values[80] = np.inf
        series = MeasureSeries("x", np.arange(1, 101), values)
        with caplog.at_level(logging.WARNING):
            report = fit_tail(series, [])
        assert report.n_samples == 50
        assert report.model.constant == pytest.approx(0.3)
        assert "non-finite" in caplog.text

    def test_report_dict(self):
        truth = reference_model("epower", "p1")
        data = fit_tail(series_from(truth, T=60), truth.basis).to_dict()
        assert set(data) == {"constant", "terms", "rmsResidual", "maxResidual", "window", "samples"}
        assert data["terms"][0]["kind"] == "sin"
        assert data["window"] == [30.0, 60.0]


class TestTailConstant:
    def test_mean_over_window(self):
        series = MeasureSeries("x", np.arange(1, 11), np.arange(1, 11) / 10)
        assert tail_constant(series, (9, 10)) == pytest.approx(0.95)

    def test_empty_window(self):
        series = MeasureSeries("x", np.arange(1, 11), np.zeros(10))
        with pytest.raises(InvalidArgument):
            tail_constant(series, (20, 30))
        with pytest.raises(InvalidArgument):
            tail_constant(series, (5, 4))


class TestReferenceModels:
    def test_reference_constants(self):
        assert reference_model("entanglement", "p1").constant == 0.693156
        assert reference_model("rre", "p3", 0.75).constant == 3.64189
        assert len(reference_model("epower", "p2").terms) == 2

    def test_missing_combination(self):
        assert reference_model("srd", "p1", 0.5) is None

    def test_renyi_bases_shared(self):
        assert tail_basis("srd", "p2") == tail_basis("rre", "p2")

    def test_unknown_names(self):
        with pytest.raises(InvalidArgument):
            tail_basis("purity", "p1")
        with pytest.raises(InvalidArgument):
            tail_basis("entanglement", "p9")
