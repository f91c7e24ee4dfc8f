"""Time-series panel data model."""

from datetime import date, timedelta

import numpy as np
import pytest

from causalspread.panel import TimeSeriesPanel


def make_dates(n, start=date(2020, 1, 28)):
    return tuple(start + timedelta(days=i) for i in range(n))


def test_first_report_derivation():
    dates = make_dates(5)
    panel = TimeSeriesPanel(dates, {
        "a": np.array([0.0, 0.0, 3.0, 1.0, 0.0]),
        "b": np.zeros(5),
    })
    assert panel.first_report["a"] == dates[2]
    assert panel.first_report["b"] is None


def test_gapped_dates_rejected():
    dates = make_dates(3) + (date(2020, 2, 5),)
    with pytest.raises(ValueError, match="one day"):
        TimeSeriesPanel(dates, {"a": np.zeros(4)})


def test_length_mismatch_rejected():
    with pytest.raises(ValueError, match="length"):
        TimeSeriesPanel(make_dates(4), {"a": np.zeros(3)})


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        TimeSeriesPanel(make_dates(2), {"a": np.array([1.0, np.inf])})


def test_values_are_read_only():
    panel = TimeSeriesPanel(make_dates(3), {"a": np.arange(3.0)})
    with pytest.raises(ValueError):
        panel.values("a")[0] = 9.0


def test_with_series_and_subset():
    panel = TimeSeriesPanel(make_dates(3), {"a": np.arange(3.0)})
    widened = panel.with_series({"b": np.ones(3)})
    assert widened.names == ("a", "b")
    assert widened.subset(["b"]).names == ("b",)
    with pytest.raises(ValueError, match="already present"):
        widened.with_series({"a": np.ones(3)})


def test_unknown_series():
    panel = TimeSeriesPanel(make_dates(3), {"a": np.arange(3.0)})
    with pytest.raises(KeyError, match="unknown"):
        panel.values("zz")


def test_normalized_by_max():
    panel = TimeSeriesPanel(make_dates(3), {"a": np.array([0.0, 2.0, 4.0]),
                                            "flat": np.zeros(3)})
    scaled = panel.normalized_by_max()
    assert np.allclose(scaled.values("a"), [0.0, 0.5, 1.0])
    assert np.allclose(scaled.values("flat"), 0.0)
