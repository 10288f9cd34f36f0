import numpy as np
import pytest

from signorini_lab.measurement import BoundaryMeasurement, compare


def _trace(arc, values):
    return BoundaryMeasurement(np.asarray(arc, dtype=float), np.asarray(values, dtype=float), "flux", "GAMMA")


def test_norms():
    s = np.linspace(0, 1, 101)
    m = _trace(s, np.ones_like(s) * 2.0)
    assert m.length == 1.0 and len(m) == 101
    assert m.norm_inf() == 2.0
    assert m.norm_l2() == pytest.approx(2.0, rel=1e-14)


def test_vector_values():
    s = np.linspace(0, 1, 5)
    m = _trace(s, np.column_stack([3 * np.ones(5), 4 * np.ones(5)]))
    assert np.allclose(m.magnitude(), 5.0)
    assert m.as_rows().shape == (5, 3)
    assert m.resample(np.array([0.3])).shape == (1, 2)


def test_compare_is_symmetric_and_exact_for_linear_gap():
    a = _trace(np.linspace(0, 1, 11), np.linspace(0, 1, 11))
    b = _trace(np.linspace(0, 1, 7), np.zeros(7))
    g1, g2 = compare(a, b, 0.01), compare(b, a, 0.01)
    assert g1 == g2
    assert g1.linf == pytest.approx(1.0)
    # trapezoid rule on s^2: 1/3 + 1/(6 n^2)
    n = g1.grid_size - 1
    assert g1.l2 == pytest.approx(np.sqrt(1 / 3 + 1 / (6 * n * n)), rel=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        _trace([0, 0.5, 0.5], [1, 2, 3])
    with pytest.raises(ValueError):
        compare(_trace([0, 1], [0, 0]), _trace([2, 3], [0, 0]), 0.1)
    m = _trace([0, 1], [0, 1])
    with pytest.raises(ValueError):
        m.values[0] = 5.0
