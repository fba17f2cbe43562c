import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympack.obstructions import (PACKING_NUMBERS, TABLE, PackingTable, max_equal_radius,
                                  max_equal_radius_sq, maximality_check, pratique_test,
                                  volume_obstruction)

SCRIPT = Path(__file__).resolve().parents[1] / "scripts" / "derive_packing_numbers.py"


def test_table_values_and_tail():
    assert [TABLE[k] for k in range(1, 9)] == [Fraction(1), Fraction(1, 2), Fraction(3, 4), Fraction(1),
                                               Fraction(4, 5), Fraction(24, 25), Fraction(63, 64),
                                               Fraction(288, 289)]
    assert TABLE[9] == TABLE[100] == 1
    with pytest.raises(ValueError):
        TABLE[0]
    with pytest.raises(ValueError):
        PackingTable({4: Fraction(1, 2)})


def test_equal_radius_examples():
    assert max_equal_radius_sq(5) == Fraction(2, 5)
    assert max_equal_radius(5) == pytest.approx(np.sqrt(0.4), abs=1e-15)
    assert max_equal_radius_sq(2) == Fraction(1, 2)
    assert max_equal_radius_sq(7) == Fraction(3, 8)
    assert max_equal_radius_sq(8) == Fraction(6, 17)
    with pytest.raises(ValueError):
        max_equal_radius(0)


@pytest.mark.parametrize("k", range(1, 12))
def test_equal_radius_fills_table(k):
    r2 = max_equal_radius_sq(k)
    if isinstance(r2, Fraction):
        assert k * r2**2 == TABLE[k]
    else:
        assert k * r2**2 == pytest.approx(float(TABLE[k]), rel=1e-14)


def test_maximality_examples():
    v = maximality_check([0.8, 0.6])
    assert v.feasible and v.maximal and "r1^2 + r2^2" in v.binding
    assert maximality_check([1 / np.sqrt(2)] * 3).maximal
    v = maximality_check([0.7, 0.6])
    assert v.feasible and not v.maximal and v.margin == pytest.approx(0.15)
    assert maximality_check([np.sqrt(0.4)] * 5).maximal
    assert maximality_check([0.9, 0.5, 0.2, 0.1]).maximal is None
    with pytest.raises(ValueError):
        maximality_check([])


def test_pratique_examples():
    assert pratique_test(1 / np.sqrt(2), 1 / np.sqrt(2))
    assert not pratique_test(np.sqrt(0.4), np.sqrt(0.4))
    assert pratique_test(1, 1)


@given(st.floats(0.01, 2), st.floats(0.01, 2))
def test_pratique_symmetric(a, b):
    assert pratique_test(a, b) == pratique_test(b, a)


def test_volume_obstruction_examples():
    assert volume_obstruction([np.sqrt(0.4)] * 5)
    assert not volume_obstruction([1.0, 0.3])
    assert volume_obstruction([1.0])


@pytest.mark.parametrize("r1", np.linspace(0.1, 0.99, 30))
def test_maximal_two_and_three_fit_by_volume(r1):
    r2 = np.sqrt(1 - r1 * r1)
    assert maximality_check([r1, r2]).feasible and volume_obstruction([r1, r2])
    big, small = max(r1, r2), min(r1, r2)
    assert volume_obstruction([big, small, small])


def test_cremona_script_reproduces_table():
    out = subprocess.run([sys.executable, str(SCRIPT)], capture_output=True, text=True, timeout=120)
    assert out.returncode == 0, out.stdout + out.stderr
    for k, p in PACKING_NUMBERS.items():
        assert f"k={k}  p_k={p} " in out.stdout
