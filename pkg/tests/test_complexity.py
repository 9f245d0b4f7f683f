from fractions import Fraction

import pytest

from aitlab.bitvm import BaseMachine, TableMachine
from aitlab.complexity import (Horizon, deficiency, effective_p_value,
                               empirical_a_priori, frequency_lines, k_table,
                               k_upper, prefix_sum, semimeasure_estimate,
                               table_lines)
from aitlab.dispatch import DispatchMachine
from aitlab.dyadic import ONE, Dyadic
from aitlab.errors import InvalidInput


def test_horizon_validation():
    for bad in [(-1, 10), (4, 0), (4, 10, 0)]:
        with pytest.raises(InvalidInput):
            Horizon(*bad)


def test_base_table_golden():
    lines = table_lines(k_table(BaseMachine(), "", Horizon(16, 1000)))
    assert lines == [
        "output= value=9 witness=101000000",
        "output=0 value=15 witness=100100000010000",
        "output=1 value=15 witness=100100000100000",
    ]


def test_k_upper_agrees_with_table():
    h = Horizon(16, 1000)
    table = k_table(BaseMachine(), "", h)
    for x, est in table.items():
        assert k_upper(BaseMachine(), x, "", h) == est
    assert k_upper(BaseMachine(), "0101", "", h) is None


def test_dispatch_table_is_self_output():
    for y in ["", "1", "0110"]:
        t = k_table(DispatchMachine(), y, Horizon(16, 10_000))
        assert list(t) == [y] and t[y].value == 10


def test_estimates_only_improve_with_horizon():
    small = k_table(BaseMachine(), "", Horizon(15, 1000))
    big = k_table(BaseMachine(), "", Horizon(17, 1000))
    for x, est in small.items():
        assert big[x].value <= est.value


def test_prefix_sums():
    P = DispatchMachine(prefix=True)
    assert prefix_sum(P, "01", Horizon(14, 1000)) == Dyadic(1, 10)
    assert prefix_sum(P, "01", Horizon(14, 1000)) <= ONE
    assert semimeasure_estimate(BaseMachine(), "", Horizon(14, 1000)) == Dyadic(9, 8)


def test_deficiency():
    m = TableMachine({"0": "0" * 20})
    assert deficiency("0" * 20, Horizon(20, 10), machine=m) == 19
    assert deficiency("0" * 20, Horizon(20, 1000)) == 0
    assert deficiency("011", Horizon(20, 10), machine=m) == 0


def test_p_values():
    assert str(effective_p_value(100, Dyadic.parse("1/2^1000"))) == "1/2^900"
    assert effective_p_value(0, Dyadic(1, 1000)) == Dyadic(1, 1000)
    with pytest.raises(InvalidInput):
        effective_p_value(-1, Dyadic(1, 3))
    with pytest.raises(InvalidInput):
        effective_p_value(3, Dyadic(3, 0))


def test_empirical_is_seeded():
    a = empirical_a_priori(BaseMachine(), 3000, 12, 200, seed=7)
    assert a == empirical_a_priori(BaseMachine(), 3000, 12, 200, seed=7)
    assert sum(a.values()) <= 1
    assert all(isinstance(f, Fraction) for f in a.values())
    lines = frequency_lines(a, k_table(BaseMachine(), "", Horizon(12, 200)))
    assert all(l.startswith("output=") for l in lines)
    with pytest.raises(InvalidInput):
        empirical_a_priori(BaseMachine(), 0, 12, 200, seed=7)
