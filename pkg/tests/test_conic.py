import numpy as np
import pytest

from liftsim.conic import INFEASIBLE, OPTIMAL, UNBOUNDED, ConicProblem
from liftsim.errors import InputError


def test_min_x_with_lower_bound():
    prob = ConicProblem()
    x = prob.add_var()
    prob.add_le({x: -1.0}, -1.0)  # x >= 1
    prob.minimize({x: 1.0})
    res = prob.solve()
    assert res.status == OPTIMAL
    assert res.value(x) == pytest.approx(1.0, abs=1e-9)
    assert res.diagnostics["recheck"]["max_violation"] <= 1e-7


def test_infeasible_interval():
    prob = ConicProblem()
    x = prob.add_var()
    prob.add_le({x: -1.0}, -1.0)  # x >= 1
    prob.add_le({x: 1.0}, 0.0)    # x <= 0
    assert prob.solve().status == INFEASIBLE


def test_unbounded_direction():
    prob = ConicProblem()
    x = prob.add_var()
    prob.minimize({x: 1.0})
    assert prob.solve().status == UNBOUNDED


def test_psd_scalar_forced_negative_is_infeasible():
    prob = ConicProblem()
    block = prob.add_psd_block(1)
    prob.add_eq({int(block.ids[0, 0]): 1.0}, -1.0)
    assert prob.solve().status == INFEASIBLE


def test_psd_block_recheck_passes():
    # find G >> 0 matching the Gram of x^2 + 2: entries pinned by equalities
    prob = ConicProblem()
    g = prob.add_psd_block(2)
    prob.add_eq({int(g.ids[0, 0]): 1.0}, 2.0)
    prob.add_eq({int(g.ids[0, 1]): 1.0}, 0.0)
    prob.add_eq({int(g.ids[1, 1]): 1.0}, 1.0)
    res = prob.solve()
    assert res.status == OPTIMAL
    G = res.psd_value(g)
    assert np.allclose(G, [[2.0, 0.0], [0.0, 1.0]], atol=1e-7)
    assert res.diagnostics["recheck"]["psd"] <= 1e-7


def test_mixed_lp_sdp_with_objective():
    # minimize t subject to t >= trace coupling with a PSD block
    prob = ConicProblem()
    t = prob.add_var(lb=0.0)
    g = prob.add_psd_block(2)
    prob.add_eq({int(g.ids[0, 0]): 1.0, t: -1.0}, 0.0)   # g00 == t
    prob.add_eq({int(g.ids[1, 1]): 1.0}, 3.0)
    prob.add_eq({int(g.ids[0, 1]): 1.0}, 1.0)            # off-diagonal 1 forces t >= 1/3
    prob.minimize({t: 1.0})
    res = prob.solve()
    assert res.status == OPTIMAL
    assert res.value(t) == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_highs_rejects_psd():
    prob = ConicProblem()
    prob.add_psd_block(1)
    with pytest.raises(InputError):
        prob.solve(backend="highs")


def test_row_referencing_unknown_variable():
    prob = ConicProblem()
    prob.add_var()
    prob.add_eq({5: 1.0}, 0.0)
    with pytest.raises(InputError):
        prob.solve()


def test_empty_problem_is_trivially_optimal():
    res = ConicProblem().solve()
    assert res.status == OPTIMAL
    assert res.objective == 0.0
