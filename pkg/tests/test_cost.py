import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from resetword.cost import (
    PREFERENCE,
    OutOfMemory,
    SearchStats,
    SideStats,
    StepKind,
    TuningParams,
    decide,
    dfs_branching_factor,
    evaluate_steps,
    exp_mark,
    geometric,
    predicted_cost,
    step_cost,
)

# ---------------------------------------------------------------------------
# Independent transcription of the cost model, written term by term.


def ref_exp_mark(As, Bs, Ad, Bd):
    w = (1 + Bd) / (1 + Ad * Bd - Ad)
    return Bs * ((1 + Bd) / Bd + 1 / (Ad - Ad * Bd)) * As ** math.log(1 + Bd, w)


def ref_costs(s, set_cost):
    k = s["k"]
    L, dL, H, dH = s["L_bfs"], s["d_bfs"], s["H_bfs"], s["dH_bfs"]
    IL, dIL, IH, dIH = s["L_ibfs"], s["d_ibfs"], s["H_ibfs"], s["dH_ibfs"]
    bd, bs, bh = s["rb_dupl"], s["rb_self"], s["rb_hist"]
    idp, isf, ih = s["ri_dupl"], s["ri_self"], s["ri_hist"]
    E = ref_exp_mark
    bfs = (
        set_cost * k * L
        + E(k * (1 - bd) * L, k * (1 - bd) * L, dL, dL)
        + E(H, k * (1 - bd) * (1 - bs) * L, dH, dL)
        + E(k * (1 - bd) * (1 - bs) * (1 - bh) * L, IL, dL, dIL)
    )
    bfs_nh = (
        set_cost * k * L
        + E(k * (1 - bd) * L, k * (1 - bd) * L, dL, dL)
        + E(k * (1 - bd) * (1 - bs) * L, IL, dL, dIL)
    )
    ibfs = (
        set_cost * k * IL
        + E(k * (1 - idp) * IL, k * (1 - idp) * IL, 1 - dIL, 1 - dIL)
        + E(IH, k * (1 - idp) * (1 - isf) * IL, 1 - dIH, 1 - dIL)
        + E(L, k * (1 - idp) * (1 - isf) * (1 - ih) * IL, dL, dIL)
    )
    ibfs_nh = (
        set_cost * k * IL
        + E(k * (1 - idp) * IL, k * (1 - idp) * IL, 1 - dIL, 1 - dIL)
        + E(L, k * (1 - idp) * (1 - isf) * IL, dL, dIL)
    )
    return {StepKind.BFS: bfs, StepKind.BFS_NH: bfs_nh, StepKind.IBFS: ibfs, StepKind.IBFS_NH: ibfs_nh}


def ref_preds(s, set_cost, ror, wset, wcheck):
    k, R, r = s["k"], s["R"], s["r"]
    L, dL, IL, dIL = s["L_bfs"], s["d_bfs"], s["L_ibfs"], s["d_ibfs"]
    bd, bs, bh = s["rb_dupl"], s["rb_self"], s["rb_hist"]
    idp, isf, ih = s["ri_dupl"], s["ri_self"], s["ri_hist"]
    E = ref_exp_mark
    f = k * (1 - idp * ror)
    costs = ref_costs(s, set_cost)

    def tail(levels, a_size, b_size):
        return f * (f ** levels - 1) / (f - 1) * (
            set_cost * wset * k / f + wcheck * E(a_size, b_size, dL, dIL)
        )

    return f, {
        StepKind.DFS: tail(R - r, L, IL),
        StepKind.BFS: costs[StepKind.BFS] + tail(R - r - 1, k * (1 - bd) * (1 - bs) * (1 - bh) * L, IL),
        StepKind.BFS_NH: costs[StepKind.BFS_NH] + tail(R - r - 1, k * (1 - bd) * (1 - bs) * L, IL),
        StepKind.IBFS: costs[StepKind.IBFS] + tail(R - r - 1, L, k * (1 - idp) * (1 - isf) * (1 - ih) * IL),
        StepKind.IBFS_NH: costs[StepKind.IBFS_NH] + tail(R - r - 1, L, k * (1 - idp) * (1 - isf) * IL),
    }


# ---------------------------------------------------------------------------


def random_snapshot(rnd):
    s = {
        "k": rnd.randint(2, 4),
        "L_bfs": rnd.randint(1, 10**6),
        "d_bfs": rnd.uniform(0.02, 0.98),
        "H_bfs": rnd.randint(1, 10**6),
        "dH_bfs": rnd.uniform(0.02, 0.98),
        "L_ibfs": rnd.randint(1, 10**6),
        "d_ibfs": rnd.uniform(0.02, 0.98),
        "H_ibfs": rnd.randint(1, 10**6),
        "dH_ibfs": rnd.uniform(0.02, 0.98),
        "rb_dupl": rnd.uniform(0, 0.9),
        "rb_self": rnd.uniform(0, 0.9),
        "rb_hist": rnd.uniform(0, 0.9),
        "ri_dupl": rnd.uniform(0, 0.9),
        "ri_self": rnd.uniform(0, 0.9),
        "ri_hist": rnd.uniform(0, 0.9),
    }
    s["R"] = rnd.randint(4, 60)
    s["r"] = rnd.randint(1, s["R"] - 2)
    return s


def to_stats(s):
    st_ = SearchStats(s["n"] if "n" in s else 50, s["k"], r=s["r"], R=s["R"])
    st_.bfs = SideStats(s["L_bfs"], s["d_bfs"], s["H_bfs"], s["dH_bfs"], s["rb_dupl"], s["rb_self"], s["rb_hist"])
    st_.ibfs = SideStats(s["L_ibfs"], s["d_ibfs"], s["H_ibfs"], s["dH_ibfs"], s["ri_dupl"], s["ri_self"], s["ri_hist"])
    return st_


def close(x, y, rel=1e-9):
    return math.isclose(x, y, rel_tol=rel, abs_tol=0.0)


def test_exp_mark_reference_value():
    assert close(exp_mark(2, 2, 0.5, 0.5), 21.0)


def test_all_formulas_match_transcription():
    rnd = random.Random(2024)
    for _ in range(100):
        s = random_snapshot(rnd)
        stats = to_stats(s)
        params = TuningParams(set_cost=rnd.choice([1.0, 512.0, 4096.0]))
        want_costs = ref_costs(s, params.set_cost)
        f, want_preds = ref_preds(s, params.set_cost, 1 / s["k"], 0.25, 0.25)
        assert close(dfs_branching_factor(stats, params), f)
        for kind, value in want_costs.items():
            assert close(step_cost(kind, stats, params), value), kind
        for kind, value in want_preds.items():
            assert close(predicted_cost(kind, stats, params), value), kind
        As, Bs = rnd.uniform(1, 1e5), rnd.uniform(1, 1e5)
        Ad, Bd = rnd.uniform(0.01, 0.99), rnd.uniform(0.01, 0.99)
        assert close(exp_mark(As, Bs, Ad, Bd), ref_exp_mark(As, Bs, Ad, Bd))


def test_tuning_overrides_reach_formulas():
    rnd = random.Random(5)
    s = random_snapshot(rnd)
    params = TuningParams(set_cost=100.0, dfs_reduction_of_reduction=0.3, dfs_set_cost_weight=0.5,
                          dfs_check_cost_weight=0.1)
    f, want = ref_preds(s, 100.0, 0.3, 0.5, 0.1)
    stats = to_stats(s)
    assert close(dfs_branching_factor(stats, params), f)
    for kind, value in want.items():
        assert close(predicted_cost(kind, stats, params), value)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1e6), st.floats(0, 1e6))
def test_exp_mark_finite_and_non_negative(ad, bd, a_s, b_s):
    v = exp_mark(a_s, b_s, ad, bd)
    assert math.isfinite(v) and v >= 0


def test_exp_mark_empty_lists_cost_nothing():
    assert exp_mark(0, 100, 0.5, 0.5) == 0.0
    assert exp_mark(100, 0, 0.5, 0.5) == 0.0


def test_geometric():
    assert geometric(2.0, 3) == 14.0
    assert geometric(1.0, 5) == 5.0
    assert geometric(3.0, 0) == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        TuningParams(set_cost=0)
    with pytest.raises(ValueError):
        TuningParams(dfs_reduction_of_reduction=-1)
    assert TuningParams().reduction_of_reduction(3) == pytest.approx(1 / 3)


def test_side_stats_moving_average():
    side = SideStats()
    side.record(0.4, 0.2, None)
    assert (side.r_dupl, side.r_self, side.r_hist) == (0.2, 0.1, 0.0)
    side.record(0.4, 0.2, 0.6)
    assert side.r_dupl == pytest.approx(0.3) and side.r_hist == pytest.approx(0.3)


def _table(**preds):
    costs = {k: 1.0 for k in StepKind if k is not StepKind.DFS}
    p = {k: 10.0 for k in StepKind}
    for name, v in preds.items():
        p[StepKind[name]] = v
    return costs, p


def test_decide_picks_lowest_prediction_with_tie_order():
    costs, preds = _table()
    assert decide(costs, preds) is StepKind.BFS
    costs, preds = _table(BFS=11.0, IBFS=11.0)
    assert decide(costs, preds) is StepKind.BFS_NH
    costs, preds = _table(DFS=1.0)
    assert decide(costs, preds) is StepKind.DFS
    assert PREFERENCE[0] is StepKind.BFS and PREFERENCE[-1] is StepKind.DFS


def test_greedy_exception_when_history_free_steps_cost_more():
    costs = {StepKind.BFS: 5.0, StepKind.IBFS: 3.0, StepKind.BFS_NH: 6.0, StepKind.IBFS_NH: 4.0}
    preds = {k: 100.0 for k in StepKind}
    preds[StepKind.DFS] = 1.0
    assert decide(costs, preds) is StepKind.IBFS


def test_decide_all_infeasible():
    costs = {k: math.inf for k in StepKind if k is not StepKind.DFS}
    preds = {k: math.inf for k in StepKind}
    with pytest.raises(OutOfMemory):
        decide(costs, preds)


def test_history_free_steps_wait_for_a_measured_history():
    stats = SearchStats(10, 2, r=1, R=20)
    stats.bfs = SideStats(1, 1.0, 1, 1.0)
    stats.ibfs = SideStats(10, 0.1, 10, 0.1)
    costs, preds = evaluate_steps(stats, TuningParams())
    assert math.isinf(preds[StepKind.BFS_NH]) and math.isinf(preds[StepKind.IBFS_NH])
    stats.bfs.history_steps = 1
    costs, preds = evaluate_steps(stats, TuningParams())
    assert math.isfinite(preds[StepKind.BFS_NH])
    stats.bfs.history_dropped = True
    costs, preds = evaluate_steps(stats, TuningParams())
    assert math.isinf(preds[StepKind.BFS]) and math.isfinite(costs[StepKind.BFS_NH])


def test_infeasible_kinds_are_excluded():
    stats = SearchStats(10, 2, r=1, R=20)
    stats.bfs = SideStats(1, 1.0, 1, 1.0)
    stats.ibfs = SideStats(10, 0.1, 10, 0.1)
    stats.feasible[StepKind.BFS] = False
    costs, preds = evaluate_steps(stats, TuningParams())
    assert math.isinf(costs[StepKind.BFS]) and math.isinf(preds[StepKind.BFS])
