"""Cost estimates that decide which kind of step the exact search takes next."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

DENSITY_EPS = 1e-6
INF = math.inf


class StepKind(enum.Enum):
    BFS = "BFS"
    IBFS = "IBFS"
    BFS_NH = "BFS_NH"
    IBFS_NH = "IBFS_NH"
    DFS = "DFS"


# order used to break ties between equal costs
PREFERENCE = (StepKind.BFS, StepKind.IBFS, StepKind.BFS_NH, StepKind.IBFS_NH, StepKind.DFS)


class OutOfMemory(RuntimeError):
    pass


@dataclass
class TuningParams:
    set_cost: float = 512.0
    # None means 1/k
    dfs_reduction_of_reduction: float | None = None
    dfs_set_cost_weight: float = 0.25
    dfs_check_cost_weight: float = 0.25

    def __post_init__(self):
        for name in ("set_cost", "dfs_set_cost_weight", "dfs_check_cost_weight"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.dfs_reduction_of_reduction is not None and self.dfs_reduction_of_reduction <= 0:
            raise ValueError("dfs_reduction_of_reduction must be positive")

    def reduction_of_reduction(self, k: int) -> float:
        if self.dfs_reduction_of_reduction is None:
            return 1.0 / k
        return self.dfs_reduction_of_reduction


@dataclass
class SideStats:
    size: int = 0
    density: float = 0.0
    history_size: int = 0
    history_density: float = 0.0
    r_dupl: float = 0.0
    r_self: float = 0.0
    r_hist: float = 0.0
    history_dropped: bool = False
    history_steps: int = 0

    def record(self, dupl: float, self_red: float, hist: float | None, weight: float = 0.5):
        self.r_dupl = (1 - weight) * self.r_dupl + weight * dupl
        self.r_self = (1 - weight) * self.r_self + weight * self_red
        if hist is not None:
            self.r_hist = (1 - weight) * self.r_hist + weight * hist


@dataclass
class SearchStats:
    n: int
    k: int
    bfs: SideStats = field(default_factory=SideStats)
    ibfs: SideStats = field(default_factory=SideStats)
    r: int = 1
    R: int = 1
    feasible: dict = field(default_factory=lambda: {kind: True for kind in StepKind})


def _clamp(d: float) -> float:
    return min(max(d, DENSITY_EPS), 1.0 - DENSITY_EPS)


def exp_mark(a_s: float, b_s: float, a_d: float, b_d: float) -> float:
    """Expected number of subset checks when marking supersets of ``A`` in ``B``."""
    if b_s <= 0 or a_s <= 0:
        return 0.0
    a_d, b_d = _clamp(a_d), _clamp(b_d)
    w = (1 + b_d) / (1 + a_d * b_d - a_d)
    exponent = math.log(1 + b_d) / math.log(w)
    return b_s * ((1 + b_d) / b_d + 1 / (a_d - a_d * b_d)) * a_s ** exponent


def _bfs_terms(st: SearchStats, params: TuningParams, history: bool):
    k, s = st.k, st.bfs
    size = s.size
    after_dupl = k * (1 - s.r_dupl) * size
    after_self = after_dupl * (1 - s.r_self)
    cost = params.set_cost * k * size
    cost += exp_mark(after_dupl, after_dupl, s.density, s.density)
    if history:
        cost += exp_mark(s.history_size, after_self, s.history_density, s.density)
        final = after_self * (1 - s.r_hist)
    else:
        final = after_self
    cost += exp_mark(final, st.ibfs.size, s.density, st.ibfs.density)
    return cost, final


def _ibfs_terms(st: SearchStats, params: TuningParams, history: bool):
    k, s = st.k, st.ibfs
    size = s.size
    after_dupl = k * (1 - s.r_dupl) * size
    after_self = after_dupl * (1 - s.r_self)
    cost = params.set_cost * k * size
    cost += exp_mark(after_dupl, after_dupl, 1 - s.density, 1 - s.density)
    if history:
        cost += exp_mark(s.history_size, after_self, 1 - s.history_density, 1 - s.density)
        final = after_self * (1 - s.r_hist)
    else:
        final = after_self
    cost += exp_mark(st.bfs.size, final, st.bfs.density, s.density)
    return cost, final


def step_cost(kind: StepKind, stats: SearchStats, params: TuningParams) -> float:
    """Estimated cost of the next single step of the given (non-DFS) kind."""
    if kind is StepKind.BFS:
        return _bfs_terms(stats, params, True)[0]
    if kind is StepKind.BFS_NH:
        return _bfs_terms(stats, params, False)[0]
    if kind is StepKind.IBFS:
        return _ibfs_terms(stats, params, True)[0]
    if kind is StepKind.IBFS_NH:
        return _ibfs_terms(stats, params, False)[0]
    raise ValueError("DFS has no single-step cost")


def dfs_branching_factor(stats: SearchStats, params: TuningParams) -> float:
    k = stats.k
    return k * (1 - stats.ibfs.r_dupl * params.reduction_of_reduction(k))


def geometric(f: float, horizon: int) -> float:
    """``f + f^2 + ... + f^horizon``."""
    if horizon <= 0:
        return 0.0
    if abs(f - 1.0) < 1e-12:
        return float(horizon)
    return f * (f ** horizon - 1) / (f - 1)


def _dfs_tail(stats, params, f, horizon, bfs_size, ibfs_size):
    per_level = (
        params.set_cost * params.dfs_set_cost_weight * stats.k / f
        + params.dfs_check_cost_weight
        * exp_mark(bfs_size, ibfs_size, stats.bfs.density, stats.ibfs.density)
    )
    return geometric(f, horizon) * per_level


def predicted_cost(kind: StepKind, stats: SearchStats, params: TuningParams) -> float:
    """Full predicted cost assuming the search switches to DFS right after this step."""
    f = dfs_branching_factor(stats, params)
    left = stats.R - stats.r
    if kind is StepKind.DFS:
        return _dfs_tail(stats, params, f, left, stats.bfs.size, stats.ibfs.size)
    if kind in (StepKind.BFS, StepKind.BFS_NH):
        cost, size = _bfs_terms(stats, params, kind is StepKind.BFS)
        return cost + _dfs_tail(stats, params, f, left - 1, size, stats.ibfs.size)
    cost, size = _ibfs_terms(stats, params, kind is StepKind.IBFS)
    return cost + _dfs_tail(stats, params, f, left - 1, stats.bfs.size, size)


def _available(kind: StepKind, stats: SearchStats) -> bool:
    if not stats.feasible.get(kind, True):
        return False
    if kind is StepKind.BFS:
        return not stats.bfs.history_dropped
    if kind is StepKind.IBFS:
        return not stats.ibfs.history_dropped
    # dropping a history is only weighed once it has been measured
    if kind is StepKind.BFS_NH:
        return stats.bfs.history_dropped or stats.bfs.history_steps > 0
    if kind is StepKind.IBFS_NH:
        return stats.ibfs.history_dropped or stats.ibfs.history_steps > 0
    return True


def evaluate_steps(stats: SearchStats, params: TuningParams) -> tuple[dict, dict]:
    """Single-step costs and predicted full costs; unavailable kinds get ``inf``."""
    costs, preds = {}, {}
    for kind in StepKind:
        ok = _available(kind, stats)
        if kind is not StepKind.DFS:
            costs[kind] = step_cost(kind, stats, params) if ok else INF
        preds[kind] = predicted_cost(kind, stats, params) if ok else INF
    return costs, preds


def choose_step(stats: SearchStats, params: TuningParams) -> StepKind:
    costs, preds = evaluate_steps(stats, params)
    return decide(costs, preds)


def decide(costs: dict, preds: dict) -> StepKind:
    if all(math.isinf(v) for v in preds.values()):
        raise OutOfMemory("no step fits in the memory budget")
    bfs, ibfs = costs[StepKind.BFS], costs[StepKind.IBFS]
    if (
        costs[StepKind.BFS_NH] > bfs
        and costs[StepKind.IBFS_NH] > ibfs
        and min(bfs, ibfs) < INF
    ):
        return StepKind.BFS if bfs <= ibfs else StepKind.IBFS
    return min(PREFERENCE, key=lambda kind: (preds[kind], PREFERENCE.index(kind)))
