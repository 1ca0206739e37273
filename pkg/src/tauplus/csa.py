"""Carry-save reduction of the reverse-converter bit matrix.

Columns run 0..2q.  A carry leaving column 2q is worth 2^(2q+1), which is
congruent to 1 - 2^(2q-2) modulo the pair modulus; it re-enters as the
carry bit in column 0 plus its complement in column 2q-2, and the
-2^(2q-2) is absorbed into the plan's folded constant.

Per-column adder counts come from a small integer program (HiGHS): the
reentrant carries couple the top and bottom columns, and column-local
greedy allocation stalls once the profile becomes uniform.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import highspy
import numpy as np

from .adder import ResidueVector
from .moduli import make_tau_plus
from .reverse import BitMatrix, bind_matrix

MAX_LEVELS = 7
# Solver stops are a 2% gap or a branch-and-bound node count, both
# deterministic (a time limit would not be).  The improvement phase
# re-solves windows of WINDOW columns, WINDOW_STRIDE apart.
MIP_GAP = 0.02
NODE_LIMIT = 100
FEASIBILITY_NODE_LIMIT = 2000
WINDOW = 12
WINDOW_STRIDE = 6
MAX_PASSES = 4
_INF = highspy.kHighsInf


class PlanningError(RuntimeError):
    def __init__(self, msg: str, profile: list[int]):
        super().__init__(f"{msg}; achieved profile (col 0 first): {profile}")
        self.profile = profile


@dataclass(frozen=True)
class LevelPlan:
    depth_before: tuple[int, ...]
    fa: tuple[int, ...]
    ha: tuple[int, ...]
    depth_after: tuple[int, ...]

    @property
    def spills(self) -> int:
        return self.fa[-1] + self.ha[-1]

    @property
    def fa_equivalent(self) -> float:
        return sum(self.fa) + 0.5 * sum(self.ha)


@dataclass(frozen=True)
class ReductionPlan:
    q: int
    levels: tuple[LevelPlan, ...]
    initial_profile: tuple[int, ...]
    folded_constant: int

    @property
    def final_profile(self) -> tuple[int, ...]:
        return self.levels[-1].depth_after if self.levels else self.initial_profile

    @property
    def total_spills(self) -> int:
        return sum(lv.spills for lv in self.levels)

    @property
    def fa_equivalent(self) -> float:
        return sum(lv.fa_equivalent for lv in self.levels)


def level_output(h, fa, ha) -> list[int]:
    """Column depths after one level of ``fa``/``ha`` adders per column.

    Each FA turns 3 bits into a sum here and a carry one column up; each
    HA does the same with 2 bits.  Carries out of the top column re-enter
    at column 0 and, complemented, at column 2q-2.
    """
    n = len(h)
    top = n - 1
    out = [h[c] - 2 * fa[c] - ha[c] for c in range(n)]
    for c in range(top):
        out[c + 1] += fa[c] + ha[c]
    spill = fa[top] + ha[top]
    out[0] += spill
    out[top - 2] += spill
    return out


def _build_model(profile: tuple[int, ...], targets: tuple[int, ...]):
    """MILP whose maximum column depth after level l is exactly targets[l].

    Variables per (level, column): FA count, HA count, depth after the
    level, and a 0/1 witness that the column attains the target.
    Returns (model, index functions, FA-equivalent weight vector).
    """
    n = len(profile)
    top = n - 1
    L = len(targets)
    fa = lambda l, c: l * n + c  # noqa: E731
    ha = lambda l, c: L * n + l * n + c  # noqa: E731
    dep = lambda l, c: 2 * L * n + (l - 1) * n + c  # depth after level l, l >= 1  # noqa: E731
    hit = lambda l, c: 3 * L * n + (l - 1) * n + c  # noqa: E731
    nvar = 4 * L * n

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("mip_rel_gap", MIP_GAP)
    ub = [_INF] * nvar
    for l in range(L):
        for c in range(n):
            ub[dep(l + 1, c)] = targets[l]
            ub[hit(l + 1, c)] = 1
    h.addVars(nvar, np.zeros(nvar), np.array(ub, dtype=float))
    h.changeColsIntegrality(nvar, np.arange(nvar, dtype=np.int32),
                            np.full(nvar, highspy.HighsVarType.kInteger))

    def add(coefs: dict, lb: float, ub_: float) -> None:
        idx = np.array(list(coefs), dtype=np.int32)
        h.addRow(lb, ub_, len(idx), idx, np.array([coefs[k] for k in coefs], dtype=float))

    for l in range(L):
        t = targets[l]
        for c in range(n):
            # adders consume only bits present at the level input
            coefs = {fa(l, c): 3, ha(l, c): 2}
            if l == 0:
                add(coefs, -_INF, profile[c])
            else:
                coefs[dep(l, c)] = -1
                add(coefs, -_INF, 0)
            # depth recurrence, reentrant carries into columns 0 and top-2
            coefs = {dep(l + 1, c): 1, fa(l, c): 2, ha(l, c): 1}
            sources = [c - 1] if c > 0 else []
            if c in (0, top - 2):
                sources.append(top)
            for src in sources:
                coefs[fa(l, src)] = coefs.get(fa(l, src), 0) - 1
                coefs[ha(l, src)] = coefs.get(ha(l, src), 0) - 1
            if l == 0:
                add(coefs, profile[c], profile[c])
            else:
                coefs[dep(l, c)] = -1
                add(coefs, 0, 0)
            add({dep(l + 1, c): 1, hit(l + 1, c): -t}, 0, _INF)
        add({hit(l + 1, c): 1 for c in range(n)}, 1, _INF)

    weights = np.zeros(nvar)
    weights[: L * n] = 1.0
    weights[L * n: 2 * L * n] = 0.5
    return h, (fa, ha), weights


def _run(h, node_limit: int):
    h.setOptionValue("mip_max_nodes", node_limit)
    h.run()
    info = h.getInfo()
    if info.primal_solution_status != 2:  # no feasible point
        return None
    return np.rint(np.array(h.getSolution().col_value)).astype(int)


def _solve(profile: tuple[int, ...], targets: tuple[int, ...], node_limit: int = NODE_LIMIT,
           minimize: bool = True):
    """Allocation meeting ``targets``; None if none is found.

    A first pass looks for any feasible allocation.  With ``minimize`` the
    FA-equivalent total is then lowered by re-solving one window of
    columns at a time with every adder outside the window held fixed.
    """
    n = len(profile)
    L = len(targets)
    h, (fa, ha), weights = _build_model(profile, targets)
    x = _run(h, FEASIBILITY_NODE_LIMIT)
    if x is None:
        return None
    if minimize:
        nvar = len(weights)
        idx = np.arange(nvar, dtype=np.int32)
        h.changeColsCost(nvar, idx, weights)
        lp = h.getLp()
        base_lb, base_ub = np.array(lp.col_lower_), np.array(lp.col_upper_)
        for _ in range(MAX_PASSES):
            before = weights @ x
            for start in range(0, n, WINDOW_STRIDE):
                window = {(start + i) % n for i in range(WINDOW)}
                lb, ub = base_lb.copy(), base_ub.copy()
                for l in range(L):
                    for c in range(n):
                        if c not in window:
                            for k in (fa(l, c), ha(l, c)):
                                lb[k] = ub[k] = x[k]
                h.changeColsBounds(nvar, idx, lb, ub)
                h.setSolution(_solution(x))
                y = _run(h, node_limit)
                if y is not None and weights @ y < weights @ x:
                    x = y
            if weights @ x >= before:
                break
    levels = []
    depth = list(profile)
    for l in range(L):
        f = [int(x[fa(l, c)]) for c in range(n)]
        a = [int(x[ha(l, c)]) for c in range(n)]
        out = level_output(depth, f, a)
        levels.append(LevelPlan(tuple(depth), tuple(f), tuple(a), tuple(out)))
        depth = out
    return levels


def _solution(x):
    sol = highspy.HighsSolution()
    sol.col_value = x.astype(float).tolist()
    return sol


def _valid(profile, fa, ha) -> list[LevelPlan] | None:
    """Rebuild levels from adder counts; None if any constraint breaks."""
    levels = []
    h = list(profile)
    prev_max = max(h)
    for f, a in zip(fa, ha):
        if any(3 * f[c] + 2 * a[c] > h[c] for c in range(len(h))):
            return None
        out = level_output(h, f, a)
        if max(out) >= prev_max and prev_max > 2:
            return None
        levels.append(LevelPlan(tuple(h), tuple(f), tuple(a), tuple(out)))
        h, prev_max = out, max(out)
    return levels if max(h) <= 2 else None


# Maximum depth after each level, tried in order.  Each falls by at least
# one per level and ends at 2; the first allows slack for reentrant carries
# in the early levels, the others front-load the reduction.
SCHEDULES = (
    (12, 10, 8, 6, 4, 3, 2),
    (11, 9, 7, 6, 4, 3, 2),
    (11, 10, 9, 7, 5, 3, 2),
)


@lru_cache(maxsize=None)
def _plan_levels(profile: tuple[int, ...], max_levels: int):
    for targets in SCHEDULES:
        if len(targets) > max_levels or targets[0] >= max(profile):
            continue
        levels = _solve(profile, targets)
        if levels is not None and _valid(profile, [lv.fa for lv in levels], [lv.ha for lv in levels]):
            return tuple(levels)
    return None


def plan_reduction(matrix: BitMatrix, max_levels: int = MAX_LEVELS) -> ReductionPlan:
    """Allocate FAs/HAs level by level until every column holds <= 2 bits.

    The maximum column depth follows one of SCHEDULES; within it the
    FA-equivalent total (HA = 1/2 FA) is minimized.  Results are cached
    per depth profile, so repeated calls are cheap and identical.
    """
    q = matrix.q
    if q < 9:
        raise ValueError(f"reduction planning needs q >= 9, got q={q}")
    s = make_tau_plus(q)
    profile = tuple(matrix.column_depths())
    levels = _plan_levels(profile, max_levels)
    if levels is None:
        raise PlanningError(f"no reduction within {max_levels} levels", list(profile))
    spills = sum(lv.spills for lv in levels)
    folded = (matrix.folded_constant - spills * (1 << (2 * q - 2))) % s.pair_modulus
    return ReductionPlan(q, levels, profile, folded)


def simulate_plan(plan: ReductionPlan, matrix: BitMatrix, rv: ResidueVector) -> tuple[int, int]:
    """Run every FA/HA of ``plan`` on the bound bits of ``matrix``.

    Returns the two final rows as integers; adding them and
    ``plan.folded_constant`` modulo the pair modulus gives X'.
    """
    if plan.q != matrix.q or rv.q != matrix.q:
        raise ValueError("plan, matrix and residues disagree on q")
    cols = bind_matrix(matrix, rv)
    if tuple(len(c) for c in cols) != plan.initial_profile:
        raise ValueError("plan was not built from this matrix")
    n = len(cols)
    top = n - 1
    for i, lv in enumerate(plan.levels):
        if tuple(len(c) for c in cols) != lv.depth_before:
            raise ValueError(f"level {i + 1}: column depths do not match the plan")
        nxt: list[list[int]] = [[] for _ in range(n)]
        for c, bits in enumerate(cols):
            k = 0
            carries = []
            for _ in range(lv.fa[c]):
                a, b, d = bits[k:k + 3]
                k += 3
                nxt[c].append(a ^ b ^ d)
                carries.append((a & b) | (a & d) | (b & d))
            for _ in range(lv.ha[c]):
                a, b = bits[k:k + 2]
                k += 2
                nxt[c].append(a ^ b)
                carries.append(a & b)
            nxt[c].extend(bits[k:])
            if c < top:
                nxt[c + 1].extend(carries)
            else:
                for cy in carries:
                    nxt[0].append(cy)
                    nxt[top - 2].append(cy ^ 1)
        cols = nxt
    if any(len(c) > 2 for c in cols):
        raise ValueError("plan leaves a column deeper than 2")
    row_a = sum(c[0] << i for i, c in enumerate(cols) if len(c) > 0)
    row_b = sum(c[1] << i for i, c in enumerate(cols) if len(c) > 1)
    return row_a, row_b


def resolve_plan_output(plan: ReductionPlan, rows: tuple[int, int]) -> int:
    s = make_tau_plus(plan.q)
    return (rows[0] + rows[1] + plan.folded_constant) % s.pair_modulus


REFERENCE_LEVEL_FORMULAS = ("5q+8", "3q+12", "3q", "2q", "q+3", "q/2+4", "5")


def reference_level_totals(q: int) -> list[float]:
    return [5 * q + 8, 3 * q + 12, 3 * q, 2 * q, q + 3, q / 2 + 4, 5]


def reference_grand_total(q: int) -> float:
    """The grand total as printed (13.5q + 32)."""
    return 13.5 * q + 32


def reference_summed_total(q: int) -> float:
    """Sum of the printed per-level totals (14.5q + 32)."""
    return sum(reference_level_totals(q))


@dataclass(frozen=True)
class FaReport:
    q: int
    per_level: tuple[float, ...]
    total: float
    reference_per_level: tuple[float, ...]
    reference_grand_total: float
    reference_summed_total: float

    def __str__(self) -> str:
        lines = [f"q={self.q}: {len(self.per_level)} levels"]
        for i, got in enumerate(self.per_level):
            ref = (f"{REFERENCE_LEVEL_FORMULAS[i]} = {self.reference_per_level[i]:g}"
                   if i < len(self.reference_per_level) else "-")
            lines.append(f"  level {i + 1}: {got:g} FA-equivalent (reference {ref})")
        lines.append(f"  total: {self.total:g}")
        lines.append(f"  reference grand total 13.5q+32 = {self.reference_grand_total:g}")
        lines.append(f"  reference per-level sum 14.5q+32 = {self.reference_summed_total:g}")
        return "\n".join(lines)


def fa_count_report(plan: ReductionPlan) -> FaReport:
    q = plan.q
    return FaReport(
        q=q,
        per_level=tuple(lv.fa_equivalent for lv in plan.levels),
        total=plan.fa_equivalent,
        reference_per_level=tuple(reference_level_totals(q)),
        reference_grand_total=reference_grand_total(q),
        reference_summed_total=reference_summed_total(q),
    )


PLAN_CSV_HEADER = ("level", "column", "depth_before", "fa", "ha", "depth_after", "spills")


def plan_to_csv(plan: ReductionPlan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLAN_CSV_HEADER)
    for i, lv in enumerate(plan.levels, start=1):
        top = len(lv.fa) - 1
        for c in range(len(lv.fa)):
            w.writerow([i, c, lv.depth_before[c], lv.fa[c], lv.ha[c], lv.depth_after[c],
                        lv.spills if c == top else 0])
    return buf.getvalue()
