"""Budgeted extension of a plan kernel via the multiple choice
knapsack: pick exactly one candidate per open group, maximizing profit
under a cost budget. A ratio-greedy pass gives the quick answer; an
exact dynamic program over (group, residual budget) provides the
optimum and every selection attaining it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .model import MorphError

Number = int | Fraction


class KnapsackError(MorphError, ValueError):
    """The instance is malformed or incompatible with the kernel."""


@dataclass(frozen=True)
class ChoiceItem:
    """One candidate of one group, with nonnegative cost and profit."""

    id: str
    group: str
    cost: Number
    profit: Number

    def __post_init__(self) -> None:
        if self.cost < 0 or self.profit < 0:
            raise KnapsackError(f"item {self.id!r} has negative cost or profit")


@dataclass(frozen=True)
class KnapsackInstance:
    """Non-empty item groups plus the shared budget."""

    groups: tuple[tuple[ChoiceItem, ...], ...]
    budget: Number

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise KnapsackError(f"budget must be nonnegative: {self.budget}")
        seen: set[str] = set()
        labels: set[str] = set()
        for group in self.groups:
            if not group:
                raise KnapsackError("empty item group")
            label = group[0].group
            if label in labels:
                raise KnapsackError(f"group label {label!r} repeats")
            labels.add(label)
            for item in group:
                if item.group != label:
                    raise KnapsackError(
                        f"item {item.id!r} labeled {item.group!r} inside group {label!r}"
                    )
                if item.id in seen:
                    raise KnapsackError(f"item id {item.id!r} repeats")
                seen.add(item.id)

    @property
    def group_labels(self) -> tuple[str, ...]:
        return tuple(group[0].group for group in self.groups)

    def min_cost_total(self) -> Number:
        return sum(min(item.cost for item in group) for group in self.groups)


@dataclass(frozen=True)
class Selection:
    """One chosen item per group (group order), or an infeasibility
    marker when the budget cannot fill every group."""

    chosen: tuple[ChoiceItem, ...]
    total_cost: Number
    total_profit: Number
    feasible: bool

    @classmethod
    def of(cls, chosen: Sequence[ChoiceItem]) -> "Selection":
        return cls(
            chosen=tuple(chosen),
            total_cost=sum(item.cost for item in chosen),
            total_profit=sum(item.profit for item in chosen),
            feasible=True,
        )

    @classmethod
    def infeasible(cls) -> "Selection":
        return cls(chosen=(), total_cost=0, total_profit=0, feasible=False)

    def by_group(self) -> dict[str, ChoiceItem]:
        return {item.group: item for item in self.chosen}

    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.chosen)


# ---------------------------------------------------------------------------
# Greedy
# ---------------------------------------------------------------------------


def _ratio_key(item: ChoiceItem):
    # Free profit sorts first; otherwise larger profit/cost first.
    if item.cost == 0:
        return (0, -Fraction(item.profit))
    return (1, -Fraction(item.profit) / Fraction(item.cost))


def default_tie_break(item: ChoiceItem):
    return (-item.profit, item.cost, item.id)


def greedy_mckp(instance: KnapsackInstance, tie_break=default_tie_break) -> Selection:
    """Ratio-ordered greedy pass with a feasibility reserve.

    Items are considered by descending profit/cost ratio (ties broken
    by ``tie_break``: default higher profit, lower cost, id order). An
    item is taken only if the remaining budget still covers the
    cheapest item of every other unfilled group, so the pass fills
    every group whenever that is possible at all.
    """
    if instance.min_cost_total() > instance.budget:
        return Selection.infeasible()
    order = sorted(
        (item for group in instance.groups for item in group),
        key=lambda it: (_ratio_key(it), tie_break(it)),
    )
    min_cost = {g[0].group: min(item.cost for item in g) for g in instance.groups}
    unfilled = set(min_cost)
    chosen: dict[str, ChoiceItem] = {}
    remaining = instance.budget
    for item in order:
        if item.group not in unfilled:
            continue
        reserve = sum(min_cost[g] for g in unfilled if g != item.group)
        if item.cost + reserve <= remaining:
            chosen[item.group] = item
            unfilled.remove(item.group)
            remaining -= item.cost
    if unfilled:
        return Selection.infeasible()
    return Selection.of([chosen[g[0].group] for g in instance.groups])


# ---------------------------------------------------------------------------
# Exact
# ---------------------------------------------------------------------------

_MAX_GRID = 10_000_000


def exact_mckp(instance: KnapsackInstance) -> tuple[Selection, ...]:
    """Every profit-maximal feasible selection, via dynamic programming
    over (group, residual budget). Rational costs are scaled to the
    integer grid of their common denominator. Returns () when no
    selection fits the budget."""
    scale = lcm(
        *(
            Fraction(item.cost).denominator
            for group in instance.groups
            for item in group
        ),
        Fraction(instance.budget).denominator,
    )
    costs = [
        [int(Fraction(item.cost) * scale) for item in group]
        for group in instance.groups
    ]
    budget = int(Fraction(instance.budget) * scale)
    if budget > _MAX_GRID:
        raise KnapsackError(f"budget grid too fine: {budget} cells")

    n = len(instance.groups)
    neg = None  # marker for unreachable states
    # best[g][c]: max profit for groups < g within cost c
    best: list[list[Number | None]] = [[neg] * (budget + 1) for _ in range(n + 1)]
    best[0] = [0] * (budget + 1)
    for g in range(n):
        row = best[g]
        nxt = best[g + 1]
        for c in range(budget + 1):
            acc = neg
            for item, cost in zip(instance.groups[g], costs[g]):
                if cost <= c and row[c - cost] is not None:
                    value = row[c - cost] + item.profit
                    if acc is None or value > acc:
                        acc = value
            nxt[c] = acc
    optimum = best[n][budget]
    if optimum is None:
        return ()

    # Walk back every argmax path; each optimal selection appears once.
    selections: list[tuple[ChoiceItem, ...]] = []

    def walk(g: int, c: int, suffix: tuple[ChoiceItem, ...]) -> None:
        if g < 0:
            selections.append(suffix)
            return
        target = best[g + 1][c]
        for item, cost in zip(instance.groups[g], costs[g]):
            if cost <= c and best[g][c - cost] is not None:
                if best[g][c - cost] + item.profit == target:
                    walk(g - 1, c - cost, (item,) + suffix)

    walk(n - 1, budget, ())
    unique = {tuple(it.id for it in sel): sel for sel in selections}
    ordered = sorted(unique.values(), key=lambda sel: tuple(it.id for it in sel))
    return tuple(Selection.of(sel) for sel in ordered)


# ---------------------------------------------------------------------------
# Kernel extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AggregatedPlan:
    """Kernel picks merged with a budgeted selection for the open
    groups. ``alternatives`` lists further co-optimal selections when
    the exact solver found several."""

    picks: tuple[tuple[str, str], ...]
    total_cost: Number
    total_profit: Number
    feasible: bool
    selection: Selection | None = None
    alternatives: tuple[Selection, ...] = ()

    def picks_map(self) -> dict[str, str]:
        return dict(self.picks)

    @property
    def label(self) -> str:
        return "*".join(pick for _, pick in self.picks)


def extend_kernel(
    kernel: Mapping[str, str],
    instance: KnapsackInstance,
    method: str = "greedy",
) -> AggregatedPlan:
    """Complete a kernel by selecting one candidate per open group
    under the instance budget. Kernel components and instance groups
    must not overlap; an empty instance returns the kernel unchanged."""
    if method not in ("greedy", "exact"):
        raise ValueError(f"unknown method {method!r}")
    overlap = set(kernel) & set(instance.group_labels)
    if overlap:
        raise KnapsackError(f"kernel already fixes groups: {sorted(overlap)}")
    kernel_picks = tuple(sorted(kernel.items()))
    if not instance.groups:
        return AggregatedPlan(
            picks=kernel_picks, total_cost=0, total_profit=0, feasible=True
        )

    if method == "greedy":
        selection = greedy_mckp(instance)
        alternatives: tuple[Selection, ...] = ()
    else:
        optima = exact_mckp(instance)
        selection = optima[0] if optima else Selection.infeasible()
        alternatives = optima[1:]
    if not selection.feasible:
        return AggregatedPlan(
            picks=kernel_picks,
            total_cost=0,
            total_profit=0,
            feasible=False,
            selection=selection,
        )
    picks = dict(kernel)
    for item in selection.chosen:
        picks[item.group] = item.id
    return AggregatedPlan(
        picks=tuple(sorted(picks.items())),
        total_cost=selection.total_cost,
        total_profit=selection.total_profit,
        feasible=True,
        selection=selection,
        alternatives=alternatives,
    )
