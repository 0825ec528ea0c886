"""Shared builders: quick single-node models and seeded random instances."""

from __future__ import annotations

import random
from math import prod

import pytest

from morphplan.fixtures import fixture_text
from morphplan.model import (
    CompatibilityTable,
    Component,
    DesignAlternative,
    MorphModel,
    OrdinalScale,
)
from morphplan.modeldoc import parse_model


def node_model(
    leaves: dict[str, list[tuple[str, int]]],
    pairs: list[tuple[str, str, int]] | None = None,
    default: int = 0,
    levels: int = 3,
    max_compat: int = 4,
    root: str = "N",
    estimates: dict[str, tuple[int, ...]] | None = None,
) -> MorphModel:
    """One composite root over the given leaves. ``pairs`` of None means
    no table at all (every pair fully compatible)."""
    comps: dict[str, Component] = {}
    for cid, das in leaves.items():
        comps[cid] = Component(
            id=cid,
            das=tuple(
                DesignAlternative(
                    id=did,
                    priority=prio,
                    estimate=(estimates or {}).get(did),
                )
                for did, prio in das
            ),
        )
    table = None
    if pairs is not None:
        table = CompatibilityTable.from_pairs(pairs, default=default)
    comps[root] = Component(id=root, children=tuple(leaves), compat=table)
    return MorphModel(
        scale=OrdinalScale(levels=levels, max_compat=max_compat),
        root=root,
        components=comps,
    )


def random_node_model(seed: int, max_children: int = 6, max_das: int = 6) -> MorphModel:
    """Seeded random single-node instance, capped so brute force stays fast."""
    rng = random.Random(seed)
    m = rng.randint(2, max_children)
    while True:
        counts = [rng.randint(1, max_das) for _ in range(m)]
        if prod(counts) <= 4000:
            break
    leaves = {
        f"C{i}": [(f"C{i}x{j}", rng.randint(1, 3)) for j in range(counts[i])]
        for i in range(m)
    }
    pairs = []
    ids = {cid: [did for did, _ in das] for cid, das in leaves.items()}
    cids = list(leaves)
    for i in range(m):
        for j in range(i + 1, m):
            for a in ids[cids[i]]:
                for b in ids[cids[j]]:
                    if rng.random() < 0.9:  # leave some pairs to the default
                        value = 0 if rng.random() < 0.15 else rng.randint(1, 4)
                        pairs.append((a, b, value))
    default = rng.choice([0, 1, 4])
    return node_model(leaves, pairs, default=default)


@pytest.fixture(scope="session")
def arkticheskoe():
    return parse_model(fixture_text("arkticheskoe"))


@pytest.fixture(scope="session")
def kruzensternskoe():
    return parse_model(fixture_text("kruzensternskoe"))


@pytest.fixture(scope="session")
def yamal_region():
    return parse_model(fixture_text("yamal_region"))


@pytest.fixture(scope="session")
def arkticheskoe_multiset():
    return parse_model(fixture_text("arkticheskoe_multiset"))
