from __future__ import annotations

import json

import pytest

from haibench.events import BackEndInteraction, FrontEndComponent, SystemInventory


@pytest.fixture
def confounder_dag_spec():
    """Confounded treatment graph: Z -> X, Z -> Y, X -> Y."""
    return ["Z", "X", "Y"], [("Z", "X"), ("Z", "Y"), ("X", "Y")]


@pytest.fixture
def small_inventory():
    return SystemInventory(
        front_end=tuple(
            FrontEndComponent(f"c{i}", chunk_group="g" if i < 3 else None)
            for i in range(4)
        ),
        back_end=(
            BackEndInteraction("b1", provides_feedback=True),
            BackEndInteraction("b2"),
            BackEndInteraction("b3", duplicate_of="b1"),
            BackEndInteraction("b4", critical=True, overlooked=True),
        ),
    )


def make_log_lines(records):
    return "\n".join(json.dumps(r) for r in records) + "\n"
