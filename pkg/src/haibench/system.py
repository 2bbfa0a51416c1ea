"""Interface and impairment metrics over system inventories and timings.

The weighted failure score covers all three impairment flavors (component,
systemic, interaction-breakdown) with one computation: a criticality-
weighted failure proportion. The inventory metrics count front-end
components against back-end interactions; the composite human/system
performance scores are linear combinations of configured coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .events import SystemInventory

__all__ = [
    "WeightedItem",
    "WeightedFailureResult",
    "InteractionBalance",
    "AttentionMetrics",
    "TimingInput",
    "ClarityInput",
    "ClarityResult",
    "CompositeCoefficients",
    "FAILURE_FLAVORS",
    "weighted_failure_score",
    "interaction_balance",
    "attention_metrics",
    "cognitive_strain",
    "component_clarity",
    "operational_latency",
    "critical_risk",
    "human_performance",
    "system_performance",
]

FAILURE_FLAVORS = ("weaf", "wsaf", "whaib")

# Working-memory bounds behind the attention metrics: fewer than 5
# front-end components wastes attention, more than 9 exceeds typical
# processing capacity.
ATTENTION_FLOOR = 5
ATTENTION_CEILING = 9


@dataclass(frozen=True)
class WeightedItem:
    weight: float
    failed: bool


@dataclass(frozen=True)
class WeightedFailureResult:
    flavor: str
    raw: float  # weighted failure proportion, in [0, 1]
    paper_normalized: float  # raw divided a second time by the weight sum


def weighted_failure_score(
    items: Iterable[WeightedItem], flavor: str = "weaf"
) -> WeightedFailureResult:
    """Criticality-weighted failure proportion.

    raw = sum(weight_i for failed i) / sum(weight_i), already in [0, 1].
    paper_normalized divides by the weight sum once more; it is reported
    for fidelity with the published definition but raw is the meaningful
    proportion.
    """
    if flavor not in FAILURE_FLAVORS:
        raise ValueError(f"unknown failure flavor {flavor!r}")
    its = list(items)
    if not its:
        raise ValueError("weighted_failure_score requires at least one item")
    for it in its:
        if not (it.weight > 0) or not math.isfinite(it.weight):
            raise ValueError(f"weights must be finite and positive, got {it.weight!r}")
    total = sum(it.weight for it in its)
    failed = sum(it.weight for it in its if it.failed)
    raw = failed / total
    return WeightedFailureResult(flavor=flavor, raw=raw, paper_normalized=raw / total)


@dataclass(frozen=True)
class InteractionBalance:
    cib: Optional[float]  # front-end count / back-end count
    op: int  # max(0, back - front)
    ir: int  # back-end interactions minus distinct roots
    fe: Optional[float]  # feedback-providing share of back-end
    errors: dict[str, str] = field(default_factory=dict)


def interaction_balance(inv: SystemInventory) -> InteractionBalance:
    n_front = len(inv.front_end)
    n_back = len(inv.back_end)
    errors: dict[str, str] = {}
    cib = fe = None
    if n_back == 0:
        errors["cib"] = "no back-end interactions"
        errors["fe"] = "no back-end interactions"
    else:
        cib = n_front / n_back
        fe = sum(1 for b in inv.back_end if b.provides_feedback) / n_back
    roots = {inv.resolve_duplicate_root(b.id) for b in inv.back_end}
    return InteractionBalance(
        cib=cib,
        op=max(0, n_back - n_front),
        ir=n_back - len(roots),
        fe=fe,
        errors=errors,
    )


@dataclass(frozen=True)
class AttentionMetrics:
    ase: Optional[float]  # chunked share of front-end components
    war: int  # attention wasted below the floor
    ni: int  # components beyond processing capacity
    errors: dict[str, str] = field(default_factory=dict)


def attention_metrics(inv: SystemInventory) -> AttentionMetrics:
    n_front = len(inv.front_end)
    errors: dict[str, str] = {}
    ase = None
    if n_front == 0:
        errors["ase"] = "no front-end components"
    else:
        ase = sum(1 for c in inv.front_end if c.chunk_group is not None) / n_front
    return AttentionMetrics(
        ase=ase,
        war=max(0, ATTENTION_FLOOR - n_front),
        ni=max(0, n_front - ATTENTION_CEILING),
        errors=errors,
    )


@dataclass(frozen=True)
class TimingInput:
    tct: float  # task completion time, seconds
    bt: float  # baseline (expected) completion time, seconds
    er: float  # error rate, fraction
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.bt > 0:
            raise ValueError(f"baseline time must be positive, got {self.bt!r}")
        if not self.tct > 0:
            raise ValueError(f"task completion time must be positive, got {self.tct!r}")
        if not 0.0 <= self.er <= 1.0:
            raise ValueError(f"error rate must be in [0, 1], got {self.er!r}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")


def cognitive_strain(inp: TimingInput) -> float:
    """alpha * TCT/BT + beta * ER."""
    return inp.alpha * (inp.tct / inp.bt) + inp.beta * inp.er


@dataclass(frozen=True)
class ClarityInput:
    art: float  # average response time, seconds
    ert: float  # expected (baseline) response time, seconds
    ar: float  # accuracy rate
    gamma: float = 1.0
    delta: float = 1.0
    user_scores: tuple[int, ...] = ()
    scale: tuple[int, int] = (1, 7)

    def __post_init__(self) -> None:
        if not self.ert > 0:
            raise ValueError(f"expected response time must be positive, got {self.ert!r}")
        if not self.art > 0:
            raise ValueError(f"average response time must be positive, got {self.art!r}")
        if self.gamma < 0 or self.delta < 0:
            raise ValueError("gamma and delta must be nonnegative")
        lo, hi = self.scale
        for s in self.user_scores:
            if not lo <= s <= hi:
                raise ValueError(f"user score {s} outside scale {lo}-{hi}")


@dataclass(frozen=True)
class ClarityResult:
    ccs1: float  # gamma * ART/ERT + delta * AR
    ccs2: Optional[float]  # mean user clarity score
    errors: dict[str, str] = field(default_factory=dict)


def component_clarity(inp: ClarityInput) -> ClarityResult:
    ccs1 = inp.gamma * (inp.art / inp.ert) + inp.delta * inp.ar
    if inp.user_scores:
        return ClarityResult(ccs1=ccs1, ccs2=sum(inp.user_scores) / len(inp.user_scores))
    return ClarityResult(ccs1=ccs1, ccs2=None, errors={"ccs2": "no user scores"})


def operational_latency(t_action: int, t_response: int) -> int:
    """Milliseconds between an operator action and the system response.

    A negative difference means the log is mis-ordered and raises.
    """
    if t_response < t_action:
        raise ValueError(
            f"response at {t_response} ms precedes action at {t_action} ms"
        )
    return t_response - t_action


def critical_risk(inv: SystemInventory) -> int:
    """2 ** max(0, overlooked-critical interaction count - 9); 1 when safe."""
    n = sum(1 for b in inv.back_end if b.critical and b.overlooked)
    return 2 ** max(0, n - ATTENTION_CEILING)


# ---------------------------------------------------------------------------
# Composite human/system performance modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositeCoefficients:
    automation_level: Optional[float] = None  # in [0, 1]
    alpha1: Optional[float] = None
    beta1: Optional[float] = None
    delta1: Optional[float] = None
    alpha2: Optional[float] = None
    l_threshold: Optional[float] = None
    h_error: Optional[float] = None
    c_load: Optional[float] = None
    f_base: Optional[float] = None
    bfid: int = 0
    failure_counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.automation_level is not None and not 0.0 <= self.automation_level <= 1.0:
            raise ValueError(
                f"automation_level must be in [0, 1], got {self.automation_level!r}"
            )
        if self.bfid < 0:
            raise ValueError(f"bfid must be nonnegative, got {self.bfid!r}")
        for name, count in self.failure_counts.items():
            if count < 0:
                raise ValueError(f"failure count for {name!r} is negative")


def _require(c: CompositeCoefficients, names: Iterable[str], variant: str) -> None:
    missing = [n for n in names if getattr(c, n) is None]
    if missing:
        raise ValueError(f"variant {variant!r} needs coefficients: {', '.join(missing)}")


def human_performance(c: CompositeCoefficients, variant: str) -> float:
    """Two linear human-performance composites.

    "lumberjack" penalizes the automation level against a collapse
    threshold: alpha1 * A - delta1 * L. "load" adds cognitive load and
    subtracts the human error factor: alpha1 * A + beta1 * C - H_error.
    """
    if variant == "lumberjack":
        _require(c, ("alpha1", "automation_level", "delta1", "l_threshold"), variant)
        return c.alpha1 * c.automation_level - c.delta1 * c.l_threshold
    if variant == "load":
        _require(c, ("alpha1", "automation_level", "beta1", "c_load", "h_error"), variant)
        return c.alpha1 * c.automation_level + c.beta1 * c.c_load - c.h_error
    raise ValueError(f"unknown human_performance variant {variant!r}")


def system_performance(c: CompositeCoefficients, variant: str) -> float:
    """System-performance composite: alpha2 * F - sum(failure counts),
    optionally crediting back-to-front interaction displays.
    """
    if variant not in ("base", "with_bfid"):
        raise ValueError(f"unknown system_performance variant {variant!r}")
    _require(c, ("alpha2", "f_base"), variant)
    score = c.alpha2 * c.f_base - sum(c.failure_counts.values())
    if variant == "with_bfid":
        score += c.bfid
    return score
