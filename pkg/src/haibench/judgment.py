"""Judgment and prediction metrics over operator decision records.

Covers the detection score family (overall score, sensitivity d', response
bias c), decision efficiency, coherence and cue-accuracy ratios with
pluggable assessment hooks, the intuitive/analytical spectrum score,
heuristic-triggering alignment, cue-weight (policy-capturing) models, and
standard classification/reward metrics.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .events import HeuristicOutcome, JudgmentRecord
from .probit import probit

__all__ = [
    "SdtResult",
    "NdmResult",
    "CoherenceResult",
    "CctTest",
    "CctResult",
    "LensResult",
    "AlignmentResult",
    "ClassificationResult",
    "CueModel",
    "sdt_evaluate",
    "ndm_evaluate",
    "coherence_evaluate",
    "cct_evaluate",
    "lens_evaluate",
    "heuristic_alignment",
    "classification_metrics",
    "policy_capture_predict",
    "policy_capture_fit",
]


# ---------------------------------------------------------------------------
# Signal detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SdtResult:
    score: float
    d_prime: float
    c: float
    hit_rate: float
    fa_rate: float
    cr_rate: float
    miss_rate: float
    n_signal: int
    n_noise: int
    hits: int
    misses: int
    false_alarms: int
    correct_rejections: int


def _corrected(rate: float, n: int, correction: str, what: str) -> float:
    if 0.0 < rate < 1.0:
        return rate
    if correction == "none":
        raise ValueError(
            f"degenerate {what} rate {rate} with correction='none'; "
            "use correction='loglinear'"
        )
    # Replace 0 by 1/(2n) and 1 by 1 - 1/(2n) for the relevant trial count.
    return 1.0 / (2 * n) if rate == 0.0 else 1.0 - 1.0 / (2 * n)


def sdt_evaluate(
    records: Iterable[JudgmentRecord], correction: str = "loglinear"
) -> SdtResult:
    """Detection score (hits plus correct rejections over all judgments),
    sensitivity d' = Z(hit rate) - Z(fa rate), and bias
    c = -(Z(hit rate) + Z(fa rate)) / 2.

    Rates of exactly 0 or 1 are undefined under the Z transform; with
    correction="loglinear" they are clamped to 1/(2n) and 1 - 1/(2n) using
    the relevant trial count, with correction="none" they raise.
    """
    if correction not in ("none", "loglinear"):
        raise ValueError(f"unknown correction {correction!r}")
    recs = list(records)
    n_signal = sum(1 for r in recs if r.ground_truth == "signal")
    n_noise = len(recs) - n_signal
    if n_signal == 0:
        raise ValueError("sdt_evaluate requires at least one signal trial")
    if n_noise == 0:
        raise ValueError("sdt_evaluate requires at least one noise trial")
    hits = sum(1 for r in recs if r.ground_truth == "signal" and r.response == "yes")
    fas = sum(1 for r in recs if r.ground_truth == "noise" and r.response == "yes")
    misses = n_signal - hits
    crs = n_noise - fas
    score = (hits + crs) / (n_signal + n_noise)
    hit_rate = hits / n_signal
    fa_rate = fas / n_noise
    zh = probit(_corrected(hit_rate, n_signal, correction, "hit"))
    zf = probit(_corrected(fa_rate, n_noise, correction, "false-alarm"))
    return SdtResult(
        score=score,
        d_prime=zh - zf,
        c=-0.5 * (zh + zf),
        hit_rate=hit_rate,
        fa_rate=fa_rate,
        cr_rate=crs / n_noise,
        miss_rate=misses / n_signal,
        n_signal=n_signal,
        n_noise=n_noise,
        hits=hits,
        misses=misses,
        false_alarms=fas,
        correct_rejections=crs,
    )


# ---------------------------------------------------------------------------
# Decision efficiency
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NdmResult:
    ndm_score: float
    speeds: tuple[float, ...]  # per-decision 1/T in 1/s, where T is known


def ndm_evaluate(records: Iterable[JudgmentRecord]) -> NdmResult:
    """Fraction of efficient decisions, plus per-decision speed 1/T."""
    recs = list(records)
    if not recs:
        raise ValueError("ndm_evaluate requires at least one record")
    if any(r.efficient is None for r in recs):
        raise ValueError("every record needs an efficient flag for ndm_evaluate")
    speeds = []
    for r in recs:
        if r.decision_time is not None:
            if r.decision_time <= 0:
                raise ValueError(f"nonpositive decision_time {r.decision_time}")
            speeds.append(1.0 / r.decision_time)
    efficient = sum(1 for r in recs if r.efficient)
    return NdmResult(ndm_score=efficient / len(recs), speeds=tuple(speeds))


# ---------------------------------------------------------------------------
# Coherence and cue accuracy (lens)
# ---------------------------------------------------------------------------

Hook = Callable[[Sequence[JudgmentRecord]], Optional[float]]


def default_bias_assessment(records: Sequence[JudgmentRecord]) -> Optional[float]:
    """Fraction of flagged-bias trials that were subsequently corrected.

    Vacuously 1.0 when no trial was flagged.
    """
    flagged = [r for r in records if r.bias_flagged]
    if not flagged:
        return 1.0
    corrected = sum(1 for r in flagged if r.bias_corrected)
    return corrected / len(flagged)


def default_cue_validity(records: Sequence[JudgmentRecord]) -> Optional[float]:
    """Correlation between the cue-implied state and the true state.

    Ground truth is coded signal=1, noise=0; records without a cue_state
    are skipped. Returns None when the correlation is undefined (fewer
    than two usable records, or a constant series).
    """
    xs = [r.cue_state for r in records if r.cue_state is not None]
    ys = [1.0 if r.ground_truth == "signal" else 0.0 for r in records if r.cue_state is not None]
    if len(xs) < 2:
        return None
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError:
        return None


@dataclass(frozen=True)
class CoherenceResult:
    coherence_score: float
    b_assessment: Optional[float]


def coherence_evaluate(
    records: Iterable[JudgmentRecord], bias_hook: Optional[Hook] = None
) -> CoherenceResult:
    """Fraction of coherent judgments; bias assessment via pluggable hook."""
    recs = list(records)
    if not recs:
        raise ValueError("coherence_evaluate requires at least one record")
    if any(r.coherent is None for r in recs):
        raise ValueError("every record needs a coherent flag for coherence_evaluate")
    hook = bias_hook if bias_hook is not None else default_bias_assessment
    coherent = sum(1 for r in recs if r.coherent)
    return CoherenceResult(coherence_score=coherent / len(recs), b_assessment=hook(recs))


@dataclass(frozen=True)
class LensResult:
    lens_score: float
    e_validity: Optional[float]


def lens_evaluate(
    records: Iterable[JudgmentRecord], validity_hook: Optional[Hook] = None
) -> LensResult:
    """Fraction of cue-accurate judgments; cue validity via pluggable hook."""
    recs = list(records)
    if not recs:
        raise ValueError("lens_evaluate requires at least one record")
    if any(r.accurate is None for r in recs):
        raise ValueError("every record needs an accurate flag for lens_evaluate")
    hook = validity_hook if validity_hook is not None else default_cue_validity
    accurate = sum(1 for r in recs if r.accurate)
    return LensResult(lens_score=accurate / len(recs), e_validity=hook(recs))


# ---------------------------------------------------------------------------
# Intuitive/analytical spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CctTest:
    t: float  # seconds
    intuitive: float  # 1/T
    analytical: float  # 1/intuitive, i.e. T itself
    spectrum: float  # analytical - intuitive
    normalized: float  # (T^2 - 1) / (T^2 + 1), in (-1, 1)


@dataclass(frozen=True)
class CctResult:
    tests: tuple[CctTest, ...]
    cct_score: float  # mean spectrum score (literal, unbounded)
    normalized_score: float  # mean normalized spectrum, in (-1, 1)


def cct_evaluate(times: Iterable[float]) -> CctResult:
    """Per-test intuitive (1/T) and analytical (1/(1/T)) scores, their
    difference as the spectrum score, and the mean over tests.

    The literal spectrum score T - 1/T is unbounded, so a bounded variant
    (T^2 - 1)/(T^2 + 1) — the same difference divided by the sum of the two
    scores — is reported alongside it; the literal mean stays the headline
    value.
    """
    ts = list(times)
    if not ts:
        raise ValueError("cct_evaluate requires at least one time")
    tests = []
    for t in ts:
        if not t > 0:
            raise ValueError(f"nonpositive test time {t!r}")
        intuitive = 1.0 / t
        analytical = 1.0 / intuitive
        tests.append(
            CctTest(
                t=t,
                intuitive=intuitive,
                analytical=analytical,
                spectrum=analytical - intuitive,
                normalized=(t * t - 1.0) / (t * t + 1.0),
            )
        )
    return CctResult(
        tests=tuple(tests),
        cct_score=sum(x.spectrum for x in tests) / len(tests),
        normalized_score=sum(x.normalized for x in tests) / len(tests),
    )


# ---------------------------------------------------------------------------
# Heuristic-triggering alignment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlignmentResult:
    hts: dict[str, float]  # per-heuristic triggering score, in [-1, 1]
    alignment_score: float  # mean HTS over heuristics; also reported as NHTI
    n_heuristics: int

    @property
    def nhti(self) -> float:
        """Alias: the aggregate goes by both AS and NHTI."""
        return self.alignment_score


def heuristic_alignment(outcomes: Iterable[HeuristicOutcome]) -> AlignmentResult:
    """Per-heuristic triggering score from mean confusion counts.

    Counts are averaged across that heuristic's tests first, then scored as
    (TP + TN - FP - FN) / (TP + TN + FP + FN); the alignment score is the
    mean over heuristics.
    """
    grouped: dict[str, list[HeuristicOutcome]] = {}
    for o in outcomes:
        grouped.setdefault(o.heuristic_id, []).append(o)
    if not grouped:
        raise ValueError("heuristic_alignment requires at least one outcome")
    hts: dict[str, float] = {}
    for hid, outs in grouped.items():
        m_tp = sum(o.tp for o in outs) / len(outs)
        m_tn = sum(o.tn for o in outs) / len(outs)
        m_fp = sum(o.fp for o in outs) / len(outs)
        m_fn = sum(o.fn for o in outs) / len(outs)
        denom = m_tp + m_tn + m_fp + m_fn
        if denom <= 0:
            raise ValueError(f"heuristic {hid!r} has all-zero mean counts")
        hts[hid] = (m_tp + m_tn - m_fp - m_fn) / denom
    score = sum(hts.values()) / len(hts)
    return AlignmentResult(hts=hts, alignment_score=score, n_heuristics=len(hts))


# ---------------------------------------------------------------------------
# Classification and reward metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationResult:
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    cumulative_reward: Optional[float]
    errors: dict[str, str]


def classification_metrics(
    tp: int,
    tn: int,
    fp: int,
    fn: int,
    rewards: Optional[Iterable[float]] = None,
) -> ClassificationResult:
    """Accuracy, precision, recall, F1 and cumulative reward.

    A zero denominator leaves that field None with a per-field error
    message rather than failing the whole call.
    """
    for name, v in (("tp", tp), ("tn", tn), ("fp", fp), ("fn", fn)):
        if not isinstance(v, int) or v < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
    errors: dict[str, str] = {}
    total = tp + tn + fp + fn
    accuracy = precision = recall = f1 = None
    if total > 0:
        accuracy = (tp + tn) / total
    else:
        errors["accuracy"] = "no samples"
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        errors["precision"] = "no positive predictions"
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        errors["recall"] = "no actual positives"
    if precision is not None and recall is not None:
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            errors["f1"] = "precision + recall is zero"
    else:
        errors["f1"] = "precision or recall undefined"
    cumulative = None
    if rewards is not None:
        cumulative = float(sum(rewards))
    return ClassificationResult(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        cumulative_reward=cumulative,
        errors=errors,
    )


# ---------------------------------------------------------------------------
# Policy capturing (cue-weight model)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CueModel:
    weights: tuple[float, ...]
    labels: Optional[tuple[str, ...]] = None
    residual_norm: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("cue model needs at least one weight")
        if any(not math.isfinite(w) for w in self.weights):
            raise ValueError("cue weights must be finite")
        if self.labels is not None and len(self.labels) != len(self.weights):
            raise ValueError("label count does not match weight count")


def policy_capture_predict(model: CueModel, cues: Sequence[float]) -> float:
    """Weighted sum of cue values under the model."""
    if len(cues) != len(model.weights):
        raise ValueError(
            f"dimension mismatch: model has {len(model.weights)} weights, "
            f"got {len(cues)} cues"
        )
    return float(sum(w * c for w, c in zip(model.weights, cues)))


def policy_capture_fit(
    observations: Sequence[tuple[Sequence[float], float]],
    labels: Optional[Sequence[str]] = None,
) -> CueModel:
    """Recover cue weights from (cues, decision) pairs by least squares.

    Requires at least dim + 1 observations and a full-column-rank design
    matrix; a duplicated cue column raises a rank-deficiency error.
    """
    if not observations:
        raise ValueError("no observations")
    dim = len(observations[0][0])
    if dim == 0:
        raise ValueError("observations have no cues")
    if any(len(c) != dim for c, _ in observations):
        raise ValueError("inconsistent cue dimensionality across observations")
    if len(observations) < dim + 1:
        raise ValueError(
            f"need at least {dim + 1} observations for {dim} cues, got {len(observations)}"
        )
    x = np.array([list(c) for c, _ in observations], dtype=float)
    y = np.array([d for _, d in observations], dtype=float)
    w, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < dim:
        raise ValueError(f"rank-deficient design matrix (rank {rank} < {dim})")
    residual = float(np.linalg.norm(x @ w - y))
    return CueModel(
        weights=tuple(float(v) for v in w),
        labels=tuple(labels) if labels is not None else None,
        residual_norm=residual,
    )
