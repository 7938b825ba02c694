"""Evaluation metrics: EER family, agnostic detection cost, per-attack tables.

All detectors here accept a trial when score >= threshold. Error rates are
computed only at achievable operating points (the distinct observed scores,
plus sentinels), and the EER is linearly interpolated between the two
adjacent points where FAR - FRR changes sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .score_io import LabelKind

POOLED_KEY = "pooled"


@dataclass(frozen=True)
class LabeledScores:
    """A score vector paired with trial labels, ready for metric computation."""

    scores: np.ndarray
    labels: tuple

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        if scores.ndim != 1:
            raise DataError("scores must be a 1-D vector")
        if scores.size != len(self.labels):
            raise DataError(
                f"{scores.size} scores for {len(self.labels)} labels"
            )
        if scores.size == 0:
            raise DataError("empty score vector")
        if not np.isfinite(scores).all():
            raise DataError("non-finite score values")

    @classmethod
    def from_table(cls, table, column):
        return cls(table.column_values(column), table.labels())

    def of_kind(self, kind):
        mask = np.array([lab.kind is kind for lab in self.labels], dtype=bool)
        return self.scores[mask]

    def spoof_by_attack(self):
        """Spoof scores grouped by attack tag; untagged spoof trials excluded."""
        groups = {}
        for value, lab in zip(self.scores, self.labels):
            if lab.kind is LabelKind.SPOOF and lab.attack_id is not None:
                groups.setdefault(lab.attack_id, []).append(value)
        return {
            name: np.asarray(groups[name], dtype=np.float64)
            for name in sorted(groups)
        }


def _operating_rates(positives, negatives):
    """FAR and FRR at every distinct score plus an accept-nothing sentinel.

    Thresholds ascend, so FAR - FRR starts at 1 and ends at -1; counts are
    kept integral until the final division so an independent per-threshold
    recount lands on the same floats.
    """
    pos = np.sort(positives)
    neg = np.sort(negatives)
    thresholds = np.unique(np.concatenate([pos, neg]))
    frr_counts = np.searchsorted(pos, thresholds, side="left")
    far_counts = neg.size - np.searchsorted(neg, thresholds, side="left")
    frr_counts = np.append(frr_counts, pos.size)
    far_counts = np.append(far_counts, 0)
    return far_counts / neg.size, frr_counts / pos.size


def _eer_from_rates(far, frr):
    """Interpolate the equal error rate from rate curves over ascending thresholds."""
    diff = far - frr
    k = int(np.argmax(diff < 0.0)) - 1
    t = diff[k] / (diff[k] - diff[k + 1])
    return float(far[k] + t * (far[k + 1] - far[k]))


def compute_eer(positives, negatives):
    """Equal error rate (fraction in [0, 1]) for a score >= threshold detector."""
    positives = np.asarray(positives, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    if positives.size == 0 or negatives.size == 0:
        raise DataError("EER needs at least one positive and one negative score")
    if not (np.isfinite(positives).all() and np.isfinite(negatives).all()):
        raise DataError("EER inputs must be finite")
    far, frr = _operating_rates(positives, negatives)
    return _eer_from_rates(far, frr)


@dataclass(frozen=True)
class SasvEers:
    """The three verification EERs as fractions; absent classes yield None."""

    sv_eer: float | None
    spf_eer: float | None
    sasv_eer: float | None


def compute_sasv_eers(labeled):
    """SV (target vs nontarget), SPF (target vs spoof), SASV (target vs both)."""
    tar = labeled.of_kind(LabelKind.TARGET)
    non = labeled.of_kind(LabelKind.NONTARGET)
    spf = labeled.of_kind(LabelKind.SPOOF)
    if tar.size == 0:
        raise DataError("no target trials; EERs are undefined")
    sv = compute_eer(tar, non) if non.size else None
    spoof_eer = compute_eer(tar, spf) if spf.size else None
    mixed = np.concatenate([non, spf])
    sasv = compute_eer(tar, mixed) if mixed.size else None
    return SasvEers(sv, spoof_eer, sasv)


@dataclass(frozen=True)
class ADCFConfig:
    """Priors and costs for the three-class agnostic detection cost."""

    prior_target: float = 0.9
    prior_nontarget: float = 0.05
    prior_spoof: float = 0.05
    cost_miss: float = 1.0
    cost_fa_nontarget: float = 10.0
    cost_fa_spoof: float = 20.0

    def __post_init__(self):
        priors = (self.prior_target, self.prior_nontarget, self.prior_spoof)
        costs = (self.cost_miss, self.cost_fa_nontarget, self.cost_fa_spoof)
        for p in priors:
            if not math.isfinite(p) or p < 0.0:
                raise DataError(f"negative or non-finite prior {p!r}")
        if abs(sum(priors) - 1.0) > 1e-9:
            raise DataError(f"priors {priors} do not sum to 1")
        for c in costs:
            if not math.isfinite(c) or c <= 0.0:
                raise DataError(f"non-positive cost {c!r}")
        if self.prior_target == 0.0 or (
            self.prior_nontarget == 0.0 and self.prior_spoof == 0.0
        ):
            raise DataError("degenerate priors make the cost normaliser zero")


def compute_a_dcf(labeled, config=None):
    """Minimum normalised detection cost over thresholds, and its argmin.

    Cost at threshold t is c_miss*p_tar*P(miss) + the two weighted
    false-accept terms, normalised by the best trivial system
    min(c_miss*p_tar, c_fa_non*p_non + c_fa_spf*p_spf). Candidate thresholds
    are every distinct score plus -inf and +inf; ties take the lowest.
    Returns (min_cost, threshold).
    """
    if config is None:
        config = ADCFConfig()
    tar = np.sort(labeled.of_kind(LabelKind.TARGET))
    non = np.sort(labeled.of_kind(LabelKind.NONTARGET))
    spf = np.sort(labeled.of_kind(LabelKind.SPOOF))
    if tar.size == 0 or non.size == 0 or spf.size == 0:
        raise DataError("a-DCF needs target, nontarget, and spoof trials")
    core = np.unique(np.concatenate([tar, non, spf]))
    thresholds = np.concatenate([[-np.inf], core, [np.inf]])
    p_miss = np.searchsorted(tar, thresholds, side="left") / tar.size
    p_fa_non = (non.size - np.searchsorted(non, thresholds, side="left")) / non.size
    p_fa_spf = (spf.size - np.searchsorted(spf, thresholds, side="left")) / spf.size
    w_miss = config.cost_miss * config.prior_target
    w_non = config.cost_fa_nontarget * config.prior_nontarget
    w_spf = config.cost_fa_spoof * config.prior_spoof
    normaliser = min(w_miss, w_non + w_spf)
    cost = (w_miss * p_miss + w_non * p_fa_non + w_spf * p_fa_spf) / normaliser
    idx = int(np.argmin(cost))
    return float(cost[idx]), float(thresholds[idx])


def per_attack_eers(labeled):
    """Target-vs-spoof EER per attack tag, plus a pooled entry over all spoofs.

    Untagged spoof trials count toward the pooled EER only. Returns an empty
    mapping when there are no spoof trials at all.
    """
    tar = labeled.of_kind(LabelKind.TARGET)
    if tar.size == 0:
        raise DataError("no target trials; per-attack EERs are undefined")
    result = {}
    for attack, scores in labeled.spoof_by_attack().items():
        result[attack] = compute_eer(tar, scores)
    all_spoof = labeled.of_kind(LabelKind.SPOOF)
    if all_spoof.size:
        result[POOLED_KEY] = compute_eer(tar, all_spoof)
    return result


@dataclass(frozen=True)
class HistogramExport:
    """Per-class counts over shared uniform bin edges."""

    edges: np.ndarray
    counts: dict

    def class_total(self, kind):
        return int(self.counts[kind].sum())


def histogram_export(labeled, bins=40):
    """Histogram all three classes over one shared [min, max] bin range."""
    if bins < 1:
        raise DataError(f"need at least 1 bin, got {bins}")
    lo = float(labeled.scores.min())
    hi = float(labeled.scores.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    counts = {}
    for kind in LabelKind:
        values = labeled.of_kind(kind)
        counts[kind] = np.histogram(values, bins=edges)[0]
    return HistogramExport(edges, counts)


@dataclass(frozen=True)
class EvalReport:
    """Headline metrics for one score column; EER fields are percentages."""

    sv_eer: float | None
    spf_eer: float | None
    sasv_eer: float | None
    a_dcf: float | None
    per_attack: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "sv_eer": self.sv_eer,
            "spf_eer": self.spf_eer,
            "sasv_eer": self.sasv_eer,
            "a_dcf": self.a_dcf,
            "per_attack": dict(self.per_attack),
            "counts": dict(self.counts),
        }

    @classmethod
    def from_json_dict(cls, doc):
        return cls(
            sv_eer=doc["sv_eer"],
            spf_eer=doc["spf_eer"],
            sasv_eer=doc["sasv_eer"],
            a_dcf=doc["a_dcf"],
            per_attack=dict(doc.get("per_attack", {})),
            counts=dict(doc.get("counts", {})),
        )


def _as_percent(fraction):
    return None if fraction is None else 100.0 * fraction


def evaluate_scores(labeled, adcf_config=None):
    """Full report for one score vector: EERs (percent), a-DCF, per-attack table."""
    eers = compute_sasv_eers(labeled)
    tar = labeled.of_kind(LabelKind.TARGET)
    non = labeled.of_kind(LabelKind.NONTARGET)
    spf = labeled.of_kind(LabelKind.SPOOF)
    if tar.size and non.size and spf.size:
        a_dcf = compute_a_dcf(labeled, adcf_config)[0]
    else:
        a_dcf = None
    per_attack = {
        name: 100.0 * value for name, value in per_attack_eers(labeled).items()
    }
    counts = {
        "target": int(tar.size),
        "nontarget": int(non.size),
        "spoof": int(spf.size),
    }
    return EvalReport(
        sv_eer=_as_percent(eers.sv_eer),
        spf_eer=_as_percent(eers.spf_eer),
        sasv_eer=_as_percent(eers.sasv_eer),
        a_dcf=a_dcf,
        per_attack=per_attack,
        counts=counts,
    )
