"""Fusion pathways: plain score sums, single classifiers, and two-stage stacks.

A pathway spec names the input score columns and the classifier(s) to stack.
Two-stage pathways feed the first stage's decision score, prepended to
either the same base scores (self-augmented) or held-out auxiliary scores
(externally-augmented), into a second classifier.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .backends.gmm import GaussianBackend, gaussian_backend_llr, train_gmm_em
from .backends.lr import LinearModel, cv_select_lr, lr_decision, stratified_folds, train_lr
from .backends.serialize import model_from_doc, model_to_doc
from .backends.svm import KernelModel, resolve_poly_params, svm_decision, train_svm_smo
from .errors import DataError
from .score_io import LabelKind, NormStats, fit_znorm
from .seeding import seed_sequence

DEFAULT_SCORE_SETS = (("E", "A"), ("E", "A", "R"))
FUSED_COLUMN = "s"


class FusionMode(enum.Enum):
    SCORE_SUM = "score-sum"
    SINGLE_STAGE = "single-stage"
    SELF_AUGMENTED = "self-augmented"
    EXTERNALLY_AUGMENTED = "externally-augmented"


class ClassifierKind(enum.Enum):
    LR = "lr"
    SVM = "svm"
    GAUSSIAN = "gaussian"


_STACK_KINDS = (ClassifierKind.LR, ClassifierKind.SVM)


@dataclass(frozen=True)
class PathwaySpec:
    """One fusion pathway: mode, input columns, and classifier choices.

    base_columns are the scores every pathway starts from; aux_columns are
    the extra scores an externally-augmented second stage consumes instead
    of the base. normalize selects train-partition z-scaling of all
    referenced columns before any classifier sees them (plain score sums
    always use raw scores).
    """

    mode: FusionMode
    base_columns: tuple
    aux_columns: tuple = ()
    stage1: ClassifierKind | None = None
    stage2: ClassifierKind | None = None
    normalize: bool = True
    alias: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", FusionMode(self.mode))
        object.__setattr__(self, "base_columns", tuple(self.base_columns))
        object.__setattr__(self, "aux_columns", tuple(self.aux_columns))
        for attr in ("stage1", "stage2"):
            value = getattr(self, attr)
            if value is not None:
                object.__setattr__(self, attr, ClassifierKind(value))
        if not self.base_columns:
            raise DataError("pathway needs at least one base score column")
        ref = self.base_columns + self.aux_columns
        if len(set(ref)) != len(ref):
            raise DataError(f"repeated score columns in {ref!r}")
        mode = self.mode
        if mode is FusionMode.SCORE_SUM:
            if self.stage1 is not None or self.stage2 is not None:
                raise DataError("a plain score sum takes no classifiers")
            if self.aux_columns:
                raise DataError("a plain score sum takes no auxiliary columns")
            if self.normalize:
                raise DataError("plain score sums always run on raw scores")
        elif mode is FusionMode.SINGLE_STAGE:
            if self.stage1 is None:
                raise DataError("single-stage pathway needs a classifier")
            if self.stage2 is not None:
                raise DataError("single-stage pathway cannot have a second stage")
            if self.aux_columns:
                raise DataError("single-stage pathway takes no auxiliary columns")
        else:
            if self.stage1 not in _STACK_KINDS or self.stage2 not in _STACK_KINDS:
                raise DataError(
                    "two-stage pathways need lr or svm for both stages "
                    "(the Gaussian back-end is single-stage only)"
                )
            if mode is FusionMode.SELF_AUGMENTED and self.aux_columns:
                raise DataError("self-augmented pathways reuse the base columns")
            if mode is FusionMode.EXTERNALLY_AUGMENTED and not self.aux_columns:
                raise DataError(
                    "externally-augmented pathways need auxiliary columns"
                )

    @property
    def referenced_columns(self):
        return self.base_columns + self.aux_columns

    @property
    def classifier_token(self):
        if self.mode is FusionMode.SCORE_SUM:
            return "-"
        if self.stage2 is None:
            return self.stage1.value
        return f"{self.stage1.value}-{self.stage2.value}"

    @property
    def scores_token(self):
        token = "+".join(self.base_columns)
        if self.aux_columns:
            token += "|" + "+".join(self.aux_columns)
        return token

    @property
    def name(self):
        """Canonical identity, e.g. 'self-augmented/svm-lr/E+A+R'."""
        return f"{self.mode.value}/{self.classifier_token}/{self.scores_token}"

    @property
    def slug(self):
        """Filesystem-safe variant of the name."""
        return self.name.replace("/", "_").replace("|", "~")

    @property
    def display_name(self):
        return self.alias if self.alias else self.name

    def to_json_dict(self):
        return {
            "mode": self.mode.value,
            "base_columns": list(self.base_columns),
            "aux_columns": list(self.aux_columns),
            "stage1": self.stage1.value if self.stage1 else None,
            "stage2": self.stage2.value if self.stage2 else None,
            "normalize": self.normalize,
            "alias": self.alias,
        }

    @classmethod
    def from_json_dict(cls, doc):
        return cls(
            mode=doc["mode"],
            base_columns=tuple(doc["base_columns"]),
            aux_columns=tuple(doc.get("aux_columns", ())),
            stage1=doc.get("stage1"),
            stage2=doc.get("stage2"),
            normalize=bool(doc.get("normalize", True)),
            alias=doc.get("alias"),
        )


@dataclass(frozen=True)
class TrainOptions:
    """Trainer knobs shared by every pathway in a run."""

    lr_cv: bool = True
    lr_grid: tuple = tuple(10.0 ** k for k in range(-4, 5))
    lr_folds: int = 10
    lr_reg: float = 1.0
    svm_degree: int = 3
    svm_gamma: float | None = None
    svm_coef0: float = 1.0
    svm_box: float = 1.0
    gmm_components: int = 3
    llr_neg_weights: tuple = (0.5, 0.5)
    stage1_out_of_fold: bool = False
    oof_folds: int = 10

    def __post_init__(self):
        object.__setattr__(self, "lr_grid", tuple(float(g) for g in self.lr_grid))
        object.__setattr__(
            self, "llr_neg_weights", tuple(float(w) for w in self.llr_neg_weights)
        )
        if self.lr_folds < 2 or self.oof_folds < 2:
            raise DataError("fold counts must be at least 2")
        if not self.lr_grid or any(g <= 0.0 for g in self.lr_grid):
            raise DataError("lr_grid must be non-empty positive penalties")
        if self.lr_reg <= 0.0:
            raise DataError(f"lr_reg must be positive, got {self.lr_reg!r}")
        if int(self.svm_degree) != self.svm_degree or self.svm_degree < 1:
            raise DataError(f"svm_degree must be a positive integer, got {self.svm_degree!r}")
        if self.svm_gamma is not None and self.svm_gamma <= 0.0:
            raise DataError(f"svm_gamma must be positive, got {self.svm_gamma!r}")
        if self.svm_box <= 0.0:
            raise DataError(f"svm_box must be positive, got {self.svm_box!r}")
        if self.gmm_components < 1:
            raise DataError(f"gmm_components must be at least 1, got {self.gmm_components!r}")
        if (
            len(self.llr_neg_weights) != 2
            or any(w < 0.0 for w in self.llr_neg_weights)
            or abs(sum(self.llr_neg_weights) - 1.0) > 1e-9
        ):
            raise DataError(
                f"llr_neg_weights {self.llr_neg_weights!r} must be two non-negative "
                "values summing to 1"
            )

    def to_json_dict(self):
        return {
            "lr_cv": self.lr_cv,
            "lr_grid": list(self.lr_grid),
            "lr_folds": self.lr_folds,
            "lr_reg": self.lr_reg,
            "svm_degree": self.svm_degree,
            "svm_gamma": self.svm_gamma,
            "svm_coef0": self.svm_coef0,
            "svm_box": self.svm_box,
            "gmm_components": self.gmm_components,
            "llr_neg_weights": list(self.llr_neg_weights),
            "stage1_out_of_fold": self.stage1_out_of_fold,
            "oof_folds": self.oof_folds,
        }

    @classmethod
    def from_json_dict(cls, doc):
        defaults = cls()
        return cls(
            lr_cv=bool(doc.get("lr_cv", defaults.lr_cv)),
            lr_grid=tuple(doc.get("lr_grid", defaults.lr_grid)),
            lr_folds=int(doc.get("lr_folds", defaults.lr_folds)),
            lr_reg=float(doc.get("lr_reg", defaults.lr_reg)),
            svm_degree=int(doc.get("svm_degree", defaults.svm_degree)),
            svm_gamma=doc.get("svm_gamma", defaults.svm_gamma),
            svm_coef0=float(doc.get("svm_coef0", defaults.svm_coef0)),
            svm_box=float(doc.get("svm_box", defaults.svm_box)),
            gmm_components=int(doc.get("gmm_components", defaults.gmm_components)),
            llr_neg_weights=tuple(
                doc.get("llr_neg_weights", defaults.llr_neg_weights)
            ),
            stage1_out_of_fold=bool(
                doc.get("stage1_out_of_fold", defaults.stage1_out_of_fold)
            ),
            oof_folds=int(doc.get("oof_folds", defaults.oof_folds)),
        )


@dataclass
class TrainedPipeline:
    """A pathway spec plus everything needed to score new tables."""

    spec: PathwaySpec
    norm_stats: NormStats | None
    stage1_model: object | None
    stage2_model: object | None


def _normalized_columns(table, columns, stats):
    vectors = []
    for name in columns:
        values = table.column_values(name)
        if stats is not None:
            mean, sd = stats.lookup(name)
            values = (values - mean) / sd
        vectors.append(values)
    return np.column_stack(vectors)


def score_sum(table, columns, fused_name=FUSED_COLUMN):
    """Append the plain sum of raw score columns as a fused column."""
    if not columns:
        raise DataError("score sum needs at least one column")
    total = np.zeros(len(table), dtype=np.float64)
    for name in columns:
        total += table.column_values(name)
    return table.with_column(fused_name, total)


def build_stage1_features(table, spec, stats=None):
    """Per-trial feature rows for the first stage: the base score columns."""
    if spec.normalize and stats is None:
        raise DataError("pathway normalises scores but no stats were given")
    return _normalized_columns(table, spec.base_columns, stats if spec.normalize else None)


def build_stage2_features(table, spec, stage1_scores, stats=None):
    """Second-stage rows: the stage-1 score prepended to base or aux columns.

    Self-augmented stacks reuse the (normalised) base columns next to the
    stage-1 score; externally-augmented stacks use the auxiliary columns
    instead, without repeating the base.
    """
    stage1_scores = np.asarray(stage1_scores, dtype=np.float64)
    if stage1_scores.shape != (len(table),):
        raise DataError(
            f"stage-1 scores have shape {stage1_scores.shape} for {len(table)} trials"
        )
    if spec.mode is FusionMode.SELF_AUGMENTED:
        tail_columns = spec.base_columns
    elif spec.mode is FusionMode.EXTERNALLY_AUGMENTED:
        tail_columns = spec.aux_columns
    else:
        raise DataError(f"{spec.mode.value} pathways have no second stage")
    if spec.normalize and stats is None:
        raise DataError("pathway normalises scores but no stats were given")
    tail = _normalized_columns(
        table, tail_columns, stats if spec.normalize else None
    )
    return np.column_stack([stage1_scores[:, None], tail])


def _binary_labels(table):
    return np.array(
        [1.0 if row.label.kind is LabelKind.TARGET else 0.0 for row in table.rows],
        dtype=np.float64,
    )


def _fit_classifier(kind, features, table, options, seed_parts):
    """Train one stage. LR/SVM learn target-vs-rest; Gaussian learns all classes."""
    if kind is ClassifierKind.LR:
        y = _binary_labels(table)
        if options.lr_cv:
            return cv_select_lr(
                features,
                y,
                grid=options.lr_grid,
                k=options.lr_folds,
                seed=seed_sequence(*seed_parts),
            )
        return train_lr(features, y, options.lr_reg)
    if kind is ClassifierKind.SVM:
        y = 2.0 * _binary_labels(table) - 1.0
        params = resolve_poly_params(
            features,
            degree=options.svm_degree,
            gamma=options.svm_gamma,
            coef0=options.svm_coef0,
            box=options.svm_box,
        )
        return train_svm_smo(features, y, params)
    if kind is ClassifierKind.GAUSSIAN:
        kinds = np.array([row.label.kind.value for row in table.rows])
        mixtures = {}
        for tag, class_name in enumerate(("target", "nontarget", "spoof")):
            subset = features[kinds == class_name]
            if subset.shape[0] == 0:
                raise DataError(
                    f"Gaussian back-end needs {class_name} trials in the training set"
                )
            mixtures[class_name] = train_gmm_em(
                subset,
                n_components=options.gmm_components,
                seed=seed_sequence(*seed_parts, tag),
            )
        return GaussianBackend(
            gmm_target=mixtures["target"],
            gmm_nontarget=mixtures["nontarget"],
            gmm_spoof=mixtures["spoof"],
            neg_weights=tuple(options.llr_neg_weights),
        )
    raise DataError(f"unknown classifier kind {kind!r}")


def _decision(model, features):
    if isinstance(model, LinearModel):
        return lr_decision(model, features)
    if isinstance(model, KernelModel):
        return svm_decision(model, features)
    if isinstance(model, GaussianBackend):
        return gaussian_backend_llr(model, features)
    raise DataError(f"cannot score with model of type {type(model).__name__}")


def _out_of_fold_scores(spec, features, table, options, seed):
    """Stage-1 scores where each trial is scored by a model that never saw it."""
    y = _binary_labels(table)
    folds = stratified_folds(y, options.oof_folds, seed_sequence(seed, 3))
    scores = np.empty(len(table), dtype=np.float64)
    all_idx = np.arange(len(table))
    for fold_no, fold in enumerate(folds):
        if fold.size == 0:
            continue
        rest = np.setdiff1d(all_idx, fold, assume_unique=True)
        sub_rows = tuple(table.rows[i] for i in rest)
        sub_table = type(table)(table.columns, sub_rows, table.partition)
        model = _fit_classifier(
            spec.stage1, features[rest], sub_table, options, (seed, 4, fold_no)
        )
        scores[fold] = _decision(model, features[fold])
    return scores


def train_pipeline(train_table, spec, seed=0, options=None):
    """Fit every model a pathway needs on one training table.

    Deterministic: the same table, spec, options, and seed always produce
    the same models bit-for-bit.
    """
    if options is None:
        options = TrainOptions()
    if len(train_table) == 0:
        raise DataError("empty training table")
    for name in spec.referenced_columns:
        train_table.column_index(name)
    if spec.mode is FusionMode.SCORE_SUM:
        return TrainedPipeline(spec, None, None, None)
    stats = fit_znorm(train_table, spec.referenced_columns) if spec.normalize else None
    features1 = build_stage1_features(train_table, spec, stats)
    stage1_model = _fit_classifier(spec.stage1, features1, train_table, options, (seed, 1))
    if spec.mode is FusionMode.SINGLE_STAGE:
        return TrainedPipeline(spec, stats, stage1_model, None)
    if options.stage1_out_of_fold:
        stage1_scores = _out_of_fold_scores(spec, features1, train_table, options, seed)
    else:
        stage1_scores = _decision(stage1_model, features1)
    features2 = build_stage2_features(train_table, spec, stage1_scores, stats)
    stage2_model = _fit_classifier(spec.stage2, features2, train_table, options, (seed, 2))
    return TrainedPipeline(spec, stats, stage1_model, stage2_model)


def apply_pipeline(pipeline, table, fused_name=FUSED_COLUMN):
    """Score a table with a trained pathway; appends the fused column."""
    spec = pipeline.spec
    if spec.mode is FusionMode.SCORE_SUM:
        return score_sum(table, spec.base_columns, fused_name)
    features1 = build_stage1_features(table, spec, pipeline.norm_stats)
    scores = _decision(pipeline.stage1_model, features1)
    if spec.mode is not FusionMode.SINGLE_STAGE:
        features2 = build_stage2_features(table, spec, scores, pipeline.norm_stats)
        scores = _decision(pipeline.stage2_model, features2)
    return table.with_column(fused_name, np.asarray(scores, dtype=np.float64))


def enumerate_pathways(score_sets=None, modes=None):
    """The default experiment grid over one short and one extended score set.

    With the defaults this yields 18 specs: the raw score sum, five
    single-stage systems (lr, svm, and the Gaussian back-end on the first
    set; lr and svm on the second), four self-augmented stacks per score
    set, and four externally-augmented stacks feeding the extra columns of
    the second set to the second stage.
    """
    if score_sets is None:
        score_sets = DEFAULT_SCORE_SETS
    score_sets = [tuple(s) for s in score_sets]
    if not score_sets or any(not s for s in score_sets):
        raise DataError("score_sets must be non-empty column tuples")
    if modes is None:
        mode_set = set(FusionMode)
    else:
        mode_set = {FusionMode(m) for m in modes}
    base = score_sets[0]
    specs = []
    if FusionMode.SCORE_SUM in mode_set:
        specs.append(PathwaySpec(FusionMode.SCORE_SUM, base, normalize=False))
    if FusionMode.SINGLE_STAGE in mode_set:
        for set_no, columns in enumerate(score_sets):
            kinds = (ClassifierKind.LR, ClassifierKind.SVM)
            if set_no == 0:
                kinds = kinds + (ClassifierKind.GAUSSIAN,)
            for kind in kinds:
                specs.append(
                    PathwaySpec(FusionMode.SINGLE_STAGE, columns, stage1=kind)
                )
    if FusionMode.SELF_AUGMENTED in mode_set:
        for columns in score_sets:
            for s1 in _STACK_KINDS:
                for s2 in _STACK_KINDS:
                    specs.append(
                        PathwaySpec(
                            FusionMode.SELF_AUGMENTED, columns, stage1=s1, stage2=s2
                        )
                    )
    if FusionMode.EXTERNALLY_AUGMENTED in mode_set:
        for columns in score_sets[1:]:
            aux = tuple(c for c in columns if c not in base)
            if not aux:
                continue
            for s1 in _STACK_KINDS:
                for s2 in _STACK_KINDS:
                    specs.append(
                        PathwaySpec(
                            FusionMode.EXTERNALLY_AUGMENTED,
                            base,
                            aux_columns=aux,
                            stage1=s1,
                            stage2=s2,
                        )
                    )
    return specs


def pipeline_to_doc(pipeline):
    """JSON-ready bundle of the pathway spec, normalisation stats, and stage models."""
    stats_doc = None
    if pipeline.norm_stats is not None:
        stats_doc = {
            "columns": list(pipeline.norm_stats.columns),
            "means": list(pipeline.norm_stats.means),
            "sds": list(pipeline.norm_stats.sds),
        }
    return {
        "spec": pipeline.spec.to_json_dict(),
        "norm_stats": stats_doc,
        "stage1_model": model_to_doc(pipeline.stage1_model)
        if pipeline.stage1_model is not None
        else None,
        "stage2_model": model_to_doc(pipeline.stage2_model)
        if pipeline.stage2_model is not None
        else None,
    }


def pipeline_from_doc(doc):
    spec = PathwaySpec.from_json_dict(doc["spec"])
    stats = None
    if doc.get("norm_stats") is not None:
        sd = doc["norm_stats"]
        stats = NormStats(
            means=tuple(float(v) for v in sd["means"]),
            sds=tuple(float(v) for v in sd["sds"]),
            columns=tuple(sd["columns"]),
        )
    stage1 = model_from_doc(doc["stage1_model"]) if doc.get("stage1_model") else None
    stage2 = model_from_doc(doc["stage2_model"]) if doc.get("stage2_model") else None
    return TrainedPipeline(spec, stats, stage1, stage2)


def save_pipeline(pipeline, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(pipeline_to_doc(pipeline), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_pipeline(path):
    with open(path, "r", encoding="utf-8") as handle:
        return pipeline_from_doc(json.load(handle))
