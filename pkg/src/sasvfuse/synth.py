"""Synthetic trial generator with Gaussian per-class, per-column score models."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError
from .score_io import (
    LabelKind,
    Partition,
    ScoreTable,
    TrialLabel,
    TrialRecord,
)
from .seeding import seed_sequence

_CLASS_TAGS = {
    LabelKind.TARGET: "tar",
    LabelKind.NONTARGET: "non",
    LabelKind.SPOOF: "spf",
}


@dataclass(frozen=True)
class ColumnDist:
    """Normal score model for one class on one column."""

    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)):
            raise DataError(f"non-finite distribution ({self.mean}, {self.sd})")
        if self.sd <= 0.0:
            raise DataError(f"spread must be positive, got {self.sd}")


@dataclass(frozen=True)
class ClassSpec:
    """Trial count and per-column distributions for one trial class."""

    count: int
    dists: dict
    attack_mix: dict | None = None

    def __post_init__(self):
        if self.count < 0:
            raise DataError(f"negative trial count {self.count}")
        if self.attack_mix is not None:
            if not self.attack_mix:
                raise DataError("attack mix must name at least one attack")
            total = 0.0
            for name, prop in self.attack_mix.items():
                if not name or any(ch.isspace() for ch in name):
                    raise DataError(f"malformed attack tag {name!r}")
                if not (math.isfinite(prop) and prop >= 0.0):
                    raise DataError(f"bad attack proportion {prop!r} for {name!r}")
                total += prop
            if abs(total - 1.0) > 1e-9:
                raise DataError(f"attack proportions sum to {total}, expected 1")


@dataclass(frozen=True)
class SynthConfig:
    """Full recipe: column names, one spec per class, and the base seed."""

    columns: tuple
    target: ClassSpec
    nontarget: ClassSpec
    spoof: ClassSpec
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        if not self.columns:
            raise DataError("need at least one score column")
        for name, spec in self.class_specs():
            missing = [c for c in self.columns if c not in spec.dists]
            extra = [c for c in spec.dists if c not in self.columns]
            if missing or extra:
                raise DataError(
                    f"{name} class distributions must cover exactly {self.columns}"
                )
        for name, spec in self.class_specs():
            if name != "spoof" and spec.attack_mix is not None:
                raise DataError(f"{name} trials cannot carry attack tags")

    def class_specs(self):
        return (
            ("target", self.target),
            ("nontarget", self.nontarget),
            ("spoof", self.spoof),
        )


def attack_allocation(mix, total):
    """Largest-remainder split of `total` trials across attack tags.

    Tags are processed in sorted order; leftover trials go to the largest
    fractional remainders (ties to the lexicographically smaller tag), so
    counts always sum to the total exactly.
    """
    names = sorted(mix)
    quotas = [mix[name] * total for name in names]
    floors = [int(math.floor(q)) for q in quotas]
    leftover = total - sum(floors)
    by_remainder = sorted(
        range(len(names)), key=lambda idx: (-(quotas[idx] - floors[idx]), names[idx])
    )
    for idx in by_remainder[: max(leftover, 0)]:
        floors[idx] += 1
    return [(name, count) for name, count in zip(names, floors)]


def generate_trials(config, id_prefix=""):
    """Draw one ScoreTable from the config.

    Classes are generated in target, nontarget, spoof order and columns in
    declaration order, each from its own normal model, so a fixed seed pins
    every byte of the output. Spoof rows are tagged by splitting the block
    across the attack mix (largest remainder), in sorted tag order.
    """
    rng = np.random.default_rng(seed_sequence(config.seed))
    rows = []
    for class_name, spec in config.class_specs():
        kind = LabelKind(class_name)
        tag = _CLASS_TAGS[kind]
        draws = [
            rng.normal(spec.dists[col].mean, spec.dists[col].sd, spec.count)
            for col in config.columns
        ]
        scores = np.column_stack(draws) if spec.count else np.empty((0, len(config.columns)))
        attacks = [None] * spec.count
        if kind is LabelKind.SPOOF and spec.attack_mix is not None:
            attacks = []
            for attack, count in attack_allocation(spec.attack_mix, spec.count):
                attacks.extend([attack] * count)
        for i in range(spec.count):
            rows.append(
                TrialRecord(
                    enroll_id=f"{id_prefix}e-{tag}-{i:06d}",
                    test_id=f"{id_prefix}t-{tag}-{i:06d}",
                    label=TrialLabel(kind, attacks[i]),
                    scores=tuple(float(v) for v in scores[i]),
                )
            )
    return ScoreTable(config.columns, tuple(rows))


def synthesize_partitions(config):
    """Three independent draws (train/dev/eval) derived from one base seed."""
    out = {}
    for tag, partition in enumerate(
        (Partition.TRAIN, Partition.DEV, Partition.EVAL), start=1
    ):
        child_seed = int(seed_sequence(config.seed, 1000 + tag).generate_state(1)[0])
        part_config = replace(config, seed=child_seed)
        table = generate_trials(part_config, id_prefix=f"{partition.value[:2]}-")
        out[partition] = table.with_partition(partition)
    return out


def default_sasv_scenario(seed=7):
    """A three-column scenario shaped like a speaker/spoofing score triple.

    Column E behaves like a verification score (rejects other speakers,
    blind to spoofing); column A like a countermeasure score (rejects
    spoofs, blind to speaker identity); column R like a second, noisier
    countermeasure. Neither single column can separate targets from the
    mixed impostor pool, but their combination can.
    """
    e = {
        "target": ColumnDist(2.0, 0.8),
        "nontarget": ColumnDist(-2.0, 0.8),
        "spoof": ColumnDist(2.0, 0.8),
    }
    a = {
        "target": ColumnDist(2.0, 0.8),
        "nontarget": ColumnDist(2.0, 0.8),
        "spoof": ColumnDist(-2.0, 0.8),
    }
    r = {
        "target": ColumnDist(3.0, 1.2),
        "nontarget": ColumnDist(3.0, 1.2),
        "spoof": ColumnDist(-3.0, 1.2),
    }
    def dists(class_name):
        return {"E": e[class_name], "A": a[class_name], "R": r[class_name]}

    return SynthConfig(
        columns=("E", "A", "R"),
        target=ClassSpec(1000, dists("target")),
        nontarget=ClassSpec(1000, dists("nontarget")),
        spoof=ClassSpec(1000, dists("spoof"), attack_mix={"A01": 0.5, "A02": 0.5}),
        seed=seed,
    )


def synth_config_to_doc(config):
    doc = {"columns": list(config.columns), "seed": config.seed, "classes": {}}
    for name, spec in config.class_specs():
        class_doc = {
            "count": spec.count,
            "dists": {
                col: [spec.dists[col].mean, spec.dists[col].sd]
                for col in config.columns
            },
        }
        if spec.attack_mix is not None:
            class_doc["attack_mix"] = dict(spec.attack_mix)
        doc["classes"][name] = class_doc
    return doc


def synth_config_from_doc(doc):
    try:
        columns = tuple(doc["columns"])
        classes = doc["classes"]
        specs = {}
        for name in ("target", "nontarget", "spoof"):
            class_doc = classes[name]
            dists = {
                col: ColumnDist(float(pair[0]), float(pair[1]))
                for col, pair in class_doc["dists"].items()
            }
            specs[name] = ClassSpec(
                count=int(class_doc["count"]),
                dists=dists,
                attack_mix=dict(class_doc["attack_mix"])
                if class_doc.get("attack_mix") is not None
                else None,
            )
    except KeyError as exc:
        raise DataError(f"synthesis config is missing {exc}") from None
    return SynthConfig(
        columns=columns,
        target=specs["target"],
        nontarget=specs["nontarget"],
        spoof=specs["spoof"],
        seed=int(doc.get("seed", 0)),
    )


def load_synth_config(path):
    with open(path, "r", encoding="utf-8") as handle:
        return synth_config_from_doc(json.load(handle))
