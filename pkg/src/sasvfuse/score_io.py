"""Trial keys, score-file joining, z-normalisation, and the canonical TSV format.

A trial is (enroll_id, test_id) plus a label that is one of target, nontarget,
or spoof; spoof trials may carry an attack tag. Scores from one or more
systems are attached as named columns, and the whole table round-trips
through a tab-separated canonical format.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError, ProtocolError

CANONICAL_FIXED_HEADER = ("enroll_id", "test_id", "label", "attack")
MISSING_FIELD = "-"
# Shortest format that is guaranteed to round-trip an IEEE double.
FLOAT_FORMAT = "%.17g"


class LabelKind(enum.Enum):
    TARGET = "target"
    NONTARGET = "nontarget"
    SPOOF = "spoof"


class Partition(enum.Enum):
    TRAIN = "train"
    DEV = "dev"
    EVAL = "eval"
    OTHER = "other"


class KeyFormat(enum.Enum):
    SASV_PROTOCOL = "sasv"
    CANONICAL_TSV = "canonical"


@dataclass(frozen=True)
class TrialLabel:
    """Trial class plus an optional attack tag (spoof trials only)."""

    kind: LabelKind
    attack_id: str | None = None

    def __post_init__(self):
        if not isinstance(self.kind, LabelKind):
            raise DataError(f"label kind must be a LabelKind, got {self.kind!r}")
        if self.attack_id is not None:
            if self.kind is not LabelKind.SPOOF:
                raise DataError(
                    f"attack tag {self.attack_id!r} is only valid on spoof trials"
                )
            if not self.attack_id or any(ch.isspace() for ch in self.attack_id):
                raise DataError(f"malformed attack tag {self.attack_id!r}")

    @property
    def is_spoof(self):
        return self.kind is LabelKind.SPOOF


@dataclass(frozen=True)
class TrialRecord:
    """One trial with its per-column scores (parallel to ScoreTable.columns)."""

    enroll_id: str
    test_id: str
    label: TrialLabel
    scores: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.enroll_id or not self.test_id:
            raise DataError("enroll_id and test_id must be non-empty")


@dataclass(frozen=True)
class ScoreTable:
    """Ordered trials with named score columns.

    The partition tag is bookkeeping only; two tables with identical columns
    and rows compare equal regardless of it.
    """

    columns: tuple[str, ...]
    rows: tuple[TrialRecord, ...]
    partition: Partition = field(default=Partition.OTHER, compare=False)

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise DataError(f"duplicate column names in {self.columns!r}")
        for name in self.columns:
            if not name or any(ch.isspace() for ch in name):
                raise DataError(f"malformed column name {name!r}")
        width = len(self.columns)
        seen = set()
        for row in self.rows:
            if len(row.scores) != width:
                raise DataError(
                    f"trial ({row.enroll_id}, {row.test_id}) has {len(row.scores)} "
                    f"scores, expected {width}"
                )
            for value in row.scores:
                if not math.isfinite(value):
                    raise DataError(
                        f"non-finite score on trial ({row.enroll_id}, {row.test_id})"
                    )
            key = (row.enroll_id, row.test_id)
            if key in seen:
                raise DataError(f"duplicate trial {key!r}")
            seen.add(key)

    def __len__(self):
        return len(self.rows)

    def column_index(self, name):
        try:
            return self.columns.index(name)
        except ValueError:
            raise DataError(
                f"unknown score column {name!r}; table has {list(self.columns)}"
            ) from None

    def column_values(self, name):
        """Scores of one column as a float64 array in trial order."""
        idx = self.column_index(name)
        return np.array([row.scores[idx] for row in self.rows], dtype=np.float64)

    def with_column(self, name, values):
        """New table with an extra score column appended."""
        if name in self.columns:
            raise DataError(f"column {name!r} already present")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(self.rows),):
            raise DataError(
                f"column {name!r} has {values.shape} values for {len(self.rows)} trials"
            )
        rows = tuple(
            replace(row, scores=row.scores + (float(v),))
            for row, v in zip(self.rows, values)
        )
        return ScoreTable(self.columns + (name,), rows, self.partition)

    def with_partition(self, partition):
        return ScoreTable(self.columns, self.rows, partition)

    def labels(self):
        return tuple(row.label for row in self.rows)


@dataclass(frozen=True)
class NormStats:
    """Per-column location/scale fitted on one partition (z-normalisation)."""

    means: tuple[float, ...]
    sds: tuple[float, ...]
    columns: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.means) == len(self.sds) == len(self.columns)):
            raise DataError("norm-stats fields must be parallel")
        if len(set(self.columns)) != len(self.columns):
            raise DataError("duplicate columns in norm stats")
        for name, sd in zip(self.columns, self.sds):
            if not math.isfinite(sd) or sd <= 0.0:
                raise DataError(f"column {name!r} has non-positive spread {sd!r}")

    def lookup(self, name):
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise DataError(f"no normalisation stats for column {name!r}") from None
        return self.means[idx], self.sds[idx]


_LABEL_BY_TOKEN = {kind.value: kind for kind in LabelKind}


def _parse_label_token(token, path, line_no):
    kind = _LABEL_BY_TOKEN.get(token.lower())
    if kind is None:
        raise ProtocolError(
            f"unknown trial label {token!r} (expected target, nontarget, or spoof)",
            path=path,
            line=line_no,
        )
    return kind


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read().splitlines()
    except OSError:
        raise


def parse_trial_key(path, fmt=KeyFormat.SASV_PROTOCOL):
    """Read a trial key file into a score-less ScoreTable.

    The protocol format has whitespace-separated lines of
    ``enroll_id test_id label [attack]``; the attack field may be ``-`` or
    absent for trials that have none. The canonical format is the toolkit's
    own TSV (any score columns it carries are dropped here).
    """
    fmt = KeyFormat(fmt)
    if fmt is KeyFormat.CANONICAL_TSV:
        table = read_canonical(path)
        rows = tuple(
            TrialRecord(r.enroll_id, r.test_id, r.label) for r in table.rows
        )
        return ScoreTable((), rows, table.partition)

    rows = []
    seen = {}
    for line_no, raw in enumerate(_read_lines(path), start=1):
        fields = raw.split()
        if not fields:
            continue
        if len(fields) not in (3, 4):
            raise ProtocolError(
                f"expected 3 or 4 fields, got {len(fields)}", path=path, line=line_no
            )
        enroll_id, test_id, label_token = fields[:3]
        kind = _parse_label_token(label_token, path, line_no)
        attack = None
        if len(fields) == 4 and fields[3] != MISSING_FIELD:
            attack = fields[3]
            if kind is not LabelKind.SPOOF:
                raise ProtocolError(
                    f"attack tag {attack!r} on a {kind.value} trial",
                    path=path,
                    line=line_no,
                )
        key = (enroll_id, test_id)
        if key in seen:
            raise ProtocolError(
                f"duplicate trial {key!r} (first seen on line {seen[key]})",
                path=path,
                line=line_no,
            )
        seen[key] = line_no
        try:
            rows.append(TrialRecord(enroll_id, test_id, TrialLabel(kind, attack)))
        except DataError as exc:
            raise ProtocolError(str(exc), path=path, line=line_no) from None
    return ScoreTable((), tuple(rows))


def _parse_score_file(path):
    """Read a raw score file; returns (n_key_fields, {key: score})."""
    entries = {}
    n_fields = None
    for line_no, raw in enumerate(_read_lines(path), start=1):
        fields = raw.split()
        if not fields:
            continue
        if n_fields is None:
            if len(fields) not in (2, 3):
                raise ProtocolError(
                    f"expected 2 or 3 fields per line, got {len(fields)}",
                    path=path,
                    line=line_no,
                )
            n_fields = len(fields)
        elif len(fields) != n_fields:
            raise ProtocolError(
                f"inconsistent field count {len(fields)} (file started with {n_fields})",
                path=path,
                line=line_no,
            )
        key = fields[0] if n_fields == 2 else (fields[0], fields[1])
        try:
            value = float(fields[-1])
        except ValueError:
            raise ProtocolError(
                f"malformed score {fields[-1]!r}", path=path, line=line_no
            ) from None
        if not math.isfinite(value):
            raise ProtocolError(
                f"non-finite score {fields[-1]!r}", path=path, line=line_no
            )
        if key in entries:
            raise ProtocolError(f"duplicate score key {key!r}", path=path, line=line_no)
        entries[key] = value
    if n_fields is None:
        raise ProtocolError("score file is empty", path=path)
    return n_fields, entries


def attach_scores(table, column, path):
    """Join a score file onto a table as a new named column.

    Three-field files key on (enroll_id, test_id); two-field files key on
    test_id alone and broadcast over enrollments. Every trial in the table
    must be covered.
    """
    n_fields, entries = _parse_score_file(path)
    values = np.empty(len(table.rows), dtype=np.float64)
    for i, row in enumerate(table.rows):
        key = row.test_id if n_fields == 2 else (row.enroll_id, row.test_id)
        try:
            values[i] = entries[key]
        except KeyError:
            raise DataError(
                f"score file {path} has no entry for trial "
                f"({row.enroll_id}, {row.test_id})"
            ) from None
    return table.with_column(column, values)


def fit_znorm(table, columns):
    """Fit per-column mean and standard deviation (n-1 denominator)."""
    if len(table.rows) < 2:
        raise DataError("need at least 2 trials to fit normalisation stats")
    means = []
    sds = []
    for name in columns:
        values = table.column_values(name)
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1))
        if sd == 0.0:
            raise DataError(f"column {name!r} has zero variance; cannot normalise")
        means.append(mean)
        sds.append(sd)
    return NormStats(tuple(means), tuple(sds), tuple(columns))


def apply_znorm(table, stats, inverse=False):
    """Shift/scale every column covered by the stats (inverse undoes it)."""
    column_sets = []
    for name in stats.columns:
        idx = table.column_index(name)
        mean, sd = stats.lookup(name)
        column_sets.append((idx, mean, sd))
    rows = []
    for row in table.rows:
        scores = list(row.scores)
        for idx, mean, sd in column_sets:
            if inverse:
                scores[idx] = scores[idx] * sd + mean
            else:
                scores[idx] = (scores[idx] - mean) / sd
        rows.append(replace(row, scores=tuple(scores)))
    return ScoreTable(table.columns, tuple(rows), table.partition)


def write_canonical(table, path):
    """Write the table to the canonical tab-separated format."""
    lines = ["\t".join(CANONICAL_FIXED_HEADER + table.columns)]
    for row in table.rows:
        fields = [
            row.enroll_id,
            row.test_id,
            row.label.kind.value,
            row.label.attack_id if row.label.attack_id is not None else MISSING_FIELD,
        ]
        fields.extend(FLOAT_FORMAT % value for value in row.scores)
        lines.append("\t".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def read_canonical(path, partition=Partition.OTHER):
    """Read a canonical TSV back into a ScoreTable."""
    lines = _read_lines(path)
    if not lines or not lines[0].strip():
        raise ProtocolError("missing header line", path=path)
    header = tuple(lines[0].split("\t"))
    fixed = header[: len(CANONICAL_FIXED_HEADER)]
    if fixed != CANONICAL_FIXED_HEADER:
        raise ProtocolError(
            f"bad header: expected columns {list(CANONICAL_FIXED_HEADER)} first, "
            f"got {list(fixed)}",
            path=path,
            line=1,
        )
    columns = header[len(CANONICAL_FIXED_HEADER) :]
    rows = []
    for line_no, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != len(header):
            raise ProtocolError(
                f"expected {len(header)} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        enroll_id, test_id, label_token, attack_token = fields[:4]
        kind = _parse_label_token(label_token, path, line_no)
        attack = None if attack_token == MISSING_FIELD else attack_token
        scores = []
        for name, token in zip(columns, fields[4:]):
            try:
                value = float(token)
            except ValueError:
                raise ProtocolError(
                    f"malformed score {token!r} in column {name!r}",
                    path=path,
                    line=line_no,
                ) from None
            if not math.isfinite(value):
                raise ProtocolError(
                    f"non-finite score in column {name!r}", path=path, line=line_no
                )
            scores.append(value)
        try:
            rows.append(
                TrialRecord(enroll_id, test_id, TrialLabel(kind, attack), tuple(scores))
            )
        except DataError as exc:
            raise ProtocolError(str(exc), path=path, line=line_no) from None
    try:
        return ScoreTable(columns, tuple(rows), partition)
    except DataError as exc:
        raise ProtocolError(str(exc), path=path) from None
