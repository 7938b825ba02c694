"""Shared helpers for building small trial tables in tests."""

import numpy as np
import pytest

from sasvfuse import LabelKind, ScoreTable, TrialLabel, TrialRecord


def make_table(columns, spec_rows, partition=None):
    """Build a ScoreTable from (kind, attack, scores...) tuples.

    kind is 'target' / 'nontarget' / 'spoof'; attack may be None.
    """
    rows = []
    for i, (kind, attack, *scores) in enumerate(spec_rows):
        rows.append(
            TrialRecord(
                enroll_id=f"e{i:04d}",
                test_id=f"t{i:04d}",
                label=TrialLabel(LabelKind(kind), attack),
                scores=tuple(float(s) for s in scores),
            )
        )
    if partition is None:
        return ScoreTable(tuple(columns), tuple(rows))
    return ScoreTable(tuple(columns), tuple(rows), partition)


def random_class_scores(rng, n_target, n_nontarget, n_spoof, attacks=("AX", "AY")):
    """Random labeled score rows: returns (scores array, labels list)."""
    scores = []
    labels = []
    for _ in range(n_target):
        scores.append(rng.normal(1.0, 1.0))
        labels.append(TrialLabel(LabelKind.TARGET))
    for _ in range(n_nontarget):
        scores.append(rng.normal(-1.0, 1.0))
        labels.append(TrialLabel(LabelKind.NONTARGET))
    for k in range(n_spoof):
        attack = attacks[k % len(attacks)] if attacks else None
        scores.append(rng.normal(0.0, 1.5))
        labels.append(TrialLabel(LabelKind.SPOOF, attack))
    return np.asarray(scores, dtype=np.float64), labels


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after a run."""
    import re

    best = {}
    rank = {"FAIL": 0, "SKIP": 1, "PASS": 2}
    statuses = (("failed", "FAIL"), ("error", "FAIL"), ("skipped", "SKIP"), ("passed", "PASS"))
    for status, label in statuses:
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            match = re.search(r"test_acceptance\.py::(test_criterion_(\d+)\w*)", nodeid)
            if not match:
                continue
            num = int(match.group(2))
            if num not in best or rank[label] < rank[best[num][0]]:
                best[num] = (label, match.group(1))
    if best:
        terminalreporter.write_sep("=", "acceptance criteria")
        for num in sorted(best):
            label, name = best[num]
            terminalreporter.write_line(f"[criterion {num}] {label}  {name}")
