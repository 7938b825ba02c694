"""Synthetic trial generation: allocation, determinism, distribution placement."""

import numpy as np
import pytest

from sasvfuse import (
    ClassSpec,
    ColumnDist,
    DataError,
    LabelKind,
    Partition,
    SynthConfig,
    default_sasv_scenario,
    generate_trials,
    synthesize_partitions,
)
from sasvfuse.synth import (
    attack_allocation,
    load_synth_config,
    synth_config_from_doc,
    synth_config_to_doc,
)


def small_config(seed=0, n=30):
    dists = lambda mu: {"E": ColumnDist(mu, 1.0), "A": ColumnDist(-mu, 1.0)}
    return SynthConfig(
        columns=("E", "A"),
        target=ClassSpec(n, dists(2.0)),
        nontarget=ClassSpec(n, dists(-2.0)),
        spoof=ClassSpec(n, dists(0.0), attack_mix={"A01": 0.6, "A02": 0.4}),
        seed=seed,
    )


class TestAttackAllocation:
    def test_exact_proportions(self):
        got = attack_allocation({"A01": 0.6, "A02": 0.4}, 10)
        assert got == [("A01", 6), ("A02", 4)]

    def test_largest_remainder(self):
        got = attack_allocation({"X": 0.5, "Y": 0.5}, 7)
        assert got == [("X", 4), ("Y", 3)]  # tie goes to the earlier tag

    def test_three_way_tie(self):
        got = attack_allocation({"A": 1 / 3, "B": 1 / 3, "C": 1 / 3}, 10)
        assert got == [("A", 4), ("B", 3), ("C", 3)]

    def test_sorted_tag_order(self):
        got = attack_allocation({"B2": 0.5, "A9": 0.5}, 4)
        assert [name for name, _ in got] == ["A9", "B2"]

    def test_total_conserved(self, rng):
        for _ in range(20):
            k = int(rng.integers(1, 6))
            raw = rng.random(k) + 0.05
            mix = {f"T{i:02d}": p for i, p in enumerate(raw / raw.sum())}
            total = int(rng.integers(1, 200))
            got = dict(attack_allocation(mix, total))
            assert sum(got.values()) == total
            for tag, share in mix.items():
                assert abs(got[tag] - share * total) < 1.0 + 1e-9


class TestGenerateTrials:
    def test_counts_and_layout(self):
        table = generate_trials(small_config())
        assert table.columns == ("E", "A")
        labels = table.labels()
        kinds = [k.kind for k in labels]
        assert kinds == (
            [LabelKind.TARGET] * 30 + [LabelKind.NONTARGET] * 30 + [LabelKind.SPOOF] * 30
        )
        attacks = [k.attack_id for k in labels if k.kind is LabelKind.SPOOF]
        assert attacks == ["A01"] * 18 + ["A02"] * 12

    def test_deterministic(self):
        assert generate_trials(small_config(seed=5)) == generate_trials(small_config(seed=5))

    def test_seed_changes_scores(self):
        t1 = generate_trials(small_config(seed=5))
        t2 = generate_trials(small_config(seed=6))
        assert not np.array_equal(t1.column_values("E"), t2.column_values("E"))

    def test_scores_follow_declared_distributions(self):
        dists = lambda mu: {"E": ColumnDist(mu, 1e-6)}
        config = SynthConfig(
            columns=("E",),
            target=ClassSpec(50, dists(4.0)),
            nontarget=ClassSpec(50, dists(-4.0)),
            spoof=ClassSpec(50, dists(0.5), attack_mix={"A01": 1.0}),
            seed=1,
        )
        table = generate_trials(config)
        values = table.column_values("E")
        assert np.all(np.abs(values[:50] - 4.0) < 1e-3)
        assert np.all(np.abs(values[50:100] + 4.0) < 1e-3)
        assert np.all(np.abs(values[100:] - 0.5) < 1e-3)

    def test_id_prefix(self):
        table = generate_trials(small_config(), id_prefix="xx-")
        assert table.rows[0].enroll_id.startswith("xx-e-")
        assert table.rows[0].test_id.startswith("xx-t-")


class TestPartitions:
    def test_three_partitions_differ(self):
        parts = synthesize_partitions(small_config(seed=3))
        assert set(parts) == {Partition.TRAIN, Partition.DEV, Partition.EVAL}
        train = parts[Partition.TRAIN]
        dev = parts[Partition.DEV]
        evl = parts[Partition.EVAL]
        assert train.partition is Partition.TRAIN
        assert not np.array_equal(train.column_values("E"), dev.column_values("E"))
        assert not np.array_equal(dev.column_values("E"), evl.column_values("E"))
        # ids carry the partition stamp so tables can be concatenated safely
        assert train.rows[0].enroll_id.startswith("tr-")
        assert dev.rows[0].enroll_id.startswith("de-")
        assert evl.rows[0].enroll_id.startswith("ev-")

    def test_deterministic(self):
        p1 = synthesize_partitions(small_config(seed=3))
        p2 = synthesize_partitions(small_config(seed=3))
        assert p1 == p2


class TestDefaultScenario:
    def test_shape(self):
        config = default_sasv_scenario()
        assert config.seed == 7
        assert config.columns == ("E", "A", "R")
        assert config.target.count == 1000
        assert config.nontarget.count == 1000
        assert config.spoof.count == 1000
        assert config.spoof.attack_mix == {"A01": 0.5, "A02": 0.5}

    def test_reference_separations(self):
        # E separates speakers but not spoofs; A and R do the reverse
        config = default_sasv_scenario()
        assert config.target.dists["E"].mean > 0 > config.nontarget.dists["E"].mean
        assert config.spoof.dists["E"].mean == config.target.dists["E"].mean
        assert config.target.dists["A"].mean == config.nontarget.dists["A"].mean
        assert config.spoof.dists["A"].mean < 0
        assert config.spoof.dists["R"].mean < 0


class TestConfigValidation:
    def test_attack_mix_must_sum_to_one(self):
        with pytest.raises(DataError):
            ClassSpec(10, {"E": ColumnDist(0, 1)}, attack_mix={"A01": 0.7, "A02": 0.7})

    def test_attack_mix_only_on_spoof(self):
        with pytest.raises(DataError):
            SynthConfig(
                columns=("E",),
                target=ClassSpec(5, {"E": ColumnDist(0, 1)}, attack_mix={"A01": 1.0}),
                nontarget=ClassSpec(5, {"E": ColumnDist(0, 1)}),
                spoof=ClassSpec(5, {"E": ColumnDist(0, 1)}),
            )

    def test_dists_must_cover_columns(self):
        with pytest.raises(DataError):
            SynthConfig(
                columns=("E", "A"),
                target=ClassSpec(5, {"E": ColumnDist(0, 1)}),
                nontarget=ClassSpec(5, {"E": ColumnDist(0, 1), "A": ColumnDist(0, 1)}),
                spoof=ClassSpec(5, {"E": ColumnDist(0, 1), "A": ColumnDist(0, 1)}),
            )

    def test_bad_counts_and_sds(self):
        with pytest.raises(DataError):
            ClassSpec(-1, {"E": ColumnDist(0, 1)})
        with pytest.raises(DataError):
            ColumnDist(0.0, 0.0)
        with pytest.raises(DataError):
            ColumnDist(np.nan, 1.0)


class TestConfigSerialisation:
    def test_round_trip(self):
        config = small_config(seed=12)
        assert synth_config_from_doc(synth_config_to_doc(config)) == config

    def test_load_from_file(self, tmp_path):
        import json

        config = small_config(seed=2)
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(synth_config_to_doc(config)), encoding="utf-8")
        assert load_synth_config(path) == config

    def test_generated_tables_round_trip_canonically(self, tmp_path):
        from sasvfuse import read_canonical, write_canonical

        table = generate_trials(small_config(seed=4))
        path = tmp_path / "t.tsv"
        write_canonical(table, path)
        assert read_canonical(path) == table
