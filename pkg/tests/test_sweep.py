from __future__ import annotations

import math

import pytest

from formattack.extract import BaselineExtractor
from formattack.sweep import SweepPlan, chain_name, enumerate_chains, run_sweep
from formattack.synth import invoice_field_configs, synth_corpus
from formattack.transforms import SWEEP_NAMES


class TestEnumerate:
    def test_counts(self):
        assert len(enumerate_chains(SweepPlan(k=2))) == 91
        assert len(enumerate_chains(SweepPlan(k=3))) == 364
        assert len(enumerate_chains(SweepPlan(k=1))) == 14

    def test_counts_match_binomial(self):
        for k in range(1, 15):
            assert len(enumerate_chains(SweepPlan(k=k))) == math.comb(14, k)

    def test_lexicographic_registry_order(self):
        chains = enumerate_chains(SweepPlan(k=2))
        names = [tuple(s.name for s in chain) for chain in chains]
        index = {name: i for i, name in enumerate(SWEEP_NAMES)}
        as_indices = [tuple(index[n] for n in pair) for pair in names]
        assert as_indices == sorted(as_indices)
        assert names[0] == ("center_shift", "box_stretch")

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            enumerate_chains(SweepPlan(k=0))
        with pytest.raises(ValueError):
            enumerate_chains(SweepPlan(k=15))

    def test_param_overrides_applied(self):
        plan = SweepPlan(k=1, params={"bg_drop": {"drop_prob": 0.13}})
        chains = enumerate_chains(plan)
        spec = next(s for (s,) in chains if s.name == "bg_drop")
        assert spec.params["drop_prob"] == 0.13

    def test_unknown_param_transform_rejected(self):
        with pytest.raises(ValueError):
            enumerate_chains(SweepPlan(k=1, params={"value_location_augment_star": {}}))


class CountingExtractor(BaselineExtractor):
    def __init__(self, fields):
        super().__init__(fields)
        self.calls = 0

    def extract(self, doc):
        self.calls += 1
        return super().extract(doc)


class TestRunSweep:
    def setup_method(self):
        self.docs = synth_corpus("invoice", 6, seed=42)
        self.fields = invoice_field_configs()
        self.names = [f.name for f in self.fields]

    def test_k1_complete_and_finite(self):
        plan = SweepPlan(k=1, seed=42)
        extractor = BaselineExtractor(self.fields)
        report = run_sweep(plan, self.docs, extractor, self.names)
        assert len(report.chains) == 14
        for chain in report.chains:
            assert 0.0 <= chain.score.macro_f1 <= 1.0

    def test_deterministic_reports(self):
        plan = SweepPlan(k=1, seed=7)
        a = run_sweep(plan, self.docs, BaselineExtractor(self.fields), self.names)
        b = run_sweep(plan, self.docs, BaselineExtractor(self.fields), self.names)
        assert a.to_json() == b.to_json()

    def test_cache_skips_extractor_calls(self, tmp_path):
        plan = SweepPlan(k=1, seed=7, cache_dir=str(tmp_path / "cache"))
        first = CountingExtractor(self.fields)
        report1 = run_sweep(plan, self.docs, first, self.names, extractor_id="baseline")
        assert first.calls == len(self.docs) * (14 + 1)

        second = CountingExtractor(self.fields)
        report2 = run_sweep(plan, self.docs, second, self.names, extractor_id="baseline")
        # only the original (uncached) evaluation runs the extractor again
        assert second.calls == len(self.docs)
        assert report1.to_json() == report2.to_json()

    def test_cache_invalidated_by_seed(self, tmp_path):
        plan = SweepPlan(k=1, seed=7, cache_dir=str(tmp_path / "cache"))
        run_sweep(plan, self.docs, BaselineExtractor(self.fields), self.names)
        other = SweepPlan(k=1, seed=8, cache_dir=str(tmp_path / "cache"))
        counting = CountingExtractor(self.fields)
        run_sweep(other, self.docs, counting, self.names)
        assert counting.calls == len(self.docs) * (14 + 1)

    def test_report_row_count_is_chains_plus_original(self):
        plan = SweepPlan(k=1, seed=3)
        report = run_sweep(plan, self.docs, BaselineExtractor(self.fields), self.names)
        table_lines = report.to_table().strip().splitlines()
        assert len(table_lines) == 1 + 1 + 14

    def test_parallel_matches_serial(self):
        serial = run_sweep(
            SweepPlan(k=1, seed=5), self.docs, BaselineExtractor(self.fields), self.names
        )
        parallel = run_sweep(
            SweepPlan(k=1, seed=5, n_jobs=4), self.docs, BaselineExtractor(self.fields), self.names
        )
        assert serial.to_json() == parallel.to_json()

    def test_chain_name(self):
        chains = enumerate_chains(SweepPlan(k=2))
        assert chain_name(chains[0]) == "center_shift+box_stretch"
