import numpy as np
import pytest

from litmine.dense import HashedEmbeddingProvider, build_store
from litmine.errors import InvalidInputError
from litmine.fusion import (
    FusionConfig,
    fuse,
    minmax_normalize,
    retrieve,
    threshold_filter,
)
from litmine.sparse import build_index

from conftest import make_doc


def random_score_table(rng, n_docs=12):
    docs = [f"d{i:02d}" for i in range(n_docs)]
    bm25 = [(d, rng.uniform(0, 8)) for d in docs if rng.random() > 0.25]
    dense = [(d, rng.uniform(0, 1)) for d in docs]
    return bm25, dense


class TestThresholdFilter:
    def test_boundary_is_inclusive(self):
        scored = [("a", 3.0), ("b", 2.77), ("c", 2.5)]
        assert threshold_filter(scored, 2.77) == [("a", 3.0), ("b", 2.77)]

    def test_very_low_threshold_is_identity(self):
        scored = [("a", 3.0), ("b", -1.0)]
        assert threshold_filter(scored, -1e18) == scored

    def test_all_below(self):
        assert threshold_filter([("a", 1.0)], 5.0) == []


class TestMinmaxNormalize:
    def test_three_values(self):
        out = minmax_normalize([2.77, 5.0, 10.0])
        assert out[0] == 0.0
        assert out[1] == pytest.approx((5.0 - 2.77) / (10.0 - 2.77), abs=1e-12)
        assert out[2] == 1.0

    def test_single_value(self):
        assert minmax_normalize([4.2]) == [1.0]

    def test_all_equal(self):
        assert minmax_normalize([7.0, 7.0, 7.0]) == [1.0, 1.0, 1.0]

    def test_empty(self):
        assert minmax_normalize([]) == []


class TestFuse:
    def test_union_of_survivors(self):
        bm25 = [("d1", 5.0), ("d2", 4.0), ("d3", 0.5)]
        dense = [("d2", 0.95), ("d3", 0.9), ("d1", 0.2)]
        cfg = FusionConfig(bm25_threshold=1.0, cosine_threshold=0.5, strategy="union")
        fused = fuse(bm25, dense, cfg)
        assert {c.doc_id for c in fused} == {"d1", "d2", "d3"}

    def test_sparse_only_uses_bm25_norm_as_aggregate(self):
        bm25 = [("d1", 5.0), ("d2", 4.0), ("d3", 3.0)]
        dense = [("d1", 0.9), ("d2", 0.8), ("d3", 0.7)]
        cfg = FusionConfig(bm25_threshold=3.5, cosine_threshold=0.0, strategy="sparse_only")
        fused = fuse(bm25, dense, cfg)
        assert [c.doc_id for c in fused] == ["d1", "d2"]
        for c in fused:
            assert c.aggregated == c.bm25_norm
            assert c.cosine_norm == 0.0

    def test_top_k_cut_exact(self, rng):
        bm25 = [(f"d{i:02d}", 100.0 - i) for i in range(25)]
        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.0, strategy="sparse_only", top_k=20)
        fused = fuse(bm25, [], cfg)
        assert len(fused) == 20
        assert [c.doc_id for c in fused] == [f"d{i:02d}" for i in range(20)]

    def test_missing_arm_score_defaults_to_zero(self):
        bm25 = [("lonely", 4.0)]
        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.9, strategy="union")
        fused = fuse(bm25, [], cfg)
        assert fused[0].cosine_raw == 0.0
        assert fused[0].passed_bm25 and not fused[0].passed_cosine

    def test_aggregate_is_sum_of_norms(self, rng):
        bm25, dense = random_score_table(rng)
        cfg = FusionConfig(bm25_threshold=2.0, cosine_threshold=0.3, strategy="union")
        for c in fuse(bm25, dense, cfg):
            assert c.aggregated == pytest.approx(c.bm25_norm + c.cosine_norm, abs=1e-12)
            assert c.passed_bm25 or c.passed_cosine

    def test_weight_hook(self):
        bm25 = [("d1", 5.0), ("d2", 1.0)]
        dense = [("d1", 0.1), ("d2", 0.9)]
        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.0, strategy="union",
                           w_bm25=0.0, w_cos=2.0)
        fused = fuse(bm25, dense, cfg)
        assert fused[0].doc_id == "d2"
        assert fused[0].aggregated == pytest.approx(2.0 * fused[0].cosine_norm)

    def test_union_superset_property(self, rng):
        for _ in range(100):
            bm25, dense = random_score_table(rng)
            tb, tc = rng.uniform(0, 8), rng.uniform(0, 1)
            base = dict(bm25_threshold=tb, cosine_threshold=tc, top_k=1000)
            union = {c.doc_id for c in fuse(bm25, dense, FusionConfig(strategy="union", **base))}
            sparse = {c.doc_id for c in fuse(bm25, dense, FusionConfig(strategy="sparse_only", **base))}
            dense_set = {c.doc_id for c in fuse(bm25, dense, FusionConfig(strategy="dense_only", **base))}
            assert union >= sparse
            assert union >= dense_set
            for c in fuse(bm25, dense, FusionConfig(strategy="union", **base)):
                assert 0.0 <= c.bm25_norm <= 1.0
                assert 0.0 <= c.cosine_norm <= 1.0
                assert 0.0 <= c.aggregated <= 2.0

    def test_scale_invariance_of_ordering(self, rng):
        for _ in range(50):
            bm25, dense = random_score_table(rng)
            tb, tc = rng.uniform(0, 4), rng.uniform(0, 0.8)
            scale = rng.choice([0.01, 0.5, 7.0, 1234.5])
            cfg = FusionConfig(bm25_threshold=tb, cosine_threshold=tc, strategy="union", top_k=1000)
            scaled_cfg = FusionConfig(bm25_threshold=tb * scale, cosine_threshold=tc,
                                      strategy="union", top_k=1000)
            baseline = fuse(bm25, dense, cfg)
            scaled = fuse([(d, s * scale) for d, s in bm25], dense, scaled_cfg)
            assert [c.doc_id for c in baseline] == [c.doc_id for c in scaled]
            for a, b in zip(baseline, scaled):
                assert a.aggregated == pytest.approx(b.aggregated, abs=1e-9)

    def test_determinism(self, rng):
        bm25, dense = random_score_table(rng)
        cfg = FusionConfig(bm25_threshold=1.0, cosine_threshold=0.2)
        assert fuse(bm25, dense, cfg) == fuse(list(bm25), list(dense), cfg)

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            FusionConfig(top_k=0)
        with pytest.raises(InvalidInputError):
            FusionConfig(bm25_threshold=float("nan"))
        with pytest.raises(InvalidInputError):
            FusionConfig(strategy="both")


class TestRetrieve:
    @pytest.fixture
    def artifacts(self):
        docs = [
            make_doc("d1", "covid vaccine efficacy study"),
            make_doc("d2", "influenza vaccine trial"),
            make_doc("d3", "economic impact of lockdowns"),
            make_doc("d4", "covid transmission in schools"),
            make_doc("d5", "protein folding simulation"),
        ]
        provider = HashedEmbeddingProvider(64)
        return docs, build_index(docs), build_store(docs, provider), provider

    def test_exact_abstract_query_ranks_first(self, artifacts):
        docs, index, store, provider = artifacts
        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.0)
        result = retrieve("covid vaccine efficacy study", index, store, provider, cfg)
        assert result.candidates[0].doc_id == "d1"
        assert not result.warnings

    def test_no_signal_query_empty(self, artifacts):
        _, index, store, provider = artifacts
        cfg = FusionConfig(bm25_threshold=0.5, cosine_threshold=0.2)
        result = retrieve("zzzz qqqq", index, store, provider, cfg)
        assert result.candidates == []

    def test_thresholds_above_everything_empty(self, artifacts):
        _, index, store, provider = artifacts
        cfg = FusionConfig(bm25_threshold=1e6, cosine_threshold=1.5)
        assert retrieve("covid vaccine", index, store, provider, cfg).candidates == []

    def test_provider_failure_falls_back_to_sparse(self, artifacts):
        _, index, store, _ = artifacts

        class Flaky:
            dimension = store.dimension
            provider_id = "flaky"

            def embed(self, text):
                from litmine.errors import ProviderError

                raise ProviderError("embedding service down")

        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.0)
        result = retrieve("covid vaccine", index, store, Flaky(), cfg)
        assert result.warnings
        assert result.diagnostics["strategy"] == "sparse_only"
        assert result.candidates  # sparse arm still answers

    def test_missing_store_falls_back(self, artifacts):
        _, index, _, _ = artifacts
        cfg = FusionConfig(bm25_threshold=0.0, cosine_threshold=0.0)
        result = retrieve("covid vaccine", index, None, None, cfg)
        assert result.warnings
        assert result.candidates
