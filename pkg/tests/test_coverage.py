import random
from collections import Counter

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from scoi.coverage import (
    TermPool,
    TokenBag,
    syn_set_cov,
    term_similarity,
    word_set_cov,
)
from scoi.treepoly import encode_term

from conftest import manhattan_oracle, poly_from_terms


# --- independent naive oracles ------------------------------------------------


def sim_oracle(s: dict, t: dict, measure: str) -> float:
    if measure == "normalized-manhattan":
        return 1.0 / (1.0 + manhattan_oracle(s, t))
    dot = sum(e * t.get(label, 0) for label, e in s.items())
    ns = sum(e * e for e in s.values()) ** 0.5
    nt = sum(e * e for e in t.values()) ** 0.5
    return dot / (ns * nt)


def syn_cov_oracle(x_terms: list[dict], pool_terms: list[dict], measure: str) -> float:
    total = 0.0
    for s in x_terms:
        total += max(sim_oracle(s, t, measure) for t in pool_terms)
    return total / len(x_terms)


def word_cov_oracle(x_counts: dict, pool_counts: dict) -> float:
    covered = sum(min(c, pool_counts.get(tok, 0)) for tok, c in x_counts.items())
    return covered / sum(x_counts.values())


def random_term(rng: random.Random, dim: int) -> dict:
    return {rng.randrange(dim): rng.randint(1, 3) for _ in range(rng.randint(1, 3))}


def pool_of(term_maps: list[dict], dim: int) -> TermPool:
    counter = Counter()
    for mapping in term_maps:
        counter[encode_term(mapping)] += 1
    return TermPool(counter, dim)


# --- term similarity -----------------------------------------------------------


class TestTermSimilarity:
    def test_identical_vectors(self):
        v = ((0, 1), (1, 2))
        assert term_similarity(v, v) == 1.0

    def test_disjoint_singletons(self):
        assert term_similarity(((0, 1),), ((1, 1),)) == pytest.approx(1 / 3, abs=1e-12)

    def test_parallel_vectors(self):
        s, t = ((0, 1),), ((0, 2),)
        assert term_similarity(s, t, "cosine") == 1.0
        assert term_similarity(s, t, "normalized-manhattan") == pytest.approx(0.5, abs=1e-12)

    def test_empty_vector_rejected(self):
        with pytest.raises(ValueError):
            term_similarity((), ((0, 1),))
        with pytest.raises(ValueError):
            term_similarity(((0, 1),), (), "cosine")

    def test_unknown_measure_rejected(self):
        with pytest.raises(ValueError):
            term_similarity(((0, 1),), ((0, 1),), "euclidean")

    def test_matches_oracle_on_random_pairs(self):
        rng = random.Random(0)
        for _ in range(500):
            s = random_term(rng, 5)
            t = random_term(rng, 5)
            sv = tuple(sorted(s.items()))
            tv = tuple(sorted(t.items()))
            for measure in ("normalized-manhattan", "cosine"):
                assert term_similarity(sv, tv, measure) == pytest.approx(
                    sim_oracle(s, t, measure), rel=1e-12
                )


# --- syntactic set coverage ----------------------------------------------------


class TestSynSetCov:
    def test_self_cover_is_one(self):
        x = poly_from_terms([{0: 1}, {0: 1, 1: 1}, {0: 1, 1: 1}], dim=3)
        pool = pool_of([{0: 1}, {0: 1, 1: 1}, {2: 2}], dim=3)
        assert syn_set_cov(x, pool) == 1.0

    def test_hand_case(self):
        # x = {{a}, {a, b}}, pool = {{a}}: best sims 1 and 1/2, mean 0.75.
        x = poly_from_terms([{0: 1}, {0: 1, 1: 1}], dim=2)
        pool = pool_of([{0: 1}], dim=2)
        assert syn_set_cov(x, pool) == pytest.approx(0.75, abs=1e-12)

    def test_multiplicity_respected(self):
        # A term occurring twice contributes twice to the mean.
        x = poly_from_terms([{0: 1}, {1: 1}, {1: 1}], dim=2)
        pool = pool_of([{0: 1}], dim=2)
        # sims: 1, 1/3, 1/3 -> mean 5/9
        assert syn_set_cov(x, pool) == pytest.approx(5 / 9, rel=1e-12)

    def test_empty_pool_rejected(self):
        x = poly_from_terms([{0: 1}], dim=1)
        with pytest.raises(ValueError):
            syn_set_cov(x, pool_of([], dim=1))

    def test_matches_double_loop_oracle(self):
        rng = random.Random(42)
        for _ in range(400):
            x_terms = [random_term(rng, 5) for _ in range(rng.randint(1, 10))]
            pool_terms = [random_term(rng, 5) for _ in range(rng.randint(1, 30))]
            x = poly_from_terms(x_terms, dim=5)
            pool = pool_of(pool_terms, dim=5)
            for measure in ("normalized-manhattan", "cosine"):
                assert syn_set_cov(x, pool, measure) == pytest.approx(
                    syn_cov_oracle(x_terms, pool_terms, measure), rel=1e-12
                )

    def test_monotone_under_pool_growth(self):
        rng = random.Random(17)
        for _ in range(200):
            x_terms = [random_term(rng, 4) for _ in range(rng.randint(1, 6))]
            base = [random_term(rng, 4) for _ in range(rng.randint(1, 10))]
            extra = base + [random_term(rng, 4)]
            x = poly_from_terms(x_terms, dim=4)
            for measure in ("normalized-manhattan", "cosine"):
                assert syn_set_cov(x, pool_of(extra, 4), measure) >= syn_set_cov(
                    x, pool_of(base, 4), measure
                )

    def test_bounds_normalized_manhattan(self):
        rng = random.Random(23)
        for _ in range(200):
            x = poly_from_terms([random_term(rng, 4) for _ in range(rng.randint(1, 6))], dim=4)
            pool = pool_of([random_term(rng, 4) for _ in range(rng.randint(1, 8))], dim=4)
            cov = syn_set_cov(x, pool)
            assert 0.0 < cov <= 1.0


# --- lexical set coverage --------------------------------------------------------


class TestWordSetCov:
    def test_full_cover(self):
        x = TokenBag.from_tokens(["the", "cat", "the"])
        pool = TokenBag.from_tokens(["the", "the", "cat", "dog"])
        assert word_set_cov(x, pool) == 1.0

    def test_hand_case(self):
        x = TokenBag(Counter({"the": 2, "cat": 1}))
        pool = TokenBag(Counter({"the": 1, "dog": 4}))
        assert word_set_cov(x, pool) == pytest.approx(1 / 3, abs=1e-12)

    def test_disjoint(self):
        x = TokenBag.from_tokens(["a", "b"])
        pool = TokenBag.from_tokens(["c"])
        assert word_set_cov(x, pool) == 0.0

    def test_empty_x_rejected(self):
        with pytest.raises(ValueError):
            word_set_cov(TokenBag(Counter()), TokenBag.from_tokens(["a"]))

    @settings(max_examples=300)
    @given(
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 4), min_size=1),
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 4)),
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 4)),
    )
    def test_oracle_and_monotonicity(self, x_counts, pool_counts, extra):
        x = TokenBag(Counter(x_counts))
        pool = TokenBag(Counter(pool_counts))
        assert word_set_cov(x, pool) == pytest.approx(
            word_cov_oracle(x_counts, pool_counts), rel=1e-12
        )
        bigger = Counter(pool_counts)
        bigger.update(extra)
        assert word_set_cov(x, TokenBag(bigger)) >= word_set_cov(x, pool)
        assert 0.0 <= word_set_cov(x, pool) <= 1.0

    def test_self_cover(self):
        x = TokenBag.from_tokens(["a", "a", "b"])
        pool = TokenBag.union([x, TokenBag.from_tokens(["z"])])
        assert word_set_cov(x, pool) == 1.0


class TestTermPool:
    def test_union_is_multiset_sum(self):
        a = poly_from_terms([{0: 1}, {1: 1}], dim=2)
        b = poly_from_terms([{1: 1}], dim=2)
        pool = TermPool.from_polynomials([a, b])
        assert pool.n_terms == 3
        assert pool.terms[encode_term({1: 1})] == 2
