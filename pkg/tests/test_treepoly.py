import random
from collections import Counter

import pytest
from hypothesis import given, settings

from scoi.errors import MalformedTreeError, TermExplosionError, UnknownLabelError
from scoi.treepoly import (
    DependencyTree,
    decode_term,
    encode_term,
    manhattan,
    original_polynomial,
    polynomial_distance,
    read_polynomial_cache,
    simplified_polynomial,
    write_polynomial_cache,
)

from conftest import (
    chamfer_distance_oracle,
    make_tree,
    make_vocab,
    node_depths,
    original_expansion_oracle,
    path_term_oracle,
    poly_from_terms,
    random_recursive_tree,
    tree_strategy,
)


def decoded_counter(poly) -> Counter:
    return Counter(dict(poly.term_vectors()))


class TestTermEncoding:
    def test_round_trip(self):
        pairs = ((0, 2), (3, 5), (44, 1))
        assert decode_term(encode_term(pairs)) == pairs

    def test_multiplication_is_addition(self):
        a = encode_term({0: 1, 2: 3})
        b = encode_term({2: 1, 5: 2})
        assert decode_term(a + b) == ((0, 1), (2, 4), (5, 2))

    def test_manhattan(self):
        assert manhattan(((0, 1),), ((1, 1),)) == 2
        assert manhattan(((0, 1), (1, 2)), ((0, 1), (1, 2))) == 0
        assert manhattan(((0, 3),), ((0, 1), (4, 2))) == 4

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            encode_term({0: 0})
        with pytest.raises(ValueError):
            encode_term({-1: 1})


class TestDependencyTree:
    def test_requires_single_root(self):
        with pytest.raises(MalformedTreeError):
            make_tree([0, 0], [-1, -1])
        with pytest.raises(MalformedTreeError):
            make_tree([0, 0], [1, 0])

    def test_rejects_cycle(self):
        # Node 1 and 2 point at each other; only node 0 hangs off the root.
        with pytest.raises(MalformedTreeError):
            make_tree([0, 0, 0], [-1, 2, 1])

    def test_rejects_out_of_range_parent(self):
        with pytest.raises(MalformedTreeError):
            make_tree([0, 0], [-1, 5])

    def test_children_lists(self):
        tree = make_tree([0, 1, 1], [-1, 0, 0])
        assert tree.children[0] == [1, 2]
        assert tree.root == 0


class TestSimplifiedPolynomial:
    def test_single_node(self):
        vocab = make_vocab(3)
        poly = simplified_polynomial(make_tree([2], [-1]), vocab)
        assert decoded_counter(poly) == Counter({((2, 1),): 1})

    def test_root_with_one_child(self):
        # root labeled a=0 with one child labeled b=1: paths [a] and [a, b]
        vocab = make_vocab(2)
        poly = simplified_polynomial(make_tree([0, 1], [-1, 0]), vocab)
        assert decoded_counter(poly) == Counter({((0, 1),): 1, ((0, 1), (1, 1)): 1})

    def test_repeated_paths_get_multiplicity(self):
        # Two identical children under the root collapse to one term, count 2.
        vocab = make_vocab(2)
        poly = simplified_polynomial(make_tree([0, 1, 1], [-1, 0, 0]), vocab)
        assert decoded_counter(poly) == Counter({((0, 1),): 1, ((0, 1), (1, 1)): 2})
        assert poly.n_terms == 3

    @settings(max_examples=300)
    @given(tree_strategy(max_nodes=12, max_labels=4))
    def test_matches_path_oracle(self, tree):
        poly = simplified_polynomial(tree, make_vocab(4))
        assert decoded_counter(poly) == path_term_oracle(tree)

    @settings(max_examples=300)
    @given(tree_strategy(max_nodes=30, max_labels=5))
    def test_term_count_equals_node_count(self, tree):
        poly = simplified_polynomial(tree, make_vocab(5))
        assert poly.n_terms == tree.n

    @settings(max_examples=200)
    @given(tree_strategy(max_nodes=20, max_labels=4))
    def test_depth_consistency(self, tree):
        # Exponent sums enumerate path lengths; the max is the tree height.
        poly = simplified_polynomial(tree, make_vocab(4))
        depths = sorted(node_depths(tree))
        degrees = sorted(
            sum(e for _, e in pairs)
            for pairs, count in poly.term_vectors()
            for _ in range(count)
        )
        assert degrees == depths

    def test_deep_chain_has_no_recursion_limit(self):
        n = 12_000
        labels = [i % 7 for i in range(n)]
        parents = [-1] + list(range(n - 1))
        poly = simplified_polynomial(DependencyTree(labels, parents), make_vocab(7))
        assert poly.n_terms == n

    def test_unknown_label_rejected(self):
        with pytest.raises(UnknownLabelError):
            simplified_polynomial(make_tree([5], [-1]), make_vocab(2))


class TestOriginalPolynomial:
    def test_single_leaf(self):
        vocab = make_vocab(3)
        poly = original_polynomial(make_tree([1], [-1]), vocab)
        assert Counter(dict(poly.term_vectors())) == Counter({((1, 1),): 1})

    def test_root_with_two_leaves(self):
        # Root a=0 with leaf children b=1, c=2: y_a + x_b * x_c.
        vocab = make_vocab(3)
        poly = original_polynomial(make_tree([0, 1, 2], [-1, 0, 0]), vocab)
        expected = Counter({((3, 1),): 1, ((1, 1), (2, 1)): 1})
        assert Counter(dict(poly.term_vectors())) == expected

    def test_coefficients_from_identical_subtrees(self):
        # Two identical internal children produce a squared factor with a
        # cross-term coefficient of 2.
        vocab = make_vocab(2)
        tree = make_tree([0, 1, 0, 1, 0], [-1, 0, 1, 0, 3])
        poly = original_polynomial(tree, vocab)
        oracle = original_expansion_oracle(tree, 2)
        assert Counter(dict(poly.term_vectors())) == oracle

    @settings(max_examples=200)
    @given(tree_strategy(max_nodes=9, max_labels=3))
    def test_matches_expansion_oracle(self, tree):
        poly = original_polynomial(tree, make_vocab(3))
        assert Counter(dict(poly.term_vectors())) == original_expansion_oracle(tree, 3)

    def test_adversarial_family_small_case(self):
        from scoi.bench import family_tree

        tree, vocab = family_tree(q=2, t=2)
        assert tree.n == 11
        poly = original_polynomial(tree, vocab)
        assert Counter(dict(poly.term_vectors())) == original_expansion_oracle(tree, len(vocab))

    def test_budget_abort_names_node(self):
        from scoi.bench import family_tree

        tree, vocab = family_tree(q=2, t=8)
        with pytest.raises(TermExplosionError) as err:
            original_polynomial(tree, vocab, term_budget=50)
        assert 0 <= err.value.node < tree.n
        assert err.value.budget == 50

    def test_counts_multiplications(self):
        # Root with two leaf children: one term-pair multiplication.
        vocab = make_vocab(3)
        poly = original_polynomial(make_tree([0, 1, 2], [-1, 0, 0]), vocab)
        assert poly.multiplications == 1
        assert poly.additions == 2

    def test_rejects_nonpositive_budget(self):
        with pytest.raises(ValueError):
            original_polynomial(make_tree([0], [-1]), make_vocab(1), term_budget=0)

    def test_deep_chain_is_stack_safe(self):
        # Chains never multiply, so the exact expansion stays linear in both
        # terms and work; only stack discipline is at risk here.
        n = 10_000
        labels = [i % 5 for i in range(n)]
        parents = [-1] + list(range(n - 1))
        poly = original_polynomial(DependencyTree(labels, parents), make_vocab(5))
        assert poly.n_terms == n
        assert poly.multiplications == 0


class TestPolynomialDistance:
    def test_identity(self):
        rng = random.Random(7)
        for _ in range(20):
            tree = random_recursive_tree(rng, rng.randint(1, 15), 4)
            poly = simplified_polynomial(tree, make_vocab(4))
            assert polynomial_distance(poly, poly) == 0.0

    def test_hand_case(self):
        p = poly_from_terms([{0: 1}], dim=2)
        q = poly_from_terms([{1: 1}], dim=2)
        assert polynomial_distance(p, q) == pytest.approx(2.0, abs=1e-12)

    def test_symmetry(self):
        rng = random.Random(11)
        for _ in range(50):
            ta = random_recursive_tree(rng, rng.randint(1, 10), 3)
            tb = random_recursive_tree(rng, rng.randint(1, 10), 3)
            pa = simplified_polynomial(ta, make_vocab(3))
            pb = simplified_polynomial(tb, make_vocab(3))
            assert polynomial_distance(pa, pb) == pytest.approx(
                polynomial_distance(pb, pa), abs=1e-12
            )

    def test_matches_brute_force(self):
        rng = random.Random(3)
        for _ in range(200):
            p = poly_from_terms(
                [
                    {rng.randrange(4): rng.randint(1, 3) for _ in range(rng.randint(1, 3))}
                    for _ in range(rng.randint(1, 8))
                ],
                dim=4,
            )
            q = poly_from_terms(
                [
                    {rng.randrange(4): rng.randint(1, 3) for _ in range(rng.randint(1, 3))}
                    for _ in range(rng.randint(1, 8))
                ],
                dim=4,
            )
            assert polynomial_distance(p, q) == pytest.approx(
                chamfer_distance_oracle(p, q), rel=1e-12
            )

    def test_empty_rejected(self):
        p = poly_from_terms([{0: 1}], dim=1)
        empty = poly_from_terms([], dim=1)
        with pytest.raises(ValueError):
            polynomial_distance(p, empty)
        with pytest.raises(ValueError):
            polynomial_distance(empty, p)


class TestPolynomialCache:
    def test_round_trip_equals_recomputation(self, tmp_path):
        rng = random.Random(5)
        vocab = make_vocab(6)
        items = []
        for i in range(40):
            tree = random_recursive_tree(rng, rng.randint(1, 30), 6)
            items.append((i, simplified_polynomial(tree, vocab)))
        path = tmp_path / "poly.jsonl"
        write_polynomial_cache(path, items, vocab)
        loaded_vocab, loaded = read_polynomial_cache(path)
        assert loaded_vocab.labels == vocab.labels
        assert [(i, p.terms) for i, p in loaded] == [(i, p.terms) for i, p in items]

    def test_save_load_save_is_byte_identical(self, tmp_path):
        rng = random.Random(9)
        vocab = make_vocab(4)
        items = [
            (i, simplified_polynomial(random_recursive_tree(rng, rng.randint(1, 12), 4), vocab))
            for i in range(10)
        ]
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        write_polynomial_cache(first, items, vocab)
        loaded_vocab, loaded = read_polynomial_cache(first)
        write_polynomial_cache(second, loaded, loaded_vocab)
        assert first.read_bytes() == second.read_bytes()

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "bogus.jsonl"
        path.write_text('{"format":"something-else","version":1,"labels":[]}\n')
        from scoi.errors import DataError

        with pytest.raises(DataError):
            read_polynomial_cache(path)
