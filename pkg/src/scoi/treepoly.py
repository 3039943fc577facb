"""Dependency trees, their polynomial fingerprints, and polynomial distance.

A sentence's dependency tree is turned into a multiset of monomial terms.
Two constructions are provided:

* ``simplified_polynomial`` -- one term per node, recording the count of each
  dependency label along the root-to-node path.  One variable per label.
* ``original_polynomial`` -- the exact expanded product form over two
  variable blocks (an ``x`` and a ``y`` variable per label).  Its term count
  can blow up combinatorially, so it runs under an explicit term budget.

Terms are stored internally as packed integers: 32 bits of exponent per
label index, so a monomial is one arbitrary-precision int and multiplying
two monomials is integer addition.  This keeps corpus-scale construction
fast (single-digit microseconds per node) while staying exact.  The packed
form is bijective as long as no exponent reaches 2**32, i.e. for any tree
with fewer than 4 billion nodes.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, MalformedTreeError, TermExplosionError, UnknownLabelError

ROOT = -1

_LABEL_BITS = 32
_LABEL_MASK = (1 << _LABEL_BITS) - 1

# Shift table shared by all vocabularies: _SHIFTS[l] == 1 << (32 * l).
_SHIFTS: list[int] = [1]


def _shifts_for(n_labels: int) -> list[int]:
    while len(_SHIFTS) < n_labels:
        _SHIFTS.append(_SHIFTS[-1] << _LABEL_BITS)
    return _SHIFTS


# A term vector: sorted tuple of (label index, exponent), exponents >= 1.
TermVector = tuple[tuple[int, int], ...]


def decode_term(key: int) -> TermVector:
    """Unpack an integer term key into sorted (label, exponent) pairs."""
    pairs = []
    label = 0
    while key:
        exp = key & _LABEL_MASK
        if exp:
            pairs.append((label, exp))
        key >>= _LABEL_BITS
        label += 1
    return tuple(pairs)


def encode_term(pairs: Iterable[tuple[int, int]] | Mapping[int, int]) -> int:
    """Pack (label, exponent) pairs into an integer term key."""
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    key = 0
    shifts = _SHIFTS
    for label, exp in items:
        if label < 0 or exp <= 0:
            raise ValueError(f"bad term entry ({label}, {exp})")
        if exp >= (1 << _LABEL_BITS):
            raise ValueError(f"exponent {exp} too large to pack")
        _shifts_for(label + 1)
        key += exp * shifts[label]
    return key


def term_degree(term: TermVector) -> int:
    """Sum of exponents; equals the node count of the encoded path."""
    return sum(e for _, e in term)


def manhattan(s: TermVector, t: TermVector) -> int:
    """L1 distance between two sparse exponent vectors."""
    dist = 0
    i = j = 0
    while i < len(s) and j < len(t):
        ls, es = s[i]
        lt, et = t[j]
        if ls == lt:
            dist += abs(es - et)
            i += 1
            j += 1
        elif ls < lt:
            dist += es
            i += 1
        else:
            dist += et
            j += 1
    for _, e in s[i:]:
        dist += e
    for _, e in t[j:]:
        dist += e
    return dist


class LabelVocabulary:
    """Ordered registry of dependency-label strings.

    Indices are assigned in first-seen order and stay stable for the
    lifetime of a corpus build.  Lookups of unseen labels are ingestion
    errors; use :meth:`add` to intern new labels while ingesting.
    """

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str] = ()):
        self.labels: list[str] = []
        self._index: dict[str, int] = {}
        for label in labels:
            self.add(label)

    def add(self, label: str) -> int:
        idx = self._index.get(label)
        if idx is None:
            idx = len(self.labels)
            self.labels.append(label)
            self._index[label] = idx
        return idx

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(f"label {label!r} not in vocabulary") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelVocabulary) and self.labels == other.labels

    def __repr__(self) -> str:
        return f"LabelVocabulary({len(self.labels)} labels)"


class DependencyTree:
    """Rooted labeled tree over one sentence's tokens.

    Nodes are 0..n-1; ``parents[i]`` is the parent index or ``ROOT`` for the
    single root.  ``labels[i]`` is the index of node i's dependency label.
    Construction validates the parent relation (exactly one root, parents in
    range, every node reachable from the root).
    """

    __slots__ = ("labels", "parents", "children", "root")

    def __init__(self, labels: Sequence[int], parents: Sequence[int]):
        n = len(labels)
        if n == 0:
            raise MalformedTreeError("tree must have at least one node")
        if len(parents) != n:
            raise MalformedTreeError("labels and parents length mismatch")
        roots = [i for i, p in enumerate(parents) if p == ROOT]
        if len(roots) != 1:
            raise MalformedTreeError(f"expected exactly one root, found {len(roots)}")
        children: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parents):
            if p == ROOT:
                continue
            if not 0 <= p < n:
                raise MalformedTreeError(f"node {i} has out-of-range parent {p}")
            children[p].append(i)
        # Reachability from the root rules out parent cycles.
        seen = 0
        stack = [roots[0]]
        while stack:
            node = stack.pop()
            seen += 1
            stack.extend(children[node])
        if seen != n:
            raise MalformedTreeError("parent relation contains a cycle")
        self.labels = list(labels)
        self.parents = list(parents)
        self.children = children
        self.root = roots[0]

    @property
    def n(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"DependencyTree(n={self.n}, root={self.root})"


class Polynomial:
    """Multiset of term vectors produced by the simplified construction.

    ``terms`` maps packed term keys to multiplicities.  ``dim`` is the label
    vocabulary size the keys were built under, which fixes the width of the
    dense views used by distance and coverage computations.
    """

    __slots__ = ("terms", "dim", "_decoded", "_dense")

    def __init__(self, terms: Counter[int], dim: int):
        self.terms = terms
        self.dim = dim
        self._decoded: tuple[tuple[TermVector, int], ...] | None = None
        self._dense: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n_terms(self) -> int:
        """Term count with multiplicity."""
        return sum(self.terms.values())

    def term_vectors(self) -> tuple[tuple[TermVector, int], ...]:
        """Decoded (term vector, multiplicity) pairs in canonical order.

        Canonical order is lexicographic over the sorted (label, exponent)
        pairs; the math is order-free but serialization and golden tests
        rely on this being stable.
        """
        if self._decoded is None:
            decoded = sorted((decode_term(k), c) for k, c in self.terms.items())
            self._decoded = tuple(decoded)
        return self._decoded

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(distinct terms as a float matrix of width dim, multiplicities)."""
        if self._dense is None:
            vectors = self.term_vectors()
            mat = np.zeros((len(vectors), self.dim), dtype=np.float64)
            counts = np.empty(len(vectors), dtype=np.float64)
            for row, (pairs, count) in enumerate(vectors):
                counts[row] = count
                for label, exp in pairs:
                    mat[row, label] = exp
            self._dense = (mat, counts)
        return self._dense

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Polynomial({self.n_terms} terms, dim={self.dim})"


class OriginalPolynomial:
    """Exact expanded polynomial over the doubled variable set.

    Keys pack exponents over ``2 * dim`` variable slots: label l's product
    variable sits at index l, its head variable at index dim + l.  Term
    multiplicities are expansion coefficients and the term count may exceed
    the node count.  ``multiplications`` / ``additions`` record the term
    operations spent building it, for the scaling harness.
    """

    __slots__ = ("terms", "dim", "multiplications", "additions")

    def __init__(self, terms: Counter[int], dim: int, multiplications: int, additions: int):
        self.terms = terms
        self.dim = dim
        self.multiplications = multiplications
        self.additions = additions

    @property
    def n_terms(self) -> int:
        return sum(self.terms.values())

    def term_vectors(self) -> tuple[tuple[TermVector, int], ...]:
        """(term vector over 2*dim variable indices, multiplicity) pairs."""
        return tuple(sorted((decode_term(k), c) for k, c in self.terms.items()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OriginalPolynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        return (
            f"OriginalPolynomial({self.n_terms} terms, dim={self.dim}, "
            f"mults={self.multiplications})"
        )


def _check_labels(tree: DependencyTree, vocab_size: int) -> None:
    if min(tree.labels) < 0 or max(tree.labels) >= vocab_size:
        bad = next(l for l in tree.labels if l < 0 or l >= vocab_size)
        raise UnknownLabelError(f"label index {bad} outside vocabulary of size {vocab_size}")


def simplified_term_counter(tree: DependencyTree, dim: int) -> Counter[int]:
    """Packed term keys of the simplified construction, with multiplicity."""
    _check_labels(tree, dim)
    shifts = _shifts_for(dim)
    labels = tree.labels
    children = tree.children
    terms = []
    append = terms.append
    stack = [(tree.root, 0)]
    pop = stack.pop
    push = stack.append
    while stack:
        node, prefix = pop()
        key = prefix + shifts[labels[node]]
        append(key)
        for child in children[node]:
            push((child, key))
    return Counter(terms)


def simplified_polynomial(tree: DependencyTree, vocab: LabelVocabulary) -> Polynomial:
    """One-variable-set polynomial: one term per root-to-node path.

    Each node contributes the term whose exponents count the dependency
    labels on the path from the root down to it, so the term count equals
    the node count.  Iterative traversal; deep chains (10k+ nodes) do not
    touch the call stack.
    """
    d = len(vocab)
    return Polynomial(simplified_term_counter(tree, d), d)


def original_polynomial(
    tree: DependencyTree, vocab: LabelVocabulary, term_budget: int = 1_000_000
) -> OriginalPolynomial:
    """Exact two-variable-set expansion, aborting past ``term_budget`` terms.

    A leaf with label l is the single term x_l; an internal node is its
    head variable y_l plus the product of its children's polynomials.
    Children are expanded left to right.  Operation accounting, used by the
    scaling harness: every pairwise product counts one multiplication per
    term-pair combination (with multiplicity); every internal node counts
    one addition per term of its finished polynomial (the cost of folding
    product terms and the y term together).

    Raises :class:`TermExplosionError` naming the offending node as soon as
    any intermediate polynomial exceeds ``term_budget`` terms (counted with
    multiplicity).
    """
    if term_budget <= 0:
        raise ValueError("term_budget must be positive")
    d = len(vocab)
    _check_labels(tree, d)
    shifts = _shifts_for(2 * d)
    labels = tree.labels
    children = tree.children

    # Post-order so every child polynomial exists before its parent needs it.
    order = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(children[node])
    order.reverse()

    polys: dict[int, Counter[int]] = {}
    sizes: dict[int, int] = {}
    multiplications = 0
    additions = 0
    for node in order:
        kids = children[node]
        if not kids:
            polys[node] = Counter({shifts[labels[node]]: 1})
            sizes[node] = 1
            continue
        acc = polys.pop(kids[0])
        acc_size = sizes.pop(kids[0])
        for kid in kids[1:]:
            factor = polys.pop(kid)
            sizes.pop(kid)
            product: Counter[int] = Counter()
            size = 0
            for key_a, coef_a in acc.items():
                for key_b, coef_b in factor.items():
                    coef = coef_a * coef_b
                    product[key_a + key_b] += coef
                    multiplications += coef
                    size += coef
                    if size > term_budget:
                        raise TermExplosionError(node, term_budget)
            acc = product
            acc_size = size
        acc[shifts[d + labels[node]]] += 1
        acc_size += 1
        if acc_size > term_budget:
            raise TermExplosionError(node, term_budget)
        additions += acc_size
        polys[node] = acc
        sizes[node] = acc_size
    return OriginalPolynomial(polys[tree.root], d, multiplications, additions)


def polynomial_distance(p: Polynomial, q: Polynomial) -> float:
    """Symmetric chamfer distance between two term multisets.

    Sum over each side's terms of the L1 distance to the nearest term on
    the other side, normalized by the total term count.  Multiplicities are
    respected on both sides.  Symmetric, zero on identical multisets; the
    triangle inequality is not guaranteed.
    """
    if not p.terms or not q.terms:
        raise ValueError("polynomial_distance requires non-empty polynomials")
    mat_p, counts_p = p.dense()
    mat_q, counts_q = q.dense()
    if p.dim != q.dim:
        width = max(p.dim, q.dim)
        mat_p = np.pad(mat_p, ((0, 0), (0, width - p.dim)))
        mat_q = np.pad(mat_q, ((0, 0), (0, width - q.dim)))
    dists = cdist(mat_p, mat_q, "cityblock")
    total = float(counts_p @ dists.min(axis=1)) + float(counts_q @ dists.min(axis=0))
    return total / (p.n_terms + q.n_terms)


# --- polynomial cache -------------------------------------------------------
#
# Line-delimited format: a JSON header carrying the format tag, version and
# the label vocabulary, then one JSON record per example:
#   [id, [[[label, exponent], ...], multiplicity], ...]
# Terms appear in canonical order, so save -> load -> save is byte-identical.

_POLY_FORMAT = "scoi-polynomials"
_POLY_VERSION = 1


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_polynomial_cache(
    path, items: Iterable[tuple[int, Polynomial]], vocab: LabelVocabulary
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": _POLY_FORMAT, "version": _POLY_VERSION, "labels": vocab.labels}
        fh.write(_dump(header) + "\n")
        for example_id, poly in items:
            record = [
                example_id,
                [[list(map(list, pairs)), count] for pairs, count in poly.term_vectors()],
            ]
            fh.write(_dump(record) + "\n")


def read_polynomial_cache(path) -> tuple[LabelVocabulary, list[tuple[int, Polynomial]]]:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != _POLY_FORMAT:
            raise DataError(f"{path}: not a polynomial cache")
        if header.get("version") != _POLY_VERSION:
            raise DataError(f"{path}: unsupported cache version {header.get('version')}")
        vocab = LabelVocabulary(header["labels"])
        dim = len(vocab)
        items = []
        for line in fh:
            example_id, raw_terms = json.loads(line)
            terms: Counter[int] = Counter()
            for pairs, count in raw_terms:
                terms[encode_term((l, e) for l, e in pairs)] += count
            items.append((example_id, Polynomial(terms, dim)))
    return vocab, items
