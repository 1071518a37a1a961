import random

import numpy as np
import pytest

from freesolv import oracle
from freesolv.words import Word, commutator, parse, random_reduced_word, \
    random_trivial_word
from freesolv.wordproblem import (Distinguisher, LengthGuardError,
                                  SupportChain, fingerprint, nu0,
                                  refine_deterministic, refine_randomized,
                                  word_problem)
from freesolv.xdigraph import PrefixTree, quotient_by_labeling

C = commutator(parse("x1"), parse("x2"))


def prefix_forms(w, r, d):
    out = [oracle.magnus_form(Word(()), r, d)]
    for i in range(1, len(w) + 1):
        out.append(oracle.magnus_form(w.prefix(i), r, d))
    return out


def test_nu0():
    d = nu0(C)
    assert d.labels == (0,) * 5 and d.depth == 0


def test_refine_deterministic_commutator():
    nu1 = refine_deterministic(C, nu0(C))
    assert nu1.depth == 1
    assert len(set(nu1.labels)) == 4
    assert nu1.labels[0] == nu1.labels[4]
    assert nu1.says_trivial()
    nu2 = refine_deterministic(C, nu1)
    assert not nu2.says_trivial()


def test_refine_deterministic_power_word():
    w = parse("x1 x1")
    nu1 = refine_deterministic(w, nu0(w))
    assert len(set(nu1.labels)) == 3


def test_refine_labels_match_oracle_exhaustively():
    for w in oracle.reduced_words(2, 6):
        if len(w) == 0:
            continue
        nu = nu0(w)
        for d in (1, 2):
            nu = refine_deterministic(w, nu)
            forms = prefix_forms(w, 2, d)
            for i in range(len(w) + 1):
                for j in range(i, len(w) + 1):
                    assert (nu.labels[i] == nu.labels[j]) == \
                        (forms[i] == forms[j]), (w.serialize(), d, i, j)


def test_true_distinguisher_quotients_fold(rng):
    for _ in range(20):
        w = random_reduced_word(rng, rng.randrange(1, 10), 2)
        nu = refine_deterministic(w, nu0(w))
        quotient_by_labeling(PrefixTree([w]), list(nu.labels))


def test_fingerprint_increment_matches_direct(rng):
    # exact squared distances: incremental vs recomputed, 100 random pairs
    for trial in range(100):
        w = random_reduced_word(rng, rng.randrange(2, 30), 2)
        nu_prev = refine_deterministic(w, nu0(w))
        seed_rng = random.Random(trial)
        fp = fingerprint(w, nu_prev, seed_rng, cube_bound=len(w) ** 3)
        tree = PrefixTree([w])
        chain = SupportChain(tree, "det")
        chain._labels = [np.asarray(nu_prev.labels, dtype=np.int64)]
        m, eid, dirs = chain.numbering_at(0)
        assert len(fp.anchor) == m
        vec = [0] * m
        direct = [sum(a * a for a in fp.anchor)]
        nodes = tree.word_nodes[tuple(w.letters)]
        for v in nodes[1:]:
            vec[eid[v]] += int(dirs[v])
            direct.append(sum((x - a) ** 2 for x, a in zip(vec, fp.anchor)))
        assert list(fp.d2) == direct
        bound = (len(w) ** 3 + len(w)) ** 2 * len(w)
        assert all(val <= bound for val in fp.d2)


def test_increment_identity_example():
    # component at -6 stepping away from the anchor adds 2*6 + 1
    assert (-7) ** 2 - (-6) ** 2 == 13


def test_randomized_refines_coarsely(rng):
    # true label equality always implies candidate label equality
    for trial in range(40):
        w = random_reduced_word(rng, rng.randrange(2, 15), 2)
        nu1 = refine_deterministic(w, nu0(w))
        true2 = refine_deterministic(w, nu1)
        cand2 = refine_randomized(w, nu1, random.Random(trial))
        for i in range(len(w) + 1):
            for j in range(len(w) + 1):
                if true2.labels[i] == true2.labels[j]:
                    assert cand2.labels[i] == cand2.labels[j]


def test_word_problem_examples():
    assert word_problem(C, 2, 1)
    assert not word_problem(C, 2, 2)
    big = commutator(commutator(parse("x1"), parse("x2")),
                     commutator(parse("x3"), parse("x4")))
    assert word_problem(big, 4, 2)
    assert word_problem(Word(()), 2, 3)
    assert word_problem(parse("x1 x2"), 2, 0)


def test_word_problem_matches_oracle_sampled(rng):
    for _ in range(300):
        w = random_reduced_word(rng, rng.randrange(0, 9), 2)
        for d in (1, 2):
            assert word_problem(w, 2, d) == oracle.is_trivial(w, 2, d)


def test_short_words_never_trivial():
    # no nonempty relator shorter than 3^d
    for w in oracle.reduced_words(2, 8):
        if len(w) == 0:
            continue
        if len(w) < 9:
            assert not word_problem(w, 2, 2)
        if len(w) < 3:
            assert not word_problem(w, 2, 1)


def test_mc_false_biased(rng):
    # trivial words always come back True, whatever the seed
    for trial in range(30):
        w = random_trivial_word(rng, 2, 2)
        for seed in range(20):
            assert word_problem(w, 2, 2, mode="mc", rng=random.Random(seed))


def test_mc_agreement_rate(rng):
    n, agree = 200, 0
    for trial in range(n):
        w = random_reduced_word(rng, 40, 2)
        det = word_problem(w, 2, 2)
        mc = word_problem(w, 2, 2, mode="mc", rng=random.Random(trial))
        agree += (det == mc)
    # bound 1 - log3(40)/40 is about 0.916; exact collisions are far rarer
    assert agree / n >= 0.95


def test_mc_seed_determinism():
    w = random_reduced_word(random.Random(5), 60, 2)
    runs = {word_problem(w, 2, 2, mode="mc", rng=random.Random(99))
            for _ in range(5)}
    assert len(runs) == 1


def test_cube_bound_override(rng):
    w = random_reduced_word(rng, 30, 2)
    assert word_problem(w, 2, 2, mode="mc", rng=random.Random(1),
                        cube_bound=len(w) ** 4) == word_problem(w, 2, 2)


def test_length_guard():
    w = Word((1, 2) * 20, rank=2)
    with pytest.raises(LengthGuardError):
        word_problem(w, 2, 2, max_len=10)


def test_distinguisher_validation():
    with pytest.raises(ValueError):
        Distinguisher(C, 0, (0, 0))


def test_batched_and_tuple_paths_agree(rng):
    import freesolv.wordproblem as wp
    for _ in range(10):
        w = random_reduced_word(rng, rng.randrange(20, 120), 2)
        chains = []
        old = wp._TUPLE_PATH_MAX
        try:
            for forced in (10 ** 9, 0):
                wp._TUPLE_PATH_MAX = forced
                chain = SupportChain(PrefixTree([w]), "det")
                chains.append(chain.labels_at(2))
        finally:
            wp._TUPLE_PATH_MAX = old
        assert np.array_equal(chains[0], chains[1])
