import pytest
from hypothesis import given, settings, strategies as st

from mraug.dataset import FewShotSplit, compute_stats, group_by_delex, make_split, novelty
from mraug.errors import EmptyCorpus
from mraug.mr import DelexMR, UtterancePair, delexicalize, parse_mr
from mraug.synthetic import make_mr_corpus


def test_fifty_groups():
    corpus = make_mr_corpus(n_pairs=400, n_groups=80, seed=1)
    split = make_split(corpus, 50, seed=0)
    assert len(split.train) == 50
    assert len({delexicalize(p.mr) for p in split.train}) == 50


def test_single_group():
    corpus = [UtterancePair(parse_mr(f"inform(food=v{i})"), f"v{i} food") for i in range(7)]
    split = make_split(corpus, 50, seed=3)
    assert len(split.train) == 1
    assert len(split.test) == 6


def test_fewer_groups_than_k():
    corpus = make_mr_corpus(n_pairs=200, n_groups=33, seed=2)
    assert len(group_by_delex(corpus)) == 33
    assert len(make_split(corpus, 50, seed=0).train) == 33


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        make_split([], 50)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(1, 40), st.integers(1, 60), st.integers(0, 2**31))
def test_split_invariants(n_groups, extra, k, seed):
    corpus = make_mr_corpus(n_pairs=n_groups + extra, n_groups=n_groups, seed=seed % 97)
    split = make_split(corpus, k, seed)
    ids = set(split.train_ids)
    assert len(split.train) + len(split.test) == len(corpus)
    assert len(ids) == len(split.train) == min(k, len(split.groups))
    delex = [delexicalize(p.mr) for p in split.train]
    assert len(set(delex)) == len(delex)
    assert split.test == [p for i, p in enumerate(corpus) if i not in ids]
    again = make_split(corpus, k, seed)
    assert again.train_ids == split.train_ids


def test_stats_identical_content():
    pairs = [UtterancePair(parse_mr("inform(food=thai)"), "thai food is good")]
    stats = compute_stats(FewShotSplit(pairs, list(pairs)))
    assert (stats.novelty_1, stats.novelty_2, stats.novelty_3, stats.novelty_4) == (0, 0, 0, 0)


def test_stats_disjoint_vocab():
    train = [UtterancePair(parse_mr("inform(food=thai)"), "a b c d e")]
    test = [UtterancePair(parse_mr("request(area=north)"), "f g h i j")]
    stats = compute_stats(FewShotSplit(train, test))
    assert (stats.novelty_1, stats.novelty_2, stats.novelty_3, stats.novelty_4) == (1, 1, 1, 1)


def test_stats_three_pair_toy():
    # train types: {a,b,c} {ab,bc} {abc}
    # test types:  {a,b,d,e} {ab,bd} {abd} {}
    train = [UtterancePair(parse_mr("inform(x=a)"), "a b c")]
    test = [
        UtterancePair(parse_mr("inform(x=a)"), "a b d"),
        UtterancePair(parse_mr("request(y=e)"), "e"),
    ]
    stats = compute_stats(FewShotSplit(train, test))
    assert stats.novelty_1 == 0.5
    assert stats.novelty_2 == 0.5
    assert stats.novelty_3 == 1.0
    assert stats.novelty_4 == 0.0
    assert (stats.n_intents, stats.n_slots) == (2, 2)
    assert (stats.n_delex_mrs_train, stats.n_delex_mrs_test) == (1, 2)
    assert (stats.n_train, stats.n_test) == (1, 2)
    assert stats.lines()[0] == "n_intents\t2"
    assert stats.lines()[-1] == "novelty_4\t0.0000"


sentences = st.lists(st.sampled_from("a b c d e f".split()), min_size=1, max_size=8).map(" ".join)


@settings(max_examples=200, deadline=None)
@given(st.lists(sentences, max_size=5), st.lists(sentences, max_size=5), st.lists(sentences, min_size=1, max_size=5))
def test_novelty_antitone(train, more, test):
    for n in (1, 2, 3, 4):
        assert novelty(train + more, test, n) <= novelty(train, test, n)
        assert 0.0 <= novelty(train, test, n) <= 1.0


def test_delex_group_key():
    corpus = [UtterancePair(parse_mr("inform(food=a)"), "a"), UtterancePair(parse_mr("inform(food=b)"), "b")]
    assert group_by_delex(corpus) == {DelexMR.parse("inform(food)"): [0, 1]}
