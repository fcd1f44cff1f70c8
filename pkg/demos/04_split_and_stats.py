"""
Few-shot splits
===============

Group a corpus by delexicalized MR, take one pair from each of 50 random
groups for training and leave the rest for testing.
"""

from mraug.dataset import compute_stats, make_split
from mraug.mr import delexicalize
from mraug.synthetic import make_mr_corpus

corpus = make_mr_corpus(n_pairs=600, n_groups=120, seed=0)
split = make_split(corpus, k_groups=50, seed=0)
print(f"{len(split.groups)} groups -> {len(split.train)} train / {len(split.test)} test")

# each training pair comes from a different group
for pair in split.train[:5]:
    print(f"  {str(delexicalize(pair.mr)):40s} {pair.utterance}")

# the test set is mostly made of n-grams never seen in training
stats = compute_stats(split)
print("\n".join(stats.lines()))

# a corpus with fewer groups than k simply uses them all
small = make_split(make_mr_corpus(n_pairs=100, n_groups=33, seed=0), k_groups=50)
print(f"33 groups -> {len(small.train)} training pairs")
