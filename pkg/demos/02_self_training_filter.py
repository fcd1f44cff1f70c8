"""
Self-training filter
====================

Keyword retrieval is noisy. A binary classifier bootstrapped from the
in-domain utterances separates the relevant candidates from the rest.
"""

from mraug.retrieval import CandidateSet, ingest_pool
from mraug.selftrain import FilterConfig, run_self_training
from mraug.synthetic import make_planted_domain

planted = make_planted_domain(seed=1)
pool = ingest_pool(planted.pool_lines)
candidates = CandidateSet(tuple(sorted(planted.candidate_ids)))


# watch the positive and negative sets evolve
def show(iteration, positives, negatives):
    print(f"iteration {iteration}: |E+|={len(positives)} |E-|={len(negatives)}")


cfg = FilterConfig(sigma_plus=0.99, sigma_minus=0.5, sigma=0.5, lambda1=10, lambda2=5, rng_seed=0)
filtered, report = run_self_training(planted.in_domain, candidates, pool, cfg=cfg, on_iteration=show)

kept = set(report.kept_ids)
tp = len(kept & planted.relevant_ids)
print(f"kept {len(kept)} of {len(candidates)}; precision {tp / len(kept):.3f}, recall {tp / len(planted.relevant_ids):.3f}")
print("\n".join(report.lines()))

# a few of the survivors
for text in filtered[:3]:
    print("  ", text)
