"""
Keywords and retrieval
======================

Rank in-domain n-grams by TF-IDF against a background pool, then pull every
pool utterance that contains one of the top phrases.
"""

from mraug.keywords import extract_keywords
from mraug.retrieval import ingest_pool, retrieve
from mraug.synthetic import make_planted_domain

# a small synthetic restaurant domain hidden in a pool of chatter
planted = make_planted_domain(n_relevant=200, n_irrelevant=200, n_background=600, seed=0)
pool = ingest_pool(planted.pool_lines)
print(f"pool: {len(pool)} utterances, {len(pool.index)} indexed n-grams")

# the pool doubles as the background corpus; document frequencies come
# straight from the postings lists
keywords = extract_keywords(planted.in_domain, pool, max_keywords=30)
for k in keywords[:10]:
    print(f"  {k.text:30s} {k.tfidf:.3f}  (x{k.freq_in_domain} in domain)")

candidates = retrieve(pool, keywords)
hit = len(set(candidates.ids) & planted.relevant_ids)
print(f"candidates: {len(candidates)} (relevant among them: {hit}/{len(planted.relevant_ids)})")

# every candidate remembers which phrases matched it
uid = candidates.ids[0]
print(pool.sources[uid], "<-", candidates.matched_keywords[uid])
