"""
Synthetic MR labels
===================

Filtered utterances carry no meaning representation yet. A slot lexicon and
a nearest-centroid intent model, both fitted on the few in-domain pairs,
supply one.
"""

from mraug.mr import format_pair
from mraug.nlu import annotate, build_lexicon, evaluate_nlu, predict, train_intent_model
from mraug.synthetic import make_planted_domain

planted = make_planted_domain(seed=2)
lexicon = build_lexicon(planted.train_pairs)
model = train_intent_model(planted.train_pairs)
print(f"lexicon: {len(lexicon)} values over keys {sorted(lexicon.inventory)}")
print(f"intents: {model.intents}")

ids = sorted(planted.relevant_ids)[:500]
texts = [planted.pool_lines[i] for i in ids]

# one prediction in detail
p = predict(texts[0], lexicon, model)
print(texts[0])
print(f"  -> {p.to_mr()}  (confidence {p.confidence:.2f}, spans {[s[2] for s in p.slots]})")

# the annotated pairs, in the same format as the training file
augmented = annotate(texts, lexicon, model)
for pair in augmented[:3]:
    print(format_pair(pair))

gold = [planted.gold[i] for i in ids]
print("intent+slot P/R/F1: %.3f %.3f %.3f" % evaluate_nlu([a.mr for a in augmented], gold))
print("slot-only  P/R/F1: %.3f %.3f %.3f" % evaluate_nlu([a.mr for a in augmented], gold, include_intent=False))
