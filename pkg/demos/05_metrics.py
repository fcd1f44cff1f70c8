"""
Metrics
=======

Slot error rate and BLEU for generated text; coverage, novelty and
perplexity for an augmented data set.
"""

import math

from mraug.metrics import (
    corpus_bleu, intrinsic_report, lm_perplexity, slot_error_rate,
)
from mraug.mr import UtterancePair, parse_mr
from mraug.nlu import build_lexicon

# ERR = (missing + redundant) / slots
mr = parse_mr("inform(name=hymenaios 74;type=television;ecorating=a+;family=l2;hasusbport=false)")
text = "the hymenaios 74 is a television in the l2 family , hasusbport false"
b = slot_error_rate(mr, text)
print(f"missing={b.missing} redundant={b.redundant} err={b.err}")

# a realization that mentions a value the MR does not ask for
lex = build_lexicon([UtterancePair(parse_mr("inform(area=north)"), "north"),
                     UtterancePair(parse_mr("inform(area=south)"), "south")])
b = slot_error_rate(parse_mr("inform(area=north)"), "north or south ?", lex)
print(f"redundant example: err={b.err}")

# a short hypothesis pays the brevity penalty
print(corpus_bleu(["the cat sat"], [["the cat sat on the mat"]]), math.exp(-1))

# add-k trigram perplexity, with unknown words mapped to <unk>
train = ["the food is good", "the food is cheap", "the price is high"]
print(lm_perplexity(train, ["the food is high"]), lm_perplexity(train, ["zebra quantum lamp"]))

# the full intrinsic report for an augmented set against a test set
test = [UtterancePair(parse_mr("inform(food=thai;area=north)"), "thai food in the north"),
        UtterancePair(parse_mr("request(price=cheap)"), "is it cheap ?")]
aug = [UtterancePair(parse_mr("inform(food=indian;area=south)"), "indian food down south"),
       UtterancePair(parse_mr("inform(price=cheap)"), "it is a cheap place")]
for k, v in intrinsic_report(aug, test).items():
    print(f"  {k:12s} {v:.4f}")
