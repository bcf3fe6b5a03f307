"""Regenerates lexical_reference.json with third-party metric implementations.

METEOR and BLEU-1 come from NLTK (Snowball English stemmer, synonym stage
disabled); ROUGE-L comes from the rouge-score package.

    python3 lexical_reference.py > lexical_reference.json
"""
import json
import math
import re

from nltk.stem.snowball import SnowballStemmer
from nltk.translate.bleu_score import sentence_bleu
from nltk.translate.meteor_score import single_meteor_score
from rouge_score import rouge_scorer


class NoSynonyms:
    def synsets(self, *args, **kwargs):
        return []


PAIRS = [
    ("a wooden chair with four legs", "a wooden chair with four legs"),
    ("a b c d", "a b x y"),
    ("red lamp", "blue table"),
    ("the chair has legs", "the chair has a leg"),
    ("running wheels on the car", "the car runs on wheel"),
    ("a small round handle", "handle round and small"),
    ("the the the", "the cat sat on the mat"),
    ("seat", "the seat of the chair is padded"),
    ("the backrest is curved and tall", "a tall curved backrest"),
    ("Four Legs support the Table top", "four legs supporting the tabletop"),
    ("wings attached to the fuselage", "the fuselage has two attached wings"),
    ("metal frame", "metallic frame"),
    ("the door opens outward", "doors opening outwards"),
    ("a head with two eyes and a mouth", "the head has eyes a nose and a mouth"),
    ("left front wheel", "front left wheel"),
    ("x y z x y z", "z y x"),
    ("the lid of the jar", "jar lid"),
    ("cushioned armrests on both sides", "armrests are cushioned on both sides"),
    ("a decorative carving", "decorated carvings on the base"),
    ("engine, exhaust; and tail-light", "tail light and exhaust engine"),
]


def tokens(s):
    return [t for t in re.split(r"[^0-9a-z]+", s.lower()) if t]


def main():
    stemmer = SnowballStemmer("english")
    rouge = rouge_scorer.RougeScorer(["rougeL"])
    rows = []
    for cand, ref in PAIRS:
        c, r = tokens(cand), tokens(ref)
        meteor = single_meteor_score(r, c, stemmer=stemmer, wordnet=NoSynonyms())
        bleu = sentence_bleu([r], c, weights=(1.0,)) if c else 0.0
        rl = rouge.score(" ".join(r), " ".join(c))["rougeL"].fmeasure
        assert all(math.isfinite(v) for v in (meteor, bleu, rl))
        rows.append(
            {"candidate": cand, "reference": ref, "bleu1": bleu, "rouge_l": rl, "meteor": meteor}
        )
    print(json.dumps(rows, indent=1))


if __name__ == "__main__":
    main()
