#!/usr/bin/env python3
"""Reference chrF++ scorer used to freeze expected values for the C++ tests.

This is a direct port of the canonical chrF++ scoring procedure (Popovic's
chrF++.py, as packaged in sacreBLEU's CHRF metric with char_order=6,
word_order=2, beta=2, no lowercasing, whitespace excluded from character
n-grams, no eps smoothing). It is test-only code: it never imports from the
library under test, and the generated JSON is committed so the C++ suite does
not depend on Python at build time.

Usage: python3 chrf_reference.py > ../data/chrf_cases.json
"""

import json
import re
import string
import sys
from collections import Counter

CHAR_ORDER = 6
WORD_ORDER = 2
BETA = 2.0
PUNCTS = set(string.punctuation)
WHITESPACE_RE = re.compile(r"\s+")


def separate_punctuation(sent):
    tokenized = []
    for w in sent.split():
        if len(w) == 1:
            tokenized.append(w)
        else:
            if w[-1] in PUNCTS:
                tokenized += [w[:-1], w[-1]]
            elif w[0] in PUNCTS:
                tokenized += [w[0], w[1:]]
            else:
                tokenized.append(w)
    return tokenized


def extract_ngrams(sent):
    grams = []
    chars = WHITESPACE_RE.sub("", sent)
    for n in range(1, CHAR_ORDER + 1):
        grams.append(Counter(chars[i : i + n] for i in range(len(chars) - n + 1)))
    words = separate_punctuation(sent)
    for n in range(1, WORD_ORDER + 1):
        grams.append(
            Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))
        )
    return grams


def match_stats(hyp, ref):
    match = 0
    for ng, cnt in hyp.items():
        if ng in ref:
            match += min(cnt, ref[ng])
    return sum(hyp.values()), sum(ref.values()), match


def chrf_pp(hypothesis, reference):
    eps = 1e-16
    factor = BETA * BETA
    score = 0.0
    effective = 0
    for hyp, ref in zip(extract_ngrams(hypothesis), extract_ngrams(reference)):
        n_hyp, n_ref, n_match = match_stats(hyp, ref)
        prec = n_match / n_hyp if n_hyp > 0 else eps
        rec = n_match / n_ref if n_ref > 0 else eps
        denom = factor * prec + rec
        if denom > 0:
            score += (1 + factor) * prec * rec / denom
        if n_hyp > 0 or n_ref > 0:
            effective += 1
    if effective == 0:
        return 0.0
    return 100.0 * score / effective


# Curated hypothesis/reference pairs: plain English, punctuation edge cases,
# whitespace variants, Ethiopic and Latin-diacritic text, degenerate inputs.
PAIRS = [
    ("the cat sat", "the cat sat"),
    ("cat sat", "the cat sat"),
    ("", "the cat sat"),
    ("the cat sat", ""),
    ("", ""),
    ("a", "a"),
    ("a", "b"),
    ("hello world", "hello there world"),
    ("Selam means peace.", "Selam means peace."),
    ("selam means peace", "Selam means peace."),
    ("The word abba means father.", "Abba means father in Amharic."),
    ("1999.", "1999"),
    ("It costs 1999.5 dollars.", "It costs 1999.5 dollars!"),
    ("'quoted'", "quoted"),
    ("word, another", "word another"),
    ("one two three four five", "five four three two one"),
    ("the quick brown fox jumps", "the quick brown fox jumped"),
    ("a b c d e f g", "a b c d e f g h"),
    ("repetition repetition repetition", "repetition"),
    ("short", "a considerably longer reference sentence for contrast"),
    ("a considerably longer hypothesis sentence for contrast", "short"),
    ("tab\tseparated words", "tab separated words"),
    ("double  space", "double space"),
    ("Trailing space ", "Trailing space"),
    ("Mixed CASE Text", "mixed case text"),
    ("ሰላም ማለት ሰላም ነው", "ሰላም ማለት ሰላም ነው"),
    ("ሰላም ማለት ፍቅር ነው", "ሰላም ማለት ሰላም ነው"),
    ("አባ ማለት አባት ነው", "አባ ማለት አባት ማለት ነው"),
    ("bàbá mi", "bàbá mi ni"),
    ("bàbá mi", "bàbá mi"),
    ("ọmọ means child", "ọmọ means child or offspring"),
    ("habari gani", "habari gani rafiki"),
    ("jambo", "jambo sana"),
    ("Ina kwana", "Ina kwana lafiya"),
    ("Kedu ka i mere", "Kedu ka ị mere"),
    ("so na ni", "sawa na hiyo"),
    ("The tutor explains the word selam.", "The tutor explains selam."),
    ("Fill in the blank: ___ means peace.", "Fill in the blank: selam means peace."),
    (
        "Great question! The word jabana refers to a coffee pot.",
        "Good question! The word jabana means a traditional coffee pot.",
    ),
    (
        "In Zulu, sawubona is a common greeting used during the day.",
        "Sawubona is the standard Zulu greeting.",
    ),
    ("No overlap whatsoever here", "完全に異なる文字列です"),
    ("xyzzy plugh", "qwerty uiop"),
    ("aaaaaa", "aaaaaaa"),
    ("ab ab ab", "ab ab"),
    ("punctuation!!!", "punctuation"),
    ("(parenthetical) remark", "parenthetical remark"),
    ("semi;colon", "semi colon"),
    (
        "A tutor should encourage the learner with positive feedback.",
        "Tutors should encourage learners using positive feedback.",
    ),
    (
        "Usiku mwema means good night in Swahili.",
        "The phrase usiku mwema means good night.",
    ),
    ("ካልኣይ ምዕራፍ", "ቀዳማይ ምዕራፍ"),
]


def main():
    assert len(PAIRS) == 50, len(PAIRS)
    # Hand-checked anchor (worked through the formula on paper): 57.3628
    anchor = chrf_pp("cat sat", "the cat sat")
    assert abs(anchor - 57.3628) < 0.01, anchor
    assert chrf_pp("the cat sat", "the cat sat") == 100.0
    assert chrf_pp("", "the cat sat") == 0.0
    cases = [
        {"hypothesis": h, "reference": r, "chrf_pp": chrf_pp(h, r)}
        for h, r in PAIRS
    ]
    json.dump({"cases": cases}, sys.stdout, ensure_ascii=False, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
