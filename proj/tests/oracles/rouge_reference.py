#!/usr/bin/env python3
"""ROUGE-L oracle: classic LCS dynamic program over lowercased
whitespace-split tokens. Frozen into ../data/rouge_cases.json.

Usage: python3 rouge_reference.py > ../data/rouge_cases.json
"""

import json
import sys


def lcs(xs, ys):
    m, n = len(xs), len(ys)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if xs[i - 1] == ys[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + 1
            else:
                dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
    return dp[m][n]


def rouge_l(hyp, ref):
    h = hyp.lower().split()
    r = ref.lower().split()
    l = lcs(h, r)
    p = l / len(h) if h else 0.0
    rec = l / len(r) if r else 0.0
    f1 = 2 * p * rec / (p + rec) if (p + rec) > 0 else 0.0
    return {"lcs": l, "precision": p, "recall": rec, "f1": f1}


PAIRS = [
    ("a b c d", "a c d e"),
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("the cat sat", "a dog ran away"),
    ("police killed the gunman", "the gunman was killed by police"),
    ("Selam means peace in Amharic", "selam means peace"),
    ("w1 w2 w3 w4 w5", "w1 w3 w5"),
    ("", "nonempty reference"),
    ("nonempty hypothesis", ""),
    ("ab ab ab ab", "ab ab"),
    ("one two three four five six", "six five four three two one"),
]


def main():
    cases = []
    for h, r in PAIRS:
        c = {"hypothesis": h, "reference": r}
        c.update(rouge_l(h, r))
        cases.append(c)
    # spec anchor: "a b c d" vs "a c d e" -> LCS 3, P=R=F1=0.75
    assert cases[0]["lcs"] == 3 and abs(cases[0]["f1"] - 0.75) < 1e-15
    json.dump({"cases": cases}, sys.stdout, ensure_ascii=False, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
