"""Text metrics: BLEU-4 and ROUGE-L over a fixed tokenization.

Tokenization is lowercase split on non-alphanumerics; both metrics depend on
it, so it is fixed here and documented rather than configurable.
"""

from __future__ import annotations

import math
import re
from collections import Counter

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, references: list[str]) -> float:
    """BLEU-4 with add-one smoothing on n>1 precisions and the standard
    brevity penalty; clipped counts are taken against the best reference."""
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references if r is not None]
    if not cand or not refs:
        return 0.0

    log_sum = 0.0
    for n in range(1, 5):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        clipped = 0
        for ngram, count in cand_ngrams.items():
            best = max(_ngrams(ref, n).get(ngram, 0) for ref in refs)
            clipped += min(count, best)
        if n == 1:
            if total == 0 or clipped == 0:
                return 0.0
            precision = clipped / total
        else:
            precision = (clipped + 1) / (total + 1)
        log_sum += math.log(precision)

    geo_mean = math.exp(log_sum / 4)
    cand_len = len(cand)
    # effective reference length: closest to the candidate (ties -> shorter)
    ref_len = min((abs(len(r) - cand_len), len(r)) for r in refs)[1]
    if cand_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1 - ref_len / cand_len)
    return bp * geo_mean


def rouge_l(candidate: str, reference: str) -> float:
    """F1 of longest-common-subsequence length over the shared tokenization."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]
