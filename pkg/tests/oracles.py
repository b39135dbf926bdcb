"""Independent brute-force oracles the implementation is checked against.

These deliberately re-derive each formula with naive dense/loop computation
and share no code with the package internals.
"""

from __future__ import annotations

import math
import re
import string

import numpy as np


def dense_soft_cosine(q: dict, h: dict, embeddings: dict, exponent: float = 2.0,
                      floor_at_zero: bool = True) -> float:
    """Dense quadratic-form evaluation of the soft cosine formula."""
    if not q or not h:
        return 0.0
    vocab = sorted(set(q) | set(h))
    n = len(vocab)
    S = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            va = embeddings.get(vocab[i])
            vb = embeddings.get(vocab[j])
            if va is None or vb is None:
                continue
            na = float(np.linalg.norm(va))
            nb = float(np.linalg.norm(vb))
            if na == 0.0 or nb == 0.0:
                continue
            s = float(np.dot(va, vb)) / (na * nb)
            if floor_at_zero:
                s = max(0.0, s)
            S[i, j] = s ** exponent
    qv = np.array([float(q.get(t, 0.0)) for t in vocab])
    hv = np.array([float(h.get(t, 0.0)) for t in vocab])
    num = float(qv @ S @ hv)
    den = math.sqrt(float(qv @ S @ qv)) * math.sqrt(float(hv @ S @ hv))
    if den == 0.0:
        return 0.0
    return min(1.0, max(0.0, num / den))


def classical_cosine(q: dict, h: dict) -> float:
    """Plain cosine over sparse term vectors."""
    if not q or not h:
        return 0.0
    num = sum(w * h[t] for t, w in q.items() if t in h)
    den = math.sqrt(sum(w * w for w in q.values())) * math.sqrt(
        sum(w * w for w in h.values()))
    return 0.0 if den == 0.0 else num / den


def oracle_normalize(text: str) -> list[str]:
    out = []
    for raw in text.lower().split():
        word = "".join(ch for ch in raw if ch not in string.punctuation)
        if word and word not in ("a", "an", "the"):
            out.append(word)
    return out


def oracle_token_f1(prediction: str, reference: str,
                    marker: str = "CANNOTANSWER") -> float:
    """Token F1 with the multiset overlap counted by explicit removal."""
    pred_na = prediction.strip() == marker
    ref_na = reference.strip() == marker
    if pred_na or ref_na:
        return 1.0 if (pred_na and ref_na) else 0.0
    pred = oracle_normalize(prediction)
    ref = oracle_normalize(reference)
    if not pred or not ref:
        return 1.0 if pred == ref else 0.0
    pool = list(ref)
    overlap = 0
    for tok in pred:
        if tok in pool:
            pool.remove(tok)
            overlap += 1
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred)
    recall = overlap / len(ref)
    return 2 * precision * recall / (precision + recall)


def oracle_best_window(passage_text: str, marker: str, bag: dict,
                       max_span: int, context: int):
    """Brute-force window search: recompute every window's overlap from
    scratch and minimize (score desc, start asc, length asc) explicitly.

    Returns (start_token, end_token, normalized_score) or None when the
    passage has no candidate tokens.
    """
    answerable = passage_text.rstrip()
    if answerable.endswith(marker):
        answerable = answerable[: -len(marker)].rstrip()
    tokens = [m.group().lower() for m in re.finditer(r"[A-Za-z0-9]+", answerable)]
    sentences = [s for s in re.split(r"(?<=[.!?])\s+", answerable) if s.strip()]
    n_sent = max(1, len(sentences))
    df = {}
    for sentence in sentences or [answerable]:
        for tok in set(re.findall(r"[a-z0-9]+", sentence.lower())):
            df[tok] = df.get(tok, 0) + 1

    def idf(tok):
        return 1.0 + math.log(n_sent / max(df.get(tok, 0), 1))

    n = len(tokens)
    if n == 0:
        return None
    mass = sum(idf(t) * w for t, w in bag.items())
    if mass == 0.0:
        return 0, 1, 0.0
    candidates = []
    for i in range(n):
        for j in range(i + 1, min(n, i + max_span) + 1):
            region = tokens[max(0, i - context):min(n, j + context)]
            raw = 0.0
            for tok, weight in bag.items():
                raw += min(weight, region.count(tok)) * idf(tok)
            candidates.append((-raw, i, j - i))
    neg_raw, start, length = min(candidates)
    return start, start + length, -neg_raw / mass
