"""Frozen rule-based tokenizer for the lexical side of the pipeline.

The rule set is deliberately small, deterministic, and locked by a golden
test corpus:

1. Split on Unicode whitespace.
2. From each chunk, peel leading punctuation characters one at a time into
   their own tokens, then trailing punctuation likewise (emitted in their
   original order after the core).
3. A character is punctuation iff its Unicode category starts with "P".
4. Case is kept; punctuation tokens are kept; word-internal punctuation
   (hyphens, apostrophes, decimal points) stays attached.

No attempt is made to reproduce any external tokenizer token-for-token;
changing these rules invalidates cached corpora, so bump TOKENIZER_VERSION
if they ever move.
"""

from __future__ import annotations

import unicodedata

TOKENIZER_VERSION = 1

_punct_cache: dict[str, bool] = {}


def _is_punct(ch: str) -> bool:
    flag = _punct_cache.get(ch)
    if flag is None:
        flag = unicodedata.category(ch).startswith("P")
        _punct_cache[ch] = flag
    return flag


def tokenize(text: str, lang: str = "") -> list[str]:
    """Tokenize one sentence.  ``lang`` is reserved; rules are shared.

    Raises ValueError when the text contains no tokens at all.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    if not tokens:
        raise ValueError("text produced no tokens")
    return tokens


def apply_token_flags(
    tokens: list[str], fold_case: bool = False, strip_punctuation: bool = False
) -> list[str]:
    """Optional post-processing for the lexical side, off by default.

    Whether word coverage should be case folded or see punctuation tokens
    is a judgment call; both behaviors are exposed as explicit ingestion
    flags instead of being baked into the frozen rule set.
    """
    if strip_punctuation:
        tokens = [t for t in tokens if not all(_is_punct(ch) for ch in t)]
    if fold_case:
        tokens = [t.lower() for t in tokens]
    return tokens
