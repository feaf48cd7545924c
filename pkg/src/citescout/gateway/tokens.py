"""Fallback token estimator used when an endpoint omits usage counts.

Rule: count words split on whitespace and punctuation, multiply by 4/3,
round up. Deterministic and monotone under concatenation.
"""
import re

_WORD = re.compile(r"[A-Za-z0-9]+")


def estimate_tokens(text: str) -> int:
    words = len(_WORD.findall(text))
    return -(-(words * 4) // 3)
