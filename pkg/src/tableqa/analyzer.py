"""Query/document analysis: lowercasing, word splitting, possessive
stripping, stopword removal, stemming.

The same analyzer is applied to table documents at index time and to
questions at query time; both sides must stay in lockstep or scores are
meaningless.
"""

import re

from .stemmer import stem

# The classic 33-word English analyzer stopword set.
STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or
    such that the their then there these they this to was will with""".split()
)

# Alphanumeric runs, optionally joined by single internal apostrophes
# ("airbus's", "o'brien"); leading/trailing apostrophes never match.
_TOKEN_RE = re.compile(r"[0-9a-z]+(?:'[0-9a-z]+)*")


def tokenize(text: str) -> list[str]:
    """Analyze text into index terms.

    Lowercase, split on non-alphanumeric boundaries, strip possessive 's,
    drop stopwords, stem. Deterministic; empty input yields an empty list.
    """
    terms = []
    for token in _TOKEN_RE.findall(text.lower().replace("’", "'")):
        if token.endswith("'s"):
            token = token[:-2]
        if not token or token in STOPWORDS:
            continue
        terms.append(stem(token))
    return terms
