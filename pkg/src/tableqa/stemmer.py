"""English (Porter2 / Snowball) stemmer, implemented from the published
algorithm definition.

Pure function, no external dependencies; operates on single lowercase
tokens. Digits and other non-letters are treated as consonants, which
matches the reference behavior for mixed tokens like "a320".
"""

VOWELS = "aeiouy"
DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
LI_ENDINGS = "cdeghkmnrt"

# Irregular forms handled before the main algorithm.
_EXCEPTIONS = {
    "skis": "ski",
    "skies": "sky",
    "dying": "die",
    "lying": "lie",
    "tying": "tie",
    "idly": "idl",
    "gently": "gentl",
    "ugly": "ugli",
    "early": "earli",
    "only": "onli",
    "singly": "singl",
    "sky": "sky",
    "news": "news",
    "howe": "howe",
    "atlas": "atlas",
    "cosmos": "cosmos",
    "bias": "bias",
    "andes": "andes",
}

# Words left untouched once step 1a has run.
_STOP_AFTER_1A = {
    "inning", "outing", "canning", "herring", "earring",
    "proceed", "exceed", "succeed",
}

_STEP2 = (
    ("ational", "ate"), ("fulness", "ful"), ("iveness", "ive"),
    ("ization", "ize"), ("ousness", "ous"),
    ("biliti", "ble"), ("lessli", "less"), ("tional", "tion"),
    ("alism", "al"), ("aliti", "al"), ("ation", "ate"), ("entli", "ent"),
    ("fulli", "ful"), ("iviti", "ive"), ("ousli", "ous"),
    ("abli", "able"), ("alli", "al"), ("anci", "ance"), ("ator", "ate"),
    ("enci", "ence"), ("izer", "ize"),
    ("bli", "ble"), ("ogi", "og"), ("li", ""),
)

_STEP3 = (
    ("ational", "ate"), ("tional", "tion"), ("alize", "al"),
    ("icate", "ic"), ("iciti", "ic"), ("ative", ""),
    ("ical", "ic"), ("ness", ""), ("ful", ""),
)

_STEP4 = (
    "ement",
    "ance", "ence", "able", "ible", "ment",
    "ant", "ent", "ism", "ate", "iti", "ous", "ive", "ize", "ion",
    "al", "er", "ic",
)


def _is_vowel(ch: str) -> bool:
    return ch in VOWELS


def _mark_consonant_ys(word: str) -> str:
    # Initial y and y following a vowel act as consonants; mark them Y.
    chars = list(word)
    if chars[0] == "y":
        chars[0] = "Y"
    for i in range(1, len(chars)):
        if chars[i] == "y" and chars[i - 1] in VOWELS:
            chars[i] = "Y"
    return "".join(chars)


def _region_after_vc(word: str, start: int) -> int:
    """Offset just past the first non-vowel that follows a vowel, scanning
    from `start`; len(word) when absent."""
    for i in range(start + 1, len(word)):
        if not _is_vowel(word[i]) and _is_vowel(word[i - 1]):
            return i + 1
    return len(word)


def _regions(word: str) -> tuple[int, int]:
    r1 = None
    for prefix in ("gener", "commun", "arsen"):
        if word.startswith(prefix):
            r1 = len(prefix)
            break
    if r1 is None:
        r1 = _region_after_vc(word, 0)
    r2 = _region_after_vc(word, r1)
    return r1, r2


def _ends_short_syllable(word: str) -> bool:
    if len(word) == 2:
        return _is_vowel(word[0]) and not _is_vowel(word[1])
    if len(word) >= 3:
        a, b, c = word[-3], word[-2], word[-1]
        return (not _is_vowel(a)) and _is_vowel(b) and (not _is_vowel(c)) and c not in "wxY"
    return False


def _is_short_word(word: str, r1: int) -> bool:
    return r1 >= len(word) and _ends_short_syllable(word)


def _step0(word: str) -> str:
    for suffix in ("'s'", "'s", "'"):
        if word.endswith(suffix):
            return word[: -len(suffix)]
    return word


def _step1a(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ied") or word.endswith("ies"):
        return word[:-3] + ("i" if len(word) > 4 else "ie")
    if word.endswith("us") or word.endswith("ss"):
        return word
    if word.endswith("s"):
        # Delete only when a vowel precedes the position just before the s.
        if any(_is_vowel(ch) for ch in word[:-2]):
            return word[:-1]
    return word


def _step1b(word: str, r1: int) -> str:
    suffix = next(
        (s for s in ("eedly", "ingly", "edly", "eed", "ing", "ed") if word.endswith(s)),
        None,
    )
    if suffix is None:
        return word
    if suffix in ("eed", "eedly"):
        if len(word) - len(suffix) >= r1:
            return word[: -len(suffix)] + "ee"
        return word
    stem = word[: -len(suffix)]
    if not any(_is_vowel(ch) for ch in stem):
        return word
    if stem.endswith(("at", "bl", "iz")):
        return stem + "e"
    if stem.endswith(DOUBLES):
        return stem[:-1]
    if _is_short_word(stem, r1):
        return stem + "e"
    return stem


def _step1c(word: str) -> str:
    if len(word) > 2 and word[-1] in "yY" and not _is_vowel(word[-2]):
        return word[:-1] + "i"
    return word


def _step2(word: str, r1: int) -> str:
    for suffix, repl in _STEP2:
        if word.endswith(suffix):
            if len(word) - len(suffix) < r1:
                return word
            if suffix == "ogi":
                if word.endswith("logi"):
                    return word[:-1]
                return word
            if suffix == "li":
                if len(word) >= 3 and word[-3] in LI_ENDINGS:
                    return word[:-2]
                return word
            return word[: -len(suffix)] + repl
    return word


def _step3(word: str, r1: int, r2: int) -> str:
    for suffix, repl in _STEP3:
        if word.endswith(suffix):
            if len(word) - len(suffix) < r1:
                return word
            if suffix == "ative" and len(word) - len(suffix) < r2:
                return word
            return word[: -len(suffix)] + repl
    return word


def _step4(word: str, r2: int) -> str:
    for suffix in _STEP4:
        if word.endswith(suffix):
            if len(word) - len(suffix) < r2:
                return word
            if suffix == "ion" and word[-4:-3] not in ("s", "t"):
                return word
            return word[: -len(suffix)]
    return word


def _step5(word: str, r1: int, r2: int) -> str:
    if word.endswith("e"):
        if len(word) - 1 >= r2:
            return word[:-1]
        if len(word) - 1 >= r1 and not _ends_short_syllable(word[:-1]):
            return word[:-1]
        return word
    if word.endswith("l") and len(word) - 1 >= r2 and word[-2:-1] == "l":
        return word[:-1]
    return word


def stem(word: str) -> str:
    """Stem one lowercase token."""
    if word.startswith("'"):
        word = word[1:]
    if len(word) <= 2:
        return word
    exceptional = _EXCEPTIONS.get(word)
    if exceptional is not None:
        return exceptional
    word = _mark_consonant_ys(word)
    r1, r2 = _regions(word)
    word = _step0(word)
    word = _step1a(word)
    if word in _STOP_AFTER_1A:
        return word
    word = _step1b(word, r1)
    word = _step1c(word)
    word = _step2(word, r1)
    word = _step3(word, r1, r2)
    word = _step4(word, r2)
    word = _step5(word, r1, r2)
    return word.replace("Y", "y")
