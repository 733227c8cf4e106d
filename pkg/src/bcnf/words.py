"""Symbol-word algebra for itineraries over the alphabet {L, R}."""
from __future__ import annotations


class Word(str):
    """Immutable L/R word. Subclasses str so slicing and serialization are free."""

    def __new__(cls, text: str) -> "Word":
        if not text:
            raise ValueError("word must be nonempty")
        up = text.upper()
        bad = set(up) - {"L", "R"}
        if bad:
            raise ValueError(f"invalid symbol(s) {sorted(bad)} in word {text!r}")
        return super().__new__(cls, up)

    @property
    def l_count(self) -> int:
        return self.count("L")


def parse_word(text: str) -> Word:
    """Case-insensitive parse; rejects empty strings and foreign symbols."""
    return Word(text)


def is_primitive(w: str) -> bool:
    """True iff w is not a nontrivial power of a shorter word."""
    w = parse_word(w)
    n = len(w)
    for d in range(1, n):
        if n % d == 0 and w[:d] * (n // d) == w:
            return False
    return True


def shift(w: str, i: int) -> Word:
    """Left rotation by i (taken mod the length)."""
    w = parse_word(w)
    i %= len(w)
    return Word(w[i:] + w[:i])


def build_family(X: str, Y: str, k: int) -> Word:
    """Concatenation X^k Y."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Word(parse_word(X) * k + parse_word(Y))


def flip_first(w: str) -> Word:
    """Copy of w with symbol 0 toggled."""
    w = parse_word(w)
    first = "R" if w[0] == "L" else "L"
    return Word(first + w[1:])


def mismatch_indices(X: str, Y: str) -> list[int]:
    """Indices where the concatenations XY and YX differ."""
    XY = parse_word(X) + parse_word(Y)
    YX = parse_word(Y) + parse_word(X)
    return [i for i in range(len(XY)) if XY[i] != YX[i]]


def alpha_index(X: str, Y: str) -> int:
    """The second mismatch index. Defined only when there are exactly two."""
    m = mismatch_indices(X, Y)
    if len(m) != 2:
        raise ValueError(
            f"alpha undefined: XY vs YX differ at {len(m)} indices, need exactly 2")
    return m[1]


def canonical_rotation(w: str) -> Word:
    """Lexicographically smallest rotation; identifies cycles up to phase."""
    w = parse_word(w)
    return min((shift(w, i) for i in range(len(w))), key=str)
