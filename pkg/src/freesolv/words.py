"""Words over the generators x1..xr and their free reduction.

A letter is a nonzero signed integer: +i stands for x_i, -i for x_i^{-1}.
Words are immutable tuples of letters, always kept freely reduced.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple


class ParseError(ValueError):
    """Raised for malformed word text."""


class Letter(NamedTuple):
    """A single generator letter x_i or its inverse."""

    index: int  # generator index, >= 1
    sign: int   # +1 or -1

    @property
    def signed(self) -> int:
        return self.index * self.sign

    @classmethod
    def from_signed(cls, s: int) -> "Letter":
        if s == 0:
            raise ValueError("letter 0 is not a generator")
        return cls(abs(s), 1 if s > 0 else -1)


def free_reduce(letters: Iterable[int]) -> "Word":
    """Freely reduce a sequence of signed letters.

    The result is the unique reduced form; reducing twice changes nothing.
    """
    stack: list[int] = []
    for s in letters:
        s = int(s)
        if s == 0:
            raise ValueError("letter 0 is not a generator")
        if stack and stack[-1] == -s:
            stack.pop()
        else:
            stack.append(s)
    return Word(tuple(stack), _reduced=True)


def concat_reduced(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Product of two already-reduced letter tuples (junction cancellation)."""
    i, j = len(a), 0
    while i > 0 and j < len(b) and a[i - 1] == -b[j]:
        i -= 1
        j += 1
    return a[:i] + b[j:]


class Word:
    """A freely reduced word, with the rank it is considered over."""

    __slots__ = ("letters", "rank")

    letters: tuple[int, ...]
    rank: int

    def __init__(self, letters: Iterable[int] = (), rank: int | None = None,
                 _reduced: bool = False):
        if not _reduced:
            letters = free_reduce(letters).letters
        else:
            letters = tuple(letters)
        object.__setattr__(self, "letters", letters)
        need = max((abs(s) for s in letters), default=1)
        if rank is None:
            rank = need
        elif rank < need:
            raise ValueError(f"rank {rank} too small for word using x{need}")
        object.__setattr__(self, "rank", rank)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __hash__(self) -> int:
        return hash(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __mul__(self, other: "Word") -> "Word":
        # both factors are reduced, so cancellation is junction-only
        return Word(concat_reduced(self.letters, other.letters),
                    rank=max(self.rank, other.rank), _reduced=True)

    def __invert__(self) -> "Word":
        return Word(tuple(-s for s in reversed(self.letters)),
                    rank=self.rank, _reduced=True)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return (~self) ** (-k)
        out = Word((), rank=self.rank, _reduced=True)
        for _ in range(k):
            out = out * self
        return out

    def prefix(self, j: int) -> "Word":
        """Initial segment of length j (prefixes of a reduced word are reduced)."""
        return Word(self.letters[:j], rank=self.rank, _reduced=True)

    def conjugate_by(self, z: "Word") -> "Word":
        """z * self * z^-1, freely reduced."""
        return z * self * ~z

    def to_letters(self) -> list[Letter]:
        return [Letter.from_signed(s) for s in self.letters]

    def serialize(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{s}" if s > 0 else f"X{-s}" for s in self.letters)

    def __repr__(self) -> str:
        return f"Word({self.serialize()!r})"


def commutator(u: Word, v: Word) -> Word:
    return u * v * ~u * ~v


_TOKEN_RE = re.compile(r"^([xX])(\d+)(?:\^(-?\d+))?$")


def parse(text: str, r: int | None = None) -> Word:
    """Parse whitespace-separated tokens into a freely reduced Word.

    Tokens are "x<i>" / "X<i>" (X = inverse), optionally with "^<k>";
    single ascii letters a..z / A..Z map to x1..x26 and their inverses,
    and "1" is the empty word.  Exponents expand before reduction.
    """
    letters: list[int] = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _TOKEN_RE.match(tok)
        if m:
            kind, idx_s, exp_s = m.groups()
            idx = int(idx_s)
            if idx == 0:
                raise ParseError(f"generator index 0 in token {tok!r}")
            s = idx if kind == "x" else -idx
            k = 1 if exp_s is None else int(exp_s)
            if k < 0:
                s, k = -s, -k
            letters.extend([s] * k)
        elif tok.isalpha() and all(c.isascii() for c in tok):
            for c in tok:
                letters.append(ord(c) - ord("a") + 1 if c.islower()
                               else -(ord(c) - ord("A") + 1))
        else:
            raise ParseError(f"malformed token {tok!r}")
    if r is not None:
        if r < 1:
            raise ParseError("rank must be >= 1")
        too_big = [s for s in letters if abs(s) > r]
        if too_big:
            raise ParseError(f"generator x{abs(too_big[0])} exceeds rank {r}")
    w = free_reduce(letters)
    return Word(w.letters, rank=r, _reduced=True)


def normalize_rank(w: Word) -> tuple[Word, dict[int, int]]:
    """Relabel generators by first occurrence so indices used are 1..r'.

    Returns the relabeled word and the old->new index mapping.  Relabeling
    is induced by a permutation of the basis, so triviality, powers and
    conjugacy are unaffected.
    """
    renaming: dict[int, int] = {}
    out = []
    for s in w.letters:
        i = abs(s)
        if i not in renaming:
            renaming[i] = len(renaming) + 1
        out.append(renaming[i] if s > 0 else -renaming[i])
    rank = len(renaming) if renaming else None
    return Word(tuple(out), rank=rank, _reduced=True), dict(renaming)


def code_length(w: Word) -> int:
    """Bit length |w| * (ceil(log2 r) + 1) of the binary encoding."""
    r = w.rank
    if r < 1:
        raise ValueError("rank must be >= 1")
    return len(w) * ((r - 1).bit_length() + 1)


def random_reduced_word(rng, length: int, r: int) -> Word:
    """Uniform non-backtracking walk: a random freely reduced word."""
    if length == 0:
        return Word((), rank=r, _reduced=True)
    letters = [rng.choice([s for s in range(-r, r + 1) if s != 0])]
    while len(letters) < length:
        banned = -letters[-1]
        choices = [s for s in range(-r, r + 1) if s != 0 and s != banned]
        letters.append(rng.choice(choices))
    return Word(tuple(letters), rank=r, _reduced=True)


def random_trivial_word(rng, r: int, d: int, conjugator_len: int = 3,
                        factors: int = 2) -> Word:
    """A nonempty product of conjugates of nested commutators lying in F^(d).

    Such words are trivial in S_{r,d} by construction.  Word length grows
    with conjugator_len and with d (roughly 4^d per factor).
    """
    if d < 1:
        raise ValueError("d must be >= 1 for a nontrivial construction")

    def nested(depth: int) -> Word:
        if depth == 0:
            w = random_reduced_word(rng, rng.randrange(1, 4), r)
            while len(w) == 0:
                w = random_reduced_word(rng, rng.randrange(1, 4), r)
            return w
        while True:
            c = commutator(nested(depth - 1), nested(depth - 1))
            if len(c) > 0:
                return c

    while True:
        out = Word((), rank=r, _reduced=True)
        for _ in range(factors):
            z = random_reduced_word(rng, rng.randrange(0, conjugator_len + 1), r)
            out = out * nested(d).conjugate_by(z)
        if len(out) > 0:
            return out
