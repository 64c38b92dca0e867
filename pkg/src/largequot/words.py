"""Freely reduced words over a free group of finite rank.

A word is a tuple of letters, each letter a pair ``(generator, exponent)``
with ``generator`` in ``1..rank`` and ``exponent`` +1 or -1.  Construction
always freely reduces, so letter tuples are canonical: two ``Word`` objects
represent the same group element iff they compare equal, and hashing is
structural.  Words are treated as immutable; nothing in the package mutates
``letters`` after construction.

Two textual forms are supported:

* letter form, for rank <= 26: generators 1..26 print as ``a``..``z`` and
  inverses as ``A``..``Z``, concatenated (``abA`` is a * b * a^-1); the
  identity prints as ``1``;
* indexed form, for any rank: ``g3`` and ``g3^-1``, joined by ``*``.

Parsing accepts an optional ``^k`` exponent after any letter in either form
(``a^6``, ``g2^-3``).  ``parse_word(str(w), w.rank) == w`` holds exactly.
"""

from __future__ import annotations

import re


def _reduce_letters(letters):
    """Freely reduce a letter sequence with a cancellation stack."""
    out = []
    for gen, exp in letters:
        if out and out[-1][0] == gen and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


class Word:
    """A freely reduced word in the free group of the given rank."""

    __slots__ = ("rank", "letters")

    def __init__(self, rank, letters=()):
        if not isinstance(rank, int) or rank < 1:
            raise ValueError(f"rank must be a positive integer, got {rank!r}")
        letters = tuple(letters)
        for letter in letters:
            gen, exp = letter
            if not 1 <= gen <= rank:
                raise ValueError(
                    f"generator index {gen} out of range for rank {rank}"
                )
            if exp not in (1, -1):
                raise ValueError(f"letter exponent must be +1 or -1, got {exp!r}")
        self.rank = rank
        self.letters = _reduce_letters(letters)

    @classmethod
    def identity(cls, rank):
        return cls(rank)

    @classmethod
    def generator(cls, rank, index):
        return cls(rank, ((index, 1),))

    def __len__(self):
        return len(self.letters)

    @property
    def is_identity(self):
        return not self.letters

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and self.letters == other.letters

    def __hash__(self):
        return hash((self.rank, self.letters))

    def _check_rank(self, other):
        if self.rank != other.rank:
            raise ValueError(
                f"rank mismatch: {self.rank} vs {other.rank}"
            )

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        self._check_rank(other)
        out = list(self.letters)
        for gen, exp in other.letters:
            if out and out[-1][0] == gen and out[-1][1] == -exp:
                out.pop()
            else:
                out.append((gen, exp))
        return Word(self.rank, out)

    def inverse(self):
        return Word(self.rank, [(g, -e) for g, e in reversed(self.letters)])

    def __invert__(self):
        return self.inverse()

    def __pow__(self, n):
        return power(self, n)

    def conjugate(self, t):
        """Right conjugation action: self^t = t^-1 * self * t."""
        return t.inverse() * self * t

    def exponent_sums(self):
        """Abelianized exponent vector, one integer per generator."""
        sums = [0] * self.rank
        for gen, exp in self.letters:
            sums[gen - 1] += exp
        return tuple(sums)

    def cyclic_decomposition(self):
        """Split as (t, c) with self == t * c * t^-1 and c cyclically reduced."""
        letters = self.letters
        i, j = 0, len(letters)
        while j - i >= 2 and letters[i][0] == letters[j - 1][0] \
                and letters[i][1] == -letters[j - 1][1]:
            i += 1
            j -= 1
        return Word(self.rank, letters[:i]), Word(self.rank, letters[i:j])

    def __str__(self):
        if self.rank <= 26:
            return self.letter_str()
        return self.indexed_str()

    def __repr__(self):
        return f"Word({self.rank}, {str(self)!r})"

    def letter_str(self):
        if self.rank > 26:
            raise ValueError("letter form only covers ranks up to 26")
        if not self.letters:
            return "1"
        chars = []
        for gen, exp in self.letters:
            base = ord("a") if exp == 1 else ord("A")
            chars.append(chr(base + gen - 1))
        return "".join(chars)

    def indexed_str(self):
        if not self.letters:
            return "1"
        runs = []
        for gen, exp in self.letters:
            if runs and runs[-1][0] == gen and (runs[-1][1] > 0) == (exp > 0):
                runs[-1][1] += exp
            else:
                runs.append([gen, exp])
        parts = []
        for gen, exp in runs:
            parts.append(f"g{gen}" if exp == 1 else f"g{gen}^{exp}")
        return "*".join(parts)


def reduce(letters, rank):
    """Build the freely reduced Word over ``rank`` from raw letters."""
    return Word(rank, letters)


def mul(u, v):
    return u * v


def inv(u):
    return u.inverse()


def conjugate(g, t):
    return g.conjugate(t)


def power(g, n):
    """g**n for any integer n, via cyclic decomposition (O(output) letters)."""
    if not isinstance(n, int):
        raise ValueError(f"exponent must be an integer, got {n!r}")
    if n == 0 or g.is_identity:
        return Word.identity(g.rank)
    base = g if n > 0 else g.inverse()
    t, core = base.cyclic_decomposition()
    repeated = core.letters * abs(n)
    return t * Word(g.rank, repeated) * t.inverse()


_INDEXED_TOKEN = re.compile(r"g(\d+)(?:\^(-?\d+))?")
_LETTER_TOKEN = re.compile(r"([a-zA-Z])(?:\^(-?\d+))?")


def _letters_of_token(gen, exp_sign, count):
    return [(gen, exp_sign)] * count


def parse_word(text, rank):
    """Parse either textual form into a Word of the given rank."""
    stripped = re.sub(r"\s+", "", text)
    if stripped in ("", "1"):
        return Word.identity(rank)
    letters = []
    if re.search(r"g\d", stripped):
        body = stripped.replace("*", "")
        pos = 0
        while pos < len(body):
            m = _INDEXED_TOKEN.match(body, pos)
            if not m:
                raise ValueError(f"cannot parse indexed word at {body[pos:]!r}")
            gen = int(m.group(1))
            exp = int(m.group(2)) if m.group(2) is not None else 1
            if exp != 0:
                sign = 1 if exp > 0 else -1
                letters.extend(_letters_of_token(gen, sign, abs(exp)))
            pos = m.end()
    else:
        pos = 0
        while pos < len(stripped):
            m = _LETTER_TOKEN.match(stripped, pos)
            if not m:
                raise ValueError(f"cannot parse word at {stripped[pos:]!r}")
            ch = m.group(1)
            if ch.islower():
                gen, sign = ord(ch) - ord("a") + 1, 1
            else:
                gen, sign = ord(ch) - ord("A") + 1, -1
            exp = int(m.group(2)) if m.group(2) is not None else 1
            if exp < 0:
                sign, exp = -sign, -exp
            letters.extend(_letters_of_token(gen, sign, exp))
            pos = m.end()
    return Word(rank, letters)


def shortlex_words(rank, include_identity=False):
    """Yield reduced words in shortlex order over a1 < .. < ar < a1^-1 < ..

    The alphabet order matches the BFS edge order used for coset enumeration,
    so transversal words and this enumeration agree on "smaller".
    """
    alphabet = [(g, 1) for g in range(1, rank + 1)]
    alphabet += [(g, -1) for g in range(1, rank + 1)]
    if include_identity:
        yield Word.identity(rank)
    frontier = [()]
    while True:
        next_frontier = []
        for prefix in frontier:
            for letter in alphabet:
                if prefix and prefix[-1][0] == letter[0] \
                        and prefix[-1][1] == -letter[1]:
                    continue
                word = prefix + (letter,)
                yield Word(rank, word)
                next_frontier.append(word)
        frontier = next_frontier


def random_reduced_word(rng, rank, length):
    """A uniformly random reduced word of exactly the given length."""
    if length == 0:
        return Word.identity(rank)
    alphabet = [(g, 1) for g in range(1, rank + 1)]
    alphabet += [(g, -1) for g in range(1, rank + 1)]
    letters = [rng.choice(alphabet)]
    while len(letters) < length:
        prev = letters[-1]
        choices = [l for l in alphabet if not (l[0] == prev[0] and l[1] == -prev[1])]
        letters.append(rng.choice(choices))
    return Word(rank, letters)
