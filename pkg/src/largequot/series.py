"""Truncated noncommutative power series and the 1+x generator embedding.

Series live in A = R<x_1..x_r> / X^l where R is the integers or a prime
field F_p and X is the augmentation ideal: every monomial of degree >= l is
identically zero.  A series is stored sparsely as a map from monomials
(tuples of variable indices, so ``(1, 2, 1)`` is x1*x2*x1) to nonzero
coefficients; the constant term has the empty monomial.  Monomials are
ordered by degree then lexicographically, and printing follows that order.

The group embedding sends the i-th free generator to 1 + x_i and its inverse
to the truncated geometric series sum_{k<l} (-x_i)^k.  Over F_p every series
with constant term 1 is a unit of p-power order, which is what the avoiding
quotients in :mod:`largequot.largeness` are built from.
"""

from __future__ import annotations

import re

from .errors import CapExceeded
from .words import Word

DEFAULT_TERM_CAP = 10**6


def _normalize_coeff(c, modulus):
    return c % modulus if modulus is not None else c


class TruncSeries:
    """An element of R<x_1..x_r>/X^l with sparse term storage.

    ``modulus`` is a prime p for F_p coefficients or ``None`` for integer
    coefficients.  Instances are immutable and hashable; arithmetic returns
    new objects and raises ``ValueError`` on rank/degree/modulus mismatch.
    """

    __slots__ = ("rank", "degree_bound", "modulus", "_terms", "_key")

    def __init__(self, rank, degree_bound, modulus, terms=None, term_cap=None):
        if not isinstance(rank, int) or rank < 1:
            raise ValueError(f"rank must be a positive integer, got {rank!r}")
        if not isinstance(degree_bound, int) or degree_bound < 1:
            raise ValueError(
                f"degree bound must be a positive integer, got {degree_bound!r}"
            )
        if modulus is not None and (not isinstance(modulus, int) or modulus < 2):
            raise ValueError(f"modulus must be None or an integer >= 2, got {modulus!r}")
        self.rank = rank
        self.degree_bound = degree_bound
        self.modulus = modulus
        stored = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) >= degree_bound:
                continue
            for var in mono:
                if not 1 <= var <= rank:
                    raise ValueError(
                        f"variable index {var} out of range for rank {rank}"
                    )
            c = _normalize_coeff(coeff, modulus)
            if c:
                stored[mono] = c
        if term_cap is not None and len(stored) > term_cap:
            raise CapExceeded("series term count", len(stored), term_cap)
        self._terms = stored
        self._key = tuple(sorted(stored.items(), key=lambda kv: (len(kv[0]), kv[0])))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rank, degree_bound, modulus=None):
        return cls(rank, degree_bound, modulus)

    @classmethod
    def one(cls, rank, degree_bound, modulus=None):
        return cls(rank, degree_bound, modulus, {(): 1})

    @classmethod
    def variable(cls, rank, degree_bound, modulus, index):
        return cls(rank, degree_bound, modulus, {(index,): 1})

    # -- structure ---------------------------------------------------------

    def terms(self):
        """Sorted (monomial, coefficient) pairs in degree-then-lex order."""
        return self._key

    def coefficient(self, mono):
        return self._terms.get(tuple(mono), 0)

    @property
    def constant_term(self):
        return self._terms.get((), 0)

    @property
    def is_zero(self):
        return not self._terms

    @property
    def is_one(self):
        return self._terms == {(): 1}

    def valuation(self):
        """Least degree of a nonzero term; degree_bound if the series is 0."""
        if not self._terms:
            return self.degree_bound
        return min(len(m) for m in self._terms)

    def _check_compatible(self, other):
        if (self.rank, self.degree_bound, self.modulus) != (
            other.rank,
            other.degree_bound,
            other.modulus,
        ):
            raise ValueError(
                "series mismatch: "
                f"({self.rank}, {self.degree_bound}, {self.modulus}) vs "
                f"({other.rank}, {other.degree_bound}, {other.modulus})"
            )

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.rank == other.rank
            and self.degree_bound == other.degree_bound
            and self.modulus == other.modulus
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.rank, self.degree_bound, self.modulus, self._key))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check_compatible(other)
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
        return TruncSeries(self.rank, self.degree_bound, self.modulus, terms)

    def __neg__(self):
        return TruncSeries(
            self.rank,
            self.degree_bound,
            self.modulus,
            {m: -c for m, c in self._terms.items()},
        )

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self + (-other)

    def mul(self, other, term_cap=DEFAULT_TERM_CAP):
        self._check_compatible(other)
        bound = self.degree_bound
        terms = {}
        for m1, c1 in self._terms.items():
            if len(m1) >= bound:
                continue
            room = bound - len(m1)
            for m2, c2 in other._terms.items():
                if len(m2) >= room:
                    continue
                mono = m1 + m2
                terms[mono] = terms.get(mono, 0) + c1 * c2
                if term_cap is not None and len(terms) > term_cap:
                    raise CapExceeded("series term count", len(terms), term_cap)
        return TruncSeries(self.rank, self.degree_bound, self.modulus, terms)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.mul(other)

    def power(self, n, term_cap=DEFAULT_TERM_CAP):
        """self**n by square and multiply; n < 0 inverts first."""
        if not isinstance(n, int):
            raise ValueError(f"exponent must be an integer, got {n!r}")
        if n < 0:
            return self.inverse(term_cap=term_cap).power(-n, term_cap=term_cap)
        result = TruncSeries.one(self.rank, self.degree_bound, self.modulus)
        base = self
        while n:
            if n & 1:
                result = result.mul(base, term_cap=term_cap)
            n >>= 1
            if n:
                base = base.mul(base, term_cap=term_cap)
        return result

    def __pow__(self, n):
        return self.power(n)

    def inverse(self, term_cap=DEFAULT_TERM_CAP):
        """Inverse of a series with constant term 1 (truncated Neumann sum)."""
        if self.constant_term != 1:
            raise ValueError(
                f"series_inv requires constant term 1, got {self.constant_term}"
            )
        u = self - TruncSeries.one(self.rank, self.degree_bound, self.modulus)
        result = TruncSeries.one(self.rank, self.degree_bound, self.modulus)
        piece = TruncSeries.one(self.rank, self.degree_bound, self.modulus)
        for _ in range(1, self.degree_bound):
            piece = piece.mul(-u, term_cap=term_cap)
            if piece.is_zero:
                break
            result = result + piece
        return result

    # -- text form ---------------------------------------------------------

    def __str__(self):
        if not self._key:
            return "0"
        parts = []
        for mono, coeff in self._key:
            body = "".join(f"x{v}" for v in mono)
            mag = abs(coeff)
            if not body:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            if not parts:
                parts.append(text if coeff > 0 else f"-{text}")
            else:
                parts.append(("+ " if coeff > 0 else "- ") + text)
        return " ".join(parts)

    def __repr__(self):
        dom = "ZZ" if self.modulus is None else f"F{self.modulus}"
        return f"TruncSeries({self.rank}, {self.degree_bound}, {dom}, {str(self)!r})"

    _TERM_RE = re.compile(r"^(\d+)?(?:[*·])?((?:x\d+)+)?$")

    @classmethod
    def parse(cls, text, rank, degree_bound, modulus=None):
        """Parse the printed form back into a series (round-trip exact)."""
        cleaned = text.strip()
        if cleaned == "0":
            return cls.zero(rank, degree_bound, modulus)
        cleaned = cleaned.replace("-", "+-").replace(" ", "")
        terms = {}
        for chunk in cleaned.split("+"):
            if not chunk:
                continue
            sign = 1
            if chunk.startswith("-"):
                sign = -1
                chunk = chunk[1:]
            m = cls._TERM_RE.match(chunk)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"cannot parse series term {chunk!r}")
            coeff = int(m.group(1)) if m.group(1) is not None else 1
            mono = ()
            if m.group(2):
                mono = tuple(int(v) for v in m.group(2)[1:].split("x"))
            terms[mono] = terms.get(mono, 0) + sign * coeff
        return cls(rank, degree_bound, modulus, terms)


# -- group-side operations --------------------------------------------------


def generator_image(rank, degree_bound, modulus, gen, exp, term_cap=DEFAULT_TERM_CAP):
    """Series image of a single letter: 1+x_i, or sum_{k<l} (-x_i)^k."""
    one = TruncSeries.one(rank, degree_bound, modulus)
    xi = TruncSeries.variable(rank, degree_bound, modulus, gen)
    if exp == 1:
        return one + xi
    return (one + xi).inverse(term_cap=term_cap)


def embed(word, degree_bound, modulus=None, term_cap=DEFAULT_TERM_CAP):
    """Multiplicative image of a word under a_i -> 1 + x_i.

    The result is exact in R<x_1..x_r>/X^l; over F_p this is the reduction
    of the integer image, which the tests check explicitly.
    """
    if not isinstance(word, Word):
        raise ValueError(f"embed expects a Word, got {word!r}")
    result = TruncSeries.one(word.rank, degree_bound, modulus)
    images = {}
    for gen, exp in word.letters:
        key = (gen, exp)
        if key not in images:
            images[key] = generator_image(
                word.rank, degree_bound, modulus, gen, exp, term_cap=term_cap
            )
        result = result.mul(images[key], term_cap=term_cap)
    return result


def series_mul(s, t, term_cap=DEFAULT_TERM_CAP):
    return s.mul(t, term_cap=term_cap)


def series_inv(s, term_cap=DEFAULT_TERM_CAP):
    return s.inverse(term_cap=term_cap)


def unit_order(s, term_cap=DEFAULT_TERM_CAP):
    """Multiplicative order of a constant-term-1 series over F_p.

    Such a unit has p-power order because (1+u)^p = 1 + u^p over F_p and
    powering strictly raises the valuation of u, which the truncation kills
    after at most ceil(log_p l) rounds.
    """
    if s.modulus is None:
        raise ValueError("unit_order requires a prime modulus")
    if s.constant_term != 1:
        raise ValueError(f"unit_order requires constant term 1, got {s.constant_term}")
    p = s.modulus
    order = 1
    current = s
    # The loop is bounded: each p-th power at least multiplies the valuation
    # of (current - 1) by p, and valuations >= degree_bound mean current == 1.
    for _ in range(s.degree_bound + 1):
        if current.is_one:
            return order
        current = current.power(p, term_cap=term_cap)
        order *= p
    raise RuntimeError("unit order did not stabilize below the degree bound")


def unit_image_quotient(modulus, rank, degree_bound, cap=None, term_cap=DEFAULT_TERM_CAP):
    """Finite quotient of the free group by the kernel of the 1+x_i map.

    Enumerates the subgroup of units generated by the images 1 + x_i in
    F_p<x_1..x_r>/X^l.  Returns a :class:`largequot.quotients.FiniteQuotient`
    whose elements are series.
    """
    from . import quotients

    if modulus is None or modulus < 2:
        raise ValueError("unit image quotients need a prime modulus")
    images = [
        generator_image(rank, degree_bound, modulus, g, 1, term_cap=term_cap)
        for g in range(1, rank + 1)
    ]
    params = {"modulus": modulus, "rank": rank, "degree_bound": degree_bound}
    kwargs = {} if cap is None else {"cap": cap}
    return quotients.build_quotient(
        rank, images, kind="magnus_unit", params=params, **kwargs
    )


def _serialize_unit(series):
    return str(series)


def _deserialize_unit(params, payload):
    return TruncSeries.parse(
        payload, params["rank"], params["degree_bound"], params["modulus"]
    )


def _unit_params(series):
    return {
        "modulus": series.modulus,
        "rank": series.rank,
        "degree_bound": series.degree_bound,
    }


def _register():
    from . import quotients

    quotients.register_element_kind(
        "magnus_unit",
        TruncSeries,
        serialize=_serialize_unit,
        deserialize=_deserialize_unit,
        params_of=_unit_params,
    )


_register()
