"""Iterated verbal quotients gamma_0 = F, gamma_d = [H,H]H^{q_d} for H = gamma_{d-1}.

Each level factor H/[H,H]H^q is elementary abelian of exponent q over the
Schreier basis of H, so membership and normal forms reduce to exponent
vectors: a word u in gamma_{d-1} lies in gamma_d iff its exponent vector over
the Schreier generators of gamma_{d-1} vanishes mod q_d.  The vector is read
off by walking u through the coset graph of F/gamma_{d-1} and counting signed
crossings of non-tree edges; no rewriting or free reduction is needed for the
abelianized count.

The layered normal form of a coset w*gamma_d is one vector per level,
computed by repeatedly subtracting the canonical representative (the product
of Schreier basis words raised to the vector's entries).  F/gamma_d is only
materialized as an explicit group (via :class:`LayeredCoset` elements) while
its order fits the materialization cap; deeper levels still know their order
and Schreier rank through the closed product formula

    |F/gamma_d| = |F/gamma_{d-1}| * q_d ^ (1 + (r-1)|F/gamma_{d-1}|),

but raise :class:`NotMaterializedError` for membership queries.
"""

from __future__ import annotations

from itertools import islice

import sympy

from .errors import CapExceeded, NotMaterializedError
from .quotients import ModVector, build_quotient, register_element_kind
from .words import Word, parse_word, power

DEFAULT_COSET_CAP = 10**4
DEFAULT_DEPTH_CAP = 16

# Orders double-exponentiate along the series; past this exponent the value
# is an exponent tower nothing downstream could store or print anyway.
ORDER_EXPONENT_CAP = 10**6


def _order_repr(n):
    if n is None:
        return "beyond representation"
    if n < 10**24:
        return str(n)
    return f"about 10^{int(n.bit_length() * 0.30103)}"


class PrimeSeq:
    """A finite sequence of primes q_1, q_2, .. indexing the verbal levels."""

    def __init__(self, primes):
        primes = tuple(int(p) for p in primes)
        if not primes:
            raise ValueError("prime sequence must be nonempty")
        for p in primes:
            if not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
        self.primes = primes

    @property
    def distinct(self):
        return len(set(self.primes)) == len(self.primes)

    def shift(self, k):
        """The tail sequence q_{k+1}, q_{k+2}, .."""
        if k >= len(self.primes):
            raise ValueError(f"cannot shift a {len(self.primes)}-term sequence by {k}")
        return PrimeSeq(self.primes[k:])

    def __len__(self):
        return len(self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    def __repr__(self):
        return f"PrimeSeq({list(self.primes)})"


def _as_primeseq(primes):
    return primes if isinstance(primes, PrimeSeq) else PrimeSeq(primes)


class VerbalLevel:
    """Level d of the series, holding the coset data of F/gamma_{d-1}.

    ``parent_quotient`` is the finite quotient F/gamma_{d-1} (``None`` when
    the materialization cap was passed) and ``basis_words`` its Schreier
    generators as words of F, i.e. a free basis of gamma_{d-1}.
    ``schreier_rank`` and ``quotient_order`` outlive materialization, but
    once they pass ORDER_EXPONENT_CAP digits-wise they stop being stored and
    accessing them raises :class:`CapExceeded`.
    """

    def __init__(self, rank, depth, prime, primes_prefix, parent_level,
                 parent_quotient, basis_words, parent_order, schreier_rank,
                 quotient_order):
        self.rank = rank
        self.depth = depth
        self.prime = prime
        self.primes_prefix = primes_prefix
        self.parent_level = parent_level
        self.parent_quotient = parent_quotient
        self.basis_words = basis_words
        self.parent_order = parent_order
        self._schreier_rank = schreier_rank
        self._quotient_order = quotient_order

    @property
    def schreier_rank(self):
        if self._schreier_rank is None:
            raise CapExceeded(
                f"depth-{self.depth} basis rank", "an exponent tower",
                ORDER_EXPONENT_CAP,
            )
        return self._schreier_rank

    @property
    def quotient_order(self):
        if self._quotient_order is None:
            raise CapExceeded(
                f"depth-{self.depth} quotient order", "an exponent tower",
                ORDER_EXPONENT_CAP,
            )
        return self._quotient_order

    def __repr__(self):
        return (
            f"VerbalLevel(depth={self.depth}, primes={list(self.primes_prefix)}, "
            f"rank={self.rank}, order={_order_repr(self._quotient_order)})"
        )

    @property
    def materialized(self):
        return self.parent_quotient is not None

    def _require_materialized(self):
        if not self.materialized:
            raise NotMaterializedError(
                f"level {self.depth} has no coset data: |F/gamma_{self.depth - 1}| "
                f"= {_order_repr(self.parent_order)} exceeded the "
                "materialization cap"
            )

    def _chain(self):
        levels = []
        lvl = self
        while lvl is not None:
            levels.append(lvl)
            lvl = lvl.parent_level
        return levels[::-1]

    def component_vector(self, u):
        """Exponent vector of u over the Schreier basis of gamma_{d-1}, mod q_d.

        Only meaningful when u lies in gamma_{d-1}; the walk closing up is
        exactly that membership, and a word outside gamma_{d-1} raises.
        """
        self._require_materialized()
        quotient = self.parent_quotient
        labels = quotient.schreier_generators()
        label_index = {lab: i for i, lab in enumerate(labels)}
        counts = [0] * len(labels)
        c = 0
        for gen, exp in u.letters:
            if exp == 1:
                edge = (c, gen)
                nxt = quotient.mult[c][gen - 1]
            else:
                nxt = quotient.inv_mult[c][gen - 1]
                edge = (nxt, gen)
            at = label_index.get(edge)
            if at is not None:
                counts[at] += exp
            c = nxt
        if c != 0:
            raise ValueError(
                f"word is not in gamma_{self.depth - 1}; its level-{self.depth} "
                "vector is undefined"
            )
        return tuple(v % self.prime for v in counts)

    def representative(self, vector):
        """Canonical preimage of a level vector: product of basis powers."""
        self._require_materialized()
        out = Word.identity(self.rank)
        for basis_word, e in zip(self.basis_words, vector):
            if e:
                out = out * power(basis_word, e)
        return out

    def normal_form(self, w):
        """Layered exponent vectors (one per level) of the coset w*gamma_d."""
        u = w
        vectors = []
        for lvl in self._chain():
            v = lvl.component_vector(u)
            vectors.append(v)
            if lvl.depth < self.depth and any(v):
                u = u * lvl.representative(v).inverse()
        return tuple(vectors)

    def member(self, w):
        """Whether w lies in gamma_d (short-circuits on the first level)."""
        u = w
        for lvl in self._chain():
            if any(lvl.component_vector(u)):
                return False
            if lvl.depth == self.depth:
                return True
        raise AssertionError("unreachable")

    def order_mod(self, w):
        """Order of the coset w*gamma_d in F/gamma_d, level by level.

        Each level factor is elementary abelian of exponent q, so the order
        gains a factor q exactly at the levels where the running power of w
        has a nonzero component vector.
        """
        n = 1
        u = w
        for lvl in self._chain():
            v = lvl.component_vector(u)
            if any(v):
                n *= lvl.prime
                u = power(u, lvl.prime)
        return n


class LayeredCoset:
    """A coset of gamma_d carried by a representative word.

    Multiplication concatenates representatives; equality and hashing use
    the layered normal form, which is a complete coset invariant.  This is
    what lets :func:`largequot.quotients.build_quotient` enumerate F/gamma_d
    without a multiplication table for the extension.
    """

    __slots__ = ("level", "word", "nf")

    def __init__(self, level, word, nf=None):
        self.level = level
        self.word = word
        self.nf = nf if nf is not None else level.normal_form(word)

    def _same_series(self, other):
        return (
            self.level.depth == other.level.depth
            and self.level.primes_prefix == other.level.primes_prefix
            and self.level.rank == other.level.rank
        )

    def __mul__(self, other):
        if not isinstance(other, LayeredCoset):
            return NotImplemented
        if not self._same_series(other):
            raise ValueError("cosets of different verbal quotients")
        return LayeredCoset(self.level, self.word * other.word)

    def inverse(self):
        return LayeredCoset(self.level, self.word.inverse())

    def __eq__(self, other):
        if not isinstance(other, LayeredCoset):
            return NotImplemented
        return self._same_series(other) and self.nf == other.nf

    def __hash__(self):
        return hash(
            (self.level.depth, self.level.primes_prefix, self.level.rank, self.nf)
        )

    def __repr__(self):
        return f"LayeredCoset(depth={self.level.depth}, word={self.word})"


def _iter_levels(primes, rank, coset_cap):
    """Yield levels 1, 2, .. lazily.

    The coset graph of F/gamma_d is built only when level d+1 is pulled, so
    consumers that stop early never pay for enumerations they do not use.
    """
    primes = _as_primeseq(primes)
    parent_quotient = build_quotient(rank, [ModVector(1, (0,))] * rank)
    basis = tuple(Word.generator(rank, g) for g in range(1, rank + 1))
    parent_order = 1
    parent_level = None
    for d in range(1, len(primes) + 1):
        if d > 1:
            parent_order = parent_level._quotient_order
            if (
                parent_order is not None
                and parent_order <= coset_cap
                and parent_level.materialized
            ):
                images = [
                    LayeredCoset(parent_level, Word.generator(rank, g))
                    for g in range(1, rank + 1)
                ]
                parent_quotient = build_quotient(
                    rank,
                    images,
                    cap=coset_cap,
                    kind="verbal",
                    params={
                        "primes": list(parent_level.primes_prefix),
                        "rank": rank,
                        "depth": parent_level.depth,
                    },
                )
                basis = tuple(
                    parent_quotient.schreier_generator_word(lab)
                    for lab in parent_quotient.schreier_generators()
                )
            else:
                parent_quotient = None
                basis = None
        q = primes[d - 1]
        if parent_order is None:
            schreier_rank = None
            quotient_order = None
        else:
            schreier_rank = 1 + (rank - 1) * parent_order
            if schreier_rank > ORDER_EXPONENT_CAP:
                quotient_order = None
            else:
                quotient_order = parent_order * q**schreier_rank
        level = VerbalLevel(
            rank=rank,
            depth=d,
            prime=q,
            primes_prefix=tuple(primes[i] for i in range(d)),
            parent_level=parent_level,
            parent_quotient=parent_quotient,
            basis_words=basis,
            parent_order=parent_order,
            schreier_rank=schreier_rank,
            quotient_order=quotient_order,
        )
        yield level
        parent_level = level


def build_series(primes, rank, depth, coset_cap=DEFAULT_COSET_CAP):
    """Materialize levels 1..depth of the series over the given primes.

    Returns the list of :class:`VerbalLevel`; depth 0 gives an empty list.
    Levels stay usable for order/size queries past the materialization cap,
    but membership needs |F/gamma_{d-1}| <= coset_cap.
    """
    primes = _as_primeseq(primes)
    if not isinstance(depth, int) or depth < 0:
        raise ValueError(f"depth must be a nonnegative integer, got {depth!r}")
    if depth > len(primes):
        raise ValueError(
            f"prime sequence has {len(primes)} terms, cannot build depth {depth}"
        )
    return list(islice(_iter_levels(primes, rank, coset_cap), depth))


def quotient_order(primes, rank, depth):
    """|F/gamma_depth| by the closed product formula (no materialization).

    Raises :class:`CapExceeded` once the running exponent passes
    ORDER_EXPONENT_CAP; by then the value is an exponent tower.
    """
    primes = _as_primeseq(primes)
    order = 1
    for d in range(1, depth + 1):
        exponent = 1 + (rank - 1) * order
        if exponent > ORDER_EXPONENT_CAP:
            raise CapExceeded(
                f"depth-{d} quotient order exponent", _order_repr(exponent),
                ORDER_EXPONENT_CAP,
            )
        order *= primes[d - 1] ** exponent
    return order


def quotient_order_factors(primes, rank, depth):
    """{prime: exponent} factorization of |F/gamma_depth|.

    The factored form outlives :func:`quotient_order` by one level: the
    exponents are the Schreier ranks, which stay representable until the
    order itself already is not.
    """
    primes = _as_primeseq(primes)
    factors = {}
    order = 1
    for d in range(1, depth + 1):
        exponent = 1 + (rank - 1) * order
        q = primes[d - 1]
        factors[q] = factors.get(q, 0) + exponent
        if d < depth:
            if exponent > ORDER_EXPONENT_CAP:
                raise CapExceeded(
                    f"depth-{d} quotient order exponent", _order_repr(exponent),
                    ORDER_EXPONENT_CAP,
                )
            order *= q**exponent
    return factors


def member(level, w):
    return level.member(w)


def normal_form(level, w):
    return level.normal_form(w)


def order_mod(level, w):
    return level.order_mod(w)


def levi_bound(words, primes, depth_cap=DEFAULT_DEPTH_CAP,
               coset_cap=DEFAULT_COSET_CAP):
    """Least D <= depth_cap with no word of S in gamma_D.

    By the nesting gamma_{D+1} <= gamma_D this single D works for every
    deeper level as well.  Raises ``ValueError`` for an identity word (it
    lies in every level) and :class:`CapExceeded` when depth_cap is reached
    without success or a required level cannot be materialized.
    """
    primes = _as_primeseq(primes)
    words = list(words)
    if not words:
        raise ValueError("need at least one word")
    rank = words[0].rank
    for w in words:
        if w.is_identity:
            raise ValueError("the identity word lies in every verbal level")
        if w.rank != rank:
            raise ValueError("words of mixed rank")
    if depth_cap < 1:
        raise CapExceeded("verbal depth", 1, depth_cap)
    max_depth = min(depth_cap, len(primes))
    for level in islice(_iter_levels(primes, rank, coset_cap), max_depth):
        if not level.materialized:
            raise CapExceeded(
                "verbal materialization", _order_repr(level.parent_order),
                coset_cap,
            )
        if not any(level.member(w) for w in words):
            return level.depth
    if len(primes) < depth_cap:
        raise ValueError(
            f"prime sequence exhausted at depth {max_depth} before avoiding the set"
        )
    raise CapExceeded("verbal depth", max_depth, depth_cap)


def _serialize_coset(coset):
    return str(coset.word)


_LEVEL_CACHE = {}


def _level_for(params):
    key = (tuple(params["primes"]), params["rank"], params["depth"])
    if key not in _LEVEL_CACHE:
        levels = build_series(list(key[0]), key[1], key[2])
        _LEVEL_CACHE[key] = levels[-1]
    return _LEVEL_CACHE[key]


def _deserialize_coset(params, payload):
    level = _level_for(params)
    return LayeredCoset(level, parse_word(payload, params["rank"]))


def _coset_params(coset):
    return {
        "primes": list(coset.level.primes_prefix),
        "rank": coset.level.rank,
        "depth": coset.level.depth,
    }


register_element_kind(
    "verbal",
    LayeredCoset,
    serialize=_serialize_coset,
    deserialize=_deserialize_coset,
    params_of=_coset_params,
)
