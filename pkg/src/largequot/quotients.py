"""Finite quotients of a free group, given by images of the generators.

A quotient is materialized by breadth-first closure of the generator images
inside a concrete finite group.  Element numbering is deterministic: the
identity is 0, BFS processes vertices in discovery order and edges in the
alphabet order a_1, .., a_r, a_1^-1, .., a_r^-1, so the Schreier tree and the
prefix-closed shortlex transversal are unique.  Concrete elements only need
multiplication, ``inverse()``, equality and hashing; the kinds shipped here
are residue vectors (:class:`ModVector`), truncated-series units
(:class:`largequot.series.TruncSeries`) and layered verbal cosets
(:class:`largequot.verbal.LayeredCoset`), each registered with a canonical
serialization so quotients can travel inside certificate documents.

On top of the coset graph this module implements the two presentation-level
tools the largeness pipeline needs: conjugate sets that convert a normal
closure over F into a normal closure over a finite-index subgroup, and
Reidemeister-Schreier rewriting onto the Schreier generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceeded
from .smith import smith_diagonal
from .words import Word

DEFAULT_ENUM_CAP = 10**6


class ModVector:
    """A residue vector, the element type of mod-q abelianized quotients."""

    __slots__ = ("modulus", "values")

    def __init__(self, modulus, values):
        if not isinstance(modulus, int) or modulus < 1:
            raise ValueError(f"modulus must be a positive integer, got {modulus!r}")
        self.modulus = modulus
        self.values = tuple(v % modulus for v in values)

    def __mul__(self, other):
        if not isinstance(other, ModVector):
            return NotImplemented
        if self.modulus != other.modulus or len(self.values) != len(other.values):
            raise ValueError("residue vector shape mismatch")
        return ModVector(
            self.modulus, [a + b for a, b in zip(self.values, other.values)]
        )

    def inverse(self):
        return ModVector(self.modulus, [-v for v in self.values])

    def __eq__(self, other):
        if not isinstance(other, ModVector):
            return NotImplemented
        return self.modulus == other.modulus and self.values == other.values

    def __hash__(self):
        return hash((self.modulus, self.values))

    def __repr__(self):
        return f"ModVector({self.modulus}, {self.values})"


# -- element kind registry ---------------------------------------------------

_KINDS = {}
_KIND_OF_TYPE = {}


@dataclass(frozen=True)
class ElementKind:
    name: str
    element_type: type
    serialize: callable
    deserialize: callable
    params_of: callable


def register_element_kind(name, element_type, serialize, deserialize, params_of):
    kind = ElementKind(name, element_type, serialize, deserialize, params_of)
    _KINDS[name] = kind
    _KIND_OF_TYPE[element_type] = kind
    return kind


def element_kind(name):
    if name not in _KINDS:
        raise ValueError(f"unregistered element kind {name!r}")
    return _KINDS[name]


register_element_kind(
    "modvec",
    ModVector,
    serialize=lambda v: list(v.values),
    deserialize=lambda params, payload: ModVector(params["modulus"], payload),
    params_of=lambda v: {"modulus": v.modulus, "dim": len(v.values)},
)


# -- the quotient itself -----------------------------------------------------


class FiniteQuotient:
    """A finite quotient F_r -> Q with its coset graph and Schreier tree.

    Built through :func:`build_quotient`; the fields are read-only in
    practice.  ``elements[i]`` is the concrete element with BFS index i,
    ``mult[i][g-1]`` / ``inv_mult[i][g-1]`` are the indices of
    elements[i] * image(a_g^{+-1}), and ``tree_parent[i]`` is
    ``(parent_index, (g, exp))`` for the tree edge that discovered i.
    """

    def __init__(self, rank, gen_images, elements, index, mult, inv_mult,
                 tree_parent, kind=None, params=None):
        self.rank = rank
        self.gen_images = tuple(gen_images)
        self.elements = elements
        self._index = index
        self.mult = mult
        self.inv_mult = inv_mult
        self.tree_parent = tree_parent
        self.kind = kind
        self.params = dict(params) if params else None
        self._transversal = None
        self._nontree = None

    @property
    def order(self):
        return len(self.elements)

    # -- walking the coset graph ----------------------------------------

    def _check_word(self, w):
        if not isinstance(w, Word):
            raise ValueError(f"expected a Word, got {w!r}")
        if w.rank != self.rank:
            raise ValueError(f"rank mismatch: word has {w.rank}, quotient has {self.rank}")

    def step(self, index, gen, exp):
        table = self.mult if exp == 1 else self.inv_mult
        return table[index][gen - 1]

    def coset_of(self, w):
        """BFS index of the image of w (the coset of the kernel containing w)."""
        self._check_word(w)
        c = 0
        for gen, exp in w.letters:
            c = self.step(c, gen, exp)
        return c

    def kernel_contains(self, w):
        return self.coset_of(w) == 0

    def image_order(self, w):
        """Order of the image of w in the quotient group."""
        self._check_word(w)
        start = self.coset_of(w)
        if start == 0:
            return 1
        c = start
        n = 1
        while c != 0:
            for gen, exp in w.letters:
                c = self.step(c, gen, exp)
            n += 1
        return n

    def cyclic_index(self, w):
        """Index [F : <w> ker] = order / image_order(w)."""
        o = self.image_order(w)
        assert self.order % o == 0
        return self.order // o

    # -- Schreier tree and transversal -----------------------------------

    def transversal_word(self, index):
        """Shortlex-minimal word carrying coset 0 to the given coset."""
        if self._transversal is None:
            self._transversal = [None] * self.order
            self._transversal[0] = Word.identity(self.rank)
        if self._transversal[index] is None:
            parent, letter = self.tree_parent[index]
            self._transversal[index] = self.transversal_word(parent) * Word(
                self.rank, (letter,)
            )
        return self._transversal[index]

    def transversal(self):
        return [self.transversal_word(i) for i in range(self.order)]

    def schreier_generators(self):
        """Non-tree edges (coset, gen), sorted by coset index then generator."""
        if self._nontree is None:
            tree_edges = set()
            for child in range(1, self.order):
                parent, (gen, exp) = self.tree_parent[child]
                if exp == 1:
                    tree_edges.add((parent, gen))
                else:
                    tree_edges.add((child, gen))
            labels = []
            for c in range(self.order):
                for g in range(1, self.rank + 1):
                    if (c, g) not in tree_edges:
                        labels.append((c, g))
            self._nontree = tuple(labels)
        return self._nontree

    def schreier_generator_word(self, label):
        """The subgroup element t_c * a_g * t_{c.g}^-1 of a non-tree edge."""
        c, g = label
        target = self.mult[c][g - 1]
        return (
            self.transversal_word(c)
            * Word.generator(self.rank, g)
            * self.transversal_word(target).inverse()
        )

    # -- serialization ----------------------------------------------------

    def serialize(self):
        if self.kind is None:
            raise ValueError("quotient has no registered element kind to serialize")
        kind = element_kind(self.kind)
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "gen_images": [kind.serialize(img) for img in self.gen_images],
        }

    @classmethod
    def from_spec(cls, doc, cap=DEFAULT_ENUM_CAP):
        kind = element_kind(doc["kind"])
        params = doc["params"]
        images = [kind.deserialize(params, payload) for payload in doc["gen_images"]]
        rank = len(images)
        return build_quotient(rank, images, cap=cap, kind=doc["kind"], params=params)


def build_quotient(rank, gen_images, cap=DEFAULT_ENUM_CAP, kind=None, params=None):
    """BFS closure of the generator images into a FiniteQuotient.

    ``gen_images`` must be r elements of one concrete group.  The element
    protocol is duck-typed: ``*``, ``inverse()``, ``==`` and ``hash``.
    Raises :class:`CapExceeded` when the closure passes ``cap`` elements.
    """
    gen_images = list(gen_images)
    if len(gen_images) != rank:
        raise ValueError(f"expected {rank} generator images, got {len(gen_images)}")
    if kind is None and params is None and gen_images:
        registered = _KIND_OF_TYPE.get(type(gen_images[0]))
        if registered is not None:
            kind = registered.name
            params = registered.params_of(gen_images[0])
    inverses = [img.inverse() for img in gen_images]
    identity = gen_images[0] * inverses[0] if gen_images else None
    if identity is None:
        raise ValueError("rank must be at least 1")
    elements = [identity]
    index = {identity: 0}
    mult = []
    inv_mult = []
    tree_parent = [None]
    head = 0
    while head < len(elements):
        x = elements[head]
        row = []
        inv_row = []
        for g in range(rank):
            for exp, img, target_row in ((1, gen_images[g], row),
                                         (-1, inverses[g], inv_row)):
                y = x * img
                at = index.get(y)
                if at is None:
                    at = len(elements)
                    if at >= cap:
                        raise CapExceeded("quotient enumeration", at + 1, cap)
                    elements.append(y)
                    index[y] = at
                    tree_parent.append((head, (g + 1, exp)))
                target_row.append(at)
        mult.append(row)
        inv_mult.append(inv_row)
        head += 1
    return FiniteQuotient(
        rank, gen_images, elements, index, mult, inv_mult, tree_parent,
        kind=kind, params=params,
    )


def mod_abelianization(rank, modulus, cap=DEFAULT_ENUM_CAP):
    """The mod-q abelianized quotient F_r -> (Z/q)^r."""
    images = [
        ModVector(modulus, [1 if i == g else 0 for i in range(rank)])
        for g in range(rank)
    ]
    return build_quotient(rank, images, cap=cap)


# -- conjugate sets (normal closure over F as closure over the kernel) -------


def lemma0_conjugates(quotient, base, q):
    """Coset representatives T of <base>*ker and the conjugate set Z.

    For g = base with g^q in the kernel N, the normal closure of g^q over
    the whole free group equals the normal closure over N of
    Z = { t^-1 g^q t : t in T }, where T is a right-coset transversal of
    <g>N in F.  T is read off the Schreier transversal in BFS order, so the
    representatives are shortlex-minimal and the output is deterministic.
    Returns ``(T, Z)`` as lists of words.
    """
    quotient._check_word(base)
    order = quotient.image_order(base)
    if q % order:
        raise ValueError(
            f"base^{q} is not in the kernel (image order {order} does not divide {q})"
        )
    base_image_index = quotient.coset_of(base)
    subgroup = [0]
    c = base_image_index
    while c != 0:
        subgroup.append(c)
        for gen, exp in base.letters:
            c = quotient.step(c, gen, exp)
    reps = []
    seen = [False] * quotient.order
    for idx in range(quotient.order):
        if seen[idx]:
            continue
        reps.append(idx)
        x = quotient.elements[idx]
        for h_idx in subgroup:
            seen[quotient._index[quotient.elements[h_idx] * x]] = True
    t_words = [quotient.transversal_word(i) for i in reps]
    gq = base ** q
    z_words = [gq.conjugate(t) for t in t_words]
    return t_words, z_words


# -- Reidemeister-Schreier rewriting -----------------------------------------


@dataclass
class SubgroupPresentation:
    """Presentation of N/<<relators>>^N on the Schreier generators of N.

    ``relators`` are words of rank ``generator_count`` over the Schreier
    generators, in the order of ``generator_labels``.  ``generator_words``
    are the same generators written in the ambient free group.
    """

    generator_count: int
    generator_labels: tuple
    generator_words: tuple
    relators: tuple
    source_quotient: FiniteQuotient = field(repr=False, default=None)
    source_relators: tuple = ()

    @property
    def relator_count(self):
        return len(self.relators)

    @property
    def deficiency(self):
        return self.generator_count - len(self.relators)

    def exponent_matrix(self):
        """Relator-by-generator abelianized exponent matrix."""
        rows = []
        for rel in self.relators:
            rows.append(list(rel.exponent_sums()))
        return rows


def reidemeister_schreier(quotient, relators):
    """Rewrite relators of F lying in N onto the Schreier generators of N.

    Every relator must lie in the kernel; its trace through the coset graph
    then closes up and spells a word in the non-tree Schreier generators
    (tree edges contribute nothing).  The presentation has
    1 + (r-1)*[F:N] generators and one rewritten relator per input word.
    """
    labels = quotient.schreier_generators()
    label_index = {lab: i + 1 for i, lab in enumerate(labels)}
    rewritten = []
    for w in relators:
        if not quotient.kernel_contains(w):
            raise ValueError(f"relator {w} is not in the kernel")
        out = []
        c = 0
        for gen, exp in w.letters:
            if exp == 1:
                edge = (c, gen)
                nxt = quotient.mult[c][gen - 1]
            else:
                nxt = quotient.inv_mult[c][gen - 1]
                edge = (nxt, gen)
            at = label_index.get(edge)
            if at is not None:
                out.append((at, exp))
            c = nxt
        rewritten.append(Word(len(labels) or 1, out) if labels else Word(1, ()))
    gen_words = tuple(quotient.schreier_generator_word(lab) for lab in labels)
    return SubgroupPresentation(
        generator_count=len(labels),
        generator_labels=tuple(labels),
        generator_words=gen_words,
        relators=tuple(rewritten),
        source_quotient=quotient,
        source_relators=tuple(relators),
    )


def abelian_invariants(presentation):
    """Elementary divisors of the abelianized presentation, 0 = free factor.

    The nonzero invariant factors come first in their divisibility order,
    followed by one 0 per infinite cyclic factor.
    """
    matrix = presentation.exponent_matrix()
    n = presentation.generator_count
    if not matrix:
        return [0] * n
    diag = smith_diagonal(matrix)
    nonzero = [d for d in diag if d]
    invariants = [d for d in nonzero if d > 1]
    return invariants + [0] * (n - len(nonzero))
