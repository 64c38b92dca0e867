"""Driver for the iterative periodic-quotient construction.

Starting from a free group F and a prime sequence pi = (p_1, p_2, ..), the
driver enumerates nontrivial words f_1, f_2, .. in shortlex order and, at
step i, imposes the relator g^n where g = f^{p_1 .. p_r} is the power of the
enumerated word lying in the current verbal level gamma_r and n is the exact
order of g modulo the next target level.  The target depth is r + D + 1:
D is the least extra depth at which g escapes the series (iterating the
series definition inside gamma_r identifies its depth-d level with the
ambient gamma_{r+d}, so the escape scan runs in the ambient series), and the
extra level is the headroom the largeness transfer needs.

Relator membership in the target level, square-freeness of the exponent and
strict growth of the per-level quotient orders are machine-checked.  The two
claims that justify continuing past the materialized range (the deep verbal
level of the new quotient still surjects onto a non-abelian free group, and
the one-level headroom suffices) are recorded in an assumption ledger, never
silently assumed.

All verbal computations run against free-group preimages: each imposed
relator is a proven member of its level, so the reported orders
|G_i / gamma_r(G_i)| = |F / gamma_r(F)| are exact.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import gcd, prod

import sympy

from .errors import CapExceeded
from .verbal import (
    DEFAULT_COSET_CAP,
    DEFAULT_DEPTH_CAP,
    PrimeSeq,
    _as_primeseq,
    _iter_levels,
    _order_repr,
)
from .words import power, random_reduced_word, shortlex_words

TRACE_SCHEMA = "periodic-construction-trace/1"

ASSUMPTION_SURJECTION = "free-image-surjection"
ASSUMPTION_MARGIN = "depth-margin-c"


@dataclass(frozen=True)
class ConstructionState:
    """State after a number of steps: depth, relators, orders, assumptions."""

    rank: int
    pi: PrimeSeq
    step: int = 0
    depth: int = 0
    relators: tuple = ()  # pairs (base word, exponent)
    order_history: tuple = (1,)
    assumptions: tuple = ()

    @property
    def quotient_order(self):
        return self.order_history[-1]

    def to_doc(self):
        return {
            "step": self.step,
            "rank": self.rank,
            "pi": list(self.pi.primes),
            "depth": self.depth,
            "relators": [
                {"base": str(base), "exponent": e} for base, e in self.relators
            ],
            "order_history": [format_order(n) for n in self.order_history],
            "assumptions": list(self.assumptions),
        }


def format_order(n):
    """Factored form of a positive integer, with decimal only when it fits.

    Quotient orders grow beyond anything a decimal string should carry
    around, so the canonical form is ``{"factored": "2^2 * 3^5"}``; the
    ``decimal`` field is attached while the value stays below 2**64.
    """
    if n < 1:
        raise ValueError(f"orders are positive, got {n}")
    if n == 1:
        factored = "1"
    else:
        parts = []
        for p, e in sorted(sympy.factorint(n).items()):
            parts.append(f"{p}^{e}" if e > 1 else str(p))
        factored = " * ".join(parts)
    doc = {"factored": factored}
    if n < 2**64:
        doc["decimal"] = n
    return doc


def format_factors(factors):
    """Order document from a known {prime: exponent} factorization.

    Same shape as :func:`format_order` without refactoring the value, which
    matters for orders whose decimal expansion is long.
    """
    factors = {p: e for p, e in factors.items() if e}
    if not factors:
        return {"factored": "1", "decimal": 1}
    parts = []
    for p, e in sorted(factors.items()):
        parts.append(f"{p}^{e}" if e > 1 else str(p))
    doc = {"factored": " * ".join(parts)}
    # cheap exact smallness test: sum of e*(bits(p)-1) underestimates log2
    if sum(e * (p.bit_length() - 1) for p, e in factors.items()) < 64:
        value = prod(p**e for p, e in factors.items())
        if value < 2**64:
            doc["decimal"] = value
    return doc


def parse_order(doc):
    """Inverse of :func:`format_order`."""
    if "decimal" in doc:
        return doc["decimal"]
    if doc["factored"] == "1":
        return 1
    n = 1
    for part in doc["factored"].split("*"):
        base, _, exponent = part.strip().partition("^")
        n *= int(base) ** int(exponent or 1)
    return n


def next_step(state, f_word, coset_cap=DEFAULT_COSET_CAP,
              depth_cap=DEFAULT_DEPTH_CAP):
    """Impose the relator for one enumerated word; returns (state, record).

    Raises :class:`CapExceeded` when the escape scan runs past ``depth_cap``
    or a needed level cannot be materialized, and ``ValueError`` when the
    prime sequence is too short to hold the new depth.
    """
    if f_word.is_identity:
        raise ValueError("enumerated words must be nontrivial")
    if f_word.rank != state.rank:
        raise ValueError(
            f"enumerated word has rank {f_word.rank}, construction has {state.rank}"
        )
    pi = state.pi
    r = state.depth
    max_scan = min(depth_cap, len(pi))
    if r + 1 > max_scan:
        if len(pi) < depth_cap:
            raise ValueError(
                f"prime sequence has {len(pi)} terms, too short to scan past "
                f"depth {r}"
            )
        raise CapExceeded("verbal depth", r + 1, depth_cap)
    prefix_exponent = prod(pi[i] for i in range(r))
    g = power(f_word, prefix_exponent)

    stream = _iter_levels(pi, state.rank, coset_cap)
    levels = []
    escape_depth = None
    for level in stream:
        levels.append(level)
        if level.depth <= r:
            continue
        if not level.materialized:
            raise CapExceeded(
                "verbal materialization", _order_repr(level.parent_order),
                coset_cap,
            )
        if not level.member(g):
            escape_depth = level.depth
            break
        if level.depth >= max_scan:
            if len(pi) < depth_cap:
                raise ValueError(
                    f"prime sequence exhausted at depth {max_scan} with "
                    f"{f_word}^{prefix_exponent} still inside the series"
                )
            raise CapExceeded("verbal depth", max_scan, depth_cap)
    levi_depth = escape_depth - r
    new_depth = escape_depth + 1
    if new_depth > len(pi):
        raise ValueError(
            f"prime sequence has {len(pi)} terms, cannot reach depth {new_depth}"
        )
    target = next(stream)
    levels.append(target)
    if not target.materialized:
        raise CapExceeded(
            "verbal materialization", _order_repr(target.parent_order), coset_cap
        )

    n = target.order_mod(g)
    relator_exponent = prefix_exponent * n
    if not target.member(power(g, n)):
        raise AssertionError("relator must lie in the target level")
    if pi.distinct and any(
        e > 1 for e in sympy.factorint(relator_exponent).values()
    ):
        raise AssertionError(
            f"relator exponent {relator_exponent} not square-free despite "
            "distinct primes"
        )
    level_orders = [lvl.quotient_order for lvl in levels]
    assert all(a < b for a, b in zip(level_orders, level_orders[1:]))
    new_order = level_orders[-1]
    assert new_order > state.quotient_order, "quotient order must strictly grow"

    step_index = state.step + 1
    new_assumptions = (
        f"step {step_index} [{ASSUMPTION_SURJECTION}]: after imposing "
        f"{f_word}^{relator_exponent}, the depth-{new_depth} verbal level of "
        "the new quotient is assumed to still surject onto a non-abelian "
        "free group; not machine-checked",
        f"step {step_index} [{ASSUMPTION_MARGIN}]: the single level of "
        f"headroom above the escape depth {escape_depth} is assumed to "
        "suffice for the largeness transfer; not machine-checked",
    )
    new_state = ConstructionState(
        rank=state.rank,
        pi=pi,
        step=step_index,
        depth=new_depth,
        relators=state.relators + ((f_word, relator_exponent),),
        order_history=state.order_history + (new_order,),
        assumptions=state.assumptions + new_assumptions,
    )
    record = {
        "step": step_index,
        "word": str(f_word),
        "prefix_exponent": prefix_exponent,
        "escape_depth": escape_depth,
        "levi_depth": levi_depth,
        "new_depth": new_depth,
        "order_at_level": n,
        "relator": {"base": str(f_word), "exponent": relator_exponent},
        "relator_in_level": True,
        "level_orders": [format_order(o) for o in level_orders],
        "growth": {
            "from": format_order(state.quotient_order),
            "to": format_order(new_order),
        },
        "assumptions_added": list(new_assumptions),
    }
    return new_state, record


def run_construction(primes, steps, rank=2, coset_cap=DEFAULT_COSET_CAP,
                     depth_cap=DEFAULT_DEPTH_CAP):
    """Run the driver for the given number of steps; returns a trace dict.

    Enumerated words come in shortlex order.  Hitting a cap does not raise:
    the trace comes back with ``halted`` set, the reason verbatim, and the
    steps completed so far, so a partial run is still a usable document.
    """
    pi = _as_primeseq(primes)
    if not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    state = ConstructionState(rank=rank, pi=pi)
    states = [state.to_doc()]
    records = []
    halted = False
    halt_reason = None
    word_stream = shortlex_words(rank)
    for _ in range(steps):
        f_word = next(word_stream)
        try:
            state, record = next_step(
                state, f_word, coset_cap=coset_cap, depth_cap=depth_cap
            )
        except (CapExceeded, ValueError) as exc:
            halted = True
            halt_reason = str(exc)
            break
        states.append(state.to_doc())
        records.append(record)
    return {
        "schema": TRACE_SCHEMA,
        "rank": rank,
        "pi": list(pi.primes),
        "steps_requested": steps,
        "steps_completed": len(records),
        "halted": halted,
        "halt_reason": halt_reason,
        "states": states,
        "steps": records,
        "assumptions": list(state.assumptions),
    }


def trace_to_jsonl(trace):
    """One JSON line per construction state, for streaming consumers."""
    return "\n".join(json.dumps(s, sort_keys=True) for s in trace["states"])


def replay_matches(trace, coset_cap=DEFAULT_COSET_CAP,
                   depth_cap=DEFAULT_DEPTH_CAP):
    """Re-run a serialized trace and compare the state sequence exactly."""
    again = run_construction(
        PrimeSeq(trace["pi"]), trace["steps_requested"], rank=trace["rank"],
        coset_cap=coset_cap, depth_cap=depth_cap,
    )
    return again["states"] == trace["states"]


def check_pigraded_properties(level, words=None, sample_count=1000,
                              max_length=8, seed=0):
    """Check the graded order properties of F/gamma_d on sampled words.

    For each word w with image order n: n must be square-free and divide
    p_1 .. p_d, and whenever w lies in gamma_i the order must be coprime to
    p_1 .. p_i (deeper elements only feel deeper primes).  Requires pairwise
    distinct primes.  Returns a report dict whose ``violations`` list holds
    one verbatim entry per failed check; solvability of the quotient is
    structural (an iterated extension of elementary abelian layers) and is
    reported as such rather than re-proved.
    """
    if len(set(level.primes_prefix)) != len(level.primes_prefix):
        raise ValueError("graded order properties need pairwise distinct primes")
    if words is None:
        rng = random.Random(seed)
        words = [
            random_reduced_word(rng, level.rank, rng.randint(1, max_length))
            for _ in range(sample_count)
        ]
    else:
        words = list(words)
    chain = level._chain()
    full_product = prod(level.primes_prefix)
    violations = []
    order_counts = {}
    for w in words:
        n = level.order_mod(w)
        order_counts[n] = order_counts.get(n, 0) + 1
        if any(e > 1 for e in sympy.factorint(n).values()):
            violations.append(f"order {n} of {w} is not square-free")
        if full_product % n:
            violations.append(f"order {n} of {w} does not divide {full_product}")
        depth_reached = 0
        for lvl in chain:
            if not lvl.member(w):
                break
            depth_reached = lvl.depth
        blocked = prod(level.primes_prefix[:depth_reached])
        if gcd(n, blocked) != 1:
            violations.append(
                f"{w} lies in gamma_{depth_reached} but its order {n} shares "
                f"a factor with p_1..p_{depth_reached}"
            )
    return {
        "rank": level.rank,
        "depth": level.depth,
        "primes": list(level.primes_prefix),
        "checked": len(words),
        "order_histogram": {str(n): c for n, c in sorted(order_counts.items())},
        "violations": violations,
        "solvable": True,
        "derived_length_bound": level.depth,
    }
