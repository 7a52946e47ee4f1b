"""Correction selection for ring-checked extraction gadgets.

Three decoder families: the rule decoder for distances 3/5 (one ring
round, arc pairing), the adaptive distance-7 decoder that buys extra
certainty with at most four re-measurements, and lookup tables, both for
the distance-9 gadget ring and for whole codes in block simulation.

Corrections are chosen in cat-index space (a selected cat index means
"flip the last data qubit this cat touches") and mapped to data-qubit
masks through the gadget's pair map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .circuit import GadgetCircuit
from .gadgets import GadgetSpec, build_cut_cat
from .pauli import CssCode, mask_of, parity, residual_weight_mod_generator
from .sim import CatSyndrome
from . import verify as _verify


def arc_sets(triggers: Sequence[int], ring_size: int) -> tuple[set[int], set[int]]:
    """Split the ring into the two arc-pairing hypotheses.

    Consecutive trigger pairs (a0,a1), (a2,a3), ... bound arcs of cat
    indices strictly after the first trigger up to and including the
    second; the complement holds the alternate pairing.  A triggered
    adjacent pair {r-1, r} selects exactly the shared cat qubit r.
    """
    if len(triggers) % 2:
        raise ValueError("arc pairing undefined for an odd trigger count")
    selected: set[int] = set()
    for i in range(0, len(triggers), 2):
        j = triggers[i]
        while j != triggers[i + 1]:
            j = (j + 1) % ring_size
            selected.add(j)
    return selected, set(range(ring_size)) - selected


def decode_d3d5(round0_bits: int, t: int, ring_size: int) -> frozenset[int]:
    """Single-round rule decoder for distance-3/5 gadgets.

    Odd trigger counts are left uncorrected: they always stem from a
    measurement fault, and the residual is already within budget.  For
    even counts the smaller arc side is corrected when it fits the fault
    budget, or unconditionally once the trigger count exceeds 2t.
    """
    triggers = [i for i in range(ring_size) if (round0_bits >> i) & 1]
    na = len(triggers)
    if na == 0 or na % 2:
        return frozenset()
    selected, complement = arc_sets(triggers, ring_size)
    chosen = selected if len(selected) < len(complement) else complement
    if (len(chosen) <= t and na <= 2 * t) or na > 2 * t:
        return frozenset(chosen)
    return frozenset()


# Re-measurement comparison sets for the distance-7 decoder, as offset
# tuples from an anchor stabilizer; keyed by (trigger count, variant).
_RECHECK_OFFSETS: dict[tuple[int, int], tuple[int, ...]] = {
    (1, 0): (1, 2),
    (1, 1): (-3, -2),
    (2, 0): (2, 3, 4),
    (2, 1): (-1, 0, 1),
    (2, 2): (2, 3),
    (2, 3): (-2, -1),
    (2, 4): (-1, 1),
    (3, 0): (3, 4),
    (3, 1): (2, 3),
    (3, 2): (-1, 0),
    (4, 0): (2, 3),
    (4, 1): (-1, 0),
    (4, 2): (-1, 0),
    (4, 3): (3, 4),
    (5, 0): (3, 4),
}


def j_list(n_triggered: int, variant: int, anchor: int, ring_size: int) -> tuple[int, ...]:
    """Stabilizer indices compared across rounds, reduced mod the ring size."""
    try:
        offsets = _RECHECK_OFFSETS[(n_triggered, variant)]
    except KeyError:
        raise ValueError(f"no recheck set for ({n_triggered}, {variant})") from None
    return tuple((anchor + o) % ring_size for o in offsets)


MeasureFn = Callable[[tuple[int, ...]], Mapping[int, int]]


class _Round2:
    """Lazily fetched re-measurement outcomes, compared against round one."""

    def __init__(self, round0_bits: int, ring_size: int, measure: MeasureFn):
        self.round0 = round0_bits
        self.m = ring_size
        self._measure = measure
        self.values: dict[int, int] = {}
        self.requested: list[int] = []

    def _fetch(self, indices: Iterable[int]) -> None:
        need = []
        for i in indices:
            i %= self.m
            if i not in self.values and i not in need:
                need.append(i)
        if need:
            got = self._measure(tuple(need))
            for i in need:
                self.values[i] = int(got[i]) & 1
                self.requested.append(i)

    def changed(self, indices: Iterable[int]) -> bool:
        """True if any listed stabilizer reads differently than round one."""
        idx = [i % self.m for i in indices]
        self._fetch(idx)
        return any(self.values[i] != ((self.round0 >> i) & 1) for i in idx)


def decode_d7(
    round0_bits: int, ring_size: int, measure: MeasureFn,
) -> tuple[frozenset[int], tuple[int, ...]]:
    """Adaptive distance-7 decoder.

    Dispatches on the trigger count, re-measuring at most four ring
    stabilizers through ``measure`` to separate persistent cat errors
    from transient measurement faults.  Returns the selected cat indices
    and the stabilizers actually re-measured.
    """
    m = ring_size
    triggers = [i for i in range(m) if (round0_bits >> i) & 1]
    na = len(triggers)
    r2 = _Round2(round0_bits, m, measure)
    corr: set[int] = set()

    def on(j: int) -> int:
        return (round0_bits >> (j % m)) & 1

    def find_rotation(offsets: tuple[int, ...]):
        target = set(triggers)
        for j in triggers:
            if {(j + o) % m for o in offsets} == target:
                return j
        return None

    def arc_fallback(limit: int = 3) -> None:
        selected, complement = arc_sets(triggers, m)
        if len(selected) <= limit:
            corr.update(selected)
        elif len(complement) <= limit:
            corr.update(complement)

    if na == 1:
        a0 = triggers[0]
        if r2.changed(j_list(1, 0, a0, m)):
            corr.add((a0 + 1) % m)
        elif r2.changed(j_list(1, 1, a0, m)):
            corr.add(a0)

    elif na == 2:
        a, b = triggers
        gap_ab = (b - a) % m
        gap_ba = (a - b) % m
        handled = False
        if gap_ab == 3 or gap_ba == 3:
            j = a if gap_ab == 3 else b
            if r2.changed(j_list(2, 0, j, m)):
                handled = True
        elif gap_ab == 2 or gap_ba == 2:
            j = a if gap_ab == 2 else b
            if r2.changed((j,)):
                if r2.changed(j_list(2, 2, j, m)):
                    handled = True
            elif r2.changed(((j + 2) % m,)):
                if r2.changed(j_list(2, 3, j, m)):
                    handled = True
            elif r2.changed(j_list(2, 4, j, m)):
                corr.add((j + 1) % m)
                handled = True
        if not handled:
            arc_fallback()

    elif na == 3:
        handled = True
        j = find_rotation((0, 2, 4))
        if j is not None:
            # unchanged outcomes at {j+3, j+4} mean the persistent pair
            # sits between stabilizers j+2 and j+4
            if not r2.changed(j_list(3, 0, j, m)):
                corr.add((j + 4) % m)
            else:
                corr.add((j + 1) % m)
        elif (j := find_rotation((0, 1, 2))) is not None:
            if r2.changed(((j + 1) % m,)):
                corr.add((j + 1) % m)
            elif r2.changed(((j - 1) % m,)):
                corr.add((j + 2) % m)
            elif not r2.changed((j,)):
                if r2.changed(((j - 2) % m,)):
                    corr.add((j + 2) % m)
                else:
                    corr.add((j + 1) % m)
            else:
                corr.add((j + 2) % m)
        elif (j := find_rotation((0, 2, 3))) is not None:
            if r2.changed(j_list(3, 1, j, m)):
                corr.add((j + 1) % m)
            else:
                handled = False
        elif (j := find_rotation((0, 1, 3))) is not None:
            if r2.changed(j_list(3, 2, j, m)):
                corr.add((j + 2) % m)
            else:
                handled = False
        else:
            handled = False
        if not handled:
            for g in range(m):
                if on(g) and on(g + 1):
                    corr.add((g + 1) % m)
                    handled = True
        if not handled:
            for g in range(m):
                if on(g) and on(g + 2):
                    corr.add((g + 1) % m)

    elif na == 4:
        handled = False
        j = find_rotation((0, 1, 2, 3))
        if j is not None:
            if r2.changed(j_list(4, 0, j, m)) and r2.changed(j_list(4, 1, j, m)):
                handled = True
        elif (j := find_rotation((0, 1, 2, 4))) is not None:
            if r2.changed(j_list(4, 2, j, m)):
                handled = True
        elif (j := find_rotation((0, 2, 3, 4))) is not None:
            if r2.changed(j_list(4, 3, j, m)):
                handled = True
        if not handled:
            arc_fallback()

    elif na == 5:
        j = find_rotation((0, 1, 2, 3, 4))
        if j is not None:
            if not r2.changed(j_list(5, 0, j, m)):
                corr.add((j + 4) % m)
            else:
                corr.add((j + 3) % m)
        else:
            for g in range(m):
                if on(g) and on(g + 1):
                    if not (on(g - 1) and on(g + 2)) or (on(g + 2) and on(g + 3)):
                        corr.add((g + 1) % m)

    elif na >= 6 and na % 2 == 0:
        selected, complement = arc_sets(triggers, m)
        chosen = selected if len(selected) < len(complement) else complement
        if (len(chosen) <= 3 and na == 6) or na > 6:
            corr.update(chosen)

    # odd trigger counts above five are unreachable within the fault
    # budget; leave them uncorrected

    if len(r2.requested) > 4:
        raise AssertionError(
            f"re-measured {len(r2.requested)} stabilizers, budget is 4"
        )
    return frozenset(corr), tuple(r2.requested)


def plan_round2_d7(round1, ring_size: int | None = None) -> frozenset[int]:
    """Stabilizers the distance-7 decoder re-measures when round two echoes
    round one; at most four for any trigger pattern."""
    if isinstance(round1, CatSyndrome):
        bits, m = round1.rounds[0], round1.cat_count
    else:
        bits, m = round1, ring_size
        if m is None:
            raise ValueError("ring_size required with raw round bits")

    def echo(indices: tuple[int, ...]) -> dict[int, int]:
        return {i: (bits >> i) & 1 for i in indices}

    _, requested = decode_d7(bits, m, echo)
    return frozenset(requested)


def cats_to_mask(g: GadgetCircuit, cats: Iterable[int]) -> int:
    """Map selected cat indices to a data-qubit correction mask."""
    out = 0
    for c in cats:
        out ^= 1 << g.correction_qubit(c)
    return out


class RuleDecoderD3D5:
    """Arc-pairing decoder bound to a distance-3 or -5 gadget."""

    needs_round2 = False

    def __init__(self, g: GadgetCircuit, t: int):
        if t not in (1, 2):
            raise ValueError("rule decoder covers t in {1, 2}")
        self.g = g
        self.t = t

    def decode(self, syn: CatSyndrome, measure: MeasureFn | None = None) -> int:
        cats = decode_d3d5(syn.rounds[0], self.t, self.g.cat_count)
        return cats_to_mask(self.g, cats)


class RuleDecoderD7:
    """Adaptive decoder bound to a distance-7 gadget."""

    needs_round2 = True

    def __init__(self, g: GadgetCircuit):
        self.g = g

    def decode(self, syn: CatSyndrome, measure: MeasureFn | None = None) -> int:
        if measure is None:
            measure = lambda idx: {i: syn.round_bit(0, i) for i in idx}
        cats, _ = decode_d7(syn.rounds[0], self.g.cat_count, measure)
        return cats_to_mask(self.g, cats)


class IdentityDecoder:
    """Applies no correction; useful as a verification counterexample."""

    needs_round2 = False

    def decode(self, syn: CatSyndrome, measure: MeasureFn | None = None) -> int:
        return 0


class LutBuildError(RuntimeError):
    """No correction vector satisfies the accumulated constraints: the
    requested rounds/gamma combination is not t-FT decodable."""


@dataclass(frozen=True)
class CutCatLUT:
    """Ring-syndrome lookup table for a fixed gadget geometry.

    Keys concatenate all full-round outcome bits (round 0 lowest);
    values are data-qubit correction masks.  Unreachable syndromes are
    decoded as zero correction.
    """

    gamma: int
    t: int
    rounds: int
    cat_count: int
    table: dict[int, int]

    def lookup(self, key: int) -> int:
        return self.table.get(key, 0)

    def to_json(self) -> str:
        n_bits = self.rounds * self.cat_count
        entries = [
            {
                "syndrome": _bitstring(key, n_bits),
                "correction": _bitstring(corr, self.gamma),
            }
            for key, corr in sorted(self.table.items())
        ]
        return json.dumps(
            {
                "format": "cutcat-lut-v1",
                "gamma": self.gamma,
                "t": self.t,
                "rounds": self.rounds,
                "cat_count": self.cat_count,
                "entries": entries,
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "CutCatLUT":
        doc = json.loads(text)
        if doc.get("format") != "cutcat-lut-v1":
            raise ValueError("unknown LUT format")
        table = {
            _bitmask(e["syndrome"]): _bitmask(e["correction"])
            for e in doc["entries"]
        }
        return cls(doc["gamma"], doc["t"], doc["rounds"], doc["cat_count"], table)


def _bitstring(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def _bitmask(s: str) -> int:
    out = 0
    for i, ch in enumerate(s):
        if ch == "1":
            out |= 1 << i
    return out


class LutDecoder:
    """Table-backed decoder over the concatenated full-round syndrome."""

    needs_round2 = False

    def __init__(self, lut: CutCatLUT):
        self.lut = lut

    def decode(self, syn: CatSyndrome, measure: MeasureFn | None = None) -> int:
        if syn.cat_count != self.lut.cat_count or len(syn.rounds) != self.lut.rounds:
            raise ValueError("syndrome shape does not match the table")
        return self.lut.lookup(syn.key())


def _coset_candidates(first_error: int, budget: int, gamma: int):
    """Corrections within coset distance ``budget`` of ``first_error``.

    Complement corrections are equivalent under the coset metric, so
    plain-weight offsets up to the budget cover every class.
    """
    from itertools import combinations

    yield first_error
    for w in range(1, budget + 1):
        for qubits in combinations(range(gamma), w):
            yield first_error ^ mask_of(qubits)


def _search_correction(constraints: dict[int, int], gamma: int, t: int) -> int | None:
    entries = list(constraints.items())

    def admissible(c: int) -> bool:
        return all(
            residual_weight_mod_generator(e ^ c, gamma) <= w for e, w in entries
        )

    if admissible(0):
        return 0
    for e, _ in entries:
        if admissible(e):
            return e
    first_e, first_w = entries[0]
    for cand in _coset_candidates(first_e, first_w, gamma):
        if admissible(cand):
            return cand
    return None


def build_cut_cat_lut(
    spec: GadgetSpec, dedupe: bool = True, gadget: GadgetCircuit | None = None,
) -> CutCatLUT:
    """Exhaustive-search construction of the ring-syndrome table.

    Inserts every X-fault combination up to weight t, accumulates the
    (residual, weight) constraints per syndrome, and searches a
    correction consistent with all of them under the coset metric.
    Deterministic: enumeration is weight-ascending lexicographic and the
    zero vector, stored residuals, then bounded offsets are tried in
    that order.
    """
    if spec.is_adaptive:
        raise ValueError("LUT construction requires a non-adaptive gadget")
    g = gadget if gadget is not None else build_cut_cat(spec)
    t = spec.t
    constraints: dict[int, dict[int, int]] = {}
    for key, residual, w in _verify.oracle_residuals(g, t, dedupe=dedupe):
        per_syn = constraints.setdefault(key, {})
        if residual not in per_syn:
            per_syn[residual] = w
    table: dict[int, int] = {}
    for key, cons in constraints.items():
        corr = _search_correction(cons, spec.gamma, t)
        if corr is None:
            raise LutBuildError(
                f"syndrome {key:#x} admits no correction within weight {t}"
            )
        table[key] = corr
    assert table.get(0, 0) == 0, "zero syndrome must map to zero correction"
    return CutCatLUT(
        gamma=spec.gamma,
        t=t,
        rounds=spec.rounds,
        cat_count=spec.cat_count,
        table=table,
    )


def decode_lut(lut: CutCatLUT, syn: CatSyndrome) -> int:
    """Table hit returns the stored correction; a miss means the syndrome
    is unreachable by <= t faults and decodes to zero."""
    return LutDecoder(lut).decode(syn)


@dataclass(frozen=True)
class CodeLUT:
    """Minimum-weight-representative tables for whole-code decoding.

    ``x_table`` corrects X errors and is keyed by the Z-generator
    syndrome; ``z_table`` mirrors it.  First-assigned (lowest-weight,
    lexicographically first) representative wins per syndrome.
    """

    n: int
    weight_cap: int
    x_table: dict[int, int]
    z_table: dict[int, int]

    def correct_x(self, syndrome_bits: int) -> int | None:
        return self.x_table.get(syndrome_bits)

    def correct_z(self, syndrome_bits: int) -> int | None:
        return self.z_table.get(syndrome_bits)


def _rows_syndrome(rows: Sequence[int], err: int) -> int:
    out = 0
    for i, row in enumerate(rows):
        out |= parity(row & err) << i
    return out


def build_code_lut(
    code: CssCode, weight_cap: int | None = None, max_patterns: int = 5_000_000,
) -> CodeLUT:
    """Enumerate error patterns in ascending weight, assigning each fresh
    syndrome its first (minimum-weight) representative."""
    from itertools import combinations
    from math import comb

    cap = code.t if weight_cap is None else weight_cap
    total = sum(comb(code.n, w) for w in range(cap + 1))
    if total > max_patterns:
        raise ValueError(
            f"enumeration of {total} patterns exceeds cap {max_patterns}"
        )

    def fill(rows: Sequence[int]) -> dict[int, int]:
        table: dict[int, int] = {0: 0}
        for w in range(1, cap + 1):
            for qubits in combinations(range(code.n), w):
                err = mask_of(qubits)
                table.setdefault(_rows_syndrome(rows, err), err)
        return table

    return CodeLUT(
        n=code.n,
        weight_cap=cap,
        x_table=fill(code.hz),
        z_table=fill(code.hx),
    )
