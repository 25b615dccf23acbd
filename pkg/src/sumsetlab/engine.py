"""Sumset computation and bound verification.

Product sets are bit masks built from Cayley-table rows.  The lower bound
checked everywhere is min(p, |A| + |B| - 1) for plain products and
min(p, |A| + |B| - 3) for products restricted to distinct elements, where p
is the group's minimal torsion (INFINITY for the trivial group, in which case
the minimum is the size term alone).

Verification enumerates ordered pairs (A, B) of nonempty subsets: products
need not commute, so no symmetry reduction is applied.  All modes are
deterministic: pairs are visited in ascending mask order (A outer, B inner),
sampled pairs are drawn up front from a SplitMix64 stream, and multi-worker
runs chunk the pair range on fixed boundaries and merge results in chunk
order, so reports are identical for any worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .groups import FiniteGroup, SubsetMask, iter_bits
from .rng import SplitMix64
from .structure import INFINITY, minimal_torsion

THEOREMS = ("cd", "eh")
EXHAUSTIVE_DEFAULT_LIMIT = 11   # (2^11 - 1)^2 pairs is seconds of work
EXHAUSTIVE_HARD_CEILING = 20
_CHUNK_MASKS = 256
_CHUNK_PAIRS = 2048


def _check_theorem(theorem: str) -> str:
    t = theorem.lower()
    if t not in THEOREMS:
        raise ValueError(f"theorem must be one of {THEOREMS}, got {theorem!r}")
    return t


def _size_slack(theorem: str) -> int:
    return 1 if theorem == "cd" else 3


def _check_mask(g: FiniteGroup, m: SubsetMask, name: str) -> None:
    if m.width != g.order:
        raise ValueError(f"mask {name} has width {m.width}, group order is {g.order}")


# ---------------------------------------------------------------------------
# product sets


def product_set(g: FiniteGroup, a: SubsetMask, b: SubsetMask) -> SubsetMask:
    """The product set {xy : x in a, y in b} as a mask.

    Union over x in a of the row-x translate of b's mask.
    """
    _check_mask(g, a, "a")
    _check_mask(g, b, "b")
    rows = g.op_rows()
    out = 0
    for x in iter_bits(a.bits):
        row = rows[x]
        translated = 0
        for y in iter_bits(b.bits):
            translated |= 1 << row[y]
        out |= translated
    return SubsetMask(out, g.order)


def restricted_product_set(g: FiniteGroup, a: SubsetMask, b: SubsetMask) -> SubsetMask:
    """The product set restricted to pairs of distinct elements (x != y)."""
    _check_mask(g, a, "a")
    _check_mask(g, b, "b")
    rows = g.op_rows()
    out = 0
    for x in iter_bits(a.bits):
        row = rows[x]
        rest = b.bits & ~(1 << x)
        translated = 0
        for y in iter_bits(rest):
            translated |= 1 << row[y]
        out |= translated
    return SubsetMask(out, g.order)


# ---------------------------------------------------------------------------
# bound checks


@dataclass(frozen=True)
class BoundCheck:
    """One pair's bound evaluation, with the witness masks."""

    group: str
    a: SubsetMask
    b: SubsetMask
    a_size: int
    b_size: int
    product_size: int
    p_g: float
    bound: int
    holds: bool

    def to_json_dict(self) -> dict:
        return {
            "group": self.group,
            "a": list(self.a.elements()),
            "b": list(self.b.elements()),
            "a_size": self.a_size,
            "b_size": self.b_size,
            "product_size": self.product_size,
            "p_g": None if self.p_g == INFINITY else int(self.p_g),
            "bound": self.bound,
            "holds": self.holds,
        }


def cd_bound(g: FiniteGroup, a: SubsetMask, b: SubsetMask,
             theorem: str = "cd") -> BoundCheck:
    """Evaluate the product-size lower bound for one pair.

    Plain products require nonempty sets; the restricted variant accepts any
    sets (its bound can be negative, making the check vacuous).
    """
    theorem = _check_theorem(theorem)
    if theorem == "cd" and (len(a) == 0 or len(b) == 0):
        raise ValueError("plain product bound requires nonempty sets")
    product = (product_set if theorem == "cd" else restricted_product_set)(g, a, b)
    p = minimal_torsion(g)
    bound = int(min(p, len(a) + len(b) - _size_slack(theorem)))
    size = len(product)
    return BoundCheck(group=g.label, a=a, b=b, a_size=len(a), b_size=len(b),
                      product_size=size, p_g=p, bound=bound, holds=size >= bound)


# ---------------------------------------------------------------------------
# verification reports


@dataclass(frozen=True)
class Caps:
    """Size caps for capped verification; None means unconstrained."""

    max_a_size: int | None = None
    max_b_size: int | None = None
    sum_cap: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "kind": "size_capped",
            "max_a_size": self.max_a_size,
            "max_b_size": self.max_b_size,
            "sum_cap": self.sum_cap,
        }


@dataclass(frozen=True)
class SamplingPlan:
    """Seeded sampling: ``count`` pairs, uniform over nonempty masks or of
    fixed sizes (|A|, |B|)."""

    seed: int
    count: int
    fixed_sizes: tuple[int, int] | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def to_json_dict(self) -> dict:
        dist = ("uniform" if self.fixed_sizes is None
                else {"fixed_sizes": list(self.fixed_sizes)})
        return {"kind": "sampled", "seed": self.seed, "count": self.count,
                "distribution": dist}


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a verification run.

    ``wall_time`` is informational only and deliberately excluded from the
    JSON payload so that identical runs serialize to identical bytes.
    """

    group: str
    group_order: int
    theorem: str
    mode: dict
    p_g: float
    pairs_checked: int
    violations: tuple[BoundCheck, ...]
    extremal_count: int
    wall_time: float

    def to_json_dict(self) -> dict:
        return {
            "schema": "sumsetlab.verification/1",
            "group": self.group,
            "group_order": self.group_order,
            "theorem": self.theorem,
            "mode": self.mode,
            "p_g": None if self.p_g == INFINITY else int(self.p_g),
            "pairs_checked": self.pairs_checked,
            "violations": [v.to_json_dict() for v in self.violations],
            "extremal_count": self.extremal_count,
        }


def _run_chunks(chunk_fn: Callable, chunks: Sequence, workers: int):
    """Deterministic parallel map: results merged in chunk order."""
    if workers <= 1:
        return [chunk_fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(chunk_fn, chunks))


def _op_u64(g: FiniteGroup) -> np.ndarray:
    cached = g._cache.get("op_u64")
    if cached is None:
        cached = g.op.astype(np.uint64)
        cached.setflags(write=False)
        g._cache["op_u64"] = cached
    return cached


def _translate_columns(op64: np.ndarray, elts: list[int], restricted: bool) -> np.ndarray:
    """For fixed A, the mask of A*b (or its a != b restriction) per element b."""
    sub = op64[elts, :]
    contrib = np.left_shift(np.uint64(1), sub)
    if restricted:
        contrib[np.arange(len(elts)), elts] = 0
    return np.bitwise_or.reduce(contrib, axis=0)


# ---------------------------------------------------------------------------
# exhaustive verification


def verify_exhaustive(
    g: FiniteGroup,
    theorem: str = "cd",
    caps: Caps | None = None,
    *,
    exhaustive_limit: int = EXHAUSTIVE_DEFAULT_LIMIT,
    workers: int = 1,
) -> VerificationReport:
    """Check the bound over all ordered pairs of nonempty subsets.

    Without caps the group order must stay within ``exhaustive_limit``; with
    caps only pairs with |A| <= max_a_size, |B| <= max_b_size and
    |A| + |B| <= sum_cap are enumerated.
    """
    theorem = _check_theorem(theorem)
    start = time.perf_counter()
    if caps is None:
        if g.order > exhaustive_limit:
            raise ValueError(
                f"order {g.order} exceeds the exhaustive limit {exhaustive_limit}; "
                "use caps or sampling"
            )
        if g.order > EXHAUSTIVE_HARD_CEILING:
            raise ValueError(f"order {g.order} exceeds the hard exhaustive ceiling")
        pairs, extremal, violations = _verify_full(g, theorem, workers)
        mode = {"kind": "exhaustive"}
    else:
        pairs, extremal, violations = _verify_capped(g, theorem, caps, workers)
        mode = caps.to_json_dict()
    return VerificationReport(
        group=g.label, group_order=g.order, theorem=theorem, mode=mode,
        p_g=minimal_torsion(g), pairs_checked=pairs,
        violations=tuple(violations), extremal_count=extremal,
        wall_time=time.perf_counter() - start,
    )


def _verify_full(g: FiniteGroup, theorem: str, workers: int):
    n = g.order
    total = 1 << n
    slack = _size_slack(theorem)
    p = minimal_torsion(g)
    p_finite = None if p == INFINITY else int(p)
    op64 = _op_u64(g)
    b_pop = np.bitwise_count(np.arange(total, dtype=np.uint64)).astype(np.int32)
    restricted = theorem == "eh"

    def chunk_fn(bounds_range):
        lo, hi = bounds_range
        unions = np.zeros(total, dtype=np.uint64)
        pairs = 0
        extremal = 0
        violations = []
        for a_mask in range(lo, hi):
            if a_mask == 0:
                continue
            elts = list(iter_bits(a_mask))
            cols = _translate_columns(op64, elts, restricted)
            unions[0] = 0
            for i in range(n - 1, -1, -1):
                step = 2 << i
                unions[(1 << i)::step] = unions[::step][: total >> (i + 1)] | cols[i]
            sizes = np.bitwise_count(unions[1:]).astype(np.int32)
            bounds = b_pop[1:] + (len(elts) - slack)
            if p_finite is not None:
                bounds = np.minimum(bounds, p_finite)
            pairs += total - 1
            extremal += int((sizes == bounds).sum())
            for off in np.nonzero(sizes < bounds)[0]:
                b_mask = int(off) + 1
                violations.append(_make_check(
                    g, theorem, a_mask, b_mask, int(sizes[off]), p, int(bounds[off])
                ))
        return pairs, extremal, violations

    chunks = [(lo, min(lo + _CHUNK_MASKS, total))
              for lo in range(0, total, _CHUNK_MASKS)]
    return _merge(_run_chunks(chunk_fn, chunks, workers))


def _sorted_masks_by_size(n: int, max_size: int) -> tuple[list[int], list[tuple[int, ...]]]:
    """All nonempty masks with popcount <= max_size, in ascending mask order."""
    masks = []
    for size in range(1, min(max_size, n) + 1):
        for combo in combinations(range(n), size):
            bits = 0
            for x in combo:
                bits |= 1 << x
            masks.append((bits, combo))
    masks.sort(key=lambda item: item[0])
    return [m for m, _ in masks], [c for _, c in masks]


def _verify_capped(g: FiniteGroup, theorem: str, caps: Caps, workers: int,
                   force_python: bool = False):
    n = g.order
    slack = _size_slack(theorem)
    p = minimal_torsion(g)
    p_finite = None if p == INFINITY else int(p)
    max_a = caps.max_a_size if caps.max_a_size is not None else n
    max_b = caps.max_b_size if caps.max_b_size is not None else n
    a_masks, a_combos = _sorted_masks_by_size(n, max_a)
    b_masks, b_combos = _sorted_masks_by_size(n, max_b)
    b_sizes = np.array([len(c) for c in b_combos], dtype=np.int32)

    if n <= 63 and not force_python:
        op64 = _op_u64(g)
        width = max(len(c) for c in b_combos)
        b_pad = np.array(
            [c + (c[0],) * (width - len(c)) for c in b_combos], dtype=np.int64
        )
        restricted = theorem == "eh"

        def chunk_fn(idx_range):
            lo, hi = idx_range
            pairs = 0
            extremal = 0
            violations = []
            for ai in range(lo, hi):
                a_size = len(a_combos[ai])
                cols = _translate_columns(op64, list(a_combos[ai]), restricted)
                prods = cols[b_pad]
                for col in range(1, width):
                    prods[:, 0] |= prods[:, col]
                sizes = np.bitwise_count(prods[:, 0]).astype(np.int32)
                bounds = b_sizes + (a_size - slack)
                if p_finite is not None:
                    bounds = np.minimum(bounds, p_finite)
                if caps.sum_cap is not None:
                    sel = b_sizes <= caps.sum_cap - a_size
                    idxs = np.nonzero(sel)[0]
                    sizes = sizes[idxs]
                    bounds = bounds[idxs]
                else:
                    idxs = None
                pairs += len(sizes)
                extremal += int((sizes == bounds).sum())
                for off in np.nonzero(sizes < bounds)[0]:
                    bi = int(off) if idxs is None else int(idxs[off])
                    violations.append(_make_check(
                        g, theorem, a_masks[ai], b_masks[bi],
                        int(sizes[off]), p, int(bounds[off])
                    ))
            return pairs, extremal, violations
    else:
        rows = g.op_rows()

        def chunk_fn(idx_range):
            lo, hi = idx_range
            pairs = 0
            extremal = 0
            violations = []
            for ai in range(lo, hi):
                a_bits = a_masks[ai]
                a_size = len(a_combos[ai])
                for bi, b_bits in enumerate(b_masks):
                    b_size = int(b_sizes[bi])
                    if caps.sum_cap is not None and a_size + b_size > caps.sum_cap:
                        continue
                    size = _pair_product_size(rows, a_bits, b_bits, theorem)
                    bound = int(min(p, a_size + b_size - slack))
                    pairs += 1
                    if size == bound:
                        extremal += 1
                    elif size < bound:
                        violations.append(_make_check(
                            g, theorem, a_bits, b_bits, size, p, bound
                        ))
            return pairs, extremal, violations

    chunks = [(lo, min(lo + 128, len(a_masks)))
              for lo in range(0, len(a_masks), 128)]
    return _merge(_run_chunks(chunk_fn, chunks, workers))


def _pair_product_size(rows, a_bits: int, b_bits: int, theorem: str) -> int:
    out = 0
    if theorem == "cd":
        for x in iter_bits(a_bits):
            row = rows[x]
            for y in iter_bits(b_bits):
                out |= 1 << row[y]
    else:
        for x in iter_bits(a_bits):
            row = rows[x]
            for y in iter_bits(b_bits & ~(1 << x)):
                out |= 1 << row[y]
    return out.bit_count()


def _make_check(g, theorem, a_bits, b_bits, size, p, bound) -> BoundCheck:
    a = SubsetMask(a_bits, g.order)
    b = SubsetMask(b_bits, g.order)
    return BoundCheck(group=g.label, a=a, b=b, a_size=len(a), b_size=len(b),
                      product_size=size, p_g=p, bound=bound, holds=size >= bound)


def _merge(results):
    pairs = 0
    extremal = 0
    violations = []
    for p, e, v in results:
        pairs += p
        extremal += e
        violations.extend(v)
    return pairs, extremal, violations


# ---------------------------------------------------------------------------
# sampled verification


def verify_sampled(
    g: FiniteGroup,
    theorem: str = "cd",
    plan: SamplingPlan | None = None,
    *,
    workers: int = 1,
) -> VerificationReport:
    """Check the bound over seeded random pairs.

    The full pair list is drawn up front from SplitMix64(seed) (A then B per
    pair), so identical (seed, group, plan) reproduce identical reports.
    """
    theorem = _check_theorem(theorem)
    if plan is None:
        raise ValueError("sampled verification requires a SamplingPlan")
    start = time.perf_counter()
    n = g.order
    rng = SplitMix64(plan.seed)
    pairs_list = []
    if plan.fixed_sizes is None:
        for _ in range(plan.count):
            a_bits = rng.nonempty_mask(n)
            b_bits = rng.nonempty_mask(n)
            pairs_list.append((a_bits, b_bits))
    else:
        sa, sb = plan.fixed_sizes
        if not (1 <= sa <= n and 1 <= sb <= n):
            raise ValueError(f"fixed sizes must be in 1..{n}")
        for _ in range(plan.count):
            a_bits = rng.subset_of_size(n, sa)
            b_bits = rng.subset_of_size(n, sb)
            pairs_list.append((a_bits, b_bits))

    p = minimal_torsion(g)
    slack = _size_slack(theorem)
    rows = g.op_rows() if n <= 63 else None
    op = g.op

    def chunk_fn(idx_range):
        lo, hi = idx_range
        pairs = 0
        extremal = 0
        violations = []
        for i in range(lo, hi):
            a_bits, b_bits = pairs_list[i]
            a_size = a_bits.bit_count()
            b_size = b_bits.bit_count()
            if rows is not None and a_size * b_size <= 1024:
                size = _pair_product_size(rows, a_bits, b_bits, theorem)
            else:
                size = _scatter_product_size(op, n, a_bits, b_bits, theorem)
            bound = int(min(p, a_size + b_size - slack))
            pairs += 1
            if size == bound:
                extremal += 1
            elif size < bound:
                violations.append(_make_check(
                    g, theorem, a_bits, b_bits, size, p, bound
                ))
        return pairs, extremal, violations

    chunks = [(lo, min(lo + _CHUNK_PAIRS, plan.count))
              for lo in range(0, plan.count, _CHUNK_PAIRS)]
    pairs, extremal, violations = _merge(_run_chunks(chunk_fn, chunks, workers))
    return VerificationReport(
        group=g.label, group_order=g.order, theorem=theorem,
        mode=plan.to_json_dict(), p_g=p, pairs_checked=pairs,
        violations=tuple(violations), extremal_count=extremal,
        wall_time=time.perf_counter() - start,
    )


def _mask_elements_array(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.nonzero(np.unpackbits(raw, bitorder="little", count=n))[0]


def _scatter_product_size(op, n, a_bits, b_bits, theorem: str) -> int:
    a_elts = _mask_elements_array(a_bits, n)
    b_elts = _mask_elements_array(b_bits, n)
    sub = op[a_elts[:, None], b_elts[None, :]]
    if theorem == "eh":
        keep = a_elts[:, None] != b_elts[None, :]
        sub = sub[keep]
    seen = np.zeros(n, dtype=bool)
    seen[sub.ravel()] = True
    return int(seen.sum())


# ---------------------------------------------------------------------------
# extremal search


def find_extremal(
    g: FiniteGroup,
    size_a: int,
    size_b: int,
    *,
    limit: int | None = None,
    search_cap: int = 4_000_000,
) -> list[tuple[SubsetMask, SubsetMask]]:
    """All pairs with the given sizes whose product meets the bound exactly.

    Pairs come out in ascending mask order (A outer, B inner); ``limit``
    truncates to the first N.  Raises if the search space exceeds
    ``search_cap`` ordered pairs.
    """
    n = g.order
    if not (1 <= size_a <= n and 1 <= size_b <= n):
        raise ValueError(f"sizes must be in 1..{n}")
    space = math.comb(n, size_a) * math.comb(n, size_b)
    if space > search_cap:
        raise ValueError(f"search space of {space} pairs exceeds cap {search_cap}")
    p = minimal_torsion(g)
    bound = int(min(p, size_a + size_b - 1))
    rows = g.op_rows()

    def exact_masks(size: int) -> list[int]:
        masks = []
        for combo in combinations(range(n), size):
            bits = 0
            for x in combo:
                bits |= 1 << x
            masks.append(bits)
        masks.sort()
        return masks

    out = []
    b_list = exact_masks(size_b)
    for a_bits in exact_masks(size_a):
        for b_bits in b_list:
            if _pair_product_size(rows, a_bits, b_bits, "cd") == bound:
                out.append((SubsetMask(a_bits, n), SubsetMask(b_bits, n)))
                if limit is not None and len(out) >= limit:
                    return out
    return out
