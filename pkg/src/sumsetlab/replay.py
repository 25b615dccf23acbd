"""Step-by-step replay of the inductive size bound on solvable groups.

For nonempty subsets A, B of a solvable group G with |A| + |B| - 1 <= p(G),
the replay certifies |A * B| >= |A| + |B| - 1 on the concrete data by walking
the induction: pick a proper normal K with abelian quotient, decompose A and B
into blocks over G/K, recursively certify each block product inside K, check
the quotient bound and block disjointness, and assemble the counting chain

    |A * B| >= sum_j (a1 + b_j - 1) + alpha - 1
             = beta * a1 + |B| - beta + alpha - 1
            >= |A| + |B| - 1.

Abelian groups are a base case checked directly.  Every inequality recorded in
a trace is verified numerically as it is recorded; a failure raises
ReplayInvariantError, because the bound is a theorem on this input regime and
a numeric failure can only mean a bug in this library.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import product_set
from .factor_system import build_factor_system, decompose_subset
from .groups import FiniteGroup, SubsetMask
from .structure import (INFINITY, choose_decomposition_subgroup, is_solvable,
                        minimal_torsion, subgroup_as_group)


class ReplayPreconditionError(ValueError):
    """The input pair is outside the regime the replay certifies."""


class ReplayInvariantError(RuntimeError):
    """An inequality recorded during replay failed numerically."""


def _invariant(condition: bool, detail: str) -> None:
    if not condition:
        raise ReplayInvariantError(
            f"replay consistency failure: {detail}. The checked inequality is "
            "a theorem in this regime, so this indicates a bug in this "
            "library, not a counterexample."
        )


@dataclass(frozen=True)
class BaseCheck:
    """Direct bound check for the abelian (including trivial) base case."""

    product_size: int
    target: int
    holds: bool

    def to_json_dict(self) -> dict:
        return {"product_size": self.product_size, "target": self.target,
                "holds": self.holds}


@dataclass(frozen=True)
class BlockCheck:
    """One block product certified inside the kernel.

    ``translated_b`` is the j-th block of B pushed into the kernel: its kernel
    coordinates twisted by the conjugation of A's largest block and multiplied
    by the relevant carry constant (both size-preserving).
    """

    a_block: int
    b_block: int
    a1_size: int
    b_size: int
    translated_b: tuple[int, ...]
    product_size: int
    lower_bound: int
    holds: bool
    subtrace: "ProofTrace"

    def to_json_dict(self) -> dict:
        return {
            "a_block": self.a_block,
            "b_block": self.b_block,
            "a1_size": self.a1_size,
            "b_size": self.b_size,
            "translated_b": list(self.translated_b),
            "product_size": self.product_size,
            "lower_bound": self.lower_bound,
            "holds": self.holds,
            "subtrace": self.subtrace.to_json_dict(),
        }


@dataclass(frozen=True)
class QuotientCheck:
    product_size: int
    lower_bound: int
    holds: bool

    def to_json_dict(self) -> dict:
        return {"product_size": self.product_size,
                "lower_bound": self.lower_bound, "holds": self.holds}


@dataclass(frozen=True)
class DisjointnessCheck:
    """Second coordinates of the block products; disjointness needs them distinct."""

    second_coordinates: tuple[int, ...]
    distinct: bool

    def to_json_dict(self) -> dict:
        return {"second_coordinates": list(self.second_coordinates),
                "distinct": self.distinct}


@dataclass(frozen=True)
class FinalChain:
    """The assembled counting chain: product_size >= sum_bound = closed_form >= target."""

    product_size: int
    sum_bound: int
    closed_form: int
    target: int
    holds: bool

    def to_json_dict(self) -> dict:
        return {
            "product_size": self.product_size,
            "sum_bound": self.sum_bound,
            "closed_form": self.closed_form,
            "target": self.target,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ProofTrace:
    """Complete record of one replay, with recursive subtraces.

    ``a`` and ``b`` are the masks actually certified: when the original first
    set spread over more quotient blocks than the second, the pair is swapped
    (``swapped`` is True) and the trace certifies the swapped instance; the
    target |A| + |B| - 1 is symmetric either way.
    """

    group: str
    group_order: int
    a: SubsetMask
    b: SubsetMask
    swapped: bool
    p_g: float
    target: int
    kind: str                       # "base" or "inductive"
    base: BaseCheck | None = None
    kernel: tuple[int, ...] | None = None
    alpha: int | None = None
    beta: int | None = None
    a_sizes: tuple[int, ...] | None = None
    b_sizes: tuple[int, ...] | None = None
    block_checks: tuple[BlockCheck, ...] | None = None
    quotient_check: QuotientCheck | None = None
    disjointness_check: DisjointnessCheck | None = None
    final_chain: FinalChain | None = None

    def all_holds(self) -> bool:
        """Every inequality recorded anywhere in the trace holds."""
        if self.kind == "base":
            return self.base.holds
        return (
            all(bc.holds and bc.subtrace.all_holds() for bc in self.block_checks)
            and self.quotient_check.holds
            and self.disjointness_check.distinct
            and self.final_chain.holds
        )

    def to_json_dict(self) -> dict:
        payload = {
            "schema": "sumsetlab.proof-trace/1",
            "group": self.group,
            "group_order": self.group_order,
            "a": list(self.a.elements()),
            "b": list(self.b.elements()),
            "swapped": self.swapped,
            "p_g": None if self.p_g == INFINITY else int(self.p_g),
            "target": self.target,
            "kind": self.kind,
        }
        if self.kind == "base":
            payload["base"] = self.base.to_json_dict()
        else:
            payload["kernel"] = list(self.kernel)
            payload["alpha"] = self.alpha
            payload["beta"] = self.beta
            payload["a_sizes"] = list(self.a_sizes)
            payload["b_sizes"] = list(self.b_sizes)
            payload["block_checks"] = [bc.to_json_dict() for bc in self.block_checks]
            payload["quotient_check"] = self.quotient_check.to_json_dict()
            payload["disjointness_check"] = self.disjointness_check.to_json_dict()
            payload["final_chain"] = self.final_chain.to_json_dict()
        return payload


def _replay_context(g: FiniteGroup):
    """Kernel, factor system, pair representation, and kernel-as-group, cached."""
    ctx = g._cache.get("replay_ctx")
    if ctx is None:
        kernel = choose_decomposition_subgroup(g)
        fs, pr = build_factor_system(g, kernel, "lowest_index")
        kernel_group = subgroup_as_group(kernel)
        ctx = (kernel, fs, pr, kernel_group)
        g._cache["replay_ctx"] = ctx
    return ctx


def replay_solvable_proof(g: FiniteGroup, a: SubsetMask, b: SubsetMask) -> ProofTrace:
    """Certify |A * B| >= |A| + |B| - 1 step by step on concrete data.

    Preconditions: A, B nonempty, G solvable, |A| + |B| - 1 <= p(G).
    """
    if a.width != g.order or b.width != g.order:
        raise ReplayPreconditionError("mask width does not match the group order")
    if len(a) == 0 or len(b) == 0:
        raise ReplayPreconditionError("both sets must be nonempty")
    if not is_solvable(g):
        raise ReplayPreconditionError(f"{g.label} is not solvable")
    p = minimal_torsion(g)
    target = len(a) + len(b) - 1
    if target > p:
        raise ReplayPreconditionError(
            f"|A| + |B| - 1 = {target} exceeds the minimal torsion {p}"
        )

    if g.is_abelian():
        size = len(product_set(g, a, b))
        _invariant(size >= target,
                   f"base case |A*B| = {size} < {target} in {g.label}")
        return ProofTrace(
            group=g.label, group_order=g.order, a=a, b=b, swapped=False,
            p_g=p, target=target, kind="base",
            base=BaseCheck(product_size=size, target=target, holds=True),
        )

    kernel, fs, pr, kernel_group = _replay_context(g)
    da = decompose_subset(pr, a)
    db = decompose_subset(pr, b)
    swapped = len(da.blocks) > len(db.blocks)
    if swapped:
        a, b = b, a
        da, db = db, da
    alpha = len(da.blocks)
    beta = len(db.blocks)
    a_sizes = da.sizes()
    b_sizes = db.sizes()

    top = da.blocks[0]
    h1 = top.block
    a1 = top.size
    ke = fs.kernel.element_list
    block_checks = []
    for bj in db.blocks:
        carry_elt = fs.carry_element(h1, bj.block)
        translated_bits = 0
        for pos in bj.members.elements():
            twisted = ke[int(fs.conj[h1, pos])]
            shifted = int(g.op[twisted, carry_elt])
            translated_bits |= 1 << int(fs.kernel_pos[shifted])
        translated = SubsetMask(translated_bits, kernel.order)
        _invariant(len(translated) == bj.size,
                   "translation into the kernel changed a block size")
        sub_product = product_set(kernel_group, top.members, translated)
        lower = a1 + bj.size - 1
        _invariant(len(sub_product) >= lower,
                   f"block product size {len(sub_product)} < {lower}")
        subtrace = replay_solvable_proof(kernel_group, top.members, translated)
        block_checks.append(BlockCheck(
            a_block=h1, b_block=bj.block, a1_size=a1, b_size=bj.size,
            translated_b=tuple(ke[pos] for pos in translated.elements()),
            product_size=len(sub_product), lower_bound=lower, holds=True,
            subtrace=subtrace,
        ))

    quot_product = product_set(fs.quot.table, da.block_part, db.block_part)
    quot_lower = alpha + beta - 1
    _invariant(len(quot_product) >= quot_lower,
               f"quotient product size {len(quot_product)} < {quot_lower}")
    quotient_check = QuotientCheck(product_size=len(quot_product),
                                   lower_bound=quot_lower, holds=True)

    seconds = tuple(int(fs.quot.table.op[h1, bj.block]) for bj in db.blocks)
    _invariant(len(set(seconds)) == beta,
               "block products do not have distinct second coordinates")
    disjointness = DisjointnessCheck(second_coordinates=seconds, distinct=True)

    ab_size = len(product_set(g, a, b))
    sum_bound = sum(a1 + bj - 1 for bj in b_sizes) + alpha - 1
    closed_form = beta * a1 + len(b) - beta + alpha - 1
    _invariant(sum_bound == closed_form, "counting chain arithmetic mismatch")
    _invariant(ab_size >= sum_bound,
               f"|A*B| = {ab_size} < assembled bound {sum_bound}")
    _invariant(sum_bound >= target,
               f"assembled bound {sum_bound} < target {target}")
    final = FinalChain(product_size=ab_size, sum_bound=sum_bound,
                       closed_form=closed_form, target=target, holds=True)

    return ProofTrace(
        group=g.label, group_order=g.order, a=a, b=b, swapped=swapped,
        p_g=p, target=target, kind="inductive",
        kernel=kernel.element_list, alpha=alpha, beta=beta,
        a_sizes=a_sizes, b_sizes=b_sizes,
        block_checks=tuple(block_checks), quotient_check=quotient_check,
        disjointness_check=disjointness, final_chain=final,
    )
