"""The standard test corpus: small groups covering the families this package
builds, plus a deterministic inventory of normal subgroups for each.

Odd orders dominate on purpose: even-order groups make the product bound
trivial (minimal torsion 2), so the interesting verification regime lives in
odd order.  Quaternion and dihedral stay in as the even-order checks.
"""

from __future__ import annotations

from .groups import FiniteGroup, build_group
from .structure import (Subgroup, commutator_subgroup, generated_subgroup,
                        is_normal, trivial_subgroup, whole_subgroup)

CORPUS_SPECS: tuple[str, ...] = (
    "cyclic:1",
    "cyclic:2",
    "cyclic:3",
    "cyclic:5",
    "cyclic:6",
    "cyclic:7",
    "cyclic:9",
    "cyclic:11",
    "cyclic:25",
    "dihedral:5",
    "quaternion",
    "heisenberg:3",
    "frobenius:7:3:2",
    "product:cyclic:3,cyclic:3",
    "product:cyclic:3,cyclic:9",
)

_cached: dict[str, FiniteGroup] = {}


def corpus_group(spec: str) -> FiniteGroup:
    group = _cached.get(spec)
    if group is None:
        group = build_group(spec)
        _cached[spec] = group
    return group


def corpus_groups() -> list[FiniteGroup]:
    return [corpus_group(spec) for spec in CORPUS_SPECS]


def normal_subgroup_inventory(g: FiniteGroup) -> list[Subgroup]:
    """Deterministic list of normal subgroups: trivial, whole, derived, and
    every normal cyclic subgroup, deduplicated by member mask."""
    seen: dict[int, Subgroup] = {}

    def add(h: Subgroup) -> None:
        seen.setdefault(h.members.bits, h)

    add(trivial_subgroup(g))
    add(whole_subgroup(g))
    add(commutator_subgroup(g))
    for x in range(g.order):
        h = generated_subgroup(g, (x,))
        if is_normal(g, h):
            add(h)
    return [seen[bits] for bits in sorted(seen)]
