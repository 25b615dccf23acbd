"""Dense Cayley-table finite groups on element indices 0..n-1.

Every group here is a concrete multiplication table.  Element 0 is the
identity in all canonical constructors, and every higher layer (subgroups,
quotients, factor systems, sumset search) speaks plain element indices, so
subsets are uniform bit masks regardless of the group family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

ORDER_CAP = 4096          # tables above this order are refused outright
ASSOC_CHECK_CAP = 512     # the O(n^3) associativity scan is skipped above this


class GroupBuildError(ValueError):
    """An invalid group spec, or a table that violates the group axioms."""


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the set bit positions of ``bits`` in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class SubsetMask:
    """A subset of 0..width-1 stored as a bit mask."""

    bits: int
    width: int

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("mask width must be nonnegative")
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(
                f"mask 0x{self.bits:x} has bits outside 0..{self.width - 1}"
            )

    @classmethod
    def from_elements(cls, width: int, elements: Iterable[int]) -> "SubsetMask":
        bits = 0
        for x in elements:
            if not 0 <= x < width:
                raise ValueError(f"element {x} outside 0..{width - 1}")
            bits |= 1 << x
        return cls(bits, width)

    @classmethod
    def empty(cls, width: int) -> "SubsetMask":
        return cls(0, width)

    @classmethod
    def full(cls, width: int) -> "SubsetMask":
        return cls((1 << width) - 1, width)

    def elements(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.width and (self.bits >> x) & 1 == 1


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by a dense multiplication table.

    ``op[a, b]`` is the product ab and ``inv[a]`` the inverse of a.  Instances
    are immutable after construction and safe to share across threads;
    ``_cache`` holds lazily built derived lookups (plain-list rows, torsion,
    solvability, ...) keyed by name.
    """

    order: int
    op: np.ndarray
    identity: int
    inv: np.ndarray
    label: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.op.setflags(write=False)
        self.inv.setflags(write=False)

    def mul(self, a: int, b: int) -> int:
        return int(self.op[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        cached = self._cache.get("abelian")
        if cached is None:
            cached = bool((self.op == self.op.T).all())
            self._cache["abelian"] = cached
        return cached

    def op_rows(self) -> list[list[int]]:
        """Multiplication rows as plain lists, for tight pure-Python loops."""
        rows = self._cache.get("rows")
        if rows is None:
            rows = [[int(v) for v in row] for row in self.op]
            self._cache["rows"] = rows
        return rows

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label!r}, order={self.order})"


# ---------------------------------------------------------------------------
# group specs and the spec DSL


_PARAM_COUNTS = {"cyclic": 1, "quaternion": 0, "dihedral": 1, "heisenberg": 1,
                 "frobenius": 3}


@dataclass(frozen=True)
class GroupSpec:
    """Parsed description of a buildable group; see ``parse_group_spec``."""

    kind: str
    params: tuple[int, ...] = ()
    children: tuple["GroupSpec", ...] = ()
    table_source: str | None = None

    def label(self) -> str:
        if self.kind == "direct_product":
            return "product:" + ",".join(c.label() for c in self.children)
        if self.kind == "table":
            return f"table:{self.table_source}"
        if self.params:
            return self.kind + ":" + ":".join(str(p) for p in self.params)
        return self.kind


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a spec string.

    Grammar: ``cyclic:N``, ``quaternion``, ``dihedral:M`` (order 2M),
    ``heisenberg:P``, ``frobenius:P:Q:K``, ``product:SPEC,SPEC,...`` (two or
    more non-product children) and ``table:PATH``.
    """
    text = text.strip()
    if text.startswith("product:"):
        parts = text[len("product:"):].split(",")
        if len(parts) < 2:
            raise GroupBuildError("product spec needs at least two children")
        children = []
        for part in parts:
            if part.startswith("product:"):
                raise GroupBuildError("nested product specs are not supported")
            children.append(parse_group_spec(part))
        return GroupSpec(kind="direct_product", children=tuple(children))
    if text.startswith("table:"):
        source = text[len("table:"):]
        if not source:
            raise GroupBuildError("table spec needs a file path")
        return GroupSpec(kind="table", table_source=source)
    name, _, rest = text.partition(":")
    if name not in _PARAM_COUNTS:
        raise GroupBuildError(f"unknown group kind {name!r}")
    params = tuple(int(p) for p in rest.split(":")) if rest else ()
    if len(params) != _PARAM_COUNTS[name]:
        raise GroupBuildError(
            f"{name} takes {_PARAM_COUNTS[name]} parameter(s), got {len(params)}"
        )
    return GroupSpec(kind=name, params=params)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


def validate_spec(spec: GroupSpec) -> None:
    """Raise GroupBuildError if the spec parameters are invalid."""
    if spec.kind == "cyclic":
        if spec.params[0] < 1:
            raise GroupBuildError("cyclic order must be >= 1")
    elif spec.kind == "dihedral":
        if spec.params[0] < 1:
            raise GroupBuildError("dihedral parameter must be >= 1")
    elif spec.kind == "heisenberg":
        p = spec.params[0]
        if not _is_prime(p) or p == 2:
            raise GroupBuildError("heisenberg needs an odd prime")
    elif spec.kind == "frobenius":
        p, q, k = spec.params
        if not (_is_prime(p) and _is_prime(q) and q < p):
            raise GroupBuildError("frobenius needs primes q < p")
        if pow(k, q, p) != 1 or k % p == 1:
            raise GroupBuildError(
                "frobenius multiplier must satisfy k^q = 1 (mod p), k != 1 (mod p)"
            )
    elif spec.kind == "direct_product":
        if len(spec.children) < 2:
            raise GroupBuildError("product spec needs at least two children")
        for child in spec.children:
            validate_spec(child)
    elif spec.kind == "quaternion":
        pass
    elif spec.kind == "table":
        pass
    else:
        raise GroupBuildError(f"unknown group kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# canonical table builders


def _cyclic_table(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.int32)
    return (idx[:, None] + idx[None, :]) % n


def _quaternion_table() -> np.ndarray:
    # element index = 2*unit + sign with unit in (1, i, j, k), sign 0 = +, 1 = -
    umul = {}
    for v in range(4):
        umul[(0, v)] = (0, v)
        umul[(v, 0)] = (0, v)
    umul[(1, 1)] = (1, 0)
    umul[(2, 2)] = (1, 0)
    umul[(3, 3)] = (1, 0)
    umul[(1, 2)] = (0, 3)   # ij = k
    umul[(2, 1)] = (1, 3)   # ji = -k
    umul[(2, 3)] = (0, 1)   # jk = i
    umul[(3, 2)] = (1, 1)   # kj = -i
    umul[(3, 1)] = (0, 2)   # ki = j
    umul[(1, 3)] = (1, 2)   # ik = -j
    table = np.zeros((8, 8), dtype=np.int32)
    for x in range(8):
        for y in range(8):
            s, u = umul[(x // 2, y // 2)]
            table[x, y] = 2 * u + ((x + y + s) % 2)
    return table


def _dihedral_table(m: int) -> np.ndarray:
    # index = flip*m + rotation; (f1,a1)(f2,a2) = (f1 xor f2, a2 + (-1)^f2 a1)
    idx = np.arange(2 * m)
    f = idx // m
    a = idx % m
    sign = np.where(f[None, :] == 1, -1, 1)
    a_out = (a[None, :] + sign * a[:, None]) % m
    f_out = f[:, None] ^ f[None, :]
    return (f_out * m + a_out).astype(np.int32)


def _heisenberg_table(p: int) -> np.ndarray:
    # index = a*p^2 + b*p + c for the unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]]
    n = p ** 3
    idx = np.arange(n)
    a = idx // (p * p)
    b = (idx // p) % p
    c = idx % p
    a_out = (a[:, None] + a[None, :]) % p
    b_out = (b[:, None] + b[None, :]) % p
    c_out = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    return (a_out * p * p + b_out * p + c_out).astype(np.int32)


def _frobenius_table(p: int, q: int, k: int) -> np.ndarray:
    # index = x*q + y; (x1,y1)(x2,y2) = (x1 + k^y1 * x2 mod p, y1 + y2 mod q)
    n = p * q
    idx = np.arange(n)
    x = idx // q
    y = idx % q
    kpow = np.array([pow(k, e, p) for e in range(q)], dtype=np.int64)
    x_out = (x[:, None] + kpow[y][:, None] * x[None, :]) % p
    y_out = (y[:, None] + y[None, :]) % q
    return (x_out * q + y_out).astype(np.int32)


def _product_table(tables: Sequence[np.ndarray]) -> np.ndarray:
    acc = tables[0].astype(np.int32)
    for t in tables[1:]:
        na, nb = len(acc), len(t)
        acc = (acc[:, None, :, None] * nb + t[None, :, None, :]).reshape(
            na * nb, na * nb
        ).astype(np.int32)
    return acc


def _inverse_table(op: np.ndarray, identity: int) -> np.ndarray:
    return np.argmax(op == identity, axis=1).astype(np.int32)


def spec_order(spec: GroupSpec) -> int | None:
    """Order implied by a spec, or None for table specs (known only on load)."""
    if spec.kind == "cyclic":
        return spec.params[0]
    if spec.kind == "quaternion":
        return 8
    if spec.kind == "dihedral":
        return 2 * spec.params[0]
    if spec.kind == "heisenberg":
        return spec.params[0] ** 3
    if spec.kind == "frobenius":
        return spec.params[0] * spec.params[1]
    if spec.kind == "direct_product":
        child_orders = [spec_order(c) for c in spec.children]
        if any(o is None for o in child_orders):
            return None
        return math.prod(child_orders)
    return None


def build_group(spec: GroupSpec | str) -> FiniteGroup:
    """Build the canonical group for a spec.

    Deterministic: identical specs yield bit-identical tables.  Element 0 is
    the identity for every constructor (table files are relabelled to make it
    so, with the relabelling recorded in the group label).
    """
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    validate_spec(spec)
    order = spec_order(spec)
    if order is not None and order > ORDER_CAP:
        raise GroupBuildError(f"order {order} exceeds the cap {ORDER_CAP}")
    if spec.kind == "table":
        return _load_table_group(Path(spec.table_source))
    if spec.kind == "cyclic":
        op = _cyclic_table(spec.params[0])
    elif spec.kind == "quaternion":
        op = _quaternion_table()
    elif spec.kind == "dihedral":
        op = _dihedral_table(spec.params[0])
    elif spec.kind == "heisenberg":
        op = _heisenberg_table(spec.params[0])
    elif spec.kind == "frobenius":
        op = _frobenius_table(*spec.params)
    elif spec.kind == "direct_product":
        children = [build_group(c) for c in spec.children]
        built_order = math.prod(c.order for c in children)
        if built_order > ORDER_CAP:
            raise GroupBuildError(f"order {built_order} exceeds the cap {ORDER_CAP}")
        op = _product_table([c.op for c in children])
    else:  # pragma: no cover - guarded by validate_spec
        raise GroupBuildError(f"unknown group kind {spec.kind!r}")
    return FiniteGroup(
        order=len(op),
        op=op,
        identity=0,
        inv=_inverse_table(op, 0),
        label=spec.label(),
    )


# ---------------------------------------------------------------------------
# table files


def _load_table_group(path: Path) -> FiniteGroup:
    """Load a Cayley table file: first line n, then n rows of n indices.

    The identity need not be element 0 in the file; the loader relabels by
    swapping it with 0 and records the swap in the label.  Axiom violations
    are build errors reported with a concrete witness.
    """
    try:
        tokens = path.read_text().split()
    except OSError as exc:
        raise GroupBuildError(f"cannot read table file {path}: {exc}") from exc
    if not tokens:
        raise GroupBuildError(f"table file {path} is empty")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise GroupBuildError(f"table file {path}: non-integer entry") from exc
    n = values[0]
    if n < 1 or n > ORDER_CAP:
        raise GroupBuildError(f"table file {path}: order {n} outside 1..{ORDER_CAP}")
    if len(values) != 1 + n * n:
        raise GroupBuildError(
            f"table file {path}: expected {n * n} entries, got {len(values) - 1}"
        )
    op = np.array(values[1:], dtype=np.int32).reshape(n, n)
    if op.min() < 0 or op.max() >= n:
        bad = np.argwhere((op < 0) | (op >= n))[0]
        raise GroupBuildError(
            f"table file {path}: entry op({bad[0]},{bad[1]}) out of range"
        )

    identity = _find_identity(op)
    label = f"table:{path.name}"
    if identity is None:
        raise GroupBuildError(f"table file {path}: no two-sided identity element")
    if identity != 0:
        perm = np.arange(n, dtype=np.int32)
        perm[[0, identity]] = perm[[identity, 0]]
        op = perm[op[perm][:, perm]]  # transposition is its own inverse
        label += f"|identity={identity}->0"

    group = FiniteGroup(order=n, op=op, identity=0,
                        inv=_inverse_table(op, 0), label=label)
    problems = validate_group(group)
    if problems:
        raise GroupBuildError(f"table file {path}: {problems[0]}")
    return group


def _find_identity(op: np.ndarray) -> int | None:
    n = len(op)
    idx = np.arange(n)
    for e in range(n):
        if (op[e] == idx).all() and (op[:, e] == idx).all():
            return e
    return None


def as_candidate_group(table, label: str = "candidate") -> FiniteGroup:
    """Wrap an arbitrary square table for validation, without checking it.

    Picks the two-sided identity if one exists (else 0) and a best-effort
    inverse table, so ``validate_group`` can report violations as data.
    """
    op = np.asarray(table, dtype=np.int32)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("candidate table must be square")
    n = len(op)
    if n == 0:
        raise ValueError("candidate table must be nonempty")
    identity = _find_identity(op)
    e = 0 if identity is None else identity
    inv = np.arange(n, dtype=np.int32)
    for a in range(n):
        hits = np.nonzero((op[a] == e) & (op[:, a] == e))[0]
        if len(hits):
            inv[a] = hits[0]
    return FiniteGroup(order=n, op=op, identity=e, inv=inv, label=label)


# ---------------------------------------------------------------------------
# validation


def validate_group(g: FiniteGroup, assoc_cap: int = ASSOC_CHECK_CAP) -> list[str]:
    """Check the group axioms; return a list of violations (empty if valid).

    Latin-square rows/columns, the identity and inverse laws, and brute-force
    associativity (skipped above ``assoc_cap``; the scan is O(n^3)).
    Violations are data, not errors.
    """
    problems: list[str] = []
    op = g.op
    n = g.order
    idx = np.arange(n)

    if op.shape != (n, n) or op.min() < 0 or op.max() >= n:
        problems.append("table entries out of range")
        return problems

    row_ok = (np.sort(op, axis=1) == idx).all(axis=1)
    for a in np.nonzero(~row_ok)[0]:
        problems.append(f"latin: row {a} is not a permutation of 0..{n - 1}")
    col_ok = (np.sort(op, axis=0) == idx[:, None]).all(axis=0)
    for b in np.nonzero(~col_ok)[0]:
        problems.append(f"latin: column {b} is not a permutation of 0..{n - 1}")

    e = g.identity
    if not ((op[e] == idx).all() and (op[:, e] == idx).all()):
        bad = int(np.nonzero((op[e] != idx) | (op[:, e] != idx))[0][0])
        problems.append(
            f"identity: element {e} is not a two-sided identity (fails at {bad})"
        )
    left = op[idx, g.inv]
    right = op[g.inv, idx]
    if not ((left == e).all() and (right == e).all()):
        bad = int(np.nonzero((left != e) | (right != e))[0][0])
        problems.append(f"inverse: element {bad} has no valid inverse entry")

    if n <= assoc_cap:
        for a in range(n):
            lhs = op[op[a], :]         # lhs[b,c] = (ab)c
            rhs = op[a][op]            # rhs[b,c] = a(bc)
            if not (lhs == rhs).all():
                b, c = np.argwhere(lhs != rhs)[0]
                problems.append(
                    f"associativity: op(op({a},{b}),{c}) = {int(lhs[b, c])} "
                    f"but op({a},op({b},{c})) = {int(rhs[b, c])}"
                )
                break
    return problems


def element_order(g: FiniteGroup, x: int) -> int:
    """Smallest m >= 1 with x^m = identity."""
    if not 0 <= x < g.order:
        raise ValueError(f"element {x} outside 0..{g.order - 1}")
    y = x
    m = 1
    while y != g.identity:
        y = int(g.op[y, x])
        m += 1
    return m
