"""Command-line front end.

Exit codes: 0 = success with zero bound violations, 1 = at least one bound
violation found (the report lists witnesses), 2 = usage or input error.
"""

from __future__ import annotations

import os
import sys

import click

from .engine import (Caps, SamplingPlan, find_extremal, verify_exhaustive,
                     verify_sampled)
from .factor_system import build_factor_system, factor_system_json
from .groups import (GroupBuildError, SubsetMask, build_group, validate_group)
from .jsonio import dumps_stable
from .replay import ReplayPreconditionError, replay_solvable_proof
from .structure import (INFINITY, choose_decomposition_subgroup,
                        generated_subgroup)


@click.group()
def main():
    """Finite-group sumset laboratory: verify product-size bounds, decompose
    groups into factor systems, search extremal pairs, and replay the
    solvable-group induction on concrete sets."""


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _build(spec: str):
    try:
        return build_group(spec)
    except GroupBuildError as exc:
        _fail(str(exc))


def _resolve_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("SUMSETLAB_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            _fail(f"SUMSETLAB_WORKERS={env!r} is not an integer")
    return os.cpu_count() or 1


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_elements(raw: str, order: int, name: str) -> SubsetMask:
    try:
        elements = [int(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError:
        _fail(f"{name} must be comma-separated element indices")
    try:
        return SubsetMask.from_elements(order, elements)
    except ValueError as exc:
        _fail(str(exc))


def _fmt_p(p) -> str:
    return "infinity" if p == INFINITY else str(int(p))


@main.command()
@click.option("--group", "spec", required=True, help="Group spec, e.g. cyclic:7.")
@click.option("--theorem", type=click.Choice(["cd", "eh"]), default="cd")
@click.option("--mode", type=click.Choice(["exhaustive", "capped", "sampled"]),
              default="exhaustive")
@click.option("--seed", type=int, default=None, help="Sampled mode seed.")
@click.option("--count", type=int, default=None, help="Sampled mode pair count.")
@click.option("--fixed-sizes", default=None, metavar="SA,SB",
              help="Sampled mode: draw subsets of these exact sizes.")
@click.option("--max-a", type=int, default=None, help="Capped mode: max |A|.")
@click.option("--max-b", type=int, default=None, help="Capped mode: max |B|.")
@click.option("--sum-cap", type=int, default=None, help="Capped mode: max |A|+|B|.")
@click.option("--exhaustive-limit", type=int, default=11, show_default=True,
              help="Largest order allowed for full enumeration.")
@click.option("--workers", type=int, default=None,
              help="Worker threads (default: SUMSETLAB_WORKERS or CPU count).")
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def verify(spec, theorem, mode, seed, count, fixed_sizes, max_a, max_b,
           sum_cap, exhaustive_limit, workers, as_json, out_path):
    """Verify the product-size bound over pairs of subsets."""
    g = _build(spec)
    workers = _resolve_workers(workers)
    try:
        if mode == "exhaustive":
            report = verify_exhaustive(g, theorem,
                                       exhaustive_limit=exhaustive_limit,
                                       workers=workers)
        elif mode == "capped":
            if max_a is None and max_b is None and sum_cap is None:
                raise click.UsageError(
                    "capped mode needs --max-a, --max-b, or --sum-cap")
            caps = Caps(max_a_size=max_a, max_b_size=max_b, sum_cap=sum_cap)
            report = verify_exhaustive(g, theorem, caps, workers=workers)
        else:
            if seed is None or count is None:
                raise click.UsageError("sampled mode needs --seed and --count")
            sizes = None
            if fixed_sizes is not None:
                try:
                    sa, sb = (int(v) for v in fixed_sizes.split(","))
                except ValueError:
                    raise click.UsageError("--fixed-sizes must be SA,SB")
                sizes = (sa, sb)
            plan = SamplingPlan(seed=seed, count=count, fixed_sizes=sizes)
            report = verify_sampled(g, theorem, plan, workers=workers)
    except click.UsageError:
        raise
    except ValueError as exc:
        _fail(str(exc))

    if as_json:
        _emit(dumps_stable(report.to_json_dict()), out_path)
    else:
        lines = [
            f"group           {report.group} (order {report.group_order})",
            f"theorem         {report.theorem}",
            f"mode            {report.mode}",
            f"minimal torsion {_fmt_p(report.p_g)}",
            f"pairs checked   {report.pairs_checked}",
            f"violations      {len(report.violations)}",
            f"extremal pairs  {report.extremal_count}",
            f"wall time       {report.wall_time:.3f}s",
        ]
        for v in report.violations[:10]:
            lines.append(
                f"  VIOLATION a={list(v.a.elements())} b={list(v.b.elements())} "
                f"|ab|={v.product_size} < bound {v.bound}"
            )
        if len(report.violations) > 10:
            lines.append(f"  ... {len(report.violations) - 10} more")
        _emit("\n".join(lines) + "\n", out_path)
    sys.exit(1 if report.violations else 0)


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--kernel", "kernel_raw", default=None, metavar="ELEMS",
              help="Comma-separated generators of the kernel subgroup "
                   "(default: the decomposition policy's choice).")
@click.option("--rep-policy", default="lowest_index", metavar="POLICY",
              help="lowest_index, seeded_random:SEED, or explicit:R0,R1,...")
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def decompose(spec, kernel_raw, rep_policy, as_json, out_path):
    """Build and print the factor system for a group over a normal subgroup."""
    g = _build(spec)
    try:
        if kernel_raw is None:
            kernel = choose_decomposition_subgroup(g)
        else:
            gens = _parse_elements(kernel_raw, g.order, "--kernel")
            kernel = generated_subgroup(g, gens)
        if rep_policy.startswith("explicit:"):
            policy = [int(v) for v in rep_policy[len("explicit:"):].split(",")]
        else:
            policy = rep_policy
        fs, pr = build_factor_system(g, kernel, policy)
    except ValueError as exc:
        _fail(str(exc))
    payload = factor_system_json(fs, pr)
    if as_json:
        _emit(dumps_stable(payload), out_path)
    else:
        lines = [
            f"group           {payload['group']} (order {payload['group_order']})",
            f"kernel          {payload['kernel']}",
            f"representatives {payload['representatives']}",
            "pairs (element -> [kernel, block]):",
        ]
        for x, pair in enumerate(payload["pairs"]):
            lines.append(f"  {x} -> {pair}")
        lines.append("carry table (rows/columns are blocks):")
        for row in payload["carry"]:
            lines.append(f"  {row}")
        _emit("\n".join(lines) + "\n", out_path)
    sys.exit(0)


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--size-a", type=int, required=True)
@click.option("--size-b", type=int, required=True)
@click.option("--limit", type=int, default=None,
              help="Stop after this many extremal pairs.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def extremal(spec, size_a, size_b, limit, as_json, out_path):
    """List pairs whose product size meets the bound exactly."""
    g = _build(spec)
    try:
        pairs = find_extremal(g, size_a, size_b, limit=limit)
    except ValueError as exc:
        _fail(str(exc))
    from .structure import minimal_torsion
    bound = int(min(minimal_torsion(g), size_a + size_b - 1))
    payload = {
        "schema": "sumsetlab.extremal/1",
        "group": g.label,
        "group_order": g.order,
        "size_a": size_a,
        "size_b": size_b,
        "bound": bound,
        "count": len(pairs),
        "pairs": [
            {"a": list(a.elements()), "b": list(b.elements())} for a, b in pairs
        ],
    }
    if as_json:
        _emit(dumps_stable(payload), out_path)
    else:
        lines = [
            f"group   {g.label} (order {g.order})",
            f"sizes   |A|={size_a} |B|={size_b}, bound {bound}",
            f"extremal pairs found: {len(pairs)}",
        ]
        for a, b in pairs[:10]:
            lines.append(f"  a={list(a.elements())} b={list(b.elements())}")
        if len(pairs) > 10:
            lines.append(f"  ... {len(pairs) - 10} more")
        _emit("\n".join(lines) + "\n", out_path)
    sys.exit(0)


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--set-a", "set_a", required=True, metavar="ELEMS",
              help="Comma-separated element indices.")
@click.option("--set-b", "set_b", required=True, metavar="ELEMS")
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def trace(spec, set_a, set_b, as_json, out_path):
    """Replay the solvable-group induction on one concrete pair."""
    g = _build(spec)
    a = _parse_elements(set_a, g.order, "--set-a")
    b = _parse_elements(set_b, g.order, "--set-b")
    try:
        result = replay_solvable_proof(g, a, b)
    except ReplayPreconditionError as exc:
        _fail(str(exc))
    if as_json:
        _emit(dumps_stable(result.to_json_dict()), out_path)
    else:
        _emit(_trace_text(result), out_path)
    sys.exit(0)


def _trace_text(t, indent: str = "") -> str:
    lines = [
        f"{indent}group {t.group} (order {t.group_order}), "
        f"a={list(t.a.elements())} b={list(t.b.elements())}"
        + (" [swapped]" if t.swapped else ""),
        f"{indent}target |A|+|B|-1 = {t.target}, minimal torsion {_fmt_p(t.p_g)}",
    ]
    if t.kind == "base":
        lines.append(
            f"{indent}base case: |A*B| = {t.base.product_size} >= {t.target}"
        )
    else:
        lines.append(
            f"{indent}kernel {list(t.kernel)}; alpha={t.alpha} beta={t.beta}; "
            f"block sizes a={list(t.a_sizes)} b={list(t.b_sizes)}"
        )
        for bc in t.block_checks:
            lines.append(
                f"{indent}block ({bc.a_block},{bc.b_block}): "
                f"|A1*B_j| = {bc.product_size} >= {bc.lower_bound}"
            )
            lines.append(_trace_text(bc.subtrace, indent + "    ").rstrip("\n"))
        q = t.quotient_check
        lines.append(
            f"{indent}quotient: |A2*B2| = {q.product_size} >= {q.lower_bound}"
        )
        d = t.disjointness_check
        lines.append(
            f"{indent}disjoint second coordinates: {list(d.second_coordinates)}"
        )
        f = t.final_chain
        lines.append(
            f"{indent}chain: |A*B| = {f.product_size} >= {f.sum_bound} "
            f"= {f.closed_form} >= {f.target}"
        )
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def validate(spec, as_json, out_path):
    """Build a group and check the group axioms; exit 2 on any violation."""
    g = _build(spec)
    problems = validate_group(g)
    payload = {
        "schema": "sumsetlab.validation/1",
        "group": g.label,
        "group_order": g.order,
        "violations": problems,
    }
    if as_json:
        _emit(dumps_stable(payload), out_path)
    else:
        lines = [f"group {g.label} (order {g.order})"]
        if problems:
            lines.extend(f"  {p}" for p in problems)
        else:
            lines.append("  all group axioms hold")
        _emit("\n".join(lines) + "\n", out_path)
    sys.exit(2 if problems else 0)


if __name__ == "__main__":
    main()
