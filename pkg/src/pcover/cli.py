"""Command line front end.

Exit codes: 0 on success, 2 when a verification or comparison found a
discrepancy, 1 on errors (bad input, size limits, missing files).
"""
from __future__ import annotations

import json
import sys

import click

from .analysis import (
    converse_scalar_theorem,
    forward_scalar_theorem,
    is_simple,
    verify_paper_examples,
)
from .cover import Cover, enumerate_star_covers, load_cover_file
from .errors import PcoverError
from .funcring import (
    DEFAULT_BUDGET,
    brute_force_ring,
    parametrized_ring,
    verify_ring_axioms,
)
from .groups import FiniteGroup, build_group, center, maximal_cyclic_subgroups, subgroups_of_order_p
from .pgraph import build_graph
from .structure import certify_isomorphism, decompose


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _emit(data: dict, fmt: str, lines) -> None:
    if fmt == "json":
        click.echo(json.dumps(data, indent=2))
    else:
        for line in lines:
            click.echo(line)


def _load_group(spec: str) -> FiniteGroup:
    return build_group(spec)


def _pick_cover(G: FiniteGroup, cover_path: str | None, index: int, budget: int) -> Cover:
    if cover_path:
        return load_cover_file(cover_path, G)
    enum = enumerate_star_covers(G, budget=budget)
    if index >= len(enum.covers):
        _fail(f"cover index {index} out of range ({len(enum.covers)} covers found)")
    return enum.covers[index]


@click.group()
def main() -> None:
    """Covering-ring toolkit for finite p-groups."""


@main.command("group")
@click.argument("spec")
@click.option("--describe", is_flag=True, help="also list every element with its order")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def group_cmd(spec: str, describe: bool, fmt: str) -> None:
    """Show basic data of the group SPEC (e.g. Q8, D8, C8, E9, Heis3, Q8xC2, table:F)."""
    try:
        G = _load_group(spec)
        data = {
            "order": G.order,
            "prime": G.prime,
            "exponent": G.exponent,
            "abelian": G.is_abelian(),
            "center_order": center(G).order,
            "order_p_subgroups": len(subgroups_of_order_p(G)),
            "maximal_cyclic": [
                {"order": H.order, "generator": H.generator()}
                for H in maximal_cyclic_subgroups(G)
            ],
        }
        if describe:
            data["elements"] = [
                {"index": i, "name": G.names[i], "order": int(G.element_order[i])}
                for i in range(G.order)
            ]
    except PcoverError as exc:
        _fail(str(exc))
    lines = [
        f"order {data['order']}, prime {data['prime']}, exponent {data['exponent']}",
        f"abelian: {data['abelian']}, center order {data['center_order']}",
        f"order-p subgroups: {data['order_p_subgroups']}",
        "maximal cyclic subgroups: "
        + ", ".join(
            f"<{G.names[m['generator']]}> (order {m['order']})"
            for m in data["maximal_cyclic"]
        ),
    ]
    if describe:
        lines.extend(
            f"  [{e['index']}] {e['name']} (order {e['order']})"
            for e in data["elements"]
        )
    _emit(data, fmt, lines)


@main.command("covers")
@click.argument("spec")
@click.option("--limit", "--budget", "budget", default=64, show_default=True,
              help="max covers to enumerate")
@click.option("--star", is_flag=True,
              help="restrict to star covers (the default and only mode)")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def covers_cmd(spec: str, budget: int, star: bool, fmt: str) -> None:
    """Enumerate star covers of the group, irredundant covers first."""
    try:
        G = _load_group(spec)
        enum = enumerate_star_covers(G, budget=budget)
    except PcoverError as exc:
        _fail(str(exc))
    data = {
        "count": len(enum.covers),
        "complete": enum.complete,
        "covers": [
            {
                "cells": [c.elements() for c in cov.cells],
                "classes": [cov.classes()[c].value for c in cov.cells],
            }
            for cov in enum.covers
        ],
    }
    lines = [f"{len(enum.covers)} star covers (complete: {enum.complete})"]
    for i, cov in enumerate(enum.covers):
        lines.append(f"[{i}] {cov.describe()}")
    _emit(data, fmt, lines)


@main.command("ring")
@click.argument("spec")
@click.argument("cover_arg", required=False, default=None)
@click.option("--cover", "cover_path", type=click.Path(exists=True), default=None)
@click.option("--cover-index", default=0, show_default=True)
@click.option(
    "--method",
    type=click.Choice(["param", "oracle", "both"]),
    default="param",
    show_default=True,
)
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True)
@click.option("--enum-budget", default=64, show_default=True)
@click.option("--verify-axioms", is_flag=True, help="also run the ring-axiom checks")
@click.option("--dump", type=click.Path(), default=None, help="write element tables to a JSON file")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def ring_cmd(spec, cover_arg, cover_path, cover_index, method, budget, enum_budget, verify_axioms, dump, fmt):
    """Compute R_C(G) for a cover: a .cov path, or 'auto' for the first star cover."""
    if cover_path is None and cover_arg not in (None, "auto"):
        cover_path = cover_arg
    try:
        G = _load_group(spec)
        cover = _pick_cover(G, cover_path, cover_index, enum_budget)
        rings = {}
        if method in ("param", "both"):
            rings["param"] = parametrized_ring(cover, budget=budget)
        if method in ("oracle", "both"):
            rings["oracle"] = brute_force_ring(cover, budget=budget)
    except PcoverError as exc:
        _fail(str(exc))
    data = {
        "cover": [c.elements() for c in cover.cells],
        "is_star_cover": cover.is_star_cover,
        "orders": {k: int(r.order) for k, r in rings.items()},
    }
    agree = True
    if method == "both":
        a, b = rings["param"].elements, rings["oracle"].elements
        agree = a.shape == b.shape and bool((a == b).all())
        data["methods_agree"] = agree
    if verify_axioms:
        ring = rings.get("param") or rings["oracle"]
        data["axioms"] = verify_ring_axioms(ring)
    if dump:
        ring = rings.get("param") or rings["oracle"]
        with open(dump, "w") as fh:
            json.dump(ring.to_dict(), fh)
        data["dumped_to"] = dump
    lines = [f"cover: {cover.describe()}"]
    for k, r in rings.items():
        lines.append(f"|R_C(G)| via {k}: {r.order}")
    if method == "both":
        lines.append(f"methods agree: {agree}")
    if verify_axioms:
        lines.append(f"ring axioms: {'pass' if data['axioms']['passed'] else 'FAIL'}")
    _emit(data, fmt, lines)
    if (method == "both" and not agree) or (
        verify_axioms and not data["axioms"]["passed"]
    ):
        sys.exit(2)


@main.command("decompose")
@click.argument("spec")
@click.argument("cover_arg", required=False, default=None)
@click.option("--cover", "cover_path", type=click.Path(exists=True), default=None)
@click.option("--cover-index", default=0, show_default=True)
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True)
@click.option("--enum-budget", default=64, show_default=True)
@click.option("--no-certify", is_flag=True, help="skip the isomorphism certificate")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def decompose_cmd(spec, cover_arg, cover_path, cover_index, budget, enum_budget, no_certify, fmt):
    """Decompose R_C(G) into matrix blocks with lattice tuples."""
    if cover_path is None and cover_arg not in (None, "auto"):
        cover_path = cover_arg
    try:
        G = _load_group(spec)
        cover = _pick_cover(G, cover_path, cover_index, enum_budget)
        dec = decompose(cover)
        data = dec.report()
        if not no_certify:
            ring = parametrized_ring(cover, budget=budget)
            data["certificate"] = certify_isomorphism(ring, dec)
    except PcoverError as exc:
        _fail(str(exc))
    lines = [f"cover: {cover.describe()}", f"factors: {len(dec.factors)}, order {data['order']}"]
    for f in data["factors"]:
        if f["kind"] == "M2":
            lines.append(f"  M2(Z_{f['p']})")
        else:
            lines.append(
                f"  block m={f['m']} n={f['n']} attachments={f['attachments']} "
                f"lattices={[l['orders'] for l in f['lattices']]}"
            )
    if "certificate" in data:
        lines.append(f"certificate: {'pass' if data['certificate']['passed'] else 'FAIL'}")
    _emit(data, fmt, lines)
    if "certificate" in data and not data["certificate"]["passed"]:
        sys.exit(2)


@main.command("simple")
@click.argument("spec")
@click.option("--cover", "cover_path", type=click.Path(exists=True), default=None)
@click.option("--cover-index", default=0, show_default=True)
@click.option(
    "--method",
    type=click.Choice(["auto", "ideal", "structure"]),
    default="auto",
    show_default=True,
)
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True)
@click.option("--enum-budget", default=64, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def simple_cmd(spec, cover_path, cover_index, method, budget, enum_budget, fmt):
    """Decide whether R_C(G) is a simple ring."""
    try:
        G = _load_group(spec)
        cover = _pick_cover(G, cover_path, cover_index, enum_budget)
        if cover.is_star_cover:
            ring = parametrized_ring(cover, budget=budget)
        else:
            ring = brute_force_ring(cover, budget=budget)
        report = is_simple(ring, method=method)
    except PcoverError as exc:
        _fail(str(exc))
    data = report.to_dict()
    data["cover"] = [c.elements() for c in cover.cells]
    lines = [
        f"cover: {cover.describe()}",
        f"|R_C(G)| = {report.ring_order}",
        f"simple: {report.simple} (method: {report.method})",
    ]
    if report.witness:
        lines.append(f"witness: {report.witness}")
    _emit(data, fmt, lines)


@main.command("graph")
@click.argument("spec")
@click.option("--cover", "cover_path", type=click.Path(exists=True), default=None)
@click.option("--cover-index", default=0, show_default=True)
@click.option("--enum-budget", default=64, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "dot"]), default="text")
def graph_cmd(spec, cover_path, cover_index, enum_budget, fmt):
    """Show the 3-intersecting graph of a cover."""
    try:
        G = _load_group(spec)
        cover = _pick_cover(G, cover_path, cover_index, enum_budget)
        graph = build_graph(cover)
    except PcoverError as exc:
        _fail(str(exc))
    if fmt == "dot":
        click.echo(graph.to_dot())
        return
    if fmt == "json":
        click.echo(graph.to_json())
        return
    click.echo(f"vertices: {len(graph.vertices)}, edges: {len(graph.edges())}")
    click.echo(f"components: {len(graph.components)}")
    for i, comp in enumerate(graph.components):
        gens = [
            G.names[min(g for g in graph.vertices[v].elements() if g != 0)]
            for v in sorted(comp)
        ]
        click.echo(f"  [{i}] " + ", ".join(f"<{g}>" for g in gens))


@main.command("verify-paper")
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True)
@click.option("--theorems", is_flag=True, help="also check the scalar-ring theorems")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify_paper_cmd(budget, theorems, fmt):
    """Recompute the worked examples and report any discrepancies."""
    try:
        data = verify_paper_examples(budget=budget)
        if theorems:
            data["forward_theorem"] = {
                name: forward_scalar_theorem(build_group(name))
                for name in ("E8", "E27")
            }
            data["converse_theorem"] = converse_scalar_theorem(
                build_group("Heis3"), budget=16
            )
    except PcoverError as exc:
        _fail(str(exc))
    lines = []
    for rep in data["examples"]:
        lines.append(f"{rep['example']}: {rep['status']}")
        if rep["status"] != "pass":
            lines.append(f"  expected: {rep['expected']}")
            lines.append(f"  observed: {rep['observed']}")
        lines.append(f"  note: {rep['interpretation']}")
    if theorems:
        for name, rep in data["forward_theorem"].items():
            lines.append(f"forward theorem on {name}: {'holds' if rep['holds'] else 'FAILS'}")
        c = data["converse_theorem"]
        lines.append(
            f"converse theorem on Heis3: {'holds' if c['holds'] else 'FAILS'} "
            f"({c['covers_checked']} covers checked)"
        )
    lines.append(f"overall: {data['status']}")
    _emit(data, fmt, lines)
    if data["status"] != "pass":
        sys.exit(2)


if __name__ == "__main__":
    main()
