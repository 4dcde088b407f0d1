"""Command-line front end.

Exit codes: 0 success, 1 property violation, 2 malformed input or spec,
3 game too large for exact evaluation, 4 insufficient samples. Data goes to
stdout, diagnostics to stderr; numbers print with 12 significant digits so
identical invocations are byte-identical.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from coalition_var import analysis, exact, gamefile, sampling
from coalition_var.games import (
    Game,
    GameError,
    generate_additive,
    generate_majority,
    generate_symmetric,
    generate_two_type,
    sqrt_product_worth,
)
from coalition_var.weights import BANZHAF, SHAPLEY

GENERATE_EXPAND_LIMIT = 20


def _num(x: float) -> str:
    return f"{x:.12g}"


def _fail(code: int, message: str):
    click.echo(message, err=True)
    sys.exit(code)


def _weighting(flag: str):
    return SHAPLEY if flag == "shapley" else BANZHAF


def parse_generator_spec(spec: str) -> tuple[list[str], Game]:
    """families: additive:w1,w2,...  majority:N  symmetric:g0,g1,...  twotype:na,nb,sqrtkl"""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "additive":
            weights = [float(w) for w in arg.split(",") if w != ""]
            if not weights:
                raise ValueError("additive needs at least one weight")
            game = generate_additive(weights)
        elif kind == "majority":
            game = generate_majority(int(arg))
        elif kind == "symmetric":
            table = [float(g) for g in arg.split(",") if g != ""]
            game = generate_symmetric(len(table) - 1, table)
        elif kind == "twotype":
            parts = arg.split(",")
            if len(parts) != 3 or parts[2] != "sqrtkl":
                raise ValueError("twotype spec is twotype:<na>,<nb>,sqrtkl")
            n_a, n_b = int(parts[0]), int(parts[1])
            game = generate_two_type(n_a, n_b, sqrt_product_worth(n_a, n_b))
        else:
            raise ValueError(
                f"unknown family {kind!r}; one of additive, majority, symmetric, twotype"
            )
    except ValueError as e:
        raise gamefile.GameFileError(f"bad generator spec {spec!r}: {e}") from e
    return gamefile.default_names(game.n), game


@click.group()
def main():
    """Shapley values and marginal-contribution variance for cooperative games."""


# ---------------------------------------------------------------------------
# eval


@main.command("eval")
@click.argument("game_path", type=click.Path())
@click.option("--weighting", type=click.Choice(["shapley", "banzhaf"]), default="shapley")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text")
def cmd_eval(game_path, weighting, fmt):
    """Exact per-player value and uncertainty table for a game file."""
    try:
        names, game = gamefile.load_game_file(game_path)
    except (gamefile.GameFileError, GameError, OSError) as e:
        _fail(2, f"error: {e}")
    try:
        profs = exact.all_profiles(game, _weighting(weighting))
    except exact.GameTooLargeForExact as e:
        _fail(3, f"error: {e}")
    total_v = math.fsum(p.v for p in profs)
    avg_r = exact.average_uncertainty(profs)
    if fmt == "json":
        doc = {
            "weighting": weighting,
            "players": [
                {"player": names[p.player], "V": p.v, "R": p.r, "sqrtR": p.sd}
                for p in profs
            ],
            "total_V": total_v,
            "avg_R": avg_r,
        }
        click.echo(json.dumps(doc, indent=2))
    elif fmt == "csv":
        click.echo("player,V,R,sqrtR")
        for p in profs:
            click.echo(f"{names[p.player]},{_num(p.v)},{_num(p.r)},{_num(p.sd)}")
        click.echo(f"TOTAL,{_num(total_v)},,")
        click.echo(f"AVG,,{_num(avg_r)},")
    else:
        width = max(6, *(len(n) for n in names))
        click.echo(f"{'player':<{width}}  {'V':>16}  {'R':>16}  {'sqrtR':>16}")
        for p in profs:
            click.echo(
                f"{names[p.player]:<{width}}  {_num(p.v):>16}  {_num(p.r):>16}  {_num(p.sd):>16}"
            )
        click.echo(f"{'total_V':<{width}}  {_num(total_v):>16}")
        click.echo(f"{'avg_R':<{width}}  {'':>16}  {_num(avg_r):>16}")


# ---------------------------------------------------------------------------
# sample


@main.command("sample")
@click.option("--game", "game_path", type=click.Path(), default=None)
@click.option("--generate", "gen_spec", default=None, help="generator spec instead of a file")
@click.option("--player", "player_name", default="1", show_default=True)
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--chunks", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text")
def cmd_sample(game_path, gen_spec, player_name, samples, seed, chunks, fmt):
    """Monte Carlo estimate for one player, with a 95% confidence interval."""
    if (game_path is None) == (gen_spec is None):
        _fail(2, "error: give exactly one of --game or --generate")
    try:
        if game_path is not None:
            names, game = gamefile.load_game_file(game_path)
        else:
            names, game = parse_generator_spec(gen_spec)
    except (gamefile.GameFileError, GameError, OSError) as e:
        _fail(2, f"error: {e}")
    if player_name not in names:
        _fail(2, f"error: unknown player {player_name!r}")
    try:
        rep = sampling.estimate_parallel(
            game, names.index(player_name), samples, seed, n_chunks=chunks
        )
    except sampling.InsufficientSamples as e:
        _fail(4, f"error: {e}")
    except ValueError as e:
        _fail(2, f"error: {e}")
    lo, hi = rep.ci95_v
    if fmt == "json":
        doc = {
            "player": player_name,
            "v_hat": rep.v_hat,
            "r_hat": rep.r_hat,
            "se_v": rep.se_v,
            "ci95_v": [lo, hi],
            "n_samples": rep.n_samples,
            "seed": rep.seed,
            "chunks": chunks,
        }
        click.echo(json.dumps(doc, indent=2))
    elif fmt == "csv":
        click.echo("player,v_hat,r_hat,se_v,ci95_low,ci95_high,n_samples,seed")
        click.echo(
            f"{player_name},{_num(rep.v_hat)},{_num(rep.r_hat)},{_num(rep.se_v)},"
            f"{_num(lo)},{_num(hi)},{rep.n_samples},{rep.seed}"
        )
    else:
        click.echo(f"player     {player_name}")
        click.echo(f"v_hat      {_num(rep.v_hat)}")
        click.echo(f"r_hat      {_num(rep.r_hat)}")
        click.echo(f"se_v       {_num(rep.se_v)}")
        click.echo(f"ci95_v     [{_num(lo)}, {_num(hi)}]")
        click.echo(f"n_samples  {rep.n_samples}")
        click.echo(f"seed       {rep.seed}")


# ---------------------------------------------------------------------------
# generate


@main.command("generate")
@click.argument("spec")
@click.option("--output", "-o", type=click.Path(), default="-", show_default=True)
def cmd_generate(spec, output):
    """Expand a generator spec into a JSON game file (at most 20 players)."""
    try:
        names, game = parse_generator_spec(spec)
    except gamefile.GameFileError as e:
        _fail(2, f"error: {e}")
    if game.n > GENERATE_EXPAND_LIMIT:
        _fail(
            2,
            f"error: {game.n} players means 2**{game.n} coalition rows; "
            "not expanding. Closed forms stay fast without a file: use "
            "`sample --generate` or `sweep` instead.",
        )
    text = gamefile.dump_game_json(names, game)
    if output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# attrib


@main.command("attrib")
@click.argument("csv_path", type=click.Path())
@click.option("--z-crit", type=float, default=analysis.Z_CRIT_DEFAULT, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text")
def cmd_attrib(csv_path, z_crit, fmt):
    """Per-factor attribution with uncertainty and a 5% significance flag."""
    try:
        factors, game = gamefile.load_attribution_file(csv_path)
    except (gamefile.GameFileError, GameError, OSError) as e:
        _fail(2, f"error: {e}")
    try:
        profs = exact.all_profiles(game)
    except exact.GameTooLargeForExact as e:
        _fail(3, f"error: {e}")
    rows = analysis.significance_table(
        [(factors[p.player], p.v, p.r) for p in profs], z_crit=z_crit
    )
    r_by_label = {factors[p.player]: p.r for p in profs}
    total_v = math.fsum(p.v for p in profs)
    grand = game.value(game.grand_coalition())
    notes = [
        f"note: z for {row.label} is within 0.05 of the {_num(z_crit)} threshold;"
        " the 5% verdict is sensitive to the test convention"
        for row in rows
        if analysis.is_borderline(row.z, z_crit)
    ]
    if fmt == "json":
        doc = {
            "z_crit": z_crit,
            "factors": [
                {
                    "factor": row.label,
                    "V": row.v,
                    "sqrtR": row.sd,
                    "z": row.z if math.isfinite(row.z) else None,
                    "significant": row.significant_5pct,
                }
                for row in rows
            ],
            "total_V": total_v,
            "grand_value": grand,
            "notes": notes,
        }
        click.echo(json.dumps(doc, indent=2))
        return
    if fmt == "csv":
        click.echo("player,V,R,sqrtR,z,significant")
        for row in rows:
            click.echo(
                f"{row.label},{_num(row.v)},{_num(r_by_label[row.label])},{_num(row.sd)},"
                f"{_num(row.z)},{'yes' if row.significant_5pct else 'no'}"
            )
        click.echo(f"TOTAL,{_num(total_v)},,,,")
        click.echo(f"GRAND,{_num(grand)},,,,")
        for note in notes:
            click.echo(note, err=True)
        return
    width = max(6, *(len(f) for f in factors))
    click.echo(f"{'factor':<{width}}  {'V':>14}  {'sqrtR':>14}  {'z':>10}  significant")
    for row in rows:
        flag = "yes" if row.significant_5pct else "no"
        click.echo(
            f"{row.label:<{width}}  {_num(row.v):>14}  {_num(row.sd):>14}  "
            f"{_num(row.z):>10}  {flag}"
        )
    click.echo(f"{'TOTAL':<{width}}  {_num(total_v):>14}  (grand value {_num(grand)})")
    for note in notes:
        click.echo(note)


# ---------------------------------------------------------------------------
# check


@main.command("check")
@click.argument("prop")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_check(prop, trials, seed, n, fmt):
    """Run one property suite, every suite (`all`), or the `conjecture` probe."""
    if prop == "conjecture":
        try:
            res = analysis.conjecture_probe(n, trials, seed)
        except ValueError as e:
            _fail(2, f"error: {e}")
        doc = {
            "n": res.n,
            "trials": res.trials,
            "seed": res.seed,
            "worst_ratio": res.worst_ratio,
            "player": res.player,
            "witness_g": res.witness_g,
            "witness_h": res.witness_h,
            "skipped": res.skipped,
        }
        if fmt == "json":
            click.echo(json.dumps(doc, indent=2))
        else:
            click.echo(
                f"conjecture probe n={res.n}: worst ratio {_num(res.worst_ratio)} "
                f"at player {res.player} over {res.trials} superadditive pairs"
            )
            click.echo(f"witness_g: {json.dumps(res.witness_g)}")
            click.echo(f"witness_h: {json.dumps(res.witness_h)}")
        sys.exit(0 if res.worst_ratio > 0 else 1)
    if prop == "all":
        names = list(analysis.PROPERTIES)
    elif prop in analysis.PROPERTIES:
        names = [prop]
    else:
        _fail(2, f"error: unknown property {prop!r}; one of "
                 f"{', '.join(analysis.PROPERTIES)}, conjecture, all")
    try:
        reports = [analysis.run_property_suite(name, trials, seed, n) for name in names]
    except ValueError as e:
        _fail(2, f"error: {e}")
    failed = [rep for rep in reports if not rep.passed]
    if fmt == "json":
        doc = [
            {
                "property": rep.name,
                "instances": rep.instances,
                "violations": [
                    {
                        "fingerprint": v.fingerprint,
                        "player": v.player,
                        "lhs": v.lhs,
                        "rhs": v.rhs,
                        "gap": v.gap,
                        "witness": v.witness or {},
                    }
                    for v in rep.violations
                ],
                "max_gap": rep.max_gap,
                "tolerance": rep.tolerance,
                "passed": rep.passed,
            }
            for rep in reports
        ]
        click.echo(json.dumps(doc, indent=2))
    else:
        for rep in reports:
            status = "PASS" if rep.passed else f"FAIL ({len(rep.violations)} violations)"
            click.echo(
                f"{rep.name}: {status}  instances={rep.instances} "
                f"max_gap={_num(rep.max_gap)}"
            )
            for v in rep.violations[:5]:
                click.echo(
                    f"  violation player={v.player} lhs={_num(v.lhs)} "
                    f"rhs={_num(v.rhs)} gap={_num(v.gap)} [{v.fingerprint}]"
                )
                if v.witness:
                    click.echo(f"  witness: {json.dumps(v.witness)}")
    sys.exit(1 if failed else 0)


# ---------------------------------------------------------------------------
# sweep


def _parse_sizes(text: str) -> list[int]:
    sizes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            rng, _, step_s = part.partition(":")
            a_s, _, b_s = rng.partition("..")
            a, b = int(a_s), int(b_s)
            step = int(step_s) if step_s else 1
            if step < 1 or b < a:
                raise ValueError(f"bad size range {part!r}")
            sizes.extend(range(a, b + 1, step))
        elif part:
            sizes.append(int(part))
    return sizes


@main.command("sweep")
@click.argument("family", type=click.Choice(analysis.SWEEP_FAMILIES))
@click.option("--k", type=float, default=0.5, show_default=True)
@click.option("--sizes", required=True, help="e.g. '3,11,101' or '3..201:2'")
@click.option("--output", "-o", type=click.Path(), default="-", show_default=True)
def cmd_sweep(family, k, sizes, output):
    """Exact value/uncertainty over a size grid with the theory-scaled column."""
    try:
        size_list = _parse_sizes(sizes)
        res = analysis.asymptotic_sweep(family, size_list, k=k)
    except (ValueError, analysis.SizeNotRepresentable) as e:
        _fail(2, f"error: {e}")
    lines = ["N,V,R,scaled"]
    lines += [
        f"{row.n},{_num(row.v)},{_num(row.r)},{_num(row.scaled)}" for row in res.rows
    ]
    text = "\n".join(lines) + "\n"
    if output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    click.echo(
        f"trend: ref={_num(res.ref_constant)} scaled_monotone="
        f"{'yes' if res.scaled_monotone else 'no'} "
        f"r_{res.r_direction}={'yes' if res.r_direction_ok else 'no'} "
        f"final_rel_gap={_num(res.final_rel_gap)} "
        f"trend_ok={'yes' if res.trend_ok else 'no'}",
        err=True,
    )


if __name__ == "__main__":
    main()
