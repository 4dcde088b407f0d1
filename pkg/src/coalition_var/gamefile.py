"""On-disk formats: the JSON game file and the attribution CSV.

Game file (JSON, UTF-8)::

    {
      "n": 3,
      "players": ["1", "2", "3"],          # optional, defaults to "1".."N"
      "coalitions": [
        {"members": ["1", "2"], "value": 24.0},
        ...
      ]
    }

Every non-empty subset of players must appear exactly once; the empty
coalition is optional and defaults to worth 0. Member order and row order
are irrelevant; duplicates are an error.

Attribution CSV (UTF-8, LF, header ``absent_factors,value``): each row maps
a set of absent factors (semicolon-separated names, empty for none) to the
worth of that coalition in the attribution game. Factors are taken in order
of first appearance.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from coalition_var.games import Game, TabularGame, members_of, to_tabular


class GameFileError(ValueError):
    pass


def default_names(n: int) -> list[str]:
    return [str(i + 1) for i in range(n)]


def _resolve(members, index: dict, where: str) -> int:
    mask = 0
    for name in members:
        if name not in index:
            raise GameFileError(f"{where}: unknown player {name!r}")
        bit = 1 << index[name]
        if mask & bit:
            raise GameFileError(f"{where}: player {name!r} listed twice")
        mask |= bit
    return mask


def _complete_table(n: int, entries, names: list[str]) -> np.ndarray:
    """Assemble a dense table from (mask, value) pairs, checking completeness."""
    table = np.zeros(1 << n)
    seen = np.zeros(1 << n, dtype=bool)
    for mask, value, where in entries:
        if seen[mask]:
            raise GameFileError(f"{where}: duplicate coalition {_fmt(mask, names)}")
        seen[mask] = True
        table[mask] = value
    missing = np.flatnonzero(~seen)
    missing = missing[missing != 0]
    if missing.size:
        raise GameFileError(f"missing coalition {_fmt(int(missing[0]), names)}")
    return table


def _fmt(mask: int, names: list[str]) -> str:
    return "{" + ", ".join(names[p] for p in members_of(mask)) + "}"


def load_game_json(text: str) -> tuple[list[str], TabularGame]:
    """Parse a game file; returns (player names, tabular game)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFileError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "n" not in doc or "coalitions" not in doc:
        raise GameFileError("game file needs 'n' and 'coalitions' fields")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise GameFileError(f"'n' must be a positive integer, got {n!r}")
    if n > 25:
        raise GameFileError(
            f"{n} players needs 2**{n} coalition rows; tabular game files stop "
            "at 25 players (use the closed-form generators instead)"
        )
    names = doc.get("players") or default_names(n)
    if len(names) != n or len(set(names)) != n:
        raise GameFileError(f"'players' must list {n} unique names")
    index = {name: p for p, name in enumerate(names)}
    entries = []
    for row_no, row in enumerate(doc["coalitions"]):
        if not isinstance(row, dict) or "members" not in row or "value" not in row:
            raise GameFileError(f"coalition row {row_no}: needs 'members' and 'value'")
        mask = _resolve(row["members"], index, f"coalition row {row_no}")
        try:
            value = float(row["value"])
        except (TypeError, ValueError):
            raise GameFileError(
                f"coalition row {row_no}: value {row['value']!r} is not a number"
            ) from None
        entries.append((mask, value, f"coalition row {row_no}"))
    return names, TabularGame(_complete_table(n, entries, names))


def load_game_file(path) -> tuple[list[str], TabularGame]:
    with open(path, encoding="utf-8") as fh:
        return load_game_json(fh.read())


def dump_game_json(names: list[str], game: Game) -> str:
    """Serialize a game as the JSON format (expands closed forms)."""
    tab = to_tabular(game)
    rows = [
        {"members": [names[p] for p in members_of(mask)], "value": float(tab.values[mask])}
        for mask in range(1, 1 << tab.n)
    ]
    if tab.values[0] != 0.0:
        rows.insert(0, {"members": [], "value": float(tab.values[0])})
    doc = {"n": tab.n, "players": list(names), "coalitions": rows}
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# attribution CSV


def load_attribution_csv(text: str) -> tuple[list[str], TabularGame]:
    """Parse an attribution CSV; returns (factor names, attribution game).

    Rows are interpreted directly as the characteristic function: the worth
    of the coalition of *absent* factors. Building those worths from raw
    incidence data is the caller's concern.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise GameFileError("empty attribution file") from None
    if [h.strip() for h in header] != ["absent_factors", "value"]:
        raise GameFileError("header must be exactly 'absent_factors,value'")
    raw_rows = []
    factors: list[str] = []
    for row_no, row in enumerate(reader):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise GameFileError(f"row {row_no}: expected 2 fields, got {len(row)}")
        names = [f.strip() for f in row[0].split(";") if f.strip()]
        for name in names:
            if name not in factors:
                factors.append(name)
        try:
            value = float(row[1])
        except ValueError:
            raise GameFileError(f"row {row_no}: value {row[1]!r} is not a number") from None
        raw_rows.append((names, value, f"row {row_no}"))
    if not factors:
        raise GameFileError("no factors found")
    index = {name: p for p, name in enumerate(factors)}
    entries = [
        (_resolve(names, index, where), value, where)
        for names, value, where in raw_rows
    ]
    return factors, TabularGame(_complete_table(len(factors), entries, factors))


def load_attribution_file(path) -> tuple[list[str], TabularGame]:
    with open(path, encoding="utf-8") as fh:
        return load_attribution_csv(fh.read())
