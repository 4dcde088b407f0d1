import json

import pytest

from coalition_var.gamefile import (
    GameFileError,
    dump_game_json,
    load_attribution_csv,
    load_game_json,
)
from coalition_var.games import generate_majority, make_tabular

from conftest import EX2_VALUES

EX2_JSON = json.dumps(
    {
        "n": 3,
        "players": ["1", "2", "3"],
        "coalitions": [
            {"members": ["1"], "value": 0},
            {"members": ["2"], "value": 3},
            {"members": ["3"], "value": 6},
            {"members": ["1", "2"], "value": 24},
            {"members": ["2", "3"], "value": 18},
            {"members": ["1", "3"], "value": 21},
            {"members": ["1", "2", "3"], "value": 60},
        ],
    }
)


class TestGameJson:
    def test_load_example(self):
        names, game = load_game_json(EX2_JSON)
        assert names == ["1", "2", "3"]
        assert game.value(0b011) == 24.0
        assert game.value(0b110) == 18.0

    def test_default_names(self):
        doc = {"n": 1, "coalitions": [{"members": ["1"], "value": 5}]}
        names, game = load_game_json(json.dumps(doc))
        assert names == ["1"]
        assert game.value(1) == 5.0

    def test_round_trip(self):
        names, game = load_game_json(EX2_JSON)
        text = dump_game_json(names, game)
        names2, game2 = load_game_json(text)
        assert names2 == names
        assert list(game2.values) == list(game.values)

    def test_round_trip_closed_form(self):
        g = generate_majority(4)
        text = dump_game_json(["a", "b", "c", "d"], g)
        _, game2 = load_game_json(text)
        for mask in range(16):
            assert game2.value(mask) == g.value(mask)

    def test_explicit_empty_coalition(self):
        doc = {
            "n": 1,
            "coalitions": [
                {"members": [], "value": 2.0},
                {"members": ["1"], "value": 3.0},
            ],
        }
        _, game = load_game_json(json.dumps(doc))
        assert game.value(0) == 2.0

    def test_missing_coalition_named(self):
        doc = {
            "n": 2,
            "players": ["alice", "bob"],
            "coalitions": [
                {"members": ["alice"], "value": 1},
                {"members": ["alice", "bob"], "value": 3},
            ],
        }
        with pytest.raises(GameFileError, match="bob"):
            load_game_json(json.dumps(doc))

    def test_duplicate_coalition(self):
        doc = {
            "n": 1,
            "coalitions": [
                {"members": ["1"], "value": 1},
                {"members": ["1"], "value": 2},
            ],
        }
        with pytest.raises(GameFileError, match="duplicate"):
            load_game_json(json.dumps(doc))

    def test_unknown_member(self):
        doc = {"n": 1, "coalitions": [{"members": ["zz"], "value": 1}]}
        with pytest.raises(GameFileError, match="zz"):
            load_game_json(json.dumps(doc))

    def test_bad_json(self):
        with pytest.raises(GameFileError, match="JSON"):
            load_game_json("{nope")

    def test_bad_value(self):
        doc = {"n": 1, "coalitions": [{"members": ["1"], "value": "abc"}]}
        with pytest.raises(GameFileError, match="not a number"):
            load_game_json(json.dumps(doc))

    def test_bad_players_list(self):
        doc = {
            "n": 2,
            "players": ["x"],
            "coalitions": [{"members": ["x"], "value": 1}],
        }
        with pytest.raises(GameFileError, match="unique"):
            load_game_json(json.dumps(doc))

    def test_oversized_player_count_rejected_early(self):
        doc = {"n": 40, "coalitions": []}
        with pytest.raises(GameFileError, match="25"):
            load_game_json(json.dumps(doc))


class TestAttributionCsv:
    def test_basic(self):
        text = 'absent_factors,value\nA,0.3\nB,0.4\n"A;B",1.0\n'
        factors, game = load_attribution_csv(text)
        assert factors == ["A", "B"]
        assert game.value(0b01) == 0.3
        assert game.value(0b11) == 1.0

    def test_factor_order_is_first_appearance(self):
        text = 'absent_factors,value\nZ,0.1\nA,0.2\n"Z;A",0.5\n'
        factors, _ = load_attribution_csv(text)
        assert factors == ["Z", "A"]

    def test_optional_empty_row(self):
        text = 'absent_factors,value\n"",0.0\nA,1.0\n'
        factors, game = load_attribution_csv(text)
        assert factors == ["A"]
        assert game.value(0) == 0.0

    def test_incomplete_subsets(self):
        text = 'absent_factors,value\nA,0.3\n"A;B",1.0\n'
        with pytest.raises(GameFileError, match="missing"):
            load_attribution_csv(text)

    def test_duplicate_row(self):
        text = "absent_factors,value\nA,0.3\nA,0.4\n"
        with pytest.raises(GameFileError, match="duplicate"):
            load_attribution_csv(text)

    def test_header_required(self):
        with pytest.raises(GameFileError, match="header"):
            load_attribution_csv("factors,value\nA,1\n")

    def test_bad_value(self):
        with pytest.raises(GameFileError, match="not a number"):
            load_attribution_csv("absent_factors,value\nA,xyz\n")
