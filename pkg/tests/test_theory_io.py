"""Config and transformation file parsing."""

from fractions import Fraction

import pytest

from gptdyn.exactla import identity, vec
from gptdyn.polytopes import UnsupportedDimensionError
from gptdyn.theories import (
    BallStateSpace,
    TheoryValidationError,
    make_gbit,
    membership,
)
from gptdyn.theory_io import (
    ConfigParseError,
    dump_theory,
    dump_transformation,
    load_theory,
    load_transformation,
    parse_rational,
    rational_str,
    render_json,
)

GBIT_CONFIG = """
{
  "measurements": [
    {"label": "Z", "outcomes": 2, "role": "branch"},
    {"label": "X", "outcomes": 2, "role": "fiducial"}
  ],
  "state_space": {
    "type": "polytope_v",
    "vertices": [
      ["1", "1", "1"],
      ["1", "1", "0"],
      ["1", "0", "1"],
      ["1", "0", "0"]
    ]
  }
}
"""

DIAMOND_H_CONFIG = """
{
  "measurements": [
    {"label": "Z", "outcomes": 2, "role": "branch"},
    {"label": "X", "outcomes": 2, "role": "fiducial"}
  ],
  "state_space": {
    "type": "polytope_h",
    "halfspaces": [
      {"a": ["-3", "2", "2"], "b": "0"},
      {"a": ["-1", "2", "-2"], "b": "0"},
      {"a": ["-1", "-2", "2"], "b": "0"},
      {"a": ["1", "-2", "-2"], "b": "0"}
    ]
  }
}
"""


def test_parse_rational_values():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == Fraction(-2)
    assert parse_rational(5) == Fraction(5)
    assert rational_str(Fraction(3, 4)) == "3/4"
    assert rational_str(Fraction(2)) == "2"


def test_parse_rational_rejects_floats_and_junk():
    for bad in ("0.5", "1e3", "1/0", "", "a/b", 0.5, True, None):
        with pytest.raises(ConfigParseError):
            parse_rational(bad)


def test_load_gbit_config():
    t = load_theory(GBIT_CONFIG)
    assert (t.branch_outcomes, t.extra_freedoms, t.dim) == (2, 1, 3)
    assert len(t.state_space.vertices) == 4
    assert t == make_gbit()


def test_load_halfspace_config_recovers_diamond():
    # The four homogenised facets of |<Z>| + |<X>| <= n in minimal coordinates.
    t = load_theory(DIAMOND_H_CONFIG)
    assert sorted(t.state_space.vertices) == sorted(
        (
            vec([1, 1, "1/2"]),
            vec([1, 0, "1/2"]),
            vec([1, "1/2", 1]),
            vec([1, "1/2", 0]),
        )
    )
    assert membership(t, t.minimal_state([1, 1, 1])).is_inside is False


def test_load_ball_config():
    t = load_theory(
        """
        {
          "measurements": [
            {"label": "Z", "outcomes": 2, "role": "branch"},
            {"label": "X", "outcomes": 2, "role": "fiducial"},
            {"label": "Y", "outcomes": 2, "role": "fiducial"}
          ],
          "state_space": {"type": "ball"}
        }
        """
    )
    assert isinstance(t.state_space, BallStateSpace)


def test_malformed_json_reports_line():
    with pytest.raises(ConfigParseError, match="line 3"):
        load_theory('{\n "measurements": [\n oops\n]}')


def test_duplicate_branch_is_validation_error():
    bad = GBIT_CONFIG.replace('"role": "fiducial"', '"role": "branch"')
    with pytest.raises(TheoryValidationError, match="branch"):
        load_theory(bad)


def test_vertex_outside_range_names_vertex():
    bad = GBIT_CONFIG.replace('["1", "1", "1"]', '["1", "1", "3/2"]')
    with pytest.raises(TheoryValidationError, match="3/2"):
        load_theory(bad)


def test_unknown_keys_rejected():
    bad = GBIT_CONFIG.replace('"measurements"', '"measurments"', 1)
    with pytest.raises(ConfigParseError):
        load_theory(bad)
    with pytest.raises(ConfigParseError, match="unknown state_space type"):
        load_theory(
            '{"measurements": [{"label": "Z", "outcomes": 2, "role": "branch"}],'
            ' "state_space": {"type": "sphere"}}'
        )


def test_high_dimensional_vertices_need_halfspaces():
    # 4 binary measurements: d = 8, slice dimension 7 is past the brute-force cap.
    measurements = [{"label": "Z", "outcomes": 2, "role": "branch"}] + [
        {"label": f"X{i}", "outcomes": 2, "role": "fiducial"} for i in range(1, 7)
    ]
    corners = []
    for bits in range(2**7):
        corners.append(["1"] + [str((bits >> i) & 1) for i in range(7)])
    config = render_json(
        {
            "measurements": measurements,
            "state_space": {"type": "polytope_v", "vertices": corners},
        }
    )
    with pytest.raises(UnsupportedDimensionError, match="supply the halfspace"):
        load_theory(config)


def test_unbounded_halfspaces_rejected():
    config = """
    {
      "measurements": [
        {"label": "Z", "outcomes": 2, "role": "branch"},
        {"label": "X", "outcomes": 2, "role": "fiducial"}
      ],
      "state_space": {
        "type": "polytope_h",
        "halfspaces": [{"a": ["0", "-1", "0"], "b": "0"}]
      }
    }
    """
    with pytest.raises(TheoryValidationError, match="bound"):
        load_theory(config)


def test_theory_dump_roundtrip():
    t = make_gbit()
    assert load_theory(dump_theory(t)) == t


def test_transformation_roundtrip():
    text = dump_transformation(identity(3))
    assert load_transformation(text) == identity(3)
    with pytest.raises(ConfigParseError):
        load_transformation('{"rows": [["1", "0"], ["0"]]}')
    with pytest.raises(ConfigParseError):
        load_transformation('{"rows": [["1", "0.5"], ["0", "1"]]}')
    with pytest.raises(ConfigParseError):
        load_transformation("[1, 2]")


def test_render_json_is_canonical():
    payload = {"b": [Fraction(1, 2).__str__()], "a": 1}
    rendered = render_json(payload)
    import json

    assert render_json(json.loads(rendered)) == rendered
