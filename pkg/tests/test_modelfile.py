import numpy as np
import numpy.testing as npt
import pytest

from qpomdp.envs import robot_pomdp, tiger_pomdp
from qpomdp.errors import ModelFormatError
from qpomdp.modelfile import (
    format_bayesnet,
    format_pomdp,
    load_pomdp,
    parse_bayesnet,
    parse_pomdp,
)

SPRINKLER_TEXT = """\
format qpomdp-model v1
kind bayesnet

variable rain 2
variable sprinkler 2 parents rain
variable wet 2 parents rain sprinkler

cpt rain : 0.9 0.1
cpt sprinkler | 0 : 0.6 0.4
cpt sprinkler | 1 : 0.99 0.01
cpt wet | 0 0 : 0.6 0.4
cpt wet | 0 1 : 0.1 0.9
cpt wet | 1 0 : 0.01 0.99
cpt wet | 1 1 : 0.01 0.99
"""


class TestBayesnetFormat:
    def test_round_trip(self, sprinkler_net):
        parsed = parse_bayesnet(format_bayesnet(sprinkler_net))
        assert parsed.cardinalities == sprinkler_net.cardinalities
        for a, b in zip(parsed.cpts, sprinkler_net.cpts):
            npt.assert_allclose(a.table, b.table, atol=1e-15)

    def test_parses_reference_text(self, sprinkler_net):
        parsed = parse_bayesnet(SPRINKLER_TEXT)
        for a, b in zip(parsed.cpts, sprinkler_net.cpts):
            npt.assert_allclose(a.table, b.table, atol=1e-15)

    def test_comments_and_blanks_ignored(self):
        text = SPRINKLER_TEXT.replace(
            "cpt rain : 0.9 0.1", "# prior\ncpt rain : 0.9 0.1  # trailing"
        )
        parse_bayesnet(text)

    def test_missing_format_line(self):
        with pytest.raises(ModelFormatError) as err:
            parse_bayesnet("kind bayesnet\n")
        assert err.value.line == 1

    def test_unknown_parent_positional(self):
        text = (
            "format qpomdp-model v1\nkind bayesnet\n"
            "variable a 2 parents ghost\ncpt a : 0.5 0.5\n"
        )
        with pytest.raises(ModelFormatError) as err:
            parse_bayesnet(text)
        assert err.value.line == 3

    def test_missing_row_reported(self):
        text = "\n".join(SPRINKLER_TEXT.splitlines()[:-1]) + "\n"
        with pytest.raises(ModelFormatError, match="wet"):
            parse_bayesnet(text)

    def test_duplicate_row_positional(self):
        text = SPRINKLER_TEXT + "cpt rain : 0.9 0.1\n"
        with pytest.raises(ModelFormatError) as err:
            parse_bayesnet(text)
        assert err.value.line == len(SPRINKLER_TEXT.splitlines()) + 1

    def test_bad_number_positional(self):
        text = SPRINKLER_TEXT.replace("cpt rain : 0.9 0.1", "cpt rain : 0.9 oops")
        with pytest.raises(ModelFormatError) as err:
            parse_bayesnet(text)
        assert err.value.line == 8


class TestPomdpFormat:
    @pytest.mark.parametrize("factory", [tiger_pomdp, robot_pomdp])
    def test_round_trip(self, factory):
        model = factory()
        parsed = parse_pomdp(format_pomdp(model))
        assert parsed.state_names == model.state_names
        assert parsed.action_names == model.action_names
        assert parsed.observation_names == model.observation_names
        assert parsed.reward_values == model.reward_values
        npt.assert_allclose(parsed.transition, model.transition, atol=1e-15)
        npt.assert_allclose(parsed.sensor, model.sensor, atol=1e-15)
        npt.assert_allclose(parsed.reward_dist, model.reward_dist, atol=1e-15)
        npt.assert_allclose(parsed.initial_belief, model.initial_belief,
                            atol=1e-15)
        assert parsed.discount == model.discount

    def test_packaged_models_match_builtins(self):
        import qpomdp

        base = qpomdp.__path__[0]
        tiger = load_pomdp(f"{base}/models/tiger.pomdp")
        npt.assert_allclose(tiger.sensor, tiger_pomdp().sensor, atol=1e-15)
        robot = load_pomdp(f"{base}/models/robot.pomdp")
        npt.assert_allclose(robot.transition, robot_pomdp().transition,
                            atol=1e-15)
        npt.assert_allclose(robot.initial_belief,
                            robot_pomdp().initial_belief, atol=1e-15)

    def test_wrong_kind_rejected(self):
        with pytest.raises(ModelFormatError, match="kind"):
            parse_pomdp(SPRINKLER_TEXT)

    def test_missing_section(self):
        text = format_pomdp(tiger_pomdp())
        stripped = "\n".join(
            line for line in text.splitlines() if not line.startswith("discount")
        )
        with pytest.raises(ModelFormatError, match="discount"):
            parse_pomdp(stripped)

    def test_incomplete_table_rejected(self):
        text = format_pomdp(tiger_pomdp())
        lines = [l for l in text.splitlines()
                 if not l.startswith("sensor listen tiger-left")]
        with pytest.raises(ModelFormatError, match="sensor"):
            parse_pomdp("\n".join(lines))

    def test_unknown_state_positional(self):
        text = format_pomdp(tiger_pomdp()).replace(
            "transition listen tiger-left", "transition listen nowhere", 1
        )
        with pytest.raises(ModelFormatError, match="nowhere"):
            parse_pomdp(text)
