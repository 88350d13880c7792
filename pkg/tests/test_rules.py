from __future__ import annotations

from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from heat_content.errors import DomainError
from heat_content.ladder import MAX_K, in_subregion
from heat_content.models import ParamPair
from rules import acceptance_validation as rules
from tasks.validation import _run_validation_checks, summarize_rules


class TestSampling:
    @given(seed=integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_generic_pairs_avoid_log_planes(self, *, seed: int) -> None:
        for a, b in rules.sample_generic_pairs(np.random.default_rng(seed), 10):
            assert a < 1.0 and b < 1.0
            assert not rules._near_log_plane(a + b, 0.05)

    @pytest.mark.parametrize("k", range(MAX_K + 1))
    def test_subregion_pairs(self, k: int) -> None:
        for a, b in rules.sample_subregion_pairs(np.random.default_rng(k), k, 10):
            assert in_subregion(k, ParamPair.of(a, b))

    def test_seeded(self) -> None:
        first = rules.sample_generic_pairs(rules._rng({"seed": 3}), 5)
        assert first == rules.sample_generic_pairs(rules._rng({"seed": 3}), 5)


class TestFastRules:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_coefficient_exactness(self, seed: int) -> None:
        assert rules.check_coefficient_exactness({"seed": seed}) == {}

    def test_removable_singularities(self) -> None:
        assert rules.check_removable_singularities({"seed": 0}) == {}

    def test_ladder_certification(self) -> None:
        assert rules.check_ladder_certification({"seed": 0}) == {}

    def test_rule_names_unique(self) -> None:
        names = [r.__name__ for r in rules.ALL_RULES]
        assert len(names) == len(set(names)) == 10


@pytest.mark.slow
class TestSlowRules:
    @pytest.mark.parametrize("rule", [r for r in rules.ALL_RULES
                                      if r.__name__ not in ("check_coefficient_exactness",
                                                            "check_removable_singularities",
                                                            "check_ladder_certification")],
                             ids=lambda r: r.__name__)
    def test_rule_passes(self, rule) -> None:
        result = rule({"seed": 0})
        assert "error" not in result, result


def _fake_module(results):
    rule_funcs = []
    for name, result in results:
        def rule(context, result=result):
            return result
        rule.__name__ = name
        rule_funcs.append(rule)

    def run_all_validations(context, only=None):
        return [{"rule": fn.__name__, "result": fn(context), "seconds": 0.0}
                for fn in rule_funcs if not only or fn.__name__ in only]

    return SimpleNamespace(ALL_RULES=rule_funcs, run_all_validations=run_all_validations)


class TestValidationChecks:
    def test_collects(self) -> None:
        module = _fake_module([("ok", {}), ("bad", {"error": "x"}), ("meh", {"warning": "y"})])
        report = summarize_rules(_run_validation_checks({}, module))
        assert report["errors"] == [{"rule": "bad", "error": "x"}]
        assert report["warnings"] == [{"rule": "meh", "warning": "y"}]
        assert [r["rule"] for r in report["rules"]] == ["ok", "bad", "meh"]

    def test_only(self) -> None:
        module = _fake_module([("ok", {}), ("bad", {"error": "x"})])
        assert [o["rule"] for o in _run_validation_checks({}, module, only=["ok"])] == ["ok"]

    def test_missing_module(self) -> None:
        assert _run_validation_checks({}, None) == []
        assert summarize_rules([]) == {"status": "Validated", "errors": [], "warnings": [], "rules": []}

    def test_engine_failure(self) -> None:
        def explode(context, only=None):
            raise RuntimeError("boom")

        report = summarize_rules(_run_validation_checks({}, SimpleNamespace(run_all_validations=explode)))
        assert "boom" in report["errors"][0]["error"]
        assert report["status"] == "Errors Found"

    def test_library_error_becomes_rule_error(self, monkeypatch) -> None:
        def broken(context):
            raise DomainError("bad input")

        monkeypatch.setattr(rules, "ALL_RULES", [broken])
        outcomes = rules.run_all_validations({})
        assert outcomes[0]["rule"] == "broken"
        assert outcomes[0]["result"] == {"error": "DomainError: bad input"}
        assert outcomes[0]["seconds"] >= 0.0

    def test_sequential_outcomes_match_task_shape(self) -> None:
        outcomes = rules.run_all_validations({"seed": 0}, only=["check_coefficient_exactness"])
        assert [set(o) for o in outcomes] == [{"rule", "result", "seconds"}]
        assert set(summarize_rules(outcomes)) == {"status", "errors", "warnings", "rules"}

    def test_summary(self) -> None:
        outcomes = [{"rule": "a", "result": {}, "seconds": 0.1},
                    {"rule": "b", "result": {"warning": "w"}, "seconds": 0.2},
                    {"rule": "c", "result": {"error": "e"}, "seconds": 0.3}]
        summary = summarize_rules(outcomes)
        assert summary["status"] == "Errors Found"
        assert [r["passed"] for r in summary["rules"]] == [True, True, False]
        assert summary["warnings"] == [{"rule": "b", "warning": "w"}]
        assert summarize_rules(outcomes[:2])["status"] == "Validated"
