from __future__ import annotations

import math

import orjson
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, integers

from heat_content.errors import DomainError, RegionError
from heat_content.ladder import (MAX_K, SigmaTable, build_ladder, eval_F, eval_G, extract_sigma,
                                 in_subregion, sigma_values)
from heat_content.models import ParamPair


def _s_in(k: int, frac: float) -> float:
    """a+b placed at fraction `frac` of the open interval of O_k."""
    lo, hi = -(2 * k + 1), 1 - k
    return lo + (hi - lo) * frac


def _pair_in(k: int, a: float, frac: float) -> ParamPair:
    return ParamPair.of(a, _s_in(k, frac) - a)


class TestBuildLadder:
    def test_certifies_every_step(self) -> None:
        table = build_ladder()
        assert table.certified_steps[:2] == ["B_0", "B_1"]
        assert "X_0" in table.certified_steps and "X_7" in table.certified_steps
        assert len(table.x_chain) == 8

    def test_cached(self) -> None:
        assert build_ladder() is build_ladder()

    def test_order_floor(self) -> None:
        with pytest.raises(DomainError):
            build_ladder(4)


class TestExtractSigma:
    @pytest.mark.parametrize("k", range(MAX_K + 1))
    def test_certified(self, k: int) -> None:
        table = extract_sigma(k)
        assert table.k == k
        assert len(table.entries) == k + 1
        assert set(table.denominator_factors()) <= set(range(1, 2 * k))

    def test_k0_is_one(self) -> None:
        assert extract_sigma(0).values(ParamPair.of(0.3, 0.4)) == [1.0]

    def test_out_of_range(self) -> None:
        with pytest.raises(DomainError):
            extract_sigma(MAX_K + 1)

    @pytest.mark.parametrize("k", range(MAX_K + 1))
    def test_exact_table_matches_closed_form(self, k: int) -> None:
        p = _pair_in(k, 0.2, 0.37)
        exact = extract_sigma(k).values(p)
        closed = sigma_values(k, p)
        for x, y in zip(exact, closed):
            assert x == pytest.approx(y, rel=1e-12, abs=1e-14)

    def test_dump_and_reload(self, tmp_path) -> None:
        table = extract_sigma(2)
        path = tmp_path / "sigma.json"
        path.write_bytes(orjson.dumps(table.to_records()))
        loaded = SigmaTable.from_records(orjson.loads(path.read_bytes()))
        p = ParamPair.of(-0.7, -1.2)
        assert loaded.values(p) == pytest.approx(table.values(p), rel=1e-14)
        assert {"k", "l", "numerator", "denominator"} <= set(table.to_records()[0])


class TestSubregion:
    @pytest.mark.parametrize("k, s, inside", [
        (0, 0.5, True), (0, -1.5, False), (1, -0.5, True), (1, -1.0, False),
        (2, -2.5, True), (2, -3.0, False), (3, -6.5, True), (3, -1.5, False),
    ])
    def test_bounds(self, k: int, s: float, inside: bool) -> None:
        assert in_subregion(k, ParamPair.of(0.1, s - 0.1)) is inside


class TestEvalG:
    @given(k=integers(0, MAX_K), a=floats(min_value=-1.0, max_value=0.8),
           frac=floats(min_value=0.05, max_value=0.95))
    @settings(deadline=None, max_examples=60)
    def test_vanishes_to_order_2k_plus_2(self, *, k: int, a: float, frac: float) -> None:
        s = _s_in(k, frac)
        if s - a >= 0.95 or any(abs(s + m) < 0.05 for m in range(1, 2 * k)):
            return
        p = _pair_in(k, a, frac)
        if not in_subregion(k, p):
            return
        g1, g2 = 1e-4, 5e-5
        r1 = abs(eval_G(k, 1 - g1, p)) / g1 ** (2 * k + 2)
        r2 = abs(eval_G(k, 1 - g2, p)) / g2 ** (2 * k + 2)
        assert math.isfinite(r1)
        assert r2 == pytest.approx(r1, rel=1e-2, abs=1e-12)

    @given(eta=floats(min_value=0.05, max_value=0.99))
    def test_branches_agree_with_direct_sum(self, *, eta: float) -> None:
        p = ParamPair.of(-0.2, -0.3)
        sigma = sigma_values(1, p)
        direct = eta ** 0.2 + eta ** 0.3 - sum(
            sg.real * (eta ** (0.5 - ell) + eta ** ell) for ell, sg in enumerate(sigma))
        assert eval_G(1, eta, p) == pytest.approx(direct, rel=1e-9, abs=1e-13)

    def test_k_minus_one(self) -> None:
        assert eval_G(-1, 0.25, ParamPair.of(0.5, -1.0)) == pytest.approx(2.0 + 0.25)

    def test_region_and_domain_errors(self) -> None:
        with pytest.raises(RegionError):
            eval_G(0, 0.5, ParamPair.of(-0.9, -0.9))
        with pytest.raises(DomainError):
            eval_G(0, 1.5, ParamPair.of(0.3, 0.4))

    def test_eval_F_homogeneity(self) -> None:
        p = ParamPair.of(0.3, 0.2)
        assert eval_F(0, 0.2, 0.4, p) == pytest.approx(0.4 ** -0.5 * eval_G(0, 0.5, p), rel=1e-13)
        assert eval_F(0, 0.4, 0.2, p) == pytest.approx(eval_F(0, 0.2, 0.4, p), rel=1e-15)
