import math

import pytest

from protoseq.rscpc import (ParamSearchError, RsCpcParams, element_of_order,
                            length_bounds, pad_set, pad_silent, rs_cpc,
                            select_params_prop1, select_params_prop2,
                            tdma_set)
from protoseq.sequences import (cyclic_order, cyclic_shift, min_separation,
                                xcorr_profile)


class TestElementOfOrder:
    def test_known_values(self):
        assert element_of_order(5, 11) == 3
        assert element_of_order(10, 11) == 2
        assert element_of_order(8, 17) == 2
        with pytest.raises(ValueError):
            element_of_order(7, 11)  # 7 does not divide 10


class TestRsCpcParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            RsCpcParams(n=5, p=10, k=3)    # p not prime
        with pytest.raises(ValueError):
            RsCpcParams(n=4, p=11, k=3)    # n does not divide p-1
        with pytest.raises(ValueError):
            RsCpcParams(n=5, p=11, k=5)    # k must stay below n
        with pytest.raises(ValueError):
            RsCpcParams(n=5, p=11, k=2)    # k >= 3
        with pytest.raises(ValueError):
            RsCpcParams(n=5, p=11, k=3, alpha=2)  # order(2) = 10, not 5

    def test_alpha_default(self):
        assert RsCpcParams(n=5, p=11, k=3).resolved_alpha() == 3


class TestRsCpcConstruction:
    def test_small_family_shape(self):
        s = rs_cpc(RsCpcParams(n=5, p=11, k=3))
        assert len(s) == 11               # p^(k-2) codewords
        assert s.period == 55             # p * n
        assert all(x.weight == 5 for x in s.sequences)

    def test_identity_message_frozen(self):
        # codeword of the pure-x polynomial, evaluated at powers of 3 mod 11
        s = rs_cpc(RsCpcParams(n=5, p=11, k=3))
        assert s.get("0").ones == (4, 36, 38, 42, 45)

    def test_full_cyclic_order(self):
        s = rs_cpc(RsCpcParams(n=5, p=11, k=3))
        for x in s.sequences:
            assert cyclic_order(x) == 55

    def test_pairwise_xcorr_bound(self):
        s = rs_cpc(RsCpcParams(n=5, p=11, k=3))
        k = len(s)
        worst = 0
        for i in range(k):
            for j in range(i + 1, k):
                worst = max(worst, int(xcorr_profile(s.sequences[i],
                                                     s.sequences[j]).max()))
        assert worst <= 2                 # k - 1

    def test_cyclically_distinct(self):
        s = rs_cpc(RsCpcParams(n=5, p=11, k=3))
        seen = set()
        for x in s.sequences:
            canon = min(tuple(cyclic_shift(x, t).ones) for t in range(x.period))
            assert canon not in seen
            seen.add(canon)


class TestPadding:
    def test_pad_silent_positions(self):
        from protoseq.sequences import BinarySequence
        x = BinarySequence(4, (0, 2))
        y = pad_silent(x, 3)
        assert y.period == 16
        assert y.ones == (0, 8)

    def test_pad_zero_is_identity(self):
        from protoseq.sequences import BinarySequence
        x = BinarySequence(4, (0, 2))
        assert pad_silent(x, 0) == x

    def test_pad_set_meta(self):
        from protoseq.crt import crt0_set
        s = pad_set(crt0_set(3, 5), 2)
        assert s.period == 45
        assert s.meta["pad"] == 2
        assert s.meta["padded_from"] == "crt0"
        # separations scale with the pad factor
        assert min_separation(s.get("*")) == 15


class TestTdma:
    def test_shape(self):
        s = tdma_set(4, 1)
        assert len(s) == 4 and s.period == 8
        assert s.get("t0").ones == (0,)
        assert s.get("t3").ones == (6,)

    def test_distinct_slots(self):
        s = tdma_set(7, 2)
        slots = [x.ones[0] for x in s.sequences]
        assert len(set(slots)) == 7


class TestParamSearch:
    def test_prop1_small(self):
        sel = select_params_prop1(3, 7, 0)
        assert (sel.n, sel.p, sel.k, sel.period) == (6, 7, 3, 42)

    def test_prop1_padded(self):
        sel = select_params_prop1(5, 37, 2)
        assert (sel.n, sel.p, sel.k, sel.period) == (10, 11, 3, 330)

    def test_prop2_small(self):
        sel = select_params_prop2(3, 7)
        assert (sel.n, sel.p, sel.k, sel.period) == (6, 7, 3, 84)

    def test_prop2_allows_larger_k(self):
        # k=3 would force p >= 37 (L = 666); k=4 admits (n,p) = (16,17)
        # with n | 16, n >= 13, p^2 = 289 >= 37, giving L = 2*16*17 = 544
        sel = select_params_prop2(5, 37)
        assert (sel.n, sel.p, sel.k, sel.period) == (16, 17, 4, 544)

    def test_population_scaling(self):
        # larger populations force more message symbols, not longer frames,
        # until p^k runs out
        a = select_params_prop1(3, 7, 0)
        b = select_params_prop1(3, 300, 0)
        assert b.period == a.period and b.k >= a.k

    def test_infeasible(self):
        with pytest.raises(ParamSearchError):
            select_params_prop1(3, 7, 0, p_cap=5)

    def test_search_respects_constraints(self):
        for sel in [select_params_prop1(4, 50, 1), select_params_prop2(4, 50)]:
            assert sel.n >= (sel.k - 1) * (sel.M - 1) + 1
            assert (sel.p - 1) % sel.n == 0
            assert 3 <= sel.k < sel.n <= sel.p


class TestLengthBounds:
    def test_values(self):
        assert length_bounds(3) == (3, 8)
        assert length_bounds(10) == (10, 89)
        assert length_bounds(5) == (5, 23)

    def test_monotone(self):
        prev = 0
        for m in range(1, 30):
            lo = length_bounds(m)[1]
            assert lo >= prev
            prev = lo
