import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsplit import NotPrime, ValidationError, ZeroMass, kernels
from minsplit.encoding import codeword_array
from minsplit.guessing import discriminate_oracle
from minsplit.qudit import fourier
from minsplit.violation import (AdversaryC, adversary_scan, average_part_guess, corner_adversaries,
                                curve_to_csv, leakage_robust_violation, part_bound, part_guess_given_c,
                                posterior_prior, smallest_violating_prime, violation_curve)
from oracles import pairs


def bound(d):
    return 0.5 + 0.5 / math.sqrt(d)


def brute_part_guess(q, c):
    """Explicit loops: posterior, outcome probabilities, best label per outcome."""
    d = len(q)
    cw = codeword_array(d)
    f = fourier(d)
    w = {(a, b): (q[a][b] if c == 0 else 1 - q[a][b]) for a, b in pairs(d)}
    total = sum(w.values())
    value = 0.0
    for j in range(d):
        score = [0.0] * d
        for (a, b), wt in w.items():
            amp = cw[a, b, j] if c == 0 else np.vdot(f[:, j], cw[a, b])
            score[(a, b)[c]] += wt / total * abs(amp) ** 2
        value += max(score)
    return value


class TestPosterior:
    def test_independent_coin(self):
        a = AdversaryC(3, np.full((3, 3), 0.5))
        for c in (0, 1):
            assert np.allclose(posterior_prior(a, c).weights, 1 / 9)

    def test_conditioning(self):
        q = np.array([[1.0, 1.0], [0.0, 0.0]])
        p = posterior_prior(AdversaryC(2, q), 0)
        assert p.prob((0, 0)) == pytest.approx(0.5) and p.prob((0, 1)) == pytest.approx(0.5)
        assert p.prob((1, 0)) == 0.0

    def test_random_d3(self):
        q = np.random.default_rng(4).random((3, 3))
        a = AdversaryC(3, q)
        for c, w in ((0, q), (1, 1 - q)):
            expect = {(y0, y1): w[y0][y1] / sum(w[u][v] for u, v in pairs(3)) for y0, y1 in pairs(3)}
            for key, val in expect.items():
                assert posterior_prior(a, c).prob(key) == pytest.approx(val, abs=1e-15)

    def test_zero_mass(self):
        a = AdversaryC(2, np.ones((2, 2)))
        with pytest.raises(ZeroMass):
            posterior_prior(a, 1)
        with pytest.raises(ZeroMass):
            part_guess_given_c(a, 1)

    def test_validation(self):
        with pytest.raises(ValidationError):
            AdversaryC(2, np.full((2, 2), 1.5))
        with pytest.raises(ValidationError):
            AdversaryC(2, np.full((3, 3), 0.5))
        with pytest.raises(NotPrime):
            AdversaryC(4, np.full((4, 4), 0.5))


class TestPartGuess:
    def test_uniform_d2(self):
        assert part_guess_given_c(AdversaryC(2, np.full((2, 2), 0.5)), 0) == pytest.approx(0.8535534, abs=1e-7)

    def test_deterministic_c0_d5(self):
        assert part_guess_given_c(AdversaryC(5, np.ones((5, 5))), 0) == pytest.approx(0.7236068, abs=1e-7)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([2, 3, 5]), st.integers(0, 2 ** 32 - 1))
    def test_against_loops(self, d, seed):
        q = np.random.default_rng(seed).random((d, d))
        a = AdversaryC(d, q)
        for c in (0, 1):
            assert part_guess_given_c(a, c) == pytest.approx(brute_part_guess(q, c), abs=1e-12)

    def test_random_d3(self):
        worst = min(part_guess_given_c(AdversaryC(3, np.random.default_rng([8, i]).random((3, 3))), c)
                    for i in range(1000) for c in (0, 1))
        assert worst >= 0.7886751 - 1e-9

    def test_averaged_form(self):
        for i in range(50):
            a = AdversaryC(5, np.random.default_rng([12, i]).random((5, 5)))
            assert average_part_guess(a) >= bound(5) - 1e-10

    def test_basis_never_beats_optimum(self):
        # the oracle optimizes over all measurements on the posterior part states
        d = 3
        a = AdversaryC(d, np.random.default_rng(17).random((d, d)))
        cw = codeword_array(d)
        for c in (0, 1):
            post = posterior_prior(a, c)
            w = np.zeros((d, d))
            for (y0, y1), p in post.items():
                w[y0, y1] = p
            marg = w.sum(axis=1 - c)
            states = []
            for v in range(d):
                vecs = cw[v] if c == 0 else cw[:, v]
                ws = w[v] if c == 0 else w[:, v]
                states.append(np.einsum("k,ki,kj->ij", ws / ws.sum(), vecs, vecs.conj()))
            res = discriminate_oracle(marg, states)
            assert res.value >= part_guess_given_c(a, c) - 1e-9

    def test_backends_agree(self):
        a = AdversaryC(11, np.random.default_rng(1).random((11, 11)))
        vals = []
        for name in kernels.available_backends():
            with kernels.use_backend(name):
                vals.append([part_guess_given_c(a, c) for c in (0, 1)])
        assert np.allclose(vals[0], vals[-1], atol=1e-14)


class TestScan:
    def test_d2(self):
        rep = adversary_scan(2, 1000, seed=3)
        assert rep.corners == 16 and rep.min_part_guess == pytest.approx(0.8535534, abs=1e-7)
        assert abs(rep.min_part_guess - bound(2)) <= 1e-9 and rep.passed

    def test_corners_only(self):
        rep = adversary_scan(2, 0, seed=0)
        assert rep.samples == 0 and rep.corners == 16 and rep.passed
        assert len(list(corner_adversaries(2, 0))) == 16

    def test_corner_family_size(self):
        assert len(list(corner_adversaries(5, 0))) == 3 + 4 * 5 + 8

    def test_d101(self):
        rep = adversary_scan(101, 20, seed=0)
        assert rep.classical_bound_bits == pytest.approx(2.3291, abs=1e-4)
        assert rep.quantum_bits_upper <= 0.8632 and rep.passed and rep.violated

    def test_deterministic(self):
        assert adversary_scan(5, 30, seed=9).to_json() == adversary_scan(5, 30, seed=9).to_json()
        assert adversary_scan(5, 30, seed=9).to_json() != adversary_scan(5, 30, seed=10).to_json()

    def test_report_fields(self):
        doc = json.loads(adversary_scan(3, 5, seed=1).to_json())
        assert doc["classical_bound_bits"] == pytest.approx(math.log2(3) / 2 - 1)
        assert doc["quantum_bits_upper"] == pytest.approx(-math.log2(doc["min_part_guess"]))
        assert len(doc["worst_per_c"]) == 2 and doc["worst_adversary"]["d"] == 3

    def test_rejects(self):
        with pytest.raises(NotPrime):
            adversary_scan(9, 1, seed=0)
        with pytest.raises(ValueError):
            adversary_scan(3, -1, seed=0)


class TestCurve:
    def test_values(self):
        rows = {r.d: r for r in violation_curve([2, 11, 101])}
        assert rows[2].classical_bits == pytest.approx(-0.5) and rows[2].quantum_bits_upper == pytest.approx(
            0.2284, abs=1e-4)
        assert rows[11].classical_bits == pytest.approx(0.7297, abs=1e-4)
        assert rows[11].quantum_bits_upper == pytest.approx(0.6198, abs=1e-4)
        assert rows[101].classical_bits == pytest.approx(2.3291, abs=1e-4)
        assert rows[101].quantum_bits_upper == pytest.approx(0.8632, abs=1e-4)

    def test_gap_increasing(self):
        gaps = [r.gap_bits for r in violation_curve([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 101, 1009])]
        assert all(b > a for a, b in zip(gaps, gaps[1:]))

    def test_csv(self):
        text = curve_to_csv(violation_curve([2, 3]))
        lines = text.splitlines()
        assert lines[0] == "d,classical_bits,quantum_bits_upper,gap_bits" and len(lines) == 3

    def test_not_prime(self):
        with pytest.raises(NotPrime):
            violation_curve([2, 4])

    def test_part_bound(self):
        assert part_bound(7) == pytest.approx(0.6889822, abs=1e-7)


class TestLeakage:
    def test_examples(self):
        r = leakage_robust_violation(101, 1)
        assert r.classical_bits == pytest.approx(1.3291, abs=1e-4) and r.violated
        assert not leakage_robust_violation(2, 5).violated

    @pytest.mark.parametrize("m, expected", [(0, 11), (1, 53)])
    def test_smallest_prime(self, m, expected):
        assert smallest_violating_prime(m) == expected
        assert smallest_violating_prime(m, "scan", n=4, seed=0) == expected

    def test_smallest_prime_by_hand(self):
        # direct search with the closed forms, no package code
        def first(m):
            d = 2
            while True:
                if all(d % k for k in range(2, int(d ** 0.5) + 1)) and (
                        math.log2(d) / 2 - 1 - m > -math.log2(0.5 + 0.5 / math.sqrt(d))):
                    return d
                d += 1
        assert [first(m) for m in range(3)] == [smallest_violating_prime(m) for m in range(3)]

    def test_errors(self):
        with pytest.raises(ValueError):
            leakage_robust_violation(5, -1)
        with pytest.raises(ValueError):
            smallest_violating_prime(1, "guess")
