import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from icdof.errors import CapExceededError
from icdof.ifs import (
    IFSSpec,
    exact_overlap_search,
    fixed_point_discrepancy,
    hochman_dimension,
    label_entropy_bits,
    sample,
    separation_check,
    truncation_bound,
)

CANTOR = IFSSpec(Fraction(1, 3), (0, 2))


class TestSpecValidation:
    def test_uniform_default_probs(self):
        assert CANTOR.probs == (Fraction(1, 2), Fraction(1, 2))

    def test_rational_detection(self):
        assert CANTOR.is_rational()
        assert not IFSSpec(0.5, (0.0, 1.0)).is_rational()

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(r=0, atoms=(0, 1)),
            dict(r=1, atoms=(0, 1)),
            dict(r=Fraction(1, 2), atoms=()),
            dict(r=Fraction(1, 2), atoms=(1, 1)),
            dict(r=Fraction(1, 2), atoms=(0, 1), probs=(Fraction(1, 2),)),
            dict(
                r=Fraction(1, 2),
                atoms=(0, 1),
                probs=(Fraction(1, 3), Fraction(1, 3)),
            ),
            dict(
                r=Fraction(1, 2),
                atoms=(0, 1),
                probs=(Fraction(3, 2), Fraction(-1, 2)),
            ),
        ],
    )
    def test_rejects_bad_specs(self, kwargs):
        with pytest.raises(ValueError):
            IFSSpec(**kwargs)


class TestDimensionFormula:
    def test_cantor(self):
        assert hochman_dimension(CANTOR) == pytest.approx(
            math.log(2) / math.log(3), abs=1e-12
        )

    def test_half_with_four_atoms(self):
        spec = IFSSpec(Fraction(1, 4), (0, 1))
        assert hochman_dimension(spec) == pytest.approx(0.5, abs=1e-12)

    def test_saturates_at_one(self):
        spec = IFSSpec(Fraction(1, 2), (0, 1, 2, 3))
        assert hochman_dimension(spec) == 1.0

    def test_biased_labels(self):
        spec = IFSSpec(
            Fraction(1, 4), (0, 1), probs=(Fraction(1, 4), Fraction(3, 4))
        )
        h = -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75)
        assert label_entropy_bits(spec) == pytest.approx(h, abs=1e-12)
        assert hochman_dimension(spec) == pytest.approx(h / 2, abs=1e-12)

    def test_rescaling_atoms_invariant(self):
        a = IFSSpec(Fraction(1, 3), (0, 2))
        b = IFSSpec(Fraction(1, 3), (0, 14))
        assert hochman_dimension(a) == hochman_dimension(b)


class TestSeparation:
    def test_cantor_separated(self):
        res = separation_check(CANTOR)
        assert res.bound == 0.5
        assert res.satisfied

    def test_three_atoms_tight(self):
        # distances {1,1,2}: bound 1/3, r = 1/3 sits exactly on it
        spec = IFSSpec(Fraction(1, 3), (0, 1, 2))
        res = separation_check(spec)
        assert res.bound == pytest.approx(1 / 3, abs=1e-15)
        assert res.satisfied

    def test_violated(self):
        spec = IFSSpec(Fraction(1, 2), (0, 1, 2))
        assert not separation_check(spec).satisfied

    def test_exact_boundary_rational(self):
        # float arithmetic would misjudge r == m/(m+M) here
        spec = IFSSpec(Fraction(1, 11), (0, 1, 10))
        assert separation_check(spec).bound == pytest.approx(1 / 11)
        assert separation_check(spec).satisfied

    def test_single_atom_rejected(self):
        with pytest.raises(ValueError):
            separation_check(IFSSpec(Fraction(1, 2), (0,)))


def naive_overlaps(spec, max_depth, tolerance=0):
    """In-test oracle: compare all equal-depth word pairs directly."""
    out = set()
    for depth in range(1, max_depth + 1):
        words = list(itertools.product(range(spec.n), repeat=depth))
        for wa, wb in itertools.combinations(words, 2):
            delta = sum(
                spec.r**t * (spec.atoms[a] - spec.atoms[b])
                for t, (a, b) in enumerate(zip(wa, wb))
            )
            if abs(delta) <= tolerance:
                out.add(tuple(sorted((wa, wb))))
    return out


class TestOverlapSearch:
    def test_cantor_has_none(self):
        assert exact_overlap_search(CANTOR, 6) == []

    def test_binary_half_has_none(self):
        # r=1/2 atoms {0,1}: equal-depth base points are distinct dyadics
        spec = IFSSpec(Fraction(1, 2), (0, 1))
        assert exact_overlap_search(spec, 8) == []

    def test_known_overlap_found(self):
        spec = IFSSpec(Fraction(1, 2), (0, 1, 2))
        pairs = exact_overlap_search(spec, 2)
        keys = {(p.word_a, p.word_b) for p in pairs}
        # 2 + r*0 == 1 + r*2 and 1 + r*0 == 0 + r*2
        assert ((1, 2), (2, 0)) in keys
        assert ((0, 2), (1, 0)) in keys
        assert all(p.delta_abs == 0 for p in pairs)

    @pytest.mark.parametrize(
        "spec,depth",
        [
            (IFSSpec(Fraction(1, 2), (0, 1, 2)), 3),
            (IFSSpec(Fraction(1, 3), (0, 1, 3)), 3),
            (CANTOR, 4),
        ],
    )
    def test_matches_naive_oracle(self, spec, depth):
        got = {(p.word_a, p.word_b) for p in exact_overlap_search(spec, depth)}
        assert got == naive_overlaps(spec, depth)

    def test_tolerance_widens(self):
        spec = IFSSpec(Fraction(1, 3), (0, 2))
        assert exact_overlap_search(spec, 3, tolerance=0) == []
        loose = exact_overlap_search(spec, 3, tolerance=10.0)
        # diameter-sized tolerance admits every pair
        n_pairs = sum(
            2**L * (2**L - 1) // 2 for L in range(1, 4)
        )
        assert len(loose) == n_pairs

    def test_separation_implies_no_overlap(self):
        for spec in [
            CANTOR,
            IFSSpec(Fraction(1, 4), (0, 1)),
            IFSSpec(Fraction(1, 3), (0, 1, 2)),
            IFSSpec(Fraction(1, 5), (0, 2, 3)),
        ]:
            if separation_check(spec).satisfied:
                assert exact_overlap_search(spec, 4) == []

    def test_pair_cap(self):
        with pytest.raises(CapExceededError):
            exact_overlap_search(CANTOR, 30)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            exact_overlap_search(CANTOR, 0)
        with pytest.raises(ValueError):
            exact_overlap_search(CANTOR, 2, tolerance=-1)


class TestSampling:
    def test_deterministic(self):
        a = sample(CANTOR, 10, 500, seed=42)
        b = sample(CANTOR, 10, 500, seed=42)
        assert np.array_equal(a, b)

    def test_seed_changes_output(self):
        a = sample(CANTOR, 10, 500, seed=42)
        b = sample(CANTOR, 10, 500, seed=43)
        assert not np.array_equal(a, b)

    def test_chunking_splits_count(self):
        out = sample(CANTOR, 5, 1001, seed=0, chunks=4)
        assert out.shape == (1001,)

    def test_depth_one_matches_label_law(self):
        spec = IFSSpec(
            Fraction(1, 2), (0, 1), probs=(Fraction(1, 4), Fraction(3, 4))
        )
        out = sample(spec, 1, 200_000, seed=7)
        assert set(np.unique(out)) <= {0.0, 1.0}
        assert np.mean(out) == pytest.approx(0.75, abs=0.01)

    def test_support_bound(self):
        out = sample(CANTOR, 12, 10_000, seed=1)
        # atoms {0,2}, r=1/3: series stays in [0, 2/(1-1/3)] = [0, 3]
        assert out.min() >= 0.0
        assert out.max() <= 3.0

    def test_bad_arguments(self):
        for kwargs in [
            dict(depth=0, count=1, seed=0),
            dict(depth=1, count=0, seed=0),
            dict(depth=1, count=1, seed=0, chunks=0),
        ]:
            with pytest.raises(ValueError):
                sample(CANTOR, **kwargs)


class TestTruncation:
    def test_bound_formula(self):
        assert truncation_bound(CANTOR, 1) == pytest.approx(1.0)
        assert truncation_bound(CANTOR, 5) == pytest.approx(3 ** (-5) * 3.0)

    def test_bound_holds_empirically(self):
        deep = sample(CANTOR, 20, 2000, seed=3)
        shallow = sample(CANTOR, 6, 2000, seed=3)
        # same seed, shared prefix labels: the tails differ by at most the bound
        assert np.max(np.abs(deep - shallow)) <= truncation_bound(CANTOR, 6) + 1e-12


class TestFixedPoint:
    def test_small_discrepancy(self):
        stat = fixed_point_discrepancy(CANTOR, depth=16, count=100_000, seed=5)
        assert stat < 0.01

    def test_wrong_ratio_negative_control(self):
        stat = fixed_point_discrepancy(
            CANTOR, depth=16, count=100_000, seed=5, r_second=0.6
        )
        assert stat > 0.1

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            fixed_point_discrepancy(CANTOR, depth=1, count=10, seed=0)
        with pytest.raises(ValueError):
            fixed_point_discrepancy(CANTOR, depth=2, count=0, seed=0)
