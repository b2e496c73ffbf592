# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

import time

import numpy as np
import pytest

from conftest import random_maps, random_symmetric
from guided_mixup.errors import MissingInputError, PairingError, ParameterError, ShapeMismatchError
from guided_mixup.pairing import (
    PairingAlgo,
    _valid_covers,
    distance_matrix,
    exact_pairing,
    expected_random_objective,
    greedy_pairing,
    objective,
    pairing_cycles,
    pairing_from_permutation,
    permutation_from_pairing,
    random_pairing,
    read_distance_csv,
    read_pairing_csv,
    solve_pairing,
    validate_pairing,
    write_distance_csv,
    write_pairing_csv,
)

WORKED = np.array(
    [[0, 5, 2, 1], [5, 0, 3, 4], [2, 3, 0, 6], [1, 4, 6, 0]],
    dtype=np.float64,
)


def two_triangles() -> np.ndarray:
    w = np.ones((6, 6))
    for group in ([0, 1, 2], [3, 4, 5]):
        w[np.ix_(group, group)] = 10.0
    np.fill_diagonal(w, 0.0)
    return w


class TestDistanceMatrix:
    def test_identical_maps(self):
        z = np.full((4, 4), 1.0 / 16)
        w = distance_matrix([z, z.copy()])
        assert w[0, 1] == 0.0

    def test_unit_vectors(self):
        w = distance_matrix([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert w[0, 1] == pytest.approx(np.sqrt(2.0))
        assert w[0, 0] == 0.0 and w[1, 1] == 0.0

    def test_metric(self, rng):
        w = distance_matrix(random_maps(rng, 5, (8, 8)))
        np.testing.assert_array_equal(w, w.T)
        assert np.all(np.diag(w) == 0.0)
        for i in range(5):
            for j in range(5):
                for k in range(5):
                    assert w[i, j] <= w[i, k] + w[k, j] + 1e-12

    def test_downsample_block_sums(self, rng):
        maps = random_maps(rng, 3, (4, 6))
        w = distance_matrix(maps, downsample=2)
        pooled = [z.reshape(2, 2, 3, 2).sum(axis=(1, 3)) for z in maps]
        assert w[0, 2] == pytest.approx(np.linalg.norm(pooled[0] - pooled[2]))

    def test_errors(self, rng):
        with pytest.raises(PairingError):
            distance_matrix([np.ones((2, 2))])
        with pytest.raises(ShapeMismatchError):
            distance_matrix([np.ones((2, 2)), np.ones((3, 2))])
        with pytest.raises(ParameterError):
            distance_matrix(random_maps(rng, 3, (4, 4)), downsample=0)


class TestGreedy:
    def test_worked_example(self):
        p = greedy_pairing(WORKED)
        assert permutation_from_pairing(p).tolist() == [2, 0, 3, 1]
        assert pairing_cycles(permutation_from_pairing(p)) == [[0, 2, 3, 1]]
        assert objective(WORKED, p) == 17.0

    def test_all_zero_falls_back_to_index_order(self):
        for m in (3, 5, 9):
            p = greedy_pairing(np.zeros((m, m)))
            assert permutation_from_pairing(p).tolist() == [*range(1, m), 0]

    def test_equal_weights(self):
        w = np.full((7, 7), 2.5)
        np.fill_diagonal(w, 0.0)
        p = greedy_pairing(w)
        assert validate_pairing(p).ok
        assert objective(w, p) == pytest.approx(7 * 2.5)

    def test_single_hamiltonian_cycle(self, rng):
        for m in (3, 6, 17):
            perm = permutation_from_pairing(greedy_pairing(random_symmetric(rng, m)))
            assert len(pairing_cycles(perm)) == 1

    def test_deterministic_with_ties(self):
        w = np.array([[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]], dtype=np.float64)
        assert np.array_equal(greedy_pairing(w), greedy_pairing(w.copy()))

    def test_does_not_modify_input(self):
        w = WORKED.copy()
        greedy_pairing(w)
        np.testing.assert_array_equal(w, WORKED)

    @pytest.mark.parametrize("scale", [0.5, 2.0, 4.0])
    def test_scale_invariance(self, rng, scale):
        w = random_symmetric(rng, 7)
        assert np.array_equal(greedy_pairing(w), greedy_pairing(w * scale))
        assert np.array_equal(exact_pairing(w), exact_pairing(w * scale))

    def test_too_small(self):
        with pytest.raises(PairingError):
            greedy_pairing(np.zeros((2, 2)))

    def test_runtime_subcubic(self, rng):
        def median_time(m: int) -> float:
            w = random_symmetric(rng, m)
            samples = []
            for _ in range(5):
                start = time.perf_counter()
                greedy_pairing(w)
                samples.append(time.perf_counter() - start)
            return float(np.median(samples))

        median_time(64)
        assert median_time(512) / median_time(256) <= 5.0


class TestExact:
    @pytest.mark.parametrize("m,count", [(3, 2), (4, 6), (5, 24), (6, 160)])
    def test_cover_counts(self, m, count):
        assert len(_valid_covers(m)) == count

    def test_worked_example(self):
        p = exact_pairing(WORKED)
        assert objective(WORKED, p) == 17.0
        assert permutation_from_pairing(p).tolist() == [1, 3, 0, 2]

    def test_three_returns_heavier_orientation(self):
        w = np.array([[0, 5, 1], [1, 0, 5], [5, 1, 0]], dtype=np.float64)
        assert permutation_from_pairing(exact_pairing(w)).tolist() == [1, 2, 0]

    def test_two_triangles(self):
        w = two_triangles()
        exact = exact_pairing(w)
        greedy = greedy_pairing(w)
        assert objective(w, exact) == 60.0
        assert sorted(len(c) for c in pairing_cycles(permutation_from_pairing(exact))) == [3, 3]
        assert objective(w, greedy) <= 44.0
        assert len(pairing_cycles(permutation_from_pairing(greedy))) == 1

    def test_bounds(self):
        with pytest.raises(PairingError):
            exact_pairing(np.zeros((2, 2)))
        with pytest.raises(PairingError):
            exact_pairing(np.zeros((9, 9)))
        with pytest.raises(PairingError):
            exact_pairing(np.zeros((5, 5)), max_m=4)


class TestRandom:
    def test_seeded(self):
        assert np.array_equal(random_pairing(10, seed=7), random_pairing(10, seed=7))

    def test_three(self):
        for seed in range(20):
            perm = permutation_from_pairing(random_pairing(3, seed=seed)).tolist()
            assert perm in ([1, 2, 0], [2, 0, 1])

    def test_all_cycles_observed(self):
        seen = {tuple(permutation_from_pairing(random_pairing(4, seed=s)).tolist()) for s in range(1000)}
        assert seen == {tuple(c) for c in _valid_covers(4).tolist()}

    def test_too_small(self):
        with pytest.raises(PairingError):
            random_pairing(2, seed=0)


class TestSolverSuites:
    @pytest.mark.parametrize("m", [3, 4, 6, 8, 16, 64])
    def test_outputs_valid(self, m):
        for seed in range(100):
            w = random_symmetric(np.random.default_rng(seed), m)
            assert validate_pairing(greedy_pairing(w)).ok
            assert validate_pairing(random_pairing(m, seed=seed)).ok

    @pytest.mark.parametrize("m", [4, 5, 6, 7, 8])
    def test_greedy_against_exact_and_random(self, m):
        beats_random = 0
        for seed in range(50):
            w = random_symmetric(np.random.default_rng(1000 * m + seed), m)
            greedy = objective(w, greedy_pairing(w))
            assert objective(w, exact_pairing(w)) >= greedy - 1e-12
            assert greedy >= 0.0
            beats_random += greedy >= expected_random_objective(w)
        assert beats_random >= 45

    def test_expected_random_objective(self):
        empirical = np.mean([objective(WORKED, pairing_from_permutation(c)) for c in _valid_covers(4)])
        assert expected_random_objective(WORKED) == pytest.approx(empirical)

    def test_solve_dispatch(self):
        assert np.array_equal(solve_pairing(WORKED, PairingAlgo.GREEDY), greedy_pairing(WORKED))
        assert np.array_equal(solve_pairing(WORKED, PairingAlgo.EXACT), exact_pairing(WORKED))
        assert np.array_equal(solve_pairing(WORKED, PairingAlgo.RANDOM, seed=3), random_pairing(4, seed=3))


class TestValidate:
    def test_identity(self):
        report = validate_pairing(np.eye(5, dtype=np.int8))
        assert [v.constraint for v in report.violations] == ["self-pair"] * 5
        assert [v.indices for v in report.violations] == [(i,) for i in range(5)]

    def test_two_transpositions(self):
        report = validate_pairing(pairing_from_permutation([1, 0, 3, 2]))
        assert not report.ok
        assert {v.indices for v in report.violations if v.constraint == "mutual-pair"} == {(0, 1), (2, 3)}

    def test_row_and_column_sums(self):
        p = pairing_from_permutation([1, 2, 0])
        p[0, 2] = 1
        constraints = {v.constraint for v in validate_pairing(p).violations}
        assert {"row-sum", "column-sum"} <= constraints

    def test_non_binary(self):
        p = pairing_from_permutation([1, 2, 0])
        p[0, 1] = 2
        assert "binary" in {v.constraint for v in validate_pairing(p).violations}

    def test_report_text(self):
        assert str(validate_pairing(pairing_from_permutation([1, 2, 0]))) == "OK"
        assert "self-pair" in str(validate_pairing(np.eye(3, dtype=np.int8)))


class TestCsv:
    def test_pairing_roundtrip(self, tmp_path):
        p = greedy_pairing(WORKED)
        write_pairing_csv(p, tmp_path / "p.csv")
        assert (tmp_path / "p.csv").read_text().splitlines() == ["src,dst", "0,2", "1,0", "2,3", "3,1"]
        assert np.array_equal(read_pairing_csv(tmp_path / "p.csv"), p)

    def test_duplicates_accumulate(self, tmp_path):
        (tmp_path / "p.csv").write_text("src,dst\n0,1\n0,1\n1,2\n2,0\n")
        report = validate_pairing(read_pairing_csv(tmp_path / "p.csv"))
        assert "row-sum" in {v.constraint for v in report.violations}

    def test_explicit_size(self, tmp_path):
        (tmp_path / "p.csv").write_text("src,dst\n0,1\n1,2\n2,0\n")
        p = read_pairing_csv(tmp_path / "p.csv", m=4)
        assert p.shape == (4, 4)
        assert not validate_pairing(p).ok

    def test_bad_inputs(self, tmp_path):
        with pytest.raises(MissingInputError):
            read_pairing_csv(tmp_path / "none.csv")
        (tmp_path / "h.csv").write_text("a,b\n0,1\n")
        with pytest.raises(PairingError):
            read_pairing_csv(tmp_path / "h.csv")
        (tmp_path / "r.csv").write_text("src,dst\n0,x\n")
        with pytest.raises(PairingError):
            read_pairing_csv(tmp_path / "r.csv")
        (tmp_path / "o.csv").write_text("src,dst\n0,5\n")
        with pytest.raises(PairingError):
            read_pairing_csv(tmp_path / "o.csv", m=3)

    def test_distances(self, tmp_path, rng):
        w = distance_matrix(random_maps(rng, 4, (6, 6)))
        write_distance_csv(w, tmp_path / "w.csv")
        np.testing.assert_allclose(read_distance_csv(tmp_path / "w.csv"), w, rtol=1e-8)

    def test_distances_rejected(self, tmp_path):
        (tmp_path / "a.csv").write_text("0,1,2\n1,0,3\n5,3,0\n")
        with pytest.raises(PairingError):
            read_distance_csv(tmp_path / "a.csv")
        (tmp_path / "d.csv").write_text("1,1,2\n1,0,3\n2,3,0\n")
        with pytest.raises(PairingError):
            read_distance_csv(tmp_path / "d.csv")
