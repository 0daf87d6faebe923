"""Tests for dataset ingestion, emission, and splitting."""

import numpy as np
import pytest

from funkreg import (
    NonMonotoneGrid,
    ParseError,
    RaggedRows,
    SimulationConfig,
    ValidationError,
    generate_functional_sample,
    load_sample,
    save_sample,
    split_sample,
)


def write(path, text):
    path.write_text(text)
    return path


class TestLoadSample:
    def test_well_formed(self, tmp_path):
        path = write(tmp_path / "d.csv",
                     "0,1,2,3,response\n"
                     "1,2,3,4,10\n"
                     "5,6,7,8,20\n"
                     "0,0,0,0,30\n")
        sample = load_sample(path)
        assert len(sample) == 3
        assert len(sample.grid) == 4
        np.testing.assert_array_equal(sample.responses, [10.0, 20.0, 30.0])
        np.testing.assert_array_equal(sample.curves[1].values, [5.0, 6.0, 7.0, 8.0])

    def test_parse_error_names_the_cell(self, tmp_path):
        path = write(tmp_path / "d.csv",
                     "0,1,2,response\n"
                     "1,2,3,10\n"
                     "1,oops,3,20\n")
        with pytest.raises(ParseError, match="row 3, column 2"):
            load_sample(path)

    def test_ragged_rows(self, tmp_path):
        path = write(tmp_path / "d.csv",
                     "0,1,2,response\n"
                     "1,2,3,10\n"
                     "1,2,10\n")
        with pytest.raises(RaggedRows, match="row 3"):
            load_sample(path)

    def test_non_monotone_grid(self, tmp_path):
        path = write(tmp_path / "d.csv",
                     "0,2,1,response\n"
                     "1,2,3,10\n")
        with pytest.raises(NonMonotoneGrid):
            load_sample(path)

    def test_response_file_mode(self, tmp_path):
        data = write(tmp_path / "d.csv",
                     "0,0.5,1\n"
                     "1,2,3\n"
                     "4,5,6\n")
        resp = write(tmp_path / "r.txt", "10\n20\n")
        sample = load_sample(data, mode="response_file", response_path=resp)
        assert len(sample) == 2
        np.testing.assert_array_equal(sample.responses, [10.0, 20.0])

    def test_response_count_mismatch(self, tmp_path):
        data = write(tmp_path / "d.csv", "0,1\n1,2\n3,4\n")
        resp = write(tmp_path / "r.txt", "10\n")
        with pytest.raises(ValidationError):
            load_sample(data, mode="response_file", response_path=resp)

    def test_spectral_shape(self, tmp_path):
        # the 215-curve, 100-channel layout of a spectrometric file
        rng = np.random.default_rng(0)
        grid = np.linspace(850.0, 1050.0, 100)
        header = ",".join(str(g) for g in grid) + ",response"
        rows = [
            ",".join(str(v) for v in rng.normal(size=100)) + f",{rng.random()}"
            for _ in range(215)
        ]
        path = write(tmp_path / "spectra.csv", header + "\n" + "\n".join(rows) + "\n")
        sample = load_sample(path)
        assert len(sample) == 215
        assert len(sample.grid) == 100

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            load_sample(tmp_path / "absent.csv")


class TestRoundTrip:
    def test_save_load_is_exact(self, tmp_path):
        config = SimulationConfig(n_train=7, n_test=3, grid_size=21, seed=9)
        train, _ = generate_functional_sample(config)
        path = tmp_path / "train.csv"
        save_sample(train, path)
        loaded = load_sample(path)
        np.testing.assert_array_equal(loaded.responses, train.responses)
        np.testing.assert_array_equal(loaded.values_matrix(), train.values_matrix())
        np.testing.assert_array_equal(loaded.grid.points, train.grid.points)


class TestSplitSample:
    def test_deterministic_and_disjoint(self):
        config = SimulationConfig(n_train=30, n_test=1, seed=2)
        sample, _ = generate_functional_sample(config)
        a_train, a_test = split_sample(sample, 20, 10, seed=5)
        b_train, b_test = split_sample(sample, 20, 10, seed=5)
        np.testing.assert_array_equal(a_train.responses, b_train.responses)
        np.testing.assert_array_equal(a_test.responses, b_test.responses)
        combined = sorted(
            list(a_train.responses) + list(a_test.responses)
        )
        assert combined == sorted(sample.responses)

    def test_rejects_oversized_split(self):
        config = SimulationConfig(n_train=10, n_test=1, seed=2)
        sample, _ = generate_functional_sample(config)
        with pytest.raises(ValidationError):
            split_sample(sample, 8, 5, seed=0)
