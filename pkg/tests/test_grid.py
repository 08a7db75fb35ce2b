import numpy as np
import pytest

from couettelab.grid import (
    GridSpec,
    field_to_csv,
    inner_product,
    l2_norm,
    load_field,
    make_grid,
    save_field,
    to_physical,
    zero_field,
)


def test_smallest_grid():
    g = make_grid(1, 1.0, np.pi)
    assert g.d_eta == pytest.approx(1.0)
    assert list(g.eta_values) == [-1.0, 0.0, 1.0]
    assert list(g.k_values) == [-1, 0, 1]


def test_sample_count_matches_hand_count():
    # 2 * eta_max / d_eta + 1 samples
    g = make_grid(8, 64.0, np.pi)
    assert g.eta_values.size == 129
    assert g.shape == (17, 129)


def test_rejects_bad_sizes():
    with pytest.raises(ValueError):
        make_grid(0, 4.0, np.pi)
    with pytest.raises(ValueError):
        make_grid(2, -1.0, np.pi)
    with pytest.raises(ValueError):
        make_grid(2, 4.3, np.pi)  # not a multiple of d_eta
    with pytest.raises(ValueError):
        GridSpec(k_max=2, n_eta=5, d_eta=1.0, L_y=np.pi)


def test_index_of_roundtrip(small_grid):
    i, j = small_grid.index_of(-2, 3.0)
    assert small_grid.k_values[i] == -2
    assert small_grid.eta_values[j] == 3.0
    with pytest.raises(ValueError):
        small_grid.index_of(0, 0.25)
    with pytest.raises(ValueError):
        small_grid.index_of(3, 0.0)


def test_set_mode_keeps_conjugate_symmetry(small_grid):
    f = zero_field(small_grid)
    f.set_mode(1, 2.0, 0.3 + 0.7j)
    assert f.get_mode(-1, -2.0) == pytest.approx(0.3 - 0.7j)
    assert f.conj_symmetry_error() == 0.0


def test_random_real_field_is_symmetric_and_zero_mean(random_field):
    assert random_field.conj_symmetry_error() < 1e-15
    assert random_field.zero_mode_norm() == 0.0


def test_physical_samples_real_for_symmetric_field(random_field):
    samples = to_physical(random_field)
    assert np.max(np.abs(samples.imag)) < 1e-12 * max(1.0, np.max(np.abs(samples.real)))


def test_inner_product_and_norm(small_grid):
    f = zero_field(small_grid)
    f.set_mode(1, 0.0, 1.0, conjugate=False)
    assert l2_norm(f) == pytest.approx(np.sqrt(small_grid.d_eta))
    g2 = zero_field(small_grid)
    g2.set_mode(1, 0.0, 2.0, conjugate=False)
    assert inner_product(f, g2) == pytest.approx(2.0 * small_grid.d_eta)


def test_binary_roundtrip(tmp_path, random_field):
    random_field.time_tag = 3.5
    path = tmp_path / "snap.bin"
    save_field(random_field, path)
    back = load_field(path)
    assert back.grid == random_field.grid
    assert back.time_tag == 3.5
    np.testing.assert_array_equal(back.coeffs, random_field.coeffs)


def test_csv_export(tmp_path, random_field):
    path = tmp_path / "snap.csv"
    field_to_csv(random_field, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,eta,re,im"
    assert len(lines) == 1 + random_field.grid.n_points
