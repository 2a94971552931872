import numpy as np
import pytest

from streuse import (
    AxisThresholds,
    ChannelPartition,
    GridShape,
    ReuseMask,
    TokenGrid,
    combine_or,
    coords_of,
    delta,
    detect,
    detect_axis,
    index_of,
)


def make_grid(t, h, w, d, values):
    part = ChannelPartition(d, 0, 0)
    return TokenGrid(GridShape(t, h, w, d), part, np.asarray(values, dtype=np.float64))


def random_grid(t, h, w, d, seed):
    rng = np.random.default_rng(seed)
    return make_grid(t, h, w, d, rng.standard_normal((t * h * w, d)))


# ---------------------------------------------------------------------------
# delta


def test_delta_constant_pair_is_zero():
    assert delta([1.0, 1.0], 2) == 0.0


def test_delta_hand_value():
    # mean 1, deviations +-1: sqrt((1 + 1) / 2) = 1
    assert delta([0.0, 2.0], 2) == 1.0


def test_delta_constant_window_of_four():
    assert delta([3.0, 3.0, 3.0, 3.0], 4) == 0.0


def test_delta_constant_is_exact_zero_despite_rounding():
    # 0.1 * 3 / 3 != 0.1 in floats; the constant short-circuit must kick in
    assert delta([0.1, 0.1, 0.1], 3) == 0.0


def test_delta_rejects_small_k_and_length_mismatch():
    with pytest.raises(ValueError):
        delta([1.0], 1)
    with pytest.raises(ValueError):
        delta([1.0, 2.0, 3.0], 2)


def test_delta_zero_iff_all_equal():
    rng = np.random.default_rng(31)
    for _ in range(50):
        win = rng.standard_normal(4)
        assert (delta(win, 4) == 0.0) == bool(np.all(win == win[0]))


# ---------------------------------------------------------------------------
# detect_axis


def test_constant_grid_marks_every_non_head():
    grid = make_grid(4, 2, 2, 2, np.ones((16, 2)))
    for axis in ("t", "x", "y"):
        mask = detect_axis(grid, axis, 0.1, 2)
        # half the positions along the axis are window heads
        assert mask.reusable.mean() == 0.5
        mask.validate()


def test_theta_zero_marks_only_bit_identical_windows():
    values = np.zeros((2, 2))
    values[1, 0] = 0.0      # channel 0 identical across frames
    values[1, 1] = 1e-300   # channel 1 differs by a hair
    values[0, 1] = 0.0
    grid = make_grid(2, 1, 1, 2, values)
    mask = detect_axis(grid, "t", 0.0, 2)
    assert mask.reusable[1, 0]
    assert not mask.reusable[1, 1]


def test_negative_theta_disables_even_identical_windows():
    grid = make_grid(2, 1, 1, 2, np.zeros((2, 2)))
    mask = detect_axis(grid, "t", -1.0, 2)
    assert not mask.reusable.any()


def test_hand_evaluated_adjacent_frame_check():
    # frame values 0.0 and 0.05 on channel 0: spread 0.025 < 0.1 marks
    # frame 1 with frame 0 as source; channel 1 is far apart and stays
    values = np.array([[0.0, 0.0], [0.05, 100.0]])
    grid = make_grid(2, 1, 1, 2, values)
    mask = detect_axis(grid, "t", 0.1, 2)
    assert mask.reusable[1, 0] and mask.representative[1, 0] == 0
    assert not mask.reusable[1, 1] and mask.representative[1, 1] == 1
    assert not mask.reusable[0].any()


def test_trailing_remainder_is_never_marked():
    grid = make_grid(5, 1, 1, 2, np.ones((5, 2)))
    mask = detect_axis(grid, "t", 0.5, 2)
    assert mask.reusable[1].all() and mask.reusable[3].all()
    assert not mask.reusable[0].any() and not mask.reusable[2].any()
    assert not mask.reusable[4].any()  # position 4 fits no window


def test_window_exceeding_extent_is_an_error():
    grid = random_grid(2, 3, 3, 2, 32)
    with pytest.raises(ValueError):
        detect_axis(grid, "t", 0.1, 3)


def test_axis_locality_of_per_axis_masks():
    grid = random_grid(4, 4, 4, 4, 33)
    for axis, dim in (("t", 0), ("y", 1), ("x", 2)):
        mask = detect_axis(grid, axis, 0.8, 2)
        mask.validate()
        toks, chans = np.nonzero(mask.reusable)
        for tok, c in zip(toks, chans):
            rep = mask.representative[tok, c]
            tc = list(coords_of(int(tok), grid.shape))
            rc = list(coords_of(int(rep), grid.shape))
            assert abs(tc[dim] - rc[dim]) < 2 and tc[dim] != rc[dim]
            tc[dim] = rc[dim] = 0
            assert tc == rc  # all non-axis coordinates shared


def test_window_of_four_marks_three_per_window():
    grid = make_grid(4, 1, 1, 2, np.ones((4, 2)))
    mask = detect_axis(grid, "t", 0.1, 4)
    assert mask.reusable[1:].all()
    assert not mask.reusable[0].any()
    assert (mask.representative[1:, :] == 0).all()


def test_granularity_token_requires_all_channels():
    values = np.array([[0.0, 0.0], [0.01, 50.0]])
    grid = make_grid(2, 1, 1, 2, values)
    per_channel = detect_axis(grid, "t", 0.1, 2, granularity="channel")
    assert per_channel.reusable[1, 0] and not per_channel.reusable[1, 1]
    per_token = detect_axis(grid, "t", 0.1, 2, granularity="token")
    assert not per_token.reusable.any()
    close = make_grid(2, 1, 1, 2, np.array([[0.0, 0.0], [0.01, 0.01]]))
    assert detect_axis(close, "t", 0.1, 2, granularity="token").reusable[1].all()


# ---------------------------------------------------------------------------
# combine_or


def test_combine_all_false_stays_false():
    empty = ReuseMask.empty(8, 2)
    combined = combine_or(empty, ReuseMask.empty(8, 2), ReuseMask.empty(8, 2))
    assert not combined.reusable.any()
    combined.validate()


def test_combine_single_axis_passes_through():
    grid = random_grid(2, 2, 4, 2, 34)
    mask_x = detect_axis(grid, "x", 0.9, 2)
    combined = combine_or(ReuseMask.empty(16, 2), mask_x, ReuseMask.empty(16, 2))
    assert np.array_equal(combined.reusable, mask_x.reusable)
    assert np.array_equal(combined.representative, mask_x.representative)


def test_combine_priority_t_wins_over_y():
    # token (1,1,0) is marked along t (source (0,1,0)) and along y (source
    # (1,0,0)); both sources stay computed, so no chain forms and the t
    # representative must win
    shape = GridShape(2, 2, 1, 2)
    values = np.full((4, 2), 77.0)
    tok = index_of(1, 1, 0, shape)
    t_rep = index_of(0, 1, 0, shape)
    y_rep = index_of(1, 0, 0, shape)
    values[[tok, t_rep, y_rep], :] = 5.0
    grid = TokenGrid(shape, ChannelPartition(2, 0, 0), values)
    mask_t = detect_axis(grid, "t", 0.1, 2)
    mask_y = detect_axis(grid, "y", 0.1, 2)
    assert mask_t.reusable[tok].all() and mask_y.reusable[tok].all()
    assert mask_t.representative[tok, 0] == t_rep
    assert mask_y.representative[tok, 0] == y_rep
    combined = combine_or(mask_t, ReuseMask.empty(4, 2), mask_y)
    combined.validate()
    assert combined.representative[tok, 0] == t_rep


def test_combine_resolves_cross_axis_chains_to_roots():
    # channel 0: A=(0,0,0) ~ B=(1,0,0) along t; u1=(1,0,1) and u2=(1,1,0)
    # bit-equal to B along x and y. B reuses from A, so u1/u2 resolve to A.
    shape = GridShape(2, 2, 2, 2)
    values = np.zeros((8, 2))
    values[:, 1] = np.arange(8) * 1e6  # keep channel 1 quiet
    far = {index_of(0, 0, 1, shape): 10.0, index_of(0, 1, 0, shape): 20.0,
           index_of(0, 1, 1, shape): 30.0, index_of(1, 1, 1, shape): 40.0}
    a = index_of(0, 0, 0, shape)
    b = index_of(1, 0, 0, shape)
    u1 = index_of(1, 0, 1, shape)
    u2 = index_of(1, 1, 0, shape)
    values[b, 0] = values[u1, 0] = values[u2, 0] = 0.05
    for tok, val in far.items():
        values[tok, 0] = val
    grid = TokenGrid(shape, ChannelPartition(2, 0, 0), values)

    mask = detect(grid, AxisThresholds(0.1, 0.01, 0.01), 2)
    mask.validate()
    assert {int(t) for t in np.nonzero(mask.reusable[:, 0])[0]} == {b, u1, u2}
    assert mask.representative[b, 0] == a
    assert mask.representative[u1, 0] == a  # chain u1 -> b -> a resolved
    assert mask.representative[u2, 0] == a
    assert not mask.reusable[:, 1].any()

    # pure-OR monotonicity across the conflict: disabling t keeps u1/u2 only
    mask_no_t = detect(grid, AxisThresholds(-1.0, 0.01, 0.01), 2)
    assert {int(t) for t in np.nonzero(mask_no_t.reusable[:, 0])[0]} == {u1, u2}
    assert mask_no_t.representative[u1, 0] == b
    assert mask.reusable.sum() >= mask_no_t.reusable.sum()


def test_combine_rejects_mismatched_masks():
    with pytest.raises(ValueError):
        combine_or(ReuseMask.empty(4, 2), ReuseMask.empty(5, 2), ReuseMask.empty(4, 2))
    with pytest.raises(ValueError):
        combine_or(ReuseMask.empty(4, 2, 2), ReuseMask.empty(4, 2, 3), ReuseMask.empty(4, 2, 2))


def test_combine_detects_cycles_in_arbitrary_input():
    reusable = np.array([[True], [True]])
    rep = np.array([[1], [0]])
    cyc = ReuseMask(reusable, rep, 2)
    with pytest.raises(ValueError):
        combine_or(cyc, ReuseMask.empty(2, 1), ReuseMask.empty(2, 1))


# ---------------------------------------------------------------------------
# detect


def test_all_negative_thresholds_empty_mask():
    grid = random_grid(2, 2, 2, 4, 35)
    mask = detect(grid, AxisThresholds(-1.0, -1.0, -1.0), 2)
    assert not mask.reusable.any()
    assert np.array_equal(mask.representative, np.tile(np.arange(8)[:, None], (1, 4)))


def test_time_constant_grid_marks_only_non_first_frames():
    rng = np.random.default_rng(36)
    frame = rng.standard_normal((4, 2))
    values = np.tile(frame, (2, 1))
    grid = make_grid(2, 2, 2, 2, values)
    mask = detect(grid, AxisThresholds(10.0, -1.0, -1.0), 2)
    frame0 = [index_of(0, h, w, grid.shape) for h in range(2) for w in range(2)]
    frame1 = [index_of(1, h, w, grid.shape) for h in range(2) for w in range(2)]
    assert not mask.reusable[frame0].any()
    assert mask.reusable[frame1].all()
    assert np.array_equal(mask.representative[frame1, 0], frame0)


def test_reuse_ratio_monotone_in_each_threshold():
    grid = random_grid(4, 4, 4, 4, 37)
    thetas = np.linspace(0.0, 2.5, 12)
    base = [0.3, 0.3, 0.3]
    for axis in range(3):
        prev = -1.0
        for theta in thetas:
            thr = list(base)
            thr[axis] = float(theta)
            ratio = detect(grid, AxisThresholds(*thr), 2).reuse_ratio
            assert ratio >= prev
            prev = ratio


def test_detect_masks_always_valid():
    for seed in range(5):
        grid = random_grid(4, 3, 5, 4, 40 + seed)
        for theta in (0.0, 0.2, 0.7, 3.0):
            mask = detect(grid, AxisThresholds.uniform(theta), 2)
            mask.validate()
