import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimspec import generators as gen
from dimspec.geometry import (FiniteApprox, MoranParams, SequenceDescriptor, SpiralParams,
                              Winding, validate_approx)


def test_sequence_truncation_points():
    F = gen.gen_sequence(SequenceDescriptor("power", 1.0), 1e-3)
    assert len(F) == 1001
    assert F.points[0, 0] == 0.0 and F.points[-1, 0] == 1.0
    assert SequenceDescriptor("power", 2.0).n_for(1e-4) == 100
    assert SequenceDescriptor("exp_sqrt").n_for(math.exp(-10)) == 100


def test_sequence_rejects_coarse_delta():
    with pytest.raises(ValueError):
        gen.gen_sequence(SequenceDescriptor("power", 1.0), 1.0)


@pytest.mark.parametrize("desc,delta", [
    (SequenceDescriptor("power", 1.0), 1e-4),
    (SequenceDescriptor("power", 0.5), 1e-3),
    (SequenceDescriptor("exp_sqrt"), math.exp(-12)),
    (SequenceDescriptor("exponential", 1.0), math.exp(-14)),
])
def test_sequences_valid_with_decreasing_gaps(desc, delta):
    F = gen.gen_sequence(desc, delta)
    assert validate_approx(F) == []
    xs = F.points[1:, 0]  # drop the origin; the rest ascend
    gaps = np.diff(xs)
    assert np.all(gaps[1:] > gaps[:-1])


def test_compact_sequence_keeps_fidelity():
    desc = SequenceDescriptor("power", 1.0)
    delta = 1e-6
    full = gen.gen_sequence(desc, delta)
    small = gen.gen_sequence(desc, delta, compact=True)
    assert len(small) < len(full) / 2
    assert validate_approx(small) == []
    a = np.sort(full.points[:, 0])
    b = np.sort(small.points[:, 0])
    # two-sided Hausdorff distance between the samples stays within delta
    ia = np.clip(np.searchsorted(b, a), 1, len(b) - 1)
    da = np.minimum(np.abs(a - b[ia - 1]), np.abs(a - b[ia]))
    ib = np.clip(np.searchsorted(a, b), 1, len(a) - 1)
    db = np.minimum(np.abs(b - a[ib - 1]), np.abs(b - a[ib]))
    assert max(da.max(), db.max()) <= delta


def test_interval():
    assert gen.gen_interval(0.25).points[:, 0].tolist() == [0, 0.25, 0.5, 0.75, 1]
    assert len(gen.gen_interval(0.5)) == 3
    F = gen.gen_interval(1e-4)
    assert len(F) == 10001 and F.resolution == 5e-5
    assert validate_approx(F) == []


def test_spiral_power_truncation_angle():
    a = gen.spiral_alpha_max(Winding("power", 0.5), 1e-3)
    assert a == pytest.approx(1e6 - 1, rel=1e-12)


def test_spiral_exponential_chord_audit():
    w = Winding("exponential", 1.0)
    delta = math.exp(-6)
    S = gen.gen_spiral(SpiralParams(w, 6.0), delta, compact=False)
    assert tuple(S.points[0]) == (1.0, 0.0)
    assert tuple(S.points[-1]) == (0.0, 0.0)
    arc = S.points[:-1]
    chords = np.sqrt(np.sum(np.diff(arc, axis=0) ** 2, axis=1))
    assert chords.max() <= delta
    assert validate_approx(S) == []


def test_spiral_rejects_short_truncation():
    with pytest.raises(ValueError):
        gen.gen_spiral(SpiralParams(Winding("exponential", 1.0), 2.0), 1e-3)


def test_spiral_compact_core_fidelity():
    w = Winding("power", 0.5)
    delta = 2e-3
    S = gen.gen_spiral(SpiralParams(w, gen.spiral_alpha_max(w, delta)), delta)
    assert validate_approx(S) == []
    n_arc = int(S.label.split("arc=")[1])
    arc = S.points[:n_arc]
    chords = np.sqrt(np.sum(np.diff(arc, axis=0) ** 2, axis=1))
    assert chords.max() <= delta
    # the grid disc reaches every point of the coils it replaces
    core = S.points[n_arc:]
    ang = np.linspace(float(gen._dense_angle(w, delta, 1e9)), 3e4, 20000)
    tail = np.stack([w.phi(ang) * np.cos(ang), w.phi(ang) * np.sin(ang)], axis=1)
    from scipy.spatial import cKDTree
    d, _ = cKDTree(core).query(tail)
    assert d.max() <= delta


def test_power_spiral_monotonic_winding():
    w = Winding("power", 0.5)
    a = np.linspace(0, 1e4, 10001)
    drop = w.phi(a) - w.phi(a + 2 * math.pi)
    assert np.all(np.diff(drop) < 0)


def test_moran_level_one():
    p = MoranParams(0.05, 2.0, 1.5, 1)
    M = gen.gen_moran(p)
    assert p.child_count(1) == 4
    assert len(M) == 8
    assert p.length(1) == pytest.approx(0.0025)
    assert p.gap(1) == pytest.approx(0.05 ** 1.5)
    assert M.points[0, 0] == 0.0
    assert M.points[1, 0] == pytest.approx(0.0025)
    assert M.points[2, 0] == pytest.approx(0.0025 + 0.05 ** 1.5)


def test_moran_depth_zero_and_counts():
    assert gen.gen_moran(MoranParams(0.05, 2.0, 1.5, 0)).points[:, 0].tolist() == [0.0, 0.05]
    p = MoranParams(0.05, 2.0, 1.5, 3)
    M = gen.gen_moran(p)
    assert len(M) == 2 * 4 * 20 * 400
    assert validate_approx(M) == []
    assert M.resolution == pytest.approx(0.05 ** 8)


def test_moran_rejects_oversized_depth():
    with pytest.raises(ValueError):
        gen.gen_moran(MoranParams(0.05, 2.0, 1.5, 4))


def test_product_and_union():
    a = FiniteApprox.from_points([0.0, 1.0], 0.1)
    P = gen.gen_product(a, a)
    assert sorted(map(tuple, P.points.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert P.metric == "sup"
    F = gen.gen_sequence(SequenceDescriptor("power", 1.0), 1e-2)
    G = gen.gen_interval(0.1)
    assert len(gen.gen_product(F, G)) == len(F) * len(G)
    U = gen.gen_union(F, F)
    assert np.array_equal(U.points, F.points)
    two = gen.gen_union(FiniteApprox.from_points([0.0], 0.1), FiniteApprox.from_points([1.0], 0.1))
    assert len(two) == 2
    assert len(gen.gen_union(F, G)) <= len(F) + len(G)
    with pytest.raises(ValueError):
        gen.gen_union(P, FiniteApprox.from_points([[0.0, 0.0], [1.0, 1.0]], 0.1))


def test_holder_image_maps_f2_onto_f43():
    F2 = gen.gen_sequence(SequenceDescriptor("power", 2.0), 1e-4)
    img = gen.gen_holder_image(F2, 2 / 3)
    n = np.arange(1, 101)
    expected = np.concatenate([[0.0], (1.0 / n ** (4 / 3))[::-1]])
    np.testing.assert_allclose(img.points[:, 0], expected, rtol=1e-13)
    assert img.resolution == pytest.approx(1e-4 ** (2 / 3))


def test_holder_image_edge_cases():
    F = FiniteApprox.from_points([0.0, 1.0], 0.1)
    assert gen.gen_holder_image(F, 0.3).points[:, 0].tolist() == [0.0, 1.0]
    G = gen.gen_sequence(SequenceDescriptor("power", 1.0), 1e-2)
    assert np.array_equal(gen.gen_holder_image(G, 1.0).points, G.points)
    with pytest.raises(ValueError):
        gen.gen_holder_image(FiniteApprox.from_points([0.0, 2.0], 0.1), 0.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0))
def test_holder_image_round_trip(alpha):
    F = gen.gen_sequence(SequenceDescriptor("power", 1.0), 1e-3)
    back = gen.gen_holder_image(gen.gen_holder_image(F, alpha), 1 / alpha)
    np.testing.assert_allclose(back.points, F.points, rtol=1e-12, atol=0)


def test_generators_are_deterministic():
    w = Winding("exponential", 0.5)
    a = gen.gen_spiral(SpiralParams(w, gen.spiral_alpha_max(w, 1e-3)), 1e-3)
    b = gen.gen_spiral(SpiralParams(w, gen.spiral_alpha_max(w, 1e-3)), 1e-3)
    assert np.array_equal(a.points, b.points) and a.label == b.label
