import numpy as np
import pytest

from causal_attenuation.causality import noncausality_metric
from causal_attenuation.errors import OutOfWindow, UnresolvedShift, ValidationError
from causal_attenuation.models import AttenuationModel as A
from causal_attenuation.spectral import TimeSignal, make_grid
from causal_attenuation.wavesim import (
    PressureField,
    SourcePulse,
    gaussian_pulse,
    hann_pulse,
    propagate,
    propagate_direct,
    snapshot,
    source_from_csv,
    source_to_csv,
)

GRID = make_grid(2**14, 2.0**-12, -1.0)


@pytest.fixture
def pulse():
    return gaussian_pulse(GRID, 0.2, 0.02)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def rms_width(t, p):
    w = p**2 / np.sum(p**2)
    mu = np.sum(w * t)
    return np.sqrt(np.sum(w * (t - mu) ** 2))


class TestSource:
    def test_must_vanish_before_zero(self):
        s = np.zeros(GRID.n)
        s[GRID.zero_index - 1] = 1.0
        with pytest.raises(ValidationError):
            SourcePulse(GRID, s)

    def test_gaussian_is_cut_at_zero(self):
        p = gaussian_pulse(GRID, 0.0, 0.1)
        assert np.all(p.samples[GRID.t < 0] == 0) and p.samples[GRID.zero_index] == 1.0

    def test_hann(self):
        p = hann_pulse(GRID, 0.1, 0.2, 3.0)
        assert p.samples.max() == pytest.approx(3.0, rel=1e-6)
        assert np.all(p.samples[(GRID.t < 0.1) | (GRID.t > 0.3)] == 0)
        with pytest.raises(ValidationError):
            hann_pulse(GRID, -0.1, 0.2)

    def test_csv_round_trip(self, tmp_path, pulse):
        path = source_to_csv(tmp_path / "src.csv", pulse)
        back = source_from_csv(path, GRID)
        np.testing.assert_array_equal(back.samples, pulse.samples)

    def test_csv_resampling(self, tmp_path):
        path = tmp_path / "src.csv"
        path.write_text("t,f\n-0.5,9\n0,0\n0.5,1\n1.0,0\n")
        s = source_from_csv(path, GRID).samples
        assert s[GRID.index_of(0.25)] == pytest.approx(0.5)
        assert s[GRID.index_of(2.0)] == 0 and np.all(s[GRID.t < 0] == 0)


class TestPropagate:
    def test_lossless_replica(self, pulse):
        r = 0.5
        p = propagate(A.none(), pulse, [r]).values[0]
        expected = np.roll(pulse.samples, GRID.index_of(r) - GRID.zero_index) / (4 * np.pi * r)
        assert rel(p, expected) < 1e-6
        assert GRID.t[np.argmax(p)] == pytest.approx(0.7, abs=GRID.dt)

    def test_power_law_attenuates_and_broadens(self, pulse):
        r = 0.5
        ref = propagate(A.none(), pulse, [r]).values[0]
        p = propagate(A.power_law(0.5, 0.1581), pulse, [r]).values[0]
        assert p.max() < ref.max()
        assert rms_width(GRID.t, p) > rms_width(GRID.t, ref)
        assert GRID.t[np.argmax(p)] >= r

    def test_causal_model_and_source_give_causal_output(self, pulse):
        p = propagate(A.causal_thermo_viscous(1e-3), pulse, [0.5]).trace(0)
        assert noncausality_metric(p) < 1e-12

    def test_linearity(self, pulse):
        m = A.power_law(1.5, 0.0316)
        g = hann_pulse(GRID, 0.05, 0.1)
        both = SourcePulse(GRID, 2.0 * pulse.samples - 3.0 * g.samples)
        lhs = propagate(m, both, [0.3, 0.6]).values
        rhs = 2.0 * propagate(m, pulse, [0.3, 0.6]).values - 3.0 * propagate(m, g, [0.3, 0.6]).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))

    @pytest.mark.parametrize("k", [1, 17, 200])
    def test_delay(self, pulse, k):
        m = A.szabo(0.5, 0.1581)
        late = SourcePulse(GRID, np.roll(pulse.samples, k))
        a = propagate(m, pulse, [0.4]).values[0]
        b = propagate(m, late, [0.4]).values[0]
        assert np.max(np.abs(b - np.roll(a, k))) <= 1e-10 * np.max(np.abs(a))

    def test_spherical_spreading(self, pulse):
        radii = np.array([256, 512, 1024, 2048]) * GRID.dt
        f = propagate(A.none(), pulse, radii)
        rows = [r * np.roll(f.values[i], -GRID.index_of(r) + GRID.zero_index) for i, r in enumerate(radii)]
        for row in rows[1:]:
            assert np.max(np.abs(row - rows[0])) <= 1e-8 * np.max(np.abs(rows[0]))

    def test_unresolved_shift(self, pulse):
        with pytest.raises(UnresolvedShift):
            propagate(A.none(), pulse, [5.0])
        # front inside the window, low-frequency bulk beyond it
        with pytest.raises(UnresolvedShift):
            propagate(A.causal_thermo_viscous(1e-3), pulse, [2.0])

    def test_grid_mismatch(self, pulse):
        with pytest.raises(ValidationError):
            propagate(A.none(), pulse, [0.5], grid=make_grid(64, 0.1, -3.2))

    @pytest.mark.parametrize(
        "m,src",
        [
            (A.power_law(1.5, 0.0316), lambda g: gaussian_pulse(g, 0.2, 0.03)),
            (A.szabo(0.5, 0.1581), lambda g: hann_pulse(g, 0.05, 0.2)),
            (A.causal_gamma(1.5, 0.01), lambda g: gaussian_pulse(g, 0.3, 0.05, 2.0)),
        ],
        ids=["powerlaw-gauss", "szabo-hann", "causalgamma-gauss"],
    )
    def test_direct_oracle(self, m, src):
        g = make_grid(1024, 2.0**-8, -1.0)
        s = src(g)
        radii = [0.25, 0.5]
        fast = propagate(m, s, radii).values
        slow = propagate_direct(m, s, radii).values
        assert rel(fast, slow) < 1e-8

    def test_direct_size_limit(self):
        g = make_grid(8192, 2.0**-8, -8.0)
        with pytest.raises(ValidationError):
            propagate_direct(A.none(), gaussian_pulse(g, 0.2, 0.02), [0.5])


class TestSnapshot:
    def test_before_arrivals(self, pulse):
        f = propagate(A.causal_thermo_viscous(1e-3), pulse, [0.5, 1.0, 1.25])
        snap = snapshot(f, 0.3)
        assert np.all(np.abs(snap[:, 1]) < 1e-6 * np.abs(f.values).max())

    def test_lossless_front_kinematics(self, pulse):
        radii = np.arange(0.1, 2.01, 0.1)
        f = propagate(A.none(), pulse, radii)
        t = 1.2
        snap = snapshot(f, t)
        r_peak = snap[np.argmax(snap[:, 1] * snap[:, 0]), 0]
        assert abs(r_peak - (t - 0.2)) <= 0.1 + 1e-12

    def test_thermo_viscous_precursor(self):
        g = make_grid(2**14, 2.0**-14, -0.25)
        src = gaussian_pulse(g, 0.02, 0.002)
        f = propagate(A.thermo_viscous(0.05), src, [0.3, 0.4])
        snap = snapshot(f, 0.1)
        # both radii lie beyond c0 t + pulse extent, yet the field is nonzero there
        assert np.all(np.abs(snap[:, 1]) > 1e-6 * np.abs(f.values).max())

    def test_interpolation(self):
        v = np.zeros((1, GRID.n))
        v[0, GRID.zero_index + 1] = 2.0
        f = PressureField(GRID, [0.5], v, A.none())
        assert snapshot(f, 0.5 * GRID.dt)[0, 1] == pytest.approx(1.0)
        assert snapshot(f, GRID.t_end)[0, 1] == 0.0

    def test_out_of_window(self, pulse):
        f = propagate(A.none(), pulse, [0.5])
        with pytest.raises(OutOfWindow):
            snapshot(f, GRID.t0 - 1.0)
        with pytest.raises(OutOfWindow):
            snapshot(f, GRID.t_end + GRID.dt)

    def test_field_validation(self):
        with pytest.raises(ValidationError):
            PressureField(GRID, [0.5], np.zeros((2, GRID.n)), A.none())
        with pytest.raises(ValidationError):
            PressureField(GRID, [-0.5], np.zeros((1, GRID.n)), A.none())
        with pytest.raises(ValidationError):
            TimeSignal(GRID, np.zeros(3))
