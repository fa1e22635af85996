import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from causal_attenuation.causality import (
    CausalityReport,
    FrontFit,
    assess,
    classify,
    front_arrival,
    kernel_report,
    kk_residual,
    noncausality_metric,
    travel_time_fit,
)
from causal_attenuation.errors import DegenerateSignal, NonDecayingIntegrand, ValidationError
from causal_attenuation.kernels import figure_grid, green_trace, kernel_K, thermo_viscous_grid
from causal_attenuation.models import AttenuationModel as A
from causal_attenuation.models import Classification, alpha_star_derivative, expected_causality
from causal_attenuation.spectral import TimeSignal, delta, make_grid

SMALL = make_grid(1024, 0.01, -5.12)
C, NC = Classification.CAUSAL, Classification.NON_CAUSAL


class TestMetric:
    def test_delta_at_zero(self):
        assert noncausality_metric(delta(SMALL)) == 0.0

    def test_negative_delta(self):
        f = delta(SMALL, -10 * SMALL.dt)
        assert noncausality_metric(f, 2 * SMALL.dt) == 1.0

    def test_linf(self):
        s = np.zeros(SMALL.n)
        s[SMALL.zero_index - 20] = 0.5
        s[SMALL.zero_index + 3] = 2.0
        assert noncausality_metric(TimeSignal(SMALL, s), norm="linf") == pytest.approx(0.25)
        assert noncausality_metric(TimeSignal(SMALL, s)) == pytest.approx(0.25 / 4.25)

    def test_degenerate(self):
        with pytest.raises(DegenerateSignal):
            noncausality_metric(TimeSignal(SMALL, np.zeros(SMALL.n)))
        with pytest.raises(DegenerateSignal):
            noncausality_metric(TimeSignal(SMALL, np.zeros(SMALL.n)), norm="linf")

    def test_guard_band_floor(self):
        with pytest.raises(ValidationError):
            noncausality_metric(delta(SMALL), SMALL.dt)
        with pytest.raises(ValidationError):
            noncausality_metric(delta(SMALL), norm="l1")

    def test_power_law_3_3_is_noncausal(self):
        assert noncausality_metric(kernel_K(A.power_law(3.3, 0.0027), 0.25, figure_grid())) > 1e-2

    @settings(max_examples=40)
    @given(st.integers(2, 60), st.integers(0, 60), st.integers(0, 2**31))
    def test_monotone_in_epsilon(self, k1, extra, seed):
        f = TimeSignal(SMALL, np.random.default_rng(seed).standard_normal(SMALL.n))
        e1, e2 = k1 * SMALL.dt, (k1 + extra) * SMALL.dt
        assert noncausality_metric(f, e1) >= noncausality_metric(f, e2)

    @settings(max_examples=40)
    @given(st.integers(0, 100), st.integers(0, 2**31))
    def test_shift_right_never_increases(self, k, seed):
        rng = np.random.default_rng(seed)
        s = np.zeros(SMALL.n)
        s[:600] = rng.standard_normal(600)  # leave room so nothing wraps
        f = TimeSignal(SMALL, s)
        g = TimeSignal(SMALL, np.roll(s, k))
        assert noncausality_metric(g) <= noncausality_metric(f)


class TestClassify:
    def test_examples(self):
        assert classify(0.0, 1e-3) is C
        assert classify(0.2, 1e-3) is NC
        assert classify(1e-3) is C

    @pytest.mark.parametrize("th", [0.6, 0.0, 0.5])
    def test_threshold_range(self, th):
        with pytest.raises(ValidationError):
            classify(0.1, th)


class TestReport:
    def test_round_trip(self):
        r = assess(delta(SMALL))
        d = r.to_dict()
        assert d["schema_version"] == 1 and d["classification"] == "Causal"
        assert CausalityReport.from_dict(d) == r

    def test_inconsistent_classification_rejected(self):
        with pytest.raises(ValidationError):
            CausalityReport(0.5, 0.04, C, 1e-3)
        with pytest.raises(ValidationError):
            CausalityReport(1.5, 0.04, NC, 1e-3)

    def test_kernel_report(self):
        k, rep = kernel_report(A.power_law(1.5, 0.0316), 0.25, figure_grid())
        assert rep.classification is NC and rep.truncation_bound < 1e-12
        assert k.grid == figure_grid()


class TestAgreement:
    @pytest.mark.parametrize(
        "m",
        [A.power_law(g, a) for g, a in ((0.5, 0.1581), (1.5, 0.0316), (2.7, 0.0071), (3.3, 0.0027))]
        + [A.szabo(g, a) for g, a in ((0.5, 0.1581), (1.5, 0.0316), (2.7, 0.0071), (3.3, 0.0027))],
        ids=lambda m: m.label(),
    )
    def test_figure_models(self, m):
        _, rep = kernel_report(m, 0.25, figure_grid())
        assert rep.classification is expected_causality(m).expected

    @pytest.mark.parametrize(
        "m", [A.thermo_viscous(1e-5), A.causal_thermo_viscous(1e-5)], ids=lambda m: m.label()
    )
    def test_thermo_viscous_pair(self, m):
        _, rep = kernel_report(m, 0.25, thermo_viscous_grid(1e-5))
        assert rep.classification is expected_causality(m).expected


class TestFront:
    def test_lossless_arrival(self):
        g = figure_grid()
        t = front_arrival(green_trace(A.none(), 0.25, g))
        assert abs(t - 0.25) <= 2 * g.dt

    def test_causal_thermo_viscous_arrives_no_earlier(self):
        # the alpha1 term delays the bulk of the pulse to (1 + alpha1) r / c0,
        # so the window must reach past t = 0.5
        g = thermo_viscous_grid(1e-5, n=2**21)
        t = front_arrival(green_trace(A.causal_thermo_viscous(1e-5), 0.25, g))
        assert t >= 0.25 - 2 * g.dt

    def test_thermo_viscous_arrives_early(self):
        g = thermo_viscous_grid(1e-5)
        t = front_arrival(green_trace(A.thermo_viscous(1e-5), 0.25, g), 1e-4)
        assert t < 0.25 - 4 * g.dt

    def test_rejects_shifted_and_bad_level(self):
        tr = green_trace(A.none(), 0.25, figure_grid(), shifted=True)
        with pytest.raises(ValidationError):
            front_arrival(tr)
        with pytest.raises(ValidationError):
            front_arrival(green_trace(A.none(), 0.25, figure_grid()), 0.5)

    def test_lossless_fit(self):
        # radii on the sample lattice, so the delay is an exact shift
        fit = travel_time_fit(A.none(), [0.1, 0.2, 0.3, 0.4, 0.5], make_grid(2**18, 1e-5, -0.65536))
        assert fit.slope == pytest.approx(1.0, rel=1e-2)
        assert abs(fit.intercept) < 1e-3 and fit.r_squared > 0.9999
        assert fit.to_dict()["front_speed"] == pytest.approx(fit.front_speed)

    def test_causal_gamma_fit(self):
        g = make_grid(2**18, 1e-5, -0.65536)
        fit = travel_time_fit(A.causal_gamma(1.5, 1e-3), [0.1, 0.2, 0.3, 0.4, 0.5], g)
        assert fit.r_squared > 0.999 and fit.front_speed <= 1.01

    def test_needs_four_radii(self):
        with pytest.raises(ValidationError):
            travel_time_fit(A.none(), [0.1, 0.2, 0.3], figure_grid())

    def test_front_fit_invariants(self):
        with pytest.raises(ValidationError):
            FrontFit(np.ones(4), np.array([0, 1, np.nan, 2.0]), 1.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValidationError):
            FrontFit(np.ones(4), np.zeros(4), -1.0, 0.0, 1.0, -1.0)


def hilbert_pv(re, x, parity):
    """``(1/pi) PV int Re(s) / (x - s) ds`` for ``Re`` of given parity with a ``s**-1/2`` cusp.

    Folding the line onto ``s > 0`` gives the kernel ``2s/(x**2 - s**2)`` for
    odd ``Re`` and ``2x/(x**2 - s**2)`` for even ``Re``; substituting
    ``s = v**2`` removes the cusp and leaves one Cauchy principal value at
    ``v = sqrt(x)``.
    """
    rx = np.sqrt(x)

    def g(v):
        # integrand times (v - sqrt x), with ds = 2 v dv
        s = v * v
        num = 2 * s if parity == "odd" else 2 * x
        return -re(s) * num * 2 * v / ((x + s) * (v + rx))

    # the derivative is 0/0 at s = 0; the integrand is bounded there
    pv = quad(g, 1e-12 * rx, 4 * rx, weight="cauchy", wvar=rx, limit=400)[0]
    tail = quad(lambda v: g(v) / (v - rx), 4 * rx, np.inf, limit=400)[0]
    return (pv + tail) / np.pi


class TestKK:
    def grid(self):
        return make_grid(4096, 2.0**-6, -32.0)

    @pytest.mark.parametrize("g,a", [(0.5, 0.1581), (1.5, 0.0316)])
    def test_first_derivative(self, g, a):
        assert kk_residual(A.power_law(g, a), self.grid(), 1) < 0.05

    @pytest.mark.parametrize("g,a,order", [(0.5, 0.1581, 1), (1.5, 0.0316, 2)])
    def test_principal_value_oracle(self, g, a, order):
        # independent check that Im a = H{Re a} holds pointwise at 16 frequencies
        m = A.power_law(g, a)

        def re(s):
            return float(alpha_star_derivative(m, np.array([s]), order).real[0])

        for x in np.geomspace(0.3, 80.0, 16):
            im = float(alpha_star_derivative(m, np.array([x]), order).imag[0])
            parity = "odd" if order % 2 else "even"
            assert hilbert_pv(re, x, parity) == pytest.approx(im, rel=1e-6)

    def test_causal_models(self):
        g = self.grid()
        assert kk_residual(A.causal_thermo_viscous(0.05), g, 1) < 0.05
        assert kk_residual(A.causal_gamma(1.5, 0.05), g, 1) < 0.05

    def test_degenerate(self):
        with pytest.raises(DegenerateSignal):
            kk_residual(A.none(), self.grid(), 1)

    def test_growing_integrand(self):
        with pytest.raises(NonDecayingIntegrand):
            kk_residual(A.power_law(3.3, 0.0027), self.grid(), 0)

    def test_bad_arguments(self):
        with pytest.raises(ValidationError):
            kk_residual(A.power_law(0.5, 0.1), self.grid(), -1)
