import numpy as np
import pytest

from ddehopf import models as mdl
from ddehopf.epsseries import EpsSeries
from ddehopf.errors import ModelError, NewtonError


class TestEquilibrium:
    def test_ndde_origin_for_every_delay(self, ndde):
        for lam in (0.5, 1.3079, 2.0):
            assert np.allclose(mdl.equilibrium(ndde, lam), 0.0, atol=1e-12)

    def test_sir_endemic_at_120(self, sir):
        eq = mdl.equilibrium(sir, 120.0)
        assert np.allclose(eq, [0.5896, 10.01, 6.9344], atol=1.5e-3)
        g = sir.rhs(120.0, list(eq), list(eq))
        assert max(abs(v) for v in g) < 1e-11

    def test_sir_disease_free_state(self, sir):
        p = sir.params
        state = [0.0, p["P_max"], 0.0]
        dI, dS, dR = sir.rhs(120.0, state, state)
        assert dI == 0.0 and dR == 0.0
        # the stability condition ties births to deaths at full population
        births = p["mu"] * (1 + p["P_max"]) * p["P_max"] / (1 + p["P_max"])
        assert abs(births - p["mu"] * p["P_max"]) < 1e-15
        assert abs(dS) < 1e-15  # dS = births - mu*P_max exactly

    def test_negative_delay_rejected(self, ndde):
        with pytest.raises(NewtonError):
            mdl.equilibrium(ndde, -0.1)


class TestEquilibriumSeries:
    def test_constant_series(self, sir):
        lam_ser = EpsSeries([120.0, 0.0, 0.0])
        xs = mdl.equilibrium_series(sir, lam_ser)
        eq = mdl.equilibrium(sir, 120.0)
        for x, v in zip(xs, eq):
            assert abs(x.coeffs[0] - v) < 1e-10
            assert max(abs(c) for c in x.coeffs[1:]) < 1e-10

    def test_ndde_zero_every_order(self, ndde):
        xs = mdl.equilibrium_series(ndde, EpsSeries([1.5, 1.0, 0.0, 0.0]))
        for x in xs:
            assert max(abs(c) for c in x.coeffs) < 1e-12

    def test_sir_derivative_oracle(self, sir):
        xs = mdl.equilibrium_series(sir, EpsSeries([120.0, 1.0, 0.0]))
        h = 1e-4
        fd = (mdl.equilibrium(sir, 120.0 + h)
              - mdl.equilibrium(sir, 120.0 - h)) / (2 * h)
        ours = np.array([x.coeffs[1] for x in xs])
        assert np.max(np.abs(ours - fd)) < 1e-6


class TestLinearization:
    def test_ndde_closed_form(self, ndde):
        P, Q = mdl.linearization(ndde, 1.3079)
        p = ndde.params
        D = p["d"] * p["a"] * p["b"] / (p["a"] + p["b"])
        assert np.allclose(P, [[0.0, 1.0], [0.0, 0.0]], atol=1e-12)
        assert np.allclose(Q, [[0.0, 0.0], [-D, -D * p["K"]]], atol=1e-10)

    def test_ndde_numeric_value(self):
        D = 0.1124 * (2.0576 * 1.5677) / (2.0576 + 1.5677)
        assert abs(D - 0.1000) < 2e-5

    def test_finite_difference_oracle(self, ndde, sir):
        h = 1e-6
        for model, lam in ((ndde, 1.4), (sir, 110.0)):
            P, Q = mdl.linearization(model, lam)
            x = mdl.equilibrium(model, lam)
            n = model.dim
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                colP = (model.rhs_vector(lam, x + e, x)
                        - model.rhs_vector(lam, x - e, x)) / (2 * h)
                colQ = (model.rhs_vector(lam, x, x + e)
                        - model.rhs_vector(lam, x, x - e)) / (2 * h)
                assert np.max(np.abs(P[:, j] - colP)) < 1e-6
                assert np.max(np.abs(Q[:, j] - colQ)) < 1e-6

    def test_continuity_over_delay(self, sir):
        lams = np.linspace(105.0, 125.0, 9)
        mats = [np.hstack(mdl.linearization(sir, lam)) for lam in lams]
        step = lams[1] - lams[0]
        diffs = [np.max(np.abs(mats[i + 1] - mats[i]))
                 for i in range(len(mats) - 1)]
        deriv_scale = np.median(diffs) / step
        assert max(diffs) < 10.0 * deriv_scale * step


class TestSirR0:
    def test_table_value(self, sir):
        assert abs(mdl.sir_r0(sir.params) - 2.997) < 1e-3

    def test_zero_contagion(self):
        params = dict(mdl.SIR_DEFAULTS, beta=0.0)
        assert mdl.sir_r0(params) == 0.0

    def test_small_death_rate_limit(self):
        params = dict(mdl.SIR_DEFAULTS, mu=1e-12)
        limit = params["beta"] * params["P_max"] / params["alpha"]
        assert abs(mdl.sir_r0(params) - limit) < 1e-9


class TestSeriesConsistency:
    def test_series_order0_matches_real(self, ndde, sir):
        for model, lam in ((ndde, 1.4), (sir, 115.0)):
            x = mdl.equilibrium(model, lam) + 0.05
            series_args = [EpsSeries([float(v), 0.0]) for v in x]
            g_series = model.rhs(lam, series_args, series_args)
            g_real = model.rhs(lam, list(x), list(x))
            for gs, gr in zip(g_series, g_real):
                c0 = gs.coeffs[0] if isinstance(gs, EpsSeries) else gs
                assert abs(float(c0) - float(gr)) < 1e-12

    def test_trig_arguments_stay_finite(self, ndde, sir):
        from ddehopf.trigpoly import TrigPoly
        for model in (ndde, sir):
            n = model.dim
            lam0 = model.hopf_hint[1]
            lam = EpsSeries([lam0, 0.1, 0.0])
            wave = TrigPoly.harmonic(1, 1, cos_vec=[0.5], sin_vec=[-0.2])
            zero = TrigPoly.zero(1)
            eq = mdl.equilibrium(model, lam0)
            xs = [EpsSeries([TrigPoly.constant([eq[i]]), wave, zero])
                  for i in range(n)]
            g = model.rhs(lam, xs, xs)
            for gi in g:
                for c in gi.coeffs:
                    assert np.isfinite(c.max_abs())


def test_parameter_validation():
    with pytest.raises(ModelError):
        mdl.make_ndde({"a": -1.0})
    with pytest.raises(ModelError):
        mdl.make_sir({"f": 1.5})
