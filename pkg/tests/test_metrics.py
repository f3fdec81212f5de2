import numpy as np
import pytest

from gsfmkit import ambiguity as amb
from gsfmkit import metrics as mt
from gsfmkit import wavegen as wg


class TestPsl:
    def test_gaussian_bump_has_floor_psl(self):
        tau = np.linspace(-1.0, 1.0, 201)
        v = np.linspace(-10.0, 10.0, 41)
        mag = np.exp(-(tau[None, :] ** 2) / 0.02 - (v[:, None] ** 2) / 8.0)
        surf = amb.AmbiguitySurface(
            delay=tau, velocity=v, doppler=v, mag=mag,
            model=amb.BROADBAND, auto=True,
        )
        rep = mt.psl(surf)
        assert rep.psl_db < -100.0

    def test_sfm_first_grating_lobe(self):
        # C = 10 cycles: q = 1 lobe at tau = 1/f_m with height 9/10
        p = wg.SfmParams(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=40.0)
        w = wg.gen_sfm(p)
        surf = amb.xaf(w, w, model=amb.BROADBAND,
                       velocities=np.arange(-20.0, 20.5, 0.5))
        rep = mt.psl(surf)
        assert abs(rep.psl_delay) == pytest.approx(0.025, abs=0.002)
        assert rep.psl_db == pytest.approx(20 * np.log10(0.9), abs=0.2)

    def test_cross_surface_rejected(self):
        w1 = wg.gen_classic("cw", 0.25, 2000.0)
        w2 = wg.gen_classic("lfm", 0.25, 2000.0, 100.0, sample_rate=w1.sample_rate)
        surf = amb.xaf(w1, w2, velocities=np.array([0.0]))
        with pytest.raises(ValueError):
            mt.psl(surf)

    def test_scaling_invariance(self, fig46_surface):
        rep = mt.psl(fig46_surface)
        scaled = amb.AmbiguitySurface(
            delay=fig46_surface.delay, velocity=fig46_surface.velocity,
            doppler=fig46_surface.doppler, mag=fig46_surface.mag * 0.37,
            model=fig46_surface.model, auto=True,
        )
        assert mt.psl(scaled).psl_db == pytest.approx(rep.psl_db, abs=1e-9)


class TestMainlobeWidth:
    def test_cw_triangle_width(self):
        w = wg.gen_classic("cw", 0.5, 1000.0)
        surf = amb.xaf(w, w, model=amb.BROADBAND, velocities=np.arange(-20.0, 20.5, 0.5))
        width = mt.mainlobe_width(surf, "delay")
        assert width == pytest.approx(2.0 * (1 - 1 / np.sqrt(2)) * 0.5, rel=0.01)

    def test_lfm_width_scales_inversely_with_sweep(self):
        vel = np.arange(-5.0, 5.5, 0.5)
        w1 = wg.gen_classic("lfm", 0.5, 2000.0, 250.0)
        w2 = wg.gen_classic("lfm", 0.5, 2000.0, 500.0)
        s1 = amb.xaf(w1, w1, velocities=vel)
        s2 = amb.xaf(w2, w2, velocities=vel)
        ratio = mt.mainlobe_width(s1, "delay") / mt.mainlobe_width(s2, "delay")
        assert abs(ratio - 2.0) < 0.2

    def test_levels_nested(self, fig46_surface):
        w3 = mt.mainlobe_width(fig46_surface, "delay", -3.0)
        w6 = mt.mainlobe_width(fig46_surface, "delay", -6.0)
        assert w3 < w6

    def test_uncrossed_level_errors(self):
        tau = np.linspace(-1.0, 1.0, 101)
        mag = np.full((1, 101), 0.9)
        surf = amb.AmbiguitySurface(delay=tau, velocity=np.array([0.0]),
                                    doppler=np.array([0.0]), mag=mag,
                                    model=amb.BROADBAND, auto=True)
        with pytest.raises(ValueError):
            mt.mainlobe_width(surf, "delay")


class TestSweep:
    def test_single_cell_matches_psl(self):
        base = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                             cycles=5.0, variant=wg.GSFI, symmetry=wg.EVEN)
        vel = np.arange(-20.0, 20.5, 1.0)
        res = mt.psl_sweep(base, cycles_grid=[5.0], rho_grid=[2.0], velocities=vel)
        w = wg.gen_gsfm(base)
        direct = mt.psl(amb.xaf(w, w, model=amb.BROADBAND, velocities=vel))
        assert res.psl_db[0, 0] == pytest.approx(direct.psl_db, abs=1e-9)
        assert res.best_rho == 2.0 and res.best_cycles == 5.0

    def test_csv_and_summary(self):
        base = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                             cycles=5.0, variant=wg.GSFI, symmetry=wg.EVEN)
        vel = np.arange(-10.0, 10.5, 2.0)
        res = mt.psl_sweep(base, cycles_grid=[4.0, 5.0], rho_grid=[1.5, 2.0],
                           velocities=vel)
        lines = mt.sweep_to_csv(res).strip().splitlines()
        assert lines[0] == "rho,cycles,tbp,psl_db"
        assert len(lines) == 1 + 4
        import json

        doc = json.loads(mt.sweep_summary(res))
        assert {"tbp", "best_rho", "best_cycles", "best_psl_db"} <= set(doc)


class TestNotchAndCarson:
    def test_flat_q_zero_depth(self):
        v = np.linspace(-20.0, 20.0, 81)
        depth, _ = mt.notch_depth(v, np.full_like(v, -27.0))
        assert depth == 0.0

    def test_grid_guard(self):
        with pytest.raises(ValueError):
            mt.notch_depth(np.array([0.0, 0.5]), np.array([-20.0, -21.0]))

    def test_carson_sfm_rule(self):
        p = wg.SfmParams(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=20.0)
        assert mt.carson_bandwidth(p) == 200.0 + 40.0
        # GSFM at rho=1 with alpha = f_m collapses to the same rule
        g = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=1.0,
                          alpha=20.0, variant=wg.GCFI)
        assert mt.carson_bandwidth(g) == pytest.approx(240.0)

    def test_carson_even_symmetric_example(self):
        g = wg.GsfmParams(duration=0.5, carrier=2000.0, sweep=500.0, rho=2.0,
                          cycles=20.0, variant=wg.GSFI, symmetry=wg.EVEN)
        assert g.alpha == pytest.approx(160.0)
        assert mt.carson_bandwidth(g) == pytest.approx(500.0 + 320.0)

    def test_carson_bounds_measured_bandwidth(self):
        from gsfmkit import sigcore as sc

        for rho, cyc in ((1.5, 10.0), (2.0, 16.0), (2.75, 35.0)):
            g = wg.GsfmParams(duration=0.5, carrier=2000.0, sweep=500.0, rho=rho,
                              cycles=cyc, variant=wg.GSFI, symmetry=wg.EVEN)
            w = wg.gen_gsfm(g)
            assert sc.spectral_containment(w, g.carrier, mt.carson_bandwidth(g)) >= 0.98

    def test_thumbtack_average_sidelobe(self):
        # average |chi|^2 outside the mainlobe ~ 1/(4 TBP) within a factor 3
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                          cycles=5.0, variant=wg.GSFI, symmetry=wg.EVEN)
        w = wg.gen_gsfm(p)
        c = 1500.0
        v_edge = p.sweep * c / (2 * p.carrier)
        surf = amb.xaf(w, w, model=amb.NARROWBAND,
                       velocities=np.linspace(-v_edge, v_edge, 101))
        from gsfmkit.metrics import _mainlobe_mask

        mask = _mainlobe_mask(surf)
        avg = np.mean(surf.mag[~mask] ** 2)
        want = mt.thumbtack_average_sidelobe(0.25, 200.0)
        assert want / 3.0 < avg < want * 3.0
