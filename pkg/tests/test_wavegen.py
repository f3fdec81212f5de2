import numpy as np
import pytest

from gsfmkit import sigcore as sc
from gsfmkit import wavegen as wg


def measured_if(w):
    """Instantaneous frequency from the phase-difference estimate."""
    phase = np.unwrap(np.angle(w.samples))
    return np.diff(phase) * w.sample_rate / (2 * np.pi)


class TestClassic:
    def test_lfm_if_endpoints(self):
        w = wg.gen_classic("lfm", 0.5, 1000.0, 400.0)
        f = measured_if(w)
        assert abs(f[2] - (1000.0 - 200.0)) < 5.0
        assert abs(f[-3] - (1000.0 + 200.0)) < 5.0

    def test_hfm_if(self):
        fc, df, T = 1000.0, 400.0, 0.5
        w = wg.gen_classic("hfm", T, fc, df)
        f = measured_if(w)
        assert abs(f[1] - (fc + df / 2)) < 5.0  # f(0) = a/b
        assert abs(f[-2] - (fc - df / 2)) < 5.0

    def test_hfm_bad_start_rejected(self):
        with pytest.raises(ValueError):
            wg.gen_classic("hfm", 0.5, 100.0, 400.0)

    def test_unit_energy_all(self):
        for kind in ("cw", "lfm", "hfm"):
            w = wg.gen_classic(kind, 0.25, 1000.0, 200.0)
            assert abs(w.energy() - 1.0) < 1e-9
            assert np.all(np.isfinite(w.samples))


class TestGsfm:
    def test_rho1_gcfi_equals_sfm_samplewise(self):
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=1.0,
                          alpha=20.0, variant=wg.GCFI)
        ws = wg.gen_sfm(wg.SfmParams(0.25, 2000.0, 200.0, 20.0))
        assert np.max(np.abs(wg.gen_gsfm(p).samples - ws.samples)) < 1e-9

    def test_cycle_count_identity(self):
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                          alpha=80.0, variant=wg.GSFI)
        assert abs(p.cycles - 5.0) < 1e-12
        # round trip via cycles
        q = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                          cycles=5.0, variant=wg.GSFI)
        assert abs(q.alpha - 80.0) < 1e-9

    def test_even_cycle_convention(self):
        p = wg.GsfmParams(duration=0.5, carrier=2000.0, sweep=500.0, rho=2.0,
                          cycles=20.0, variant=wg.GSFI, symmetry=wg.EVEN)
        assert abs(p.alpha - 160.0) < 1e-9

    @pytest.mark.parametrize("variant", [wg.GSFI, wg.GCFI])
    @pytest.mark.parametrize("symmetry", [wg.NONSYMMETRIC, wg.EVEN])
    def test_if_bounded_and_matches_law(self, variant, symmetry):
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=1.7,
                          cycles=6.0, variant=variant, symmetry=symmetry)
        w = wg.gen_gsfm(p)
        f = measured_if(w) - p.carrier
        assert np.max(np.abs(f)) <= p.sweep / 2 + 0.01 * p.sweep
        t = w.times()[:-1] + 0.5 / w.sample_rate
        want = wg.gsfm_if(p, t)
        core = slice(w.n // 20, -w.n // 20)
        assert np.max(np.abs(f[core] - want[core])) < 0.005 * p.sweep

    def test_approx_variant_if_law(self):
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0,
                          cycles=5.0, variant=wg.APPROX)
        w = wg.gen_gsfm(p)
        f = measured_if(w) - p.carrier
        t = w.times()[:-1] + 0.5 / w.sample_rate
        want = wg.gsfm_if(p, t)
        core = slice(w.n // 20, -w.n // 20)
        assert np.max(np.abs(f[core] - want[core])) < 0.005 * p.sweep
        # phase at t=0 takes the removable-singularity limit
        assert np.isfinite(w.samples[0])

    def test_rho_below_one_rejected(self):
        with pytest.raises(ValueError):
            wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=0.8, alpha=20.0)

    def test_general_rho_integration_branch(self):
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=2.3,
                          cycles=5.0, variant=wg.GSFI, symmetry=wg.EVEN)
        w = wg.gen_gsfm(p)
        assert abs(w.energy() - 1.0) < 1e-9


class TestSfm:
    def test_mod_index(self):
        p = wg.SfmParams(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=20.0)
        assert p.mod_index == 5.0

    def test_sine_cosine_same_spectrum_envelope(self):
        kw = dict(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=20.0)
        fs_, ds_ = sc.spectrum(wg.gen_sfm(wg.SfmParams(**kw, phase="sine")), 8)
        _, dc_ = sc.spectrum(wg.gen_sfm(wg.SfmParams(**kw, phase="cosine")), 8)
        band = (fs_ > 1850) & (fs_ < 2150)
        # comb line weights |J_n(beta)|^2 identical for both phases
        from scipy.signal import find_peaks

        ps, _ = find_peaks(ds_[band], height=ds_[band].max() * 0.3, distance=30)
        pc, _ = find_peaks(dc_[band], height=dc_[band].max() * 0.3, distance=30)
        assert len(ps) == len(pc)
        assert np.allclose(ds_[band][ps], dc_[band][pc], rtol=0.05)

    def test_line_weights_follow_bessel(self):
        from gsfmkit import specfun

        p = wg.SfmParams(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=20.0)
        w = wg.gen_sfm(p)
        f, dens = sc.spectrum(w, pad_factor=8)
        beta = p.mod_index
        got, want = [], []
        for n in range(-7, 8):
            sel = np.abs(f - (p.carrier + n * p.mod_freq)) < 2.0
            got.append(np.sqrt(dens[sel].max()))
            want.append(abs(specfun.bessel_j(n, beta)) * np.sqrt(p.duration))
        got, want = np.asarray(got), np.asarray(want)
        strong = want > 0.2 * want.max()
        assert np.allclose(got[strong], want[strong], rtol=0.1)


class TestCostas:
    def test_welch_construction(self):
        assert wg.welch_costas(5, 2) == (2, 4, 3, 1)
        assert wg.is_costas((2, 4, 3, 1))

    def test_swap_breaks_code(self):
        code = list(wg.welch_costas(11, 2))
        code[0], code[1] = code[1], code[0]
        assert not wg.is_costas(tuple(code))

    def test_min_chips(self):
        assert wg.min_costas_chips(0.25, 200.0) == 8

    def test_phase_continuity(self):
        code = wg.welch_costas(11, 2)
        p = wg.CodedParams(duration=0.25, carrier=2000.0, n_chips=10, code=code,
                           chip_spacing=20.0)
        w = wg.gen_costas(p)
        # no sample-to-sample jump may exceed the largest possible rotation
        max_freq = 2000.0 + 10 * 20.0
        step = np.abs(np.diff(np.unwrap(np.angle(w.samples))))
        assert step.max() <= 2 * np.pi * max_freq / w.sample_rate + 1e-6

    def test_invalid_code_rejected(self):
        bad = (1, 2, 3, 4)
        assert not wg.is_costas(bad)
        p = wg.CodedParams(duration=0.25, carrier=2000.0, n_chips=4, code=bad,
                           chip_spacing=50.0)
        with pytest.raises(ValueError):
            wg.gen_costas(p)

    def test_pool_validated(self):
        pool = wg.costas_pool(11, max_codes=30)
        assert len(pool) >= 10
        assert all(wg.is_costas(c) for c in pool)


class TestPsk:
    def test_qpsk_transform_cycle(self):
        q = wg.qpsk_transform([1, 1, 1, 1, 1], sign=+1)
        want = np.exp(1j * np.pi / 2 * np.arange(5))
        assert np.allclose(q, want)

    def test_mlsr_length(self):
        assert wg.mlsr_sequence(5).size == 31
        for deg in range(2, 13):
            seq = wg.mlsr_sequence(deg)
            assert seq.size == 2**deg - 1
            assert set(np.unique(seq)) <= {-1, 1}

    def test_mlsr_two_valued_autocorrelation(self):
        # the m-sequence signature: circular autocorrelation in {N, -1}
        for deg in (5, 7, 9):
            seq = wg.mlsr_sequence(deg).astype(float)
            n = seq.size
            corr = {round(float(np.dot(seq, np.roll(seq, k))), 6) for k in range(n)}
            assert corr == {float(n), -1.0}

    def test_bpsk_sidelobe_slope(self):
        code = wg.mlsr_sequence(6)
        p = wg.CodedParams(duration=0.25, carrier=4000.0, n_chips=63, code=tuple(code))
        w = wg.gen_psk("bpsk", p)
        f, dens = sc.spectrum(w, pad_factor=4)
        chip_rate = 63 / 0.25

        def level(mult):
            sel = np.abs(f - (4000.0 + mult * chip_rate)) < 0.15 * chip_rate
            return 10 * np.log10(np.mean(dens[sel]))

        # asymptotic sidelobe rolloff over two octaves of offset
        assert abs((level(6.0) - level(3.0)) + 6.0) < 1.0
        assert abs((level(12.0) - level(6.0)) + 6.0) < 1.0

    def test_qpsk_lower_sidelobes_than_bpsk(self):
        code = wg.mlsr_sequence(6)
        p = wg.CodedParams(duration=0.25, carrier=4000.0, n_chips=63, code=tuple(code))
        wb = wg.gen_psk("bpsk", p)
        wq = wg.gen_psk("qpsk", p)
        fb, db_ = sc.spectrum(wb, 4)
        fq, dq_ = sc.spectrum(wq, 4)
        sel = (fb > 4600.0) & (fb < 5400.0)
        assert np.mean(dq_[sel]) < np.mean(db_[sel])

    def test_bad_code_rejected(self):
        p = wg.CodedParams(duration=0.25, carrier=2000.0, n_chips=3, code=(1, 0, -1))
        with pytest.raises(ValueError):
            wg.gen_psk("bpsk", p)


class TestReflections:
    @pytest.fixture(scope="class")
    def refl(self):
        p = wg.GsfmParams(duration=0.5, carrier=2000.0, sweep=500.0, rho=2.0,
                          cycles=10.0, variant=wg.GCFI, symmetry=wg.NONSYMMETRIC)
        return wg.gsfm_reflections(p)

    def test_six_unit_energy(self, refl):
        assert len(refl) == 6
        for w in refl.values():
            assert abs(w.energy() - 1.0) < 1e-9

    def test_flip_is_conjugate_envelope(self, refl):
        env = refl["forward"].baseband()
        env_flip = refl["forward_flip"].baseband()
        assert np.max(np.abs(env_flip - np.conj(env))) < 1e-9

    def test_reverse_is_time_reversed(self, refl):
        env = refl["forward"].baseband()
        env_rev = refl["reverse"].baseband()
        assert np.max(np.abs(env_rev - env[::-1])) < 1e-9

    def test_same_band_occupancy(self, refl):
        widths = [sc.percent_bandwidth(w, 0.98) for w in refl.values()]
        assert (max(widths) - min(widths)) / max(widths) < 0.02

    def test_forward_reverse_bcaf_low(self):
        # TBP = 1000 pair
        p = wg.GsfmParams(duration=1.0, carrier=2000.0, sweep=1000.0, rho=2.0,
                          cycles=20.0, variant=wg.GCFI, symmetry=wg.NONSYMMETRIC)
        refl = wg.gsfm_reflections(p)
        from gsfmkit import ambiguity as amb

        surf = amb.xaf(refl["forward"], refl["reverse"], model=amb.BROADBAND,
                       velocities=np.arange(-10.0, 10.5, 1.0))
        assert 20 * np.log10(surf.mag.max()) <= -15.0


class TestFourierCoeffs:
    @pytest.mark.parametrize("symmetry,alpha,T", [
        (wg.NONSYMMETRIC, 40.0, 1.0),
        (wg.EVEN, 40.0, 1.0),
    ])
    def test_closed_vs_quadrature(self, symmetry, alpha, T):
        p = wg.GsfmParams(duration=T, carrier=2000.0, sweep=100.0, rho=2.0,
                          alpha=alpha, variant=wg.GSFI, symmetry=symmetry)
        a0c, amc, bmc = wg.gsfm_fourier_coeffs(p, 10)
        a0q, amq, bmq = wg.gsfm_fourier_coeffs(p, 10, force_quadrature=True)
        assert abs(a0c - a0q) < 1e-6
        assert np.max(np.abs(amc - amq)) < 1e-6
        assert np.max(np.abs(bmc - bmq)) < 1e-6

    def test_rho1_single_harmonic(self):
        # five IF cycles over the pulse: the only cosine harmonic is m = 5
        p = wg.GsfmParams(duration=0.25, carrier=2000.0, sweep=200.0, rho=1.0,
                          cycles=5.0, variant=wg.GCFI, symmetry=wg.NONSYMMETRIC)
        a0, am, bm = wg.gsfm_fourier_coeffs(p, 8)
        assert abs(a0) < 1e-9
        assert abs(am[4] - 1.0) < 1e-9
        assert np.max(np.abs(np.delete(am, 4))) < 1e-9
        assert np.max(np.abs(bm)) < 1e-9

    def test_even_symmetric_kills_sine_terms(self):
        p = wg.GsfmParams(duration=1.0, carrier=2000.0, sweep=100.0, rho=2.0,
                          alpha=40.0, variant=wg.GSFI, symmetry=wg.EVEN)
        _, _, bm = wg.gsfm_fourier_coeffs(p, 16)
        assert np.max(np.abs(bm)) == 0.0

    def test_harmonic_decay(self):
        # Fig-3.2 parameters: T=1, sweep=100, rho=2, alpha=40, even IF
        p = wg.GsfmParams(duration=1.0, carrier=2000.0, sweep=100.0, rho=2.0,
                          alpha=40.0, variant=wg.GSFI, symmetry=wg.EVEN)
        _, am, _ = wg.gsfm_fourier_coeffs(p, 64)
        assert abs(am[59]) < 0.9 * abs(am[29])

    def test_bad_harmonic_count(self):
        p = wg.GsfmParams(duration=1.0, carrier=2000.0, sweep=100.0, rho=2.0, alpha=40.0)
        with pytest.raises(ValueError):
            wg.gsfm_fourier_coeffs(p, 0)
