import math

import numpy as np
import pytest

from floqion import atoms, basis, pulses, units
from floqion.atoms import bound_states, get_model, potential_value, resonance_frequency


class TestPotentials:
    def test_v1_short_range_limit(self):
        v1 = get_model("heliumV1")
        for r in (1e-4, 1e-5, 1e-6):
            assert r * potential_value(v1, r) == pytest.approx(-2.0, abs=1e-3)

    def test_v2_pure_coulomb_tail(self):
        v2 = get_model("heliumV2")
        assert potential_value(v2, 50.0) == pytest.approx(-0.02, abs=1e-10)

    def test_v1_independent_arithmetic(self):
        v1 = get_model("heliumV1")
        r0, r1, r = 1.07147, 0.83072, 1.0
        expect = -(1.0 / r) * (1.0 + math.exp(-r / r0) - r * math.exp(-r / r1))
        assert potential_value(v1, 1.0) == pytest.approx(expect, rel=1e-14)

    def test_rejects_nonpositive_r(self):
        with pytest.raises(ValueError):
            potential_value(get_model("hydrogen"), 0.0)
        with pytest.raises(ValueError):
            potential_value(get_model("heliumV2"), -1.0)

    @pytest.mark.parametrize("name", ["hydrogen", "heliumV1", "heliumV2"])
    def test_negative_and_monotone(self, name):
        model = get_model(name)
        r = np.linspace(0.01, 60.0, 4000)
        v = potential_value(model, r)
        assert np.all(v < 0)
        assert np.all(np.diff(v) > 0)

    @pytest.mark.parametrize("name,z", [("hydrogen", 1.0), ("heliumV1", 2.0), ("heliumV2", 2.0)])
    def test_nuclear_charge(self, name, z):
        model = get_model(name)
        assert 1e-5 * potential_value(model, 1e-5) == pytest.approx(-z, abs=1e-3)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            get_model("lithium")


class TestBoundStates:
    def test_hydrogen_s_energies(self, rb_fine, hydrogen):
        sts = bound_states(hydrogen, rb_fine, 0, 3)
        np.testing.assert_allclose(
            [st.energy for st in sts], [-0.5, -0.125, -1.0 / 18.0], atol=1e-7
        )
        assert [st.label for st in sts] == ["1s", "2s", "3s"]

    def test_hydrogen_d_energies(self, rb_fine, hydrogen):
        sts = bound_states(hydrogen, rb_fine, 2, 2)
        np.testing.assert_allclose(
            [st.energy for st in sts], [-1.0 / 18.0, -1.0 / 32.0], atol=1e-7
        )
        assert [st.label for st in sts] == ["3d", "4d"]

    def test_orthonormal(self, rb_fine, hydrogen):
        sts = bound_states(hydrogen, rb_fine, 0, 4)
        s = rb_fine.band_to_dense(rb_fine.overlap())
        vecs = np.stack([st.coeffs for st in sts], axis=1)
        gram = vecs.T @ s @ vecs
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)

    def test_incomplete_flag(self, hydrogen):
        rb = basis.build_basis(rmax=10.0, k=6, n_breakpoints=30)
        sts = bound_states(hydrogen, rb, 0, 50)
        assert sts.incomplete
        assert len(sts) < 50

    def test_variational_monotone(self, hydrogen):
        energies = []
        for nb in (12, 18, 26, 40):
            rb = basis.build_basis(rmax=30.0, k=4, n_breakpoints=nb)
            energies.append(bound_states(hydrogen, rb, 0, 1)[0].energy)
        assert all(b <= a + 1e-13 for a, b in zip(energies, energies[1:]))
        assert all(e >= -0.5 - 1e-10 for e in energies)


class TestResonances:
    def test_hydrogen_1s2p(self, rb_fine, hydrogen):
        assert resonance_frequency(hydrogen, rb_fine, "1s", "2p") == pytest.approx(
            0.375, abs=1e-7
        )

    def test_helium_models(self, rb_fine):
        assert resonance_frequency(get_model("heliumV1"), rb_fine, "1s", "2p") == pytest.approx(
            0.78118, abs=1e-4
        )
        assert resonance_frequency(get_model("heliumV2"), rb_fine, "1s", "2p") == pytest.approx(
            0.77679, abs=1e-4
        )

    def test_dipole_forbidden(self, rb_fine, hydrogen):
        with pytest.raises(ValueError):
            resonance_frequency(hydrogen, rb_fine, "1s", "2s")
        with pytest.raises(ValueError):
            resonance_frequency(hydrogen, rb_fine, "1s", "3d")

    def test_ionization_potential(self, rb_fine):
        ip = atoms.ionization_potential(get_model("heliumV1"), rb_fine)
        assert ip == pytest.approx(0.905, abs=1e-3)


class TestPaperPulseAreas:
    def test_pump_area_with_cis_like_coupling(self, rb_fine):
        # sqrt(2)-enhanced ground-state coupling emulates the two-electron
        # dipole; the 5e13 W/cm2, 24.8 fs pump is then a ~2.5 pi pulse
        model = get_model("heliumV1")
        omega = resonance_frequency(model, rb_fine, "1s", "2p")
        c1s = bound_states(model, rb_fine, 0, 1).by_label("1s").coeffs
        c2p = bound_states(model, rb_fine, 1, 1).by_label("2p").coeffs
        z = rb_fine.band_to_dense(
            basis.assemble_dipole_block(rb_fine, 0, 1, 0, 0, "length", "z").ab
        )
        d = np.sqrt(2.0) * abs(c2p @ z @ c1s)
        pump = pulses.Pulse.from_intensity(5e13, omega, tau=units.fs_to_au(24.8))
        assert pulses.pulse_area(pump, d) == pytest.approx(2.5 * np.pi, rel=0.1)
        strong = pulses.Pulse.from_intensity(1e14, omega, tau=units.fs_to_au(24.8))
        assert pulses.pulse_area(strong, d) == pytest.approx(3.5 * np.pi, rel=0.1)
        assert pulses.pulse_area(strong, d) / pulses.pulse_area(pump, d) == pytest.approx(
            np.sqrt(2.0), rel=1e-12
        )
