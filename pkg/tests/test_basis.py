import numpy as np
import pytest
import scipy.linalg

from floqion import atoms, basis
from floqion.basis import ECS, assemble_channel_hamiltonian, assemble_dipole_block, build_basis


class TestConstruction:
    def test_spline_count(self):
        # order-k splines, clamped ends, first/last removed for the boundary
        # conditions: n_breakpoints + k - 4 usable functions
        rb = build_basis(rmax=200.0, k=6, n_breakpoints=100, spacing_rule="linear")
        assert rb.nuse == 100 + 6 - 4

    def test_overlap_bandwidth(self):
        rb = build_basis(rmax=50.0, k=6, n_breakpoints=40)
        s = rb.overlap()
        assert s.shape[0] == 2 * 6 - 1
        dense = rb.band_to_dense(s)
        for i in range(rb.nuse):
            for j in range(rb.nuse):
                if abs(i - j) >= 6:
                    assert dense[i, j] == 0.0

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            build_basis(rmax=50.0, k=6, n_breakpoints=6)  # < k+2
        with pytest.raises(ValueError):
            build_basis(rmax=50.0, k=3, n_breakpoints=30)
        with pytest.raises(ValueError):
            build_basis(rmax=50.0, k=6, n_breakpoints=30, ecs=ECS(r0=60.0, theta=0.4))
        with pytest.raises(ValueError):
            build_basis(rmax=50.0, k=6, n_breakpoints=30, ecs=ECS(r0=40.0, theta=2.0))

    def test_deterministic_assembly(self):
        rb1 = build_basis(rmax=80.0, k=6, n_breakpoints=60, spacing_rule="power:1.5")
        rb2 = build_basis(rmax=80.0, k=6, n_breakpoints=60, spacing_rule="power:1.5")
        h = atoms.get_model("hydrogen")
        assert np.array_equal(rb1.channel_hamiltonian(h, 1), rb2.channel_hamiltonian(h, 1))
        assert np.array_equal(rb1.overlap(), rb2.overlap())

    def test_quadrature_exact_for_spline_products(self):
        # order-k Gauss rule already integrates products of two splines exactly
        lo = build_basis(rmax=60.0, k=6, n_breakpoints=50, quad_order=6)
        hi = build_basis(rmax=60.0, k=6, n_breakpoints=50, quad_order=12)
        np.testing.assert_allclose(lo.overlap(), hi.overlap(), rtol=0, atol=1e-14)

    def test_symmetry(self, rb_fine, rb_fine_ecs, hydrogen):
        for rb in (rb_fine, rb_fine_ecs):
            m = rb.band_to_dense(rb.channel_hamiltonian(hydrogen, 0))
            scale = np.max(np.abs(m))
            assert np.max(np.abs(m - m.T)) < 1e-12 * scale
        assert rb_fine.overlap().dtype == np.float64
        assert rb_fine_ecs.overlap().dtype == np.complex128


class TestStructureOracles:
    def test_hydrogen_1s(self, rb_fine, hydrogen):
        h = rb_fine.band_to_dense(rb_fine.channel_hamiltonian(hydrogen, 0))
        s = rb_fine.band_to_dense(rb_fine.overlap())
        e = scipy.linalg.eigh(h, s, eigvals_only=True)
        assert e[0] == pytest.approx(-0.5, abs=1e-8)

    def test_hydrogen_2p(self, rb_fine, hydrogen):
        op = assemble_channel_hamiltonian(rb_fine, hydrogen, 1)
        h = rb_fine.band_to_dense(op.ab)
        s = rb_fine.band_to_dense(rb_fine.overlap())
        e = scipy.linalg.eigh(h, s, eigvals_only=True)
        assert e[0] == pytest.approx(-0.125, abs=1e-8)

    def test_overlap_positive_definite(self, rb_fine):
        s = rb_fine.band_to_dense(rb_fine.overlap())
        assert np.min(scipy.linalg.eigvalsh(s)) > 0


class TestDipoleBlocks:
    def test_selection_rule_rejected(self, rb_fine):
        with pytest.raises(ValueError):
            assemble_dipole_block(rb_fine, 0, 2, 0, 0)
        with pytest.raises(ValueError):
            assemble_dipole_block(rb_fine, 0, 1, 0, 1, component="z")
        with pytest.raises(ValueError):
            assemble_dipole_block(rb_fine, 0, 1, 0, 0, component="x")

    def test_hydrogen_z_oracle(self, rb_fine, h_states):
        z = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 0, 1, 0, 0).ab)
        val = h_states["2p"].coeffs @ z @ h_states["1s"].coeffs
        assert abs(val) == pytest.approx(128.0 * np.sqrt(2.0) / 243.0, abs=1e-6)

    def test_length_velocity_identity(self, rb_fine, h_states):
        # <a|p|b> = i (Ea - Eb) <a|r|b>  =>  <a|d/dz|b> = (Eb - Ea) <a|z|b>
        z = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 0, 1, 0, 0, "length").ab)
        dz = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 0, 1, 0, 0, "velocity").ab)
        c1s, c2p = h_states["1s"].coeffs, h_states["2p"].coeffs
        e1s, e2p = h_states["1s"].energy, h_states["2p"].energy
        lhs = c2p @ dz @ c1s
        rhs = (e1s - e2p) * (c2p @ z @ c1s)
        assert lhs == pytest.approx(rhs, abs=1e-6)

    def test_gradient_antisymmetry(self, rb_fine):
        up = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 0, 1, 0, 0, "velocity").ab)
        down = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 1, 0, 0, 0, "velocity").ab)
        assert np.max(np.abs(down + up.T)) < 1e-12

    def test_x_component_magnitude_from_s(self, rb_fine, h_states):
        # |<2p m=+-1|x|1s>| = |<2p m=0|z|1s>| / sqrt(2) for an s initial state
        z = rb_fine.band_to_dense(assemble_dipole_block(rb_fine, 0, 1, 0, 0, "length", "z").ab)
        vz = h_states["2p"].coeffs @ z @ h_states["1s"].coeffs
        for mp in (+1, -1):
            x = rb_fine.band_to_dense(
                assemble_dipole_block(rb_fine, 0, 1, 0, mp, "length", "x").ab
            )
            vx = h_states["2p"].coeffs @ x @ h_states["1s"].coeffs
            assert abs(vx) == pytest.approx(abs(vz) / np.sqrt(2.0), rel=1e-12)


class TestECS:
    def test_bound_states_stay_real(self, rb_fine_ecs, hydrogen):
        h = rb_fine_ecs.band_to_dense(rb_fine_ecs.channel_hamiltonian(hydrogen, 0))
        s = rb_fine_ecs.band_to_dense(rb_fine_ecs.overlap())
        ev = scipy.linalg.eig(h, s, right=False)
        for e_exact in (-0.5, -0.125, -1.0 / 18.0):
            d = np.min(np.abs(ev - e_exact))
            assert d < 1e-8

    def test_continuum_rotates_down(self, rb_fine_ecs, hydrogen):
        h = rb_fine_ecs.band_to_dense(rb_fine_ecs.channel_hamiltonian(hydrogen, 0))
        s = rb_fine_ecs.band_to_dense(rb_fine_ecs.overlap())
        ev = scipy.linalg.eig(h, s, right=False)
        cont = ev[(ev.real > 0.05) & (ev.real < 2.0)]
        assert len(cont) > 5
        assert np.all(cont.imag < -1e-4)

    def test_knot_snapped_to_r0(self, rb_fine_ecs):
        assert np.min(np.abs(rb_fine_ecs.breakpoints - rb_fine_ecs.ecs.r0)) == 0.0

    def test_real_twin(self, rb_fine_ecs):
        rb = rb_fine_ecs.real()
        assert rb.ecs is None
        assert rb.overlap().dtype == np.float64


class TestEvaluate:
    def test_point_weights_match_evaluate(self, rb_fine, h_states):
        w_val, w_der = rb_fine.point_weights(37.0)
        c = h_states["1s"].coeffs
        assert w_val @ c == pytest.approx(rb_fine.evaluate(c, 37.0), rel=1e-12)
        assert w_der @ c == pytest.approx(rb_fine.evaluate(c, 37.0, der=True), rel=1e-10)

    def test_known_1s_shape(self, rb_fine, h_states):
        r = np.array([0.5, 1.0, 2.0, 5.0])
        u = rb_fine.evaluate(h_states["1s"].coeffs, r)
        np.testing.assert_allclose(u, 2.0 * r * np.exp(-r), rtol=1e-7)
