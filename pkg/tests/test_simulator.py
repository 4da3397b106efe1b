import numpy as np
import pytest

import annuflow as af


@pytest.fixture(scope="module")
def grid():
    return af.build_grid(1.0, 3.0, 32)


@pytest.fixture(scope="module")
def stable():
    """Decaying configuration: mu = 2 mu_c."""
    p0 = af.validate(1, 3, 5, 1)
    mu = 2.0 * af.mu_c_closed(p0)
    pr = af.validate(1, 3, 5, mu)
    g = af.build_grid(1, 3, 32)
    eig = af.leading_eigenpair(pr, mu, g)
    return pr, mu, g, eig


@pytest.fixture(scope="module")
def unstable():
    """Growing configuration: mu = 1.2 < mu_c."""
    pr = af.validate(1, 3, 5, 1.2)
    g = af.build_grid(1, 3, 32)
    eig = af.leading_eigenpair(pr, 1.2, g)
    return pr, 1.2, g, eig


class TestConstruction:
    def test_bad_ntheta(self, stable):
        pr, mu, g, _ = stable
        with pytest.raises(af.GridMismatch):
            af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=7)

    def test_bad_dt(self, stable):
        pr, mu, g, _ = stable
        with pytest.raises(af.CFLViolation):
            af.Simulator(pr, g, mu=mu, dt=-0.01, ntheta=8)

    def test_truncation(self, stable):
        pr, mu, g, _ = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=32)
        assert sim.M == 16 and sim.K == 10


class TestZeroState:
    def test_fixed_point_1000_steps(self, stable):
        pr, mu, g, _ = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        st = sim.zero_state()
        for _ in range(1000):
            st = sim.step(st)
        assert all(np.abs(c).max() == 0.0 for c in st.psi.values())

    def test_zero_amplitude_init(self, stable):
        pr, mu, g, eig = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        st = sim.init_from_mode(eig, 0.0)
        st = sim.step(st)
        assert sim.energies(st)[0] == 0.0


class TestLinearRates:
    def test_decay_matches_eigenvalue(self, stable):
        pr, mu, g, eig = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.002, ntheta=8, nonlinear=False)
        st = sim.init_from_mode(eig, 1e-4)
        _, diags = sim.run(st, 120, sample_every=10)
        rate = af.fit_growth_rate(diags)
        assert rate == pytest.approx(eig.lambda1, rel=1e-3)

    def test_growth_matches_eigenvalue(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.002, ntheta=8, nonlinear=False)
        st = sim.init_from_mode(eig, 1e-6)
        _, diags = sim.run(st, 300, sample_every=10)
        rate = af.fit_growth_rate(diags)
        assert rate == pytest.approx(eig.lambda1, rel=1e-3)

    def test_mode2_rate(self, stable):
        # with nonlinearity off every mode evolves under its own operator
        pr, mu, g, _ = stable
        A = af.ModalOperator(2, mu * af.bilaplacian_n(g, 2).matrix, 2)
        B = af.laplacian_n(g, 2)
        pairs = af.generalized_eig(A, B, af.navier_slip_bcs(g, pr, mu=mu),
                                   cap=1e6 * mu / 4.0)
        lam2, vec2 = pairs[0]
        sim = af.Simulator(pr, g, mu=mu, dt=0.001, ntheta=8, nonlinear=False)
        st = sim.zero_state()
        st.psi[2] = 1e-4 * vec2.values / np.abs(vec2.values).max()
        _, diags = sim.run(st, 100, sample_every=10)
        rate = af.fit_growth_rate(diags)
        assert rate == pytest.approx(lam2.real, rel=1e-3)

    def test_decay_bound_pointwise(self, stable):
        # ||v(t)|| <= ||v0|| e^{lambda1 t} for the nonlinear system
        pr, mu, g, eig = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.005, ntheta=8)
        st = sim.init_from_mode(eig, 1e-3)
        v0 = np.sqrt(sim.energies(st)[0])
        for _ in range(10):
            st, diags = sim.run(st, 20, sample_every=20)
            bound = v0 * np.exp(eig.lambda1 * st.t)
            assert np.sqrt(sim.energies(st)[0]) <= bound * (1 + 1e-6)


class TestEnergyBalance:
    def test_zero_state_residual(self, stable):
        pr, mu, g, _ = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        s0 = sim.zero_state()
        s1 = sim.step(s0)
        assert sim.energy_residual(s0, s1) == 0.0

    def test_second_order_convergence(self, stable):
        pr, mu, g, eig = stable
        res = []
        for dt in (0.008, 0.004, 0.002):
            sim = af.Simulator(pr, g, mu=mu, dt=dt, ntheta=8, nonlinear=False)
            s = sim.init_from_mode(eig, 1e-3)
            worst = 0.0
            for _ in range(10):
                s2 = sim.step(s)
                worst = max(worst, sim.energy_residual(s, s2))
                s = s2
            res.append(worst)
        assert res[0] / res[1] == pytest.approx(4.0, rel=0.3)
        assert res[1] / res[2] == pytest.approx(4.0, rel=0.3)

    def test_energies_nonnegative(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        st = sim.init_from_mode(eig, 1e-3)
        st, _ = sim.run(st, 50, sample_every=50)
        E3, E1, E2 = sim.energies(st)
        assert E3 > 0 and E1 > 0 and E2 > 0


class TestStructure:
    def test_cfl_violation_raised(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=50.0, ntheta=8)
        st = sim.init_from_mode(eig, 1.0)
        with pytest.raises(af.CFLViolation):
            sim.step(st)

    def test_rotational_equivariance_100_steps(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=16)
        theta0 = 0.7
        a_state = sim.init_from_mode(eig, 1e-2)
        b_state = a_state.rotated(theta0)
        for _ in range(100):
            a_state = sim.step(a_state)
            b_state = sim.step(b_state)
        rotated_after = a_state.rotated(theta0)
        for n in a_state.psi:
            scale = max(np.abs(rotated_after.psi[n]).max(), 1e-30)
            diff = np.abs(rotated_after.psi[n] - b_state.psi[n]).max()
            assert diff < 1e-8 * max(scale, 1.0)

    def test_field_is_real(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=16)
        st = sim.init_from_mode(eig, 1e-2)
        st, _ = sim.run(st, 20, sample_every=20)
        # explicit +/- n synthesis would raise if conjugate symmetry broke;
        # here we check the synthesized lattice field is real by construction
        modes = [m for f in st.modal_fields() for m in (f, f.conj())]
        phys = af.synthesize_physical(modes, 16)
        assert np.isrealobj(phys.values)

    def test_boundary_rows_after_step(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        st = sim.init_from_mode(eig, 1e-2)
        st, _ = sim.run(st, 10, sample_every=10)
        rows = af.navier_slip_bcs(g, pr, mu=mu).rows
        for n, c in st.psi.items():
            scale = max(np.abs(c).max(), 1e-30)
            assert np.abs(rows @ c).max() < 1e-8 * max(scale, 1.0)


class TestEscape:
    def test_immediate_escape(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        table = af.escape_experiment(sim, eig, [1.0], eps_thr=1e-3)
        assert table == [(1.0, 0.0)]

    def test_halving_delta_shifts_time(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.005, ntheta=8)
        table = af.escape_experiment(sim, eig, [2e-5, 1e-5], eps_thr=1e-2)
        dT = table[1][1] - table[0][1]
        assert dT == pytest.approx(np.log(2) / eig.lambda1, rel=0.05)

    def test_no_escape_raises(self, stable):
        pr, mu, g, eig = stable
        sim = af.Simulator(pr, g, mu=mu, dt=0.01, ntheta=8)
        with pytest.raises(af.NoEscape):
            af.escape_experiment(sim, eig, [1e-6], eps_thr=1.0)

    def test_phase_invariant_escape_time(self, unstable):
        pr, mu, g, eig = unstable
        sim = af.Simulator(pr, g, mu=mu, dt=0.005, ntheta=8)
        t_base = af.escape_experiment(sim, eig, [1e-4], eps_thr=1e-2)[0][1]
        st = sim.init_from_mode(eig, 1e-4).rotated(1.1)
        t_rot = None
        while t_rot is None:
            st = sim.step(st)
            if np.sqrt(sim.energies(st)[0]) > 1e-2:
                t_rot = st.t
        assert abs(t_rot - t_base) < 1e-6
