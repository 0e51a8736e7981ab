import math

import numpy as np
import pytest

from chemflow import assembly as asm
from chemflow import linsolve
from chemflow import manufactured
from chemflow.mesh import build_rect_mesh
from chemflow.scheme import InitialData, ModelParams, Stepper, TimeGrid


def constant_fields(cbar, alpha0):
    """Initial data with eta = alpha0, c = cbar, everything else at rest."""
    z = lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    zv = lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape + (2,))
    zg = lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape + (2, 2))
    return InitialData(
        eta0=lambda x, y: np.full(np.shape(x), alpha0),
        grad_eta0=zv,
        c0=lambda x, y: np.full(np.shape(x), cbar),
        grad_c0=zv,
        sigma0=zv, div_sigma0=z, rot_sigma0=z,
        u0=zv, grad_u0=zg, div_u0=z,
    )


def simple_params(**overrides):
    base = dict(chi=1.0, D_n=1.0, D_c=1.0, D_u=1.0, rho=1.0, gamma=1.0,
                grad_phi=(0.0, 0.0), alpha0=0.0)
    base.update(overrides)
    return ModelParams(**base)


class TestModelParams:
    def test_positive_checks(self):
        with pytest.raises(ValueError):
            simple_params(D_n=0.0)
        with pytest.raises(ValueError):
            simple_params(rho=-1.0)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(dt=0.0, n_steps=3)
        grid = TimeGrid(dt=0.25, n_steps=4)
        assert grid.T == pytest.approx(1.0)
        assert np.allclose(grid.times(), [0, 0.25, 0.5, 0.75, 1.0])


class TestInitState:
    def test_constant_concentration_projection_exact(self):
        mesh = build_rect_mesh(1, 1, 5, 5)
        st = Stepper(mesh, simple_params(alpha0=2.0))
        cbar = 4.25
        state = st.init_state(constant_fields(cbar, 2.0), mode="elliptic_projection")
        assert np.abs(state.c - cbar).max() <= 1e-13

    def test_stokes_projection_divergence_orthogonality(self):
        mesh = build_rect_mesh(1, 1, 10, 10)
        st = Stepper(mesh, manufactured.test2_params())
        state = st.init_state(manufactured.test2_initial_data(), mode="elliptic_projection")
        assert st.divergence_residual(state) <= 1e-10

    def test_stokes_projection_independent_of_density(self):
        # the velocity/pressure projection is defined without the density
        # scaling, so changing rho must not change the projected state
        data = manufactured.test2_initial_data()
        mesh = build_rect_mesh(1, 1, 8, 8)
        base = manufactured.test2_params()
        heavy = ModelParams(
            chi=base.chi, D_n=base.D_n, D_c=base.D_c, D_u=base.D_u,
            rho=2.0, gamma=base.gamma, grad_phi=(0.0, 0.0), alpha0=base.alpha0,
        )
        s1 = Stepper(mesh, base).init_state(data, mode="elliptic_projection")
        s2 = Stepper(mesh, heavy).init_state(data, mode="elliptic_projection")
        assert np.allclose(s1.u, s2.u, atol=1e-11)
        assert np.allclose(s1.pi, s2.pi, atol=1e-11)

    def test_projection_modes_converge_together(self):
        # elliptic and nodal concentration projections differ at second order
        data = manufactured.test2_initial_data()
        diffs = []
        for k in (10, 20, 40):
            mesh = build_rect_mesh(1, 1, k, k)
            st = Stepper(mesh, manufactured.test2_params())
            ell = st.init_state(data, mode="elliptic_projection")
            nod = st.init_state(data, mode="nodal")
            d = ell.c - nod.c
            m = asm.assemble_mass(st.layout_c).matrix
            diffs.append(math.sqrt(d @ (m @ d)))
        order1 = math.log2(diffs[0] / diffs[1])
        order2 = math.log2(diffs[1] / diffs[2])
        assert order1 >= 1.9 and order2 >= 1.9

    def test_initial_invariants_both_modes(self):
        mesh = build_rect_mesh(1, 1, 8, 8)
        st = Stepper(mesh, manufactured.test2_params())
        for mode in Stepper.INIT_MODES:
            state = st.init_state(manufactured.test2_initial_data(), mode=mode)
            assert abs(st.w_p1 @ state.n) <= 1e-11
            assert np.all(state.sigma[st.layout_sigma.constrained_dofs] == 0.0)
            assert np.all(state.u[st.layout_u.constrained_dofs] == 0.0)

    def test_unknown_mode(self):
        mesh = build_rect_mesh(1, 1, 2, 2)
        st = Stepper(mesh, simple_params())
        with pytest.raises(ValueError):
            st.init_state(constant_fields(1.0, 0.0), mode="l2")


class TestStep:
    def test_zero_state_stays_zero(self):
        # with zero mean density, gravity has nothing to act on
        mesh = build_rect_mesh(1, 1, 6, 6)
        st = Stepper(mesh, simple_params(grad_phi=(3.0, -9.0), alpha0=0.0))
        state = st.init_state(constant_fields(0.0, 0.0), mode="nodal")
        for _ in range(3):
            state, _reports = st.step(state, 1e-3)
        for arr in (state.n, state.c, state.sigma, state.u, state.pi):
            assert np.all(arr == 0.0)

    def test_constant_concentration_decay_recurrence(self):
        # eta = alpha0 and flat c: the mass matrix cancels and c follows
        # c^m = c^{m-1} (1 - gamma alpha0 dt) exactly, staying flat in space
        gamma, alpha0, cbar, dt = 8.0, 3.0, 2.0, 1e-3
        mesh = build_rect_mesh(1, 1, 5, 5)
        st = Stepper(mesh, simple_params(gamma=gamma, alpha0=alpha0))
        state = st.init_state(constant_fields(cbar, alpha0), mode="nodal")
        expected = cbar
        for _ in range(5):
            state, _ = st.step(state, dt)
            expected *= 1.0 - gamma * alpha0 * dt
            spread = state.c.max() - state.c.min()
            assert spread <= 1e-12 * abs(expected)
            assert state.c[0] == pytest.approx(expected, rel=1e-12)
            # side fields stay at rounding level (exact-arithmetic zero)
            assert np.abs(state.n).max() <= 1e-12
            assert np.abs(state.u).max() <= 1e-12
            assert np.abs(state.sigma).max() <= 1e-12

    def test_one_step_reports(self):
        mesh = build_rect_mesh(1, 1, 10, 10)
        st = Stepper(mesh, manufactured.test2_params())
        state = st.init_state(manufactured.test2_initial_data(), mode="nodal")
        new, reports = st.step(state, 2e-4, manufactured.test2_forcing())
        assert set(reports) == {"n", "sigma", "c", "u"}
        assert new.m == 1 and new.t == pytest.approx(2e-4)
        for rep in reports.values():
            assert np.isfinite(rep.residual_norm)

    def test_step_preserves_invariants(self):
        mesh = build_rect_mesh(1, 1, 8, 8)
        st = Stepper(mesh, manufactured.test2_params())
        state = st.init_state(manufactured.test2_initial_data(), mode="nodal")
        forcing = manufactured.test2_forcing()
        for _ in range(3):
            state, _ = st.step(state, 2e-4, forcing)
            assert abs(st.w_p1 @ state.n) <= 1e-11
            assert abs(st.w_p1 @ state.pi) <= 1e-11
            assert np.all(state.sigma[st.layout_sigma.constrained_dofs] == 0.0)
            assert np.all(state.u[st.layout_u.constrained_dofs] == 0.0)
            assert st.divergence_residual(state) <= 1e-9


class TestMassConservation:
    def test_mass_of_eta_formula(self):
        mesh = build_rect_mesh(2, 1, 4, 4)
        st = Stepper(mesh, simple_params(alpha0=3.0))
        state = st.init_state(constant_fields(0.0, 3.0), mode="nodal")
        assert st.mass_of_eta(state) == pytest.approx(6.0, rel=1e-13)

    def test_mass_conserved_with_transport_and_chemotaxis(self):
        # a small version of the plume physics: strong couplings, gravity
        from chemflow.io_cli import build_problem, default_config
        from dataclasses import replace

        cfg = replace(default_config("test1"), kx=12, ky=6)
        mesh = build_rect_mesh(cfg.Lx, cfg.Ly, cfg.kx, cfg.ky)
        params, data, _ = build_problem(cfg, mesh)
        st = Stepper(mesh, params)
        result = st.run(TimeGrid(dt=1e-5, n_steps=10), data, mode="elliptic_projection")
        masses = np.array([rec["mass"] for rec in result.diagnostics])
        assert np.abs(masses - masses[0]).max() <= 1e-10 * abs(masses[0])


class TestRun:
    def test_zero_steps_returns_initial_state(self):
        mesh = build_rect_mesh(1, 1, 4, 4)
        st = Stepper(mesh, simple_params(alpha0=1.0))
        result = st.run(TimeGrid(dt=1e-3, n_steps=0), constant_fields(1.0, 1.0), mode="nodal")
        assert len(result.states) == 1
        assert result.states[0].m == 0

    def test_snapshots_on_grid(self):
        mesh = build_rect_mesh(1, 1, 4, 4)
        st = Stepper(mesh, simple_params(alpha0=1.0))
        result = st.run(
            TimeGrid(dt=1e-3, n_steps=4),
            constant_fields(1.0, 1.0),
            mode="nodal",
            snapshot_times=(0.0, 2e-3, 4e-3),
        )
        assert [idx for _t, idx in result.snapshots] == [0, 2, 4]

    def test_diagnostics_fields(self):
        mesh = build_rect_mesh(1, 1, 4, 4)
        st = Stepper(mesh, simple_params(alpha0=1.0, gamma=2.0))
        result = st.run(TimeGrid(dt=1e-3, n_steps=2), constant_fields(1.0, 1.0), mode="nodal")
        rec = result.diagnostics[-1]
        for key in ("m", "t", "mass", "div_residual", "residual_n", "max_c", "min_eta"):
            assert key in rec


class TestConsistency:
    def test_discrete_residual_first_order_sweep(self):
        # plugging exact-field interpolants (levels m and m-1) into the
        # forced concentration system: the residual shrinks by >= 1.8x per
        # simultaneous halving of dt and h (first order in dt plus h^2)
        sol = manufactured.test2_solution()
        forcing = manufactured.test2_forcing(sol)
        params = manufactured.test2_params()
        norms = []
        for k, dt in [(8, 4e-3), (16, 2e-3), (32, 1e-3)]:
            mesh = build_rect_mesh(1, 1, k, k)
            st = Stepper(mesh, params)
            x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
            c0 = sol.c(x, y, 0.0)
            c1 = sol.c(x, y, dt)
            n0 = sol.eta(x, y, 0.0) - params.alpha0
            ns = st.layout_u.n_scalar
            u0 = np.zeros(st.layout_u.n_dofs)
            uu = sol.u(x, y, 0.0)
            u0[: mesh.n_nodes] = uu[..., 0]
            u0[ns : ns + mesh.n_nodes] = uu[..., 1]
            u_prev = asm.DiscreteField(st.layout_u, u0)
            skew = asm.assemble_skew_A(st.layout_c, u_prev, st.ctx).matrix
            a_c = st.M.scaled(1.0 / dt) + st.K.scaled(params.D_c) + skew
            rhs = st.M @ c0 / dt
            rhs += asm.assemble_consumption_rhs(
                st.layout_c,
                asm.DiscreteField(st.layout_c, n0),
                asm.DiscreteField(st.layout_c, c0),
                params.gamma, params.alpha0, st.ctx,
            )
            g_c = asm.AnalyticField(lambda px, py, _t=dt: forcing.g_c(px, py, _t))
            rhs += asm.assemble_load(st.layout_c, g_c, st.ctx)
            r = a_c @ c1 - rhs
            riesz, _ = linsolve.solve(st.M, r)
            norms.append(math.sqrt(abs(r @ riesz)))
        assert norms[0] / norms[1] >= 1.8
        assert norms[1] / norms[2] >= 1.8
