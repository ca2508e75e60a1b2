use nalgebra::{DMatrix, DVector};

use super::{JacobianMode, Scheme};
use crate::discretization::{assemble_tangent_coupling, assemble_weighted_stiffness, State};
use crate::error::Result;
use crate::model::StringModel;

impl StringModel {
    /// Elementwise strain efforts `½Ŝ` over a step.
    ///
    /// The discrete-gradient scheme uses the Greenspan secant of `W`, the
    /// midpoint rule the derivative of `W` at the averaged strain.
    pub fn strain_efforts(&self, scheme: Scheme, state_n: &State, state_next: &State) -> Result<DVector<f64>> {
        let m = self.mesh.n_elements();
        let mut z = DVector::zeros(m);
        for e in 0..m {
            let (c0, c1) = (state_n.strains[e], state_next.strains[e]);
            z[e] = match scheme {
                Scheme::DiscreteGradient => self.law.greenspan_derivative(c0, c1, self.switch_tol)?,
                Scheme::Midpoint => self.law.energy_slope(0.5 * (c0 + c1))?,
            };
        }
        Ok(z)
    }

    fn strain_effort_slopes(&self, scheme: Scheme, state_n: &State, state_next: &State) -> Result<DVector<f64>> {
        let m = self.mesh.n_elements();
        let mut dz = DVector::zeros(m);
        for e in 0..m {
            let (c0, c1) = (state_n.strains[e], state_next.strains[e]);
            dz[e] = match scheme {
                Scheme::DiscreteGradient => self.law.greenspan_derivative_wrt_next(c0, c1, self.switch_tol)?,
                Scheme::Midpoint => 0.5 * self.law.energy_curvature(0.5 * (c0 + c1))?,
            };
        }
        Ok(dz)
    }

    /// Step residual before boundary constraints are imposed, stacked as
    /// `[r; v; C]` rows:
    ///
    /// ```text
    /// r̂₁ - r̂₀ - h v̂ₘ
    /// M_ρ(v̂₁ - v̂₀) - h(F_b(tₘ) - 2K(r̂ₘ)z) - hBû(tₘ)
    /// M_S(Ĉ₁ - Ĉ₀) - 2hK(r̂ₘ)ᵀv̂ₘ
    /// ```
    pub fn unconstrained_residual(
        &self,
        scheme: Scheme,
        state_n: &State,
        state_next: &State,
        h: f64,
        t_n: f64,
    ) -> Result<DVector<f64>> {
        let n = self.mesh.n_dofs();
        let m = self.mesh.n_elements();
        let t_mid = t_n + 0.5 * h;
        let mid = State::midpoint(state_n, state_next);
        let z = self.strain_efforts(scheme, state_n, state_next)?;
        let k = assemble_tangent_coupling(&self.mesh, &mid.positions);
        let u = self.boundary.evaluate_input(t_mid, self.dim());

        let mut res = DVector::zeros(2 * n + m);
        let r_rows = &state_next.positions - &state_n.positions - &mid.velocities * h;
        let internal = &k * &z * 2.0;
        let v_rows = &self.ops.mass * (&state_next.velocities - &state_n.velocities)
            - (self.ops.body_force_at(t_mid) - internal) * h
            - self.ops.input_map.apply(&u) * h;
        let c_rows = (&state_next.strains - &state_n.strains).component_mul(&self.ops.strain_mass)
            - k.transpose() * &mid.velocities * (2.0 * h);
        res.rows_mut(0, n).copy_from(&r_rows);
        res.rows_mut(n, n).copy_from(&v_rows);
        res.rows_mut(2 * n, m).copy_from(&c_rows);
        Ok(res)
    }

    /// Step residual with pinned DOFs replaced by their constraint rows.
    pub fn residual(&self, scheme: Scheme, state_n: &State, state_next: &State, h: f64, t_n: f64) -> Result<DVector<f64>> {
        let mut res = self.unconstrained_residual(scheme, state_n, state_next, h, t_n)?;
        self.boundary.apply_dirichlet_residual(&self.mesh, state_next, &mut res);
        Ok(res)
    }

    pub fn residual_dg(&self, state_n: &State, state_next: &State, h: f64, t_n: f64) -> Result<DVector<f64>> {
        self.residual(Scheme::DiscreteGradient, state_n, state_next, h, t_n)
    }

    pub fn residual_midpoint(&self, state_n: &State, state_next: &State, h: f64, t_n: f64) -> Result<DVector<f64>> {
        self.residual(Scheme::Midpoint, state_n, state_next, h, t_n)
    }

    /// Derivative of [`residual`](Self::residual) with respect to the new state.
    pub fn newton_jacobian(
        &self,
        scheme: Scheme,
        state_n: &State,
        state_next: &State,
        h: f64,
        t_n: f64,
        mode: JacobianMode,
    ) -> Result<DMatrix<f64>> {
        match mode {
            JacobianMode::Analytic => self.analytic_jacobian(scheme, state_n, state_next, h),
            JacobianMode::FiniteDifference => self.finite_difference_jacobian(scheme, state_n, state_next, h, t_n),
        }
    }

    fn analytic_jacobian(&self, scheme: Scheme, state_n: &State, state_next: &State, h: f64) -> Result<DMatrix<f64>> {
        let n = self.mesh.n_dofs();
        let m = self.mesh.n_elements();
        let mid = State::midpoint(state_n, state_next);
        let z = self.strain_efforts(scheme, state_n, state_next)?;
        let dz = self.strain_effort_slopes(scheme, state_n, state_next)?;
        let k = assemble_tangent_coupling(&self.mesh, &mid.positions);
        let k_v = assemble_tangent_coupling(&self.mesh, &mid.velocities);

        let mut jac = DMatrix::zeros(2 * n + m, 2 * n + m);
        for i in 0..n {
            jac[(i, i)] = 1.0;
            jac[(i, n + i)] = -0.5 * h;
        }
        jac.view_mut((n, 0), (n, n))
            .copy_from(&(assemble_weighted_stiffness(&self.mesh, &z) * h));
        jac.view_mut((n, n), (n, n)).copy_from(&self.ops.mass);
        let mut k_scaled = k.clone();
        for (e, mut col) in k_scaled.column_iter_mut().enumerate() {
            col *= 2.0 * h * dz[e];
        }
        jac.view_mut((n, 2 * n), (n, m)).copy_from(&k_scaled);
        jac.view_mut((2 * n, 0), (m, n)).copy_from(&(k_v.transpose() * -h));
        jac.view_mut((2 * n, n), (m, n)).copy_from(&(k.transpose() * -h));
        jac.view_mut((2 * n, 2 * n), (m, m)).set_diagonal(&self.ops.strain_mass);

        self.boundary.apply_dirichlet_jacobian(&self.mesh, &mut jac);
        Ok(jac)
    }

    fn finite_difference_jacobian(
        &self,
        scheme: Scheme,
        state_n: &State,
        state_next: &State,
        h: f64,
        t_n: f64,
    ) -> Result<DMatrix<f64>> {
        let x = state_next.to_stacked();
        let size = x.len();
        let mut jac = DMatrix::zeros(size, size);
        for j in 0..size {
            let step = 1e-6 * (1.0 + x[j].abs());
            let mut plus = x.clone();
            plus[j] += step;
            let mut minus = x.clone();
            minus[j] -= step;
            let r_plus = self.residual(scheme, state_n, &State::from_stacked(&self.mesh, &plus), h, t_n)?;
            let r_minus = self.residual(scheme, state_n, &State::from_stacked(&self.mesh, &minus), h, t_n)?;
            jac.set_column(j, &((r_plus - r_minus) / (2.0 * step)));
        }
        Ok(jac)
    }
}
