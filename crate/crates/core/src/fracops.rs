//! Verification machinery: a Riemann–Liouville integral on uniform grids,
//! residual reports for the kinetic equations, and forward Laplace checks.
//!
//! The quadrature is product-trapezoidal. The samples are joined linearly
//! and the kernel `(t-s)^{ν-1}` is integrated exactly against each linear
//! piece. That keeps second order for `ν < 1`, where the kernel is singular
//! at `s = t`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kinetics::{forcing_value, KineticProblem};
use crate::mittag::SeriesEvaluation;
use crate::specfun::recip_gamma;

/// Samples `values[i] = f(t0 + i·step)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    t0: f64,
    step: f64,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t0: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidGrid("t0 must be finite"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidGrid("step must be finite and > 0"));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid("at least two samples are required"));
        }
        Ok(SampledFunction { t0, step, values })
    }

    /// Samples `f` at `t = 0, step, …, steps·step`.
    pub fn from_fn(step: f64, steps: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = (0..=steps).map(|i| f(i as f64 * step)).collect();
        Self::new(0.0, step, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }
    pub fn t_end(&self) -> f64 {
        self.t(self.values.len() - 1)
    }
}

/// `A^p - B^p` with `B = A - 1`, without cancellation for large `A`.
fn power_difference(a: f64, p: f64) -> f64 {
    let b = a - 1.0;
    if b == 0.0 {
        1.0
    } else {
        libm::pow(b, p) * libm::expm1(p * libm::log1p(1.0 / b))
    }
}

/// Kernel moments over the panel at distance `a` (in steps) from the
/// evaluation point, for unit step and `ν > 0`:
///
/// ```text
/// P(a) = ∫_{a-1}^{a} u^{ν-1} (u - (a-1)) du     (weight of the far node)
/// Q(a) = ∫_{a-1}^{a} u^{ν-1} (a - u) du         (weight of the near node)
/// ```
pub(crate) fn panel_moments(a: usize, nu: f64) -> (f64, f64) {
    let af = a as f64;
    let b = af - 1.0;
    let d0 = power_difference(af, nu) / nu;
    let d1 = power_difference(af, nu + 1.0) / (nu + 1.0);
    (d1 - b * d0, af * d0 - d1)
}

/// `(1/Γ(ν)) ∫_{t0}^{t_i} (t_i - s)^{ν-1} f(s) ds` at every node, with
/// `g_0 = 0`.
pub fn rl_integral(f: &SampledFunction, nu: f64) -> Result<SampledFunction> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::domain("nu", nu, "nu > 0"));
    }
    let n = f.len();
    let fv = f.values();
    let mut far = Vec::with_capacity(n);
    let mut near = Vec::with_capacity(n);
    far.push(0.0);
    near.push(0.0);
    for a in 1..n {
        let (p, q) = panel_moments(a, nu);
        far.push(p);
        near.push(q);
    }
    let scale = libm::pow(f.step, nu) * recip_gamma(nu);
    let mut g = Vec::with_capacity(n);
    g.push(0.0);
    for i in 1..n {
        let mut acc = far[i] * fv[0] + near[1] * fv[i];
        for (j, &fj) in fv.iter().enumerate().take(i).skip(1) {
            acc += (far[i - j] + near[i - j + 1]) * fj;
        }
        g.push(scale * acc);
    }
    SampledFunction::new(f.t0, f.step, g)
}

/// Residual norms of `N - N₀ f + c^ν D^{-ν} N` over a sequence of grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub grid_steps: Vec<usize>,
    pub max_residuals: Vec<f64>,
    pub l2_residuals: Vec<f64>,
    /// Mean of `log₂(max[j]/max[j+1])` over successive halvings.
    pub order_estimate: f64,
    /// Grid points where the solver reported a truncated series.
    pub unconverged_points: usize,
}

impl ResidualReport {
    pub fn is_complete(&self) -> bool {
        self.unconverged_points == 0
    }

    pub fn final_max_residual(&self) -> f64 {
        *self.max_residuals.last().unwrap_or(&f64::INFINITY)
    }

    /// Order at least `min_order`, finest max residual at most `threshold`,
    /// and every point converged.
    pub fn passes(&self, min_order: f64, threshold: f64) -> bool {
        self.is_complete()
            && self.order_estimate >= min_order
            && self.final_max_residual() <= threshold
    }
}

fn check_grids(grids: &[usize]) -> Result<()> {
    if grids.len() < 2 {
        return Err(Error::InvalidGrid("at least two grids are required"));
    }
    if grids.iter().any(|&g| g < 16) {
        return Err(Error::InvalidGrid("each grid needs at least 16 steps"));
    }
    if grids.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidGrid("each grid must double the previous one"));
    }
    Ok(())
}

fn order_estimate(max_res: &[f64]) -> f64 {
    let logs = max_res.windows(2).map(|w| {
        if w[1] == 0.0 {
            f64::INFINITY
        } else {
            libm::log2(w[0] / w[1])
        }
    });
    logs.sum::<f64>() / (max_res.len() - 1) as f64
}

/// Samples `solver` on each grid of `[0, t_max]` and measures how well it
/// satisfies the kinetic equation. `c` is the rate multiplying the
/// fractional integral.
pub fn residual_report<S>(
    prob: &KineticProblem,
    mut solver: S,
    c: f64,
    t_max: f64,
    grids: &[usize],
) -> Result<ResidualReport>
where
    S: FnMut(f64) -> Result<SeriesEvaluation>,
{
    check_grids(grids)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain("c", c, "c > 0"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::domain("t_max", t_max, "t_max > 0"));
    }
    let nu = prob.nu();
    let c_nu = libm::pow(c, nu);
    let mut report = ResidualReport {
        grid_steps: grids.to_vec(),
        max_residuals: Vec::with_capacity(grids.len()),
        l2_residuals: Vec::with_capacity(grids.len()),
        order_estimate: f64::NAN,
        unconverged_points: 0,
    };
    for &steps in grids {
        let h = t_max / steps as f64;
        let mut values = Vec::with_capacity(steps + 1);
        let mut source = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let t = i as f64 * h;
            let n = solver(t)?;
            let f = forcing_value(prob, t, 1e-15)?;
            if !n.converged || !f.converged {
                report.unconverged_points += 1;
            }
            values.push(n.value);
            source.push(f.value);
        }
        let sampled = SampledFunction::new(0.0, h, values)?;
        let integral = rl_integral(&sampled, nu)?;
        let mut max = 0.0f64;
        let mut sq = 0.0;
        for ((n, f), g) in sampled.values().iter().zip(&source).zip(integral.values()) {
            let r = n - f + c_nu * g;
            max = max.max(r.abs());
            sq += r * r;
        }
        report.max_residuals.push(max);
        report.l2_residuals.push(libm::sqrt(h * sq));
    }
    report.order_estimate = order_estimate(&report.max_residuals);
    Ok(report)
}

/// Trapezoidal `∫_{t0}^{t_max} e^{-pt} f(t) dt`. `t_max` must be a grid node.
pub fn laplace_numeric(f: &SampledFunction, p: f64, t_max: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::domain("p", p, "p > 0"));
    }
    let pos = (t_max - f.t0) / f.step;
    let m = libm::round(pos);
    if !(m >= 1.0) || (pos - m).abs() > 1e-9 * m || m as usize >= f.len() {
        return Err(Error::domain("t_max", t_max, "a grid node after t0"));
    }
    let m = m as usize;
    let weighted = |i: usize| libm::exp(-p * f.t(i)) * f.values[i];
    let inner: f64 = (1..m).map(weighted).sum();
    Ok(f.step * (inner + 0.5 * (weighted(0) + weighted(m))))
}

/// Both sides of `L{D^{-ν} f}(p) = p^{-ν} L{f}(p)`, transformed over the
/// full sample range.
pub fn laplace_step_check(f: &SampledFunction, nu: f64, p: f64) -> Result<(f64, f64)> {
    let t_max = f.t_end();
    let lhs = laplace_numeric(&rl_integral(f, nu)?, p, t_max)?;
    let rhs = libm::pow(p, -nu) * laplace_numeric(f, p, t_max)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{solve_t1, solve_t2_rederived, solve_t2_stated, SolutionSeriesConfig};
    use crate::mittag::MlParameters;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Tanh-sinh quadrature on `[lo, hi]`; tolerates integrable endpoint
    /// singularities. Nodes are placed by their offset from `lo` so that a
    /// singularity at `lo = 0` is approached without cancellation.
    fn tanh_sinh(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let r = 0.5 * (hi - lo);
        let h = 1.0 / 64.0;
        let mut acc = 0.0;
        for i in -(6 * 64)..=(6 * 64) {
            let t = i as f64 * h;
            let e = libm::exp(core::f64::consts::PI * libm::sinh(t));
            if !e.is_finite() || e == 0.0 {
                continue;
            }
            let x = lo + r * 2.0 * e / (e + 1.0);
            let w = r * core::f64::consts::FRAC_PI_2 * libm::cosh(t) * 4.0 * e
                / ((e + 1.0) * (e + 1.0));
            if x > lo && x < hi {
                acc += w * f(x);
            }
        }
        acc * h
    }

    #[test]
    fn panel_moments_match_numerical_integration() {
        for nu in [0.3, 0.5, 1.0, 1.7, 2.3, 7.0] {
            for a in [1usize, 2, 3, 10, 257] {
                let (af, b) = (a as f64, a as f64 - 1.0);
                let p_num = tanh_sinh(b, af, |u| libm::pow(u, nu - 1.0) * (u - b));
                let q_num = tanh_sinh(b, af, |u| libm::pow(u, nu - 1.0) * (af - u));
                let (p, q) = panel_moments(a, nu);
                assert!(rel(p, p_num) < 1e-12, "P({a}, {nu}) = {p} vs {p_num}");
                assert!(rel(q, q_num) < 1e-12, "Q({a}, {nu}) = {q} vs {q_num}");
            }
        }
    }

    #[test]
    fn constant_and_linear_data_are_exact() {
        let one = SampledFunction::from_fn(0.01, 100, |_| 1.0).unwrap();
        let g = rl_integral(&one, 1.0).unwrap();
        for i in 0..one.len() {
            assert!((g.values()[i] - one.t(i)).abs() <= 1e-14);
        }
        for nu in [0.5, 1.3, 2.3] {
            let g = rl_integral(&one, nu).unwrap();
            let lin = SampledFunction::from_fn(0.01, 100, |t| t).unwrap();
            let gl = rl_integral(&lin, nu).unwrap();
            for i in 1..one.len() {
                let t = one.t(i);
                assert!(rel(g.values()[i], libm::pow(t, nu) / libm::tgamma(nu + 1.0)) < 1e-12);
                assert!(
                    rel(
                        gl.values()[i],
                        libm::pow(t, nu + 1.0) / libm::tgamma(nu + 2.0)
                    ) < 1e-12
                );
            }
            assert_eq!(g.values()[0], 0.0);
        }
    }

    #[test]
    fn half_order_on_constant() {
        let one = SampledFunction::from_fn(0.05, 40, |_| 1.0).unwrap();
        let g = rl_integral(&one, 0.5).unwrap();
        for i in 1..one.len() {
            let want = 2.0 * libm::sqrt(one.t(i) / core::f64::consts::PI);
            assert!(rel(g.values()[i], want) < 1e-12);
        }
    }

    fn power_rule_error(mu: f64, nu: f64, steps: usize) -> f64 {
        let f = SampledFunction::from_fn(1.0 / steps as f64, steps, |t| libm::pow(t, mu)).unwrap();
        let g = rl_integral(&f, nu).unwrap();
        let c = libm::tgamma(mu + 1.0) / libm::tgamma(mu + nu + 1.0);
        (1..f.len())
            .map(|i| (g.values()[i] - c * libm::pow(f.t(i), mu + nu)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn power_rule_converges_at_second_order() {
        for mu in [0.0, 1.0, 2.5] {
            for nu in [0.5, 1.0, 2.3] {
                let errs: Vec<f64> = [32, 64, 128, 256]
                    .iter()
                    .map(|&n| power_rule_error(mu, nu, n))
                    .collect();
                if errs.iter().all(|&e| e <= 1e-12) {
                    continue;
                }
                let order = order_estimate(&errs);
                assert!(
                    order >= 1.8,
                    "mu={mu} nu={nu}: order {order}, errors {errs:?}"
                );
            }
        }
    }

    #[test]
    fn linearity() {
        let h = 0.02;
        let f = SampledFunction::from_fn(h, 60, |t| libm::sin(3.0 * t) + 2.0).unwrap();
        let g = SampledFunction::from_fn(h, 60, libm::exp).unwrap();
        let combo: Vec<f64> = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| 1.5 * a - 0.25 * b)
            .collect();
        let combo = SampledFunction::new(0.0, h, combo).unwrap();
        for nu in [0.4, 1.0, 2.5] {
            let lhs = rl_integral(&combo, nu).unwrap();
            let rf = rl_integral(&f, nu).unwrap();
            let rg = rl_integral(&g, nu).unwrap();
            for i in 1..lhs.len() {
                let rhs = 1.5 * rf.values()[i] - 0.25 * rg.values()[i];
                assert!(rel(lhs.values()[i], rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn semigroup_on_monomials() {
        for m in [0i32, 1, 2] {
            let (nu1, nu2) = (0.6, 0.9);
            let gap = |steps: usize| {
                let f =
                    SampledFunction::from_fn(1.0 / steps as f64, steps, |t| libm::pow(t, m as f64))
                        .unwrap();
                let twice = rl_integral(&rl_integral(&f, nu1).unwrap(), nu2).unwrap();
                let once = rl_integral(&f, nu1 + nu2).unwrap();
                twice
                    .values()
                    .iter()
                    .zip(once.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            };
            let gaps: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| gap(n)).collect();
            // the first pass leaves a t^{ν₁} term, so the second is not exact
            let slope = order_estimate(&gaps);
            assert!(slope >= 1.4, "m={m}: slope {slope}, gaps {gaps:?}");
            assert!(gaps[3] < 1e-4);
        }
    }

    #[test]
    fn laplace_examples() {
        let h = 1.0 / 512.0;
        let e = SampledFunction::from_fn(h, 40 * 512, |t| libm::exp(-t)).unwrap();
        assert!((laplace_numeric(&e, 1.0, 40.0).unwrap() - 0.5).abs() < 1e-6);
        let one = SampledFunction::from_fn(h, 20 * 512, |_| 1.0).unwrap();
        assert!((laplace_numeric(&one, 2.0, 20.0).unwrap() - 0.5).abs() < 1e-6);
        let lin = SampledFunction::from_fn(h, 40 * 512, |t| t).unwrap();
        assert!((laplace_numeric(&lin, 1.0, 40.0).unwrap() - 1.0).abs() < 1e-5);
        assert!(laplace_numeric(&one, 0.0, 20.0).is_err());
        assert!(laplace_numeric(&one, 1.0, 20.001).is_err());
        assert!(laplace_numeric(&one, 1.0, 21.0).is_err());
    }

    #[test]
    fn laplace_step_identity() {
        let h = 1.0 / 400.0;
        let one = SampledFunction::from_fn(h, 25 * 400, |_| 1.0).unwrap();
        let lin = SampledFunction::from_fn(1.0 / 100.0, 40 * 100, |t| t).unwrap();
        let short = SampledFunction::from_fn(1.0 / 100.0, 20 * 100, |_| 1.0).unwrap();
        for (f, nu, p, want) in [
            (&short, 1.0, 2.0, 0.25),
            (&one, 0.5, 1.0, 1.0),
            (&lin, 2.0, 1.0, 1.0),
        ] {
            let (lhs, rhs) = laplace_step_check(f, nu, p).unwrap();
            assert!(rel(lhs, rhs) < 1e-4, "nu={nu} p={p}: {lhs} vs {rhs}");
            assert!(rel(lhs, want) < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SampledFunction::new(0.0, 0.1, alloc::vec![1.0]).is_err());
        assert!(SampledFunction::new(0.0, 0.0, alloc::vec![1.0, 2.0]).is_err());
        let f = SampledFunction::from_fn(0.1, 4, |t| t).unwrap();
        assert!(matches!(
            rl_integral(&f, 0.0),
            Err(Error::Domain { name: "nu", .. })
        ));
        assert!(check_grids(&[64]).is_err());
        assert!(check_grids(&[8, 16]).is_err());
        assert!(check_grids(&[64, 100]).is_err());
        assert!(check_grids(&[64, 128, 256]).is_ok());
    }

    fn set_one() -> KineticProblem {
        let ml = MlParameters::new(2.0, 6.0, 7.0, 2.0, 1.0).unwrap();
        KineticProblem::theorem1(0.05, ml, 3.0, 1.0).unwrap()
    }

    #[test]
    fn theorem_one_residual_vanishes() {
        let p = set_one();
        let cfg = SolutionSeriesConfig::default();
        let r = residual_report(&p, |t| solve_t1(&p, t, &cfg), 3.0, 0.5, &[64, 128, 256]).unwrap();
        assert!(r.order_estimate >= 1.8, "{r:?}");
        assert!(r.final_max_residual() <= 1e-6, "{r:?}");
        assert!(r.passes(1.8, 1e-6));
    }

    #[test]
    fn negative_controls_fail() {
        let p = set_one();
        let cfg = SolutionSeriesConfig::default();
        let grids = [64, 128, 256];
        let zero =
            residual_report(&p, |_| Ok(SeriesEvaluation::exact(0.0)), 3.0, 0.5, &grids).unwrap();
        let peak = (0..=256)
            .map(|i| {
                forcing_value(&p, i as f64 * 0.5 / 256.0, 1e-15)
                    .unwrap()
                    .value
            })
            .fold(0.0, f64::max);
        assert!(rel(zero.final_max_residual(), peak) < 1e-12);
        assert!(!zero.passes(1.5, 1e-5));
        let scaled = residual_report(
            &p,
            |t| solve_t1(&p, t, &cfg).map(|v| v.scaled(1.01)),
            3.0,
            0.5,
            &grids,
        )
        .unwrap();
        assert!(scaled.final_max_residual() >= 1e-3 * p.n0() * p.ml().value_at_zero());
        assert!(!scaled.passes(1.5, 1e-5));
    }

    #[test]
    fn powered_rederived_beats_stated() {
        let ml = MlParameters::new(2.0, 6.0, 7.0, 2.0, 1.0).unwrap();
        let p = KineticProblem::theorem2(0.05, ml, 3.0, 5.0).unwrap();
        let cfg = SolutionSeriesConfig::default();
        let grids = [16, 32, 64];
        let good =
            residual_report(&p, |t| solve_t2_rederived(&p, t, &cfg), 3.0, 0.4, &grids).unwrap();
        let bad = residual_report(&p, |t| solve_t2_stated(&p, t, &cfg), 3.0, 0.4, &grids).unwrap();
        assert!(good.final_max_residual() < bad.final_max_residual());
        assert!(good.order_estimate >= 1.8, "{good:?}");
    }
}
