//! Closed-form series solutions of the fractional kinetic equation
//!
//! ```text
//! N(t) - N₀ f(t) = -c^ν D^{-ν} N(t)
//! ```
//!
//! with k-Mittag-Leffler forcing. Three problems are covered:
//!
//! | theorem | forcing `f(t)`                     | removal `c` |
//! |---------|------------------------------------|-------------|
//! | 1       | `E^{γ,τ}_{k,α,β}(t)`               | `d`         |
//! | 2       | `E^{γ,τ}_{k,α,β}(d^ν t^ν)`         | `d`         |
//! | 3       | `E^{γ,τ}_{k,α,β}(d^ν t^ν)`         | `a`         |
//!
//! Theorem 1 has a single solution series,
//! `N = N₀ Σ (γ)_{nτ,k}/Γ_k(nα+β) tⁿ E_{ν,n+1}(-d^ν t^ν)`.
//!
//! Theorems 2 and 3 come in two variants. The *stated* one evaluates
//! `N₀ Σ (γ)_{nτ,k}/Γ_k(nα+β) (d^ν t^ν)ⁿ E_{ν,νn+1}(-c^ν t^ν)` as written in
//! the literature. The *rederived* one carries the extra factor
//! `Γ(νn+1)/n!` that term-by-term Laplace inversion produces from
//! `L{t^{νn}} = Γ(νn+1) p^{-νn-1}`. The two agree at `ν = 1`; the residual
//! checks in [`crate::fracops`] decide between them elsewhere.

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::mittag::{
    kml_with, sum_series, MlParameters, SeriesControl, SeriesEvaluation, TwoParamMl,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    /// `f(t) = E^{γ,τ}_{k,α,β}(t)`
    PlainArgument,
    /// `f(t) = E^{γ,τ}_{k,α,β}(d^ν t^ν)`
    PoweredArgument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    One,
    Two,
    Three,
}

impl Theorem {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(Theorem::One),
            2 => Some(Theorem::Two),
            3 => Some(Theorem::Three),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            Theorem::One => 1,
            Theorem::Two => 2,
            Theorem::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Stated,
    Rederived,
}

/// A kinetic problem: initial density, forcing parameters, rate constants
/// and the fractional order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticProblem {
    n0: f64,
    ml: MlParameters,
    d: f64,
    a: f64,
    nu: f64,
    forcing: Forcing,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(name, v, "a finite value > 0"))
    }
}

impl KineticProblem {
    /// `N(t) - N₀ E^{γ,τ}_{k,α,β}(t) = -d^ν D^{-ν} N(t)`
    pub fn theorem1(n0: f64, ml: MlParameters, d: f64, nu: f64) -> Result<Self> {
        Self::build(n0, ml, d, d, nu, Forcing::PlainArgument)
    }

    /// `N(t) = N₀ E^{γ,τ}_{k,α,β}(d^ν t^ν) - d^ν D^{-ν} N(t)`
    pub fn theorem2(n0: f64, ml: MlParameters, d: f64, nu: f64) -> Result<Self> {
        Self::build(n0, ml, d, d, nu, Forcing::PoweredArgument)
    }

    /// `N(t) = N₀ E^{γ,τ}_{k,α,β}(d^ν t^ν) - a^ν D^{-ν} N(t)`
    pub fn theorem3(n0: f64, ml: MlParameters, d: f64, a: f64, nu: f64) -> Result<Self> {
        Self::build(n0, ml, d, a, nu, Forcing::PoweredArgument)
    }

    pub fn for_theorem(
        theorem: Theorem,
        n0: f64,
        ml: MlParameters,
        d: f64,
        a: f64,
        nu: f64,
    ) -> Result<Self> {
        match theorem {
            Theorem::One | Theorem::Two if a != d => Err(Error::domain(
                "a",
                a,
                "a = d (removal rate equals forcing rate)",
            )),
            Theorem::One => Self::theorem1(n0, ml, d, nu),
            Theorem::Two => Self::theorem2(n0, ml, d, nu),
            Theorem::Three => Self::theorem3(n0, ml, d, a, nu),
        }
    }

    fn build(n0: f64, ml: MlParameters, d: f64, a: f64, nu: f64, forcing: Forcing) -> Result<Self> {
        Ok(KineticProblem {
            n0: positive("N0", n0)?,
            ml,
            d: positive("d", d)?,
            a: positive("a", a)?,
            nu: positive("nu", nu)?,
            forcing,
        })
    }

    /// Zero removal rate, outside the theorems' hypotheses; exercises the
    /// degenerate identity `N = N₀ f`.
    #[cfg(test)]
    pub(crate) fn zero_removal(n0: f64, ml: MlParameters, nu: f64, forcing: Forcing) -> Self {
        KineticProblem {
            n0,
            ml,
            d: 0.0,
            a: 0.0,
            nu,
            forcing,
        }
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }
    pub fn ml(&self) -> &MlParameters {
        &self.ml
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn forcing(&self) -> Forcing {
        self.forcing
    }

    /// The constant `c` multiplying the fractional integral.
    pub fn removal_rate(&self) -> f64 {
        self.a
    }

    /// Largest `t` that keeps `c^ν t^ν` (and `d^ν t^ν`) within the
    /// alternating-series validity limit.
    pub fn default_t_max(&self) -> f64 {
        let rate = self.d.max(self.a);
        libm::pow(crate::mittag::ALTERNATING_LIMIT, 1.0 / self.nu) / rate
    }

    fn with_ml(&self, ml: MlParameters) -> Self {
        KineticProblem { ml, ..*self }
    }
}

/// Truncation controls for the double series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSeriesConfig {
    pub outer_tol: f64,
    pub outer_max_terms: usize,
    /// Tolerance for each inner `E_{ν,·}` factor, relative to its natural scale.
    pub inner_tol: f64,
}

impl Default for SolutionSeriesConfig {
    fn default() -> Self {
        SolutionSeriesConfig {
            outer_tol: 1e-12,
            outer_max_terms: 10_000,
            inner_tol: 1e-14,
        }
    }
}

impl SolutionSeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.outer_tol >= f64::EPSILON) || !self.outer_tol.is_finite() {
            return Err(Error::domain(
                "outer_tol",
                self.outer_tol,
                "outer_tol >= machine epsilon",
            ));
        }
        if self.outer_max_terms == 0 || self.outer_max_terms > 10_000 {
            return Err(Error::domain(
                "outer_max_terms",
                self.outer_max_terms as f64,
                "1 <= outer_max_terms <= 10000",
            ));
        }
        if !(self.inner_tol > 0.0) || !self.inner_tol.is_finite() {
            return Err(Error::domain("inner_tol", self.inner_tol, "inner_tol > 0"));
        }
        Ok(())
    }

    fn outer(&self) -> SeriesControl {
        SeriesControl {
            tol: self.outer_tol,
            max_terms: self.outer_max_terms,
            ..SeriesControl::default()
        }
    }

    fn inner(&self) -> SeriesControl {
        SeriesControl::with_tol(self.inner_tol)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("t", t, "t >= 0"))
    }
}

/// `rate^ν t^ν`
fn powered(rate: f64, nu: f64, t: f64) -> f64 {
    libm::pow(rate, nu) * libm::pow(t, nu)
}

fn forcing_argument(prob: &KineticProblem, t: f64) -> f64 {
    match prob.forcing {
        Forcing::PlainArgument => t,
        Forcing::PoweredArgument => powered(prob.d, prob.nu, t),
    }
}

/// `N₀ f(t)`, the source term of the equation.
pub fn forcing_value(prob: &KineticProblem, t: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_time(t)?;
    let z = forcing_argument(prob, t);
    Ok(kml_with(&prob.ml, z, &SeriesControl::with_tol(tol))?.scaled(prob.n0))
}

/// Shape of the solution series `Σ coef_n xⁿ E_{ν, β_n}(-c^ν t^ν)`.
#[derive(Clone, Copy)]
struct SolutionSeries {
    /// `x`: `t` for theorem 1, `d^ν t^ν` otherwise.
    outer_arg: f64,
    /// `-c^ν t^ν`
    inner_arg: f64,
    /// `β_n = n + 1` when false, `νn + 1` when true.
    powered_index: bool,
    /// Multiply by `Γ(νn+1)/n!`.
    laplace_factor: bool,
}

fn evaluate_series(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
    shape: SolutionSeries,
) -> Result<SeriesEvaluation> {
    check_time(t)?;
    cfg.validate()?;
    if t == 0.0 {
        // only n = 0 survives, with E_{ν,1}(0) = 1
        return Ok(SeriesEvaluation::exact(prob.n0 * prob.ml.value_at_zero()));
    }
    let nu = prob.nu;
    let inner_ctl = cfg.inner();
    let ln_x = libm::log(shape.outer_arg);
    let mut inner_ok = true;
    let mut failure = None;
    let eval = sum_series(&cfg.outer(), 1.0, 0, |n| {
        let nf = n as f64;
        let beta = if shape.powered_index {
            nu * nf + 1.0
        } else {
            nf + 1.0
        };
        let inner = match TwoParamMl::new(nu, beta) {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return DoubleDouble::ZERO;
            }
        };
        let (value, ln_scale) = inner.evaluate_scaled(shape.inner_arg, &inner_ctl);
        inner_ok &= value.converged;
        let mut ln_mag = prob.ml.log_coefficient(n) + ln_scale;
        if n > 0 {
            ln_mag += nf * ln_x;
        }
        if shape.laplace_factor {
            ln_mag += libm::lgamma(nu * nf + 1.0) - libm::lgamma(nf + 1.0);
        }
        DoubleDouble::new(value.value * libm::exp(ln_mag))
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut eval = eval.scaled(prob.n0);
    eval.converged &= inner_ok;
    Ok(eval)
}

fn require_forcing(prob: &KineticProblem, forcing: Forcing) -> Result<()> {
    if prob.forcing == forcing {
        Ok(())
    } else {
        Err(Error::WrongForcing {
            expected: match forcing {
                Forcing::PlainArgument => "E(t)",
                Forcing::PoweredArgument => "E(d^nu t^nu)",
            },
        })
    }
}

fn require_equal_rates(prob: &KineticProblem) -> Result<()> {
    if prob.a == prob.d {
        Ok(())
    } else {
        Err(Error::domain("a", prob.a, "a = d for theorem 2"))
    }
}

/// Theorem 1: `N₀ Σ (γ)_{nτ,k}/Γ_k(nα+β) tⁿ E_{ν,n+1}(-d^ν t^ν)`.
pub fn solve_t1(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    require_forcing(prob, Forcing::PlainArgument)?;
    let shape = SolutionSeries {
        outer_arg: t,
        inner_arg: -powered(prob.d, prob.nu, t),
        powered_index: false,
        laplace_factor: false,
    };
    evaluate_series(prob, t, cfg, shape)
}

fn powered_shape(prob: &KineticProblem, t: f64, laplace_factor: bool) -> SolutionSeries {
    SolutionSeries {
        outer_arg: powered(prob.d, prob.nu, t),
        inner_arg: -powered(prob.a, prob.nu, t),
        powered_index: true,
        laplace_factor,
    }
}

/// Theorem 2 as printed: no `Γ(νn+1)/n!` factor.
pub fn solve_t2_stated(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    require_forcing(prob, Forcing::PoweredArgument)?;
    require_equal_rates(prob)?;
    evaluate_series(prob, t, cfg, powered_shape(prob, t, false))
}

/// Theorem 2 with the `Γ(νn+1)/n!` factor from term-by-term inversion.
pub fn solve_t2_rederived(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    require_forcing(prob, Forcing::PoweredArgument)?;
    require_equal_rates(prob)?;
    evaluate_series(prob, t, cfg, powered_shape(prob, t, true))
}

/// Theorem 3 as printed.
pub fn solve_t3_stated(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    require_forcing(prob, Forcing::PoweredArgument)?;
    evaluate_series(prob, t, cfg, powered_shape(prob, t, false))
}

/// Theorem 3 with the `Γ(νn+1)/n!` factor.
pub fn solve_t3_rederived(
    prob: &KineticProblem,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    require_forcing(prob, Forcing::PoweredArgument)?;
    evaluate_series(prob, t, cfg, powered_shape(prob, t, true))
}

/// Dispatches to one of the six solvers. Theorem 1 has a single variant, so
/// `Rederived` is accepted as an alias of `Stated` there.
pub fn solve(
    prob: &KineticProblem,
    theorem: Theorem,
    variant: Variant,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> Result<SeriesEvaluation> {
    match (theorem, variant) {
        (Theorem::One, _) => solve_t1(prob, t, cfg),
        (Theorem::Two, Variant::Stated) => solve_t2_stated(prob, t, cfg),
        (Theorem::Two, Variant::Rederived) => solve_t2_rederived(prob, t, cfg),
        (Theorem::Three, Variant::Stated) => solve_t3_stated(prob, t, cfg),
        (Theorem::Three, Variant::Rederived) => solve_t3_rederived(prob, t, cfg),
    }
}

/// Parameter substitution that turns a general solution into one of the 18
/// special cases (three per substitution, one for each theorem).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryReduction {
    pub case: u32,
    pub theorem: Theorem,
    pub q: Option<f64>,
    pub k: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl CorollaryReduction {
    /// Applies the substitution to `base`. Cases 16-18 set `α = 0`, which the
    /// series cannot take, and are refused here.
    pub fn apply(&self, base: &MlParameters) -> Result<MlParameters> {
        MlParameters::new(
            self.k.unwrap_or(base.k),
            self.alpha.unwrap_or(base.alpha),
            self.beta.unwrap_or(base.beta),
            self.gamma.unwrap_or(base.gamma),
            self.q.unwrap_or(base.q),
        )
    }

    /// Applies the substitution to the forcing parameters of `prob`.
    pub fn apply_to(&self, prob: &KineticProblem) -> Result<KineticProblem> {
        Ok(prob.with_ml(self.apply(&prob.ml)?))
    }
}

pub fn corollary_reduction(case_id: u32) -> Result<CorollaryReduction> {
    if !(1..=18).contains(&case_id) {
        return Err(Error::UnknownCase(case_id));
    }
    let group = (case_id - 1) / 3;
    let theorem = match (case_id - 1) % 3 {
        0 => Theorem::One,
        1 => Theorem::Two,
        _ => Theorem::Three,
    };
    let one = Some(1.0);
    let mut r = CorollaryReduction {
        case: case_id,
        theorem,
        q: None,
        k: None,
        gamma: None,
        alpha: None,
        beta: None,
    };
    match group {
        0 => r.q = one,
        1 => r.k = one,
        2 => (r.q, r.k) = (one, one),
        3 => (r.q, r.k, r.gamma) = (one, one, one),
        4 => (r.q, r.k, r.gamma, r.beta) = (one, one, one, one),
        _ => (r.q, r.k, r.gamma, r.alpha, r.beta) = (one, one, one, Some(0.0), one),
    }
    Ok(r)
}
