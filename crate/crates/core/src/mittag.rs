//! Series evaluation of the two-parameter Mittag-Leffler function
//!
//! ```text
//! E_{α,β}(x) = Σ_{n≥0} xⁿ / Γ(αn + β)
//! ```
//!
//! and of the generalized k-Mittag-Leffler function
//!
//! ```text
//! E^{γ,q}_{k,α,β}(z) = Σ_{n≥0} (γ)_{nq,k} zⁿ / (Γ_k(nα + β) n!)
//! ```
//!
//! Every evaluation reports how many terms it used and a geometric tail
//! bound. Summation runs in double-double so alternating arguments lose
//! only what the final rounding costs.
//!
//! Term construction: when the gamma arguments are below 170 the terms are
//! built from `Γ` directly, which keeps each term within a few ulp; beyond
//! that they are built from `ln Γ` with sign tracking. For integer `α` the
//! two-parameter series is generated by the exact rational ratio
//! `Γ(αn+β)/Γ(αn+α+β)` carried in double-double.

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::specfun::{
    self, check_q, log_k_gamma, log_k_pochhammer_general, recip_gamma, DIRECT_GAMMA_LIMIT,
};

/// Alternating arguments beyond this magnitude cancel past what double
/// precision can represent; such evaluations are reported as unconverged.
pub const ALTERNATING_LIMIT: f64 = 50.0;

const MAX_INTEGER_STEP: f64 = 32.0;

/// Truncation policy shared by every series in the crate.
///
/// A series stops at the first `n ≥ min_terms` with
/// `|term_n| ≤ tol·max(1, |partial|)` and `|term_{n+1}/term_n| < 1/2`,
/// reporting `|term_{n+1}|/(1 - r)` as the tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub tol: f64,
    pub min_terms: usize,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            tol: 1e-12,
            min_terms: 8,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn with_tol(tol: f64) -> Self {
        SeriesControl {
            tol,
            ..Self::default()
        }
    }

    /// Sums exactly `terms` terms without a convergence test.
    pub fn fixed_terms(terms: usize) -> Self {
        SeriesControl {
            tol: 0.0,
            min_terms: terms,
            max_terms: terms.max(1),
        }
    }
}

/// Value of a truncated series together with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvaluation {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

impl SeriesEvaluation {
    pub(crate) fn exact(value: f64) -> Self {
        SeriesEvaluation {
            value,
            terms_used: 1,
            tail_bound: 0.0,
            converged: true,
        }
    }

    /// Multiplies value and tail bound by a constant factor.
    pub fn scaled(self, factor: f64) -> Self {
        SeriesEvaluation {
            value: self.value * factor,
            tail_bound: self.tail_bound * factor.abs(),
            ..self
        }
    }
}

/// Sums `term(0), term(1), ...` under `ctl`.
///
/// `term` is called exactly once per index, in increasing order, so it may
/// carry running state such as a power of the argument. `floor` is the
/// absolute scale below which the tolerance stops being relative, and no
/// stop is attempted before `settled_from` (used to step past the zero terms
/// produced by gamma poles).
pub(crate) fn sum_series<F>(
    ctl: &SeriesControl,
    floor: f64,
    settled_from: usize,
    mut term: F,
) -> SeriesEvaluation
where
    F: FnMut(usize) -> DoubleDouble,
{
    let mut sum = DoubleDouble::ZERO;
    let mut current = term(0);
    let mut n = 0usize;
    loop {
        sum = sum + current;
        let partial = sum.to_f64();
        if !partial.is_finite() || n + 1 >= ctl.max_terms {
            return SeriesEvaluation {
                value: partial,
                terms_used: n + 1,
                tail_bound: f64::INFINITY,
                converged: false,
            };
        }
        let next = term(n + 1);
        if n >= ctl.min_terms && n >= settled_from {
            let mag = current.abs();
            let next_mag = next.abs();
            if mag == 0.0 && next_mag == 0.0 {
                return SeriesEvaluation {
                    value: partial,
                    terms_used: n + 1,
                    tail_bound: 0.0,
                    converged: true,
                };
            }
            if mag > 0.0 && mag <= ctl.tol * floor.max(partial.abs()) {
                let ratio = next_mag / mag;
                if ratio < 0.5 {
                    return SeriesEvaluation {
                        value: partial,
                        terms_used: n + 1,
                        tail_bound: next_mag / (1.0 - ratio),
                        converged: true,
                    };
                }
            }
        }
        n += 1;
        current = next;
    }
}

/// Parameters of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParamMl {
    alpha: f64,
    beta: f64,
}

impl TwoParamMl {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain("alpha", alpha, "alpha > 0"));
        }
        if !beta.is_finite() {
            return Err(Error::domain("beta", beta, "a finite beta"));
        }
        Ok(TwoParamMl { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn integer_step(&self) -> Option<usize> {
        let a = self.alpha;
        (a <= MAX_INTEGER_STEP && libm::floor(a) == a).then_some(a as usize)
    }

    /// Index from which `αn + β > 0`, i.e. past every reciprocal-gamma zero.
    fn settled_from(&self) -> usize {
        if self.beta > 0.0 {
            0
        } else {
            libm::floor(-self.beta / self.alpha) as usize + 1
        }
    }

    /// Evaluates `E_{α,β}(x)` under an explicit truncation policy.
    pub fn evaluate(&self, x: f64, ctl: &SeriesControl) -> SeriesEvaluation {
        if x == 0.0 {
            return SeriesEvaluation::exact(recip_gamma(self.beta));
        }
        let eval = match (self.integer_step(), self.beta > 0.0) {
            (Some(_), true) => {
                let recip = recip_gamma(self.beta);
                let floor = if recip > 0.0 {
                    1.0 / recip
                } else {
                    f64::INFINITY
                };
                self.scaled_series(x, ctl, floor).scaled(recip)
            }
            _ => self.direct_series(x, ctl),
        };
        alternating_guard(eval, x)
    }

    /// Sum of the first `terms` terms.
    pub fn partial_sum(&self, x: f64, terms: usize) -> f64 {
        self.evaluate(x, &SeriesControl::fixed_terms(terms)).value
    }

    /// `Γ(β)·E_{α,β}(x)` for `β > 0`, returned with `ln_scale = -ln Γ(β)` so
    /// that `E_{α,β}(x) = value·exp(ln_scale)`. The stopping rule is relative
    /// to the scaled sum, which keeps full relative accuracy when `1/Γ(β)`
    /// would underflow.
    pub(crate) fn evaluate_scaled(&self, x: f64, ctl: &SeriesControl) -> (SeriesEvaluation, f64) {
        debug_assert!(self.beta > 0.0);
        let ln_scale = -libm::lgamma(self.beta);
        if x == 0.0 {
            return (SeriesEvaluation::exact(1.0), ln_scale);
        }
        let eval = self.scaled_series(x, ctl, 1.0);
        (alternating_guard(eval, x), ln_scale)
    }

    /// Terms `xⁿ Γ(β)/Γ(αn+β)`, β > 0.
    fn scaled_series(&self, x: f64, ctl: &SeriesControl, floor: f64) -> SeriesEvaluation {
        let (alpha, beta) = (self.alpha, self.beta);
        if let Some(step) = self.integer_step() {
            let mut term = DoubleDouble::ONE;
            return sum_series(ctl, floor, 0, |n| {
                if n > 0 {
                    // Γ(y)/Γ(y + step) = 1/(y (y+1) ... (y+step-1)), y = α(n-1) + β
                    let y = DoubleDouble::new(alpha * (n - 1) as f64).add_f64(beta);
                    let mut denom = y;
                    for i in 1..step {
                        denom = denom * y.add_f64(i as f64);
                    }
                    term = term.mul_f64(x) / denom;
                }
                term
            });
        }
        let gamma_beta = if beta <= DIRECT_GAMMA_LIMIT {
            libm::tgamma(beta)
        } else {
            f64::NAN
        };
        let ln_gamma_beta = libm::lgamma(beta);
        let ln_x = libm::log(x.abs());
        let mut power = DoubleDouble::ONE;
        sum_series(ctl, floor, 0, |n| {
            if n > 0 {
                power = power.mul_f64(x);
            }
            let arg = n as f64 * alpha + beta;
            if gamma_beta.is_finite() && arg <= DIRECT_GAMMA_LIMIT {
                power.div_f64(libm::tgamma(arg)).mul_f64(gamma_beta)
            } else {
                let mag = libm::exp(n as f64 * ln_x + ln_gamma_beta - libm::lgamma(arg));
                DoubleDouble::new(alternating_sign(x, n) * mag)
            }
        })
    }

    /// Terms `xⁿ/Γ(αn+β)` with `1/Γ` taken as zero at poles; any real β.
    fn direct_series(&self, x: f64, ctl: &SeriesControl) -> SeriesEvaluation {
        let (alpha, beta) = (self.alpha, self.beta);
        let ln_x = libm::log(x.abs());
        let mut power = DoubleDouble::ONE;
        sum_series(ctl, 1.0, self.settled_from(), |n| {
            if n > 0 {
                power = power.mul_f64(x);
            }
            direct_term(power, x, n, n as f64 * alpha + beta, ln_x)
        })
    }
}

/// `xⁿ/Γ(arg)` given the running power `xⁿ`.
fn direct_term(power: DoubleDouble, x: f64, n: usize, arg: f64, ln_x: f64) -> DoubleDouble {
    if specfun::is_pole(arg) {
        DoubleDouble::ZERO
    } else if arg <= DIRECT_GAMMA_LIMIT {
        power.div_f64(libm::tgamma(arg))
    } else {
        let mag = libm::exp(n as f64 * ln_x - libm::lgamma(arg));
        DoubleDouble::new(alternating_sign(x, n) * mag)
    }
}

#[inline]
fn alternating_sign(x: f64, n: usize) -> f64 {
    if x < 0.0 && n % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn alternating_guard(mut eval: SeriesEvaluation, x: f64) -> SeriesEvaluation {
    if x < -ALTERNATING_LIMIT {
        eval.converged = false;
    }
    eval
}

/// `E_{α,β}(x)` with the default truncation policy at tolerance `tol`.
pub fn ml2(p: &TwoParamMl, x: f64, tol: f64) -> SeriesEvaluation {
    p.evaluate(x, &SeriesControl::with_tol(tol))
}

pub fn ml2_with(p: &TwoParamMl, x: f64, ctl: &SeriesControl) -> SeriesEvaluation {
    p.evaluate(x, ctl)
}

/// The five parameters `(k, α, β, γ, q)` of `E^{γ,q}_{k,α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParameters {
    pub(crate) k: f64,
    pub(crate) alpha: f64,
    pub(crate) beta: f64,
    pub(crate) gamma: f64,
    pub(crate) q: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(name, v, "a finite value > 0"))
    }
}

impl MlParameters {
    pub fn new(k: f64, alpha: f64, beta: f64, gamma: f64, q: f64) -> Result<Self> {
        Ok(MlParameters {
            k: positive("k", k)?,
            alpha: positive("alpha", alpha)?,
            beta: positive("beta", beta)?,
            gamma: positive("gamma", gamma)?,
            q: {
                check_q(q)?;
                q
            },
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `ln[(γ)_{nq,k} / Γ_k(nα+β)]`, the log of the coefficient shared by the
    /// k-Mittag-Leffler series and the kinetic solution series.
    pub(crate) fn log_coefficient(&self, n: usize) -> f64 {
        let n32 = n as u32;
        // parameters are validated positive, so neither call can fail
        let num = log_k_pochhammer_general(self.gamma, n32, self.q, self.k).unwrap_or(f64::NAN);
        let den = log_k_gamma(n as f64 * self.alpha + self.beta, self.k).unwrap_or(f64::NAN);
        num - den
    }

    /// `1/Γ_k(β)`, the value of the series at zero.
    pub(crate) fn value_at_zero(&self) -> f64 {
        match specfun::k_gamma(self.beta, self.k) {
            Ok(g) => 1.0 / g,
            Err(_) => libm::exp(-log_k_gamma(self.beta, self.k).unwrap_or(f64::INFINITY)),
        }
    }

    /// `(γ)_{nq,k} zⁿ / (Γ_k(nα+β) n!)` given the running power `zⁿ`.
    fn kml_term(&self, power: DoubleDouble, z: f64, n: usize, ln_z: f64) -> DoubleDouble {
        let (k, q) = (self.k, self.q);
        let nf = n as f64;
        let poch_arg = self.gamma / k + nf * q;
        let gamma_arg = (nf * self.alpha + self.beta) / k;
        if poch_arg <= DIRECT_GAMMA_LIMIT
            && gamma_arg <= DIRECT_GAMMA_LIMIT
            && nf < DIRECT_GAMMA_LIMIT
        {
            let ratio = if n == 0 {
                1.0
            } else {
                libm::tgamma(poch_arg) / libm::tgamma(self.gamma / k) / libm::tgamma(nf + 1.0)
            };
            let k_power = if k == 1.0 {
                1.0
            } else {
                libm::pow(k, nf * q - gamma_arg + 1.0)
            };
            let term = power
                .div_f64(libm::tgamma(gamma_arg))
                .mul_f64(ratio * k_power);
            if term.hi.is_finite() && (term.hi != 0.0 || power.hi == 0.0) {
                return term;
            }
        }
        let ln_mag = self.log_coefficient(n) - libm::lgamma(nf + 1.0) + nf * ln_z;
        DoubleDouble::new(alternating_sign(z, n) * libm::exp(ln_mag))
    }
}

/// `E^{γ,q}_{k,α,β}(z)` at tolerance `tol`.
pub fn kml(p: &MlParameters, z: f64, tol: f64) -> Result<SeriesEvaluation> {
    kml_with(p, z, &SeriesControl::with_tol(tol))
}

pub fn kml_with(p: &MlParameters, z: f64, ctl: &SeriesControl) -> Result<SeriesEvaluation> {
    if !z.is_finite() {
        return Err(Error::domain("z", z, "a finite argument"));
    }
    if z == 0.0 {
        return Ok(SeriesEvaluation::exact(p.value_at_zero()));
    }
    let ln_z = libm::log(z.abs());
    let mut power = DoubleDouble::ONE;
    let eval = sum_series(ctl, 1.0, 0, |n| {
        if n > 0 {
            power = power.mul_f64(z);
        }
        p.kml_term(power, z, n, ln_z)
    });
    Ok(alternating_guard(eval, z))
}

/// Sum of the first `terms` terms of the k-Mittag-Leffler series.
pub fn kml_partial_sum(p: &MlParameters, z: f64, terms: usize) -> Result<f64> {
    kml_with(p, z, &SeriesControl::fixed_terms(terms)).map(|e| e.value)
}

/// Named special cases of `E^{γ,q}_{k,α,β}`, most specific first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionCase {
    /// q = k = γ = β = 1: `E_α`.
    OneParameter,
    /// q = k = γ = 1: `E_{α,β}`.
    TwoParameter,
    /// q = k = 1: `E^γ_{α,β}`.
    ThreeParameter,
    /// k = 1: `E^{γ,q}_{α,β}`.
    GeneralizedMl,
    /// q = 1: `E^γ_{k,α,β}`.
    KMl,
    General,
}

pub fn reduction_case(p: &MlParameters) -> ReductionCase {
    let (q1, k1, g1, b1) = (p.q == 1.0, p.k == 1.0, p.gamma == 1.0, p.beta == 1.0);
    match (q1, k1, g1, b1) {
        (true, true, true, true) => ReductionCase::OneParameter,
        (true, true, true, false) => ReductionCase::TwoParameter,
        (true, true, false, _) => ReductionCase::ThreeParameter,
        (false, true, _, _) => ReductionCase::GeneralizedMl,
        (true, false, _, _) => ReductionCase::KMl,
        _ => ReductionCase::General,
    }
}
