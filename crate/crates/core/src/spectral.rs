//! Semigroups, resolvents and the identities relating them to the form.
//!
//! Everything runs through the spectral decomposition cached on the
//! [`FormOperator`]: `e^{-tA}` and `(A + α)^{-1}` are the functions
//! `μ ↦ e^{-tμ}` and `μ ↦ 1/(μ + α)` of the generator. The checks at the end
//! of the module compare order properties of the semigroup with the matching
//! properties of the form (positivity, the Markov property, invariance of a
//! closed convex set).

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::{CVector, FormOperator};
use crate::quadrature::CompositeRule;
use crate::random;

/// Absolute tolerance for entrywise order checks on semigroup outputs and forms.
pub const ORDER_TOL: f64 = 1e-10;

/// Margin by which `α` must exceed the bottom of the spectrum.
pub const RESOLVENT_MARGIN: f64 = 1e-12;

/// Margin required above `max(0, −λ)` for the Laplace integral.
pub const LAPLACE_MARGIN: f64 = 1e-6;

/// Panel count of the Laplace quadrature.
pub const LAPLACE_PANELS: usize = 64;

/// Gauss–Legendre points per panel.
pub const LAPLACE_ORDER: usize = 20;

/// Truncation level: the horizon `T` satisfies `e^{-αT} ≤ LAPLACE_TAIL`.
pub const LAPLACE_TAIL: f64 = 1e-12;

fn as_complex(u: &[f64]) -> Vec<Complex64> {
    u.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn real_parts(v: &CVector) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

/// `e^{-tA} u`. Returns `u` unchanged at `t = 0`.
pub fn semigroup_apply(form: &FormOperator, t: f64, u: &[Complex64]) -> Result<CVector> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    form.check_dim(u.len())?;
    if t == 0.0 {
        return Ok(DVector::from_column_slice(u));
    }
    form.apply_spectral(u, |mu| (-t * mu).exp())
}

/// `(A + α)^{-1} u` for `α > −λ`.
pub fn resolvent_apply(form: &FormOperator, alpha: f64, u: &[Complex64]) -> Result<CVector> {
    let lower_bound = form.lower_bound();
    if !(alpha + lower_bound > RESOLVENT_MARGIN) {
        return Err(Error::AlphaInSpectrum { alpha, lower_bound });
    }
    form.apply_spectral(u, |mu| 1.0 / (mu + alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCheck {
    pub alpha: f64,
    /// `‖∫ e^{-tα} e^{-tA} u dt − (A + α)^{-1} u‖_m`
    pub residual: f64,
    pub input_norm: f64,
    pub horizon: f64,
    /// `residual ≤ 10^{-6} ‖u‖_m`
    pub pass: bool,
}

/// Compares the resolvent with the Laplace transform of the semigroup.
///
/// The integral is truncated at `T` with `e^{-(α − λ⁻)T} = 10^{-12}` and
/// evaluated with 64 Gauss–Legendre panels on `[0, T]`, graded towards `t = 0`
/// so that fast-decaying modes are resolved.
pub fn laplace_check(form: &FormOperator, alpha: f64, u: &[Complex64]) -> Result<LaplaceCheck> {
    let lambda = form.lower_bound();
    let required = (-lambda).max(0.0) + LAPLACE_MARGIN;
    if !(alpha > required) {
        return Err(Error::AlphaTooSmall { alpha, required });
    }
    let rate = alpha + lambda.min(0.0);
    let horizon = -LAPLACE_TAIL.ln() / rate;
    let rule = CompositeRule::graded(horizon, LAPLACE_PANELS, 1e-8, LAPLACE_ORDER);

    // The integrand is e^{-tα} P_t u; in the eigenbasis of A each mode is a
    // scalar exponential, so the quadrature acts coefficientwise.
    let laplace = form.apply_spectral(u, |mu| rule.integrate(|t| (-t * (alpha + mu)).exp()))?;
    let resolvent = resolvent_apply(form, alpha, u)?;
    let diff: Vec<Complex64> = laplace.iter().zip(resolvent.iter()).map(|(a, b)| a - b).collect();
    let residual = form.norm(&diff);
    let input_norm = form.norm(u);
    Ok(LaplaceCheck {
        alpha,
        residual,
        input_norm,
        horizon,
        pass: residual <= LAPLACE_TOL * input_norm,
    })
}

/// `‖(s^n (A + s)^{-n}) u − e^{-tA} u‖_m` with `s = n/t`.
///
/// The power is applied as `n` successive solves against one Cholesky
/// factorization of `A_sym + s`. At `t = 0` both sides are the identity and
/// the error is 0.
pub fn euler_limit_check(form: &FormOperator, t: f64, u: &[Complex64], n: usize) -> Result<f64> {
    form.check_dim(u.len())?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    assert!(n >= 1, "Euler power must be at least 1");
    let s = n as f64 / t;
    let dim = form.dim();
    let mut shifted = form.symmetrized().clone();
    for i in 0..dim {
        shifted[(i, i)] += Complex64::new(s, 0.0);
    }
    let mut v = CVector::from_iterator(dim, u.iter().zip(form.sqrt_m()).map(|(z, r)| z * *r));
    match Cholesky::new(shifted.clone()) {
        Some(chol) => {
            for _ in 0..n {
                chol.solve_mut(&mut v);
                v *= Complex64::new(s, 0.0);
            }
        }
        None => {
            let lu = shifted.lu();
            for _ in 0..n {
                v = lu.solve(&v).ok_or(Error::EigSolverFailure)? * Complex64::new(s, 0.0);
            }
        }
    }
    for (z, r) in v.iter_mut().zip(form.inv_sqrt_m()) {
        *z *= *r;
    }
    let exact = semigroup_apply(form, t, u)?;
    let diff: Vec<Complex64> = v.iter().zip(exact.iter()).map(|(a, b)| a - b).collect();
    Ok(form.norm(&diff))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormLimitDefect {
    pub t: f64,
    /// `|(1/t)⟨u − P_t u, v⟩_m − Q(u, v)|`
    pub defect: f64,
}

/// Defects of the difference quotient `(1/t)⟨u − P_t u, v⟩_m` against `Q(u, v)`.
pub fn form_limit_check(
    form: &FormOperator,
    u: &[Complex64],
    v: &[Complex64],
    t_list: &[f64],
) -> Result<Vec<FormLimitDefect>> {
    let q = form.evaluate(u, v)?;
    t_list
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::PreconditionViolated(format!("t = {t} must be positive")));
            }
            // u − P_t u via expm1 to avoid cancellation at small t
            let diff = form.apply_spectral(u, |mu| -(-t * mu).exp_m1())?;
            let quotient = form.inner(diff.as_slice(), v) / t;
            Ok(FormLimitDefect {
                t,
                defect: (quotient - q).norm(),
            })
        })
        .collect()
}

/// Errors below this level are treated as rounding noise when forming
/// convergence ratios.
pub const NOISE_FLOOR: f64 = 1e-11;

/// Laplace residual bound relative to `‖u‖_m`.
pub const LAPLACE_TOL: f64 = 1e-6;

/// Largest accepted ratio `error(2n)/error(n)` in the Euler limit.
pub const EULER_RATIO_MAX: f64 = 0.75;

/// Absolute Euler error bound at the largest power, for `t·ρ ≤ 10`.
pub const EULER_ABS_TOL: f64 = 1e-3;

/// Accepted range of `defect(t/2)/defect(t)` for the difference quotient.
pub const FORM_LIMIT_RATIO: (f64, f64) = (0.35, 0.65);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerSeries {
    pub t: f64,
    pub powers: Vec<usize>,
    pub errors: Vec<f64>,
    /// `errors[i+1] / errors[i]` where `errors[i]` is above the noise floor
    pub ratios: Vec<f64>,
    /// The absolute bound applies (`t·ρ ≤ 10`).
    pub bounded: bool,
    pub pass: bool,
}

/// Euler errors for doubling powers `n_0, 2n_0, …`.
///
/// Passes when every ratio with `n ≥ 256` is at most 0.75 and, if
/// `t·ρ ≤ 10`, the error at the largest power is at most `1e-3`.
pub fn euler_series(form: &FormOperator, t: f64, u: &[Complex64], powers: &[usize]) -> Result<EulerSeries> {
    let errors = powers
        .iter()
        .map(|&n| euler_limit_check(form, t, u, n))
        .collect::<Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    let mut pass = true;
    for i in 1..errors.len() {
        if errors[i - 1] > NOISE_FLOOR {
            let r = errors[i] / errors[i - 1];
            ratios.push(r);
            if powers[i - 1] >= 256 && r > EULER_RATIO_MAX {
                pass = false;
            }
        }
    }
    let bounded = t * form.spectral_radius() <= 10.0;
    if bounded && errors.last().is_some_and(|&e| e > EULER_ABS_TOL) {
        pass = false;
    }
    Ok(EulerSeries {
        t,
        powers: powers.to_vec(),
        errors,
        ratios,
        bounded,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormLimitSeries {
    pub t: f64,
    pub defect: f64,
    pub defect_half: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Defects of `Q(u, u)` at `t` and `t/2`; the ratio should be near ½.
pub fn form_limit_series(form: &FormOperator, u: &[Complex64], t: f64) -> Result<FormLimitSeries> {
    let d = form_limit_check(form, u, u, &[t, 0.5 * t])?;
    let ratio = d[1].defect / d[0].defect;
    Ok(FormLimitSeries {
        t,
        defect: d[0].defect,
        defect_half: d[1].defect,
        ratio,
        pass: (FORM_LIMIT_RATIO.0..=FORM_LIMIT_RATIO.1).contains(&ratio),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub laplace: Vec<LaplaceCheck>,
    pub euler: Vec<EulerSeries>,
    /// Absent when the form vanishes (`ρ = 0`), where the quotient is exact.
    pub form_limit: Option<FormLimitSeries>,
    pub pass: bool,
}

/// Euler powers checked by [`identity_suite`].
pub const EULER_POWERS: [usize; 5] = [256, 512, 1024, 2048, 4096];

/// Laplace, Euler and difference-quotient checks on one input `u`.
///
/// The difference quotient is taken at `t = 10^{-3}/ρ`.
pub fn identity_suite(
    form: &FormOperator,
    u: &[Complex64],
    alpha_list: &[f64],
    t_list: &[f64],
) -> Result<IdentityReport> {
    let laplace = alpha_list
        .iter()
        .map(|&alpha| laplace_check(form, alpha, u))
        .collect::<Result<Vec<_>>>()?;
    let euler = t_list
        .iter()
        .map(|&t| euler_series(form, t, u, &EULER_POWERS))
        .collect::<Result<Vec<_>>>()?;
    let rho = form.spectral_radius();
    let form_limit = if rho > 0.0 {
        Some(form_limit_series(form, u, 1e-3 / rho)?)
    } else {
        None
    };
    let pass = laplace.iter().all(|l| l.pass)
        && euler.iter().all(|e| e.pass)
        && form_limit.as_ref().is_none_or(|f| f.pass);
    Ok(IdentityReport {
        laplace,
        euler,
        form_limit,
        pass,
    })
}

fn require_scalar(form: &FormOperator) -> Result<()> {
    if form.rank() != 1 {
        return Err(Error::PreconditionViolated(
            "order checks need a scalar (rank-1) form".into(),
        ));
    }
    Ok(())
}

/// Pairs `(x, y)` with a nonzero off-diagonal entry in the form matrix.
fn coupled_pairs(form: &FormOperator) -> Vec<(usize, usize)> {
    let n = form.dim();
    let m = form.matrix();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if m[(x, y)].norm() > 0.0 {
                out.push((x, y));
            }
        }
    }
    out
}

fn basis(n: usize, x: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[x] = 1.0;
    e
}

fn dipole(n: usize, x: usize, y: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[x] = 1.0;
    e[y] = -1.0;
    e
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    /// Smallest entry of `P_t u` over nonnegative samples `u`.
    pub semigroup_min_entry: f64,
    pub semigroup_pass: bool,
    /// Time and input at which the smallest entry was observed.
    pub semigroup_witness_t: f64,
    pub semigroup_witness: Vec<f64>,
    /// Largest `Q(|u|) − Q(u)` over real samples.
    pub form_max_excess: f64,
    pub form_pass: bool,
    pub form_witness: Vec<f64>,
    pub agree: bool,
}

/// Positivity preservation of `e^{-tA}` on sampled nonnegative inputs,
/// cross-checked against the form criterion `Q(|u|) ≤ Q(u)`.
///
/// Samples include every basis vector and, for the form side, every dipole
/// `δ_x − δ_y` on a coupled pair, followed by `samples` random draws.
pub fn positivity_check<R: Rng + ?Sized>(
    form: &FormOperator,
    t_list: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<PositivityReport> {
    require_scalar(form)?;
    let n = form.dim();

    let mut inputs: Vec<Vec<f64>> = (0..n).map(|x| basis(n, x)).collect();
    inputs.extend((0..samples).map(|_| random::unit_interval_vector(rng, n)));
    let mut min_entry = f64::INFINITY;
    let mut witness_t = 0.0;
    let mut witness = Vec::new();
    for &t in t_list {
        for u in &inputs {
            let out = semigroup_apply(form, t, &as_complex(u))?;
            let lowest = real_parts(&out).into_iter().fold(f64::INFINITY, f64::min);
            if lowest < min_entry {
                min_entry = lowest;
                witness_t = t;
                witness = u.clone();
            }
        }
    }

    let mut probes: Vec<Vec<f64>> = coupled_pairs(form).into_iter().map(|(x, y)| dipole(n, x, y)).collect();
    probes.extend((0..samples).map(|_| random::real_vector(rng, n)));
    let mut max_excess = f64::NEG_INFINITY;
    let mut form_witness = Vec::new();
    for u in &probes {
        let abs: Vec<f64> = u.iter().map(|x| x.abs()).collect();
        let excess = form.quadratic(&as_complex(&abs))? - form.quadratic(&as_complex(u))?;
        if excess > max_excess {
            max_excess = excess;
            form_witness = u.clone();
        }
    }

    let semigroup_pass = min_entry >= -ORDER_TOL;
    let form_pass = max_excess <= ORDER_TOL;
    Ok(PositivityReport {
        semigroup_min_entry: min_entry,
        semigroup_pass,
        semigroup_witness_t: witness_t,
        semigroup_witness: witness,
        form_max_excess: max_excess,
        form_pass,
        form_witness,
        agree: semigroup_pass == form_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub min_entry: f64,
    pub max_entry: f64,
    pub passed: bool,
    pub witness_t: f64,
    pub witness: Vec<f64>,
}

/// Checks `0 ≤ u ≤ 1 ⟹ 0 ≤ P_t u ≤ 1` on the constant 1, every basis vector
/// and `samples` random inputs.
pub fn markov_check<R: Rng + ?Sized>(
    form: &FormOperator,
    t_list: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<MarkovReport> {
    require_scalar(form)?;
    let n = form.dim();
    let mut inputs: Vec<Vec<f64>> = vec![vec![1.0; n]];
    inputs.extend((0..n).map(|x| basis(n, x)));
    inputs.extend((0..samples).map(|_| random::unit_interval_vector(rng, n)));

    let mut min_entry = f64::INFINITY;
    let mut max_entry = f64::NEG_INFINITY;
    let mut worst = 0.0;
    let mut witness_t = 0.0;
    let mut witness = Vec::new();
    for &t in t_list {
        for u in &inputs {
            let out = real_parts(&semigroup_apply(form, t, &as_complex(u))?);
            for &z in &out {
                min_entry = min_entry.min(z);
                max_entry = max_entry.max(z);
                let violation = (-z).max(z - 1.0);
                if violation > worst {
                    worst = violation;
                    witness_t = t;
                    witness = u.clone();
                }
            }
        }
    }
    Ok(MarkovReport {
        min_entry,
        max_entry,
        passed: min_entry >= -ORDER_TOL && max_entry <= 1.0 + ORDER_TOL,
        witness_t,
        witness,
    })
}

/// Metric projection onto a closed convex subset of real `ℓ²(X, m)`.
pub trait ConvexProjection {
    fn project(&self, u: &[f64]) -> Vec<f64>;

    fn name(&self) -> &str {
        "custom"
    }
}

/// Projection onto the positive cone, `u ↦ u⁺`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PositiveCone;

impl ConvexProjection for PositiveCone {
    fn project(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect()
    }

    fn name(&self) -> &str {
        "positive cone"
    }
}

/// Projection onto `{0 ≤ u ≤ 1}`, `u ↦ (u ∨ 0) ∧ 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitInterval;

impl ConvexProjection for UnitInterval {
    fn project(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| x.clamp(0.0, 1.0)).collect()
    }

    fn name(&self) -> &str {
        "unit interval"
    }
}

/// Wraps a closure as a [`ConvexProjection`].
pub struct FnProjection<F>(pub F);

impl<F: Fn(&[f64]) -> Vec<f64>> ConvexProjection for FnProjection<F> {
    fn project(&self, u: &[f64]) -> Vec<f64> {
        (self.0)(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuhabazReport {
    pub projection: String,
    /// Smallest `Re Q(Pu, u − Pu)` over samples.
    pub form_min: f64,
    pub form_pass: bool,
    pub form_witness: Vec<f64>,
    /// Largest `‖P(P_t w) − P_t w‖_∞` over `w = Pu`.
    pub semigroup_max_escape: f64,
    pub semigroup_pass: bool,
    pub semigroup_witness_t: f64,
    pub semigroup_witness: Vec<f64>,
    pub agree: bool,
}

/// Tolerance on `Re Q(Pu, u − Pu) ≥ 0`.
pub const OUHABAZ_FORM_TOL: f64 = 1e-9;

/// Invariance of a closed convex set under the semigroup, checked both on
/// the form side (`Re Q(Pu, u − Pu) ≥ 0`) and directly
/// (`P_t(Pu)` stays in the set).
pub fn ouhabaz_invariance_check<R: Rng + ?Sized>(
    form: &FormOperator,
    projection: &dyn ConvexProjection,
    t_list: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<OuhabazReport> {
    require_scalar(form)?;
    let n = form.dim();
    let mut inputs: Vec<Vec<f64>> = coupled_pairs(form).into_iter().map(|(x, y)| dipole(n, x, y)).collect();
    inputs.extend((0..n).map(|x| basis(n, x)));
    inputs.extend((0..samples).map(|_| {
        random::real_vector(rng, n).into_iter().map(|x| 0.5 + x).collect()
    }));

    let mut form_min = f64::INFINITY;
    let mut form_witness = Vec::new();
    let mut escape = 0.0;
    let mut witness_t = 0.0;
    let mut witness = Vec::new();
    for u in &inputs {
        let pu = projection.project(u);
        let again = projection.project(&pu);
        let defect = pu.iter().zip(&again).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(Error::ProjectionNotIdempotent { defect });
        }
        let rest: Vec<f64> = u.iter().zip(&pu).map(|(a, b)| a - b).collect();
        let value = form.evaluate(&as_complex(&pu), &as_complex(&rest))?.re;
        if value < form_min {
            form_min = value;
            form_witness = u.clone();
        }
        for &t in t_list {
            let moved = real_parts(&semigroup_apply(form, t, &as_complex(&pu))?);
            let back = projection.project(&moved);
            let dist = moved.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if dist > escape {
                escape = dist;
                witness_t = t;
                witness = pu.clone();
            }
        }
    }
    let form_pass = form_min >= -OUHABAZ_FORM_TOL;
    let semigroup_pass = escape <= ORDER_TOL;
    Ok(OuhabazReport {
        projection: projection.name().to_string(),
        form_min,
        form_pass,
        form_witness,
        semigroup_max_escape: escape,
        semigroup_pass,
        semigroup_witness_t: witness_t,
        semigroup_witness: witness,
        agree: form_pass == semigroup_pass,
    })
}
