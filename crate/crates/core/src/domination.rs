//! Domination of a bundle semigroup by a scalar one, checked at the level of
//! semigroups, resolvents and forms.
//!
//! `A` acts on sections of rank `d`, `B` on scalar functions over the same
//! vertex set. Domination means `|e^{-tA} u| ≤ e^{-tB} |u|` pointwise. The
//! three checks sample the corresponding inequalities and report the worst
//! slack (right side minus left side); a check passes when the slack stays
//! above `−tolerance`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bundle::{self, pair_unchecked, HermitianBundle};
use crate::error::{Error, Result};
use crate::form::{assemble_scalar_form, FormOperator};
use crate::graph::WeightedGraph;
use crate::random::{self, seeded};
use crate::section::{block_norm, Section};

type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for pointwise domination comparisons.
pub const DOMINATION_TOL: f64 = 1e-9;

/// Tolerance on `min eig (W(x) − c(x)) ≥ 0`.
pub const HYPOTHESIS_TOL: f64 = 1e-10;

/// Parameter grids and sample counts shared by the three checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub t_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            t_list: vec![0.01, 0.1, 1.0, 10.0],
            alpha_list: vec![0.5, 1.0, 10.0],
            samples: 100,
            seed: 42,
            tolerance: DOMINATION_TOL,
        }
    }
}

/// Input at which the worst slack was observed. Complex entries are
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub vector: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<Vec<[f64; 2]>>,
    /// `t` or `α`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
}

/// Outcome of one check. The slack is recorded on pass and fail; the witness
/// only on fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub slack: f64,
    pub witness: Option<Witness>,
}

impl Verdict {
    /// `max(0, −slack)`
    pub fn violation(&self) -> f64 {
        (-self.slack).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// `Q_B(|u|)` finite for every sample.
    pub energy_finite: bool,
    /// Worst `Q_B(g) + Q_A(u) − Q_A(g·sgn u)` over `0 ≤ g ≤ |u|`.
    pub ideal_slack: f64,
    /// Worst `Re Q_A(f1, f2) − Q_B(|f1|, |f2|)` over paired `f1, f2`.
    pub pairing_slack: f64,
}

/// Tracks the minimum slack and the input that produced it.
struct Worst {
    slack: f64,
    witness: Option<Witness>,
}

impl Worst {
    fn new() -> Self {
        Self {
            slack: f64::INFINITY,
            witness: None,
        }
    }

    fn offer(&mut self, slack: f64, witness: impl FnOnce() -> Witness) {
        if slack < self.slack {
            self.slack = slack;
            self.witness = Some(witness());
        }
    }

    fn finish(self, tolerance: f64) -> Verdict {
        let pass = self.slack >= -tolerance;
        Verdict {
            pass,
            slack: self.slack,
            witness: if pass { None } else { self.witness },
        }
    }
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn check_compatible(a: &FormOperator, b: &FormOperator) -> Result<()> {
    if b.rank() != 1 {
        return Err(Error::PreconditionViolated(
            "the dominating form must be scalar".into(),
        ));
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: a.n(),
        });
    }
    Ok(())
}

/// Every `δ_x e_k` followed by `samples` complex Gaussian sections, as columns.
fn sample_sections<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize, samples: usize) -> CMatrix {
    let dim = n * rank;
    let mut x = CMatrix::zeros(dim, dim + samples);
    for i in 0..dim {
        x[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..samples {
        let s = random::section(rng, n, rank);
        x.column_mut(dim + j).copy_from_slice(s.values());
    }
    x
}

/// Pointwise fiber norms of every column.
fn column_moduli(x: &CMatrix, rank: usize) -> CMatrix {
    let n = x.nrows() / rank;
    CMatrix::from_fn(n, x.ncols(), |v, j| {
        let norm = (0..rank).map(|k| x[(v * rank + k, j)].norm_sqr()).sum::<f64>().sqrt();
        Complex64::new(norm, 0.0)
    })
}

/// Shared sweep: compares `|f(A) u|` with `f(B)|u|` for each parameter.
fn sweep(
    a: &FormOperator,
    b: &FormOperator,
    inputs: &CMatrix,
    params: &[f64],
    f: impl Fn(f64, f64) -> f64,
    tolerance: f64,
) -> Result<Verdict> {
    let rank = a.rank();
    let moduli = column_moduli(inputs, rank);
    let ca = a.spectral_coefficients(inputs)?;
    let cb = b.spectral_coefficients(&moduli)?;
    let mut worst = Worst::new();
    for &p in params {
        let pa = a.synthesize(&ca, |mu| f(p, mu));
        let pb = b.synthesize(&cb, |mu| f(p, mu));
        for j in 0..inputs.ncols() {
            for x in 0..a.n() {
                let lhs = (0..rank).map(|k| pa[(x * rank + k, j)].norm_sqr()).sum::<f64>().sqrt();
                let slack = pb[(x, j)].re - lhs;
                worst.offer(slack, || Witness {
                    vector: pairs(inputs.column(j).as_slice()),
                    partner: None,
                    parameter: Some(p),
                    vertex: Some(x),
                });
            }
        }
    }
    Ok(worst.finish(tolerance))
}

/// `|e^{-tA} u|(x) ≤ (e^{-tB}|u|)(x)` for every `t` in the grid, on all basis
/// sections and `samples` random ones.
pub fn check_semigroup_domination<R: Rng + ?Sized>(
    a: &FormOperator,
    b: &FormOperator,
    t_list: &[f64],
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<Verdict> {
    check_compatible(a, b)?;
    if let Some(&t) = t_list.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    let inputs = sample_sections(rng, a.n(), a.rank(), samples);
    sweep(a, b, &inputs, t_list, |t, mu| (-t * mu).exp(), tolerance)
}

/// `|(A + α)^{-1} u|(x) ≤ ((B + α)^{-1}|u|)(x)` for every `α` in the grid.
pub fn check_resolvent_domination<R: Rng + ?Sized>(
    a: &FormOperator,
    b: &FormOperator,
    alpha_list: &[f64],
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<Verdict> {
    check_compatible(a, b)?;
    let lower_bound = a.lower_bound().min(b.lower_bound());
    if let Some(&alpha) = alpha_list
        .iter()
        .find(|&&alpha| !(alpha + lower_bound > crate::spectral::RESOLVENT_MARGIN))
    {
        return Err(Error::AlphaInSpectrum { alpha, lower_bound });
    }
    let inputs = sample_sections(rng, a.n(), a.rank(), samples);
    sweep(a, b, &inputs, alpha_list, |alpha, mu| 1.0 / (mu + alpha), tolerance)
}

fn real_column(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Form-level domination.
///
/// 1. `Q_B(|u|)` is finite.
/// 2. `Q_A(g·sgn u) ≤ Q_B(g) + Q_A(u)` for `0 ≤ g ≤ |u|`.
/// 3. `Re Q_A(f1, f2) ≥ Q_B(|f1|, |f2|)` for paired `f1, f2`: sections paired
///    through `pair`, sections with disjoint supports, and unit sections on
///    every pair of distinct vertices.
pub fn check_form_domination<R: Rng + ?Sized>(
    a: &FormOperator,
    b: &FormOperator,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<FormVerdict> {
    check_compatible(a, b)?;
    let n = a.n();
    let rank = a.rank();
    let mut energy_finite = true;
    let mut ideal = Worst::new();
    let mut paired = Worst::new();

    for i in 0..samples {
        let u = if i % 2 == 0 {
            random::section(rng, n, rank)
        } else {
            random::sparse_section(rng, n, rank)
        };
        let modulus = u.pointwise_norms();
        let qb_abs = b.quadratic(&real_column(&modulus))?;
        energy_finite &= qb_abs.is_finite();

        let g: Vec<f64> = modulus.iter().map(|s| s * rng.random::<f64>()).collect();
        let v = pair_unchecked(&u, &g);
        let slack = b.quadratic(&real_column(&g))? + a.quadratic(u.values())? - a.quadratic(v.values())?;
        ideal.offer(slack, || Witness {
            vector: pairs(u.values()),
            partner: Some(pairs(&real_column(&g))),
            parameter: None,
            vertex: None,
        });

        // f2 = h·sgn f1 for an independent weight h ≥ 0
        let h: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { 2.0 * rng.random::<f64>() })
            .collect();
        let f2 = pair_unchecked(&u, &h);
        offer_pair(a, b, &u, &f2, &mut paired)?;

        // disjoint supports
        let mut f1 = random::section(rng, n, rank);
        let mut f2 = random::section(rng, n, rank);
        for x in 0..n {
            let zero = Complex64::new(0.0, 0.0);
            if rng.random::<bool>() {
                f1.block_mut(x).fill(zero);
            } else {
                f2.block_mut(x).fill(zero);
            }
        }
        offer_pair(a, b, &f1, &f2, &mut paired)?;
    }

    // f1 = δ_x e_1, f2 = δ_y e_1: Q_A(f1, f2) = L_A[y, x] and Q_B(|f1|, |f2|) = L_B[y, x]
    let (la, lb) = (a.matrix(), b.matrix());
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let slack = la[(y * rank, x * rank)].re - lb[(y, x)].re;
            paired.offer(slack, || {
                let mut f1 = Section::zeros(n, rank);
                let mut f2 = Section::zeros(n, rank);
                f1.block_mut(x)[0] = Complex64::new(1.0, 0.0);
                f2.block_mut(y)[0] = Complex64::new(1.0, 0.0);
                Witness {
                    vector: pairs(f1.values()),
                    partner: Some(pairs(f2.values())),
                    parameter: None,
                    vertex: None,
                }
            });
        }
    }

    let ideal_slack = ideal.slack;
    let pairing_slack = paired.slack;
    let mut worst = if ideal_slack <= pairing_slack { ideal } else { paired };
    if !energy_finite {
        worst.slack = f64::NEG_INFINITY;
    }
    Ok(FormVerdict {
        verdict: worst.finish(tolerance),
        energy_finite,
        ideal_slack,
        pairing_slack,
    })
}

fn offer_pair(
    a: &FormOperator,
    b: &FormOperator,
    f1: &Section,
    f2: &Section,
    worst: &mut Worst,
) -> Result<()> {
    let lhs = a.evaluate(f1.values(), f2.values())?.re;
    let rhs = b
        .evaluate(&real_column(&f1.pointwise_norms()), &real_column(&f2.pointwise_norms()))?
        .re;
    worst.offer(lhs - rhs, || Witness {
        vector: pairs(f1.values()),
        partner: Some(pairs(f2.values())),
        parameter: None,
        vertex: None,
    });
    Ok(())
}

/// Pointwise `W(x) ⪰ c(x)` against the dominating graph's killing term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    /// The dominating graph has the bundle's vertex set, edge weights and measure.
    pub applicable: bool,
    pub passed: bool,
    /// `min_x min eig (W(x) − c(x) I)`
    pub min_eigenvalue: f64,
    pub worst_vertex: usize,
}

fn same_graph_data(g: &WeightedGraph, h: &WeightedGraph) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    g.n() == h.n()
        && g.edges().len() == h.edges().len()
        && g.edges().iter().all(|e| close(e.weight, h.weight(e.u, e.v)))
        && g.measure().iter().zip(h.measure()).all(|(a, b)| close(*a, *b))
}

pub fn check_hypothesis(bundle: &HermitianBundle, dominating: &WeightedGraph) -> HypothesisCheck {
    let applicable = same_graph_data(bundle.graph(), dominating);
    let mut min_eigenvalue = f64::INFINITY;
    let mut worst_vertex = 0;
    if bundle.graph().n() == dominating.n() {
        for x in 0..dominating.n() {
            let mut w = bundle.endo(x).clone();
            for k in 0..bundle.rank() {
                w[(k, k)] -= Complex64::new(dominating.killing()[x], 0.0);
            }
            let ev = bundle::min_eigenvalue(&w);
            if ev < min_eigenvalue {
                min_eigenvalue = ev;
                worst_vertex = x;
            }
        }
    }
    HypothesisCheck {
        applicable,
        passed: applicable && min_eigenvalue >= -HYPOTHESIS_TOL,
        min_eigenvalue,
        worst_vertex,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub hypothesis: HypothesisCheck,
    pub form: FormVerdict,
    pub resolvent: Verdict,
    pub semigroup: Verdict,
    pub sampling: SamplingConfig,
}

impl DominationReport {
    pub fn all_pass(&self) -> bool {
        self.form.verdict.pass && self.resolvent.pass && self.semigroup.pass
    }

    /// All three verdicts pass or all three fail.
    pub fn verdicts_agree(&self) -> bool {
        let v = [self.form.verdict.pass, self.resolvent.pass, self.semigroup.pass];
        v.iter().all(|&p| p) || v.iter().all(|&p| !p)
    }

    /// The verdicts agree, and a satisfied hypothesis comes with a full pass.
    pub fn consistent(&self) -> bool {
        self.verdicts_agree() && (!self.hypothesis.passed || self.all_pass())
    }
}

/// Runs the hypothesis check and all three domination checks of the bundle
/// form against the scalar form of `dominating`.
pub fn domination_report(
    bundle: &HermitianBundle,
    dominating: &WeightedGraph,
    config: &SamplingConfig,
) -> Result<DominationReport> {
    let a = crate::form::assemble_magnetic_form(bundle)?;
    let b = assemble_scalar_form(dominating)?;
    let hypothesis = check_hypothesis(bundle, dominating);
    let tol = config.tolerance;
    let mut rng = seeded(config.seed);
    let semigroup = check_semigroup_domination(&a, &b, &config.t_list, config.samples, tol, &mut rng)?;
    let resolvent = check_resolvent_domination(&a, &b, &config.alpha_list, config.samples, tol, &mut rng)?;
    let form = check_form_domination(&a, &b, config.samples, tol, &mut rng)?;
    Ok(DominationReport {
        hypothesis,
        form,
        resolvent,
        semigroup,
        sampling: config.clone(),
    })
}

/// Domination of the magnetic form by the scalar form of the underlying graph.
pub fn diamagnetic_report(bundle: &HermitianBundle, config: &SamplingConfig) -> Result<DominationReport> {
    domination_report(bundle, bundle.graph(), config)
}

/// `ã = α·a/|a|` (and `0` when `a = 0`).
fn scaled_direction(a: &[Complex64], alpha: f64) -> Vec<Complex64> {
    let norm = block_norm(a);
    if norm == 0.0 {
        return vec![Complex64::new(0.0, 0.0); a.len()];
    }
    a.iter().map(|z| z * (alpha / norm)).collect()
}

/// Slack of `|α − β|² + |a − b|² − |ã − b̃|²` for given inputs.
pub fn sgn_inequality_slack(a: &[Complex64], b: &[Complex64], alpha: f64, beta: f64) -> f64 {
    let at = scaled_direction(a, alpha);
    let bt = scaled_direction(b, beta);
    let dist = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>();
    (alpha - beta).powi(2) + dist(a, b) - dist(&at, &bt)
}

/// Smallest slack of the inequality over `trials` random draws in `ℂ^d` with
/// `0 ≤ α ≤ |a|`, `0 ≤ β ≤ |b|`. About a tenth of the draws use `a = 0` or
/// `b = 0`.
pub fn sgn_inequality_check<R: Rng + ?Sized>(d: usize, trials: usize, rng: &mut R) -> f64 {
    assert!(trials >= 1 && d >= 1);
    let zero = vec![Complex64::new(0.0, 0.0); d];
    (0..trials)
        .map(|_| {
            let mut draw = || {
                if rng.random::<f64>() < 0.1 {
                    zero.clone()
                } else {
                    (0..d).map(|_| random::complex_normal(rng)).collect::<Vec<_>>()
                }
            };
            let a = draw();
            let b = draw();
            let alpha = block_norm(&a) * rng.random::<f64>();
            let beta = block_norm(&b) * rng.random::<f64>();
            sgn_inequality_slack(&a, &b, alpha, beta)
        })
        .fold(f64::INFINITY, f64::min)
}

/// True when the bundle's endomorphisms dominate the graph's killing term.
pub fn satisfies_diamagnetic_hypothesis(bundle: &HermitianBundle) -> bool {
    check_hypothesis(bundle, bundle.graph()).passed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::CMatrix as BMatrix;
    use std::sync::Arc;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn p2() -> Arc<WeightedGraph> {
        Arc::new(WeightedGraph::unweighted_vertices(2, [(0, 1, 1.0)]).unwrap())
    }

    fn flux_pi() -> HermitianBundle {
        let mut b = HermitianBundle::trivial(p2(), 1);
        b.set_connection(0, 1, BMatrix::from_element(1, 1, re(-1.0))).unwrap();
        b
    }

    fn doubled() -> (FormOperator, FormOperator) {
        let g = p2();
        let a = assemble_scalar_form(&g.scale_weights(2.0).unwrap()).unwrap();
        let b = assemble_scalar_form(&g).unwrap();
        (a, b)
    }

    #[test]
    fn flux_pi_is_dominated_with_equality() {
        let report = diamagnetic_report(&flux_pi(), &SamplingConfig::default()).unwrap();
        assert!(report.hypothesis.passed);
        assert!(report.all_pass() && report.consistent(), "{report:?}");
        assert!(report.semigroup.witness.is_none());
        assert!(report.semigroup.slack.abs() < 1e-12);
    }

    #[test]
    fn doubled_weights_fail_everywhere() {
        let (a, b) = doubled();
        let mut rng = seeded(1);
        let t = [0.5];
        let s = check_semigroup_domination(&a, &b, &t, 0, DOMINATION_TOL, &mut rng).unwrap();
        assert!(!s.pass);
        let expected = 0.5 * ((-1.0f64).exp() - (-2.0f64).exp());
        assert!((s.violation() - expected).abs() < 1e-12, "{s:?}");
        let w = s.witness.unwrap();
        assert_eq!(w.vertex, Some(1));

        let r = check_resolvent_domination(&a, &b, &[0.5, 1.0, 10.0], 10, DOMINATION_TOL, &mut rng).unwrap();
        assert!(!r.pass && r.violation() >= 1e-2);

        let f = check_form_domination(&a, &b, 20, DOMINATION_TOL, &mut rng).unwrap();
        assert!(!f.verdict.pass);
        assert!((f.pairing_slack + 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_domination_of_scalar_forms() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 0.5)], vec![0.2, 0.0, 1.0], vec![1.0, 2.0, 0.5]).unwrap();
        let bundle = HermitianBundle::scalar(Arc::new(g));
        let report = diamagnetic_report(&bundle, &SamplingConfig::default()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.form.pairing_slack.abs() < 1e-12);
    }

    #[test]
    fn failed_hypothesis_is_reported() {
        let g = Arc::new(WeightedGraph::new(2, [(0, 1, 1.0)], vec![1.0, 0.0], vec![1.0; 2]).unwrap());
        let bundle = HermitianBundle::trivial(g, 1);
        let report = diamagnetic_report(&bundle, &SamplingConfig::default()).unwrap();
        assert!(!report.hypothesis.passed);
        assert!((report.hypothesis.min_eigenvalue + 1.0).abs() < 1e-12);
        assert_eq!(report.hypothesis.worst_vertex, 0);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = assemble_scalar_form(&p2()).unwrap();
        let b = assemble_scalar_form(&WeightedGraph::unweighted_vertices(3, [(0, 1, 1.0)]).unwrap()).unwrap();
        assert!(matches!(
            check_semigroup_domination(&a, &b, &[1.0], 1, DOMINATION_TOL, &mut seeded(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sgn_inequality_examples() {
        let slack = sgn_inequality_slack(&[re(2.0), re(0.0)], &[re(0.0), re(1.0)], 1.0, 1.0);
        assert!((slack - 3.0).abs() < 1e-15);
        let slack = sgn_inequality_slack(&[re(0.0)], &[re(2.0)], 0.0, 1.5);
        assert!((slack - 4.0).abs() < 1e-15);
        for d in 1..=3 {
            assert!(sgn_inequality_check(d, 2000, &mut seeded(d as u64)) >= -1e-12);
        }
    }

    #[test]
    fn report_serializes_with_expected_sections() {
        let report = diamagnetic_report(&flux_pi(), &SamplingConfig::default()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in ["hypothesis", "form", "resolvent", "semigroup", "sampling"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert!(json["form"].get("pass").is_some());
    }
}
