//! Solvers for `Mx = (1/x_1, ..., 1/x_n)`.
//!
//! Four strategies share the fixed-point map `F` from [`crate::fixedpoint`]:
//!
//! * **bracket**: iterate `F` from `0`. Because `F` is antitone, even and odd
//!   iterates form nested boxes `lower <= x* <= upper` that shrink around a
//!   fixed point. Needs a positive diagonal so `F` is continuous at `0`.
//! * **contraction**: Banach iteration, valid when `2 m_ii > m_ij` for all
//!   `i, j`; the ratio `C = max m_ij / (2 m_ii)` bounds the convergence rate.
//! * **newton**: damped Newton on `G_i(x) = x_i (Mx)_i - 1`.
//! * **fixed_point**: plain iteration of `F` from the all-ones vector, for
//!   zero-diagonal matrices where neither of the first two applies.
//!
//! [`solve`] with [`Method::Auto`] picks the first applicable strategy and
//! escalates to Newton when iteration stalls.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, contraction_condition, contraction_violation, Classification};
use crate::error::{Error, Result};
use crate::fixedpoint::{f_map, residual, residual_vector};
use crate::linalg::solve_dense;
use crate::matrix::{max_distance, Matrix, PositiveVector};

pub const DEFAULT_SEED: u64 = 0x5EED_1DEA;

/// Gap ratio above which an iteration step counts as non-improving.
const STALL_RATIO: f64 = 0.999;
/// Consecutive non-improving steps that make a stall.
const STALL_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Bracket,
    Contraction,
    Newton,
    FixedPoint,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Bracket => "bracket",
            Method::Contraction => "contraction",
            Method::Newton => "newton",
            Method::FixedPoint => "fixed_point",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Method::Auto),
            "bracket" => Ok(Method::Bracket),
            "contraction" => Ok(Method::Contraction),
            "newton" => Ok(Method::Newton),
            "fixed-point" | "fixed_point" => Ok(Method::FixedPoint),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Target for the max-norm residual of `x_i (Mx)_i = 1`.
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    pub newton_damping_max_halvings: usize,
    /// Seed for random starts in [`multistart_uniqueness`].
    pub seed: Option<u64>,
    /// Record the residual after every iteration.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iter: 10_000,
            method: Method::Auto,
            newton_damping_max_halvings: 40,
            seed: None,
            trace: false,
        }
    }
}

impl SolverConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) || self.max_iter == 0 {
            return Err(Error::Validation {
                line: 0,
                column: 0,
                message: format!(
                    "solver config needs tol > 0 and max_iter >= 1 (got {}, {})",
                    self.tol, self.max_iter
                ),
            });
        }
        Ok(())
    }
}

/// A box `lower <= x <= upper` from the bracketing iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketState {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BracketState {
    pub fn gap(&self) -> f64 {
        max_distance(&self.lower, &self.upper)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// `lower <= upper` componentwise.
    pub fn is_ordered(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(a, b)| a <= b)
    }

    /// Whether `inner` lies inside `self`, with both boxes ordered.
    pub fn contains(&self, inner: &BracketState) -> bool {
        let n = self.lower.len();
        (0..n).all(|i| {
            self.lower[i] <= inner.lower[i]
                && inner.lower[i] <= inner.upper[i]
                && inner.upper[i] <= self.upper[i]
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: PositiveVector,
    pub residual: f64,
    pub iterations: usize,
    pub method_used: Method,
    pub classification: Classification,
    pub converged: bool,
    pub trace: Option<Vec<f64>>,
    /// Every box visited by the bracketing iteration, starting with
    /// `Box(0, F(0))`. Empty for other methods.
    pub brackets: Vec<BracketState>,
}

/// Counts consecutive steps where a monitored gap fails to shrink by more
/// than a factor [`STALL_RATIO`].
#[derive(Debug, Default)]
pub struct StallDetector {
    previous: Option<f64>,
    streak: usize,
}

impl StallDetector {
    /// Feeds the next gap; returns true once [`STALL_WINDOW`] consecutive
    /// ratios exceed [`STALL_RATIO`].
    pub fn observe(&mut self, gap: f64) -> bool {
        if let Some(prev) = self.previous {
            if prev > 0.0 && gap / prev > STALL_RATIO {
                self.streak += 1;
            } else {
                self.streak = 0;
            }
        }
        self.previous = Some(gap);
        self.streak >= STALL_WINDOW
    }
}

struct Trace {
    residuals: Option<Vec<f64>>,
}

impl Trace {
    fn new(enabled: bool) -> Self {
        Trace {
            residuals: enabled.then(Vec::new),
        }
    }

    fn push(&mut self, r: f64) {
        if let Some(t) = self.residuals.as_mut() {
            t.push(r);
        }
    }

    fn extend(&mut self, other: Option<Vec<f64>>) {
        if let (Some(t), Some(o)) = (self.residuals.as_mut(), other) {
            t.extend(o);
        }
    }
}

/// Rejects negative entries and zero rows; returns the classification.
fn admit(m: &Matrix) -> Result<Classification> {
    for (i, row) in m.rows().enumerate() {
        if let Some(j) = row.iter().position(|&v| v < 0.0) {
            return Err(Error::NonNegativity {
                row: i,
                col: j,
                value: row[j],
            });
        }
    }
    if let Some(row) = m.rows().position(|r| r.iter().all(|&v| v == 0.0)) {
        return Err(Error::ZeroRow { row });
    }
    Ok(classify(m))
}

fn finish(
    m: &Matrix,
    x: Vec<f64>,
    iterations: usize,
    method_used: Method,
    classification: Classification,
    config: &SolverConfig,
    trace: Trace,
    brackets: Vec<BracketState>,
) -> Result<SolveResult> {
    let r = residual(m, &x);
    let result = SolveResult {
        x: PositiveVector::new(x)?,
        residual: r,
        iterations,
        method_used,
        classification,
        converged: r <= config.tol,
        trace: trace.residuals,
        brackets,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::Convergence(Box::new(result)))
    }
}

/// Solves with the strategy named in `config.method`.
pub fn solve(m: &Matrix, config: &SolverConfig) -> Result<SolveResult> {
    match config.method {
        Method::Auto => solve_auto(m, config),
        Method::Bracket => solve_bracket(m, config),
        Method::Contraction => solve_contraction(m, config),
        Method::FixedPoint => solve_fixed_point(m, config),
        Method::Newton => {
            let x0 = if m.diagonal().all(|d| d > 0.0) {
                f_map(m, &vec![0.0; m.n()])?
            } else {
                PositiveVector::ones(m.n())
            };
            solve_newton(m, &x0, config)
        }
    }
}

enum BracketEnd {
    Closed,
    Stalled,
    Exhausted,
}

struct BracketRun {
    end: BracketEnd,
    iterations: usize,
    boxes: Vec<BracketState>,
    trace: Trace,
}

/// Nested boxes `Box(F^{2k}(0), F^{2k+1}(0))`.
fn bracket_iterate(m: &Matrix, config: &SolverConfig) -> Result<BracketRun> {
    let n = m.n();
    let lower = vec![0.0; n];
    let upper = f_map(m, &lower)?.into_inner();
    let mut boxes = vec![BracketState { lower, upper }];
    let mut trace = Trace::new(config.trace);
    let mut stall = StallDetector::default();

    for k in 1..=config.max_iter {
        let prev = boxes.last().expect("initial box");
        let lower = f_map(m, &prev.upper)?.into_inner();
        let upper = f_map(m, &lower)?.into_inner();
        let state = BracketState { lower, upper };
        let gap = state.gap();
        trace.push(residual(m, &state.midpoint()));
        boxes.push(state);
        if gap <= config.tol {
            return Ok(BracketRun {
                end: BracketEnd::Closed,
                iterations: k,
                boxes,
                trace,
            });
        }
        if stall.observe(gap) {
            return Ok(BracketRun {
                end: BracketEnd::Stalled,
                iterations: k,
                boxes,
                trace,
            });
        }
    }
    Ok(BracketRun {
        end: BracketEnd::Exhausted,
        iterations: config.max_iter,
        boxes,
        trace,
    })
}

/// Nested-box iteration from `x_0 = 0`.
///
/// Returns the midpoint of the final box. If the box closes but the
/// midpoint misses `tol`, or if the box width stalls, the midpoint is handed
/// to Newton and `method_used` becomes [`Method::Newton`].
pub fn solve_bracket(m: &Matrix, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let classification = admit(m)?;
    if let Some(row) = m.diagonal().position(|d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { row });
    }
    bracket_then_newton(m, config, classification, false)
}

fn bracket_then_newton(
    m: &Matrix,
    config: &SolverConfig,
    classification: Classification,
    escalate_on_budget: bool,
) -> Result<SolveResult> {
    let run = bracket_iterate(m, config)?;
    let last = run.boxes.last().expect("at least one box");
    let mid = last.midpoint();
    let r = residual(m, &mid);
    let polish = match run.end {
        BracketEnd::Closed => r > config.tol,
        BracketEnd::Stalled => true,
        BracketEnd::Exhausted => escalate_on_budget,
    };
    if !polish {
        return finish(
            m,
            mid,
            run.iterations,
            Method::Bracket,
            classification,
            config,
            run.trace,
            run.boxes,
        );
    }
    let x0 = PositiveVector::new(mid)?;
    newton_fallback(m, &x0, config, classification, run.iterations, run.trace, run.boxes)
}

/// Banach iteration `x_{k+1} = F(x_k)` from `x_0 = F(0)`.
///
/// Stops when the residual reaches `tol`, or when the a-posteriori bound
/// `C/(1-C) * ||x_{k+1} - x_k||` drops below `tol` and the residual agrees.
pub fn solve_contraction(m: &Matrix, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let classification = admit(m)?;
    if let Some((row, col)) = contraction_violation(m) {
        return Err(Error::ContractionPrecondition {
            row,
            col,
            twice_diag: 2.0 * m.get(row, row),
            entry: m.get(row, col),
        });
    }
    let (_, c) = contraction_condition(m);
    let c = c.expect("contraction constant present when condition holds");
    let gap_target = config.tol * (1.0 - c) / c;

    let mut trace = Trace::new(config.trace);
    let mut x = f_map(m, &vec![0.0; m.n()])?.into_inner();
    let mut r = residual(m, &x);
    trace.push(r);
    let mut iterations = 0;
    let mut stall = StallDetector::default();
    while r > config.tol && iterations < config.max_iter {
        let next = f_map(m, &x)?.into_inner();
        let gap = max_distance(&next, &x);
        x = next;
        r = residual(m, &x);
        trace.push(r);
        iterations += 1;
        // Successive iterates agree to rounding; more steps cannot help.
        if gap == 0.0 || (gap <= gap_target && stall.observe(gap)) {
            break;
        }
    }
    finish(
        m,
        x,
        iterations,
        Method::Contraction,
        classification,
        config,
        trace,
        Vec::new(),
    )
}

struct PlainRun {
    best: Vec<f64>,
    best_residual: f64,
    iterations: usize,
    trace: Trace,
}

/// `x_{k+1} = F(x_k)` from the all-ones vector, keeping the iterate with the
/// smallest residual. Ends on convergence, stall, an undefined `F`, or the
/// budget.
fn plain_iterate(m: &Matrix, config: &SolverConfig) -> PlainRun {
    let mut x = vec![1.0; m.n()];
    let mut run = PlainRun {
        best_residual: residual(m, &x),
        best: x.clone(),
        iterations: 0,
        trace: Trace::new(config.trace),
    };
    run.trace.push(run.best_residual);
    let mut stall = StallDetector::default();
    while run.best_residual > config.tol && run.iterations < config.max_iter {
        let next = match f_map(m, &x) {
            Ok(v) => v.into_inner(),
            Err(_) => break,
        };
        let gap = max_distance(&next, &x);
        x = next;
        run.iterations += 1;
        let r = residual(m, &x);
        run.trace.push(r);
        if r < run.best_residual {
            run.best_residual = r;
            run.best.clone_from(&x);
        }
        if stall.observe(gap) {
            break;
        }
    }
    run
}

/// Plain fixed-point iteration with no fallback.
pub fn solve_fixed_point(m: &Matrix, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let classification = admit(m)?;
    let run = plain_iterate(m, config);
    finish(
        m,
        run.best,
        run.iterations,
        Method::FixedPoint,
        classification,
        config,
        run.trace,
        Vec::new(),
    )
}

/// Damped Newton on `G_i(x) = x_i (Mx)_i - 1`.
///
/// The Jacobian is `J_ij = x_i m_ij + delta_ij (Mx)_i`. Each step is halved
/// (at most `newton_damping_max_halvings` times) until the iterate stays
/// positive and `||G||_inf` decreases.
pub fn solve_newton(m: &Matrix, x0: &PositiveVector, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let classification = admit(m)?;
    if x0.len() != m.n() {
        return Err(Error::Dimension {
            expected: m.n(),
            found: x0.len(),
        });
    }
    let mut trace = Trace::new(config.trace);
    let (x, iterations) = newton_iterate(m, x0.as_slice().to_vec(), config, &mut trace)?;
    finish(
        m,
        x,
        iterations,
        Method::Newton,
        classification,
        config,
        trace,
        Vec::new(),
    )
}

fn newton_iterate(
    m: &Matrix,
    mut x: Vec<f64>,
    config: &SolverConfig,
    trace: &mut Trace,
) -> Result<(Vec<f64>, usize)> {
    let n = m.n();
    let mut g = residual_vector(m, &x);
    let mut r = sup(&g);
    trace.push(r);
    let mut iterations = 0;
    while r > config.tol && iterations < config.max_iter {
        let mx = m.apply(&x)?;
        let mut jac = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                jac[i * n + j] = x[i] * m.get(i, j);
            }
            jac[i * n + i] += mx[i];
        }
        let mut rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = solve_dense(&mut jac, &mut rhs)?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=config.newton_damping_max_halvings {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if cand.iter().all(|v| *v > 0.0 && v.is_finite()) {
                let gc = residual_vector(m, &cand);
                let rc = sup(&gc);
                if rc < r {
                    accepted = Some((cand, gc, rc));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, gc, rc)) = accepted else {
            break;
        };
        x = cand;
        g = gc;
        r = rc;
        iterations += 1;
        trace.push(r);
    }
    Ok((x, iterations))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Runs Newton from `x0` after an iteration that did not finish on its own.
/// Iteration counts, traces and boxes of the first stage are kept.
fn newton_fallback(
    m: &Matrix,
    x0: &PositiveVector,
    config: &SolverConfig,
    classification: Classification,
    prior_iterations: usize,
    mut trace: Trace,
    brackets: Vec<BracketState>,
) -> Result<SolveResult> {
    let mut newton_trace = Trace::new(config.trace);
    let (x, iterations) = match newton_iterate(m, x0.as_slice().to_vec(), config, &mut newton_trace)
    {
        Ok(out) => out,
        // Report the starting point rather than a bare linear-algebra error.
        Err(Error::SingularJacobian { .. }) => (x0.as_slice().to_vec(), 0),
        Err(e) => return Err(e),
    };
    trace.extend(newton_trace.residuals);
    finish(
        m,
        x,
        prior_iterations + iterations,
        Method::Newton,
        classification,
        config,
        trace,
        brackets,
    )
}

/// Picks a strategy from the classification.
///
/// Contraction when `2 m_ii > m_ij` everywhere, bracketing when the diagonal
/// is positive, otherwise plain iteration from all-ones. Anything that stalls
/// or runs out of budget continues with Newton from its best point.
pub fn solve_auto(m: &Matrix, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let classification = admit(m)?;

    if classification.contraction_condition {
        match solve_contraction(m, config) {
            Ok(res) => return Ok(res),
            Err(Error::Convergence(res)) => {
                let res = *res;
                return newton_fallback(
                    m,
                    &res.x,
                    config,
                    classification,
                    res.iterations,
                    Trace {
                        residuals: res.trace,
                    },
                    Vec::new(),
                );
            }
            Err(e) => return Err(e),
        }
    }

    if classification.positive_diagonal {
        return bracket_then_newton(m, config, classification, true);
    }

    let run = plain_iterate(m, config);
    if run.best_residual <= config.tol {
        return finish(
            m,
            run.best,
            run.iterations,
            Method::FixedPoint,
            classification,
            config,
            run.trace,
            Vec::new(),
        );
    }
    let x0 = PositiveVector::new(run.best)?;
    newton_fallback(m, &x0, config, classification, run.iterations, run.trace, Vec::new())
}

/// Random start with components log-uniform in `[1e-2, 1e2]`.
pub fn random_start<R: Rng>(rng: &mut R, n: usize) -> PositiveVector {
    let v = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-2.0..=2.0)))
        .collect();
    PositiveVector::new(v).expect("powers of ten are positive")
}

/// Solves with Newton from `starts` seeded random points and reports the
/// largest pairwise max-norm distance between the solutions found.
///
/// Returns the first solution alongside that distance. Any start that fails
/// to converge fails the whole check.
pub fn multistart_uniqueness(
    m: &Matrix,
    config: &SolverConfig,
    starts: usize,
) -> Result<(SolveResult, f64)> {
    config.validate()?;
    admit(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(DEFAULT_SEED));
    let x0s: Vec<PositiveVector> = (0..starts.max(1))
        .map(|_| random_start(&mut rng, m.n()))
        .collect();
    let results = x0s
        .iter()
        .map(|x0| solve_newton(m, x0, config))
        .collect::<Result<Vec<_>>>()?;

    let mut spread = 0.0f64;
    for (k, a) in results.iter().enumerate() {
        for b in &results[k + 1..] {
            spread = spread.max(max_distance(a.x.as_slice(), b.x.as_slice()));
        }
    }
    let first = results.into_iter().next().expect("at least one start");
    Ok((first, spread))
}
