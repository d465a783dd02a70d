//! Numerical probes of series `Σ c(n)·f(n)`.
//!
//! Terms are kept alongside their log-magnitude so ratios stay finite after
//! the terms themselves overflow. The verdict is a heuristic read of the
//! ratio tail; a finite prefix can never settle convergence.

use serde::Serialize;

use crate::error::{Error, Result};

pub const EPSILON: f64 = 0.05;
pub const TAIL_WINDOW: usize = 10;
pub const CAVEAT: &str = "heuristic verdict from a finite prefix; it does not prove convergence or divergence";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub n: usize,
    pub c_n: f64,
    pub f_n: f64,
    /// `c_n · f_n`, possibly infinite.
    pub term: f64,
    /// `ln |c_n · f_n|`; `-inf` for a zero term.
    pub ln_abs: f64,
}

impl Term {
    pub fn new(n: usize, c_n: f64, f_n: f64) -> Self {
        let term = c_n * f_n;
        let ln_abs = if term.is_finite() { term.abs().ln() } else { c_n.abs().ln() + f_n.abs().ln() };
        Term { n, c_n, f_n, term, ln_abs }
    }

    /// A term given by `ln |c_n|`, `ln |f_n|` and the sign of the product.
    pub fn from_logs(n: usize, ln_c: f64, ln_f: f64, negative: bool) -> Self {
        let sign = if negative { -1.0 } else { 1.0 };
        let ln_abs = ln_c + ln_f;
        Term { n, c_n: ln_c.exp(), f_n: sign * ln_f.exp(), term: sign * ln_abs.exp(), ln_abs }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Diverges => "diverges",
            Verdict::Converges => "converges",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub terms: Vec<Term>,
    pub partial_sums: Vec<f64>,
    /// `|term[k+1]| / |term[k]|`; `None` where `term[k]` is zero.
    pub ratio_estimates: Vec<Option<f64>>,
    pub verdict: Verdict,
    /// Indices `k` whose ratio is undefined.
    pub undefined_ratios: Vec<usize>,
    pub caveat: &'static str,
}

impl SeriesReport {
    /// Columns `n,c_n,f_n,term,partial_sum,ratio`; the ratio column of row
    /// `k` is the ratio from term `k` to term `k+1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_n,f_n,term,partial_sum,ratio\n");
        for (k, t) in self.terms.iter().enumerate() {
            let ratio = match self.ratio_estimates.get(k) {
                Some(Some(r)) => r.to_string(),
                _ => String::new(),
            };
            out.push_str(&format!("{},{},{},{},{},{}\n", t.n, t.c_n, t.f_n, t.term, self.partial_sums[k], ratio));
        }
        out
    }
}

/// `n! · B · Cⁿ`.
pub fn theorem1_term(b: f64, c: f64, n: usize) -> f64 {
    let mut fact = 1.0f64;
    for k in 2..=n {
        fact *= k as f64;
    }
    fact * b * c.powi(n as i32)
}

/// The same term with `c_n = n!` and `f_n = B·Cⁿ` kept separately and
/// the magnitude tracked in log space.
pub fn theorem1_series_term(b: f64, c: f64, n: usize) -> Term {
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let f_n = b * c.powi(n as i32);
    if f_n.is_finite() && f_n != 0.0 && ln_fact < 700.0 {
        return Term::new(n, ln_fact.exp(), f_n);
    }
    if b == 0.0 || (c == 0.0 && n > 0) {
        return Term::new(n, ln_fact.exp(), 0.0);
    }
    let negative = (b < 0.0) ^ (c < 0.0 && n % 2 == 1);
    let ln_f = b.abs().ln() + n as f64 * c.abs().ln();
    Term::from_logs(n, ln_fact, ln_f, negative)
}

/// Evaluates `term_fn` on `0..=n_max` and reads the ratio tail.
pub fn divergence_probe(term_fn: impl Fn(usize) -> Term, n_max: usize) -> Result<SeriesReport> {
    if n_max < 2 {
        return Err(Error::Format(format!("n_max must be at least 2, got {n_max}")));
    }
    Ok(probe_terms((0..=n_max).map(term_fn).collect()))
}

/// Builds a report from already computed terms.
pub fn probe_terms(terms: Vec<Term>) -> SeriesReport {
    let mut partial_sums = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t.term;
        partial_sums.push(acc);
    }
    let mut ratio_estimates = Vec::new();
    let mut undefined_ratios = Vec::new();
    for (k, w) in terms.windows(2).enumerate() {
        if w[0].is_zero() {
            ratio_estimates.push(None);
            undefined_ratios.push(k);
        } else {
            ratio_estimates.push(Some((w[1].ln_abs - w[0].ln_abs).exp()));
        }
    }
    let verdict = verdict(&ratio_estimates);
    SeriesReport { terms, partial_sums, ratio_estimates, verdict, undefined_ratios, caveat: CAVEAT }
}

fn verdict(ratios: &[Option<f64>]) -> Verdict {
    let start = ratios.len().saturating_sub(TAIL_WINDOW);
    let tail: Vec<f64> = ratios[start..].iter().flatten().copied().collect();
    if tail.len() < 2 {
        return Verdict::Inconclusive;
    }
    let tol = |x: f64| 1e-9 * x.abs().max(1.0);
    // ratios growing at least linearly have no finite limit
    let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    if tail.len() >= 3
        && tail.windows(2).all(|w| w[1] - w[0] > tol(w[0]))
        && steps.windows(2).all(|d| d[1] >= d[0] - tol(d[0]))
    {
        return Verdict::Diverges;
    }
    let non_decreasing = tail.windows(2).all(|w| w[1] >= w[0] - tol(w[0]));
    if tail.iter().all(|&r| r > 1.0 + EPSILON) && non_decreasing {
        return Verdict::Diverges;
    }
    if tail.iter().all(|&r| r < 1.0 - EPSILON) {
        return Verdict::Converges;
    }
    Verdict::Inconclusive
}

/// `Σ_{n ≤ n_max} n! · 1/(2^{n+1} n!)`.
pub fn reference_distribution_mass(n_max: usize) -> f64 {
    let mut ln_fact = 0.0f64;
    let mut sum = 0.0;
    for n in 0..=n_max {
        if n > 1 {
            ln_fact += (n as f64).ln();
        }
        let ln_p = -((n + 1) as f64) * std::f64::consts::LN_2 - ln_fact;
        sum += Term::from_logs(n, ln_fact, ln_p, false).term;
    }
    sum
}
