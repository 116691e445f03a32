//! Double and quadruple confluent hypergeometric series.
//!
//! Both series are summed along anti-diagonals of constant total order in
//! double-double arithmetic. Alongside the signed sum we keep the sum of
//! absolute terms; their ratio measures how much cancellation took place.
//! A result is rejected once the rounding error implied by that ratio could
//! exceed a hundredth of the requested tolerance. In plain f64 this would
//! cap the ratio near 1e4; in double-double it allows ratios up to ~1e17
//! at the default tolerance, which covers e.g. `Ψ₂(1;2,1;-30,0)` (ratio
//! 1e13) while still refusing the hopeless large-|x|, large-y corner.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

// Relative rounding level of one double-double operation, with margin.
const DD_EPS: f64 = 1.0e-31;

/// Largest admissible Σ|term| / |Σ term| for a sum of `orders` anti-diagonals.
pub fn cancellation_limit(ctl: &SeriesControl, orders: usize) -> f64 {
    0.01 * ctl.rel_tol / (DD_EPS * orders.max(1) as f64)
}

/// Truncation control shared by the series engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on every summation index (and therefore on the total order).
    pub max_terms_per_index: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-10, abs_tol: 1e-300, max_terms_per_index: 400 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::config("numerics.series.rel_tol", "must be > 0"));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::config("numerics.series.abs_tol", "must be >= 0"));
        }
        if self.max_terms_per_index < 8 {
            return Err(Error::config("numerics.series.max_terms_per_index", "must be >= 8"));
        }
        Ok(())
    }
}

/// A converged series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Estimated truncation plus rounding error.
    pub err_bound: f64,
    /// Number of anti-diagonals summed.
    pub orders: usize,
    /// Σ|term| / |Σ term|.
    pub cancellation: f64,
}

/// Anti-diagonal bookkeeping and the stopping rule: three consecutive
/// orders must each contribute (in absolute value) less than the tolerance,
/// and a geometric extrapolation of the remaining tail must too.
struct OrderTracker<'a> {
    ctl: &'a SeriesControl,
    total: Dd,
    total_abs: f64,
    prev_abs: f64,
    quiet_run: usize,
    orders: usize,
    tail: f64,
}

impl<'a> OrderTracker<'a> {
    fn new(ctl: &'a SeriesControl) -> Self {
        OrderTracker {
            ctl,
            total: Dd::ZERO,
            total_abs: 0.0,
            prev_abs: f64::INFINITY,
            quiet_run: 0,
            orders: 0,
            tail: f64::INFINITY,
        }
    }

    fn push(&mut self, sum: Dd, abs: f64) -> bool {
        self.total += sum;
        self.total_abs += abs;
        self.orders += 1;
        let tol = (self.ctl.rel_tol * self.total.to_f64().abs()).max(self.ctl.abs_tol);
        let q = if abs == 0.0 { 0.0 } else { abs / self.prev_abs };
        self.tail = if q < 1.0 { abs.max(abs * q / (1.0 - q)) } else { f64::INFINITY };
        if abs <= tol && self.tail <= tol {
            self.quiet_run += 1;
        } else {
            self.quiet_run = 0;
        }
        self.prev_abs = abs;
        self.quiet_run >= 3
    }

    fn finish(self, func: &'static str) -> Result<SeriesValue> {
        let value = self.total.to_f64();
        let cancellation = if self.total_abs == 0.0 { 1.0 } else { self.total_abs / value.abs() };
        let limit = cancellation_limit(self.ctl, self.orders);
        if !(cancellation <= limit) {
            return Err(Error::PrecisionLoss { func, ratio: cancellation, limit, hint: None });
        }
        Ok(SeriesValue {
            value,
            err_bound: self.tail + DD_EPS * self.total_abs * self.orders as f64,
            orders: self.orders,
            cancellation,
        })
    }
}

fn check_pochhammer_base(func: &'static str, b: f64) -> Result<()> {
    if !b.is_finite() || (b <= 0.0 && b.fract() == 0.0) {
        return Err(Error::domain(func, format!("denominator parameter {b} must not be a nonpositive integer")));
    }
    Ok(())
}

/// Humbert's confluent series
/// `Ψ₂(1; b1, b2; x, y) = Σ_{m,n} (1)_{m+n} x^m y^n / ((b1)_m (b2)_n m! n!)`.
///
/// Fails with [`Error::PrecisionLoss`] when alternating terms cancel beyond
/// [`cancellation_limit`] (large negative `x` together with large `y`), and
/// with [`Error::NonConvergence`] when the tolerance is not met within
/// `ctl.max_terms_per_index` orders.
pub fn humbert_psi2(b1: f64, b2: f64, x: f64, y: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    const FUNC: &str = "humbert_psi2";
    ctl.validate()?;
    check_pochhammer_base(FUNC, b1)?;
    check_pochhammer_base(FUNC, b2)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::domain(FUNC, "arguments must be finite"));
    }

    // row[n] holds the term t(d - n, n) of the current order d
    let mut row: Vec<Dd> = vec![Dd::ONE];
    let mut tracker = OrderTracker::new(ctl);
    if tracker.push(Dd::ONE, 1.0) {
        return tracker.finish(FUNC);
    }
    for d in 0..ctl.max_terms_per_index {
        let next_order = (d + 1) as f64;
        let pure_y = row[d];
        let mut sum = Dd::ZERO;
        let mut abs = 0.0;
        for (n, t) in row.iter_mut().enumerate() {
            let m = (d - n) as f64;
            *t = t.mul_f64(x).mul_f64(next_order).div_f64(b1 + m).div_f64(m + 1.0);
            sum += *t;
            abs += t.hi.abs();
        }
        let t = pure_y.mul_f64(y).div_f64(b2 + d as f64);
        sum += t;
        abs += t.hi.abs();
        row.push(t);
        if !sum.is_finite() || !abs.is_finite() {
            return Err(Error::Overflow { func: FUNC, hint: None });
        }
        if tracker.push(sum, abs) {
            return tracker.finish(FUNC);
        }
    }
    Err(Error::NonConvergence { func: FUNC, terms: ctl.max_terms_per_index, last: tracker.prev_abs, hint: None })
}

/// Inner single sums `g_n(x) = Σ_m C(m+n, m) x^m / (m+1)!` of the
/// quadruple series, computed on demand.
struct InnerSums {
    x: f64,
    cap: usize,
    values: Vec<Dd>,
    abs: Vec<f64>,
}

impl InnerSums {
    fn new(x: f64, cap: usize) -> Self {
        InnerSums { x, cap, values: Vec::new(), abs: Vec::new() }
    }

    fn ensure(&mut self, n: usize) -> Result<()> {
        while self.values.len() <= n {
            let idx = self.values.len();
            let (v, a) = self.compute(idx)?;
            self.values.push(v);
            self.abs.push(a);
        }
        Ok(())
    }

    fn compute(&self, n: usize) -> Result<(Dd, f64)> {
        let mut u = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut abs = 1.0;
        let nf = n as f64;
        for m in 0..self.cap {
            let mf = m as f64;
            u = u.mul_f64(self.x).mul_f64(mf + nf + 1.0).div_f64(mf + 1.0).div_f64(mf + 2.0);
            sum += u;
            abs += u.hi.abs();
            let ratio = self.x.abs() * (mf + nf + 2.0) / ((mf + 2.0) * (mf + 3.0));
            if u.hi == 0.0 || (ratio < 0.5 && u.hi.abs() <= 1e-34 * abs) {
                return Ok((sum, abs));
            }
        }
        Err(Error::NonConvergence { func: "f4_general", terms: self.cap, last: u.hi.abs(), hint: None })
    }
}

/// Quadruple series
/// `Σ_{m,k,n,l} (1)_{m+n} (1)_{k+l} (1)_{n+l} x1^m x2^k y1^n y2^l
///  / ((1)_n (2)_m (1)_l (2)_k m! n! k! l!)`.
///
/// The `m` and `k` sums are carried out first for each `n` and `l` (the
/// quadruple sum factorises that way); the remaining `(n, l)` double sum is
/// taken along anti-diagonals with the same stopping rule and cancellation
/// guard as [`humbert_psi2`]. Requires `y1, y2 ∈ [0, 1)`; convergence needs
/// `y1 + y2 < 1` and slows as that sum approaches one.
pub fn f4_general(x1: f64, x2: f64, y1: f64, y2: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    const FUNC: &str = "f4_general";
    ctl.validate()?;
    if !x1.is_finite() || !x2.is_finite() {
        return Err(Error::domain(FUNC, "x arguments must be finite"));
    }
    for y in [y1, y2] {
        if !(0.0..1.0).contains(&y) {
            return Err(Error::domain(FUNC, format!("y = {y} outside [0, 1)")));
        }
    }
    let cap = ctl.max_terms_per_index;
    let mut g1 = InnerSums::new(x1, cap);
    let mut g2 = InnerSums::new(x2, cap);

    // row[n] = C(n + l, n) y1^n y2^l on the current anti-diagonal n + l = order
    let mut row: Vec<Dd> = vec![Dd::ONE];
    let mut tracker = OrderTracker::new(ctl);
    g1.ensure(0)?;
    g2.ensure(0)?;
    let first = g1.values[0] * g2.values[0];
    if tracker.push(first, g1.abs[0] * g2.abs[0]) {
        return tracker.finish(FUNC);
    }
    for order in 0..cap {
        let next = order + 1;
        g1.ensure(next)?;
        g2.ensure(next)?;
        let pure_y1 = row[order];
        for (n, h) in row.iter_mut().enumerate() {
            *h = h.mul_f64(y2).mul_f64(next as f64).div_f64((next - n) as f64);
        }
        row.push(pure_y1.mul_f64(y1));

        let mut sum = Dd::ZERO;
        let mut abs = 0.0;
        for (n, h) in row.iter().enumerate() {
            let l = next - n;
            sum += *h * g1.values[n] * g2.values[l];
            abs += h.hi.abs() * g1.abs[n] * g2.abs[l];
        }
        if !sum.is_finite() || !abs.is_finite() {
            return Err(Error::Overflow { func: FUNC, hint: None });
        }
        if tracker.push(sum, abs) {
            return tracker.finish(FUNC);
        }
    }
    Err(Error::NonConvergence { func: FUNC, terms: cap, last: tracker.prev_abs, hint: None })
}
