//! Executable identity suite: second-order recurrences, Cassini-like
//! formulas, and the ratio / mixed limits of the companion sequences.
//!
//! Exact identities are checked with zero residual. Limits are evaluated
//! in fixed-point big-integer arithmetic at a configurable decimal
//! precision (default 60 digits) and reported as error sequences with a
//! monotonicity verdict.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::classes::BalancingClass;
use crate::pairs::{balancer_of, counterbalancer_of};
use crate::{Error, Result};

/// Default working precision for limit checks, in decimal digits.
pub const DEFAULT_PRECISION: u32 = 60;

/// Outcome of one identity or limit check over an index range.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub name: String,
    pub class_index: usize,
    pub indices_checked: usize,
    pub passed: bool,
    /// Offending indices with a short description, empty on pass.
    pub failures: Vec<String>,
    /// For limit checks: the absolute error sequence as decimal strings.
    pub errors: Vec<String>,
    /// For limit checks: whether the error sequence is strictly decreasing.
    pub monotone: bool,
    /// Whether every error is below 1e-8 at indices where the balancing
    /// number exceeds 1e8. The error terms decay like c(k)/B with
    /// c(k) > 1 away from k = 1, so this can legitimately be false at
    /// the first few indices past 1e8.
    pub absolute_bound_met: bool,
    /// Offending indices of the absolute-bound check.
    pub bound_failures: Vec<String>,
}

impl IdentityReport {
    fn exact(name: &str, class_index: usize, n: usize, failures: Vec<String>) -> Self {
        IdentityReport {
            name: name.to_string(),
            class_index,
            indices_checked: n,
            passed: failures.is_empty(),
            failures,
            errors: Vec::new(),
            monotone: true,
            absolute_bound_met: true,
            bound_failures: Vec::new(),
        }
    }
}

/// The five second-order recurrences with their additive constants.
pub fn check_recurrences(class: &mut BalancingClass, n: usize) -> Result<IdentityReport> {
    let k = class.ctx.k as i64;
    let mut failures = Vec::new();
    let rows = sequence_rows(class, n + 2)?;
    let checks: [(&str, &[BigInt], i64); 5] = [
        ("B", &rows.b, 2 - 2 * k),
        ("C", &rows.c, 0),
        ("r", &rows.r, 2 * k),
        ("rhat", &rows.r_hat, 0),
        ("m", &rows.m, 2),
    ];
    for (name, seq, constant) in checks {
        for i in 1..=n {
            let expect = 6 * &seq[i] - &seq[i - 1] + BigInt::from(constant);
            if seq[i + 1] != expect {
                failures.push(format!("{name} recurrence fails at i = {i}"));
            }
        }
    }
    Ok(IdentityReport::exact(
        "recurrences",
        class.class_index,
        n,
        failures,
    ))
}

/// The five Cassini-like formulas; each residual must equal its constant.
pub fn check_cassini(class: &mut BalancingClass, n: usize) -> Result<IdentityReport> {
    let k = class.ctx.k as i128;
    let pell = class.ctx.pell_constant();
    let mut failures = Vec::new();
    let rows = sequence_rows(class, n + 2)?;
    // (shift added to the middle term, constant residual)
    let checks: [(&str, &[BigInt], i128, i128); 5] = [
        ("B", &rows.b, k - 1, (2 * k - 1) * (2 * k - 1)),
        ("C", &rows.c, 0, -8 * pell),
        ("r", &rows.r, -k, 1),
        ("rhat", &rows.r_hat, 0, 8 * pell),
        ("m", &rows.m, -1, -4 * (k * k - 1)),
    ];
    for (name, seq, shift, constant) in checks {
        for i in 1..=n {
            let mid = &seq[i] + BigInt::from(shift);
            let residual = &mid * &mid - &seq[i - 1] * &seq[i + 1];
            if residual != BigInt::from(constant) {
                failures.push(format!(
                    "{name} Cassini residual {residual} != {constant} at i = {i}"
                ));
            }
        }
    }
    Ok(IdentityReport::exact(
        "cassini",
        class.class_index,
        n,
        failures,
    ))
}

/// The companion sequences of a class, materialized to `n` terms.
pub struct SequenceRows {
    pub b: Vec<BigInt>,
    pub c: Vec<BigInt>,
    pub r: Vec<BigInt>,
    pub r_hat: Vec<BigInt>,
    pub m: Vec<BigInt>,
}

pub fn sequence_rows(class: &mut BalancingClass, n: usize) -> Result<SequenceRows> {
    let mut rows = SequenceRows {
        b: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        r_hat: Vec::with_capacity(n),
        m: Vec::with_capacity(n),
    };
    for i in 0..n {
        let pair = class.term(i).clone();
        let bal = balancer_of(&pair)?;
        rows.m.push(counterbalancer_of(&pair)?);
        rows.b.push(pair.b);
        rows.c.push(pair.c);
        rows.r.push(bal.r);
        rows.r_hat.push(bal.r_hat);
    }
    Ok(rows)
}

/// Fixed-point scale `10^digits` and `floor(sqrt(2) * 10^digits)`.
struct FixedPoint {
    scale: BigInt,
    sqrt2: BigInt,
}

impl FixedPoint {
    fn new(digits: u32) -> Self {
        let scale = BigInt::from(10u32).pow(digits);
        let two_scale_sq: BigInt = 2 * (&scale * &scale);
        let sqrt2 = two_scale_sq.sqrt();
        FixedPoint { scale, sqrt2 }
    }

    /// `3 + sqrt(8)`, scaled.
    fn silver_ratio(&self) -> BigInt {
        3 * &self.scale + 2 * &self.sqrt2
    }

    fn to_decimal(&self, scaled: &BigInt, digits: u32) -> String {
        let whole = scaled / &self.scale;
        let frac = (scaled % &self.scale).abs();
        let mut frac = format!("{:0>width$}", frac.to_string(), width = digits as usize);
        frac.truncate(12);
        format!("{whole}.{frac}")
    }
}

fn strictly_decreasing(errors: &[BigInt]) -> bool {
    errors.windows(2).all(|w| w[1] < w[0])
}

fn limit_report(
    name: &str,
    class_index: usize,
    errors: Vec<BigInt>,
    fp: &FixedPoint,
    digits: u32,
    extra_failures: Vec<String>,
    bound_failures: Vec<String>,
) -> Result<IdentityReport> {
    if errors.len() < 5 {
        return Err(Error::Domain(format!(
            "limit check '{name}' needs at least 5 error values, got {}",
            errors.len()
        )));
    }
    let monotone = strictly_decreasing(&errors);
    let mut failures = extra_failures;
    if !monotone {
        failures.push("error sequence is not strictly decreasing".to_string());
    }
    Ok(IdentityReport {
        name: name.to_string(),
        class_index,
        indices_checked: errors.len(),
        passed: failures.is_empty(),
        failures,
        errors: errors.iter().map(|e| fp.to_decimal(e, digits)).collect(),
        monotone,
        absolute_bound_met: bound_failures.is_empty(),
        bound_failures,
    })
}

/// First index whose balancing number exceeds `4k + 2`; the error
/// sequences are monotone from there on.
fn limit_start(class: &mut BalancingClass, n: usize) -> usize {
    let bound = BigInt::from(4 * class.ctx.k + 2);
    (0..n)
        .find(|&i| class.term(i).b > bound)
        .unwrap_or(0)
}

/// Successive-term ratios of B, C, r, r_hat, m all approach `3 + sqrt(8)`.
pub fn check_ratio_limits(
    class: &mut BalancingClass,
    n: usize,
    digits: u32,
) -> Result<IdentityReport> {
    if n < 5 {
        return Err(Error::Domain("ratio check needs n >= 5".into()));
    }
    let fp = FixedPoint::new(digits);
    let alpha = fp.silver_ratio();
    let start = limit_start(class, n);
    let rows = sequence_rows(class, n + 1)?;
    let mut failures = Vec::new();
    let mut bound_failures = Vec::new();
    let mut combined: Vec<BigInt> = Vec::new();
    let threshold = BigInt::from(10u64.pow(8));
    // |x_{i+1}/x_i - alpha| scaled by 10^digits
    for (name, seq) in [
        ("B", &rows.b),
        ("C", &rows.c),
        ("r", &rows.r),
        ("rhat", &rows.r_hat),
        ("m", &rows.m),
    ] {
        let errors: Vec<BigInt> = (start..n)
            .filter(|&i| !seq[i].is_zero())
            .map(|i| (&seq[i + 1] * &fp.scale - &alpha * &seq[i]).abs() / &seq[i])
            .collect();
        if !strictly_decreasing(&errors) {
            failures.push(format!("{name} ratio errors not strictly decreasing"));
        }
        // below 1e-8 once the balancing number passes 1e8
        for (offset, err) in errors.iter().enumerate() {
            let i = start + offset;
            if rows.b[i] > threshold && err >= &(&fp.scale / BigInt::from(10u64.pow(8))) {
                bound_failures.push(format!(
                    "{name} ratio error {} above 1e-8 at i = {i}",
                    fp.to_decimal(err, digits)
                ));
            }
        }
        if name == "B" {
            combined = errors.clone();
        }
    }
    limit_report(
        "ratio_limits",
        class.class_index,
        combined,
        &fp,
        digits,
        failures,
        bound_failures,
    )
}

/// `C - sqrt(8) B -> sqrt(2)(1 - k)`, `r_hat - sqrt(8) r -> sqrt(2) k`,
/// the quotient limits, and the exact Pell invariant behind the proof.
pub fn check_mixed_limits(
    class: &mut BalancingClass,
    n: usize,
    digits: u32,
) -> Result<IdentityReport> {
    if n < 5 {
        return Err(Error::Domain("mixed limit check needs n >= 5".into()));
    }
    let k = class.ctx.k as i64;
    let fp = FixedPoint::new(digits);
    let sqrt8 = 2 * &fp.sqrt2;
    let start = limit_start(class, n);
    let rows = sequence_rows(class, n)?;
    let mut failures = Vec::new();
    let mut bound_failures = Vec::new();

    // exact invariant: C^2 - 2(2B + 1 - k)^2 = 2k^2 - 1, in integers
    let pell = BigInt::from(class.ctx.pell_constant());
    for i in 0..n {
        let z = 2 * &rows.b[i] + 1 - BigInt::from(k);
        if &rows.c[i] * &rows.c[i] - 2 * &z * &z != pell {
            failures.push(format!("Pell invariant fails at i = {i}"));
        }
    }

    // C_i - sqrt(8) B_i -> sqrt(2)(1 - k)
    let target = BigInt::from(1 - k) * &fp.sqrt2;
    let diff_errors: Vec<BigInt> = (start..n)
        .map(|i| {
            let v: BigInt = &rows.c[i] * &fp.scale - &sqrt8 * &rows.b[i] - &target;
            v.abs()
        })
        .collect();
    if !strictly_decreasing(&diff_errors) {
        failures.push("C - sqrt(8)B errors not strictly decreasing".to_string());
    }

    // r_hat_i - sqrt(8) r_i -> sqrt(2) k
    let target = BigInt::from(k) * &fp.sqrt2;
    let bal_errors: Vec<BigInt> = (start..n)
        .map(|i| {
            let v: BigInt = &rows.r_hat[i] * &fp.scale - &sqrt8 * &rows.r[i] - &target;
            v.abs()
        })
        .collect();
    if !strictly_decreasing(&bal_errors) {
        failures.push("rhat - sqrt(8)r errors not strictly decreasing".to_string());
    }

    // quotients C/B and rhat/r -> sqrt(8)
    let threshold = BigInt::from(10u64.pow(8));
    for (name, num, den) in [("C/B", &rows.c, &rows.b), ("rhat/r", &rows.r_hat, &rows.r)] {
        let errors: Vec<BigInt> = (start..n)
            .filter(|&i| !den[i].is_zero())
            .map(|i| {
                let v: BigInt = &num[i] * &fp.scale - &sqrt8 * &den[i];
                v.abs() / &den[i]
            })
            .collect();
        if !strictly_decreasing(&errors) {
            failures.push(format!("{name} quotient errors not strictly decreasing"));
        }
        for (offset, err) in errors.iter().enumerate() {
            let i = start + offset;
            if rows.b[i] > threshold && err >= &(&fp.scale / BigInt::from(10u64.pow(8))) {
                bound_failures.push(format!(
                    "{name} quotient error {} above 1e-8 at i = {i}",
                    fp.to_decimal(err, digits)
                ));
            }
        }
    }

    limit_report(
        "mixed_limits",
        class.class_index,
        diff_errors,
        &fp,
        digits,
        failures,
        bound_failures,
    )
}
