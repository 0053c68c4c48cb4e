//! Domain types for a fixed gap size: balancing pairs, balancer pairs,
//! counterbalancers, Pell substitutions, and nomenclature conversions.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{half_exact, is_perfect_square, triangular};
use crate::{Error, Result};

/// Gap size `k` with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapContext {
    pub k: u64,
}

impl GapContext {
    pub fn new(k: u64) -> Self {
        GapContext { k }
    }

    /// `(2k-1)^2`, the constant term of the balancing-pair equation.
    pub fn odd_square(&self) -> BigInt {
        let t = 2 * self.k as i128 - 1;
        BigInt::from(t * t)
    }

    /// `2k^2 - 1`, the Pell constant (`-1` at `k = 0`).
    pub fn pell_constant(&self) -> i128 {
        2 * (self.k as i128) * (self.k as i128) - 1
    }

    /// Radicand `8x^2 + 8(1-k)x + (2k-1)^2` of the balancing-pair equation.
    pub fn balancing_radicand(&self, x: &BigInt) -> BigInt {
        let one_minus_k = BigInt::from(1i128 - self.k as i128);
        8 * x * x + 8 * one_minus_k * x + self.odd_square()
    }

    /// Radicand `8x^2 + 8kx + 1` of the balancer-pair equation.
    pub fn balancer_radicand(&self, x: &BigInt) -> BigInt {
        8 * x * x + 8 * BigInt::from(self.k) * x + 1
    }
}

/// A solution `(B, C)` of `C^2 = 8B^2 + 8(1-k)B + (2k-1)^2` with `C >= 0`.
/// Members with `B >= k` are the upper k-gap balancing pairs proper;
/// seeds sit at `0 <= B < k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancingPair {
    pub b: BigInt,
    pub c: BigInt,
    pub ctx: GapContext,
}

impl BalancingPair {
    /// Builds the pair after verifying the defining equation.
    pub fn new(ctx: GapContext, b: BigInt, c: BigInt) -> Result<Self> {
        if c < BigInt::zero() || &c * &c != ctx.balancing_radicand(&b) {
            return Err(Error::Invariant(format!(
                "({b}, {c}) is not a balancing-pair solution for k = {}",
                ctx.k
            )));
        }
        Ok(BalancingPair { b, c, ctx })
    }
}

/// A solution `(r, r_hat)` of `r_hat^2 = 8r^2 + 8kr + 1` with `r_hat >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancerPair {
    pub r: BigInt,
    pub r_hat: BigInt,
    pub ctx: GapContext,
}

impl BalancerPair {
    pub fn new(ctx: GapContext, r: BigInt, r_hat: BigInt) -> Result<Self> {
        if r_hat < BigInt::zero() || &r_hat * &r_hat != ctx.balancer_radicand(&r) {
            return Err(Error::Invariant(format!(
                "({r}, {r_hat}) is not a balancer-pair solution for k = {}",
                ctx.k
            )));
        }
        Ok(BalancerPair { r, r_hat, ctx })
    }
}

/// A point on `y^2 - 2z^2 = sign * (2k^2 - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPoint {
    pub y: BigInt,
    pub z: BigInt,
    pub sign: i8,
}

/// Membership test: returns the pair `(B, C)` when the radicand is a
/// perfect square. `B < k` is a caller error (the smallest balancing
/// number is `k` itself).
pub fn is_upper_gap_balancing(ctx: GapContext, b: &BigInt) -> Result<Option<BalancingPair>> {
    if b < &BigInt::from(ctx.k) {
        return Err(Error::Domain(format!(
            "B = {b} below the minimal balancing number k = {}",
            ctx.k
        )));
    }
    Ok(is_perfect_square(&ctx.balancing_radicand(b)).map(|c| BalancingPair {
        b: b.clone(),
        c,
        ctx,
    }))
}

/// `(r, r_hat) = ((-2B + C - 1)/2, 4B - C + 2 - 2k)`.
pub fn balancer_of(pair: &BalancingPair) -> Result<BalancerPair> {
    let ctx = pair.ctx;
    let r = half_exact(&(-2 * &pair.b + &pair.c - 1))?;
    let r_hat = 4 * &pair.b - &pair.c + 2 - 2 * BigInt::from(ctx.k);
    BalancerPair::new(ctx, r, r_hat)
}

/// Counterbalancer `m = (C - 1)/2 = B + r`.
pub fn counterbalancer_of(pair: &BalancingPair) -> Result<BigInt> {
    half_exact(&(&pair.c - 1))
}

/// Checks `T(B-k) + T(B) = T(B+r)` directly.
pub fn verify_triangular_identity(pair: &BalancingPair) -> Result<bool> {
    let k = BigInt::from(pair.ctx.k);
    let r = balancer_of(pair)?.r;
    let lhs = triangular(&(&pair.b - &k))? + triangular(&pair.b)?;
    let rhs = triangular(&(&pair.b + &r))?;
    Ok(lhs == rhs)
}

/// Which defining equation a Pell substitution starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PellSource {
    /// Balancing-pair equation; substitution `z = 2x + 1 - k`.
    Balancing,
    /// Balancer-pair equation; substitution `z = 2r + k`.
    Balancer,
}

/// Substitutes a solution of one of the defining equations into its Pell
/// form `y^2 - 2z^2 = ±(2k^2 - 1)`.
pub fn to_pell(ctx: GapContext, x: &BigInt, y: &BigInt, source: PellSource) -> PellPoint {
    match source {
        PellSource::Balancing => PellPoint {
            y: y.clone(),
            z: 2 * x + 1 - BigInt::from(ctx.k),
            sign: 1,
        },
        PellSource::Balancer => PellPoint {
            y: y.clone(),
            z: 2 * x + BigInt::from(ctx.k),
            sign: -1,
        },
    }
}

/// The `(g_k, r_k)` representation: the gap median for odd `k`, the sum of
/// the two gap-edge survivors for even `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianForm {
    pub g: BigInt,
    pub r: BigInt,
}

/// Converts `(B, r)` to the median/edge-sum representation. For odd `k`
/// the gap is the k consecutive integers ending at `B`, so its median is
/// `B - (k-1)/2`; the defining summation pins this offset.
pub fn to_median_form(ctx: GapContext, b: &BigInt, r: &BigInt) -> MedianForm {
    let k = ctx.k as i128;
    if ctx.k % 2 == 1 {
        MedianForm {
            g: b - BigInt::from((k - 1) / 2),
            r: r + BigInt::from((k - 1) / 2),
        }
    } else {
        MedianForm {
            g: 2 * (b - BigInt::from(k / 2)) + 1,
            r: r + BigInt::from(k / 2),
        }
    }
}

/// Inverse of [`to_median_form`]. For even `k` the median-form value must
/// be odd.
pub fn from_median_form(ctx: GapContext, form: &MedianForm) -> Result<(BigInt, BigInt)> {
    let k = ctx.k as i128;
    if ctx.k % 2 == 1 {
        Ok((
            &form.g + BigInt::from((k - 1) / 2),
            &form.r - BigInt::from((k - 1) / 2),
        ))
    } else {
        let g_minus_1 = &form.g - 1;
        let n = half_exact(&g_minus_1)
            .map_err(|_| Error::Domain(format!("g = {} must be odd for even k", form.g)))?;
        Ok((n + BigInt::from(k / 2), &form.r - BigInt::from(k / 2)))
    }
}

/// Lower-gap value `L = B - k`, the smallest index on the left of the
/// triangular identity.
pub fn lower_of(ctx: GapContext, b: &BigInt) -> BigInt {
    b - BigInt::from(ctx.k)
}
