//! Rational generating functions per class and the interleaved
//! generating function over all classes, with exact series expansion.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::classes::BalancingClass;
use crate::pairs::GapContext;
use crate::{Error, Result};

/// Dense integer-coefficient polynomial, ascending powers. The trailing
/// coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn from_coeffs<I: Into<BigInt>, T: IntoIterator<Item = I>>(coeffs: T) -> Self {
        let mut p = Poly(coeffs.into_iter().map(Into::into).collect());
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.0.last().map_or(false, Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    /// Substitute `s -> s^n`.
    pub fn stretch(&self, n: usize) -> Poly {
        let mut out = vec![BigInt::zero(); self.0.len().saturating_sub(1) * n + 1];
        for (i, a) in self.0.iter().enumerate() {
            out[i * n] = a.clone();
        }
        Poly::from_coeffs(out)
    }

    /// Multiply by `s^j`.
    pub fn shift(&self, j: usize) -> Poly {
        if self.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); j];
        out.extend(self.0.iter().cloned());
        Poly(out)
    }
}

/// Quotient of integer polynomials. The denominators produced here have
/// constant term ±1, so series coefficients stay integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RationalFunction {
    /// Equality as rational functions: cross-multiplied polynomial identity.
    pub fn equivalent(&self, other: &RationalFunction) -> bool {
        self.numerator.mul(&other.denominator) == other.numerator.mul(&self.denominator)
    }

    /// First `n` Taylor coefficients via the linear division recurrence.
    pub fn expand(&self, n: usize) -> Result<Vec<BigInt>> {
        let d0 = self.denominator.coeff(0);
        if d0 != BigInt::one() && d0 != -BigInt::one() {
            return Err(Error::Unsupported(format!(
                "denominator constant term {d0} is not ±1"
            )));
        }
        let mut out: Vec<BigInt> = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = self.numerator.coeff(j);
            for i in 1..=j {
                acc -= self.denominator.coeff(i) * &out[j - i];
            }
            // d0 = ±1, division exact
            out.push(acc / &d0);
        }
        Ok(out)
    }
}

/// `(1 - s)(1 - 6s + s^2) = 1 - 7s + 7s^2 - s^3`, the common class
/// denominator.
pub fn class_denominator() -> Poly {
    Poly::from_coeffs([1, -7, 7, -1])
}

/// Generating function of a class's balancing numbers:
/// `((2 - 2k - B1 + 6 B0)s^2 + (B1 - 7 B0)s + B0) / ((1-s)(1-6s+s^2))`.
pub fn class_genfun(class: &mut BalancingClass) -> RationalFunction {
    let k = class.ctx.k as i64;
    let b0 = class.term(0).b.clone();
    let b1 = class.term(1).b.clone();
    let numerator = Poly::from_coeffs([
        b0.clone(),
        &b1 - 7 * &b0,
        BigInt::from(2 - 2 * k) - &b1 + 6 * &b0,
    ]);
    RationalFunction {
        numerator,
        denominator: class_denominator(),
    }
}

/// Combined generating function `G(s) = sum_i s^(i-1) G_i(s^n)` whose
/// series lists all upper k-gap balancing numbers ascending (classes are
/// indexed by ascending initial term and interleave in sorted order).
pub fn interleaved_genfun(ctx: GapContext) -> Result<RationalFunction> {
    let mut classes = crate::classes::classes_for(ctx)?;
    let n = classes.len();
    let denominator = class_denominator().stretch(n);
    let mut numerator = Poly::zero();
    for (i, class) in classes.iter_mut().enumerate() {
        let g = class_genfun(class);
        numerator = numerator.add(&g.numerator.stretch(n).shift(i));
    }
    Ok(RationalFunction {
        numerator,
        denominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::classes_for;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn k9_classes() -> Vec<BalancingClass> {
        classes_for(GapContext::new(9)).unwrap()
    }

    #[test]
    fn genfun_k9_numerators() {
        let mut classes = k9_classes();
        // G1 = (-25s + 9)/..., the s^2 coefficient vanishes
        let g1 = class_genfun(&mut classes[0]);
        assert_eq!(g1.numerator, Poly::from_coeffs([9, -25]));
        let g2 = class_genfun(&mut classes[1]);
        assert_eq!(g2.numerator, Poly::from_coeffs([14, -33, 3]));
        let g3 = class_genfun(&mut classes[2]);
        assert_eq!(g3.numerator, Poly::from_coeffs([20, -41, 5]));
        let g4 = class_genfun(&mut classes[3]);
        assert_eq!(g4.numerator, Poly::from_coeffs([33, -57, 8]));
    }

    #[test]
    fn genfun_k0() {
        let mut classes = classes_for(GapContext::new(0)).unwrap();
        let g = class_genfun(&mut classes[0]);
        assert_eq!(g.numerator, Poly::from_coeffs([0, 2]));
        assert_eq!(g.expand(4).unwrap(), vec![big(0), big(2), big(14), big(84)]);
    }

    #[test]
    fn expand_examples() {
        let g = RationalFunction {
            numerator: Poly::from_coeffs([9, -25]),
            denominator: class_denominator(),
        };
        assert_eq!(
            g.expand(4).unwrap(),
            vec![big(9), big(38), big(203), big(1164)]
        );
        let geom = RationalFunction {
            numerator: Poly::from_coeffs([1]),
            denominator: Poly::from_coeffs([1, -1]),
        };
        assert_eq!(geom.expand(3).unwrap(), vec![big(1), big(1), big(1)]);
        let mut classes = k9_classes();
        let g2 = class_genfun(&mut classes[1]);
        assert_eq!(g2.expand(3).unwrap(), vec![big(14), big(65), big(360)]);
    }

    #[test]
    fn expand_rejects_nonunit_constant() {
        let g = RationalFunction {
            numerator: Poly::from_coeffs([1]),
            denominator: Poly::from_coeffs([2, 1]),
        };
        assert!(g.expand(3).is_err());
    }

    #[test]
    fn class_expansion_matches_terms() {
        for k in [0u64, 1, 2, 5, 9, 44] {
            for mut class in classes_for(GapContext::new(k)).unwrap() {
                let g = class_genfun(&mut class);
                let coeffs = g.expand(20).unwrap();
                for (i, c) in coeffs.iter().enumerate() {
                    assert_eq!(c, &class.term(i).b, "k = {k}, i = {i}");
                }
            }
        }
    }

    #[test]
    fn interleaved_k9_series() {
        let g = interleaved_genfun(GapContext::new(9)).unwrap();
        assert_eq!(
            g.expand(9).unwrap(),
            [9, 14, 20, 33, 38, 65, 99, 174, 203].map(big).to_vec()
        );
    }

    #[test]
    fn interleaved_k9_closed_form() {
        // printed form: (-8s^8 + 3s^7 + 2s^6 + 3s^5 + 49s^4 - 13s^3
        //               - 6s^2 - 5s - 9) / ((s - 1)(s^8 - 6s^4 + 1))
        let printed = RationalFunction {
            numerator: Poly::from_coeffs([-9, -5, -6, -13, 49, 3, 2, 3, -8]),
            denominator: Poly::from_coeffs([-1, 1]).mul(&Poly::from_coeffs(
                [1, 0, 0, 0, -6, 0, 0, 0, 1],
            )),
        };
        let ours = interleaved_genfun(GapContext::new(9)).unwrap();
        assert!(ours.equivalent(&printed));
    }

    #[test]
    fn interleaved_single_class_collapses() {
        let mut classes = classes_for(GapContext::new(1)).unwrap();
        let g1 = class_genfun(&mut classes[0]);
        let combined = interleaved_genfun(GapContext::new(1)).unwrap();
        assert!(combined.equivalent(&g1));
        assert_eq!(
            combined.expand(4).unwrap(),
            [1, 6, 35, 204].map(big).to_vec()
        );
    }

    #[test]
    fn interleaved_is_ascending_merge() {
        for k in [2u64, 5, 9, 13] {
            let ctx = GapContext::new(k);
            let mut classes = classes_for(ctx).unwrap();
            let n = classes.len();
            let g = interleaved_genfun(ctx).unwrap();
            let coeffs = g.expand(5 * n).unwrap();
            let mut merged = Vec::new();
            for i in 0..5 {
                for class in classes.iter_mut() {
                    merged.push(class.term(i).b.clone());
                }
            }
            assert_eq!(coeffs, merged, "k = {k}");
            let mut sorted = merged.clone();
            sorted.sort();
            assert_eq!(merged, sorted, "k = {k} interleave not ascending");
        }
    }
}
