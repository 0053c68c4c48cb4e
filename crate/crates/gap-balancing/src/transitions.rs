//! Affine transition maps carrying the i-th term of one class to the
//! i-th term of another, plus the conjugate-symmetry check.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::Rational;
use crate::classes::{conjugate_seed, BalancerClass, BalancingClass};
use crate::pairs::GapContext;
use crate::{Error, Result};

/// Which pair of defining equations the map acts on. The second
/// component's constant offset differs between the two kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Balancing,
    Balancer,
}

/// The map `(x, y) -> (a x + b y + c, 8b x + a y + offset2)` with
/// `offset2 = (4 - 4k) b` for balancing pairs and `4k b` for balancer
/// pairs. Coefficients are reduced rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMap {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub kind: MapKind,
    pub ctx: GapContext,
    pub source_class: usize,
    pub target_class: usize,
    /// Index shift applied to the target class (0 for plain transitions).
    pub target_offset: usize,
}

/// Result of applying a transition map to a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Integral(BigInt, BigInt),
    NonIntegral,
}

impl TransitionMap {
    fn offset2(&self) -> Rational {
        let k = self.ctx.k as i64;
        match self.kind {
            MapKind::Balancing => Rational::from(BigInt::from(4 - 4 * k)) * &self.b,
            MapKind::Balancer => Rational::from(BigInt::from(4 * k)) * &self.b,
        }
    }

    /// Exact image of a point, or the non-integral marker. Never rounds.
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> Evaluation {
        let xq = Rational::from(x.clone());
        let yq = Rational::from(y.clone());
        let first = &self.a * &xq + &self.b * &yq + &self.c;
        let second = Rational::from(BigInt::from(8)) * &self.b * &xq
            + &self.a * &yq
            + self.offset2();
        if first.is_integer() && second.is_integer() {
            Evaluation::Integral(first.to_integer(), second.to_integer())
        } else {
            Evaluation::NonIntegral
        }
    }

    /// First component only, as Table-2 style data.
    pub fn evaluate_first(&self, x: &BigInt, y: &BigInt) -> Option<BigInt> {
        let v = &self.a * Rational::from(x.clone())
            + &self.b * Rational::from(y.clone())
            + &self.c;
        v.is_integer().then(|| v.to_integer())
    }

    pub fn coefficients(&self) -> (&Rational, &Rational, &Rational) {
        (&self.a, &self.b, &self.c)
    }
}

fn rational(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// Transition between two balancing classes of the same gap size. The
/// target may be advanced by `target_offset` indices (the "shifted class"
/// construction). Coefficients come from the closed forms in terms of the
/// initial pairs; the map is verified on the first three indices.
pub fn derive_transition(
    src: &mut BalancingClass,
    dst: &mut BalancingClass,
    target_offset: usize,
) -> Result<TransitionMap> {
    let ctx = src.ctx;
    if dst.ctx != ctx {
        return Err(Error::Domain("classes have different gap sizes".into()));
    }
    let (b0, c0) = {
        let p = src.term(0);
        (p.b.clone(), p.c.clone())
    };
    let (b0p, c0p) = {
        let p = dst.term(target_offset);
        (p.b.clone(), p.c.clone())
    };
    let k = BigInt::from(ctx.k as i64);
    let n = BigInt::from(ctx.pell_constant());
    let one_minus_k = BigInt::one() - &k;
    let odd_square = ctx.odd_square();

    let a_num: BigInt =
        8 * &b0 * &b0p + 4 * &one_minus_k * (&b0 + &b0p) + &odd_square - &c0 * &c0p - &n;
    let a = rational(-a_num, n.clone());
    let b = rational(
        2 * (&c0 * &b0p - &b0 * &c0p) + &one_minus_k * (&c0 - &c0p),
        2 * &n,
    );
    let c = rational(
        &one_minus_k
            * (8 * &b0 * (&b0 - &b0p) + 4 * &one_minus_k * (&b0 - &b0p) - &c0 * (&c0 - &c0p)),
        2 * &n,
    );

    let map = TransitionMap {
        a,
        b,
        c,
        kind: MapKind::Balancing,
        ctx,
        source_class: src.class_index,
        target_class: dst.class_index,
        target_offset,
    };
    for i in 0..3 {
        let (x, y) = {
            let p = src.term(i);
            (p.b.clone(), p.c.clone())
        };
        let expect = dst.term(i + target_offset).clone();
        match map.evaluate(&x, &y) {
            Evaluation::Integral(u, v) if u == expect.b && v == expect.c => {}
            other => {
                return Err(Error::Invariant(format!(
                    "transition verification failed at i = {i}: got {other:?}, want ({}, {})",
                    expect.b, expect.c
                )))
            }
        }
    }
    Ok(map)
}

/// Transition between two balancer classes, from their initial pairs.
pub fn derive_balancer_transition(
    src: &BalancerClass,
    dst: &BalancerClass,
    target_offset: usize,
) -> Result<TransitionMap> {
    let ctx = src.ctx;
    if dst.ctx != ctx {
        return Err(Error::Domain("classes have different gap sizes".into()));
    }
    if src.terms.len() < 3 || dst.terms.len() < 3 + target_offset {
        return Err(Error::Domain(
            "balancer classes must be materialized to three terms".into(),
        ));
    }
    let (r0, rh0) = (&src.terms[0].r, &src.terms[0].r_hat);
    let (r0p, rh0p) = (
        &dst.terms[target_offset].r,
        &dst.terms[target_offset].r_hat,
    );
    let k = BigInt::from(ctx.k);
    let n = BigInt::from(ctx.pell_constant());
    let two_k_sq = &n + BigInt::one();

    let a = rational(
        8 * r0 * r0p + 4 * &k * (r0 + r0p) + &two_k_sq - rh0 * rh0p,
        n.clone(),
    );
    let b = rational(2 * (r0 * rh0p - rh0 * r0p) + &k * (rh0p - rh0), 2 * &n);
    let c = rational(
        &k * (8 * r0 * (r0p - r0) + 4 * &k * (r0p - r0) + rh0 * (rh0 - rh0p)),
        2 * &n,
    );

    let map = TransitionMap {
        a,
        b,
        c,
        kind: MapKind::Balancer,
        ctx,
        source_class: src.class_index,
        target_class: dst.class_index,
        target_offset,
    };
    for i in 0..3 {
        let p = &src.terms[i];
        let expect = &dst.terms[i + target_offset];
        match map.evaluate(&p.r, &p.r_hat) {
            Evaluation::Integral(u, v) if u == expect.r && v == expect.r_hat => {}
            other => {
                return Err(Error::Invariant(format!(
                    "balancer transition verification failed at i = {i}: got {other:?}"
                )))
            }
        }
    }
    Ok(map)
}

/// One verified equality of the conjugate-symmetry check.
#[derive(Debug, Clone)]
pub struct SymmetryEntry {
    pub source: usize,
    pub target: usize,
    pub conj_source: usize,
    pub conj_target: usize,
    pub balancing_equal: bool,
    pub balancer_equal: bool,
}

/// Index of the conjugate class of each class, via seed conjugation.
pub fn conjugate_class_indices(classes: &[BalancingClass]) -> Vec<usize> {
    classes
        .iter()
        .map(|c| match &c.seed {
            None => 0,
            Some(seed) => {
                let conj = conjugate_seed(seed);
                classes
                    .iter()
                    .position(|d| d.seed.as_ref() == Some(&conj))
                    .expect("conjugate seed missing from the seed set")
            }
        })
        .collect()
}

/// Checks that the map P -> Q equals the map conj(Q) -> conj(P), for
/// every ordered pair of distinct classes, on both the balancing and
/// balancer sides.
pub fn check_conjugate_symmetry(ctx: GapContext) -> Result<Vec<SymmetryEntry>> {
    let mut classes = crate::classes::classes_for(ctx)?;
    let conj = conjugate_class_indices(&classes);
    let n = classes.len();
    let mut balancer_classes = Vec::with_capacity(n);
    for class in classes.iter_mut() {
        balancer_classes.push(class.balancer_class(3)?);
    }
    let mut report = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            let forward = {
                let [src, dst] = distinct_pair(&mut classes, p, q);
                derive_transition(src, dst, 0)?
            };
            let mirrored = {
                let [src, dst] = distinct_pair(&mut classes, conj[q], conj[p]);
                derive_transition(src, dst, 0)?
            };
            let forward_bal =
                derive_balancer_transition(&balancer_classes[p], &balancer_classes[q], 0)?;
            let mirrored_bal = derive_balancer_transition(
                &balancer_classes[conj[q]],
                &balancer_classes[conj[p]],
                0,
            )?;
            let entry = SymmetryEntry {
                source: p,
                target: q,
                conj_source: conj[q],
                conj_target: conj[p],
                balancing_equal: forward.coefficients() == mirrored.coefficients(),
                balancer_equal: forward_bal.coefficients() == mirrored_bal.coefficients(),
            };
            if !entry.balancing_equal || !entry.balancer_equal {
                return Err(Error::Invariant(format!(
                    "conjugate symmetry violated for classes {p} -> {q} at k = {}",
                    ctx.k
                )));
            }
            report.push(entry);
        }
    }
    Ok(report)
}

/// Mutable references to two distinct slice elements, in call order.
fn distinct_pair<T>(slice: &mut [T], i: usize, j: usize) -> [&mut T; 2] {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = slice.split_at_mut(j);
        [&mut lo[i], &mut hi[0]]
    } else {
        let (lo, hi) = slice.split_at_mut(i);
        [&mut hi[0], &mut lo[j]]
    }
}

/// Renders a reduced rational the way the displayed fractions read,
/// e.g. `27/23`, `-16/23`, `1`, `0`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::classes_for;
    use num_traits::Zero;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(big(n), big(d))
    }

    fn k9_classes() -> Vec<BalancingClass> {
        classes_for(GapContext::new(9)).unwrap()
    }

    #[test]
    fn balancing_coefficients_k9() {
        let mut classes = k9_classes();

        let t1 = {
            let [a, b] = distinct_pair(&mut classes, 0, 1);
            derive_transition(a, b, 0).unwrap()
        };
        assert_eq!(t1.coefficients(), (&q(27, 23), &q(5, 23), &q(-16, 23)));

        let t2 = {
            let [b, c] = distinct_pair(&mut classes, 1, 2);
            derive_transition(b, c, 0).unwrap()
        };
        assert_eq!(t2.coefficients(), (&q(177, 161), &q(26, 161), &q(-64, 161)));

        // class d to class a advanced one index
        let t4 = {
            let [d, a] = distinct_pair(&mut classes, 3, 0);
            derive_transition(d, a, 1).unwrap()
        };
        assert_eq!(t4.coefficients(), (&q(163, 161), &q(9, 161), &q(-8, 161)));
    }

    #[test]
    fn balancer_coefficients_k9() {
        let mut classes = k9_classes();
        let bal: Vec<BalancerClass> = classes
            .iter_mut()
            .map(|c| c.balancer_class(4).unwrap())
            .collect();

        let t1 = derive_balancer_transition(&bal[0], &bal[1], 0).unwrap();
        assert_eq!(t1.coefficients(), (&q(27, 23), &q(5, 23), &q(18, 23)));

        let t2 = derive_balancer_transition(&bal[1], &bal[2], 0).unwrap();
        assert_eq!(t2.coefficients(), (&q(177, 161), &q(26, 161), &q(72, 161)));

        let t4 = derive_balancer_transition(&bal[3], &bal[0], 1).unwrap();
        assert_eq!(t4.coefficients(), (&q(163, 161), &q(9, 161), &q(9, 161)));
    }

    #[test]
    fn evaluation_markers() {
        let mut classes = k9_classes();
        let t1 = {
            let [a, b] = distinct_pair(&mut classes, 0, 1);
            derive_transition(a, b, 0).unwrap()
        };
        assert_eq!(t1.evaluate_first(&big(9), &big(19)), Some(big(14)));
        assert_eq!(t1.evaluate_first(&big(14), &big(31)), None);
        assert_eq!(t1.evaluate(&big(14), &big(31)), Evaluation::NonIntegral);

        let t4 = {
            let [d, a] = distinct_pair(&mut classes, 3, 0);
            derive_transition(d, a, 1).unwrap()
        };
        assert_eq!(t4.evaluate_first(&big(33), &big(83)), Some(big(38)));
    }

    #[test]
    fn identity_map_for_same_class() {
        // deriving against the class itself gives (1, 0, 0)
        let mut classes = k9_classes();
        let mut copy = classes[0].clone();
        let map = derive_transition(&mut classes[0], &mut copy, 0).unwrap();
        assert_eq!(
            map.coefficients(),
            (&q(1, 1), &q(0, 1), &q(0, 1))
        );
    }

    /// Cramer's-rule oracle: solve the 3x3 system on terms 0..3 directly.
    fn cramer_coefficients(
        src: &mut BalancingClass,
        dst: &mut BalancingClass,
        offset: usize,
    ) -> (Rational, Rational, Rational) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..3 {
            let p = src.term(i).clone();
            rows.push([
                Rational::from(p.b.clone()),
                Rational::from(p.c.clone()),
                Rational::from(BigInt::one()),
            ]);
            rhs.push(Rational::from(dst.term(i + offset).b.clone()));
        }
        let det3 = |m: &[[Rational; 3]; 3]| -> Rational {
            &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
                - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
        };
        let m: [[Rational; 3]; 3] = [rows[0].clone(), rows[1].clone(), rows[2].clone()];
        let d = det3(&m);
        let mut out = Vec::new();
        for col in 0..3 {
            let mut mc = m.clone();
            for row in 0..3 {
                mc[row][col] = rhs[row].clone();
            }
            out.push(det3(&mc) / &d);
        }
        (out[0].clone(), out[1].clone(), out[2].clone())
    }

    #[test]
    fn closed_form_agrees_with_cramer() {
        for k in [2u64, 5, 9, 44] {
            let mut classes = classes_for(GapContext::new(k)).unwrap();
            let n = classes.len();
            for p in 0..n {
                for qi in 0..n {
                    if p == qi {
                        continue;
                    }
                    let (map, oracle) = {
                        let [src, dst] = distinct_pair(&mut classes, p, qi);
                        let map = derive_transition(src, dst, 0).unwrap();
                        let oracle = cramer_coefficients(src, dst, 0);
                        (map, oracle)
                    };
                    assert_eq!(
                        (map.a.clone(), map.b.clone(), map.c.clone()),
                        oracle,
                        "k = {k}, {p} -> {qi}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_on_twenty_terms() {
        let mut classes = k9_classes();
        let t2 = {
            let [b, c] = distinct_pair(&mut classes, 1, 2);
            derive_transition(b, c, 0).unwrap()
        };
        for i in 0..20 {
            let (x, y, want_b, want_c) = {
                let src = classes[1].term(i).clone();
                let dst = classes[2].term(i).clone();
                (src.b, src.c, dst.b, dst.c)
            };
            assert_eq!(t2.evaluate(&x, &y), Evaluation::Integral(want_b, want_c));
        }
    }

    #[test]
    fn denominators_divide_twice_pell_constant() {
        for k in [2u64, 5, 9, 37, 44] {
            let ctx = GapContext::new(k);
            let mut classes = classes_for(ctx).unwrap();
            let bound = BigInt::from(2 * ctx.pell_constant().abs());
            let n = classes.len();
            for p in 0..n {
                for qi in 0..n {
                    if p == qi {
                        continue;
                    }
                    let [src, dst] = distinct_pair(&mut classes, p, qi);
                    let map = derive_transition(src, dst, 0).unwrap();
                    for coeff in [&map.a, &map.b, &map.c] {
                        assert!(
                            (&bound % coeff.denom()).is_zero(),
                            "k = {k}: denominator {} does not divide {bound}",
                            coeff.denom()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_symmetry_k9_and_k2() {
        let report = check_conjugate_symmetry(GapContext::new(9)).unwrap();
        assert_eq!(report.len(), 12);
        // t1 (a -> b) pairs with t3 (c -> d): conj(a) = d, conj(b) = c
        let entry = report
            .iter()
            .find(|e| e.source == 0 && e.target == 1)
            .unwrap();
        assert_eq!((entry.conj_source, entry.conj_target), (2, 3));

        let report = check_conjugate_symmetry(GapContext::new(2)).unwrap();
        assert_eq!(report.len(), 2);
    }

    #[test]
    fn t1_equals_t3_k9() {
        let mut classes = k9_classes();
        let t1 = {
            let [a, b] = distinct_pair(&mut classes, 0, 1);
            derive_transition(a, b, 0).unwrap()
        };
        let t3 = {
            let [c, d] = distinct_pair(&mut classes, 2, 3);
            derive_transition(c, d, 0).unwrap()
        };
        assert_eq!(t1.coefficients(), t3.coefficients());

        let bal: Vec<BalancerClass> = classes
            .iter_mut()
            .map(|c| c.balancer_class(3).unwrap())
            .collect();
        let cap_t1 = derive_balancer_transition(&bal[0], &bal[1], 0).unwrap();
        let cap_t3 = derive_balancer_transition(&bal[2], &bal[3], 0).unwrap();
        assert_eq!(cap_t1.coefficients(), cap_t3.coefficients());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_rational(&q(27, 23)), "27/23");
        assert_eq!(format_rational(&q(-16, 23)), "-16/23");
        assert_eq!(format_rational(&q(3, 1)), "3");
    }
}
