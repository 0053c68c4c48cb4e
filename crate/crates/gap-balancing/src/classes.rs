//! Class structure: seeds, forward/inverse step maps, class enumeration,
//! conjugation, and tandem balancer classes.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::is_perfect_square;
use crate::pairs::{balancer_of, BalancerPair, BalancingPair, GapContext};
use crate::{Error, Result};

/// The canonical pre-initial solution `(x, y)` of a class, with
/// `0 <= x < k` and `y > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub x: BigInt,
    pub y: BigInt,
    pub ctx: GapContext,
}

impl Seed {
    pub fn new(ctx: GapContext, x: BigInt, y: BigInt) -> Result<Self> {
        let k = BigInt::from(ctx.k);
        if x < BigInt::zero() || x >= k || y <= BigInt::zero() {
            return Err(Error::Domain(format!(
                "({x}, {y}) outside the seed window for k = {}",
                ctx.k
            )));
        }
        if &y * &y != ctx.balancing_radicand(&x) {
            return Err(Error::Invariant(format!(
                "({x}, {y}) does not solve the balancing-pair equation for k = {}",
                ctx.k
            )));
        }
        Ok(Seed { x, y, ctx })
    }

    /// Whether this seed is its own conjugate (`x = (k-1)/2`).
    pub fn is_ambiguous(&self) -> bool {
        2 * &self.x == BigInt::from(self.ctx.k as i64 - 1)
    }
}

/// One step forward: `(x, y) -> (3x + y + 1 - k, 8x + 3y + 4 - 4k)`.
pub fn step_balancing(ctx: GapContext, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let k = BigInt::from(ctx.k);
    (3 * x + y + 1 - &k, 8 * x + 3 * y + 4 - 4 * &k)
}

/// One step back: `(x, y) -> (3x - y + 1 - k, -8x + 3y + 4k - 4)`.
pub fn step_balancing_inverse(ctx: GapContext, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let k = BigInt::from(ctx.k);
    (3 * x - y + 1 - &k, -8 * x + 3 * y + 4 * &k - 4)
}

/// One step forward on balancer pairs: `(3x + y + k, 8x + 3y + 4k)`.
pub fn step_balancer(ctx: GapContext, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let k = BigInt::from(ctx.k);
    (3 * x + y + &k, 8 * x + 3 * y + 4 * &k)
}

/// One step back on balancer pairs: `(3x - y + k, -8x + 3y - 4k)`.
pub fn step_balancer_inverse(ctx: GapContext, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let k = BigInt::from(ctx.k);
    (3 * x - y + &k, -8 * x + 3 * y - 4 * &k)
}

/// Conjugate seed `(k - 1 - x, y)`; an involution on the seed set.
pub fn conjugate_seed(seed: &Seed) -> Seed {
    Seed {
        x: BigInt::from(seed.ctx.k as i64 - 1) - &seed.x,
        y: seed.y.clone(),
        ctx: seed.ctx,
    }
}

/// All seeds for `k > 0`, ascending in `x`. Scans the lower half
/// `x in [0, (k-1)/2]` and closes under conjugation.
pub fn enumerate_seeds(ctx: GapContext) -> Result<Vec<Seed>> {
    if ctx.k == 0 {
        return Err(Error::Domain(
            "k = 0 has no seed window; use classes_for".into(),
        ));
    }
    let mut seeds = Vec::new();
    let half = (ctx.k - 1) / 2;
    for x in 0..=half {
        let x = BigInt::from(x);
        if let Some(y) = is_perfect_square(&ctx.balancing_radicand(&x)) {
            let seed = Seed::new(ctx, x, y)?;
            let conj = conjugate_seed(&seed);
            if conj.x != seed.x {
                seeds.push(conj);
            }
            seeds.push(seed);
        }
    }
    seeds.sort_by(|a, b| a.x.cmp(&b.x));
    Ok(seeds)
}

/// A class of solutions: the orbit of a seed under the forward step map.
/// Terms with index `>= 0` are balancing pairs; the seed sits at index -1.
/// The term cache extends on demand.
#[derive(Debug, Clone)]
pub struct BalancingClass {
    pub ctx: GapContext,
    pub seed: Option<Seed>,
    pub class_index: usize,
    terms: Vec<BalancingPair>,
}

impl BalancingClass {
    fn from_initial(ctx: GapContext, seed: Option<Seed>, initial: BalancingPair) -> Self {
        BalancingClass {
            ctx,
            seed,
            class_index: 0,
            terms: vec![initial],
        }
    }

    pub fn initial(&self) -> &BalancingPair {
        &self.terms[0]
    }

    /// Term at index `i >= 0`, extending the cache as needed. Every new
    /// term is re-validated against the defining equation.
    pub fn term(&mut self, i: usize) -> &BalancingPair {
        while self.terms.len() <= i {
            let last = self.terms.last().unwrap();
            let (x, y) = step_balancing(self.ctx, &last.b, &last.c);
            let next = BalancingPair::new(self.ctx, x, y)
                .expect("forward step left the solution set");
            self.terms.push(next);
        }
        &self.terms[i]
    }

    /// First `n` terms, cloned.
    pub fn prefix(&mut self, n: usize) -> Vec<BalancingPair> {
        if n > 0 {
            self.term(n - 1);
        }
        self.terms[..n].to_vec()
    }

    /// Tandem balancer class: `i`-th term is `balancer_of` the `i`-th
    /// balancing term.
    pub fn balancer_class(&mut self, n: usize) -> Result<BalancerClass> {
        let mut terms = Vec::with_capacity(n);
        for i in 0..n {
            terms.push(balancer_of(self.term(i))?);
        }
        Ok(BalancerClass {
            ctx: self.ctx,
            class_index: self.class_index,
            terms,
        })
    }
}

/// Balancer pairs running in tandem with a balancing class.
#[derive(Debug, Clone)]
pub struct BalancerClass {
    pub ctx: GapContext,
    pub class_index: usize,
    pub terms: Vec<BalancerPair>,
}

/// All classes for gap size `k`, indexed by ascending initial value `B0`.
/// `k = 0` has the single class generated from `(0, 1)`.
pub fn classes_for(ctx: GapContext) -> Result<Vec<BalancingClass>> {
    let mut classes = if ctx.k == 0 {
        let initial = BalancingPair::new(ctx, BigInt::zero(), BigInt::from(1))?;
        vec![BalancingClass::from_initial(ctx, None, initial)]
    } else {
        enumerate_seeds(ctx)?
            .into_iter()
            .map(|seed| {
                let (b0, c0) = step_balancing(ctx, &seed.x, &seed.y);
                let initial = BalancingPair::new(ctx, b0, c0)?;
                Ok(BalancingClass::from_initial(ctx, Some(seed), initial))
            })
            .collect::<Result<Vec<_>>>()?
    };
    classes.sort_by(|a, b| a.initial().b.cmp(&b.initial().b));
    for (i, class) in classes.iter_mut().enumerate() {
        class.class_index = i;
        let b0 = &class.initial().b;
        debug_assert!(b0 >= &BigInt::from(ctx.k) && b0 < &BigInt::from(4 * ctx.k + 2));
    }
    Ok(classes)
}

/// Number of classes, plus the ambiguity flag (`2k^2 - 1` a perfect
/// square, which forces an odd count).
pub fn class_count(ctx: GapContext) -> Result<(usize, bool)> {
    let ambiguous = is_perfect_square(&BigInt::from(ctx.pell_constant())).is_some();
    let count = if ctx.k == 0 {
        1
    } else {
        enumerate_seeds(ctx)?.len()
    };
    Ok((count, ambiguous))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::is_upper_gap_balancing;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn k9() -> GapContext {
        GapContext::new(9)
    }

    #[test]
    fn forward_step_table2() {
        assert_eq!(step_balancing(k9(), &big(9), &big(19)), (big(38), big(97)));
        assert_eq!(step_balancing(k9(), &big(20), &big(47)), (big(99), big(269)));
        assert_eq!(
            step_balancing(GapContext::new(1), &big(1), &big(3)),
            (big(6), big(17))
        );
    }

    #[test]
    fn inverse_step() {
        assert_eq!(
            step_balancing_inverse(k9(), &big(38), &big(97)),
            (big(9), big(19))
        );
        // one step below the initial pair is the seed
        assert_eq!(
            step_balancing_inverse(k9(), &big(9), &big(19)),
            (big(0), big(17))
        );
        assert_eq!(
            step_balancing_inverse(GapContext::new(0), &big(2), &big(7)),
            (big(0), big(1))
        );
    }

    #[test]
    fn balancer_steps() {
        assert_eq!(step_balancer(k9(), &big(0), &big(1)), (big(10), big(39)));
        assert_eq!(step_balancer(k9(), &big(3), &big(17)), (big(35), big(111)));
        assert_eq!(
            step_balancer_inverse(k9(), &big(10), &big(39)),
            (big(0), big(1))
        );
    }

    #[test]
    fn seeds_k9() {
        let seeds = enumerate_seeds(k9()).unwrap();
        let got: Vec<(i64, i64)> = seeds
            .iter()
            .map(|s| {
                (
                    i64::try_from(&s.x).unwrap(),
                    i64::try_from(&s.y).unwrap(),
                )
            })
            .collect();
        assert_eq!(got, vec![(0, 17), (3, 13), (5, 13), (8, 17)]);
    }

    #[test]
    fn seeds_small_k() {
        let got: Vec<(i64, i64)> = enumerate_seeds(GapContext::new(2))
            .unwrap()
            .iter()
            .map(|s| (i64::try_from(&s.x).unwrap(), i64::try_from(&s.y).unwrap()))
            .collect();
        assert_eq!(got, vec![(0, 3), (1, 3)]);

        let got: Vec<(i64, i64)> = enumerate_seeds(GapContext::new(5))
            .unwrap()
            .iter()
            .map(|s| (i64::try_from(&s.x).unwrap(), i64::try_from(&s.y).unwrap()))
            .collect();
        assert_eq!(got, vec![(0, 9), (2, 7), (4, 9)]);

        assert!(enumerate_seeds(GapContext::new(0)).is_err());
    }

    /// Exhaustive seed scan over the full window, without the mirror
    /// shortcut — the independent oracle for `enumerate_seeds`.
    fn seeds_brute(ctx: GapContext) -> Vec<(BigInt, BigInt)> {
        (0..ctx.k)
            .filter_map(|x| {
                let x = BigInt::from(x);
                is_perfect_square(&ctx.balancing_radicand(&x)).map(|y| (x, y))
            })
            .collect()
    }

    #[test]
    fn seed_scan_matches_brute_force() {
        for k in 1..=60u64 {
            let ctx = GapContext::new(k);
            let fast: Vec<(BigInt, BigInt)> = enumerate_seeds(ctx)
                .unwrap()
                .into_iter()
                .map(|s| (s.x, s.y))
                .collect();
            assert_eq!(fast, seeds_brute(ctx), "k = {k}");
        }
    }

    #[test]
    fn classes_k9() {
        let mut classes = classes_for(k9()).unwrap();
        let b0: Vec<i64> = classes
            .iter()
            .map(|c| i64::try_from(&c.initial().b).unwrap())
            .collect();
        assert_eq!(b0, vec![9, 14, 20, 33]);
        let b_class_a: Vec<i64> = classes[0]
            .prefix(3)
            .iter()
            .map(|p| i64::try_from(&p.b).unwrap())
            .collect();
        assert_eq!(b_class_a, vec![9, 38, 203]);
    }

    #[test]
    fn classes_k0_k1() {
        let mut classes = classes_for(GapContext::new(0)).unwrap();
        assert_eq!(classes.len(), 1);
        let b: Vec<i64> = classes[0]
            .prefix(4)
            .iter()
            .map(|p| i64::try_from(&p.b).unwrap())
            .collect();
        assert_eq!(b, vec![0, 2, 14, 84]);

        let mut classes = classes_for(GapContext::new(1)).unwrap();
        assert_eq!(classes.len(), 1);
        let b: Vec<i64> = classes[0]
            .prefix(4)
            .iter()
            .map(|p| i64::try_from(&p.b).unwrap())
            .collect();
        assert_eq!(b, vec![1, 6, 35, 204]);
    }

    #[test]
    fn conjugation() {
        let seeds = enumerate_seeds(k9()).unwrap();
        let conj = conjugate_seed(&seeds[0]);
        assert_eq!((conj.x.clone(), conj.y.clone()), (big(8), big(17)));
        let conj = conjugate_seed(&seeds[1]);
        assert_eq!((conj.x.clone(), conj.y.clone()), (big(5), big(13)));
        // involution
        for s in &seeds {
            assert_eq!(&conjugate_seed(&conjugate_seed(s)), s);
        }
        // ambiguous seed at k = 5
        let seeds = enumerate_seeds(GapContext::new(5)).unwrap();
        assert!(seeds[1].is_ambiguous());
        assert_eq!(conjugate_seed(&seeds[1]), seeds[1]);
    }

    #[test]
    fn counts() {
        assert_eq!(class_count(GapContext::new(2)).unwrap(), (2, false));
        assert_eq!(class_count(GapContext::new(5)).unwrap(), (3, true));
        assert_eq!(class_count(GapContext::new(44)).unwrap(), (6, false));
        assert_eq!(class_count(GapContext::new(0)).unwrap(), (1, false));
    }

    #[test]
    fn tandem_k9() {
        let mut classes = classes_for(k9()).unwrap();
        let bal = classes[2].balancer_class(3).unwrap();
        let got: Vec<(i64, i64)> = bal
            .terms
            .iter()
            .map(|p| (i64::try_from(&p.r).unwrap(), i64::try_from(&p.r_hat).unwrap()))
            .collect();
        assert_eq!(got, vec![(3, 17), (35, 111), (225, 649)]);

        let bal = classes[0].balancer_class(3).unwrap();
        let got: Vec<(i64, i64)> = bal
            .terms
            .iter()
            .map(|p| (i64::try_from(&p.r).unwrap(), i64::try_from(&p.r_hat).unwrap()))
            .collect();
        assert_eq!(got, vec![(0, 1), (10, 39), (78, 233)]);

        // tandem equals iterating the balancer step from term 0
        let mut iterated = vec![bal.terms[0].clone()];
        for _ in 0..2 {
            let last = iterated.last().unwrap();
            let (r, rh) = step_balancer(k9(), &last.r, &last.r_hat);
            iterated.push(BalancerPair::new(k9(), r, rh).unwrap());
        }
        assert_eq!(iterated, bal.terms);
    }

    #[test]
    fn tandem_k0() {
        let mut classes = classes_for(GapContext::new(0)).unwrap();
        let bal = classes[0].balancer_class(4).unwrap();
        let r: Vec<i64> = bal
            .terms
            .iter()
            .map(|p| i64::try_from(&p.r).unwrap())
            .collect();
        // pinned by brute force below (the cobalancers are the balancing
        // numbers 0, 1, 6, 35, ...)
        assert_eq!(r, vec![0, 1, 6, 35]);
        // brute-force cobalancer scan: r >= 0 with 8r^2 + 1 a perfect square
        let ctx = GapContext::new(0);
        let brute: Vec<i64> = (0..100)
            .filter(|&r| is_perfect_square(&ctx.balancer_radicand(&big(r))).is_some())
            .collect();
        assert!(brute.starts_with(&[0, 1]));
        assert_eq!(&brute[..4], &r[..4]);
    }

    #[test]
    fn interleave_order() {
        // max B0 < min B1, so round-robin over classes is globally sorted
        for k in [2u64, 5, 9, 37, 44] {
            let mut classes = classes_for(GapContext::new(k)).unwrap();
            let max_b0 = classes.iter().map(|c| c.initial().b.clone()).max().unwrap();
            let min_b1 = classes.iter_mut().map(|c| c.term(1).b.clone()).min().unwrap();
            assert!(max_b0 < min_b1, "k = {k}");
        }
    }

    #[test]
    fn step_round_trip_and_closure() {
        for k in [0u64, 1, 2, 5, 9, 44] {
            let ctx = GapContext::new(k);
            let mut classes = classes_for(ctx).unwrap();
            for class in &mut classes {
                for i in 0..10 {
                    let p = class.term(i).clone();
                    // constructed terms re-validated already; check round trip
                    let (x, y) = step_balancing(ctx, &p.b, &p.c);
                    let (bx, by) = step_balancing_inverse(ctx, &x, &y);
                    assert_eq!((bx, by), (p.b.clone(), p.c.clone()));
                }
            }
        }
    }

    #[test]
    fn disjoint_classes_cover_brute_force() {
        // Prop. 5 completeness and uniqueness on a small window
        for k in 1..=20u64 {
            let ctx = GapContext::new(k);
            let mut classes = classes_for(ctx).unwrap();
            let limit = big(100_000);
            let mut union: Vec<BigInt> = Vec::new();
            for class in &mut classes {
                let mut i = 0;
                loop {
                    let b = class.term(i).b.clone();
                    if b > limit {
                        break;
                    }
                    union.push(b);
                    i += 1;
                }
            }
            union.sort();
            let before = union.len();
            union.dedup();
            assert_eq!(before, union.len(), "classes overlap at k = {k}");
            let brute: Vec<BigInt> = ((k as i64)..=100_000)
                .map(big)
                .filter(|b| is_upper_gap_balancing(ctx, b).unwrap().is_some())
                .collect();
            assert_eq!(union, brute, "k = {k}");
        }
    }
}
