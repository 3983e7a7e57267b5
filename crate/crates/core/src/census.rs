//! Exhaustive enumeration over `F_p`: smooth curves, orbit representatives,
//! the mass `sum 1/|Aut|`, automorphism strata of `n`-pointed curves, and a
//! check of the classification of marked automorphism groups.
//!
//! Two strategies count strata. [`Strategy::Full`] builds every ordered tuple
//! of distinct affine points and calls [`MarkedCurve::automorphisms`] on it.
//! [`Strategy::Stabilizer`] uses that the automorphism group of
//! `(C, inf, p_2, ..., p_n)` is the intersection of the stabilizers of the
//! `p_i` inside the cyclic group `Aut(C, inf)`, so its order is the gcd of the
//! per-point stabilizer orders; tuple counts per order then follow from
//! falling factorials and Mobius inversion over divisors.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{Curve, CurvePoint};
use crate::field::{Field, FieldElement, FieldError};
use crate::marked::{fixed_points, MarkedCurve};

/// Largest supported number of marked points.
pub const MAX_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("census needs a finite field")]
    InfiniteField,
    #[error("unsupported number of marked points {0} (must be 1..=5)")]
    UnsupportedN(usize),
}

impl From<FieldError> for CensusError {
    fn from(_: FieldError) -> Self {
        CensusError::InfiniteField
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Enumerate every ordered tuple and compute its automorphisms directly.
    Full,
    /// Count tuples per automorphism order from per-point stabilizers.
    Stabilizer,
}

impl Strategy {
    /// Full enumeration for `p <= 7`, stabilizer counting above.
    pub fn default_for(field: Field) -> Strategy {
        if field.characteristic() <= 7 {
            Strategy::Full
        } else {
            Strategy::Stabilizer
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::Stabilizer => "stabilizer",
        }
    }
}

/// All `(a, b)` with nonzero discriminant, in lexicographic order.
pub fn enumerate_smooth(field: Field) -> Result<Vec<Curve>, CensusError> {
    let elements = field.elements()?;
    Ok(elements
        .iter()
        .flat_map(|a| {
            elements
                .iter()
                .map(move |b| Curve::new(a.clone(), b.clone()).expect("same field"))
        })
        .filter(Curve::is_smooth)
        .collect())
}

/// One curve per unit-scaling orbit: the lexicographically least member.
pub fn orbit_representatives(field: Field) -> Result<Vec<Curve>, CensusError> {
    let units = field.units()?;
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for c in enumerate_smooth(field)? {
        if seen.contains(&c) {
            continue;
        }
        for t in &units {
            seen.insert(c.scale(t).expect("unit"));
        }
        reps.push(c);
    }
    Ok(reps)
}

/// `sum 1/|Aut(C, inf)|` over isomorphism classes of one-pointed curves.
pub fn mass(field: Field) -> Result<BigRational, CensusError> {
    let mut total = BigRational::zero();
    for c in orbit_representatives(field)? {
        let m = MarkedCurve::from_parts(c, vec![CurvePoint::Infinity]).expect("smooth");
        total += BigRational::new(BigInt::from(1), BigInt::from(m.automorphisms().order));
    }
    Ok(total)
}

/// Automorphism strata of `n`-pointed curves over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub p: u64,
    pub n: usize,
    pub strategy: Strategy,
    /// Automorphism order to number of ordered tuples `(C, p_1, ..., p_n)`.
    pub strata: BTreeMap<u32, u64>,
    /// Number of isomorphism classes over `F_p`.
    pub iso_classes: u64,
    pub total: u64,
    /// First tuple of each order in enumeration order.
    pub witnesses: BTreeMap<u32, MarkedCurve>,
}

impl CensusReport {
    /// Orders greater than one that occur.
    pub fn nontrivial_orders(&self) -> BTreeSet<u32> {
        self.strata.keys().copied().filter(|&o| o > 1).collect()
    }
}

#[derive(Debug, Default)]
struct Tally {
    strata: BTreeMap<u32, u64>,
    witnesses: BTreeMap<u32, MarkedCurve>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.strata {
            *self.strata.entry(k).or_default() += v;
        }
        for (k, w) in other.witnesses {
            self.witnesses.entry(k).or_insert(w);
        }
        self
    }
}

/// Per-curve data for stabilizer counting.
struct CurveStabilizers {
    curve: Curve,
    /// Order of `Aut(C, inf)`.
    order: u32,
    /// Affine points with the order of their stabilizer in `Aut(C, inf)`.
    points: Vec<(CurvePoint, u32)>,
}

impl CurveStabilizers {
    fn new(curve: Curve) -> CurveStabilizers {
        let base = MarkedCurve::from_parts(curve.clone(), vec![CurvePoint::Infinity]).expect("smooth");
        let aut = base.automorphisms();
        let powers: Vec<FieldElement> = (0..aut.order as i64).map(|k| aut.generator.pow(k)).collect();
        let points = curve
            .points()
            .expect("finite field")
            .into_iter()
            .skip(1)
            .map(|p| {
                let stab = powers.iter().filter(|t| p.scale(t).expect("unit") == p).count() as u32;
                (p, stab)
            })
            .collect();
        CurveStabilizers {
            curve,
            order: aut.order,
            points,
        }
    }

    /// Ordered `(n-1)`-tuples of distinct affine points whose stabilizers all
    /// contain the subgroup of order `d`.
    fn tuples_divisible_by(&self, d: u32, len: usize) -> u64 {
        let avail = self.points.iter().filter(|(_, s)| s % d == 0).count() as u64;
        falling_factorial(avail, len)
    }

    /// Tuple counts keyed by exact automorphism order.
    fn strata(&self, len: usize) -> BTreeMap<u32, u64> {
        let divisors: Vec<u32> = (1..=self.order).filter(|d| self.order.is_multiple_of(*d)).collect();
        let mut out = BTreeMap::new();
        for &e in &divisors {
            let count: i128 = divisors
                .iter()
                .filter(|&&d| d % e == 0)
                .map(|&d| mobius(d / e) as i128 * self.tuples_divisible_by(d, len) as i128)
                .sum();
            if count > 0 {
                out.insert(e, count as u64);
            }
        }
        out
    }

    /// Lexicographically first tuple whose stabilizer gcd is exactly `e`.
    fn first_tuple(&self, e: u32, len: usize) -> Option<Vec<CurvePoint>> {
        fn go(cs: &CurveStabilizers, e: u32, len: usize, acc: &mut Vec<usize>, g: u32) -> bool {
            if acc.len() == len {
                return g == e;
            }
            for i in 0..cs.points.len() {
                if acc.contains(&i) {
                    continue;
                }
                let ng = g.gcd(&cs.points[i].1);
                if !ng.is_multiple_of(e) {
                    continue;
                }
                acc.push(i);
                if go(cs, e, len, acc, ng) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        let mut acc = Vec::new();
        go(self, e, len, &mut acc, self.order).then(|| acc.iter().map(|&i| self.points[i].0.clone()).collect())
    }

    /// Every tuple whose automorphism order is exactly `e`.
    fn members(&self, e: u32, len: usize) -> Vec<Vec<CurvePoint>> {
        let eligible: Vec<usize> = (0..self.points.len())
            .filter(|&i| self.points[i].1.is_multiple_of(e))
            .collect();
        let mut out = Vec::new();
        let mut acc = Vec::new();
        self.collect(&eligible, e, len, &mut acc, self.order, &mut out);
        out
    }

    fn collect(
        &self,
        eligible: &[usize],
        e: u32,
        len: usize,
        acc: &mut Vec<usize>,
        g: u32,
        out: &mut Vec<Vec<CurvePoint>>,
    ) {
        if acc.len() == len {
            if g == e {
                out.push(acc.iter().map(|&i| self.points[i].0.clone()).collect());
            }
            return;
        }
        for &i in eligible {
            if acc.contains(&i) {
                continue;
            }
            acc.push(i);
            self.collect(eligible, e, len, acc, g.gcd(&self.points[i].1), out);
            acc.pop();
        }
    }

    fn marked(&self, tuple: Vec<CurvePoint>) -> MarkedCurve {
        let mut points = vec![CurvePoint::Infinity];
        points.extend(tuple);
        MarkedCurve::from_parts(self.curve.clone(), points).expect("distinct points on a smooth curve")
    }
}

fn falling_factorial(n: u64, k: usize) -> u64 {
    (0..k as u64).map(|i| n.saturating_sub(i)).product()
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn full_tally(curve: &Curve, len: usize) -> Tally {
    let affine: Vec<CurvePoint> = curve.points().expect("finite field").into_iter().skip(1).collect();
    let mut tally = Tally::default();
    let mut acc: Vec<usize> = Vec::with_capacity(len);
    fn go(curve: &Curve, affine: &[CurvePoint], len: usize, acc: &mut Vec<usize>, tally: &mut Tally) {
        if acc.len() == len {
            let mut points = vec![CurvePoint::Infinity];
            points.extend(acc.iter().map(|&i| affine[i].clone()));
            let m = MarkedCurve::from_parts(curve.clone(), points).expect("distinct points on a smooth curve");
            let order = m.automorphisms().order;
            *tally.strata.entry(order).or_default() += 1;
            tally.witnesses.entry(order).or_insert(m);
            return;
        }
        for i in 0..affine.len() {
            if !acc.contains(&i) {
                acc.push(i);
                go(curve, affine, len, acc, tally);
                acc.pop();
            }
        }
    }
    go(curve, &affine, len, &mut acc, &mut tally);
    tally
}

fn stabilizer_tally(curve: &Curve, len: usize) -> Tally {
    let cs = CurveStabilizers::new(curve.clone());
    let strata = cs.strata(len);
    let witnesses = strata
        .keys()
        .map(|&e| {
            let tuple = cs.first_tuple(e, len).expect("nonzero stratum has a member");
            (e, cs.marked(tuple))
        })
        .collect();
    Tally { strata, witnesses }
}

fn check_census_args(field: Field, n: usize) -> Result<(), CensusError> {
    if !field.is_finite() {
        return Err(CensusError::InfiniteField);
    }
    if n == 0 || n > MAX_N {
        return Err(CensusError::UnsupportedN(n));
    }
    Ok(())
}

/// Automorphism strata with the default strategy for the field.
pub fn aut_strata(field: Field, n: usize) -> Result<CensusReport, CensusError> {
    aut_strata_with(field, n, Strategy::default_for(field))
}

pub fn aut_strata_with(field: Field, n: usize, strategy: Strategy) -> Result<CensusReport, CensusError> {
    check_census_args(field, n)?;
    let curves = enumerate_smooth(field)?;
    let len = n - 1;
    let tallies: Vec<Tally> = curves
        .par_iter()
        .map(|c| match strategy {
            Strategy::Full => full_tally(c, len),
            Strategy::Stabilizer => stabilizer_tally(c, len),
        })
        .collect();
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    let p = field.characteristic();
    let total: u64 = tally.strata.values().sum();
    let weighted: u64 = tally.strata.iter().map(|(&o, &c)| o as u64 * c).sum();
    debug_assert_eq!(weighted % (p - 1), 0);
    Ok(CensusReport {
        p,
        n,
        strategy,
        strata: tally.strata,
        // each orbit has (p-1)/|Aut| members
        iso_classes: weighted / (p - 1),
        total,
        witnesses: tally.witnesses,
    })
}

/// Every `n`-pointed curve whose automorphism group has exactly `order`
/// elements, in enumeration order. Only points fixed by the order-`order`
/// subgroup can appear, which keeps this cheap for `order > 1`.
pub fn stratum_members(field: Field, n: usize, order: u32) -> Result<Vec<MarkedCurve>, CensusError> {
    check_census_args(field, n)?;
    let curves = enumerate_smooth(field)?;
    let per_curve: Vec<Vec<MarkedCurve>> = curves
        .par_iter()
        .map(|c| {
            let cs = CurveStabilizers::new(c.clone());
            if !cs.order.is_multiple_of(order) {
                return Vec::new();
            }
            cs.members(order, n - 1).into_iter().map(|t| cs.marked(t)).collect()
        })
        .collect();
    Ok(per_curve.into_iter().flatten().collect())
}

/// Nontrivial automorphism orders that the classification allows for
/// `n`-pointed curves over an algebraically closed field.
pub fn classified_orders(n: usize) -> BTreeSet<u32> {
    match n {
        1 => [2, 4, 6].into(),
        2 => [2, 3, 4].into(),
        3 => [2, 3].into(),
        4 => [2].into(),
        _ => BTreeSet::new(),
    }
}

/// The classified orders restricted to those realizable in `F_p`.
pub fn expected_orders(field: Field, n: usize) -> BTreeSet<u32> {
    classified_orders(n)
        .into_iter()
        .filter(|&m| field.has_root_of_unity(m as u64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumCheck {
    pub n: usize,
    pub expected: BTreeSet<u32>,
    pub realized: BTreeSet<u32>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mu4Check {
    /// Two-pointed curves with automorphism order 4.
    pub members: usize,
    /// Their isomorphism classes over `F_p` (twists stay separate).
    pub rational_classes: usize,
    /// Their isomorphism classes over an algebraic closure.
    pub geometric_classes: usize,
    pub expected_geometric_classes: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixVerdict {
    pub p: u64,
    pub per_n: BTreeMap<usize, StratumCheck>,
    /// Four-pointed curves with automorphism order 2.
    pub collinearity_members: usize,
    /// All of them have `y_2 = y_3 = y_4 = 0` and `p_2, p_3, p_4` collinear.
    pub collinearity_check: bool,
    pub max_n_with_auts: usize,
    pub max_n_check: bool,
    pub mu4: Mu4Check,
    /// No curve with `n >= 2` has automorphism order 6.
    pub no_mu6_check: bool,
    /// `|Fix(t)| <= 4, 3, 2, 1` for `t` of order 2, 3, 4, 6 on every curve.
    pub fixed_point_check: bool,
}

impl AppendixVerdict {
    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    /// Names of the failed claims.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .per_n
            .values()
            .filter(|c| !c.pass)
            .map(|c| format!("orders_n{}", c.n))
            .collect();
        for (ok, name) in [
            (self.collinearity_check, "collinearity"),
            (self.max_n_check, "max_n_with_auts"),
            (self.mu4.pass, "mu4_uniqueness"),
            (self.no_mu6_check, "no_mu6"),
            (self.fixed_point_check, "fixed_point_bounds"),
        ] {
            if !ok {
                out.push(name.to_string());
            }
        }
        out
    }
}

fn fixed_point_bound(order: u64) -> usize {
    match order {
        2 => 4,
        3 => 3,
        4 => 2,
        _ => 1,
    }
}

/// Checks the classification of automorphism groups of marked curves over
/// `F_p`, with expectations filtered by which roots of unity `F_p` has.
pub fn verify_appendix(field: Field) -> Result<AppendixVerdict, CensusError> {
    if !field.is_finite() {
        return Err(CensusError::InfiniteField);
    }
    let p = field.characteristic();
    let reports: Vec<CensusReport> = (1..=MAX_N).map(|n| aut_strata(field, n)).collect::<Result<_, _>>()?;

    let per_n: BTreeMap<usize, StratumCheck> = reports
        .iter()
        .map(|r| {
            let expected = expected_orders(field, r.n);
            let realized = r.nontrivial_orders();
            let pass = expected == realized && r.witnesses.iter().all(|(&o, w)| w.automorphisms().order == o);
            (
                r.n,
                StratumCheck {
                    n: r.n,
                    expected,
                    realized,
                    pass,
                },
            )
        })
        .collect();

    let order2 = stratum_members(field, 4, 2)?;
    let collinearity_check = order2.len() as u64 == reports[3].strata.get(&2).copied().unwrap_or(0)
        && order2.iter().all(|m| {
            (2..=4).all(|i| m.point(i).y().is_some_and(FieldElement::is_zero))
                && m.curve()
                    .is_collinear(m.point(2), m.point(3), m.point(4))
                    .expect("points on curve")
                && m.automorphisms().order == 2
        });

    let max_n_with_auts = reports
        .iter()
        .filter(|r| !r.nontrivial_orders().is_empty())
        .map(|r| r.n)
        .max()
        .unwrap_or(0);
    let max_n_check = p % 12 != 1 || max_n_with_auts == 4;

    let mu4_members = stratum_members(field, 2, 4)?;
    let rational_classes = count_classes(&mu4_members, |x, y| x.isomorphism_to(y).is_some());
    let geometric_classes = count_classes(&mu4_members, MarkedCurve::is_geometrically_isomorphic);
    let expected_geometric_classes = usize::from(field.has_root_of_unity(4));
    let mu4 = Mu4Check {
        members: mu4_members.len(),
        rational_classes,
        geometric_classes,
        expected_geometric_classes,
        pass: geometric_classes == expected_geometric_classes
            && mu4_members.len() as u64 == reports[1].strata.get(&4).copied().unwrap_or(0),
    };

    let no_mu6_check = reports[1..].iter().all(|r| !r.strata.contains_key(&6));

    let fixed_point_check = enumerate_smooth(field)?.iter().all(|c| {
        let base = MarkedCurve::from_parts(c.clone(), vec![CurvePoint::Infinity]).expect("smooth");
        let aut = base.automorphisms();
        (1..aut.order as i64).all(|k| {
            let t = aut.generator.pow(k);
            let order = t.multiplicative_order().expect("finite field");
            let fixed = fixed_points(c, &t).expect("t is an automorphism");
            fixed.len() <= fixed_point_bound(order)
        })
    });

    Ok(AppendixVerdict {
        p,
        per_n,
        collinearity_members: order2.len(),
        collinearity_check,
        max_n_with_auts,
        max_n_check,
        mu4,
        no_mu6_check,
        fixed_point_check,
    })
}

/// Number of classes of `items` under an equivalence relation.
fn count_classes<T>(items: &[T], equiv: impl Fn(&T, &T) -> bool) -> usize {
    let mut reps: Vec<&T> = Vec::new();
    for it in items {
        if !reps.iter().any(|r| equiv(r, it)) {
            reps.push(it);
        }
    }
    reps.len()
}
