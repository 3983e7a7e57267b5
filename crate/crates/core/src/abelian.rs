//! Finitely generated abelian groups, Smith normal form, extensions of cyclic
//! groups, and graded presentations `Z[l]/(c1 l, c2 l^2)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("extension solver needs cyclic groups, got {0}")]
    NotCyclic(FinAbGroup),
    #[error("group order {0} is too large for the extension solver")]
    OrderTooLarge(BigUint),
    #[error("without left exactness the sub group Z has infinitely many quotients")]
    UnboundedWithoutExactness,
    #[error("no candidate satisfies the lift constraint")]
    NoCandidateMatches,
    #[error("constraint leaves several candidates: {}", join(.0))]
    Ambiguous(Vec<FinAbGroup>),
    #[error("invalid presentation coefficients c1={c1}, c2={c2:?}")]
    InvalidPresentation { c1: u64, c2: Option<u64> },
    #[error("unknown stack label {0:?}")]
    UnknownStack(String),
}

fn join(groups: &[FinAbGroup]) -> String {
    groups.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Diagonal entries `m[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// `d = u * m * v` with `u`, `v` unimodular and `d` diagonal,
/// `d_1 | d_2 | ...`, all `d_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

struct Reducer {
    d: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_row(dst, src, k);
        self.u.add_row(dst, src, k);
    }
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_col(dst, src, k);
        self.v.add_col(dst, src, k);
    }

    /// Least-absolute-value nonzero entry of the trailing block.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows {
            for j in t..self.d.cols {
                let x = &self.d[(i, j)];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < self.d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Reduces row and column `t` against the pivot; returns true when both
    /// are cleared.
    fn clear_cross(&mut self, t: usize) -> bool {
        let mut clean = true;
        for i in t + 1..self.d.rows {
            if !self.d[(i, t)].is_zero() {
                let q = &self.d[(i, t)] / &self.d[(t, t)];
                self.add_row(i, t, &-q);
                clean &= self.d[(i, t)].is_zero();
            }
        }
        for j in t + 1..self.d.cols {
            if !self.d[(t, j)].is_zero() {
                let q = &self.d[(t, j)] / &self.d[(t, t)];
                self.add_col(j, t, &-q);
                clean &= self.d[(t, j)].is_zero();
            }
        }
        clean
    }

    fn run(mut self) -> SmithForm {
        let steps = self.d.rows.min(self.d.cols);
        'outer: for t in 0..steps {
            loop {
                let Some((pi, pj)) = self.pivot(t) else {
                    break 'outer;
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                if !self.clear_cross(t) {
                    continue;
                }
                let pivot = self.d[(t, t)].clone();
                let offender = (t + 1..self.d.rows)
                    .find(|&i| (t + 1..self.d.cols).any(|j| !self.d[(i, j)].is_multiple_of(&pivot)));
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.d[(t, t)].is_negative() {
                self.d.negate_row(t);
                self.u.negate_row(t);
            }
        }
        SmithForm {
            u: self.u,
            d: self.d,
            v: self.v,
        }
    }
}

/// Smith normal form with transforms, pivoting on the smallest nonzero entry.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    Reducer {
        d: m.clone(),
        u: IntMatrix::identity(m.rows),
        v: IntMatrix::identity(m.cols),
    }
    .run()
}

/// A finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_k` with
/// `d_1 | ... | d_k` and every `d_i >= 2`. Equal values are isomorphic
/// groups and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    free_rank: usize,
    torsion: Vec<BigUint>,
}

impl FinAbGroup {
    pub fn trivial() -> FinAbGroup {
        FinAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> FinAbGroup {
        FinAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z/n`, with `n = 0` meaning `Z`.
    pub fn cyclic(n: u64) -> FinAbGroup {
        FinAbGroup::from_factors(&[n])
    }

    /// Direct sum of `Z/n` over `orders` (`0` meaning `Z`), in canonical form.
    pub fn from_factors(orders: &[u64]) -> FinAbGroup {
        let n = orders.len();
        let mut rel = IntMatrix::zeros(n, n);
        for (i, o) in orders.iter().enumerate() {
            rel[(i, i)] = BigInt::from(*o);
        }
        group_from_presentation(&rel, n)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.free_rank + self.torsion.len() <= 1
    }

    /// `|G|`, or `None` for infinite groups.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }

    /// For cyclic groups: `Some(0)` for `Z`, `Some(n)` for `Z/n`, `Some(1)`
    /// for the trivial group.
    pub fn cyclic_order(&self) -> Option<BigUint> {
        if !self.is_cyclic() {
            None
        } else if self.free_rank == 1 {
            Some(BigUint::zero())
        } else {
            Some(self.torsion.first().cloned().unwrap_or_else(BigUint::one))
        }
    }

    pub fn direct_sum(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut factors: Vec<BigInt> = vec![BigInt::zero(); self.free_rank + other.free_rank];
        factors.extend(
            self.torsion
                .iter()
                .chain(&other.torsion)
                .map(|d| BigInt::from(d.clone())),
        );
        let n = factors.len();
        let mut rel = IntMatrix::zeros(n, n);
        for (i, d) in factors.into_iter().enumerate() {
            rel[(i, i)] = d;
        }
        group_from_presentation(&rel, n)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Cokernel of `relations`, whose rows are relations among `generators`
/// generators.
pub fn group_from_presentation(relations: &IntMatrix, generators: usize) -> FinAbGroup {
    assert_eq!(
        relations.cols, generators,
        "relation width must equal the generator count"
    );
    let snf = smith_normal_form(relations);
    let diag = snf.d.diagonal();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .map(|d| d.to_biguint().expect("nonnegative"))
        .collect();
    FinAbGroup {
        free_rank: generators - nonzero,
        torsion,
    }
}

/// A finitely presented abelian group that remembers its generators, so
/// individual elements can be inspected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    relations: IntMatrix,
    snf: SmithForm,
}

impl Presentation {
    pub fn new(relations: IntMatrix) -> Presentation {
        let snf = smith_normal_form(&relations);
        Presentation { relations, snf }
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn generators(&self) -> usize {
        self.relations.cols
    }

    pub fn group(&self) -> FinAbGroup {
        group_from_presentation(&self.relations, self.generators())
    }

    /// Order of the element with the given coordinates in the generators,
    /// `None` if it has infinite order.
    pub fn element_order(&self, coords: &[BigInt]) -> Option<BigUint> {
        assert_eq!(coords.len(), self.generators());
        let diag = self.snf.d.diagonal();
        let mut order = BigUint::one();
        for j in 0..self.generators() {
            let w: BigInt = (0..self.generators()).map(|k| &coords[k] * &self.snf.v[(k, j)]).sum();
            let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                if !w.is_zero() {
                    return None;
                }
                continue;
            }
            let part = (&d / w.gcd(&d)).to_biguint().expect("positive");
            order = order.lcm(&part);
        }
        Some(order)
    }
}

/// `0 -> sub -> B -> quot -> 0` with cyclic ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionProblem {
    pub sub: FinAbGroup,
    pub quot: FinAbGroup,
    /// Left exactness is an external input, not something computed here.
    /// Without it `B` is only known to extend `quot` by a quotient of `sub`.
    pub exactness_assumed: bool,
}

/// One extension class: `B = <x, y | n x = 0, m y = e x>` where `x`
/// generates the sub group and `y` lifts the generator of the quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionClass {
    /// `n`, with `0` for `Z`.
    pub sub_order: u64,
    /// `m`, with `0` for `Z`.
    pub quot_order: u64,
    /// `e`, the class in `Ext^1(quot, sub)`.
    pub class: u64,
    pub presentation: Presentation,
    pub middle: FinAbGroup,
}

impl ExtensionClass {
    fn new(sub_order: u64, quot_order: u64, class: u64) -> ExtensionClass {
        let mut rows = Vec::new();
        if sub_order != 0 {
            rows.push(vec![sub_order as i64, 0]);
        }
        if quot_order != 0 {
            rows.push(vec![-(class as i64), quot_order as i64]);
        }
        let presentation = Presentation::new(IntMatrix::from_rows(2, &rows));
        let middle = presentation.group();
        ExtensionClass {
            sub_order,
            quot_order,
            class,
            presentation,
            middle,
        }
    }

    /// Orders of the lifts `y + k x`, covering every lift that can have
    /// finite order.
    fn lift_orders(&self) -> Vec<Option<BigUint>> {
        let range: Vec<i64> = if self.sub_order != 0 {
            (0..self.sub_order as i64).collect()
        } else {
            // m(y + kx) = (e + mk) x, finite only when e + mk = 0, so |k| <= e
            let e = self.class as i64;
            (-e - 1..=e + 1).collect()
        };
        range
            .into_iter()
            .map(|k| self.presentation.element_order(&[BigInt::from(k), BigInt::one()]))
            .collect()
    }

    pub fn satisfies(&self, constraint: LiftConstraint) -> bool {
        let orders = self.lift_orders();
        match constraint {
            LiftConstraint::Order(n) => orders.iter().any(|o| *o == Some(BigUint::from(n))),
            LiftConstraint::InfiniteOrder => orders.iter().all(Option::is_none),
            LiftConstraint::KilledBy(k) => orders.iter().any(|o| is_killed_by(o, k)),
            LiftConstraint::NotKilledBy(k) => !orders.iter().any(|o| is_killed_by(o, k)),
        }
    }
}

fn is_killed_by(order: &Option<BigUint>, k: u64) -> bool {
    order.as_ref().is_some_and(|o| (BigUint::from(k) % o).is_zero())
}

/// What is known about lifts of the quotient generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftConstraint {
    /// Some lift has exactly this finite order.
    Order(u64),
    /// Every lift has infinite order.
    InfiniteOrder,
    /// Some lift is annihilated by this integer.
    KilledBy(u64),
    /// No lift is annihilated by this integer.
    NotKilledBy(u64),
}

fn cyclic_u64(g: &FinAbGroup) -> Result<u64, AbelianError> {
    let n = g.cyclic_order().ok_or_else(|| AbelianError::NotCyclic(g.clone()))?;
    n.to_u64().ok_or(AbelianError::OrderTooLarge(n))
}

/// Every extension class of `quot` by `sub`, or by each quotient of `sub`
/// when left exactness is not assumed.
pub fn extensions(prob: &ExtensionProblem) -> Result<Vec<ExtensionClass>, AbelianError> {
    let n = cyclic_u64(&prob.sub)?;
    let m = cyclic_u64(&prob.quot)?;
    let subs: Vec<u64> = if prob.exactness_assumed {
        vec![n]
    } else if n == 0 {
        return Err(AbelianError::UnboundedWithoutExactness);
    } else {
        (1..=n).filter(|d| n % d == 0).collect()
    };
    let mut out = Vec::new();
    for n in subs {
        // Ext^1(Z/m, Z/n) = Z/gcd(m, n), Ext^1(Z/m, Z) = Z/m, Ext^1(Z, -) = 0
        let classes = match (n, m) {
            (_, 0) => 1,
            (0, m) => m,
            (n, m) => n.gcd(&m),
        };
        out.extend((0..classes).map(|e| ExtensionClass::new(n, m, e)));
    }
    Ok(out)
}

/// The distinct middle groups `B` in `0 -> sub -> B -> quot -> 0`.
pub fn solve_extension(prob: &ExtensionProblem) -> Result<Vec<FinAbGroup>, AbelianError> {
    let mut groups: Vec<FinAbGroup> = extensions(prob)?.into_iter().map(|c| c.middle).collect();
    groups.sort();
    groups.dedup();
    Ok(groups)
}

/// Picks the unique middle group among `candidates` whose extension class
/// satisfies `constraint`.
pub fn disambiguate(candidates: &[ExtensionClass], constraint: LiftConstraint) -> Result<FinAbGroup, AbelianError> {
    let mut survivors: Vec<FinAbGroup> = candidates
        .iter()
        .filter(|c| c.satisfies(constraint))
        .map(|c| c.middle.clone())
        .collect();
    survivors.sort();
    survivors.dedup();
    match survivors.len() {
        0 => Err(AbelianError::NoCandidateMatches),
        1 => Ok(survivors.pop().expect("one survivor")),
        _ => Err(AbelianError::Ambiguous(survivors)),
    }
}

/// `M_{1,n}` as a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackLabel(pub u32);

impl fmt::Display for StackLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M1,{}", self.0)
    }
}

impl FromStr for StackLabel {
    type Err = AbelianError;

    /// Accepts `M1,n` and `M_{1,n}`.
    fn from_str(s: &str) -> Result<StackLabel, AbelianError> {
        let err = || AbelianError::UnknownStack(s.to_string());
        let body = s.trim();
        let body = body
            .strip_prefix("M_{")
            .and_then(|r| r.strip_suffix('}'))
            .or_else(|| body.strip_prefix('M'))
            .ok_or_else(err)?;
        let n = body.strip_prefix("1,").ok_or_else(err)?;
        let n: u32 = n.trim().parse().map_err(|_| err())?;
        Ok(StackLabel(n))
    }
}

/// `Z[l]/(c1 l, c2 l^2)`, or `Z[l]/(c1 l)` when `c2` is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowPresentation {
    name: String,
    c1: u64,
    c2: Option<u64>,
}

impl ChowPresentation {
    pub fn new(name: impl Into<String>, c1: u64, c2: Option<u64>) -> Result<ChowPresentation, AbelianError> {
        let ok = c1 >= 1 && c2.is_none_or(|c2| c2 >= 1 && c1.is_multiple_of(c2));
        if !ok {
            return Err(AbelianError::InvalidPresentation { c1, c2 });
        }
        Ok(ChowPresentation {
            name: name.into(),
            c1,
            c2,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c1(&self) -> u64 {
        self.c1
    }

    pub fn c2(&self) -> Option<u64> {
        self.c2
    }

    /// Relations cutting out the degree-`k` part `Z l^k`.
    fn degree_relations(&self, k: u32) -> IntMatrix {
        let mut rows = Vec::new();
        if k >= 1 {
            rows.push(vec![self.c1 as i64]);
        }
        if k >= 2 {
            if let Some(c2) = self.c2 {
                rows.push(vec![c2 as i64]);
            }
        }
        IntMatrix::from_rows(1, &rows)
    }
}

impl fmt::Display for ChowPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[λ1]/({}λ1", self.c1)?;
        match self.c2 {
            None => {}
            Some(1) => write!(f, ", λ1^2")?,
            Some(c2) => write!(f, ", {c2}λ1^2")?,
        }
        write!(f, ")")
    }
}

/// Degree-`k` component of the graded ring.
pub fn chow_component(pres: &ChowPresentation, k: u32) -> FinAbGroup {
    group_from_presentation(&pres.degree_relations(k), 1)
}

/// The presentations of `M_{1,n}` for `1 <= n <= 10`.
pub fn theorem_table() -> BTreeMap<StackLabel, ChowPresentation> {
    (1..=10u32)
        .map(|n| {
            let c2 = match n {
                1 | 2 => None,
                3 => Some(6),
                4 => Some(2),
                _ => Some(1),
            };
            let label = StackLabel(n);
            let pres = ChowPresentation::new(label.to_string(), 12, c2).expect("valid table entry");
            (label, pres)
        })
        .collect()
}

/// Looks up a label in [`theorem_table`].
pub fn presentation_for(label: &str) -> Result<ChowPresentation, AbelianError> {
    let parsed: StackLabel = label.parse()?;
    theorem_table()
        .remove(&parsed)
        .ok_or_else(|| AbelianError::UnknownStack(label.to_string()))
}
