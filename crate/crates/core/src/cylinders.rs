//! Cylinder geometry of the analytic nega-expansion: range endpoints,
//! diameters and their ratios, placement of neighbouring cylinders, and the
//! checkers for the covering condition and for dual representations.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::periodic::{self, Term};
use crate::qmatrix::{DigitChoice, ParitySelector, QMatrix};
use crate::rational::{format_rational, sign_pow, Rational};
use crate::series::{self, DigitStream, DigitWord, SystemKind};

/// Set of values whose expansion starts with `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub base: DigitWord,
    pub system: SystemKind,
    pub extent: Interval,
    pub rank: usize,
}

impl Cylinder {
    pub fn new(m: &QMatrix, system: SystemKind, base: DigitWord) -> Result<Self> {
        let extent = series::eval(m, system, &base)?;
        Ok(Cylinder { rank: base.len(), base, system, extent })
    }

    pub fn diameter(&self) -> Rational {
        self.extent.width()
    }
}

/// Analytic nega-cylinder. Its endpoints are the base followed by the
/// supremum- and infimum-attaining tails (which swap with rank parity).
pub fn cylinder(m: &QMatrix, base: &DigitWord) -> Result<Cylinder> {
    Cylinder::new(m, SystemKind::NegaAnalytic, base.clone())
}

/// Alternating stream `m, 0, m, 0, ...` (`lower`) or `0, m, 0, m, ...` read
/// from column 1.
pub fn alternating_stream(m: &QMatrix, lower: bool) -> DigitStream {
    series::rule_stream(m, 1, |c, j| if (j % 2 == 1) == lower { c.m() } else { 0 })
}

/// Values `(t0', t0'')` of the streams `m1, 0, m3, 0, ...` and
/// `0, m2, 0, m4, ...`.
///
/// These are the range endpoints whenever
/// [`AnalyticExtremes::alternating_tails_extremal`](crate::extremes::AnalyticExtremes::alternating_tails_extremal)
/// holds; [`value_range`] gives the exact range in every case.
pub fn range_endpoints(m: &QMatrix) -> (Rational, Rational) {
    let value = |lower| {
        series::eval_stream(m, SystemKind::NegaAnalytic, &alternating_stream(m, lower))
            .expect("alternating digits are in range")
    };
    (value(true), value(false))
}

/// Exact set of analytic nega-values (the rank-0 cylinder).
pub fn value_range(m: &QMatrix) -> Interval {
    series::tail_range(m, SystemKind::NegaAnalytic, 1)
}

/// `a_{m1,1} + a_{m2,2} q_{0,1} + a_{m3,3} q_{m1,1} q_{0,2} + ...`: each
/// `a_{mk,k}` weighted by the product that alternates `0, m` backwards from
/// column `k - 1`. Equals `t0'' - t0'`.
pub fn range_width_series(m: &QMatrix) -> Rational {
    let odd_k = ParitySelector::new(DigitChoice::Max, DigitChoice::Zero);
    let even_k = ParitySelector::new(DigitChoice::Zero, DigitChoice::Max);
    let weight = |k: usize| {
        let c = m.column(k);
        c.a(c.m()) / c.q(c.m())
    };
    let from_odd = m.tail_product_sum(1, odd_k, |k| if k % 2 == 1 { weight(k) } else { Rational::zero() });
    let from_even = m.tail_product_sum(1, even_k, |k| if k % 2 == 0 { weight(k) } else { Rational::zero() });
    from_odd + from_even
}

fn check_child(m: &QMatrix, base: &DigitWord, c: usize) -> Result<()> {
    base.check(m)?;
    let position = base.len() + 1;
    let max = m.m(position);
    if c > max {
        return Err(Error::DigitOutOfRange { position, digit: c, max });
    }
    Ok(())
}

/// `d(child) / d(parent)` for the child `base c`, as
/// `q_{c,k+1} * W_{k+2} / W_{k+1}` where `W_s` is the width of the tail
/// range from column `s`. It equals `q_{c,k+1}` only when consecutive tail
/// widths agree, which fails for many matrices.
pub fn metric_ratio(m: &QMatrix, base: &DigitWord, c: usize) -> Result<Rational> {
    check_child(m, base, c)?;
    let k = base.len();
    let e = m.analytic_extremes();
    Ok(m.q(c, k + 1) * e.width(k + 2) / e.width(k + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Placement {
    Overlap,
    Touch,
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    LeftToRight,
    RightToLeft,
}

impl Orientation {
    pub fn for_rank(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Orientation::LeftToRight
        } else {
            Orientation::RightToLeft
        }
    }
}

/// Relative position of the sibling cylinders `base c` and `base (c+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyReport {
    pub rank: usize,
    pub c: usize,
    /// `sup D_c - inf D_{c+1}`
    pub kappa1: Rational,
    /// `sup D_{c+1} - inf D_c`
    pub kappa2: Rational,
    pub nu1: Rational,
    pub nu2: Rational,
    /// Minus the infimum of the tail from column `rank + 1`.
    pub omega1: Rational,
    /// Supremum of the tail from column `rank + 1`.
    pub omega2: Rational,
    /// `q_{c+1,n} omega1 - (1 - omega2) q_{c,n}`
    pub slack: Rational,
    /// `prod_{j<n} q_{c_j,j}`
    pub scale: Rational,
    pub placement: Placement,
    pub orientation: Orientation,
    /// `slack * scale` equals the orientation-relevant kappa.
    pub formula_matches: bool,
}

impl AdjacencyReport {
    /// The kappa that decides overlap for this orientation.
    pub fn relevant_kappa(&self) -> &Rational {
        match self.orientation {
            Orientation::LeftToRight => &self.kappa1,
            Orientation::RightToLeft => &self.kappa2,
        }
    }
}

fn slack(m: &QMatrix, n: usize, c: usize) -> (Rational, Rational, Rational) {
    let e = m.analytic_extremes();
    let omega1 = -e.inf(n + 1).clone();
    let omega2 = e.sup(n + 1).clone();
    let col = m.column(n);
    let s = col.q(c + 1) * &omega1 - (Rational::one() - &omega2) * col.q(c);
    (omega1, omega2, s)
}

/// Classifies `base c` against `base (c+1)` at rank `n = |base| + 1`.
///
/// Placement is decided from exact endpoints: with left-to-right placement
/// (even `n`) the cylinders overlap, touch or leave a gap as `kappa1` is
/// positive, zero or negative; with right-to-left placement (odd `n`) the same
/// holds for `kappa2`.
pub fn adjacency(m: &QMatrix, base: &DigitWord, c: usize) -> Result<AdjacencyReport> {
    check_child(m, base, c + 1)?;
    let n = base.len() + 1;
    let left = series::eval(m, SystemKind::NegaAnalytic, &base.child(c))?;
    let right = series::eval(m, SystemKind::NegaAnalytic, &base.child(c + 1))?;
    let kappa1 = left.hi() - right.lo();
    let kappa2 = right.hi() - left.lo();
    let (omega1, omega2, slack) = slack(m, n, c);
    let scale: Rational = base.0.iter().enumerate().map(|(i, &d)| m.q(d, i + 1)).product();
    let orientation = Orientation::for_rank(n);
    let relevant = match orientation {
        Orientation::LeftToRight => &kappa1,
        Orientation::RightToLeft => &kappa2,
    };
    let placement = if relevant > &Rational::zero() {
        Placement::Overlap
    } else if relevant.is_zero() {
        Placement::Touch
    } else {
        Placement::Gap
    };
    let formula_matches = &(&slack * &scale) == relevant;
    Ok(AdjacencyReport {
        rank: n,
        c,
        nu1: -kappa1.clone(),
        nu2: -kappa2.clone(),
        kappa1,
        kappa2,
        omega1,
        omega2,
        slack,
        scale,
        placement,
        orientation,
        formula_matches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem1Entry {
    pub rank: usize,
    pub c: usize,
    #[serde(serialize_with = "ser_rational")]
    pub slack: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem1Report {
    pub ranks_checked: usize,
    pub holds: bool,
    pub alternating_tails_extremal: bool,
    pub entries: Vec<Theorem1Entry>,
}

impl Theorem1Report {
    pub fn failures(&self) -> impl Iterator<Item = &Theorem1Entry> {
        self.entries.iter().filter(|e| !e.holds)
    }
}

/// Evaluates `q_{c+1,n} omega1 >= (1 - omega2) q_{c,n}` for every adjacent
/// digit pair in columns `1 ..= max(max_rank, P) + cycle_len`.
///
/// The slack depends only on the column and the tail beyond it, so the ranks
/// covered here decide the condition for all ranks. When it holds, every
/// pair of neighbouring cylinders overlaps or touches and the cylinders of
/// each rank cover the whole value range.
pub fn check_theorem1(m: &QMatrix, max_rank: usize) -> Theorem1Report {
    let ranks = max_rank.max(m.prefix_len()) + m.cycle_len();
    let mut entries = Vec::new();
    for n in 1..=ranks {
        for c in 0..m.m(n) {
            let (_, _, s) = slack(m, n, c);
            entries.push(Theorem1Entry { rank: n, c, holds: s >= Rational::zero(), slack: s });
        }
    }
    Theorem1Report {
        ranks_checked: ranks,
        holds: entries.iter().all(|e| e.holds),
        alternating_tails_extremal: m.analytic_extremes().alternating_tails_extremal(),
        entries,
    }
}

/// Both sides of the dual-representation identity for `base`, and the two
/// stream values it speaks about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Report {
    pub rank: usize,
    pub lhs_numerator: Rational,
    pub lhs_denominator: Rational,
    pub rhs_numerator: Rational,
    pub rhs_denominator: Rational,
    pub condition_holds: bool,
    /// `base` followed by `m, 0, m, 0, ...`
    pub x1: Rational,
    /// `base` with its last digit decremented, followed by `0, m, 0, m, ...`
    pub x2: Rational,
    pub values_equal: bool,
}

impl Lemma2Report {
    pub fn lhs(&self) -> Option<Rational> {
        (!self.lhs_denominator.is_zero()).then(|| &self.lhs_numerator / &self.lhs_denominator)
    }

    pub fn rhs(&self) -> Option<Rational> {
        (!self.rhs_denominator.is_zero()).then(|| &self.rhs_numerator / &self.rhs_denominator)
    }
}

/// `word` followed by the alternating tail starting at column `|word| + 1`.
fn with_alternating_tail(m: &QMatrix, word: &DigitWord, max_first: bool) -> DigitStream {
    let start = word.len() + 1;
    let tail = series::rule_stream(m, start, |c, j| if (j - start).is_multiple_of(2) == max_first { c.m() } else { 0 });
    let mut head = word.0.clone();
    head.extend(tail.head.0);
    DigitStream::new(head, tail.tail.0).expect("matrix cycle is nonempty")
}

/// Checks whether `c_1 .. c_n m 0 m 0 ...` and `c_1 .. [c_n - 1] 0 m 0 m ...`
/// denote the same number, both through the closed-form identity in terms of
/// `t0'`, `t0''` and the products along the alternating streams, and by
/// direct evaluation. The two verdicts are computed independently.
pub fn check_lemma2(m: &QMatrix, base: &DigitWord) -> Result<Lemma2Report> {
    base.check(m)?;
    let n = base.len();
    let Some(&c) = base.0.last() else {
        return Err(Error::EmptyBase);
    };
    if c == 0 {
        return Err(Error::ZeroLastDigit);
    }

    let (t_lo, t_hi) = range_endpoints(m);
    let through_n = |lower: bool| {
        let s = alternating_stream(m, lower);
        let terms: Vec<Term> = (1..=n).map(|p| series::term(m, SystemKind::NegaAnalytic, 1, p, s.digit(p))).collect();
        periodic::partial(&terms)
    };
    let (part_lo, prod_lo) = through_n(true);
    let (part_hi, prod_hi) = through_n(false);
    let q_c = m.q(c, n).clone();
    let q_prev = m.q(c - 1, n).clone();

    let (lhs_numerator, lhs_denominator, rhs_numerator, rhs_denominator) = if n.is_multiple_of(2) {
        (&t_hi - &part_hi - &prod_hi, &t_lo - &part_lo, &q_c * &prod_hi, &q_prev * &prod_lo)
    } else {
        (&t_hi - &part_hi, &t_lo - &part_lo + &prod_lo, &q_prev * &prod_hi, &q_c * &prod_lo)
    };
    let condition_holds = &lhs_numerator * &rhs_denominator == &rhs_numerator * &lhs_denominator;

    let mut lowered = base.clone();
    lowered.0[n - 1] = c - 1;
    let x1 = series::eval_stream(m, SystemKind::NegaAnalytic, &with_alternating_tail(m, base, true))?;
    let x2 = series::eval_stream(m, SystemKind::NegaAnalytic, &with_alternating_tail(m, &lowered, false))?;
    Ok(Lemma2Report {
        rank: n,
        lhs_numerator,
        lhs_denominator,
        rhs_numerator,
        rhs_denominator,
        condition_holds,
        values_equal: x1 == x2,
        x1,
        x2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub rank: usize,
    pub range: Interval,
    pub cylinders: usize,
    /// Maximal open intervals of the range not covered by any cylinder.
    pub gaps: Vec<Interval>,
}

impl CoverageReport {
    pub fn covered(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Number of words of length `rank`.
pub fn word_count(m: &QMatrix, rank: usize) -> u128 {
    (1..=rank).fold(1u128, |acc, j| acc.saturating_mul(m.m(j) as u128 + 1))
}

/// All rank-`rank` analytic cylinders in lexicographic base order.
pub fn rank_cylinders(m: &QMatrix, rank: usize, cap: u128) -> Result<Vec<(DigitWord, Interval)>> {
    let count = word_count(m, rank);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let tail = series::tail_range(m, SystemKind::NegaAnalytic, rank + 1);
    let mut out = Vec::with_capacity(count as usize);
    let mut stack = vec![(DigitWord::default(), Rational::zero(), Rational::one())];
    while let Some((w, v, p)) = stack.pop() {
        let k = w.len();
        if k == rank {
            let iv = series::extent(SystemKind::NegaAnalytic, k, &v, &p, &tail);
            out.push((w, iv));
            continue;
        }
        let col = m.column(k + 1);
        for c in (0..=col.m()).rev() {
            let v2 = &v + sign_pow(k + 1) * col.a(c) * &p;
            let p2 = &p * col.q(c);
            stack.push((w.child(c), v2, p2));
        }
    }
    Ok(out)
}

/// Exhaustive check that the rank-`rank` cylinders cover the value range.
pub fn coverage(m: &QMatrix, rank: usize, cap: u128) -> Result<CoverageReport> {
    let cylinders = rank_cylinders(m, rank, cap)?;
    let range = value_range(m);
    let mut extents: Vec<Interval> = cylinders.iter().map(|(_, iv)| iv.clone()).collect();
    extents.sort_by(|a, b| a.lo().cmp(b.lo()));
    let mut gaps = Vec::new();
    let mut reach = range.lo().clone();
    for iv in &extents {
        if iv.lo() > &reach {
            gaps.push(Interval::new(reach.clone(), iv.lo().clone()));
        }
        if iv.hi() > &reach {
            reach = iv.hi().clone();
        }
    }
    if &reach < range.hi() {
        gaps.push(Interval::new(reach, range.hi().clone()));
    }
    Ok(CoverageReport { rank, range, cylinders: cylinders.len(), gaps })
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::Column;
    use crate::rational::{int, rat};

    fn col(v: &[(i64, i64)]) -> Column {
        Column::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn binary() -> QMatrix {
        QMatrix::validate(vec![], vec![Column::uniform(2)]).unwrap()
    }

    fn constant_family() -> QMatrix {
        QMatrix::validate(vec![col(&[(1, 4), (3, 4)])], vec![col(&[(1, 3), (2, 3)])]).unwrap()
    }

    fn word(s: &str) -> DigitWord {
        s.parse().unwrap()
    }

    #[test]
    fn binary_range() {
        assert_eq!(range_endpoints(&binary()), (rat(-2, 3), rat(1, 3)));
        assert_eq!(value_range(&binary()), Interval::new(rat(-2, 3), rat(1, 3)));
    }

    #[test]
    fn constant_family_range() {
        let m = constant_family();
        // closed forms: q2 (1 - (1-qm) q0 / (1 - q0 qm)) - 1 and (1-qm)/(1-q0 qm) q1
        let (q0, qm, q1, q2) = (rat(1, 3), rat(2, 3), rat(1, 4), rat(3, 4));
        let one = int(1);
        let lo = &q2 * (&one - (&one - &qm) * &q0 / (&one - &q0 * &qm)) - &one;
        let hi = (&one - &qm) / (&one - &q0 * &qm) * &q1;
        assert_eq!(range_endpoints(&m), (lo.clone(), hi.clone()));
        assert_eq!(lo, rat(-5, 14));
        assert_eq!(hi, rat(3, 28));
        assert_eq!(range_width_series(&m), hi - lo);
    }

    #[test]
    fn empty_base_cylinder_is_the_range() {
        let m = constant_family();
        let cyl = cylinder(&m, &DigitWord::default()).unwrap();
        assert_eq!(cyl.extent, Interval::new(rat(-5, 14), rat(3, 28)));
        assert_eq!(cylinder(&binary(), &word("1")).unwrap().extent, Interval::new(rat(-2, 3), rat(-1, 6)));
    }

    #[test]
    fn binary_metric_ratio_and_adjacency() {
        let m = binary();
        for base in ["", "1", "0,1", "1,1,0"] {
            let b = word(base);
            assert_eq!(metric_ratio(&m, &b, 0).unwrap(), rat(1, 2));
            let adj = adjacency(&m, &b, 0).unwrap();
            assert_eq!(adj.placement, Placement::Touch, "base {base}");
            assert!(adj.relevant_kappa().is_zero());
            assert!(adj.formula_matches);
            assert_eq!(adj.orientation, Orientation::for_rank(b.len() + 1));
        }
    }

    #[test]
    fn constant_family_metric_ratio_differs_from_q() {
        let m = constant_family();
        let r = metric_ratio(&m, &DigitWord::default(), 0).unwrap();
        assert_ne!(r, rat(1, 4));
        assert_eq!(r, rat(1, 4) * rat(16, 13));
    }

    #[test]
    fn theorem1_binary_and_constant_family() {
        let r = check_theorem1(&binary(), 4);
        assert!(r.holds);
        assert!(r.entries.iter().all(|e| e.slack.is_zero()));
        // the first column overlaps (slack 3/28), later columns touch
        let r = check_theorem1(&constant_family(), 2);
        assert!(r.holds);
        assert_eq!(r.entries[0].slack, rat(3, 28));
        assert!(r.entries[1..].iter().all(|e| e.slack.is_zero()));
    }

    #[test]
    fn theorem1_detects_rank_one_gap() {
        // heavy first digit, light second: q_{1,1} omega1 < (1 - omega2) q_{0,1}
        let m = QMatrix::validate(vec![col(&[(3, 4), (1, 4)])], vec![col(&[(1, 3), (2, 3)])]).unwrap();
        let r = check_theorem1(&m, 2);
        assert!(!r.holds);
        let first = r.failures().next().unwrap();
        assert_eq!(first.rank, 1);
        let cov = coverage(&m, 1, 1000).unwrap();
        assert_eq!(cov.gaps.len(), 1);
        assert_eq!(cov.gaps[0].width(), -first.slack.clone());
        let err = crate::codec::encode_nega_analytic(&m, &cov.gaps[0].lo().clone(), 3);
        assert!(err.is_ok());
        let mid = (cov.gaps[0].lo() + cov.gaps[0].hi()) / int(2);
        assert!(matches!(crate::codec::encode_nega_analytic(&m, &mid, 3), Err(Error::GapHit { rank: 1, .. })));
    }

    #[test]
    fn heavy_middle_digit_breaks_sibling_order() {
        // at even rank kappa2 - kappa1 = P (2 q_c + (q_{c+1} - q_c)(omega2 - omega1)),
        // negative once q_{c+1} is several times q_c and omega1 - omega2 is large
        let m = QMatrix::validate(vec![], vec![col(&[(1, 10), (8, 10), (1, 10)])]).unwrap();
        let r = adjacency(&m, &word("0"), 0).unwrap();
        assert_eq!(r.orientation, Orientation::LeftToRight);
        assert!(r.kappa2 < r.kappa1);
        let lo0 = cylinder(&m, &word("0,0")).unwrap().extent.lo().clone();
        let lo1 = cylinder(&m, &word("0,1")).unwrap().extent.lo().clone();
        assert!(lo1 < lo0);
    }

    #[test]
    fn lemma2_binary() {
        let m = binary();
        let r = check_lemma2(&m, &word("1")).unwrap();
        assert_eq!(r.x1, rat(-1, 6));
        assert_eq!(r.x2, rat(-1, 6));
        assert!(r.values_equal && r.condition_holds);
        let r = check_lemma2(&m, &word("0,1")).unwrap();
        assert!(r.values_equal && r.condition_holds);
        assert_eq!(r.lhs(), r.rhs());
        assert_eq!(check_lemma2(&m, &word("1,0")).unwrap_err(), Error::ZeroLastDigit);
        assert_eq!(check_lemma2(&m, &DigitWord::default()).unwrap_err(), Error::EmptyBase);
    }

    #[test]
    fn lemma2_non_homogeneous() {
        let m = QMatrix::validate(vec![], vec![col(&[(1, 2), (1, 3), (1, 6)]), col(&[(1, 5), (4, 5)])]).unwrap();
        let r = check_lemma2(&m, &word("2")).unwrap();
        assert!(!r.values_equal);
        assert!(!r.condition_holds);
    }

    #[test]
    fn binary_coverage() {
        let cov = coverage(&binary(), 4, 1000).unwrap();
        assert!(cov.covered());
        assert_eq!(cov.cylinders, 16);
        assert!(matches!(coverage(&binary(), 12, 1000), Err(Error::EnumerationTooLarge { .. })));
    }
}
