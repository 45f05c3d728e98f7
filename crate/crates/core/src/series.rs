//! Digit words and streams, the coefficient tables, and exact evaluation of
//! the three expansions.
//!
//! * `QTilde`: `a_{i1,1} + sum_k a_{ik,k} prod_{j<k} q_{ij,j}`
//! * `NegaAnalytic`: `sum_k (-1)^k a_{ik,k} prod_{j<k} q_{ij,j}`
//! * `NegaGeometric`: `a_{i1,1} + sum_k a~_{ik,k} prod_{j<k} q~_{ij,j}`, the
//!   alternating left/right partition of `[0, 1]`. It is also available in
//!   the equivalent form with `delta~` and the odd-length product correction
//!   ([`eval_stream_delta_form`]).

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::periodic::{self, Term};
use crate::qmatrix::{Column, QMatrix};
use crate::rational::{sign_pow, Rational};

/// Finite digit word `c_1 ... c_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitWord(pub Vec<usize>);

impl DigitWord {
    pub fn new(digits: Vec<usize>) -> Self {
        DigitWord(digits)
    }

    pub fn digits(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word extended by one digit.
    pub fn child(&self, c: usize) -> DigitWord {
        let mut d = self.0.clone();
        d.push(c);
        DigitWord(d)
    }

    /// Checks `c_j <= m_j` for every position.
    pub fn check(&self, m: &QMatrix) -> Result<()> {
        for (idx, &d) in self.0.iter().enumerate() {
            let max = m.m(idx + 1);
            if d > max {
                return Err(Error::DigitOutOfRange { position: idx + 1, digit: d, max });
            }
        }
        Ok(())
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DigitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(DigitWord::default());
        }
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("`{p}` is not a digit in `{s}`"))))
            .collect::<Result<Vec<_>>>()
            .map(DigitWord)
    }
}

/// Eventually periodic digit sequence: `head` then `tail` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitStream {
    pub head: DigitWord,
    pub tail: DigitWord,
}

impl DigitStream {
    pub fn new(head: Vec<usize>, tail: Vec<usize>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::EmptyTail);
        }
        Ok(DigitStream { head: DigitWord(head), tail: DigitWord(tail) })
    }

    /// Digit at 1-based position `r`.
    pub fn digit(&self, r: usize) -> usize {
        let h = self.head.len();
        if r <= h {
            self.head.0[r - 1]
        } else {
            self.tail.0[(r - h - 1) % self.tail.len()]
        }
    }

    /// First `len` digits.
    pub fn prefix(&self, len: usize) -> DigitWord {
        DigitWord((1..=len).map(|r| self.digit(r)).collect())
    }

    /// Shortest head and tail describing the same sequence.
    pub fn canonical(&self) -> DigitStream {
        let t = self.tail.len();
        let period =
            (1..=t).find(|&d| t.is_multiple_of(d) && (0..t).all(|i| self.tail.0[i] == self.tail.0[i % d])).unwrap_or(t);
        let mut tail = self.tail.0[..period].to_vec();
        let mut head = self.head.0.clone();
        while head.last().is_some() && head.last() == tail.last() {
            head.pop();
            tail.rotate_right(1);
        }
        DigitStream { head: DigitWord(head), tail: DigitWord(tail) }
    }

    /// Same infinite sequence, regardless of representation.
    pub fn same_sequence(&self, other: &DigitStream) -> bool {
        self.canonical() == other.canonical()
    }

    /// Positions read from column `start` become periodic after absolute
    /// column `settle`, with the returned period.
    fn layout(&self, m: &QMatrix, start: usize) -> (usize, usize) {
        let settle = m.prefix_len().max(start - 1 + self.head.len());
        (settle, self.tail.len().lcm(&m.cycle_len()))
    }

    /// Checks every digit against the column it lands on when the stream is
    /// read from column `start`.
    pub fn check_from(&self, m: &QMatrix, start: usize) -> Result<()> {
        let (settle, period) = self.layout(m, start);
        let h = self.head.len();
        for p in start..=settle + period {
            let r = p - start + 1;
            let d = self.digit(r);
            let max = m.m(p);
            if d > max {
                let first_pass = r <= h + self.tail.len();
                return Err(if first_pass {
                    Error::DigitOutOfRange { position: r, digit: d, max }
                } else {
                    Error::MisalignedTail { position: r, digit: d, max }
                });
            }
        }
        Ok(())
    }

    pub fn check(&self, m: &QMatrix) -> Result<()> {
        self.check_from(m, 1)
    }

    /// Unrolls into per-column terms when read from column `start`.
    fn terms_from(&self, m: &QMatrix, start: usize, term: impl Fn(usize, usize) -> Term) -> (Vec<Term>, Vec<Term>) {
        let (settle, period) = self.layout(m, start);
        let at = |p: usize| term(p, self.digit(p - start + 1));
        let prefix = (start..=settle).map(at).collect();
        let cycle = (settle + 1..=settle + period).map(at).collect();
        (prefix, cycle)
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.head, self.tail)
    }
}

impl FromStr for DigitStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) =
            s.split_once(';').ok_or_else(|| Error::Parse(format!("stream `{s}` needs the form head;tail")))?;
        let head: DigitWord = head.parse()?;
        let tail: DigitWord = tail.parse()?;
        DigitStream::new(head.0, tail.0)
    }
}

/// Which expansion a digit sequence is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    QTilde,
    NegaAnalytic,
    NegaGeometric,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::QTilde, SystemKind::NegaAnalytic, SystemKind::NegaGeometric];

    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::QTilde => "q",
            SystemKind::NegaAnalytic => "nega-analytic",
            SystemKind::NegaGeometric => "nega-geom",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(SystemKind::QTilde),
            "nega-analytic" => Ok(SystemKind::NegaAnalytic),
            "nega-geom" => Ok(SystemKind::NegaGeometric),
            other => Err(Error::Parse(format!("unknown system `{other}` (expected q, nega-geom or nega-analytic)"))),
        }
    }
}

fn checked(m: &QMatrix, i: usize, n: usize) -> Result<&Column> {
    let col = m.column(n);
    if i > col.m() {
        return Err(Error::DigitOutOfRange { position: n, digit: i, max: col.m() });
    }
    Ok(col)
}

/// `a_{i,k}`: sum of the entries above digit `i` in column `k`.
pub fn a_coeff(m: &QMatrix, i: usize, k: usize) -> Result<Rational> {
    Ok(checked(m, i, k)?.a(i))
}

fn reflect(col: &Column, i: usize, n: usize) -> usize {
    if n % 2 == 1 {
        i
    } else {
        col.m() - i
    }
}

/// `q~_{i,n}`: `q_{i,n}` at odd `n`, `q_{m_n - i,n}` at even `n`.
pub fn q_tilde(m: &QMatrix, i: usize, n: usize) -> Result<Rational> {
    let col = checked(m, i, n)?;
    Ok(col.q(reflect(col, i, n)).clone())
}

/// `a~_{i,n}`: `a_{i,n}` at odd `n`, `a_{m_n - i,n}` at even `n`.
pub fn a_tilde(m: &QMatrix, i: usize, n: usize) -> Result<Rational> {
    let col = checked(m, i, n)?;
    Ok(col.a(reflect(col, i, n)))
}

/// `delta~_{i,n}`: `a_{i,n}` at odd `n`, `q_{m-i,n} + ... + q_{m,n}` at even `n`.
pub fn delta_tilde(m: &QMatrix, i: usize, n: usize) -> Result<Rational> {
    let col = checked(m, i, n)?;
    Ok(if n % 2 == 1 { col.a(i) } else { col.entries()[col.m() - i..].iter().sum() })
}

/// Series term at absolute column `p` for digit `d`, with the analytic sign
/// counted from column `start`.
pub(crate) fn term(m: &QMatrix, system: SystemKind, start: usize, p: usize, d: usize) -> Term {
    let col = m.column(p);
    match system {
        SystemKind::QTilde => Term::new(col.a(d), col.q(d).clone()),
        SystemKind::NegaAnalytic => Term::new(sign_pow(p - start + 1) * col.a(d), col.q(d).clone()),
        SystemKind::NegaGeometric => {
            let r = reflect(col, d, p);
            Term::new(col.a(r), col.q(r).clone())
        }
    }
}

/// Value of `stream` when its first digit sits in column `start`; analytic
/// signs restart at `start` (first term negative).
pub fn eval_stream_from(m: &QMatrix, system: SystemKind, start: usize, stream: &DigitStream) -> Result<Rational> {
    stream.check_from(m, start)?;
    let (prefix, cycle) = stream.terms_from(m, start, |p, d| term(m, system, start, p, d));
    Ok(periodic::sum(&prefix, &cycle))
}

/// Exact value of an eventually periodic digit stream.
pub fn eval_stream(m: &QMatrix, system: SystemKind, stream: &DigitStream) -> Result<Rational> {
    eval_stream_from(m, system, 1, stream)
}

/// Nega-geometric value computed as
/// `a_{i1,1} + sum_{n>=2} (-1)^(n-1) delta~_{in,n} prod_{j<n} q~
///  + sum_{n>=1} prod_{j<=2n-1} q~`.
///
/// Each of the three sums goes through the periodic engine separately; the
/// result must equal `eval_stream(.., NegaGeometric, ..)`.
pub fn eval_stream_delta_form(m: &QMatrix, stream: &DigitStream) -> Result<Rational> {
    stream.check(m)?;
    let q_t = |p: usize, d: usize| {
        let col = m.column(p);
        col.q(reflect(col, d, p)).clone()
    };
    // delta~ at column 1 is a_{i1,1}, so the leading term joins the sum
    let delta = |p: usize, d: usize| {
        let w = sign_pow(p - 1) * delta_tilde(m, d, p).expect("digits checked");
        Term::new(w, q_t(p, d))
    };
    let odd_products = |p: usize, d: usize| {
        let w = if p.is_multiple_of(2) { Rational::one() } else { Rational::zero() };
        Term::new(w, q_t(p, d))
    };
    let (dp, dc) = stream.terms_from(m, 1, delta);
    let (op, oc) = stream.terms_from(m, 1, odd_products);
    Ok(periodic::sum(&dp, &dc) + periodic::sum(&op, &oc))
}

/// Stream read from column `start` whose digit at each column is `rule(column, j)`.
pub fn rule_stream(m: &QMatrix, start: usize, rule: impl Fn(&Column, usize) -> usize) -> DigitStream {
    let settle = m.settle(start);
    let head = (start..=settle).map(|j| rule(m.column(j), j)).collect();
    let tail = (settle + 1..=settle + m.cycle_len()).map(|j| rule(m.column(j), j)).collect();
    DigitStream { head: DigitWord(head), tail: DigitWord(tail) }
}

/// Partial sum and digit-factor product of a finite word (positions 1..=n).
pub(crate) fn word_partial(m: &QMatrix, system: SystemKind, w: &DigitWord) -> (Rational, Rational) {
    let terms: Vec<Term> = w.0.iter().enumerate().map(|(idx, &d)| term(m, system, 1, idx + 1, d)).collect();
    periodic::partial(&terms)
}

/// Range `[inf, sup]` of the tail values read from column `start` in `system`.
pub fn tail_range(m: &QMatrix, system: SystemKind, start: usize) -> Interval {
    let value = |s: &DigitStream| eval_stream_from(m, system, start, s).expect("rule digits are in range");
    match system {
        SystemKind::QTilde => {
            let lo = rule_stream(m, start, |_, _| 0);
            let hi = rule_stream(m, start, |c, _| c.m());
            Interval::new(value(&lo), value(&hi))
        }
        SystemKind::NegaGeometric => {
            let lo = rule_stream(m, start, |c, j| reflect(c, 0, j));
            let hi = rule_stream(m, start, |c, j| reflect(c, c.m(), j));
            Interval::new(value(&lo), value(&hi))
        }
        SystemKind::NegaAnalytic => {
            let e = m.analytic_extremes();
            Interval::new(e.inf(start).clone(), e.sup(start).clone())
        }
    }
}

/// Combines a word's partial sum with the tail range from the next column.
pub(crate) fn extent(
    system: SystemKind,
    n: usize,
    partial: &Rational,
    product: &Rational,
    tail: &Interval,
) -> Interval {
    let scale = if system == SystemKind::NegaAnalytic && n % 2 == 1 { -product } else { product.clone() };
    Interval::spanning(partial + &scale * tail.lo(), partial + &scale * tail.hi())
}

/// Exact closed interval of all values whose expansion in `system` starts
/// with `w`. Both endpoints are attained by some continuation.
pub fn eval(m: &QMatrix, system: SystemKind, w: &DigitWord) -> Result<Interval> {
    w.check(m)?;
    let (partial, product) = word_partial(m, system, w);
    let tail = tail_range(m, system, w.len() + 1);
    Ok(extent(system, w.len(), &partial, &product, &tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn col(v: &[(i64, i64)]) -> Column {
        Column::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn binary() -> QMatrix {
        QMatrix::validate(vec![], vec![Column::uniform(2)]).unwrap()
    }

    fn stream(s: &str) -> DigitStream {
        s.parse().unwrap()
    }

    #[test]
    fn coefficient_tables() {
        let m = QMatrix::validate(vec![], vec![col(&[(1, 4), (1, 4), (1, 2)]), col(&[(1, 3), (2, 3)])]).unwrap();
        assert_eq!(a_coeff(&m, 0, 1).unwrap(), int(0));
        assert_eq!(a_coeff(&m, 2, 1).unwrap(), rat(1, 2));
        assert_eq!(a_coeff(&m, 1, 2).unwrap(), rat(1, 3));
        assert_eq!(q_tilde(&m, 0, 2).unwrap(), rat(2, 3));
        assert_eq!(a_tilde(&m, 0, 2).unwrap(), rat(1, 3));
        assert_eq!(delta_tilde(&m, 0, 1).unwrap(), int(0));
        // column 3 repeats (1/4,1/4,1/2) but we want an even column with 3 letters
        let even3 = QMatrix::validate(vec![], vec![col(&[(1, 3), (2, 3)]), col(&[(1, 4), (1, 4), (1, 2)])]).unwrap();
        assert_eq!(delta_tilde(&even3, 1, 2).unwrap(), rat(3, 4));
        assert!(matches!(a_coeff(&m, 3, 1), Err(Error::DigitOutOfRange { .. })));
    }

    #[test]
    fn word_and_stream_parsing() {
        assert_eq!("1,0,2".parse::<DigitWord>().unwrap(), DigitWord(vec![1, 0, 2]));
        assert_eq!("".parse::<DigitWord>().unwrap(), DigitWord::default());
        assert!("1,x".parse::<DigitWord>().is_err());
        let s = stream("1,0;2,1");
        assert_eq!(s.to_string(), "1,0;2,1");
        assert_eq!(stream(";1").head.len(), 0);
        assert_eq!("1,0;".parse::<DigitStream>().unwrap_err(), Error::EmptyTail);
        assert!("1,0".parse::<DigitStream>().is_err());
    }

    #[test]
    fn canonical_streams() {
        let a = stream("0,1,0,1;0,1");
        assert_eq!(a.canonical(), stream(";0,1"));
        assert!(stream("1;0,1,0,1").same_sequence(&stream("1,0;1,0")));
        assert!(!stream(";0,1").same_sequence(&stream(";1,0")));
    }

    #[test]
    fn binary_streams() {
        let m = binary();
        assert_eq!(eval_stream(&m, SystemKind::NegaAnalytic, &stream(";0")).unwrap(), int(0));
        assert_eq!(eval_stream(&m, SystemKind::NegaAnalytic, &stream(";1")).unwrap(), rat(-1, 3));
        assert_eq!(eval_stream(&m, SystemKind::QTilde, &stream("1;0")).unwrap(), rat(1, 2));
        assert_eq!(eval_stream(&m, SystemKind::QTilde, &stream(";1")).unwrap(), int(1));
    }

    #[test]
    fn binary_intervals() {
        let m = binary();
        let empty = DigitWord::default();
        assert_eq!(eval(&m, SystemKind::NegaGeometric, &empty).unwrap(), Interval::new(int(0), int(1)));
        assert_eq!(eval(&m, SystemKind::NegaAnalytic, &empty).unwrap(), Interval::new(rat(-2, 3), rat(1, 3)));
        assert_eq!(
            eval(&m, SystemKind::NegaAnalytic, &DigitWord(vec![1])).unwrap(),
            Interval::new(rat(-2, 3), rat(-1, 6))
        );
    }

    #[test]
    fn analytic_word_brute_force() {
        // every depth-12 continuation of "1", closed with either alternating
        // tail, stays in eval("1") and both bounds are attained
        let m = binary();
        let iv = eval(&m, SystemKind::NegaAnalytic, &DigitWord(vec![1])).unwrap();
        let mut lo = int(10);
        let mut hi = int(-10);
        for bits in 0u32..(1 << 12) {
            let mut head: Vec<usize> = vec![1];
            head.extend((0..12).map(|b| ((bits >> b) & 1) as usize));
            for tail in [vec![1, 0], vec![0, 1]] {
                let v =
                    eval_stream(&m, SystemKind::NegaAnalytic, &DigitStream::new(head.clone(), tail).unwrap()).unwrap();
                assert!(iv.contains(&v));
                lo = lo.min(v.clone());
                hi = hi.max(v);
            }
        }
        assert_eq!(&lo, iv.lo());
        assert_eq!(&hi, iv.hi());
    }

    #[test]
    fn delta_form_matches_on_examples() {
        let m = QMatrix::validate(
            vec![col(&[(1, 4), (3, 4)])],
            vec![col(&[(1, 3), (1, 6), (1, 2)]), col(&[(2, 5), (3, 5)])],
        )
        .unwrap();
        for s in [";0", ";1", "2;1,0", "1,2,1;0,1,2", "0;2"] {
            let s = stream(s);
            if s.check(&m).is_err() {
                continue;
            }
            assert_eq!(
                eval_stream(&m, SystemKind::NegaGeometric, &s).unwrap(),
                eval_stream_delta_form(&m, &s).unwrap(),
                "{s}"
            );
        }
        // without a prefix the first column falls inside the repeating part
        let m = QMatrix::validate(vec![], vec![col(&[(2, 3), (1, 3)])]).unwrap();
        for s in [";1,0", ";1", ";0,1"] {
            let s = stream(s);
            assert_eq!(
                eval_stream(&m, SystemKind::NegaGeometric, &s).unwrap(),
                eval_stream_delta_form(&m, &s).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn misaligned_tail_detected() {
        // tail digit 2 fits the 3-letter odd columns but not the binary even ones
        let m = QMatrix::validate(vec![], vec![Column::uniform(3), Column::uniform(2)]).unwrap();
        let err = eval_stream(&m, SystemKind::QTilde, &stream(";2,1,0")).unwrap_err();
        assert!(matches!(err, Error::MisalignedTail { .. }), "{err:?}");
        let err = eval_stream(&m, SystemKind::QTilde, &stream("2;2")).unwrap_err();
        assert!(matches!(err, Error::DigitOutOfRange { position: 2, .. }), "{err:?}");
    }

    #[test]
    fn qtilde_monotone_at_rank_one() {
        let m = QMatrix::validate(vec![], vec![col(&[(1, 5), (1, 2), (3, 10)])]).unwrap();
        let lows: Vec<Rational> =
            (0..3).map(|i| eval(&m, SystemKind::QTilde, &DigitWord(vec![i])).unwrap().lo().clone()).collect();
        assert!(lows.windows(2).all(|w| w[0] < w[1]));
    }
}
