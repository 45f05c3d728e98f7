//! Encoding reals into digit words and the digit-level maps between systems.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::qmatrix::QMatrix;
use crate::rational::{int, sign_pow, Rational};
use crate::series::{self, DigitStream, DigitWord, SystemKind};

fn unit_half_open(x: &Rational) -> Result<()> {
    if x < &Rational::zero() || x >= &int(1) {
        return Err(Error::OutOfRange { x: x.clone(), range: Box::new(Interval::new(int(0), int(1))) });
    }
    Ok(())
}

/// Greedy cylinder descent for the positive expansion.
///
/// At column `k` the digit is the `i` with `a_{i,k} <= r < a_{i+1,k}`; points
/// on a shared boundary therefore go to the right-hand cylinder.
pub fn encode_q(m: &QMatrix, x: &Rational, depth: usize) -> Result<DigitWord> {
    unit_half_open(x)?;
    let mut r = x.clone();
    let mut digits = Vec::with_capacity(depth);
    for k in 1..=depth {
        let col = m.column(k);
        let mut i = 0;
        let mut a = Rational::zero();
        while i < col.m() && &a + col.q(i) <= r {
            a += col.q(i);
            i += 1;
        }
        r = (r - a) / col.q(i);
        digits.push(i);
    }
    Ok(DigitWord(digits))
}

/// Descent through the alternating partition of `[0, 1]`: odd ranks are laid
/// out left to right, even ranks right to left. Boundary points go to the
/// geometrically right-hand segment, as in [`encode_q`].
pub fn encode_nega_geometric(m: &QMatrix, x: &Rational, depth: usize) -> Result<DigitWord> {
    unit_half_open(x)?;
    let mut r = x.clone();
    let mut digits = Vec::with_capacity(depth);
    for k in 1..=depth {
        let m_k = m.m(k);
        let (digit, left, len) = (0..=m_k)
            .map(|i| {
                let left = series::a_tilde(m, i, k).expect("digit within column");
                let len = series::q_tilde(m, i, k).expect("digit within column");
                (i, left, len)
            })
            .find(|(_, left, len)| left <= &r && r < left + len)
            .expect("segments of a column tile [0, 1)");
        r = (r - left) / len;
        digits.push(digit);
    }
    Ok(DigitWord(digits))
}

/// Result of encoding into the analytic nega-expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticEncoding {
    pub word: DigitWord,
    /// Sum over ranks of admissible digits other than the chosen one. Zero
    /// means the expansion prefix is unique.
    pub alternatives: usize,
}

/// At each rank picks the smallest digit whose cylinder contains `x`.
///
/// Neighbouring analytic cylinders may overlap, so the choice is not always
/// unique; `alternatives` counts the digits passed over. When no child
/// cylinder contains `x` the error reports the rank and the uncovered gap.
pub fn encode_nega_analytic(m: &QMatrix, x: &Rational, depth: usize) -> Result<AnalyticEncoding> {
    let range = series::tail_range(m, SystemKind::NegaAnalytic, 1);
    if !range.contains(x) {
        return Err(Error::OutOfRange { x: x.clone(), range: Box::new(range) });
    }
    let mut partial = Rational::zero();
    let mut product = int(1);
    let mut digits = Vec::with_capacity(depth);
    let mut alternatives = 0;
    for k in 1..=depth {
        let col = m.column(k);
        let tail = series::tail_range(m, SystemKind::NegaAnalytic, k + 1);
        let children: Vec<(Rational, Rational, Interval)> = (0..=col.m())
            .map(|c| {
                let v = &partial + sign_pow(k) * col.a(c) * &product;
                let p = &product * col.q(c);
                let iv = series::extent(SystemKind::NegaAnalytic, k, &v, &p, &tail);
                (v, p, iv)
            })
            .collect();
        let mut admissible = children.iter().enumerate().filter(|(_, (_, _, iv))| iv.contains(x));
        let Some((c, (v, p, _))) = admissible.next() else {
            let below = children.iter().map(|(_, _, iv)| iv.hi()).filter(|h| *h < x).max();
            let above = children.iter().map(|(_, _, iv)| iv.lo()).filter(|l| *l > x).min();
            let gap =
                Interval::new(below.cloned().unwrap_or_else(|| x.clone()), above.cloned().unwrap_or_else(|| x.clone()));
            return Err(Error::GapHit { rank: k, gap: Box::new(gap) });
        };
        alternatives += admissible.count();
        digits.push(c);
        partial = v.clone();
        product = p.clone();
    }
    Ok(AnalyticEncoding { word: DigitWord(digits), alternatives })
}

/// Encodes in any system; the analytic system reports its canonical choice only.
pub fn encode(m: &QMatrix, system: SystemKind, x: &Rational, depth: usize) -> Result<DigitWord> {
    match system {
        SystemKind::QTilde => encode_q(m, x, depth),
        SystemKind::NegaGeometric => encode_nega_geometric(m, x, depth),
        SystemKind::NegaAnalytic => encode_nega_analytic(m, x, depth).map(|e| e.word),
    }
}

fn flip_digit(m: &QMatrix, position: usize, d: usize) -> Result<usize> {
    let max = m.m(position);
    if d > max {
        return Err(Error::DigitOutOfRange { position, digit: d, max });
    }
    Ok(if position.is_multiple_of(2) { max - d } else { d })
}

/// Reflects every even-position digit, `i_{2k} -> m_{2k} - i_{2k}`. This maps
/// positive-expansion words to nega-geometric words with the same value and
/// back; it is an involution.
pub fn flip(m: &QMatrix, w: &DigitWord) -> Result<DigitWord> {
    w.0.iter().enumerate().map(|(idx, &d)| flip_digit(m, idx + 1, d)).collect::<Result<Vec<_>>>().map(DigitWord)
}

/// [`flip`] for streams; the result is returned in canonical form.
pub fn flip_stream(m: &QMatrix, s: &DigitStream) -> Result<DigitStream> {
    s.check(m)?;
    let settle = m.prefix_len().max(s.head.len());
    let period = num_integer::lcm(s.tail.len(), m.cycle_len());
    let digits = (1..=settle + period).map(|p| flip_digit(m, p, s.digit(p))).collect::<Result<Vec<_>>>()?;
    let (head, tail) = digits.split_at(settle);
    Ok(DigitStream::new(head.to_vec(), tail.to_vec())?.canonical())
}

/// Drops the first `k` digits.
pub fn shift(w: &DigitWord, k: usize) -> Result<DigitWord> {
    if k > w.len() {
        return Err(Error::ShiftTooLong { k, len: w.len() });
    }
    Ok(DigitWord(w.0[k..].to_vec()))
}

/// Drops the first `k` digits of a stream; past the head the tail is rotated.
pub fn shift_stream(s: &DigitStream, k: usize) -> DigitStream {
    let h = s.head.len();
    if k <= h {
        return DigitStream { head: DigitWord(s.head.0[k..].to_vec()), tail: s.tail.clone() };
    }
    let mut tail = s.tail.0.clone();
    let len = tail.len();
    tail.rotate_left((k - h) % len);
    DigitStream { head: DigitWord::default(), tail: DigitWord(tail) }
}
