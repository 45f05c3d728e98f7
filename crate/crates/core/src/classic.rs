//! Matrices of the classical systems: base `s` (and base `-s`) and Cantor
//! series with bases `d_1, d_2, ...` (and their alternating variant).

use crate::error::{Error, Result};
use crate::qmatrix::{Column, QMatrix};

/// Single uniform column with `s` digits. Read positively it gives the
/// base-`s` expansion; read analytically it gives base `-s`.
pub fn from_base_s(s: u64) -> Result<QMatrix> {
    if s < 2 {
        return Err(Error::BadBase { base: s });
    }
    QMatrix::validate(vec![], vec![Column::uniform(s)])
}

/// Uniform columns with `d_k` digits each.
///
/// With `cycle` the list is the repeating part. Without it the list is a
/// prefix and its last base repeats forever.
pub fn from_cantor(d: &[u64], cycle: bool) -> Result<QMatrix> {
    let Some(&last) = d.last() else {
        return Err(Error::BadBase { base: 0 });
    };
    if let Some(&bad) = d.iter().find(|&&b| b < 2) {
        return Err(Error::BadBase { base: bad });
    }
    let columns: Vec<Column> = d.iter().map(|&b| Column::uniform(b)).collect();
    if cycle {
        QMatrix::validate(vec![], columns)
    } else {
        QMatrix::validate(columns, vec![Column::uniform(last)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::{eval_stream, DigitStream, SystemKind};

    #[test]
    fn bad_bases() {
        assert_eq!(from_base_s(1).unwrap_err(), Error::BadBase { base: 1 });
        assert_eq!(from_cantor(&[3, 1], true).unwrap_err(), Error::BadBase { base: 1 });
        assert!(from_cantor(&[], false).is_err());
    }

    #[test]
    fn base_ten_digits() {
        let m = from_base_s(10).unwrap();
        let s: DigitStream = "1,2;5".parse().unwrap();
        // 0.125555... = 113/900
        assert_eq!(eval_stream(&m, SystemKind::QTilde, &s).unwrap(), rat(113, 900));
        // -1/10 + 2/100 - 5/1000 + 5/10^4 - ... = -1/10 + 2/100 - (5/1000)/(1 + 1/10)
        let v = rat(-1, 10) + rat(2, 100) - rat(5, 1000) / rat(11, 10);
        assert_eq!(eval_stream(&m, SystemKind::NegaAnalytic, &s).unwrap(), v);
    }

    #[test]
    fn cantor_prefix_repeats_last() {
        let m = from_cantor(&[2, 3], false).unwrap();
        assert_eq!(m.prefix_len(), 2);
        assert_eq!(m.m(5), 2);
        let m = from_cantor(&[2, 3], true).unwrap();
        assert_eq!(m.m(3), 1);
        assert_eq!(m.m(4), 2);
        // 1/2 + 2/6 + ... with digits (1, 2) repeated: sum of max digits is 1
        let s: DigitStream = ";1,2".parse().unwrap();
        assert_eq!(eval_stream(&m, SystemKind::QTilde, &s).unwrap(), rat(1, 1));
    }
}
