use negaq::qmatrix::Column;
use negaq::rational::rat;
use negaq::{DigitStream, QMatrix, Rational};
use rand::Rng;

/// Column of `letters` positive entries with small integer weights.
pub fn random_column<R: Rng>(rng: &mut R, letters: usize) -> Column {
    let w: Vec<i64> = (0..letters).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    Column::new(w.into_iter().map(|x| rat(x, total)).collect())
}

/// Random matrix with alphabets of 2..=`max_letters` letters, up to two
/// prefix columns and a cycle of 1..=`max_cycle` columns.
pub fn random_matrix<R: Rng>(rng: &mut R, max_letters: usize, max_cycle: usize) -> QMatrix {
    let prefix_len = rng.gen_range(0..=2);
    let cycle_len = rng.gen_range(1..=max_cycle);
    let prefix = (0..prefix_len).map(|_| {
        let l = rng.gen_range(2..=max_letters);
        random_column(rng, l)
    });
    let prefix: Vec<Column> = prefix.collect();
    let cycle: Vec<Column> = (0..cycle_len)
        .map(|_| {
            let l = rng.gen_range(2..=max_letters);
            random_column(rng, l)
        })
        .collect();
    QMatrix::validate(prefix, cycle).unwrap()
}

/// Random admissible stream: head up to 4 digits; the tail is either aligned
/// with the matrix cycle or uses digits allowed in every column.
pub fn random_stream<R: Rng>(rng: &mut R, m: &QMatrix) -> DigitStream {
    let settle = m.prefix_len().max(rng.gen_range(0..=4));
    let head: Vec<usize> = (1..=settle).map(|j| rng.gen_range(0..=m.m(j))).collect();
    let tail: Vec<usize> = if rng.gen_bool(0.5) {
        let reps = rng.gen_range(1..=2);
        (0..reps * m.cycle_len()).map(|r| rng.gen_range(0..=m.m(settle + 1 + r))).collect()
    } else {
        let floor = (1..=m.prefix_len() + m.cycle_len()).map(|j| m.m(j)).min().unwrap();
        (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..=floor)).collect()
    };
    DigitStream::new(head, tail).unwrap()
}

/// Random rational in `[0, 1)` with denominator up to 10^6.
pub fn random_unit<R: Rng>(rng: &mut R) -> Rational {
    let d: i64 = rng.gen_range(1..=1_000_000);
    rat(rng.gen_range(0..d), d)
}
