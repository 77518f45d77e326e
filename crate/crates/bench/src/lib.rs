//! Shared fixtures for the criterion benches: deterministic channels,
//! books and received vectors at the sizes the benchmarks sweep.

use lcitgsm::channel::{sample_channel, substream, StreamTag};
use lcitgsm::mapping::equivalent_channel;
use lcitgsm::{CMat, Constellation, ConstellationKind, PatternBook, Scheme};
use num_complex::Complex64;

pub struct Fixture {
    pub book: PatternBook,
    pub constellation: Constellation,
    pub h: CMat,
    pub g: CMat,
    pub y: Vec<Complex64>,
}

/// One deterministic detection problem: pattern 1, symbol 0, mid-SNR noise.
pub fn fixture(scheme: Scheme, nt: usize, nr: usize, kind: ConstellationKind, m: usize) -> Fixture {
    let book = PatternBook::build(scheme, nt, None).unwrap();
    let constellation = Constellation::build(kind, m).unwrap();
    let mut rng = substream(42, 0, StreamTag::Channel);
    let h = sample_channel(nt, nr, &mut rng);
    let eq = equivalent_channel(&h, &book, &constellation).unwrap();
    let noise = lcitgsm::NoiseModel::from_snr_db(10.0);
    let mut noise_rng = substream(42, 0, StreamTag::Noise);
    let y = lcitgsm::channel::transmit(
        eq.g.col(1.min(book.len() - 1)),
        constellation.symbol(0),
        &noise,
        &mut noise_rng,
    )
    .unwrap();
    Fixture {
        book,
        constellation,
        h,
        g: eq.g,
        y,
    }
}
