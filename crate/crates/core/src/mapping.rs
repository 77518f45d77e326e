//! Bit-to-antenna mapping: pattern books, bit blocks and the equivalent
//! single-stream channel.
//!
//! A pattern book is the ordered spatial codebook of one mapping scheme.
//! The book index k always equals the integer value of the spatial bits
//! (first spatial bit = most significant), so spatial-bit Hamming distances
//! reduce to popcounts of XORed indices.
//!
//! Schemes:
//!
//! - `DtaaR`: every spatial bit drives one antenna directly; the all-zero
//!   block activates *all* antennas and flags the symbol for rotation,
//!   giving Nt spatial bits from Nt antennas.
//! - `DtaaD`: antennas 1..Nt-1 are driven directly by Nt-1 bits; antenna Nt
//!   fires alone for the all-zero block, so no rotation is needed.
//! - `Lut`: 2^(Nt-1) patterns picked greedily to maximise the Hamming
//!   separation of the activation indicator vectors, preferring few active
//!   antennas.
//! - `Gsm` / `Sm`: fixed activation size baselines using the first
//!   2^floor(log2 C(Nt,Na)) combinations in lexicographic order.

use crate::constellation::Constellation;
use crate::mat::CMat;
use crate::{Error, Result};
use num_complex::Complex64;

/// Spatial mapping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    DtaaR,
    DtaaD,
    Lut,
    Gsm,
    Sm,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::DtaaR => "dtaar",
            Scheme::DtaaD => "dtaad",
            Scheme::Lut => "lut",
            Scheme::Gsm => "gsm",
            Scheme::Sm => "sm",
        }
    }
}

/// One block of source bits: `spatial_len` antenna-selection bits followed
/// by `symbol_len` modulation bits. Bit 0 of each field is the last
/// (least significant) bit of that field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitBlock {
    pub spatial: u32,
    pub symbol: u32,
    pub spatial_len: u32,
    pub symbol_len: u32,
}

impl BitBlock {
    pub fn new(spatial: u32, symbol: u32, spatial_len: u32, symbol_len: u32) -> Self {
        debug_assert!(spatial_len == 32 || spatial < (1 << spatial_len));
        debug_assert!(symbol < (1 << symbol_len));
        BitBlock {
            spatial,
            symbol,
            spatial_len,
            symbol_len,
        }
    }

    /// Total block length m = m_s + m_a.
    pub fn len(&self) -> u32 {
        self.spatial_len + self.symbol_len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Hamming distance over all m bits.
    pub fn hamming(&self, other: &BitBlock) -> u32 {
        debug_assert_eq!(self.spatial_len, other.spatial_len);
        debug_assert_eq!(self.symbol_len, other.symbol_len);
        (self.spatial ^ other.spatial).count_ones() + (self.symbol ^ other.symbol).count_ones()
    }

    /// MSB-first bit string, spatial bits then symbol bits.
    pub fn bit_string(&self) -> String {
        let mut s = String::with_capacity(self.len() as usize);
        for i in (0..self.spatial_len).rev() {
            s.push(if (self.spatial >> i) & 1 == 1 { '1' } else { '0' });
        }
        for i in (0..self.symbol_len).rev() {
            s.push(if (self.symbol >> i) & 1 == 1 { '1' } else { '0' });
        }
        s
    }
}

/// Ordered list of transmit-antenna activation patterns for one scheme.
///
/// Patterns are stored as bit masks over antennas (mask bit i-1 = antenna
/// i active). Exactly one entry may carry the rotation flag: the all-active
/// pattern that DTAA-R assigns to the all-zero spatial block.
#[derive(Debug, Clone)]
pub struct PatternBook {
    scheme: Scheme,
    nt: usize,
    patterns: Vec<u32>,
    rotated: Vec<bool>,
    spatial_bits: u32,
}

impl PatternBook {
    /// Construct the pattern book for `scheme` over `nt` antennas.
    /// `na` is required for the GSM baseline and must be 1 for SM when
    /// given.
    pub fn build(scheme: Scheme, nt: usize, na: Option<usize>) -> Result<Self> {
        if !(2..=16).contains(&nt) {
            return Err(Error::AntennaCountRange {
                nt,
                min: 2,
                max: 16,
                context: "pattern books",
            });
        }
        match scheme {
            Scheme::DtaaR => {
                let m_s = nt as u32;
                let n = 1usize << m_s;
                let mut patterns = Vec::with_capacity(n);
                let mut rotated = Vec::with_capacity(n);
                patterns.push(full_mask(nt));
                rotated.push(true);
                for k in 1..n {
                    patterns.push(support_mask(k as u32, m_s));
                    rotated.push(false);
                }
                Ok(PatternBook {
                    scheme,
                    nt,
                    patterns,
                    rotated,
                    spatial_bits: m_s,
                })
            }
            Scheme::DtaaD => {
                let m_s = nt as u32 - 1;
                let n = 1usize << m_s;
                let mut patterns = Vec::with_capacity(n);
                patterns.push(1u32 << (nt - 1)); // dedicated last antenna
                for k in 1..n {
                    patterns.push(support_mask(k as u32, m_s));
                }
                Ok(PatternBook {
                    scheme,
                    nt,
                    patterns,
                    rotated: vec![false; n],
                    spatial_bits: m_s,
                })
            }
            Scheme::Lut => {
                if nt > 12 {
                    return Err(Error::AntennaCountRange {
                        nt,
                        min: 2,
                        max: 12,
                        context: "the greedy LUT search",
                    });
                }
                let patterns = lut_patterns(nt);
                let m_s = nt as u32 - 1;
                debug_assert_eq!(patterns.len(), 1 << m_s);
                Ok(PatternBook {
                    scheme,
                    nt,
                    rotated: vec![false; patterns.len()],
                    patterns,
                    spatial_bits: m_s,
                })
            }
            Scheme::Gsm | Scheme::Sm => {
                let na = match (scheme, na) {
                    (Scheme::Sm, None) => 1,
                    (_, Some(na)) => na,
                    _ => return Err(Error::MissingActiveCount),
                };
                if scheme == Scheme::Sm && na != 1 {
                    return Err(Error::InvalidActiveCount { na, nt });
                }
                if na < 1 || na > nt {
                    return Err(Error::InvalidActiveCount { na, nt });
                }
                let m_s = binom(nt, na).ilog2();
                let n = 1usize << m_s;
                let patterns: Vec<u32> = combinations_lex(nt, na).into_iter().take(n).collect();
                Ok(PatternBook {
                    scheme,
                    nt,
                    rotated: vec![false; n],
                    patterns,
                    spatial_bits: m_s,
                })
            }
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Spatial alphabet size N = 2^m_s.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Spatial bits per channel use, m_s.
    pub fn spatial_bits(&self) -> u32 {
        self.spatial_bits
    }

    /// Activation mask of pattern k (bit i-1 = antenna i).
    #[inline]
    pub fn pattern(&self, k: usize) -> u32 {
        self.patterns[k]
    }

    /// Number of active antennas in pattern k.
    #[inline]
    pub fn active_count(&self, k: usize) -> u32 {
        self.patterns[k].count_ones()
    }

    /// 1-based antenna indices of pattern k, ascending.
    pub fn antennas(&self, k: usize) -> Vec<usize> {
        let mask = self.patterns[k];
        (1..=self.nt).filter(|i| mask >> (i - 1) & 1 == 1).collect()
    }

    /// Whether pattern k transmits the rotated symbol variant.
    #[inline]
    pub fn is_rotated(&self, k: usize) -> bool {
        self.rotated[k]
    }

    /// Bits per channel use for this book and constellation: m_s + log2 M.
    pub fn throughput(&self, constellation: &Constellation) -> u32 {
        self.spatial_bits + constellation.bits_per_symbol()
    }

    /// Spatial alphabet size of a scheme without building the book.
    pub fn alphabet_size(scheme: Scheme, nt: usize, na: Option<usize>) -> Result<usize> {
        if !(2..=16).contains(&nt) {
            return Err(Error::AntennaCountRange {
                nt,
                min: 2,
                max: 16,
                context: "pattern books",
            });
        }
        Ok(match scheme {
            Scheme::DtaaR => 1 << nt,
            Scheme::DtaaD | Scheme::Lut => 1 << (nt - 1),
            Scheme::Gsm => {
                let na = na.ok_or(Error::MissingActiveCount)?;
                if na < 1 || na > nt {
                    return Err(Error::InvalidActiveCount { na, nt });
                }
                1 << binom(nt, na).ilog2()
            }
            Scheme::Sm => 1 << binom(nt, 1).ilog2(),
        })
    }

    /// Per-pattern rotation factor rho_k applied inside the equivalent
    /// channel column: exp(j*pi/Mn) for the flagged pattern, 1 elsewhere.
    pub fn rotation(&self, k: usize, constellation: &Constellation) -> Complex64 {
        if self.rotated[k] {
            constellation.rotation_factor()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Pattern-overlap covariance C with `C[k,kt] = rho_k * conj(rho_kt) *
    /// |S_k intersect S_kt|`. Hermitian PSD with `C[k,k] = |S_k|`.
    pub fn overlap_matrix(&self, constellation: &Constellation) -> CMat {
        let n = self.len();
        let rho: Vec<Complex64> = (0..n).map(|k| self.rotation(k, constellation)).collect();
        CMat::from_fn(n, n, |k, kt| {
            let shared = (self.patterns[k] & self.patterns[kt]).count_ones() as f64;
            rho[k] * rho[kt].conj() * shared
        })
    }

    /// Write the equivalent channel columns g_k = rho_k * sum of the
    /// pattern's physical channel columns into `g` (shape Nr x N).
    pub fn equivalent_columns(
        &self,
        h: &CMat,
        constellation: &Constellation,
        g: &mut CMat,
    ) -> Result<()> {
        if h.ncols() != self.nt {
            return Err(Error::DimensionMismatch(format!(
                "channel has {} columns, book expects {}",
                h.ncols(),
                self.nt
            )));
        }
        if g.nrows() != h.nrows() || g.ncols() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "equivalent channel must be {}x{}, got {}x{}",
                h.nrows(),
                self.len(),
                g.nrows(),
                g.ncols()
            )));
        }
        let nr = h.nrows();
        for k in 0..self.len() {
            let rho = self.rotation(k, constellation);
            let col = g.col_mut(k);
            col.fill(Complex64::new(0.0, 0.0));
            let mut mask = self.patterns[k];
            while mask != 0 {
                let i = mask.trailing_zeros() as usize;
                let hcol = h.col(i);
                for r in 0..nr {
                    col[r] += hcol[r];
                }
                mask &= mask - 1;
            }
            if self.rotated[k] {
                for v in col.iter_mut() {
                    *v *= rho;
                }
            }
        }
        Ok(())
    }
}

/// Equivalent channel of one fading realisation: G's column k is the summed
/// (and possibly rotated) channel response of pattern k, so detection
/// reduces to a single-stream search over G's columns.
#[derive(Debug, Clone)]
pub struct EquivalentChannel {
    /// Nr x N equivalent channel.
    pub g: CMat,
    /// The underlying Nr x Nt physical channel.
    pub h: CMat,
    /// N x N pattern-overlap covariance.
    pub overlap: CMat,
}

/// Build the equivalent channel matrix and overlap covariance for `h`.
pub fn equivalent_channel(
    h: &CMat,
    book: &PatternBook,
    constellation: &Constellation,
) -> Result<EquivalentChannel> {
    let mut g = CMat::zeros(h.nrows(), book.len());
    book.equivalent_columns(h, constellation, &mut g)?;
    Ok(EquivalentChannel {
        g,
        h: h.clone(),
        overlap: book.overlap_matrix(constellation),
    })
}

/// Map one bit block to its pattern index, transmit symbol and transmit
/// vector. The symbol is rotated when the selected pattern is flagged; no
/// per-pattern power renormalisation is applied.
pub fn encode(
    book: &PatternBook,
    constellation: &Constellation,
    bits: BitBlock,
) -> Result<(usize, Complex64, Vec<Complex64>)> {
    if bits.spatial_len != book.spatial_bits()
        || bits.symbol_len != constellation.bits_per_symbol()
    {
        return Err(Error::BitLengthMismatch(format!(
            "block is {}+{} bits, book/constellation expect {}+{}",
            bits.spatial_len,
            bits.symbol_len,
            book.spatial_bits(),
            constellation.bits_per_symbol()
        )));
    }
    let k = bits.spatial as usize;
    let l = constellation.index_of_label(bits.symbol);
    let mut s = constellation.symbol(l);
    if book.is_rotated(k) {
        s *= constellation.rotation_factor();
        // Clean axis-crossing residue so BPSK rotations print exactly.
        if s.re.abs() < 1e-12 {
            s.re = 0.0;
        }
        if s.im.abs() < 1e-12 {
            s.im = 0.0;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); book.nt()];
    let mut mask = book.pattern(k);
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        x[i] = s;
        mask &= mask - 1;
    }
    Ok((k, s, x))
}

/// Mask with the spatial bits of `k` assigned MSB-first to antennas 1..=w.
#[inline]
fn support_mask(k: u32, width: u32) -> u32 {
    // Spatial bit i (1-based, MSB first) drives antenna i (mask bit i-1).
    k.reverse_bits() >> (32 - width)
}

fn full_mask(nt: usize) -> u32 {
    (1u32 << nt) - 1
}

fn binom(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut num = 1usize;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

/// All size-`na` subsets of 1..=nt as masks, ordered lexicographically by
/// their ascending antenna tuples: (1,2) < (1,3) < ... < (2,3) < ...
fn combinations_lex(nt: usize, na: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(binom(nt, na));
    let mut idx: Vec<usize> = (0..na).collect();
    loop {
        out.push(idx.iter().fold(0u32, |m, &i| m | (1 << i)));
        // Advance to the next combination.
        let mut pos = na;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + nt - na {
                idx[pos] += 1;
                for j in pos + 1..na {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
        if na == 0 {
            return out;
        }
    }
}

/// Greedy LUT selection: walk activation sizes upwards and, inside each
/// size class, repeatedly admit the candidate maximising first the minimum
/// and then the total Hamming distance to the already-admitted patterns of
/// that class, breaking remaining ties towards the lexicographically
/// smallest antenna tuple.
fn lut_patterns(nt: usize) -> Vec<u32> {
    let needed = 1usize << (nt - 1);
    let mut book = Vec::with_capacity(needed);
    'outer: for na in 1..=nt {
        let candidates = combinations_lex(nt, na);
        let mut chosen: Vec<u32> = Vec::new();
        while chosen.len() < candidates.len() {
            if book.len() == needed {
                break 'outer;
            }
            let mut best: Option<(u32, u32, u32)> = None; // (min_d, sum_d, mask)
            for &cand in &candidates {
                if chosen.contains(&cand) {
                    continue;
                }
                let mut min_d = u32::MAX;
                let mut sum_d = 0u32;
                for &sel in &chosen {
                    let d = (cand ^ sel).count_ones();
                    min_d = min_d.min(d);
                    sum_d += d;
                }
                let better = match best {
                    None => true,
                    Some((bm, bs, _)) => min_d > bm || (min_d == bm && sum_d > bs),
                };
                if better {
                    best = Some((min_d, sum_d, cand));
                }
            }
            let (_, _, mask) = best.expect("class not exhausted");
            chosen.push(mask);
            book.push(mask);
        }
    }
    book
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::Constellation;

    fn masks(patterns: &[&[usize]]) -> Vec<u32> {
        patterns
            .iter()
            .map(|p| p.iter().fold(0u32, |m, &i| m | (1 << (i - 1))))
            .collect()
    }

    #[test]
    fn lut_nt4_matches_reference_order() {
        let book = PatternBook::build(Scheme::Lut, 4, None).unwrap();
        let expect = masks(&[
            &[1],
            &[2],
            &[3],
            &[4],
            &[1, 2],
            &[3, 4],
            &[1, 3],
            &[2, 4],
        ]);
        assert_eq!(book.patterns, expect);
    }

    #[test]
    fn dtaad_index_zero_is_dedicated_antenna() {
        let book = PatternBook::build(Scheme::DtaaD, 4, None).unwrap();
        assert_eq!(book.antennas(0), vec![4]);
        // Spatial bits 000 -> (4), 101 -> (1,3) per the direct mapping.
        assert_eq!(book.antennas(0b101), vec![1, 3]);
        assert!(!book.is_rotated(0));
    }

    #[test]
    fn dtaar_spatial_bits_drive_antennas() {
        let book = PatternBook::build(Scheme::DtaaR, 3, None).unwrap();
        assert_eq!(book.len(), 8);
        assert_eq!(book.antennas(0b101), vec![1, 3]);
        assert_eq!(book.antennas(0b011), vec![2, 3]);
        assert_eq!(book.antennas(0), vec![1, 2, 3]);
        assert!(book.is_rotated(0));
        assert_eq!(book.rotated.iter().filter(|&&r| r).count(), 1);
    }

    #[test]
    fn gsm_book_truncates_lexicographic_combinations() {
        let book = PatternBook::build(Scheme::Gsm, 5, Some(2)).unwrap();
        // C(5,2) = 10 -> 8 patterns, 3 spatial bits.
        assert_eq!(book.spatial_bits(), 3);
        assert_eq!(book.len(), 8);
        assert_eq!(book.antennas(0), vec![1, 2]);
        assert_eq!(book.antennas(1), vec![1, 3]);
        assert_eq!(book.antennas(7), vec![3, 4]);
    }

    #[test]
    fn sm_is_single_antenna_gsm() {
        let book = PatternBook::build(Scheme::Sm, 5, None).unwrap();
        assert_eq!(book.spatial_bits(), 2);
        assert_eq!(book.len(), 4);
        for k in 0..4 {
            assert_eq!(book.antennas(k), vec![k + 1]);
        }
        assert!(matches!(
            PatternBook::build(Scheme::Sm, 5, Some(2)),
            Err(Error::InvalidActiveCount { na: 2, nt: 5 })
        ));
    }

    #[test]
    fn gsm_requires_na() {
        assert!(matches!(
            PatternBook::build(Scheme::Gsm, 5, None),
            Err(Error::MissingActiveCount)
        ));
        assert!(matches!(
            PatternBook::build(Scheme::Gsm, 4, Some(5)),
            Err(Error::InvalidActiveCount { na: 5, nt: 4 })
        ));
    }

    #[test]
    fn every_book_has_nonempty_distinct_power_of_two_patterns() {
        let cases: Vec<PatternBook> = vec![
            PatternBook::build(Scheme::DtaaR, 4, None).unwrap(),
            PatternBook::build(Scheme::DtaaD, 5, None).unwrap(),
            PatternBook::build(Scheme::Lut, 5, None).unwrap(),
            PatternBook::build(Scheme::Gsm, 6, Some(3)).unwrap(),
        ];
        for book in cases {
            assert!(book.len().is_power_of_two());
            assert_eq!(book.len(), 1 << book.spatial_bits());
            let mut seen = std::collections::HashSet::new();
            for k in 0..book.len() {
                assert!(book.active_count(k) >= 1);
                assert!(book.active_count(k) as usize <= book.nt());
                // DTAA-R may reuse the all-active pattern once, flagged.
                if !seen.insert((book.pattern(k), book.is_rotated(k))) {
                    panic!("duplicate (pattern, flag) in {:?}", book.scheme());
                }
            }
        }
    }

    #[test]
    fn throughput_examples() {
        let qpsk = Constellation::psk(4).unwrap();
        let lut5 = PatternBook::build(Scheme::Lut, 5, None).unwrap();
        assert_eq!(lut5.throughput(&qpsk), 6);
        let lut6 = PatternBook::build(Scheme::Lut, 6, None).unwrap();
        assert_eq!(lut6.throughput(&qpsk), 7);
        let qam8 = Constellation::qam(8).unwrap();
        let gsm = PatternBook::build(Scheme::Gsm, 5, Some(2)).unwrap();
        assert_eq!(gsm.throughput(&qam8), 6);
    }

    #[test]
    fn encode_direct_pattern_example() {
        // Spatial 101, symbol bit 0 with BPSK -> -1 on antennas 1 and 3.
        let book = PatternBook::build(Scheme::DtaaR, 3, None).unwrap();
        let bpsk = Constellation::psk(2).unwrap();
        let (k, s, x) = encode(&book, &bpsk, BitBlock::new(0b101, 0, 3, 1)).unwrap();
        assert_eq!(k, 5);
        assert_eq!(s, Complex64::new(-1.0, 0.0));
        assert_eq!(
            x,
            vec![
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0)
            ]
        );
    }

    #[test]
    fn encode_all_zero_block_rotates() {
        // The transform maps s -> exp(j*pi/2) s for BPSK, so bit 1 (+1)
        // lands on +i across all three antennas.
        let book = PatternBook::build(Scheme::DtaaR, 3, None).unwrap();
        let bpsk = Constellation::psk(2).unwrap();
        let expected = Complex64::from_polar(1.0, std::f64::consts::PI / 2.0)
            * bpsk.symbol(bpsk.index_of_label(1));
        let (k, s, x) = encode(&book, &bpsk, BitBlock::new(0, 1, 3, 1)).unwrap();
        assert_eq!(k, 0);
        assert!((s - expected).norm() < 1e-12);
        assert_eq!(s, Complex64::new(0.0, 1.0));
        for v in x {
            assert_eq!(v, s);
        }
    }

    #[test]
    fn encode_dedicated_antenna_example() {
        let book = PatternBook::build(Scheme::DtaaD, 4, None).unwrap();
        let bpsk = Constellation::psk(2).unwrap();
        let (_, _, x) = encode(&book, &bpsk, BitBlock::new(0, 1, 3, 1)).unwrap();
        assert_eq!(
            x,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0)
            ]
        );
    }

    #[test]
    fn encode_rejects_wrong_lengths() {
        let book = PatternBook::build(Scheme::DtaaD, 4, None).unwrap();
        let bpsk = Constellation::psk(2).unwrap();
        assert!(matches!(
            encode(&book, &bpsk, BitBlock::new(0, 1, 4, 1)),
            Err(Error::BitLengthMismatch(_))
        ));
    }

    #[test]
    fn overlap_matrix_diagonal_counts_active_antennas() {
        let qam = Constellation::qam(16).unwrap();
        let book = PatternBook::build(Scheme::DtaaR, 3, None).unwrap();
        let c = book.overlap_matrix(&qam);
        for k in 0..book.len() {
            let d = c.at(k, k);
            assert!((d.re - book.active_count(k) as f64).abs() < 1e-12);
            assert!(d.im.abs() < 1e-12);
        }
        // Rotated-vs-plain all-active pair picks up the rotation factor.
        let all_plain = 0b111usize; // spatial bits 111
        let v = c.at(0, all_plain);
        let rho = qam.rotation_factor() * 3.0;
        assert!((v - rho).norm() < 1e-12);
    }

    #[test]
    fn equivalent_channel_with_unit_columns_marks_patterns() {
        // h_i = e_i: column k of G carries ones exactly on the active
        // antennas (times the rotation factor on the flagged column).
        let book = PatternBook::build(Scheme::DtaaR, 3, None).unwrap();
        let bpsk = Constellation::psk(2).unwrap();
        let h = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let eq = equivalent_channel(&h, &book, &bpsk).unwrap();
        for k in 0..book.len() {
            let rho = book.rotation(k, &bpsk);
            for i in 0..3 {
                let expect = if book.pattern(k) >> i & 1 == 1 {
                    rho
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((eq.g.at(i, k) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dedicated_pattern_column_is_last_channel_column() {
        let book = PatternBook::build(Scheme::DtaaD, 4, None).unwrap();
        let qpsk = Constellation::psk(4).unwrap();
        let h = CMat::from_fn(3, 4, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 1.25));
        let eq = equivalent_channel(&h, &book, &qpsk).unwrap();
        for r in 0..3 {
            assert_eq!(eq.g.at(r, 0), h.at(r, 3));
        }
    }

    #[test]
    fn equivalent_columns_match_direct_summation() {
        use crate::channel::{sample_channel, substream, StreamTag};
        let book = PatternBook::build(Scheme::DtaaR, 4, None).unwrap();
        let qam = Constellation::qam(16).unwrap();
        let mut rng = substream(3, 0, StreamTag::Channel);
        let h = sample_channel(4, 5, &mut rng);
        let eq = equivalent_channel(&h, &book, &qam).unwrap();
        for k in 0..book.len() {
            let rho = book.rotation(k, &qam);
            for r in 0..5 {
                let direct: Complex64 = book
                    .antennas(k)
                    .iter()
                    .map(|&a| h.at(r, a - 1))
                    .sum::<Complex64>()
                    * rho;
                assert!((eq.g.at(r, k) - direct).norm() < 1e-12);
            }
        }
        // Dimension mismatch is rejected.
        let wrong = CMat::zeros(5, 3);
        assert!(matches!(
            equivalent_channel(&wrong, &book, &qam),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bit_block_strings_and_hamming() {
        let a = BitBlock::new(0b101, 0b0, 3, 1);
        let b = BitBlock::new(0b000, 0b1, 3, 1);
        assert_eq!(a.bit_string(), "1010");
        assert_eq!(b.bit_string(), "0001");
        assert_eq!(a.hamming(&b), 3);
    }

    #[test]
    fn combinations_order_is_tuple_lexicographic() {
        let combos = combinations_lex(4, 2);
        let expect = masks(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[3, 4]]);
        assert_eq!(combos, expect);
    }
}
