//! Detectors over the equivalent channel: full-search MLD, the two-stage
//! near-ML TMLD, and the decoupled single-stream DMLD.
//!
//! All three recover the (pattern, symbol) pair from one received vector y
//! given the equivalent channel G, whose flagged column already carries the
//! rotation transform, so the constellation passed in is always the plain
//! unrotated one. Ties break to the lexicographically smallest indices so
//! runs are reproducible across platforms.
//!
//! Each decision carries a real-multiplication count under the usual
//! accounting (a complex multiply is 4 real multiplies, a squared magnitude
//! 2 per entry, so one metric evaluation over Nr antennas costs 6*Nr):
//! MLD evaluates all M*N metrics, TMLD adds an Nt*M first stage and only
//! re-runs the survivors, and DMLD pays (6*Nr + 10) per pattern for PSK or
//! (6*Nr + 12) for QAM regardless of M.

use crate::constellation::{Constellation, ConstellationKind};
use crate::mapping::BitBlock;
use crate::mat::CMat;
use crate::{Error, Result};
use num_complex::Complex64;

/// Detector selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Mld,
    Tmld,
    Dmld,
}

impl DetectorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetectorKind::Mld => "mld",
            DetectorKind::Tmld => "tmld",
            DetectorKind::Dmld => "dmld",
        }
    }
}

/// Outcome of one detection.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionDecision {
    /// Estimated activation-pattern index k.
    pub pattern_index: usize,
    /// Estimated constellation symbol index l.
    pub symbol_index: usize,
    /// The estimated (unrotated) constellation symbol.
    pub symbol: Complex64,
    /// Recovered source bits.
    pub bits: BitBlock,
    /// Residual ||y - g_k s||^2 of the decision.
    pub metric: f64,
    /// Real multiplications spent, per the accounting above.
    pub mults: u64,
}

#[inline]
fn residual(y: &[Complex64], g: &[Complex64], s: Complex64) -> f64 {
    let mut acc = 0.0;
    for (yi, gi) in y.iter().zip(g) {
        let d = yi - gi * s;
        acc += d.norm_sqr();
    }
    acc
}

fn check_dims(y: &[Complex64], g: &CMat) -> Result<()> {
    if y.len() != g.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "received vector has {} entries, equivalent channel {} rows",
            y.len(),
            g.nrows()
        )));
    }
    if g.ncols() == 0 || !g.ncols().is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "equivalent channel must have a power-of-two column count, got {}",
            g.ncols()
        )));
    }
    Ok(())
}

fn decision(
    g: &CMat,
    constellation: &Constellation,
    k: usize,
    l: usize,
    metric: f64,
    mults: u64,
) -> DetectionDecision {
    let bits = BitBlock::new(
        k as u32,
        constellation.label(l),
        g.ncols().ilog2(),
        constellation.bits_per_symbol(),
    );
    DetectionDecision {
        pattern_index: k,
        symbol_index: l,
        symbol: constellation.symbol(l),
        bits,
        metric,
        mults,
    }
}

/// Full-search maximum-likelihood detection: argmin over all (k, l) of
/// ||y - g_k s_l||^2.
pub fn mld(y: &[Complex64], g: &CMat, constellation: &Constellation) -> Result<DetectionDecision> {
    check_dims(y, g)?;
    let n = g.ncols();
    let m = constellation.order();
    let mut best = (0usize, 0usize);
    let mut best_metric = f64::INFINITY;
    for k in 0..n {
        let col = g.col(k);
        for (l, &s) in constellation.symbols().iter().enumerate() {
            let d = residual(y, col, s);
            if d < best_metric {
                best_metric = d;
                best = (k, l);
            }
        }
    }
    let mults = 6 * (m as u64) * (y.len() as u64) * (n as u64);
    Ok(decision(g, constellation, best.0, best.1, best_metric, mults))
}

/// Two-stage near-ML detection.
///
/// Stage one jointly scans the Nt single-antenna columns of the physical
/// channel and all M symbols; the winning antenna anchors a candidate set
/// of symbols whose stage-one residual is within a factor `c` of the best.
/// Stage two is an MLD restricted to those symbols. `c = 1` keeps only the
/// stage-one winner; as `c` grows the detector converges on full MLD.
pub fn tmld(
    y: &[Complex64],
    h: &CMat,
    g: &CMat,
    constellation: &Constellation,
    c: f64,
) -> Result<DetectionDecision> {
    if c.is_nan() || c < 1.0 {
        return Err(Error::InvalidRadius(c));
    }
    check_dims(y, g)?;
    if h.nrows() != g.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "physical channel has {} rows, equivalent channel {}",
            h.nrows(),
            g.nrows()
        )));
    }
    let nt = h.ncols();
    let m = constellation.order();
    let nr = y.len() as u64;
    let n = g.ncols();

    // Stage 1: joint search over single antennas and symbols. The table is
    // kept so the anchored antenna's row can seed the candidate set.
    let mut table = vec![0.0f64; nt * m];
    let mut best_antenna = 0usize;
    let mut best_l = 0usize;
    let mut best_metric = f64::INFINITY;
    for kp in 0..nt {
        let col = h.col(kp);
        for (l, &s) in constellation.symbols().iter().enumerate() {
            let d = residual(y, col, s);
            table[kp * m + l] = d;
            if d < best_metric {
                best_metric = d;
                best_antenna = kp;
                best_l = l;
            }
        }
    }
    let anchor_row = &table[best_antenna * m..(best_antenna + 1) * m];
    let threshold = c * anchor_row[best_l];
    let candidates: Vec<usize> = (0..m).filter(|&l| anchor_row[l] <= threshold).collect();
    debug_assert!(candidates.contains(&best_l));

    // Stage 2: restricted MLD over the equivalent channel.
    let mut best = (0usize, candidates[0]);
    let mut metric = f64::INFINITY;
    for k in 0..n {
        let col = g.col(k);
        for &l in &candidates {
            let d = residual(y, col, constellation.symbol(l));
            if d < metric {
                metric = d;
                best = (k, l);
            }
        }
    }
    let mults = 6 * (m as u64) * nr * (nt as u64) + 6 * nr * (n as u64) * candidates.len() as u64;
    Ok(decision(g, constellation, best.0, best.1, metric, mults))
}

/// Decoupled maximum-likelihood detection.
///
/// For each pattern k the matched-filter statistic p_k = g_k^H y / ||g_k||^2
/// is demapped by rounding, and the pattern whose demapped symbol leaves the
/// smallest residual wins. Identical to MLD away from demapper tie
/// boundaries, at a cost independent of the constellation size.
pub fn dmld(y: &[Complex64], g: &CMat, constellation: &Constellation) -> Result<DetectionDecision> {
    check_dims(y, g)?;
    let n = g.ncols();
    let y_energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();

    let mut best_k = usize::MAX;
    let mut best_l = 0usize;
    let mut best_metric = f64::INFINITY;
    for k in 0..n {
        let col = g.col(k);
        let mut gy = Complex64::new(0.0, 0.0);
        let mut g_energy = 0.0;
        for (gi, yi) in col.iter().zip(y) {
            gy += gi.conj() * yi;
            g_energy += gi.norm_sqr();
        }
        if g_energy == 0.0 {
            log::warn!("skipping zero-norm equivalent-channel column {k}");
            continue;
        }
        let p = gy / g_energy;
        let l = constellation.demap_round(p);
        let s = constellation.symbol(l);
        let metric = y_energy - 2.0 * (s.conj() * gy).re + s.norm_sqr() * g_energy;
        if metric < best_metric {
            best_metric = metric;
            best_k = k;
            best_l = l;
        }
    }
    if best_k == usize::MAX {
        // Every column degenerate; fall back to the smallest indices.
        best_k = 0;
        best_l = constellation.demap_round(Complex64::new(0.0, 0.0));
    }
    // Report the exact residual of the winner (the scan uses the expanded
    // form, which can drift to tiny negatives near zero).
    let metric = residual(y, g.col(best_k), constellation.symbol(best_l));
    let per_pattern = match constellation.kind() {
        ConstellationKind::Psk => 6 * y.len() as u64 + 10,
        ConstellationKind::Qam => 6 * y.len() as u64 + 12,
    };
    Ok(decision(
        g,
        constellation,
        best_k,
        best_l,
        metric,
        per_pattern * n as u64,
    ))
}

/// Analytic real-multiplication counts for the three detectors.
///
/// `beta` is the expected fraction of symbols surviving the TMLD first
/// stage, between 1/M (c = 1) and 1 (c unbounded); it defaults to 1/M.
/// The GSM baseline's full search is the MLD count evaluated at that
/// scheme's alphabet size.
pub fn complexity_model(
    detector: DetectorKind,
    kind: ConstellationKind,
    m: usize,
    nr: usize,
    nt: usize,
    n: usize,
    beta: Option<f64>,
) -> Result<f64> {
    let (m, nr, nt, n) = (m as f64, nr as f64, nt as f64, n as f64);
    match detector {
        DetectorKind::Mld => Ok(6.0 * m * nr * n),
        DetectorKind::Tmld => {
            let beta = beta.unwrap_or(1.0 / m);
            if !(1.0 / m..=1.0).contains(&beta) {
                return Err(Error::InvalidScenario(format!(
                    "beta {beta} outside [1/M, 1]"
                )));
            }
            Ok(6.0 * m * nr * nt + 6.0 * beta * m * nr * n)
        }
        DetectorKind::Dmld => match kind {
            ConstellationKind::Psk => Ok((6.0 * nr + 10.0) * n),
            ConstellationKind::Qam => Ok((6.0 * nr + 12.0) * n),
        },
    }
}
