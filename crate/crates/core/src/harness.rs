//! Monte Carlo BER estimation over SNR grids.
//!
//! One channel use per independent fading realisation: each trial draws a
//! fresh channel, encodes a random bit block, adds noise and detects.
//! A point stops once it has seen the target number of bit errors or the
//! bit budget runs out (the record is flagged either way).
//!
//! Points are independent and may run on worker threads; every point owns
//! its own RNG sub-streams derived from (master seed, point index), so a
//! sweep's output is byte-identical no matter how many workers ran it.

use crate::bounds::{self, BoundMethod, BoundResult};
use crate::channel::{self, substream, NoiseModel, StreamTag};
use crate::constellation::{Constellation, ConstellationKind};
use crate::detect::{self, DetectorKind};
use crate::mapping::{PatternBook, Scheme};
use crate::mat::CMat;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Complete description of one simulation run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub scheme: Scheme,
    pub nt: usize,
    pub nr: usize,
    pub na: Option<usize>,
    pub modulation: ConstellationKind,
    pub order: usize,
    pub detector: DetectorKind,
    pub tmld_c: f64,
    /// SNR grid in dB, strictly increasing.
    pub snr_db: Vec<f64>,
    /// Stop rule: accumulate at least this many bit errors per point...
    pub target_errors: u64,
    /// ...unless the bit budget is exhausted first.
    pub max_bits: u64,
    pub seed: u64,
}

impl Scenario {
    pub const DEFAULT_TARGET_ERRORS: u64 = 200;
    pub const DEFAULT_MAX_BITS: u64 = 20_000_000;
    pub const DEFAULT_TMLD_C: f64 = 1.5;

    /// A scenario with the default detector (MLD), stop rule and seed 0.
    pub fn new(
        scheme: Scheme,
        nt: usize,
        nr: usize,
        modulation: ConstellationKind,
        order: usize,
        snr_db: Vec<f64>,
    ) -> Self {
        Scenario {
            scheme,
            nt,
            nr,
            na: None,
            modulation,
            order,
            detector: DetectorKind::Mld,
            tmld_c: Self::DEFAULT_TMLD_C,
            snr_db,
            target_errors: Self::DEFAULT_TARGET_ERRORS,
            max_bits: Self::DEFAULT_MAX_BITS,
            seed: 0,
        }
    }

    pub fn with_detector(mut self, detector: DetectorKind) -> Self {
        self.detector = detector;
        self
    }

    pub fn with_na(mut self, na: usize) -> Self {
        self.na = Some(na);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn book(&self) -> Result<PatternBook> {
        PatternBook::build(self.scheme, self.nt, self.na)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::build(self.modulation, self.order)
    }

    /// Bits per channel use.
    pub fn throughput(&self) -> Result<u32> {
        Ok(self.book()?.throughput(&self.constellation()?))
    }

    /// Cross-field validation; every run entry point calls this.
    pub fn validate(&self) -> Result<()> {
        self.book()?;
        self.constellation()?;
        if self.nr < 1 {
            return Err(Error::InvalidScenario("nr must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::InvalidScenario("empty SNR grid".into()));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScenario(
                "SNR grid must be strictly increasing".into(),
            ));
        }
        if self.detector == DetectorKind::Tmld && (self.tmld_c.is_nan() || self.tmld_c < 1.0) {
            return Err(Error::InvalidRadius(self.tmld_c));
        }
        if self.max_bits == 0 {
            return Err(Error::InvalidScenario("max_bits must be positive".into()));
        }
        Ok(())
    }
}

/// Simulation outcome at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub spatial_bit_errors: u64,
    pub symbol_bit_errors: u64,
    pub ber: f64,
    /// True when the target error count was reached within the bit budget.
    pub stop_rule_met: bool,
    /// Mean counted real multiplications per detection.
    pub avg_mults: f64,
    /// Wall-clock seconds spent; excluded from serialised output.
    pub wall_time: f64,
}

/// A full sweep: one record per SNR point plus the analytical bounds where
/// the constellation admits them.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<PointRecord>,
    pub bounds: Vec<BoundResult>,
}

struct TrialContext {
    book: PatternBook,
    constellation: Constellation,
    nr: usize,
    detector: DetectorKind,
    tmld_c: f64,
}

impl TrialContext {
    fn new(sc: &Scenario) -> Result<Self> {
        Ok(TrialContext {
            book: sc.book()?,
            constellation: sc.constellation()?,
            nr: sc.nr,
            detector: sc.detector,
            tmld_c: sc.tmld_c,
        })
    }
}

/// One trial: fresh channel, random block, detect. Returns (spatial bit
/// errors, symbol bit errors, multiplications).
fn run_trial(
    ctx: &TrialContext,
    noise: &NoiseModel,
    bits_rng: &mut impl Rng,
    chan_rng: &mut impl Rng,
    noise_rng: &mut impl Rng,
    g: &mut CMat,
    y: &mut Vec<Complex64>,
) -> Result<(u32, u32, u64)> {
    let book = &ctx.book;
    let cons = &ctx.constellation;
    let n = book.len() as u32;
    let m = cons.order() as u32;

    let h = channel::sample_channel(book.nt(), ctx.nr, chan_rng);
    book.equivalent_columns(&h, cons, g)?;

    let spatial = bits_rng.random::<u32>() & (n - 1);
    let label = bits_rng.random::<u32>() & (m - 1);
    let l = cons.index_of_label(label);
    let s = cons.symbol(l);

    y.clear();
    let col = g.col(spatial as usize);
    for &gi in col {
        let noise_sample = if noise.sigma2 > 0.0 {
            channel::complex_gaussian(noise_rng, noise.sigma2)
        } else {
            Complex64::new(0.0, 0.0)
        };
        y.push(gi * s + noise_sample);
    }

    let decision = match ctx.detector {
        DetectorKind::Mld => detect::mld(y, g, cons)?,
        DetectorKind::Tmld => detect::tmld(y, &h, g, cons, ctx.tmld_c)?,
        DetectorKind::Dmld => detect::dmld(y, g, cons)?,
    };
    let spatial_errors = (spatial ^ decision.bits.spatial).count_ones();
    let symbol_errors = (label ^ decision.bits.symbol).count_ones();
    Ok((spatial_errors, symbol_errors, decision.mults))
}

/// Simulate one SNR point under the scenario's stop rule.
pub fn run_point(sc: &Scenario, snr_db: f64, point_index: u64) -> Result<PointRecord> {
    let ctx = TrialContext::new(sc)?;
    let noise = NoiseModel::from_snr_db(snr_db);
    let m = ctx.book.throughput(&ctx.constellation) as u64;

    let mut bits_rng = substream(sc.seed, point_index, StreamTag::Bits);
    let mut chan_rng = substream(sc.seed, point_index, StreamTag::Channel);
    let mut noise_rng = substream(sc.seed, point_index, StreamTag::Noise);

    let mut g = CMat::zeros(ctx.nr, ctx.book.len());
    let mut y = Vec::with_capacity(ctx.nr);

    let start = Instant::now();
    let mut bits = 0u64;
    let mut spatial_bit_errors = 0u64;
    let mut symbol_bit_errors = 0u64;
    let mut mults = 0u64;
    let mut trials = 0u64;
    loop {
        let (se, ye, mu) = run_trial(
            &ctx,
            &noise,
            &mut bits_rng,
            &mut chan_rng,
            &mut noise_rng,
            &mut g,
            &mut y,
        )?;
        spatial_bit_errors += se as u64;
        symbol_bit_errors += ye as u64;
        mults += mu;
        bits += m;
        trials += 1;
        let bit_errors = spatial_bit_errors + symbol_bit_errors;
        if bit_errors >= sc.target_errors || bits >= sc.max_bits {
            break;
        }
    }
    let bit_errors = spatial_bit_errors + symbol_bit_errors;
    Ok(PointRecord {
        snr_db,
        bits,
        bit_errors,
        spatial_bit_errors,
        symbol_bit_errors,
        ber: bit_errors as f64 / bits as f64,
        stop_rule_met: bit_errors >= sc.target_errors,
        avg_mults: mults as f64 / trials as f64,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Run every SNR point of the scenario, optionally on several worker
/// threads, and attach bounds when the constellation admits closed forms.
/// Results are independent of `workers`.
pub fn sweep(sc: &Scenario, workers: usize) -> Result<SweepResult> {
    sc.validate()?;
    let n_points = sc.snr_db.len();
    let results: Mutex<Vec<Option<Result<PointRecord>>>> = Mutex::new(vec![None; n_points]);
    let next = AtomicUsize::new(0);

    let run_all = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= n_points {
            break;
        }
        let record = run_point(sc, sc.snr_db[i], i as u64);
        if let Ok(r) = &record {
            eprintln!(
                "point {:>2}: {:6.2} dB  ber {:.4e}  ({} errors / {} bits{}; {:.2}s)",
                i,
                r.snr_db,
                r.ber,
                r.bit_errors,
                r.bits,
                if r.stop_rule_met { "" } else { ", budget hit" },
                r.wall_time,
            );
        }
        results.lock().unwrap()[i] = Some(record);
    };

    let worker_count = workers.max(1).min(n_points);
    if worker_count <= 1 {
        run_all();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..worker_count {
                scope.spawn(run_all);
            }
        });
    }

    let mut points = Vec::with_capacity(n_points);
    for slot in results.into_inner().unwrap() {
        points.push(slot.expect("all points scheduled")?);
    }

    let bounds = scenario_bounds(sc, BoundMethod::Quadrature)?;
    Ok(SweepResult { points, bounds })
}

/// Bounds for each grid point of the scenario; empty when the constellation
/// has no closed-form signal term (rectangular QAM).
pub fn scenario_bounds(sc: &Scenario, method: BoundMethod) -> Result<Vec<BoundResult>> {
    let book = sc.book()?;
    let cons = sc.constellation()?;
    if bounds::p_mod_rayleigh(&cons, sc.nr, 1.0).is_err() {
        return Ok(Vec::new());
    }
    sc.snr_db
        .iter()
        .map(|&snr| {
            let sigma2 = NoiseModel::from_snr_db(snr).sigma2;
            bounds::improved_bound(&book, &cons, sc.nr, sigma2, method)
        })
        .collect()
}

/// Count decision disagreements between two detectors over paired trials
/// (same channels, same bits, same noise).
pub fn detector_mismatches(
    sc: &Scenario,
    snr_db: f64,
    trials: u64,
    first: DetectorKind,
    second: DetectorKind,
) -> Result<u64> {
    let ctx = TrialContext::new(sc)?;
    let noise = NoiseModel::from_snr_db(snr_db);
    let n = ctx.book.len() as u32;
    let m = ctx.constellation.order() as u32;

    let mut bits_rng = substream(sc.seed, 0, StreamTag::Bits);
    let mut chan_rng = substream(sc.seed, 0, StreamTag::Channel);
    let mut noise_rng = substream(sc.seed, 0, StreamTag::Noise);

    let mut g = CMat::zeros(ctx.nr, ctx.book.len());
    let mut mismatches = 0u64;
    for _ in 0..trials {
        let h = channel::sample_channel(ctx.book.nt(), ctx.nr, &mut chan_rng);
        ctx.book
            .equivalent_columns(&h, &ctx.constellation, &mut g)?;
        let spatial = bits_rng.random::<u32>() & (n - 1);
        let label = bits_rng.random::<u32>() & (m - 1);
        let l = ctx.constellation.index_of_label(label);
        let s = ctx.constellation.symbol(l);
        let y: Vec<Complex64> = g
            .col(spatial as usize)
            .iter()
            .map(|&gi| gi * s + channel::complex_gaussian(&mut noise_rng, noise.sigma2))
            .collect();
        let run = |kind: DetectorKind| -> Result<(usize, usize)> {
            let d = match kind {
                DetectorKind::Mld => detect::mld(&y, &g, &ctx.constellation)?,
                DetectorKind::Tmld => detect::tmld(&y, &h, &g, &ctx.constellation, sc.tmld_c)?,
                DetectorKind::Dmld => detect::dmld(&y, &g, &ctx.constellation)?,
            };
            Ok((d.pattern_index, d.symbol_index))
        };
        if run(first)? != run(second)? {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}
