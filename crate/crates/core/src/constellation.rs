//! Gray-labelled PSK/QAM constellations.
//!
//! All constellations are normalised to unit average symbol power. QAM
//! covers square orders (4, 16, 64, ...) and rectangular odd-power orders
//! (8, 32, ...) laid out as a 2^ceil(b/2) x 2^floor(b/2) grid; the analytic
//! bound closed forms only accept PSK and square QAM and reject the rest.
//!
//! Besides the plain symbol set, this module owns the rotation transform
//! applied to the all-active antenna pattern (a phase shift of pi/Mn, where
//! Mn counts the largest set of equal-magnitude points) and two demappers:
//! a rounding-based one used by the decoupled detector and an exhaustive
//! nearest-point oracle.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Constellation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Psk,
    Qam,
}

/// An ordered, Gray-labelled, unit-average-power symbol set.
#[derive(Debug, Clone)]
pub struct Constellation {
    kind: ConstellationKind,
    order: usize,
    bits_per_symbol: u32,
    symbols: Vec<Complex64>,
    bit_labels: Vec<u32>,
    label_to_index: Vec<usize>,
    base_phase: f64,
    alpha: f64,
    rotation_phase: f64,
    rotation_order: usize,
    levels_i: usize,
    levels_q: usize,
}

fn gray(n: u32) -> u32 {
    n ^ (n >> 1)
}

/// Zero out float residue from trig evaluations at axis angles so that
/// BPSK/QPSK points and their rotations come out bit-exact.
fn snap(z: Complex64) -> Complex64 {
    let re = if z.re.abs() < 1e-12 { 0.0 } else { z.re };
    let im = if z.im.abs() < 1e-12 { 0.0 } else { z.im };
    Complex64::new(re, im)
}

impl Constellation {
    /// Build a `kind`-family constellation of the given order.
    pub fn build(kind: ConstellationKind, order: usize) -> Result<Self> {
        match kind {
            ConstellationKind::Psk => Self::psk(order),
            ConstellationKind::Qam => Self::qam(order),
        }
    }

    /// M-PSK with Gray phase labels. BPSK uses a base phase of pi so that
    /// bit 0 maps to -1 and bit 1 to +1; larger orders start at phase 0.
    pub fn psk(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() || order > (1 << 16) {
            return Err(Error::InvalidOrder(order));
        }
        let bits_per_symbol = order.trailing_zeros();
        let base_phase = if order == 2 { PI } else { 0.0 };
        let symbols: Vec<Complex64> = (0..order)
            .map(|l| {
                snap(Complex64::from_polar(
                    1.0,
                    2.0 * PI * l as f64 / order as f64 + base_phase,
                ))
            })
            .collect();
        let bit_labels: Vec<u32> = (0..order as u32).map(gray).collect();
        Ok(Self::assemble(
            ConstellationKind::Psk,
            order,
            bits_per_symbol,
            symbols,
            bit_labels,
            base_phase,
            1.0,
            order,
            0,
            0,
        ))
    }

    /// M-QAM on a Gray-labelled rectangular grid with unit average power.
    ///
    /// `order` must be a power of two >= 4; odd bit counts give a
    /// rectangular grid with twice as many in-phase levels as quadrature
    /// levels.
    pub fn qam(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || order > (1 << 16) {
            return Err(Error::InvalidQamOrder(order));
        }
        let bits_per_symbol = order.trailing_zeros();
        let bits_i = bits_per_symbol.div_ceil(2);
        let bits_q = bits_per_symbol / 2;
        let levels_i = 1usize << bits_i;
        let levels_q = 1usize << bits_q;
        // Mean energy of the +/-1, +/-3, ... level set with L levels is
        // (L^2 - 1)/3 per dimension.
        let alpha = (((levels_i * levels_i - 1) + (levels_q * levels_q - 1)) as f64 / 3.0).sqrt();

        let mut symbols = Vec::with_capacity(order);
        let mut bit_labels = Vec::with_capacity(order);
        for ii in 0..levels_i {
            let re = (2 * ii as i64 - (levels_i as i64 - 1)) as f64 / alpha;
            for iq in 0..levels_q {
                let im = (2 * iq as i64 - (levels_q as i64 - 1)) as f64 / alpha;
                symbols.push(Complex64::new(re, im));
                bit_labels.push((gray(ii as u32) << bits_q) | gray(iq as u32));
            }
        }
        let rotation_order = qam_rotation_order(levels_i, levels_q);
        Ok(Self::assemble(
            ConstellationKind::Qam,
            order,
            bits_per_symbol,
            symbols,
            bit_labels,
            0.0,
            alpha,
            rotation_order,
            levels_i,
            levels_q,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: ConstellationKind,
        order: usize,
        bits_per_symbol: u32,
        symbols: Vec<Complex64>,
        bit_labels: Vec<u32>,
        base_phase: f64,
        alpha: f64,
        rotation_order: usize,
        levels_i: usize,
        levels_q: usize,
    ) -> Self {
        let mut label_to_index = vec![usize::MAX; order];
        for (l, &lab) in bit_labels.iter().enumerate() {
            label_to_index[lab as usize] = l;
        }
        debug_assert!(label_to_index.iter().all(|&i| i != usize::MAX));
        Constellation {
            kind,
            order,
            bits_per_symbol,
            symbols,
            bit_labels,
            label_to_index,
            base_phase,
            alpha,
            rotation_phase: 0.0,
            rotation_order,
            levels_i,
            levels_q,
        }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    /// Constellation order M.
    pub fn order(&self) -> usize {
        self.order
    }

    /// log2(M).
    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    #[inline]
    pub fn symbol(&self, index: usize) -> Complex64 {
        self.symbols[index]
    }

    /// Gray bit label of the symbol at `index`.
    #[inline]
    pub fn label(&self, index: usize) -> u32 {
        self.bit_labels[index]
    }

    /// Symbol index carrying the given bit label.
    #[inline]
    pub fn index_of_label(&self, label: u32) -> usize {
        self.label_to_index[label as usize]
    }

    pub fn base_phase(&self) -> f64 {
        self.base_phase
    }

    /// QAM grid normalisation factor (1 for PSK).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Per-dimension level counts of the QAM grid, (0, 0) for PSK.
    pub fn levels(&self) -> (usize, usize) {
        (self.levels_i, self.levels_q)
    }

    /// Phase applied by the rotation transform, 0 for an unrotated set.
    pub fn rotation_phase(&self) -> f64 {
        self.rotation_phase
    }

    /// True when this instance is the rotated variant.
    pub fn is_rotated(&self) -> bool {
        self.rotation_phase != 0.0
    }

    /// Rotation order Mn: M for PSK, and for QAM the largest number of
    /// constellation points sharing one magnitude ring (8 for 16QAM,
    /// 12 for 64QAM).
    pub fn rotation_order(&self) -> usize {
        self.rotation_order
    }

    /// The phase factor exp(j*pi/Mn) the all-active pattern applies.
    pub fn rotation_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI / self.rotation_order as f64)
    }

    /// Rotated copy of this constellation: every symbol multiplied by
    /// exp(j*pi/Mn), labels unchanged. Rejects double rotation.
    pub fn rotated(&self) -> Result<Self> {
        if self.is_rotated() {
            return Err(Error::AlreadyRotated);
        }
        let rot = self.rotation_factor();
        let mut out = self.clone();
        out.symbols = self.symbols.iter().map(|&s| snap(s * rot)).collect();
        out.rotation_phase = PI / self.rotation_order as f64;
        Ok(out)
    }

    /// Rounding demapper: the symbol index nearest to `p`.
    ///
    /// PSK rounds the phase to the nearest of M sectors; QAM rounds each
    /// dimension to the nearest grid level and clamps to the outermost one.
    /// Equals [`Constellation::nearest`] everywhere except on measure-zero
    /// decision boundaries, where this rounds half away from zero.
    pub fn demap_round(&self, p: Complex64) -> usize {
        match self.kind {
            ConstellationKind::Psk => {
                let m = self.order as f64;
                let sector = ((p.arg() - self.base_phase - self.rotation_phase) * m
                    / (2.0 * PI))
                    .round() as i64;
                sector.rem_euclid(self.order as i64) as usize
            }
            ConstellationKind::Qam => {
                debug_assert!(
                    !self.is_rotated(),
                    "per-dimension rounding assumes an axis-aligned grid"
                );
                let li = pam_round(self.alpha * p.re, self.levels_i);
                let lq = pam_round(self.alpha * p.im, self.levels_q);
                let ii = ((li + self.levels_i as i64 - 1) / 2) as usize;
                let iq = ((lq + self.levels_q as i64 - 1) / 2) as usize;
                ii * self.levels_q + iq
            }
        }
    }

    /// Exhaustive nearest-point demapper; ties break to the smallest index.
    pub fn nearest(&self, p: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (l, s) in self.symbols.iter().enumerate() {
            let d = (s - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = l;
            }
        }
        best
    }

    /// Distance from `p` to its nearest decision boundary, used to exclude
    /// tie points when cross-checking the demappers.
    pub fn boundary_margin(&self, p: Complex64) -> f64 {
        let l = self.nearest(p);
        let d_best = (self.symbols[l] - p).norm();
        let mut second = f64::INFINITY;
        for (j, s) in self.symbols.iter().enumerate() {
            if j != l {
                second = second.min((s - p).norm());
            }
        }
        (second - d_best) / 2.0
    }
}

/// Nearest odd level to `x` among +/-1, +/-3, ..., +/-(levels-1).
#[inline]
fn pam_round(x: f64, levels: usize) -> i64 {
    let lim = levels as i64 - 1;
    let v = 2 * (((x + 1.0) / 2.0).round() as i64) - 1;
    v.clamp(-lim, lim)
}

/// Largest count of grid points sharing one squared magnitude, computed on
/// the integer level grid so ties are exact.
fn qam_rotation_order(levels_i: usize, levels_q: usize) -> usize {
    use std::collections::HashMap;
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for ii in 0..levels_i {
        let a = 2 * ii as i64 - (levels_i as i64 - 1);
        for iq in 0..levels_q {
            let b = 2 * iq as i64 - (levels_q as i64 - 1);
            *counts.entry(a * a + b * b).or_insert(0) += 1;
        }
    }
    counts.into_values().max().unwrap_or(1)
}
