//! Bound-state ladder of the well and multi-photon peak assignment.
//!
//! Bound levels solve `c p₂ cot(p₂ D) = E V1 / (c p₁) − c p₁` with
//! `p₁ = √(c² − E²/c²)` and `p₂ = √((E + V1)²/c² − c²)`, on the energy
//! window where both momenta are real. Each level `E_i` absorbing `n`
//! quanta of the oscillating field is expected to show up in the created
//! electron spectrum near `E_i + nω`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::free_basis::free_energy;
use crate::observables::SpectrumResult;

/// Relative pole guard: `|sin(p₂D)|` below this is treated as a pole.
const POLE_GUARD: f64 = 1e-12;
/// Phase distance `|p₂D − mπ|` of the scan points placed beside each pole.
const POLE_OFFSET: f64 = 1e-7;

/// `c p₂ cot(p₂ D) − (E V1/(c p₁) − c p₁)`.
pub fn eigen_residual(energy: f64, c: f64, v1: f64, d: f64) -> Result<f64> {
    let (lo, hi) = energy_window(c, v1);
    if !(energy > lo && energy < hi) {
        return Err(Error::Domain(format!(
            "E = {energy} outside the bound-state window ({lo}, {hi})"
        )));
    }
    let (p1, p2) = momenta(energy, c, v1);
    let (s, co) = (p2 * d).sin_cos();
    if s.abs() < POLE_GUARD {
        return Err(Error::Domain(format!("cot pole at E = {energy} (p2 D = {})", p2 * d)));
    }
    let (lhs, rhs) = sides(energy, c, v1, p1, p2, s, co);
    Ok(lhs - rhs)
}

fn sides(energy: f64, c: f64, v1: f64, p1: f64, p2: f64, s: f64, co: f64) -> (f64, f64) {
    (c * p2 * co / s, energy * v1 / (c * p1) - c * p1)
}

fn momenta(energy: f64, c: f64, v1: f64) -> (f64, f64) {
    let c2 = c * c;
    let p1 = (c2 - energy * energy / c2).max(0.0).sqrt();
    let shifted = (energy + v1) / c;
    let p2 = (shifted * shifted - c2).max(0.0).sqrt();
    (p1, p2)
}

/// Open window `(max(−c², c² − V1), c²)` where both momenta are real.
pub fn energy_window(c: f64, v1: f64) -> (f64, f64) {
    let c2 = c * c;
    ((c2 - v1).max(-c2), c2)
}

/// Energy at which `p₂` takes a given value: `E = c√(p₂² + c²) − V1`.
fn energy_of_p2(p2: f64, c: f64, v1: f64) -> f64 {
    c * p2.hypot(c) - v1
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateSet {
    /// Strictly increasing eigenvalues, atomic units.
    pub energies: Vec<f64>,
    pub c: f64,
    /// Number of sign-change brackets that were bisected.
    pub brackets: usize,
    /// Brackets discarded because they straddle a `cot` pole.
    pub discarded_poles: usize,
    /// `|residual| / max(|lhs|, |rhs|)` at each root.
    pub relative_residuals: Vec<f64>,
}

impl BoundStateSet {
    pub fn in_c2(&self) -> Vec<f64> {
        let c2 = self.c * self.c;
        self.energies.iter().map(|e| e / c2).collect()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Scan settings for [`solve_bound_states_with`].
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Largest advance of `p₂D` between scan points.
    pub max_phase_step: f64,
    /// Lower bound on the number of scan points.
    pub min_points: usize,
    /// Bisection stops at `|ΔE| < tolerance · c²`.
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            max_phase_step: PI / 64.0,
            min_points: 4096,
            tolerance: 1e-10,
        }
    }
}

pub fn solve_bound_states(c: f64, v1: f64, d: f64) -> Result<BoundStateSet> {
    solve_bound_states_with(c, v1, d, ScanOptions::default())
}

pub fn solve_bound_states_with(c: f64, v1: f64, d: f64, opts: ScanOptions) -> Result<BoundStateSet> {
    if v1.is_nan() || v1 <= 0.0 {
        return Err(Error::Domain(format!("V1 must be > 0, got {v1}")));
    }
    if !(c > 0.0 && d > 0.0) {
        return Err(Error::Domain("c and D must be > 0".into()));
    }
    let c2 = c * c;
    let (lo, hi) = energy_window(c, v1);
    // scan uniformly in p₂, which is monotone in E on the window
    let eps = 1e-9 * c2;
    let e_start = lo + eps;
    let e_end = hi - eps;
    let p2_start = momenta(e_start, c, v1).1;
    let p2_end = momenta(e_end, c, v1).1;
    let span = (p2_end - p2_start) * d;
    let points = ((span / opts.max_phase_step).ceil() as usize).max(opts.min_points);

    let residual = |e: f64| -> Option<f64> {
        let (p1, p2) = momenta(e, c, v1);
        let (s, co) = (p2 * d).sin_cos();
        if s.abs() < POLE_GUARD || p1 == 0.0 {
            return None;
        }
        let (l, r) = sides(e, c, v1, p1, p2, s, co);
        Some(l - r)
    };
    let branch = |e: f64| (momenta(e, c, v1).1 * d / PI).floor() as i64;

    let mut energies = Vec::new();
    let mut residuals = Vec::new();
    let mut brackets = 0;
    let mut discarded = 0;
    // uniform points plus a pair hugging every pole p₂D = mπ, so that no
    // bracket holds both a pole and a root
    let mut scan: Vec<f64> = (1..points)
        .map(|k| p2_start + (p2_end - p2_start) * k as f64 / points as f64)
        .collect();
    let first_pole = (p2_start * d / PI).ceil() as i64;
    let last_pole = (p2_end * d / PI).floor() as i64;
    for m in first_pole.max(1)..=last_pole {
        for offset in [-POLE_OFFSET, POLE_OFFSET] {
            let p2 = (m as f64 * PI + offset) / d;
            if p2 > p2_start && p2 < p2_end {
                scan.push(p2);
            }
        }
    }
    scan.sort_by(f64::total_cmp);
    let energies_scan = std::iter::once(e_start)
        .chain(scan.into_iter().map(|p2| energy_of_p2(p2, c, v1)))
        .chain(std::iter::once(e_end));

    let mut prev: Option<(f64, f64)> = None;
    for e in energies_scan {
        let Some(r) = residual(e) else {
            prev = None;
            continue;
        };
        if let Some((e_prev, r_prev)) = prev {
            if r_prev.signum() != r.signum() {
                if branch(e_prev) != branch(e) {
                    // cot jumps from −∞ to +∞ across p₂D = mπ
                    discarded += 1;
                } else {
                    brackets += 1;
                    let root = bisect(&residual, e_prev, e, r_prev, opts.tolerance * c2);
                    let (p1, p2) = momenta(root, c, v1);
                    let (s, co) = (p2 * d).sin_cos();
                    let (l, rr) = sides(root, c, v1, p1, p2, s, co);
                    residuals.push((l - rr).abs() / l.abs().max(rr.abs()));
                    energies.push(root);
                }
            }
        }
        prev = Some((e, r));
    }
    if energies.is_empty() {
        return Err(Error::NoRoots { lo, hi });
    }
    Ok(BoundStateSet {
        energies,
        c,
        brackets,
        discarded_poles: discarded,
        relative_residuals: residuals,
    })
}

fn bisect(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        let m = 0.5 * (a + b);
        let Some(fm) = f(m) else { break };
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Continuous mode index `N_p = L √(E²/c² − c²) / (2π)` of a free electron
/// with energy `E ≥ c²`.
pub fn energy_to_mode(energy: f64, c: f64, box_length: f64) -> Result<f64> {
    let c2 = c * c;
    if energy < c2 {
        return Err(Error::Domain(format!(
            "E = {energy} below the rest energy {c2}"
        )));
    }
    let p = ((energy / c) * (energy / c) - c2).max(0.0).sqrt();
    Ok(box_length * p / (2.0 * PI))
}

/// Free-electron energy of signed mode `N_p`.
pub fn mode_energy(mode: i64, c: f64, box_length: f64) -> f64 {
    free_energy(2.0 * PI * mode as f64 / box_length, c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedPeak {
    /// 1-based level index.
    pub level: usize,
    pub photons: u32,
    pub level_energy: f64,
    pub energy: f64,
    pub mode: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakPrediction {
    pub peaks: Vec<PredictedPeak>,
    /// Levels whose `E_i + nω` stays below the continuum threshold.
    pub below_threshold: Vec<usize>,
}

/// `E_i + nω` for every level that lands above `c²`.
pub fn predict_peaks(
    bound: &BoundStateSet,
    omega: f64,
    photons: u32,
    box_length: f64,
) -> PeakPrediction {
    let c = bound.c;
    let mut peaks = Vec::new();
    let mut below = Vec::new();
    for (i, &e) in bound.energies.iter().enumerate() {
        let energy = e + photons as f64 * omega;
        match energy_to_mode(energy, c, box_length) {
            Ok(mode) if energy > c * c => peaks.push(PredictedPeak {
                level: i + 1,
                photons,
                level_energy: e,
                energy,
                mode,
            }),
            _ => below.push(i + 1),
        }
    }
    PeakPrediction {
        peaks,
        below_threshold: below,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedPeak {
    pub mode: i64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    /// Half-width of the local-maximum window, in modes.
    pub window: usize,
    /// Minimum height; `None` means 5× the median over the scanned half-axis.
    pub min_height: Option<f64>,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            window: 2,
            min_height: None,
        }
    }
}

/// Default height threshold: 5× the median of the spectrum over the half
/// axis that contains `range` (the whole axis if `range` straddles 0).
pub fn default_min_height(spectrum: &SpectrumResult, range: (i64, i64)) -> f64 {
    let (a, b) = range;
    let mut values: Vec<f64> = spectrum
        .modes
        .iter()
        .zip(&spectrum.occupation)
        .filter(|(&k, _)| {
            if a >= 0 {
                k >= 0
            } else if b <= 0 {
                k <= 0
            } else {
                true
            }
        })
        .map(|(_, &n)| n)
        .collect();
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    let median = if values.len().is_multiple_of(2) {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    };
    5.0 * median
}

/// Local maxima with `N_p ∈ [range.0, range.1]`, sorted by mode.
///
/// A mode is a peak when it is strictly higher than every mode up to
/// `window` below it, at least as high as every mode up to `window` above
/// it, positive, and at least the height threshold.
pub fn detect_peaks(
    spectrum: &SpectrumResult,
    range: (i64, i64),
    opts: DetectOptions,
) -> Vec<DetectedPeak> {
    let Some(&first) = spectrum.modes.first() else {
        return Vec::new();
    };
    let min_height = opts
        .min_height
        .unwrap_or_else(|| default_min_height(spectrum, range));
    let w = opts.window as i64;
    let len = spectrum.occupation.len() as i64;
    let height = |k: i64| -> Option<f64> {
        let i = k - first;
        (0..len).contains(&i).then(|| spectrum.occupation[i as usize])
    };
    let mut peaks = Vec::new();
    for k in range.0.max(first)..=range.1.min(first + len - 1) {
        let h = height(k).unwrap_or(0.0);
        if !(h > 0.0 && h >= min_height) {
            continue;
        }
        let left_ok = (1..=w).all(|d| height(k - d).is_none_or(|x| h > x));
        let right_ok = (1..=w).all(|d| height(k + d).is_none_or(|x| h >= x));
        if left_ok && right_ok {
            peaks.push(DetectedPeak { mode: k, height: h });
        }
    }
    peaks
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakMatch {
    pub level: usize,
    pub photons: u32,
    pub level_energy: f64,
    pub predicted_energy: f64,
    pub predicted_mode: f64,
    pub detected_mode: i64,
    pub detected_energy: f64,
    /// `E_detected − E_i − nω`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakMatchReport {
    pub rows: Vec<PeakMatch>,
    pub unmatched_predicted: Vec<PredictedPeak>,
    pub unmatched_detected: Vec<DetectedPeak>,
    pub tolerance: f64,
}

/// Greedy nearest-energy assignment: candidate pairs within `tol` are taken
/// in order of increasing `|gap|`, each prediction and each detected peak
/// used at most once. Rows are ordered by photon number, then level.
pub fn match_peaks(
    predicted: &[PredictedPeak],
    detected: &[DetectedPeak],
    tol: f64,
    c: f64,
    box_length: f64,
) -> PeakMatchReport {
    let detected_energy: Vec<f64> = detected
        .iter()
        .map(|d| mode_energy(d.mode, c, box_length))
        .collect();
    let mut candidates = Vec::new();
    for (i, p) in predicted.iter().enumerate() {
        for (j, &e) in detected_energy.iter().enumerate() {
            let gap = e - p.energy;
            if gap.abs() <= tol {
                candidates.push((gap.abs(), i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; predicted.len()];
    let mut used_d = vec![false; detected.len()];
    let mut rows = Vec::new();
    for (_, i, j) in candidates {
        if used_p[i] || used_d[j] {
            continue;
        }
        used_p[i] = true;
        used_d[j] = true;
        let p = &predicted[i];
        rows.push(PeakMatch {
            level: p.level,
            photons: p.photons,
            level_energy: p.level_energy,
            predicted_energy: p.energy,
            predicted_mode: p.mode,
            detected_mode: detected[j].mode,
            detected_energy: detected_energy[j],
            gap: detected_energy[j] - p.energy,
        });
    }
    rows.sort_by_key(|r| (r.photons, r.level));
    PeakMatchReport {
        rows,
        unmatched_predicted: predicted
            .iter()
            .zip(&used_p)
            .filter(|(_, &u)| !u)
            .map(|(p, _)| p.clone())
            .collect(),
        unmatched_detected: detected
            .iter()
            .zip(&used_d)
            .filter(|(_, &u)| !u)
            .map(|(d, _)| *d)
            .collect(),
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: f64 = 137.036;

    fn defaults() -> (f64, f64, f64) {
        let c2 = C * C;
        (C, 2.0 * c2 - 10_000.0, 10.0 / C)
    }

    /// Independent tabulation: a million residual evaluations on a uniform
    /// energy grid, counting sign changes away from `cot` poles.
    fn brute_force_roots(c: f64, v1: f64, d: f64, points: usize) -> Vec<f64> {
        let (lo, hi) = energy_window(c, v1);
        let eval = |e: f64| {
            let p1 = (c * c - e * e / (c * c)).sqrt();
            let p2 = ((e + v1).powi(2) / (c * c) - c * c).sqrt();
            let lhs = c * p2 / (p2 * d).tan();
            let rhs = e * v1 / (c * p1) - c * p1;
            (lhs - rhs, (p2 * d).sin())
        };
        let mut roots = Vec::new();
        let h = (hi - lo) / points as f64;
        let mut prev = eval(lo + 0.5 * h);
        for k in 1..points {
            let e = lo + (k as f64 + 0.5) * h;
            let cur = eval(e);
            // a root is a sign change with a small jump; a pole is a sign
            // change where sin(p₂D) changes sign
            if prev.0.signum() != cur.0.signum() && prev.1.signum() == cur.1.signum() {
                roots.push(e - 0.5 * h);
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn default_ladder() {
        let (c, v1, d) = defaults();
        let set = solve_bound_states(c, v1, d).unwrap();
        let brute = brute_force_roots(c, v1, d, 1_000_000);
        assert_eq!(set.len(), brute.len());
        assert_eq!(set.len(), 8);
        let h = (2.0 * C * C) / 1_000_000.0;
        for (a, b) in set.energies.iter().zip(&brute) {
            assert!((a - b).abs() <= h, "{a} vs {b}");
        }
        for r in &set.relative_residuals {
            assert!(*r < 1e-6);
        }
        assert!(set.energies.windows(2).all(|w| w[0] < w[1]));
        let (lo, hi) = energy_window(c, v1);
        assert!(set.energies.iter().all(|&e| e > lo && e < hi));
        // levels 1..7 as tabulated
        let expected = [-0.4247, -0.3069, -0.1361, 0.0680, 0.2919, 0.5260, 0.7618];
        for (e, x) in set.in_c2().iter().zip(expected) {
            assert!((e - x).abs() < 1e-3, "{e} vs {x}");
        }
        // the solved eighth level is 0.9778 c²
        assert!((set.in_c2()[7] - 0.9778).abs() < 1e-3);
    }

    #[test]
    fn count_stable_under_finer_scan() {
        let (c, v1, d) = defaults();
        let coarse = solve_bound_states_with(
            c,
            v1,
            d,
            ScanOptions {
                max_phase_step: PI / 8.0,
                min_points: 64,
                tolerance: 1e-10,
            },
        )
        .unwrap();
        let fine = solve_bound_states_with(
            c,
            v1,
            d,
            ScanOptions {
                max_phase_step: PI / 16.0,
                min_points: 128,
                tolerance: 1e-10,
            },
        )
        .unwrap();
        assert_eq!(coarse.len(), fine.len());
        for (a, b) in coarse.energies.iter().zip(&fine.energies) {
            assert!((a - b).abs() < 1e-9 * C * C);
        }
    }

    #[test]
    fn residual_behaviour() {
        let (c, v1, d) = defaults();
        let c2 = c * c;
        let r = eigen_residual(-0.4247 * c2, c, v1, d).unwrap();
        // slope near the root is O(1e3) per 1e-4 c²; the printed value is rounded
        let r_lo = eigen_residual(-0.42475 * c2, c, v1, d).unwrap();
        let r_hi = eigen_residual(-0.42455 * c2, c, v1, d).unwrap();
        assert!(r_lo.signum() != r_hi.signum());
        assert!(r.abs() < r_lo.abs().max(r_hi.abs()));
        // divergence towards the continuum threshold
        let near = eigen_residual(c2 * (1.0 - 1e-10), c, v1, d).unwrap();
        let farther = eigen_residual(c2 * (1.0 - 1e-6), c, v1, d).unwrap();
        assert!(near.abs() > 10.0 * farther.abs());
        assert!(eigen_residual(c2, c, v1, d).is_err());
        assert!(eigen_residual(c2 - v1 - 1.0, c, v1, d).is_err());
    }

    #[test]
    fn residual_rejects_poles() {
        let (c, v1, d) = defaults();
        // p₂ D = π exactly
        let e = energy_of_p2(PI / d, c, v1);
        let (_, p2) = momenta(e, c, v1);
        if ((p2 * d).sin()).abs() < POLE_GUARD {
            assert!(eigen_residual(e, c, v1, d).is_err());
        }
    }

    #[test]
    fn no_roots_error() {
        // a very shallow, narrow well has no level in the window
        assert!(matches!(
            solve_bound_states(C, 1e-3, 1e-6),
            Err(Error::NoRoots { .. })
        ));
        assert!(solve_bound_states(C, -1.0, 1.0).is_err());
    }

    #[test]
    fn mode_mapping() {
        let c2 = C * C;
        assert_eq!(energy_to_mode(c2, C, 2.0).unwrap(), 0.0);
        assert!((energy_to_mode(1.6637 * c2, C, 2.0).unwrap() - 58.0).abs() < 0.05);
        assert!((energy_to_mode(7.4948 * c2, C, 2.0).unwrap() - 324.0).abs() < 0.05);
        assert!(energy_to_mode(0.99 * c2, C, 2.0).is_err());
        for k in [0i64, 1, 58, 254, 1023] {
            let back = energy_to_mode(mode_energy(k, C, 2.0), C, 2.0).unwrap();
            assert!((back - k as f64).abs() <= 1e-12 * (k as f64).max(1.0));
        }
    }

    #[test]
    fn predictions() {
        let (c, v1, d) = defaults();
        let set = solve_bound_states(c, v1, d).unwrap();
        let omega = 2.1 * c * c;
        let one = predict_peaks(&set, omega, 1, 2.0);
        assert_eq!(one.peaks.len(), 8);
        let first = &one.peaks[0];
        assert_eq!(first.level, 1);
        // -0.4247 + 2.1 = 1.6753 within the level's rounding
        assert!((first.energy / (c * c) - 1.6753).abs() < 1e-3);
        let three = predict_peaks(&set, omega, 3, 2.0);
        assert!((three.peaks[0].energy / (c * c) - 5.8753).abs() < 1e-3);
        let zero = predict_peaks(&set, omega, 0, 2.0);
        assert!(zero.peaks.is_empty());
        assert_eq!(zero.below_threshold, (1..=8).collect::<Vec<_>>());
    }

    fn synthetic(modes: std::ops::Range<i64>, f: impl FnMut(i64) -> f64) -> SpectrumResult {
        SpectrumResult {
            time: 0.0,
            modes: modes.clone().collect(),
            occupation: modes.map(f).collect(),
        }
    }

    #[test]
    fn detect_on_flat_and_bump() {
        let flat = synthetic(-64..64, |_| 0.0);
        assert!(detect_peaks(&flat, (0, 63), DetectOptions::default()).is_empty());
        let bump = synthetic(-64..64, |k| {
            1e-9 + (-((k - 21) as f64).powi(2) / 8.0).exp()
        });
        let peaks = detect_peaks(&bump, (0, 63), DetectOptions::default());
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].mode, 21);
        // outside the requested range nothing is reported
        assert!(detect_peaks(&bump, (30, 63), DetectOptions::default()).is_empty());
    }

    #[test]
    fn detect_ignores_small_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let base = |k: i64| {
            1e-4 + [10i64, 25, 40]
                .iter()
                .map(|&c| (-((k - c) as f64).powi(2) / 2.0).exp())
                .sum::<f64>()
        };
        let clean = synthetic(-64..64, base);
        let reference = detect_peaks(&clean, (0, 63), DetectOptions::default());
        assert_eq!(reference.iter().map(|p| p.mode).collect::<Vec<_>>(), vec![10, 25, 40]);
        let h_min = default_min_height(&clean, (0, 63));
        let noisy = synthetic(-64..64, |k| base(k) + rng.gen_range(0.0..h_min / 10.0));
        let found = detect_peaks(
            &noisy,
            (0, 63),
            DetectOptions {
                window: 2,
                min_height: Some(h_min),
            },
        );
        assert_eq!(found.iter().map(|p| p.mode).collect::<Vec<_>>(), vec![10, 25, 40]);
    }

    #[test]
    fn matching() {
        let c2 = C * C;
        let predicted: Vec<PredictedPeak> = [58i64, 120, 254]
            .iter()
            .enumerate()
            .map(|(i, &k)| PredictedPeak {
                level: i + 1,
                photons: 1,
                level_energy: 0.0,
                energy: mode_energy(k, C, 2.0),
                mode: k as f64,
            })
            .collect();
        let detected: Vec<DetectedPeak> = [254i64, 58, 120]
            .iter()
            .map(|&k| DetectedPeak { mode: k, height: 1.0 })
            .collect();
        let report = match_peaks(&predicted, &detected, 0.06 * c2, C, 2.0);
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.gap == 0.0));
        assert!(report.unmatched_detected.is_empty());

        // each detected peak used once; the farther prediction stays unmatched
        let crowded = vec![
            PredictedPeak {
                level: 1,
                photons: 1,
                level_energy: 0.0,
                energy: mode_energy(58, C, 2.0) + 0.01 * c2,
                mode: 58.3,
            },
            PredictedPeak {
                level: 2,
                photons: 1,
                level_energy: 0.0,
                energy: mode_energy(58, C, 2.0) - 0.02 * c2,
                mode: 57.5,
            },
        ];
        let one = [DetectedPeak { mode: 58, height: 1.0 }];
        let report = match_peaks(&crowded, &one, 0.06 * c2, C, 2.0);
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].level, 1);
        assert_eq!(report.unmatched_predicted.len(), 1);
    }
}
