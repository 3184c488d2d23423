//! One-sided power spectrum of the displacement record.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::DiagnosticsError;
use crate::integrate::Trajectory;

/// Smallest record accepted by [`power_spectrum`].
pub const MIN_SAMPLES: usize = 64;

/// One-sided displacement power spectrum.
///
/// Normalized so that the sum over all bins equals the windowed time-domain
/// energy (Parseval). The frequency axis is angular, in units of `omega_m`,
/// spanning `[0, pi/dt_sample]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    /// Taper applied before the transform.
    pub window: String,
    pub dt_sample: f64,
}

impl PowerSpectrum {
    /// Width of one frequency bin.
    pub fn bin_width(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    /// Index of the strongest non-DC bin.
    pub fn peak_index(&self) -> usize {
        let mut best = 1;
        for j in 2..self.power.len() {
            if self.power[j] > self.power[best] {
                best = j;
            }
        }
        best
    }
}

/// A local maximum of the spectrum, with power relative to the main peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeakRaw {
    pub index: usize,
    pub omega: f64,
    pub power: f64,
}

/// Mean-removed, Hann-tapered, one-sided power spectrum of `x(t)`.
///
/// The record is truncated to the largest power-of-two length first; fewer
/// than [`MIN_SAMPLES`] samples is an error.
pub fn power_spectrum(traj: &Trajectory) -> Result<PowerSpectrum, DiagnosticsError> {
    let len = traj.samples.len();
    if len < MIN_SAMPLES {
        return Err(DiagnosticsError::InputTooShort {
            len,
            min: MIN_SAMPLES,
        });
    }
    let n = 1usize << (usize::BITS - 1 - len.leading_zeros());

    let mean = traj.samples[..n].iter().map(|s| s.x).sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let w = 0.5 * (1.0 - (std::f64::consts::TAU * k as f64 / (n as f64 - 1.0)).cos());
            Complex::new((traj.samples[k].x - mean) * w, 0.0)
        })
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    // One-sided normalization: |Y|^2/n doubled on interior bins makes the
    // total equal the windowed signal energy.
    let half = n / 2;
    let mut power = Vec::with_capacity(half + 1);
    for (j, y) in buf.iter().take(half + 1).enumerate() {
        let mut p = y.norm_sqr() / n as f64;
        if j != 0 && j != half {
            p *= 2.0;
        }
        power.push(p);
    }
    let frequencies = (0..=half)
        .map(|j| std::f64::consts::TAU * j as f64 / (n as f64 * traj.dt_sample))
        .collect();

    Ok(PowerSpectrum {
        frequencies,
        power,
        window: "hann".to_string(),
        dt_sample: traj.dt_sample,
    })
}

/// Up to `max_peaks` strongest strict local maxima, sorted by power.
pub fn dominant_peaks(spectrum: &PowerSpectrum, max_peaks: usize) -> Vec<SpectralPeakRaw> {
    let p = &spectrum.power;
    let mut peaks: Vec<SpectralPeakRaw> = (1..p.len().saturating_sub(1))
        .filter(|&j| p[j] > p[j - 1] && p[j] > p[j + 1])
        .map(|j| SpectralPeakRaw {
            index: j,
            omega: spectrum.frequencies[j],
            power: p[j],
        })
        .collect();
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power));
    peaks.truncate(max_peaks);
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhaseState;

    fn tone_trajectory(n: usize, dt: f64, omega: f64) -> Trajectory {
        Trajectory {
            t0: 0.0,
            dt_sample: dt,
            samples: (0..n)
                .map(|k| PhaseState::new((omega * dt * k as f64).sin(), 0.0))
                .collect(),
        }
    }

    #[test]
    fn pure_tone_peaks_in_the_right_bin() {
        let traj = tone_trajectory(1 << 14, 0.05, 1.0);
        let spec = power_spectrum(&traj).unwrap();
        let peak = spec.peak_index();
        let bin = spec.bin_width();
        assert!(
            (spec.frequencies[peak] - 1.0).abs() <= bin,
            "peak at {} with bin width {}",
            spec.frequencies[peak],
            bin
        );
    }

    #[test]
    fn constant_signal_has_zero_spectrum_after_mean_removal() {
        let traj = Trajectory {
            t0: 0.0,
            dt_sample: 0.1,
            samples: vec![PhaseState::new(3.7, 0.0); 256],
        };
        let spec = power_spectrum(&traj).unwrap();
        // Mean removal leaves only rounding residue, many orders below any
        // physical line.
        assert!(spec.power.iter().all(|&p| p < 1e-25));
    }

    #[test]
    fn short_input_is_rejected() {
        let traj = tone_trajectory(63, 0.05, 1.0);
        match power_spectrum(&traj) {
            Err(DiagnosticsError::InputTooShort { len: 63, min: 64 }) => {}
            other => panic!("expected InputTooShort, got {other:?}"),
        }
    }

    #[test]
    fn record_is_truncated_to_a_power_of_two() {
        let full = tone_trajectory(100, 0.05, 1.0);
        let head = tone_trajectory(64, 0.05, 1.0);
        assert_eq!(
            power_spectrum(&full).unwrap(),
            power_spectrum(&head).unwrap()
        );
    }

    #[test]
    fn frequency_axis_spans_zero_to_nyquist() {
        let traj = tone_trajectory(1 << 10, 0.05, 1.0);
        let spec = power_spectrum(&traj).unwrap();
        assert_eq!(spec.frequencies[0], 0.0);
        let nyquist = spec.frequencies[spec.frequencies.len() - 1];
        assert!((nyquist - std::f64::consts::PI / 0.05).abs() < 1e-9);
        assert!(spec.power.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn parseval_energy_matches() {
        // Deterministic pseudo-random signal.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 1 << 12;
        let traj = Trajectory {
            t0: 0.0,
            dt_sample: 0.02,
            samples: (0..n).map(|_| PhaseState::new(next(), 0.0)).collect(),
        };
        let mean = traj.samples.iter().map(|s| s.x).sum::<f64>() / n as f64;
        let windowed_energy: f64 = (0..n)
            .map(|k| {
                let w = 0.5 * (1.0 - (std::f64::consts::TAU * k as f64 / (n as f64 - 1.0)).cos());
                ((traj.samples[k].x - mean) * w).powi(2)
            })
            .sum();
        let spec = power_spectrum(&traj).unwrap();
        let total: f64 = spec.power.iter().sum();
        assert!(
            (total - windowed_energy).abs() / windowed_energy < 1e-10,
            "Parseval mismatch: {total} vs {windowed_energy}"
        );
    }

    #[test]
    fn dominant_peaks_are_sorted_local_maxima() {
        let traj = tone_trajectory(1 << 12, 0.05, 1.0);
        let spec = power_spectrum(&traj).unwrap();
        let peaks = dominant_peaks(&spec, 8);
        assert!(!peaks.is_empty());
        assert!((peaks[0].omega - 1.0).abs() <= 2.0 * spec.bin_width());
        for pair in peaks.windows(2) {
            assert!(pair[0].power >= pair[1].power);
        }
    }
}
