//! Driving-cycle ingestion, validation, resampling, and built-in cycles.
//!
//! A [`DrivingCycle`] is a uniformly sampled vehicle speed trace (m/s)
//! with an optional road-grade trace (rise/run ratio). Cycles are
//! immutable after construction and safe to share across threads.
//!
//! External cycle files are CSV with header `time_s,speed_kmh` and an
//! optional third column `grade_pct`. Speeds are stored internally in
//! m/s; the km/h convention exists only at the file boundary.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::units::{kmh_to_mps, mps_to_kmh};

/// Sanity bound on implied acceleration for ingested data, m/s^2.
pub const MAX_ABS_ACCEL: f64 = 5.0;

/// A uniformly sampled driving cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingCycle {
    name: String,
    dt: f64,
    speed_mps: Vec<f64>,
    grade: Vec<f64>,
}

impl DrivingCycle {
    /// Builds a cycle and checks every invariant: non-negative speeds,
    /// matching sequence lengths of at least two samples, positive dt,
    /// and implied |dv/dt| within [`MAX_ABS_ACCEL`].
    pub fn new(
        name: impl Into<String>,
        dt: f64,
        speed_mps: Vec<f64>,
        grade: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Validation(format!("dt must be > 0, got {dt}")));
        }
        if speed_mps.len() < 2 {
            return Err(Error::Validation(format!(
                "cycle needs at least 2 samples, got {}",
                speed_mps.len()
            )));
        }
        if let Some((i, v)) = speed_mps
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Validation(format!(
                "negative or non-finite speed {v} at sample {i}"
            )));
        }
        let grade = grade.unwrap_or_else(|| vec![0.0; speed_mps.len()]);
        if grade.len() != speed_mps.len() {
            return Err(Error::Validation(format!(
                "grade length {} does not match speed length {}",
                grade.len(),
                speed_mps.len()
            )));
        }
        for pair in speed_mps.windows(2) {
            let a = (pair[1] - pair[0]) / dt;
            if a.abs() > MAX_ABS_ACCEL {
                return Err(Error::Validation(format!(
                    "implied acceleration {a:.3} m/s^2 exceeds bound {MAX_ABS_ACCEL}"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            dt,
            speed_mps,
            grade,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Sample period, s.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.speed_mps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: len >= 2
    }

    /// Number of simulation steps (samples minus one).
    pub fn steps(&self) -> usize {
        self.speed_mps.len() - 1
    }

    /// Total duration, s.
    pub fn duration(&self) -> f64 {
        (self.speed_mps.len() - 1) as f64 * self.dt
    }

    pub fn speed_mps(&self) -> &[f64] {
        &self.speed_mps
    }

    pub fn grade(&self) -> &[f64] {
        &self.grade
    }

    /// Trapezoidal distance integral, m.
    pub fn distance_m(&self) -> f64 {
        self.speed_mps
            .windows(2)
            .map(|p| 0.5 * (p[0] + p[1]) * self.dt)
            .sum()
    }

    pub fn max_speed_mps(&self) -> f64 {
        self.speed_mps.iter().cloned().fold(0.0, f64::max)
    }

    /// Time-averaged speed over the whole cycle, m/s.
    pub fn mean_speed_mps(&self) -> f64 {
        self.distance_m() / self.duration()
    }

    /// Largest implied |dv/dt| between consecutive samples, m/s^2.
    pub fn max_abs_accel(&self) -> f64 {
        self.speed_mps
            .windows(2)
            .map(|p| ((p[1] - p[0]) / self.dt).abs())
            .fold(0.0, f64::max)
    }
}

/// Loads a cycle from CSV text (`time_s,speed_kmh[,grade_pct]`).
///
/// The time column must be strictly increasing with a uniform step
/// (within 1e-6 s). Speeds are converted km/h -> m/s and grades
/// percent -> ratio.
pub fn load_cycle(source: impl Read, name: &str) -> Result<DrivingCycle> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();

    let header = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break (i + 1, line);
            }
            None => return Err(Error::Format("empty cycle file".into())),
        }
    };
    let cols: Vec<&str> = header.1.split(',').map(str::trim).collect();
    let has_grade = match cols.as_slice() {
        ["time_s", "speed_kmh"] => false,
        ["time_s", "speed_kmh", "grade_pct"] => true,
        _ => {
            return Err(Error::Format(format!(
                "expected header `time_s,speed_kmh[,grade_pct]`, got `{}`",
                header.1.trim()
            )))
        }
    };

    let mut times = Vec::new();
    let mut speeds = Vec::new();
    let mut grades = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let expected = if has_grade { 3 } else { 2 };
        if fields.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad {what} `{s}`: {e}"),
            })
        };
        let t = parse(fields[0], "time_s")?;
        let v = parse(fields[1], "speed_kmh")?;
        if v < 0.0 {
            return Err(Error::Validation(format!(
                "negative speed {v} km/h at line {line_no}"
            )));
        }
        times.push(t);
        speeds.push(kmh_to_mps(v));
        if has_grade {
            grades.push(parse(fields[2], "grade_pct")? / 100.0);
        }
    }

    if times.len() < 2 {
        return Err(Error::Validation(format!(
            "cycle needs at least 2 samples, got {}",
            times.len()
        )));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::Format(format!(
            "time column must be strictly increasing (first step {dt})"
        )));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if (step - dt).abs() > 1e-6 {
            return Err(Error::Format(format!(
                "non-uniform time step at sample {}: {step} vs {dt}",
                i + 1
            )));
        }
    }

    DrivingCycle::new(name, dt, speeds, has_grade.then_some(grades))
}

/// Writes a cycle in the same CSV format accepted by [`load_cycle`].
///
/// Values use shortest round-trip float formatting, so a write/load
/// round trip reproduces speeds exactly up to the km/h conversion.
pub fn write_cycle(cycle: &DrivingCycle, mut out: impl Write) -> Result<()> {
    let grade_used = cycle.grade.iter().any(|g| *g != 0.0);
    if grade_used {
        writeln!(out, "time_s,speed_kmh,grade_pct")?;
    } else {
        writeln!(out, "time_s,speed_kmh")?;
    }
    for (i, v) in cycle.speed_mps.iter().enumerate() {
        let t = i as f64 * cycle.dt;
        if grade_used {
            writeln!(out, "{},{},{}", t, mps_to_kmh(*v), cycle.grade[i] * 100.0)?;
        } else {
            writeln!(out, "{},{}", t, mps_to_kmh(*v))?;
        }
    }
    Ok(())
}

/// Resamples a cycle onto a new uniform grid by linear interpolation.
///
/// `dt_new` must divide the cycle duration evenly (within 1e-6 of a
/// step), so that both endpoints are preserved exactly.
pub fn resample(cycle: &DrivingCycle, dt_new: f64) -> Result<DrivingCycle> {
    if !(dt_new > 0.0) {
        return Err(Error::Argument(format!("dt_new must be > 0, got {dt_new}")));
    }
    let duration = cycle.duration();
    let steps = duration / dt_new;
    let n_steps = steps.round();
    if (steps - n_steps).abs() > 1e-6 || n_steps < 1.0 {
        return Err(Error::Argument(format!(
            "dt_new {dt_new} does not evenly divide cycle duration {duration}"
        )));
    }
    let n = n_steps as usize + 1;
    let interp = |seq: &[f64], t: f64| -> f64 {
        let x = (t / cycle.dt).clamp(0.0, (seq.len() - 1) as f64);
        let i = (x.floor() as usize).min(seq.len() - 2);
        let frac = x - i as f64;
        seq[i] + (seq[i + 1] - seq[i]) * frac
    };
    let mut speeds = Vec::with_capacity(n);
    let mut grades = Vec::with_capacity(n);
    for k in 0..n {
        let t = if k == n - 1 { duration } else { k as f64 * dt_new };
        speeds.push(interp(&cycle.speed_mps, t));
        grades.push(interp(&cycle.grade, t));
    }
    DrivingCycle::new(cycle.name.clone(), dt_new, speeds, Some(grades))
}

/// Returns a built-in cycle: `"ece15x5"` or `"cbdc-synthetic"`.
///
/// `ece15x5` is the 195 s ECE15 elementary urban cycle repeated five
/// times (975 s, 1 s step, 50 km/h peak). `cbdc-synthetic` is a bundled
/// 1300 s stop-and-go urban bus cycle standing in for the Chinese bus
/// driving cycle, whose exact trace is not published here; its shape
/// (peak 57 km/h, mean speed ~18.6 km/h, long dwell times) matches the
/// class of cycle, not a measured trace. Supply a CSV file to run the
/// real cycle. Both builders are deterministic.
pub fn builtin_cycle(name: &str) -> Result<DrivingCycle> {
    match name {
        "ece15x5" => ece15x5(),
        "cbdc-synthetic" => cbdc_synthetic(),
        _ => Err(Error::Lookup {
            kind: "builtin cycle",
            name: name.to_string(),
        }),
    }
}

/// ECE15 elementary-cycle speed profile as (time s, speed km/h) knots.
const ECE15_KNOTS: &[(f64, f64)] = &[
    (0.0, 0.0),
    (11.0, 0.0),
    (15.0, 15.0),
    (23.0, 15.0),
    (28.0, 0.0),
    (49.0, 0.0),
    (61.0, 32.0),
    (85.0, 32.0),
    (96.0, 0.0),
    (117.0, 0.0),
    (143.0, 50.0),
    (155.0, 50.0),
    (163.0, 35.0),
    (176.0, 35.0),
    (188.0, 0.0),
    (195.0, 0.0),
];

const ECE15_PERIOD: f64 = 195.0;

fn sample_knots(knots: &[(f64, f64)], t: f64) -> f64 {
    debug_assert!(t >= knots[0].0 && t <= knots[knots.len() - 1].0);
    let idx = knots.partition_point(|(kt, _)| *kt <= t).min(knots.len() - 1);
    if idx == 0 {
        return knots[0].1;
    }
    let (t0, v0) = knots[idx - 1];
    let (t1, v1) = knots[idx];
    if t1 == t0 {
        v1
    } else {
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

fn ece15x5() -> Result<DrivingCycle> {
    let total = ECE15_PERIOD as usize * 5;
    let speeds: Vec<f64> = (0..=total)
        .map(|t| {
            let phase = (t as f64) % ECE15_PERIOD;
            kmh_to_mps(sample_knots(ECE15_KNOTS, phase))
        })
        .collect();
    DrivingCycle::new("ece15x5", 1.0, speeds, None)
}

/// Synthetic bus microtrips: (peak speed km/h, cruise s, idle-after s).
const CBDC_TRIPS: &[(f64, f64, f64)] = &[
    (20.0, 15.0, 40.0),
    (35.0, 30.0, 55.0),
    (45.0, 40.0, 45.0),
    (25.0, 10.0, 30.0),
    (50.0, 45.0, 60.0),
    (40.0, 25.0, 40.0),
    (57.0, 60.0, 70.0),
    (30.0, 20.0, 35.0),
    (45.0, 35.0, 55.0),
    (55.0, 50.0, 65.0),
    (35.0, 18.0, 45.0),
    (48.0, 30.0, 35.0),
];

/// Launch and braking ramp rates for the synthetic bus cycle, m/s^2.
const CBDC_ACCEL: f64 = 0.7;
const CBDC_DECEL: f64 = 1.0;
const CBDC_INITIAL_IDLE: f64 = 20.0;
const CBDC_DURATION: f64 = 1300.0;

fn cbdc_synthetic() -> Result<DrivingCycle> {
    let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0), (CBDC_INITIAL_IDLE, 0.0)];
    let mut t = CBDC_INITIAL_IDLE;
    for &(peak_kmh, cruise, idle) in CBDC_TRIPS {
        let v = kmh_to_mps(peak_kmh);
        t += v / CBDC_ACCEL;
        knots.push((t, peak_kmh));
        t += cruise;
        knots.push((t, peak_kmh));
        t += v / CBDC_DECEL;
        knots.push((t, 0.0));
        t += idle;
        knots.push((t, 0.0));
    }
    debug_assert!(t >= CBDC_DURATION - 1.0);
    // Trailing idle absorbs the fractional remainder so the sampled
    // cycle spans exactly CBDC_DURATION seconds.
    if t < CBDC_DURATION {
        knots.push((CBDC_DURATION, 0.0));
    }
    let n = CBDC_DURATION as usize;
    let speeds: Vec<f64> = (0..=n)
        .map(|k| kmh_to_mps(sample_knots(&knots, (k as f64).min(knots[knots.len() - 1].0))))
        .collect();
    DrivingCycle::new("cbdc-synthetic", 1.0, speeds, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn load_converts_units() {
        let csv = "time_s,speed_kmh\n0,0\n1,3.6\n";
        let c = load_cycle(csv.as_bytes(), "t").unwrap();
        assert_eq!(c.speed_mps(), &[0.0, 1.0]);
        assert_eq!(c.dt(), 1.0);
    }

    #[test]
    fn load_rejects_single_row() {
        let csv = "time_s,speed_kmh\n0,0\n";
        assert!(matches!(
            load_cycle(csv.as_bytes(), "t"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_rejects_negative_speed() {
        let csv = "time_s,speed_kmh\n0,0\n1,-3\n";
        assert!(matches!(
            load_cycle(csv.as_bytes(), "t"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_reports_line_numbers() {
        let csv = "time_s,speed_kmh\n0,0\n1,abc\n";
        match load_cycle(csv.as_bytes(), "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_non_uniform_step() {
        let csv = "time_s,speed_kmh\n0,0\n1,1\n3,2\n";
        assert!(matches!(
            load_cycle(csv.as_bytes(), "t"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn load_parses_grade_column() {
        let csv = "time_s,speed_kmh,grade_pct\n0,0,5\n1,3.6,5\n";
        let c = load_cycle(csv.as_bytes(), "t").unwrap();
        assert_eq!(c.grade(), &[0.05, 0.05]);
    }

    #[test]
    fn round_trip_preserves_speeds() {
        let c = builtin_cycle("ece15x5").unwrap();
        let mut buf = Vec::new();
        write_cycle(&c, &mut buf).unwrap();
        let back = load_cycle(buf.as_slice(), c.name()).unwrap();
        assert_eq!(back.len(), c.len());
        for (a, b) in c.speed_mps().iter().zip(back.speed_mps()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn ece15x5_shape() {
        let c = builtin_cycle("ece15x5").unwrap();
        assert_eq!(c.duration(), 975.0);
        assert_eq!(c.len(), 976);
        assert_relative_eq!(c.max_speed_mps(), 50.0 / 3.6, max_relative = 1e-12);
        assert_eq!(c.speed_mps()[0], 0.0);
        assert!(c.max_abs_accel() <= MAX_ABS_ACCEL);
    }

    #[test]
    fn ece15x5_is_five_repetitions() {
        let c = builtin_cycle("ece15x5").unwrap();
        for t in 0..=195 {
            assert_eq!(c.speed_mps()[t], c.speed_mps()[t + 195]);
        }
    }

    #[test]
    fn builtin_is_deterministic() {
        for name in ["ece15x5", "cbdc-synthetic"] {
            let a = builtin_cycle(name).unwrap();
            let b = builtin_cycle(name).unwrap();
            assert_eq!(a.speed_mps(), b.speed_mps());
            assert_eq!(a.grade(), b.grade());
        }
    }

    #[test]
    fn builtin_unknown_name() {
        assert!(matches!(
            builtin_cycle("wltp"),
            Err(Error::Lookup { .. })
        ));
    }

    #[test]
    fn cbdc_statistics() {
        let c = builtin_cycle("cbdc-synthetic").unwrap();
        assert!((c.duration() - 1300.0).abs() < 1e-9);
        let mean_kmh = mps_to_kmh(c.mean_speed_mps());
        assert!(
            (15.0..=20.0).contains(&mean_kmh),
            "mean speed {mean_kmh} km/h outside bus-cycle band"
        );
        assert!(mps_to_kmh(c.max_speed_mps()) <= 60.0);
        assert!(
            c.max_abs_accel() <= 1.5,
            "max accel {} too aggressive",
            c.max_abs_accel()
        );
        assert_eq!(c.speed_mps()[0], 0.0);
        assert_eq!(*c.speed_mps().last().unwrap(), 0.0);
    }

    #[test]
    fn resample_identity() {
        let c = builtin_cycle("ece15x5").unwrap();
        let r = resample(&c, c.dt()).unwrap();
        assert_eq!(r.speed_mps(), c.speed_mps());
    }

    #[test]
    fn resample_linear_midpoint() {
        let c = DrivingCycle::new("t", 1.0, vec![0.0, 2.0], None).unwrap();
        let r = resample(&c, 0.5).unwrap();
        assert_eq!(r.speed_mps(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn resample_rejects_bad_dt() {
        let c = builtin_cycle("ece15x5").unwrap();
        assert!(matches!(resample(&c, 0.0), Err(Error::Argument(_))));
        assert!(matches!(resample(&c, -1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn resample_preserves_distance() {
        let c = builtin_cycle("ece15x5").unwrap();
        let d0 = c.distance_m();
        let r = resample(&c, 0.5).unwrap();
        let d1 = r.distance_m();
        assert!(
            ((d1 - d0) / d0).abs() < 1e-3,
            "distance drifted from {d0} to {d1}"
        );
        // Endpoints preserved.
        assert_eq!(r.speed_mps()[0], c.speed_mps()[0]);
        assert_eq!(*r.speed_mps().last().unwrap(), *c.speed_mps().last().unwrap());
    }

    #[test]
    fn validation_rejects_harsh_accel() {
        let err = DrivingCycle::new("t", 1.0, vec![0.0, 6.0], None);
        assert!(matches!(err, Err(Error::Validation(_))));
    }
}
