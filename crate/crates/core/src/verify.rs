//! Residual battery for Bateman pairs.
//!
//! Every check reduces one identity of the construction to a nonnegative
//! number at a spacetime event. [`run_battery`] evaluates the enabled checks
//! over quasi-random events and records maxima and means.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{BatemanField, Local};
use crate::forms::{self, CoVector, ThreeForm, TwoForm, C64};
use crate::sampling::{Halton4, SampleBox};

pub const REPORT_SCHEMA: &str = "knotlight.verify/1";

/// Events where a projective denominator is relatively smaller than this are
/// replaced by fresh samples.
pub const POLE_MARGIN: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    SelfDual,
    Decomposable,
    Closed,
    BatemanPde,
    Nullness,
    Normalized,
    DkRelation,
    DmRelation,
    PullbackF,
    PullbackStarF,
    Reconstruction,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::SelfDual,
        Check::Decomposable,
        Check::Closed,
        Check::BatemanPde,
        Check::Nullness,
        Check::Normalized,
        Check::DkRelation,
        Check::DmRelation,
        Check::PullbackF,
        Check::PullbackStarF,
        Check::Reconstruction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::SelfDual => "self_dual",
            Check::Decomposable => "decomposable",
            Check::Closed => "closed",
            Check::BatemanPde => "bateman_pde",
            Check::Nullness => "nullness",
            Check::Normalized => "normalized",
            Check::DkRelation => "dk_relation",
            Check::DmRelation => "dm_relation",
            Check::PullbackF => "pullback_f",
            Check::PullbackStarF => "pullback_star_f",
            Check::Reconstruction => "reconstruction",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Check::SelfDual => "|*R - iR|",
            Check::Decomposable => "|R ^ R|",
            Check::Closed => "|dR|",
            Check::BatemanPde => "|*(da ^ db) - i da ^ db|",
            Check::Nullness => "max(|g(k,k)|, |g(m,m)|, |g(k,m)|)",
            Check::Normalized => "||alpha|^2 + |beta|^2 - 1|",
            Check::DkRelation => "|dk - i m ^ conj(m) / 4|",
            Check::DmRelation => "|dm - 2i k ^ m|",
            Check::PullbackF => "|i dpsi2 ^ conj(dpsi2) / (1 + |psi2|^2)^2 - F|",
            Check::PullbackStarF => "|i dpsi3 ^ conj(dpsi3) / (1 + |psi3|^2)^2 - *F|",
            Check::Reconstruction => "|R - k ^ m|",
        }
    }

    /// Default tolerance: `1e-10` for algebraic identities, `1e-9` for
    /// identities involving jet derivatives, `1e-8` for the pullbacks (which
    /// divide by the projective denominators).
    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Decomposable | Check::Nullness | Check::Normalized => 1e-10,
            Check::PullbackF | Check::PullbackStarF => 1e-8,
            _ => 1e-9,
        }
    }

    fn index(self) -> usize {
        Check::ALL.iter().position(|&c| c == self).expect("listed")
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

/// Per-check tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances([f64; 11]);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(Check::ALL.map(Check::default_tolerance))
    }
}

impl Tolerances {
    pub fn get(&self, c: Check) -> f64 {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: Check, tol: f64) -> Result<()> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::Config(format!(
                "tolerance for {c} must be finite and nonnegative"
            )));
        }
        self.0[c.index()] = tol;
        Ok(())
    }

    /// Applies `name=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("tolerance override `{spec}` is not name=value")))?;
        let check: Check = name.trim().parse()?;
        let tol: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("tolerance `{value}` is not a number")))?;
        self.set(check, tol)
    }
}

/// Residual kernels on plain forms, shared by the battery and by tests that
/// feed them counterexamples.
pub mod kernels {
    use super::*;

    pub fn self_dual(r: &TwoForm) -> f64 {
        (forms::hodge2(r) - *r * I).max_abs()
    }

    pub fn decomposable(r: &TwoForm) -> f64 {
        forms::wedge22(r, r).norm()
    }

    pub fn closed(dr: &ThreeForm) -> f64 {
        dr.max_abs()
    }

    pub fn nullness(k: &CoVector, m: &CoVector) -> f64 {
        [forms::inner(k, k), forms::inner(m, m), forms::inner(k, m)]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn dk_relation(dk: &TwoForm, m: &CoVector) -> f64 {
        (*dk - forms::wedge11(m, &m.conj()) * (I / 4.0)).max_abs()
    }

    pub fn dm_relation(dm: &TwoForm, k: &CoVector, m: &CoVector) -> f64 {
        (*dm - forms::wedge11(k, m) * (2.0 * I)).max_abs()
    }

    pub fn reconstruction(r: &TwoForm, k: &CoVector, m: &CoVector) -> f64 {
        (*r - forms::wedge11(k, m)).max_abs()
    }

    pub fn difference(a: &TwoForm, b: &TwoForm) -> f64 {
        (*a - *b).max_abs()
    }
}

/// One residual at an event whose jets are already known.
pub fn residual(check: Check, l: &Local) -> Result<f64> {
    let r = l.rs_form();
    Ok(match check {
        Check::SelfDual => kernels::self_dual(&r),
        Check::Decomposable => kernels::decomposable(&r),
        Check::Closed => kernels::closed(&l.d_rs_form()),
        Check::BatemanPde => kernels::self_dual(&(r * 0.5)),
        Check::Nullness => kernels::nullness(&l.k_form(), &l.m_form()),
        Check::Normalized => l.normalization_defect().abs(),
        Check::DkRelation => kernels::dk_relation(&l.dk(), &l.m_form()),
        Check::DmRelation => kernels::dm_relation(&l.dm(), &l.k_form(), &l.m_form()),
        Check::PullbackF => kernels::difference(&l.psi_pullback(2)?, &TwoForm::from_real(r.re())),
        Check::PullbackStarF => kernels::difference(&l.psi_pullback(3)?, &TwoForm::from_real(r.im().map(|v| -v))),
        Check::Reconstruction => kernels::reconstruction(&r, &l.k_form(), &l.m_form()),
    })
}

/// The residual of one named check at one event.
pub fn check_single(name: &str, f: &BatemanField, p: &[f64; 4]) -> Result<f64> {
    let check: Check = name.parse()?;
    residual(check, &f.local(p)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryConfig {
    pub sample_box: SampleBox,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Checks to run; `None` selects all of them, minus `normalized` when
    /// the field does not declare itself normalized.
    pub checks: Option<Vec<Check>>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            sample_box: SampleBox::default(),
            samples: 1000,
            seed: 0,
            tolerances: Tolerances::default(),
            checks: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub description: String,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Event of the largest residual.
    pub worst_point: [f64; 4],
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub schema: &'static str,
    pub field: String,
    pub alpha: String,
    pub beta: String,
    pub seed: u64,
    pub sample_box: SampleBox,
    pub requested_samples: usize,
    pub samples: usize,
    /// Candidate events discarded as singular or too close to a pole.
    pub resampled: usize,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl ResidualReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn near_pole(l: &Local) -> bool {
    (1..=3).any(|i| l.psi(i).pole_proximity() < POLE_MARGIN)
}

fn evaluate(checks: &[Check], f: &BatemanField, p: &[f64; 4]) -> Option<Vec<f64>> {
    let l = f.local(p).ok()?;
    if near_pole(&l) {
        return None;
    }
    let mut out = Vec::with_capacity(checks.len());
    for &c in checks {
        let v = residual(c, &l).ok()?;
        if !v.is_finite() {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

pub fn run_battery(f: &BatemanField, cfg: &BatteryConfig) -> Result<ResidualReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let checks: Vec<Check> = match &cfg.checks {
        Some(list) => list.clone(),
        None => Check::ALL
            .iter()
            .copied()
            .filter(|&c| c != Check::Normalized || f.normalized)
            .collect(),
    };
    let halton = Halton4::new(cfg.seed);
    let max_attempts = 4 * cfg.samples + 64;
    let mut accepted: Vec<([f64; 4], Vec<f64>)> = Vec::with_capacity(cfg.samples);
    let mut next: usize = 0;
    let mut resampled = 0;
    while accepted.len() < cfg.samples && next < max_attempts {
        let want = (cfg.samples - accepted.len()).min(max_attempts - next);
        let batch: Vec<([f64; 4], Option<Vec<f64>>)> = (next..next + want)
            .into_par_iter()
            .map(|i| {
                let p = halton.point(i as u64, &cfg.sample_box);
                (p, evaluate(&checks, f, &p))
            })
            .collect();
        next += want;
        for (p, r) in batch {
            match r {
                Some(v) => accepted.push((p, v)),
                None => resampled += 1,
            }
        }
    }
    if accepted.is_empty() {
        return Err(Error::AllSingular { attempts: next });
    }
    let n = accepted.len();
    let results: Vec<CheckResult> = checks
        .iter()
        .enumerate()
        .map(|(ci, &c)| {
            let mut max = 0.0f64;
            let mut worst = accepted[0].0;
            let mut sum = 0.0;
            for (p, v) in &accepted {
                sum += v[ci];
                if v[ci] > max {
                    max = v[ci];
                    worst = *p;
                }
            }
            let tol = cfg.tolerances.get(c);
            CheckResult {
                name: c.name().to_string(),
                description: c.description().to_string(),
                samples: n,
                max_residual: max,
                mean_residual: sum / n as f64,
                worst_point: worst,
                tolerance: tol,
                pass: max <= tol,
            }
        })
        .collect();
    Ok(ResidualReport {
        schema: REPORT_SCHEMA,
        field: f.name.clone(),
        alpha: f.alpha.describe(),
        beta: f.beta.describe(),
        seed: cfg.seed,
        sample_box: cfg.sample_box,
        requested_samples: cfg.samples,
        samples: n,
        resampled,
        pass: results.iter().all(|r| r.pass),
        checks: results,
    })
}
