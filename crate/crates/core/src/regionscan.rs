//! Threshold curves over the wave number and certificate/spectrum sweeps of
//! the `(alpha, R)` plane.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseflow::{extrema, BaseFlow};
use crate::bounds::{stability_certificate_with, thresholds_with, Policy, BEAM_CONSTANT};
use crate::eigensolve::{solve_filtered, Cutoffs};
use crate::error::{Error, Result};
use crate::params::{derive, MicropolarParams};
use crate::pencil::{assemble, classical_pencil};
use crate::spectral::SpectralOperator;

/// Column names of [`CurveTable::write_csv`].
pub const CURVE_COLUMNS: [&str; 7] =
    ["alpha", "m1_over_2a", "m2_over_2a", "n1_over_2a", "n2_over_2a", "f_over_2a", "g_over_2a"];

/// Column names of [`write_region_csv`]. `error` is empty unless the point failed.
pub const REGION_COLUMNS: [&str; 7] =
    ["alpha", "rq1", "rq2", "certified", "max_ci", "spectrum_stable", "error"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub alphas: Vec<f64>,
    pub m1_over_2a: Vec<f64>,
    pub m2_over_2a: Vec<f64>,
    pub n1_over_2a: Vec<f64>,
    pub n2_over_2a: Vec<f64>,
    pub f_over_2a: Vec<f64>,
    pub g_over_2a: Vec<f64>,
}

impl CurveTable {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", CURVE_COLUMNS.join(","))?;
        for k in 0..self.len() {
            let row = [
                self.alphas[k],
                self.m1_over_2a[k],
                self.m2_over_2a[k],
                self.n1_over_2a[k],
                self.n2_over_2a[k],
                self.f_over_2a[k],
                self.g_over_2a[k],
            ];
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// 17 significant digits, round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_range(lo: f64, hi: f64, count: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::InvalidRange(format!("need 0 < {lo} < {hi}")));
    }
    if count < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 points, got {count}")));
    }
    Ok(())
}

/// `count` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { hi } else { lo + step * k as f64 })
        .collect()
}

pub fn curves(alpha_min: f64, alpha_max: f64, count: usize) -> Result<CurveTable> {
    curves_with(alpha_min, alpha_max, count, BEAM_CONSTANT)
}

pub fn curves_with(alpha_min: f64, alpha_max: f64, count: usize, beam: f64) -> Result<CurveTable> {
    check_range(alpha_min, alpha_max, count)?;
    let alphas = linspace(alpha_min, alpha_max, count);
    let mut t = CurveTable {
        alphas: Vec::with_capacity(count),
        m1_over_2a: Vec::with_capacity(count),
        m2_over_2a: Vec::with_capacity(count),
        n1_over_2a: Vec::with_capacity(count),
        n2_over_2a: Vec::with_capacity(count),
        f_over_2a: Vec::with_capacity(count),
        g_over_2a: Vec::with_capacity(count),
    };
    for a in alphas {
        let th = thresholds_with(a, beam);
        let s = 2.0 * a;
        t.alphas.push(a);
        t.m1_over_2a.push(th.m1 / s);
        t.m2_over_2a.push(th.m2 / s);
        t.n1_over_2a.push(th.n1 / s);
        t.n2_over_2a.push(th.n2 / s);
        t.f_over_2a.push(th.f_alpha / s);
        t.g_over_2a.push(th.g_alpha / s);
    }
    Ok(t)
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimiser of `M1/(2a)` located by a grid scan refined with golden section.
pub fn m1_minimum(alpha_min: f64, alpha_max: f64, count: usize) -> Result<(f64, f64)> {
    let table = curves(alpha_min, alpha_max, count)?;
    let k = (0..table.len())
        .min_by(|&i, &j| table.m1_over_2a[i].total_cmp(&table.m1_over_2a[j]))
        .unwrap_or(0);
    let lo = table.alphas[k.saturating_sub(1)];
    let hi = table.alphas[(k + 1).min(table.len() - 1)];
    let f = |a: f64| thresholds_with(a, BEAM_CONSTANT).m1 / (2.0 * a);
    Ok(golden_min(f, lo, hi, 1e-12))
}

/// Rectangular grid of wave numbers and effective Reynolds numbers `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub alphas: Vec<f64>,
    pub reynolds: Vec<f64>,
}

impl RegionGrid {
    pub fn uniform(alpha: (f64, f64, usize), reynolds: (f64, f64, usize)) -> Result<Self> {
        check_range(alpha.0, alpha.1, alpha.2)?;
        check_range(reynolds.0, reynolds.1, reynolds.2)?;
        Ok(Self {
            alphas: linspace(alpha.0, alpha.1, alpha.2),
            reynolds: linspace(reynolds.0, reynolds.1, reynolds.2),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.reynolds.is_empty() {
            return Err(Error::InvalidRange("empty region grid".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidWaveNumber(*a));
        }
        if let Some(r) = self.reynolds.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidParameter { name: "reynolds", value: *r });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub alpha: f64,
    pub r_effective: f64,
    pub q1: f64,
    pub q2: f64,
    pub certified: bool,
    pub max_ci: Option<f64>,
    pub spectrum_stable: Option<bool>,
    pub error: Option<String>,
}

impl RegionPoint {
    pub fn rq1(&self) -> f64 {
        self.r_effective * self.q1
    }

    pub fn rq2(&self) -> f64 {
        self.r_effective * self.q2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub policy: Policy,
    pub beam: f64,
    pub with_spectrum: bool,
    pub n: usize,
    pub cutoffs: Cutoffs,
    /// `max_ci` at or below this counts as spectrally stable.
    pub stable_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            policy: Policy::Conservative,
            beam: BEAM_CONSTANT,
            with_spectrum: false,
            n: 100,
            cutoffs: Cutoffs::default(),
            stable_tol: 1e-8,
        }
    }
}

/// Certificate (and optionally spectrum) at every grid point, row-major in
/// `(alpha, R)`. The template is rescaled so its effective `R` hits each target.
pub fn classify(
    grid: &RegionGrid,
    template: &MicropolarParams,
    flow: &BaseFlow,
    opts: &ClassifyOptions,
) -> Result<Vec<RegionPoint>> {
    grid.validate()?;
    let base_r = derive(template)?.r_effective().ok_or_else(|| {
        let d = derive(template).expect("validated above");
        Error::NotApplicable { r1: d.r1, r2: d.r2 }
    })?;
    let ext = extrema(flow);
    let op = if opts.with_spectrum {
        Some(Arc::new(SpectralOperator::build(opts.n)?))
    } else {
        None
    };
    let jobs: Vec<(f64, f64)> = grid
        .alphas
        .iter()
        .flat_map(|&a| grid.reynolds.iter().map(move |&r| (a, r)))
        .collect();
    // collect() on an indexed parallel iterator keeps the input order
    Ok(jobs
        .par_iter()
        .map(|&(alpha, r)| {
            let params = template.scaled(r / base_r);
            let mut point = RegionPoint {
                alpha,
                r_effective: r,
                q1: ext.q1,
                q2: ext.q2,
                certified: false,
                max_ci: None,
                spectrum_stable: None,
                error: None,
            };
            match stability_certificate_with(alpha, r, ext.q1, ext.q2, opts.policy, opts.beam) {
                Ok(c) => point.certified = c,
                Err(e) => {
                    point.error = Some(e.to_string());
                    return point;
                }
            }
            if let Some(op) = &op {
                let spectrum = assemble(alpha, &params, flow, op.clone())
                    .and_then(|p| solve_filtered(&p, &opts.cutoffs));
                match spectrum {
                    Ok(sol) => {
                        point.max_ci = sol.max_ci();
                        point.spectrum_stable = point.max_ci.map(|c| c <= opts.stable_tol);
                    }
                    Err(e) => point.error = Some(e.to_string()),
                }
            }
            point
        })
        .collect())
}

pub fn write_region_csv<W: Write>(points: &[RegionPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", REGION_COLUMNS.join(","))?;
    for p in points {
        let max_ci = p.max_ci.map(fmt_f64).unwrap_or_default();
        let stable = p.spectrum_stable.map(|b| b.to_string()).unwrap_or_default();
        let err = p.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(p.alpha),
            fmt_f64(p.rq1()),
            fmt_f64(p.rq2()),
            p.certified,
            max_ci,
            stable,
            err
        )?;
    }
    Ok(())
}

/// Largest `C_i` among the modes that survive `cutoffs`.
///
/// Uses the full solve: the eigenvalue-only path leaves spurious finite
/// values with `C_i > 0` well below any sensible modulus cutoff.
pub fn leading_ci(problem: &crate::pencil::EigenProblem, cutoffs: &Cutoffs) -> Result<f64> {
    solve_filtered(problem, cutoffs)?.max_ci().ok_or(Error::AllSpurious)
}

/// `max_alpha C_i(alpha)` over `[lo, hi]`: coarse scan, then golden section
/// around the best sample.
pub fn max_over_alpha(
    growth: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    check_range(lo, hi, samples.max(3))?;
    let alphas = linspace(lo, hi, samples.max(3));
    let mut best = (alphas[0], f64::NEG_INFINITY);
    let mut best_k = 0;
    for (k, &a) in alphas.iter().enumerate() {
        let g = growth(a)?;
        if g > best.1 {
            best = (a, g);
            best_k = k;
        }
    }
    let a_lo = alphas[best_k.saturating_sub(1)];
    let a_hi = alphas[(best_k + 1).min(alphas.len() - 1)];
    let err = std::cell::RefCell::new(None);
    let (a, neg) = golden_min(
        |a| match growth(a) {
            Ok(g) => -g,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        },
        a_lo,
        a_hi,
        tol,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(if -neg > best.1 { (a, -neg) } else { best })
}

/// Bisection on a sign change of `growth(R)` (negative below the root).
/// Returns the final bracket `(stable, unstable)`.
pub fn bisect_neutral(
    growth: impl Fn(f64) -> Result<f64>,
    mut stable: f64,
    mut unstable: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if growth(stable)? >= 0.0 || growth(unstable)? <= 0.0 {
        return Err(Error::InvalidRange(format!(
            "no sign change of the growth rate on [{stable}, {unstable}]"
        )));
    }
    while (unstable - stable).abs() > tol {
        let mid = 0.5 * (stable + unstable);
        if growth(mid)? > 0.0 {
            unstable = mid;
        } else {
            stable = mid;
        }
    }
    Ok((stable, unstable))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReynolds {
    pub stable: f64,
    pub unstable: f64,
    /// Wave number of the fastest-growing mode at the unstable end.
    pub alpha: f64,
}

/// Classical Orr-Sommerfeld critical Reynolds number (channel units) by
/// bisection on `max_alpha C_i`.
pub fn classical_critical_reynolds(
    flow: &BaseFlow,
    n: usize,
    alpha_range: (f64, f64),
    re_bracket: (f64, f64),
    tol: f64,
) -> Result<CriticalReynolds> {
    let op = Arc::new(SpectralOperator::build(n)?);
    let cutoffs = Cutoffs::default();
    let peak = |re: f64| {
        max_over_alpha(
            |a| leading_ci(&classical_pencil(a, re, flow, op.clone())?, &cutoffs),
            alpha_range.0,
            alpha_range.1,
            7,
            1e-5,
        )
    };
    let (stable, unstable) = bisect_neutral(|re| peak(re).map(|p| p.1), re_bracket.0, re_bracket.1, tol)?;
    let alpha = peak(unstable)?.0;
    Ok(CriticalReynolds { stable, unstable, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn curve_examples() {
        let t = curves(0.1, 5.0, 100).unwrap();
        assert_eq!(t.len(), 100);
        assert_eq!(t.alphas[0], 0.1);
        assert_eq!(t.alphas[99], 5.0);
        for col in [&t.m1_over_2a, &t.m2_over_2a, &t.n1_over_2a, &t.n2_over_2a, &t.f_over_2a, &t.g_over_2a] {
            assert_eq!(col.len(), 100);
            assert!(col.iter().all(|v| *v > 0.0));
        }
        let one = curves(1.0, 2.0, 2).unwrap();
        assert!((one.f_over_2a[0] - 38.2849).abs() < 1e-4);
        let tiny = curves(1e-6, 1.0, 2).unwrap();
        let lead = 4.73f64.powi(2) * PI / 2e-6;
        assert!((tiny.f_over_2a[0] / lead - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bad_ranges() {
        assert!(curves(0.0, 1.0, 10).is_err());
        assert!(curves(2.0, 1.0, 10).is_err());
        assert!(curves(0.5, 1.0, 1).is_err());
    }

    #[test]
    fn m1_minimum_location() {
        let (a, v) = m1_minimum(0.1, 10.0, 200).unwrap();
        let want = 4.73 / 2f64.sqrt();
        assert!((a - want).abs() < 1e-6, "{a} vs {want}");
        assert!((v - 2.0 * PI * want).abs() < 1e-9);
    }

    #[test]
    fn still_flow_certifies_everything() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        let still = BaseFlow::custom(vec![0.3], vec![0.0]).unwrap();
        let grid = RegionGrid::uniform((0.1, 8.0, 5), (1.0, 1e6, 5)).unwrap();
        let pts = classify(&grid, &p, &still, &ClassifyOptions::default()).unwrap();
        assert_eq!(pts.len(), 25);
        assert!(pts.iter().all(|p| p.certified && p.error.is_none()));
    }

    #[test]
    fn single_point_matches_certificate() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        let flow = BaseFlow::couette();
        for policy in [Policy::AsStated, Policy::Conservative] {
            for (a, r) in [(1.0, 30.0), (1.0, 50.0), (2.5, 12.0)] {
                let grid = RegionGrid { alphas: vec![a], reynolds: vec![r] };
                let opts = ClassifyOptions { policy, ..Default::default() };
                let pts = classify(&grid, &p, &flow, &opts).unwrap();
                let direct = stability_certificate_with(a, r, 1.0, 0.0, policy, BEAM_CONSTANT).unwrap();
                assert_eq!(pts[0].certified, direct);
            }
        }
    }

    #[test]
    fn certification_monotone_in_r() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        let grid = RegionGrid::uniform((0.2, 4.0, 12), (1.0, 200.0, 40)).unwrap();
        let pts = classify(&grid, &p, &BaseFlow::couette(), &ClassifyOptions::default()).unwrap();
        for row in pts.chunks(40) {
            let first_fail = row.iter().position(|p| !p.certified).unwrap_or(row.len());
            assert!(row[first_fail..].iter().all(|p| !p.certified));
        }
    }

    #[test]
    fn inapplicable_template_rejected() {
        let p = MicropolarParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = RegionGrid { alphas: vec![1.0], reynolds: vec![1.0] };
        assert!(matches!(
            classify(&grid, &p, &BaseFlow::couette(), &ClassifyOptions::default()),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisection_needs_sign_change() {
        let r = bisect_neutral(|x| Ok(x - 2.0), 0.0, 5.0, 1e-9).unwrap();
        assert!(r.0 <= 2.0 && r.1 >= 2.0 && r.1 - r.0 <= 1e-9);
        assert!(bisect_neutral(|x| Ok(x + 1.0), 0.0, 5.0, 1e-3).is_err());
    }

    #[test]
    fn region_csv_layout() {
        let pts = vec![RegionPoint {
            alpha: 1.0,
            r_effective: 2.0,
            q1: 1.0,
            q2: 0.0,
            certified: true,
            max_ci: None,
            spectrum_stable: None,
            error: None,
        }];
        let mut buf = Vec::new();
        write_region_csv(&pts, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "alpha,rq1,rq2,certified,max_ci,spectrum_stable,error");
        assert_eq!(lines[1], "1.0000000000000000e0,2.0000000000000000e0,0.0000000000000000e0,true,,,");
    }
}
