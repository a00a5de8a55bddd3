//! Named experiments: the published figure sweeps and two validation runs.

use crate::csvio::{write_records, Record};
use crate::gain::curves;
use crate::plot::{render, Axes, Series};
use anyhow::Context;
use sbrsma_core::analysis::{sop_closed_form, xi_foxh, xi_quadrature, theorem_constants, XiPath};
use sbrsma_core::beamforming::GcStrategy;
use sbrsma_core::exec::Execution;
use sbrsma_core::foxh::{foxh_uni, log_grid, ContourSettings, FoxHSpec};
use sbrsma_core::montecarlo::{sweep, Estimator, SimOptions, SweepAxis};
use sbrsma_core::special::factorial;
use sbrsma_core::{ScenarioConfig, User};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const CLOSED_FORM: &str = "ccs-closed-form";
pub const CLOSED_FORM_FOXH: &str = "ccs-closed-form-foxh";
pub const FIXED_DELTAS: [f64; 2] = [0.3, 0.8];
/// Agreement threshold between closed form and Monte Carlo, in standard errors.
pub const MC_AGREEMENT_SIGMAS: f64 = 3.0;
/// Relative agreement required between the two Xi routes.
pub const PATH_AGREEMENT: f64 = 1e-5;
pub const XI_AGREEMENT: f64 = 1e-6;
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2PsiSweep,
    Fig3AntennaSweep,
    Fig4RateCases,
    ValidateTheorem1,
    ValidateFoxh,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::Fig2PsiSweep, Preset::Fig3AntennaSweep, Preset::Fig4RateCases, Preset::ValidateTheorem1, Preset::ValidateFoxh];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2PsiSweep => "fig2_psi_sweep",
            Preset::Fig3AntennaSweep => "fig3_antenna_sweep",
            Preset::Fig4RateCases => "fig4_rate_cases",
            Preset::ValidateTheorem1 => "validate_theorem1",
            Preset::ValidateFoxh => "validate_foxh",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            anyhow::anyhow!("unknown preset '{s}' (expected one of {})", names.join(", "))
        })
    }
}

/// Rate targets `(Rc, R1, R2, Rb)` of the three rate cases. Cases 1 and 2
/// ask more of the common and private streams than Case 3 but less of the
/// backscatter link.
pub const RATE_CASES: [(&str, [f64; 4]); 3] =
    [("case1", [0.6, 1.1, 1.6, 0.5]), ("case2", [0.6, 1.1, 1.6, 1.0]), ("case3", [0.5, 1.0, 1.5, 1.5])];

pub fn psi_grid(preset: Preset) -> Vec<f64> {
    let (hi, step) = match preset {
        Preset::Fig2PsiSweep => (30.0, 2.5),
        Preset::Fig3AntennaSweep => (45.0, 2.5),
        Preset::Fig4RateCases => (40.0, 2.5),
        Preset::ValidateTheorem1 => (30.0, 5.0),
        Preset::ValidateFoxh => (30.0, 10.0),
    };
    (0..).map(|i| i as f64 * step).take_while(|&x| x <= hi + 1e-9).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub trials: u64,
    pub seed: u64,
    pub sim: SimOptions,
    pub contour: ContourSettings,
    pub execution: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            sim: SimOptions::default(),
            contour: ContourSettings::default(),
            execution: Execution::Parallel,
        }
    }
}

/// Closed-form CCS curve over a Psi grid.
pub fn closed_form_rows(base: &ScenarioConfig, grid: &[f64], path: XiPath, opts: &RunOptions) -> anyhow::Result<Vec<Record>> {
    let label = match path {
        XiPath::Quadrature => CLOSED_FORM,
        XiPath::FoxH => CLOSED_FORM_FOXH,
    };
    let values = opts.execution.map_slice(grid, |&db| sop_closed_form(&base.with_psi_db(db), path, &opts.contour));
    grid.iter()
        .zip(values)
        .map(|(&db, v)| Ok(Record::exact(label, &base.with_psi_db(db), db, v?)))
        .collect()
}

fn mc_rows(base: &ScenarioConfig, strategies: &[GcStrategy], grid: &[f64], estimator: Estimator, opts: &RunOptions) -> anyhow::Result<Vec<Record>> {
    let rows = sweep(base, strategies, SweepAxis::PsiDb, grid, estimator, opts.trials, opts.seed, &opts.sim)?;
    Ok(rows.iter().zip(grid.iter().cycle()).map(|(r, &db)| Record::from_sweep(r, db)).collect())
}

/// Curve points of a figure preset.
pub fn figure_records(preset: Preset, base: &ScenarioConfig, opts: &RunOptions) -> anyhow::Result<Vec<Record>> {
    let grid = psi_grid(preset);
    let mut out = Vec::new();
    match preset {
        Preset::Fig2PsiSweep => {
            out.extend(mc_rows(base, &GcStrategy::ALL, &grid, Estimator::Adaptive, opts)?);
            for d in FIXED_DELTAS {
                out.extend(mc_rows(base, &[GcStrategy::Ccs], &grid, Estimator::FixedDelta(d), opts)?);
            }
            out.extend(closed_form_rows(base, &grid, XiPath::Quadrature, opts)?);
        }
        Preset::Fig3AntennaSweep => {
            for l in 3..=6 {
                let cfg = base.with_antennas(l);
                out.extend(closed_form_rows(&cfg, &grid, XiPath::Quadrature, opts)?);
                out.extend(mc_rows(&cfg, &[GcStrategy::Ccs], &grid, Estimator::Adaptive, opts)?);
            }
        }
        Preset::Fig4RateCases => {
            for (_, rates) in RATE_CASES {
                let cfg = with_rates(base, rates);
                out.extend(closed_form_rows(&cfg, &grid, XiPath::Quadrature, opts)?);
                out.extend(mc_rows(&cfg, &[GcStrategy::Ccs], &grid, Estimator::Adaptive, opts)?);
            }
        }
        Preset::ValidateTheorem1 => {
            out.extend(mc_rows(base, &[GcStrategy::Ccs], &grid, Estimator::Adaptive, opts)?);
            out.extend(closed_form_rows(base, &grid, XiPath::Quadrature, opts)?);
            out.extend(closed_form_rows(base, &grid, XiPath::FoxH, opts)?);
        }
        Preset::ValidateFoxh => {}
    }
    Ok(out)
}

pub fn with_rates(base: &ScenarioConfig, [rc, r1, r2, rb]: [f64; 4]) -> ScenarioConfig {
    let mut c = *base;
    c.rates.rc = rc;
    c.rates.r1 = r1;
    c.rates.r2 = r2;
    c.rates.rb = rb;
    c
}

/// One row of the closed-form vs Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TheoremCheck {
    #[serde(rename = "Psi_dB")]
    pub psi_db: f64,
    pub closed_form: f64,
    pub closed_form_foxh: f64,
    pub monte_carlo: f64,
    pub std_error: f64,
    /// `(MC - closed form) / SE`.
    pub z_score: f64,
    pub mc_agrees: bool,
    pub paths_agree: bool,
}

pub fn theorem_checks(records: &[Record]) -> Vec<TheoremCheck> {
    let find = |label: &str, db: f64| records.iter().find(|r| r.strategy == label && r.psi_db == db);
    records
        .iter()
        .filter(|r| r.strategy == GcStrategy::Ccs.label() && r.delta_policy == "adaptive")
        .filter_map(|mc| {
            let q = find(CLOSED_FORM, mc.psi_db)?.sop;
            let f = find(CLOSED_FORM_FOXH, mc.psi_db)?.sop;
            // a zero or one MC estimate has zero binomial SE; use one outage
            let se = mc.std_error.max(1.0 / mc.trials as f64);
            let z = (mc.sop - q) / se;
            Some(TheoremCheck {
                psi_db: mc.psi_db,
                closed_form: q,
                closed_form_foxh: f,
                monte_carlo: mc.sop,
                std_error: mc.std_error,
                z_score: z,
                mc_agrees: z.abs() <= MC_AGREEMENT_SIGMAS,
                paths_agree: (q - f).abs() <= PATH_AGREEMENT * q.abs().max(1e-3),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub max_rel_error: f64,
    pub worst_z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct XiRow {
    #[serde(rename = "Psi_dB")]
    pub psi_db: f64,
    pub user: usize,
    pub m: u32,
    pub n: u32,
    pub q: u32,
    pub xi_quadrature: f64,
    pub xi_foxh: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

/// `(identity, [(z, relative error)])`.
pub type IdentityCurve = (String, Vec<(f64, f64)>);

/// Relative error of each elementary identity at every grid point.
pub fn identity_errors(grid: &[f64], cs: &ContourSettings) -> anyhow::Result<Vec<IdentityCurve>> {
    let mut out = Vec::new();
    let mut push = |name: String, f: &dyn Fn(f64) -> anyhow::Result<(f64, f64)>| -> anyhow::Result<()> {
        let pts = grid
            .iter()
            .map(|&z| {
                let (got, want) = f(z)?;
                Ok((z, ((got - want) / want).abs()))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        out.push((name, pts));
        Ok(())
    };
    push("exp(-z)".into(), &|z| Ok((foxh_uni(&FoxHSpec::exp_neg(), z, cs)?.value, (-z).exp())))?;
    push("exp(-1/z)".into(), &|z| Ok((foxh_uni(&FoxHSpec::exp_neg_reciprocal(), z, cs)?.value, (-1.0 / z).exp())))?;
    for m in 1..=5u32 {
        push(format!("(1+z)^-{m}"), &|z| {
            let h = foxh_uni(&FoxHSpec::binomial(m as f64), z, cs)?.value / factorial(m - 1);
            Ok((h, (1.0 + z).powi(-(m as i32))))
        })?;
    }
    Ok(out)
}

/// Both Xi routes over every `(m, n, q)` for each user at the grid points.
pub fn xi_rows(base: &ScenarioConfig, grid: &[f64], cs: &ContourSettings) -> anyhow::Result<Vec<XiRow>> {
    let l = base.antennas as u32;
    let mut rows = Vec::new();
    for &db in grid {
        let tc = theorem_constants(&base.with_psi_db(db))?;
        for k in User::BOTH {
            let bk = tc.beta[k.index()];
            for m in 0..l {
                for n in 0..l {
                    for q in 0..=n {
                        let a = xi_quadrature(m, n - q + 1, tc.beta0, bk, tc.beta_jk)?;
                        let b = xi_foxh(m, n, q, tc.beta0, bk, tc.beta_jk, cs)?;
                        let rel_diff = ((a - b) / a).abs();
                        rows.push(XiRow {
                            psi_db: db,
                            user: k.number(),
                            m,
                            n,
                            q,
                            xi_quadrature: a,
                            xi_foxh: b,
                            rel_diff,
                            pass: rel_diff <= XI_AGREEMENT,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Files written by a preset and the number of failed agreement checks.
#[derive(Debug, Clone, Default)]
pub struct PresetOutput {
    pub files: Vec<PathBuf>,
    pub records: Vec<Record>,
    pub failures: usize,
    pub summary: String,
}

fn write_table<T: serde::Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Labels built from the curve fields that actually vary.
fn series_from(records: &[Record]) -> Vec<Series> {
    let cs = curves(records);
    let varies = |f: &dyn Fn(&crate::csvio::CurveKey) -> String| cs.iter().map(|(k, _)| f(k)).collect::<std::collections::BTreeSet<_>>().len() > 1;
    let l_varies = varies(&|k| k.antennas.to_string());
    let rates_vary = varies(&|k| format!("{:?}", k.rates));
    cs.into_iter()
        .map(|(k, points)| {
            let mut label = if k.trials == 0 { format!("{} (analysis)", k.strategy.trim_end_matches("-closed-form").to_uppercase()) } else { k.strategy.to_uppercase() };
            if k.strategy == CLOSED_FORM_FOXH {
                label = "CCS (analysis, Fox-H)".into();
            }
            if k.delta_policy != "adaptive" {
                label.push_str(&format!(" delta={}", k.delta_policy.trim_start_matches("fixed-")));
            }
            if l_varies {
                label.push_str(&format!(" L={}", k.antennas));
            }
            if rates_vary {
                let r = k.rates.map(f64::from_bits);
                let case = RATE_CASES.iter().find(|(_, c)| *c == r).map_or_else(|| format!("{r:?}"), |(n, _)| n.to_string());
                label.push_str(&format!(" {case}"));
            }
            Series { label, points, dashed: k.delta_policy != "adaptive", markers: k.trials > 0 }
        })
        .collect()
}

/// Runs `preset` and writes its artifacts under `out_dir`.
pub fn run_preset(preset: Preset, base: &ScenarioConfig, opts: &RunOptions, out_dir: &Path) -> anyhow::Result<PresetOutput> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut out = PresetOutput::default();
    let stem = out_dir.join(preset.name());

    if preset == Preset::ValidateFoxh {
        let grid = log_grid(1e-2, 1e2, 41);
        let errors = identity_errors(&grid, &opts.contour)?;
        let table: Vec<IdentityRow> = errors
            .iter()
            .map(|(name, pts)| {
                let (z, e) = pts.iter().copied().fold((f64::NAN, 0.0), |acc, (z, e)| if e > acc.1 { (z, e) } else { acc });
                IdentityRow { identity: name.clone(), max_rel_error: e, worst_z: z, pass: e < IDENTITY_TOLERANCE }
            })
            .collect();
        let xi = xi_rows(base, &psi_grid(preset), &opts.contour)?;
        out.failures = table.iter().filter(|r| !r.pass).count() + xi.iter().filter(|r| !r.pass).count();
        let worst_xi = xi.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
        out.summary = table.iter().map(|r| format!("{:<12} max rel error {:.2e}\n", r.identity, r.max_rel_error)).collect::<String>()
            + &format!("Xi routes: {} triples, max rel diff {worst_xi:.2e}\n", xi.len());
        let p = out_dir.join("validate_foxh_identities.csv");
        write_table(&p, &table)?;
        out.files.push(p);
        let p = out_dir.join("validate_foxh_xi.csv");
        write_table(&p, &xi)?;
        out.files.push(p);
        let axes = Axes { title: "Fox-H elementary identities".into(), x_label: "z".into(), y_label: "relative error".into(), log_x: true };
        let series: Vec<Series> = errors
            .into_iter()
            // exact agreement has no place on a log axis
            .map(|(label, pts)| Series { label, points: pts.into_iter().map(|(z, e)| (z, e.max(1e-17))).collect(), dashed: false, markers: false })
            .collect();
        let p = stem.with_extension("svg");
        std::fs::write(&p, render(&axes, &series))?;
        out.files.push(p);
        return Ok(out);
    }

    let records = figure_records(preset, base, opts)?;
    let p = stem.with_extension("csv");
    let file = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
    write_records(std::io::BufWriter::new(file), &records)?;
    out.files.push(p);

    let title = match preset {
        Preset::Fig2PsiSweep => "SOP vs SNR by gain-control strategy".to_owned(),
        Preset::Fig3AntennaSweep => "SOP vs SNR by antenna count (CCS)".to_owned(),
        Preset::Fig4RateCases => "SOP vs SNR by rate case (CCS)".to_owned(),
        _ => "Closed form vs Monte Carlo (CCS)".to_owned(),
    };
    let axes = Axes { title, x_label: "Psi (dB)".into(), y_label: "SOP".into(), log_x: false };
    let p = stem.with_extension("svg");
    std::fs::write(&p, render(&axes, &series_from(&records)))?;
    out.files.push(p);

    if preset == Preset::ValidateTheorem1 {
        let checks = theorem_checks(&records);
        out.failures = checks.iter().filter(|c| !(c.mc_agrees && c.paths_agree)).count();
        out.summary = checks
            .iter()
            .map(|c| {
                format!(
                    "Psi {:>5.1} dB  closed form {:.6e}  Fox-H {:.6e}  MC {:.6e} +- {:.1e}  z {:+.2}  {}\n",
                    c.psi_db,
                    c.closed_form,
                    c.closed_form_foxh,
                    c.monte_carlo,
                    c.std_error,
                    c.z_score,
                    if c.mc_agrees && c.paths_agree { "ok" } else { "DISAGREE" }
                )
            })
            .collect();
        let p = out_dir.join("validate_theorem1_table.csv");
        write_table(&p, &checks)?;
        out.files.push(p);
    }
    out.records = records;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(psi_grid(Preset::ValidateTheorem1), vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
        assert_eq!(*psi_grid(Preset::Fig3AntennaSweep).last().unwrap(), 45.0);
    }

    #[test]
    fn rate_cases_are_statically_feasible() {
        for (_, r) in RATE_CASES {
            theorem_constants(&with_rates(&ScenarioConfig::default(), r)).unwrap();
        }
    }

    #[test]
    fn fig2_layout() {
        let opts = RunOptions { trials: 200, ..Default::default() };
        let recs = figure_records(Preset::Fig2PsiSweep, &ScenarioConfig::default(), &opts).unwrap();
        let n = psi_grid(Preset::Fig2PsiSweep).len();
        assert_eq!(recs.len(), 7 * n);
        assert_eq!(curves(&recs).len(), 7);
        assert!(recs.iter().any(|r| r.delta_policy == "fixed-0.8"));
        assert!(recs.iter().filter(|r| r.strategy == CLOSED_FORM).all(|r| r.trials == 0));
    }
}
