//! Subcommand bodies. Each returns whether its verdict passed; commands
//! without a verdict return true.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use magneumann::degennes::{self, Mu1Table, DEFAULT_POINTS};
use magneumann::harness::{
    counting_verdict, disk_bulk_term, render_report, theorem1_verdict, theorem2_verdict, variational_check,
    verify_counting, verify_theorem1, verify_theorem2, ConvergenceTable, TableMetadata, Verdict, CSV_HEADER,
    DEFAULT_H_LIST,
};
use magneumann::models2d::{cylinder_energy_exact, cylinder_energy_with_grid, disk_spectrum, riesz_mean, CylinderSpec, DiskSpec};
use magneumann::projectors::{
    landau_diagonal_defect, verify_intertwining, verify_landau_intertwining, verify_resolution_identity, ProjectorKernel,
    TestFunction,
};
use magneumann::semiclassics::{
    boundary_energy_coefficient, counting_coefficient, curve_from_parametrization, edge_moment_detailed, parse_points,
    BoundaryCurve, FieldProfile,
};

use crate::config::RunConfig;
use crate::csvio::{Cell, CsvTable};
use crate::{Cli, Command, CurveArgs, SweepArgs, UsageError};

const DEFAULT_CURVE_POINTS: usize = 256;
const DEFAULT_THETA0_TOLERANCE: f64 = 1e-8;
const PROJECTOR_TOLERANCE: f64 = 1e-3;
/// Rounding budget of the Landau diagonal check, relative.
const DIAGONAL_TOLERANCE: f64 = 1e-13;
/// Grid spacing of the Landau intertwining check (the kernel is smooth on
/// the magnetic length).
const LANDAU_SPACING: f64 = 0.05;

fn required<T>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| UsageError(format!("missing --{name} (flag or config key)")).into())
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn write_table(table: &ConvergenceTable, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    let meta = serde_json::to_string_pretty(&table.metadata())?;
    std::fs::write(sidecar(path), meta).with_context(|| format!("writing {}", sidecar(path).display()))?;
    Ok(())
}

/// Prints `table` and writes it to `output` when given.
fn emit(table: &CsvTable, output: Option<&Path>) -> Result<()> {
    print!("{}", table.to_string()?);
    if let Some(path) = output {
        table.write(path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_verdict(v: &Verdict) {
    println!("{}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
}

pub fn run(cli: &Cli, cfg: &RunConfig) -> Result<bool> {
    let output = cli.output.clone().or_else(|| cfg.output.clone());
    let output = output.as_deref();
    match &cli.command {
        Command::Mu1(a) => {
            let d = &cfg.degennes;
            let n = a.grid.n_points.or(d.n_points).unwrap_or(DEFAULT_POINTS);
            let xs = match a.xi.or(d.xi) {
                Some(xi) => vec![xi],
                None => grid(
                    a.grid.xi_min.or(d.xi_min),
                    a.grid.xi_max.or(d.xi_max),
                    a.grid.xi_step.or(d.xi_step),
                )
                .context("give --xi or --xi-min/--xi-max/--xi-step")?,
            };
            let mut t = CsvTable::new(&["xi", "mu1"]);
            for xi in xs {
                let mu = if a.raw { degennes::mu1(xi, n)? } else { degennes::mu1_extrapolated(xi, n)? };
                t.push(vec![xi.into(), mu.into()]);
            }
            emit(&t, output)?;
            Ok(true)
        }
        Command::Mu2Gap(a) => {
            let d = &cfg.degennes;
            let xs = grid(
                Some(a.xi_min.or(d.xi_min).unwrap_or(-6.0)),
                Some(a.xi_max.or(d.xi_max).unwrap_or(6.0)),
                Some(a.xi_step.or(d.xi_step).unwrap_or(0.05)),
            )?;
            let n = a.n_points.or(d.n_points).unwrap_or(DEFAULT_POINTS);
            let min = degennes::mu2_gap_with_grid(&xs, n)?;
            let mut t = CsvTable::new(&["xi_min", "xi_max", "points", "min_mu2", "gap"]);
            t.push(vec![xs[0].into(), xs[xs.len() - 1].into(), xs.len().into(), min.into(), (min > 1.0).into()]);
            emit(&t, output)?;
            Ok(min > 1.0)
        }
        Command::Theta0(a) => {
            let tol = a.tolerance.or(cfg.degennes.tolerance).unwrap_or(DEFAULT_THETA0_TOLERANCE);
            let n = a.n_points.or(cfg.degennes.n_points).unwrap_or(DEFAULT_POINTS);
            let base = degennes::theta0_with_grid(tol, n)?;
            let fine = degennes::theta0_with_grid(tol, 2 * n)?;
            let mut t = CsvTable::new(&["theta0", "xi_star", "n_points", "xi_tolerance", "grid_change"]);
            t.push(vec![
                base.theta0.into(),
                base.xi_star.into(),
                base.n_points.into(),
                base.xi_tolerance.into(),
                (fine.theta0 - base.theta0).abs().into(),
            ]);
            emit(&t, output)?;
            Ok(true)
        }
        Command::Moment(a) => {
            let c = required("c", a.c.or(cfg.degennes.c))?;
            let table = Mu1Table::standard()?;
            let m = edge_moment_detailed(c, &table)?;
            let mut t = CsvTable::new(&["c", "m", "level_set_lower", "level_set_upper", "level_set_measure", "tail_bound"]);
            t.push(vec![
                c.into(),
                m.value.into(),
                m.level_set.lower.into(),
                m.level_set.upper.unwrap_or(f64::INFINITY).into(),
                m.level_set.measure.into(),
                m.tail_bound.into(),
            ]);
            emit(&t, output)?;
            Ok(true)
        }
        Command::CoefEnergy(a) => {
            let (curve, field) = curve_and_field(a, cfg)?;
            let table = Mu1Table::standard()?;
            let coef = boundary_energy_coefficient(&curve, &field, &table)?;
            let mut t = CsvTable::new(&["length", "b", "b_prime", "energy_coefficient"]);
            t.push(vec![curve.length.into(), field.b.into(), field.b_prime.into(), coef.into()]);
            emit(&t, output)?;
            Ok(true)
        }
        Command::CoefCounting(a) => {
            let (curve, field) = curve_and_field(a, cfg)?;
            let lambda = required("lambda", a.lambda.or(cfg.curve.lambda))?;
            let table = Mu1Table::standard()?;
            let coef = counting_coefficient(&curve, &field, lambda, &table)?;
            let mut t = CsvTable::new(&["length", "b", "b_prime", "lambda", "counting_coefficient"]);
            t.push(vec![curve.length.into(), field.b.into(), field.b_prime.into(), lambda.into(), coef.into()]);
            emit(&t, output)?;
            Ok(true)
        }
        Command::CylinderEnergy(a) => {
            let c = &cfg.cylinder;
            let spec = CylinderSpec {
                s: required("S", a.s.or(c.s))?,
                t: required("T", a.t.or(c.t))?,
                b: a.b.or(c.b).unwrap_or(1.0),
                lambda: required("lambda", a.lambda.or(c.lambda))?,
                h: required("h", a.h.or(c.h))?,
            };
            let e = match a.n_points {
                Some(n) => cylinder_energy_with_grid(&spec, n)?,
                None => cylinder_energy_exact(&spec)?,
            };
            let within = e.energy <= e.upper_bound;
            let mut t = CsvTable::new(&["energy", "upper_bound", "within_bound", "n_min", "n_max", "max_bands", "n_points"]);
            t.push(vec![
                e.energy.into(),
                e.upper_bound.into(),
                within.into(),
                e.certificate.n_min.into(),
                e.certificate.n_max.into(),
                e.certificate.max_bands.into(),
                e.certificate.n_points.into(),
            ]);
            print!("{}", t.to_string()?);
            if let Some(path) = output {
                let mut levels = CsvTable::new(&["n", "mu", "eigenvalue"]);
                for &(n, mu) in &e.levels {
                    levels.push(vec![n.into(), mu.into(), (spec.h * spec.b * mu).into()]);
                }
                levels.write(path)?;
            }
            Ok(within)
        }
        Command::DiskSpectrum(a) => {
            let d = &cfg.disk;
            let radius = a.radius.or(d.radius).unwrap_or(1.0);
            let b = a.b.or(d.b).unwrap_or(1.0);
            let h = required("h", a.h.or(d.h))?;
            let mut spec = if a.exterior || d.exterior.unwrap_or(false) {
                let mut s = DiskSpec::exterior(radius, b, h);
                if let Some(r) = a.r_out.or(d.r_out) {
                    s.exterior = Some(r);
                }
                s
            } else {
                DiskSpec::interior(radius, b, h)
            };
            if let Some(m) = a.m_margin.or(d.m_margin) {
                spec.m_margin = m;
            }
            if let Some(n) = a.n_radial.or(d.n_radial) {
                spec.n_radial = n;
            }
            let threshold = a.threshold_frac.or(d.threshold_frac).unwrap_or(1.0) * b * h;
            let result = disk_spectrum(&spec, threshold)?;
            let s = &result.spectrum;
            let c = &result.certificate;
            let mut summary = CsvTable::new(&[
                "count",
                "ground_state",
                "riesz_mean",
                "m_min",
                "m_max",
                "excluded_sector_bound",
                "resolution_discrepancy",
                "near_threshold",
            ]);
            summary.push(vec![
                s.len().into(),
                s.ground_state().map_or(Cell::Text(String::new()), Cell::Real),
                riesz_mean(s, threshold)?.into(),
                c.m_min.into(),
                c.m_max.into(),
                c.excluded_sector_bound.into(),
                c.resolution_discrepancy.into(),
                s.flagged_near_threshold.len().into(),
            ]);
            print!("{}", summary.to_string()?);
            if let Some(path) = output {
                let mut t = CsvTable::new(&["index", "eigenvalue", "m"]);
                for (i, (e, m)) in s.eigenvalues.iter().zip(&s.sector_labels).enumerate() {
                    t.push(vec![(i + 1).into(), (*e).into(), (*m).into()]);
                }
                t.write(path)?;
            }
            Ok(true)
        }
        Command::VerifyThm1(a) => {
            let (template, h_list) = sweep_setup(a, cfg, true)?;
            let table = Mu1Table::standard()?;
            let t = verify_theorem1(&template, &h_list, &table)?;
            let (verdict, _) = theorem1_verdict(&t)?;
            finish_sweep(&[(&t, output.map(Path::to_path_buf))], &verdict)
        }
        Command::VerifyThm2(a) => {
            let (template, h_list) = sweep_setup(a, cfg, false)?;
            let shift = a.a.or(cfg.sweep.a).unwrap_or(1.0);
            let table = Mu1Table::standard()?;
            let t = verify_theorem2(&template, shift, &h_list, &table)?;
            let verdict = theorem2_verdict(&t.differenced)?;
            println!("bulk term (|Omega| b/2pi)[a]+ = {}", disk_bulk_term(template.radius, template.b, shift));
            let second = output.map(|p| {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                p.with_file_name(format!("{stem}_undifferenced.csv"))
            });
            finish_sweep(
                &[(&t.differenced, output.map(Path::to_path_buf)), (&t.undifferenced, second)],
                &verdict,
            )
        }
        Command::VerifyCounting(a) => {
            let (template, h_list) = sweep_setup(a, cfg, true)?;
            let frac = a.lambda_frac.or(cfg.sweep.lambda_frac).unwrap_or(0.8);
            let table = Mu1Table::standard()?;
            let t = verify_counting(&template, frac, &h_list, &table)?;
            let (verdict, _) = counting_verdict(&t)?;
            finish_sweep(&[(&t, output.map(Path::to_path_buf))], &verdict)
        }
        Command::VerifyProjectors(a) => {
            let p = &cfg.projectors;
            let h = a.h.unwrap_or(1.0);
            let b = a.b.unwrap_or(1.0);
            let xi_cut = a.xi_cut.or(p.xi_cut).unwrap_or(8.0);
            let j_max = a.j_max.or(p.j_max).unwrap_or(12);
            let d = a.grid_step.or(p.grid_step).unwrap_or(0.005);
            let seed = a.seed.or(cfg.seed).unwrap_or(1);
            verify_projectors(h, b, xi_cut, j_max, d, seed, output)
        }
        Command::PropVariational(a) => {
            let trials = a.trials.or(cfg.variational.trials).unwrap_or(1000);
            let seed = a.seed.or(cfg.seed).unwrap_or(0);
            let outcome = variational_check(seed, trials)?;
            let mut t = CsvTable::new(&["seed", "trials", "violations", "max_equality_error"]);
            t.push(vec![
                (seed as i64).into(),
                trials.into(),
                outcome.violations.into(),
                outcome.max_equality_error.into(),
            ]);
            print!("{}", t.to_string()?);
            if let Some(json) = outcome.counterexample_json() {
                println!("counterexample: {json}");
                if let Some(path) = output {
                    std::fs::write(path, json)?;
                }
            }
            Ok(outcome.passed())
        }
        Command::Report(a) => report(&a.files, a.check),
    }
}

fn grid(lo: Option<f64>, hi: Option<f64>, step: Option<f64>) -> Result<Vec<f64>> {
    let (lo, hi, step) = match (lo, hi, step) {
        (Some(lo), Some(hi), Some(step)) => (lo, hi, step),
        _ => return Err(UsageError("a xi grid needs xi_min, xi_max and xi_step".into()).into()),
    };
    if !(step > 0.0 && hi >= lo) {
        return Err(UsageError(format!("bad xi grid [{lo}, {hi}] step {step}")).into());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

fn curve_and_field(a: &CurveArgs, cfg: &RunConfig) -> Result<(BoundaryCurve, FieldProfile)> {
    let c = &cfg.curve;
    let n = a.points.or(c.points).unwrap_or(DEFAULT_CURVE_POINTS);
    let ellipse = a.ellipse.as_ref().map(|v| [v[0], v[1]]).or(c.ellipse);
    let file = a.curve_file.clone().or_else(|| c.file.clone());
    let curve = match (a.circle.or(c.circle), ellipse, file) {
        (Some(r), None, None) => BoundaryCurve::circle(r, n)?,
        (None, Some([p, q]), None) => BoundaryCurve::ellipse(p, q, n)?,
        (None, None, Some(path)) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            curve_from_parametrization(&parse_points(&text)?, true)?
        }
        _ => return Err(UsageError("give exactly one of --circle, --ellipse, --curve-file".into()).into()),
    };
    let b = a.b.or(c.b).unwrap_or(1.0);
    let boundary = a.boundary_b.or(c.boundary_b).unwrap_or(b);
    let field = FieldProfile::new(vec![boundary; curve.len()], b)?;
    Ok((curve, field))
}

fn sweep_setup(a: &SweepArgs, cfg: &RunConfig, exterior_allowed: bool) -> Result<(DiskSpec, Vec<f64>)> {
    let d = &cfg.disk;
    let radius = a.radius.or(d.radius).unwrap_or(1.0);
    let b = a.b.or(d.b).unwrap_or(1.0);
    let h_list = a.h_list.clone().or_else(|| cfg.sweep.h_list.clone()).unwrap_or(DEFAULT_H_LIST.to_vec());
    let h0 = *h_list.first().ok_or_else(|| UsageError("empty h list".into()))?;
    let exterior = a.exterior || d.exterior.unwrap_or(false);
    if exterior && !exterior_allowed {
        return Err(UsageError("this sweep needs a bounded domain; drop --exterior".into()).into());
    }
    let mut template = if exterior { DiskSpec::exterior(radius, b, h0) } else { DiskSpec::interior(radius, b, h0) };
    if let Some(m) = a.m_margin.or(d.m_margin) {
        template.m_margin = m;
    }
    Ok((template, h_list))
}

fn finish_sweep(tables: &[(&ConvergenceTable, Option<PathBuf>)], verdict: &Verdict) -> Result<bool> {
    let list: Vec<ConvergenceTable> = tables.iter().map(|(t, _)| (*t).clone()).collect();
    print!("{}", render_report(&list));
    for (t, path) in tables {
        if let Some(p) = path {
            write_table(t, p)?;
        }
    }
    print_verdict(verdict);
    Ok(verdict.passed)
}

fn verify_projectors(h: f64, b: f64, xi_cut: f64, j_max: usize, d: f64, seed: u64, output: Option<&Path>) -> Result<bool> {
    let mut t = CsvTable::new(&["check", "value", "tolerance", "passed"]);
    let mut all = true;
    let mut record = |name: &str, value: f64, tol: f64| {
        let ok = value < tol;
        all &= ok;
        t.push(vec![name.into(), value.into(), tol.into(), ok.into()]);
    };
    let scale = (h / b).sqrt();
    for j in 1..=3 {
        let p = ProjectorKernel::landau(j, h, b)?;
        record(&format!("landau_diagonal_j{j}"), landau_diagonal_defect(&p, seed, 100, 10.0 * scale)?, DIAGONAL_TOLERANCE);
    }
    let probe = TestFunction::gaussian([0.0, 3.0 * scale], scale, 0.0, true)?;
    let res = verify_resolution_identity(h, b, &probe, xi_cut, j_max)?;
    record("resolution_of_identity", res.residual.unwrap_or(0.0), PROJECTOR_TOLERANCE);
    record("resolution_refinement", res.refinement_change, PROJECTOR_TOLERANCE);
    let near = TestFunction::gaussian([0.0, scale], 0.5 * scale, 0.0, true)?;
    for (j, xi) in [(1, 0.8), (2, -0.3)] {
        let p = ProjectorKernel::half_plane(j, h, b, xi)?;
        let r = verify_intertwining(&p, &near, d * scale)?;
        record(&format!("halfplane_intertwining_j{j}"), r.residual.unwrap_or(0.0), PROJECTOR_TOLERANCE);
    }
    let centred = TestFunction::gaussian([0.0, 0.0], 0.5 * scale, 0.0, false)?;
    let window = ((-0.5 * scale, 0.5 * scale), (-0.5 * scale, 0.5 * scale));
    for j in [1, 2] {
        let p = ProjectorKernel::landau(j, h, b)?;
        let r = verify_landau_intertwining(&p, &centred, window, LANDAU_SPACING * scale)?;
        record(&format!("landau_intertwining_j{j}"), r.residual.unwrap_or(0.0), PROJECTOR_TOLERANCE);
    }
    emit(&t, output)?;
    Ok(all)
}

fn report(files: &[PathBuf], check: bool) -> Result<bool> {
    let mut faithful = true;
    for path in files {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let first = text.lines().next().unwrap_or("").trim();
        let rewritten = if first == CSV_HEADER {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let mut table = ConvergenceTable::from_csv(&name, &text)?;
            let meta_path = sidecar(path);
            if meta_path.exists() {
                let meta: TableMetadata = serde_json::from_str(&std::fs::read_to_string(&meta_path)?)
                    .with_context(|| format!("parsing {}", meta_path.display()))?;
                table.attach(meta)?;
            }
            print!("{}", render_report(std::slice::from_ref(&table)));
            table.to_csv()
        } else {
            let table = CsvTable::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            println!("== {}", path.display());
            print!("{}", table.render());
            table.to_string()?
        };
        if check {
            let same = rewritten == text;
            println!("round trip {}: {}", path.display(), if same { "exact" } else { "CHANGED" });
            faithful &= same;
        }
    }
    Ok(faithful)
}
