use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use semicz::bourgain::{
    kclosed_sweep, sobolev_k_experiment, sort_rows, weak_type_experiment, InstanceGen, Operator, ReportRow,
};
use semicz::czd::{cuculescu, cz_decompose};
use semicz::kernels::{
    hormander_l1_check, hormander_l2_sum, leray_kernel, lipschitz_condition_check, lipschitz_implied_l2_bound,
    riesz_kernel, size_condition_check, HormanderOptions, Kernel,
};
use semicz::sampling::Kronecker;
use semicz::GridSpec;

use crate::config::{Config, Experiment, Format};
use crate::plot::emit_plotdata;
use crate::report::{with_suffix, write_csv, write_json, write_json_rows, GridEntry, Stability, Summary};
use crate::CliError;

/// Files written by a run and the number of violated hard inequalities.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
    pub summary_data: Summary,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary_data.violations > 0 {
            2
        } else {
            0
        }
    }
}

fn headline(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Czd => "c",
        Experiment::Weaktype => "weak_constant",
        Experiment::Kclosed | Experiment::Sobolev => "ratio",
        Experiment::Kernelcheck => "hormander_l1",
    }
}

fn c_emp(rows: &[ReportRow], name: &str) -> f64 {
    rows.iter().filter_map(|r| r.quantity(name)).fold(0.0, f64::max)
}

fn compute_err(e: semicz::Error) -> CliError {
    CliError::Compute(e.to_string())
}

fn czd_rows(gen: &InstanceGen, spec: GridSpec, grid: &[f64], count: usize) -> Result<Vec<ReportRow>, CliError> {
    let per: Vec<Vec<ReportRow>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let inst = gen.draw(spec, i, None)?;
            let f = &inst.fields[0];
            let f_l1 = f.l1_norm();
            let parts: Vec<_> = f.positive_parts().into_iter().filter(|p| p.max_abs() > 0.0).collect();
            grid.iter()
                .map(|&s| {
                    let cz = cz_decompose(f, s)?;
                    let mut row = ReportRow::new("czd", "none", &spec, inst.index, inst.seed, "s", s);
                    let recon = cz.reconstruction_error(f);
                    let c = cz.constants(f_l1);
                    row.push("reconstruction", recon);
                    row.push("c_a", c.a_bound);
                    row.push("c_p", c.p_bound);
                    row.push("c", c.a_bound.max(c.p_bound));
                    row.check("reconstruction", recon, 1e-10);
                    let mut bad = 0.0;
                    let mut worst = 0.0_f64;
                    for (k, part) in parts.iter().enumerate() {
                        let st = cuculescu(part, s)?;
                        let trace = st.bad_trace();
                        bad += trace;
                        row.check(&format!("bad_trace_{k}"), trace, part.l1_norm() / s);
                        let norm = st.max_compressed_norm(part)?;
                        worst = worst.max(norm);
                        row.check(&format!("compressed_norm_{k}"), norm, s);
                    }
                    row.push("bad_trace", bad);
                    row.push("max_compressed_norm", worst);
                    Ok(row)
                })
                .collect::<semicz::Result<Vec<_>>>()
        })
        .collect::<semicz::Result<Vec<_>>>()
        .map_err(compute_err)?;
    Ok(per.into_iter().flatten().collect())
}

fn kernel_for(op: &Operator, d: usize) -> Result<Box<dyn Kernel>, CliError> {
    match op {
        Operator::Riesz => Ok(Box::new(riesz_kernel())),
        Operator::LerayEntry { i, j } => Ok(Box::new(leray_kernel(*i, *j, d, 16).map_err(compute_err)?)),
        _ => Err(CliError::Config(format!("operator: no kernel ships for {}", op.tag()))),
    }
}

fn kernelcheck_rows(config: &Config, spec: GridSpec, radii: &[f64]) -> Result<Vec<ReportRow>, CliError> {
    let op = config.operator()?;
    let d = spec.d;
    let k = kernel_for(&op, d)?;
    let opts = if d == 1 {
        HormanderOptions::default()
    } else {
        HormanderOptions {
            radial_nodes: 8,
            angular_nodes: 8,
            y_samples: 8,
        }
    };
    let samples = 2000;
    let size = size_condition_check(k.as_ref(), samples, 1e-3);
    let lip = lipschitz_condition_check(k.as_ref(), 1.0, samples, 1e-3);
    let centers: Vec<Vec<f64>> = Kronecker::new(d).take(config.instances.count).collect();
    let mut rows = Vec::new();
    for (i, y) in centers.iter().enumerate() {
        for &r in radii {
            let m_max = 12;
            let l2 = hormander_l2_sum(k.as_ref(), y, r, m_max, &opts);
            let l1 = hormander_l1_check(k.as_ref(), y, r, &opts);
            let bound = lipschitz_implied_l2_bound(d, lip, 1.0, r, m_max);
            let mut row = ReportRow::new("kernelcheck", &op.tag(), &spec, i, config.instances.seed, "r", r);
            row.push("size", size);
            row.push("lipschitz", lip);
            row.push("hormander_l1", l1);
            row.push("hormander_l2", l2.value);
            row.push("lipschitz_bound", bound);
            row.check("l1_le_l2", l1, l2.value);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Rows of the configured experiment at `spec`.
pub fn experiment_rows(config: &Config, spec: GridSpec) -> Result<Vec<ReportRow>, CliError> {
    let gen = InstanceGen::new(config.instances.seed, config.kind(), config.instances.freq_cutoff)
        .with_amplitude_decades(config.instances.amplitude_decades);
    let (_, grid) = config.sweep();
    let values = grid.values();
    let n = config.instances.count;
    let mut rows = match config.experiment {
        Experiment::Czd => czd_rows(&gen, spec, &values, n)?,
        Experiment::Weaktype => {
            weak_type_experiment(&config.operator()?, &gen, spec, &values, n)
                .map_err(compute_err)?
                .rows
        }
        Experiment::Kclosed => {
            kclosed_sweep(&config.operator()?, &gen, spec, &values, n)
                .map_err(compute_err)?
                .rows
        }
        Experiment::Sobolev => sobolev_k_experiment(&gen, spec, &values, n).map_err(compute_err)?,
        Experiment::Kernelcheck => kernelcheck_rows(config, spec, &values)?,
    };
    sort_rows(&mut rows);
    Ok(rows)
}

/// Runs the experiment, writes the report, the summary and (optionally) plot data.
pub fn run(config: &Config) -> Result<RunOutcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    pool.install(|| run_inner(config))
}

fn run_inner(config: &Config) -> Result<RunOutcome, CliError> {
    let spec = config.spec()?;
    let mut rows = experiment_rows(config, spec)?;
    let name = headline(config.experiment);
    let coarse = c_emp(&rows, name);
    let mut grids = vec![GridEntry {
        d: spec.d,
        level: spec.level,
        m: spec.m,
    }];
    let mut stability = None;
    if config.refine {
        let fine_spec = spec
            .with_level(spec.level + 1)
            .map_err(|e| CliError::Config(format!("grid: {e}")))?;
        let fine_rows = experiment_rows(config, fine_spec)?;
        let fine = c_emp(&fine_rows, name);
        let ratio = semicz::bourgain::refinement_ratio(coarse, fine);
        stability = Some(Stability {
            coarse,
            fine,
            ratio,
            within_factor_2: (0.5..=2.0).contains(&ratio),
        });
        grids.push(GridEntry {
            d: fine_spec.d,
            level: fine_spec.level,
            m: fine_spec.m,
        });
        rows.extend(fine_rows);
        sort_rows(&mut rows);
    }
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let violations = rows.iter().map(|r| r.violations().len()).sum();
    let summary = Summary {
        experiment: config.experiment.name().into(),
        operator: rows
            .first()
            .map(|r| r.operator.clone())
            .unwrap_or_else(|| config.operator.clone().unwrap_or_default()),
        c_emp: coarse,
        headline: name.into(),
        grids,
        seeds,
        rows: rows.len(),
        violations,
        stability,
    };

    let base = config.output_base();
    if let Some(dir) = base.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let report = match config.output.format {
        Format::Csv => {
            let path = with_suffix(&base, ".csv");
            write_csv(&path, &rows, timestamp)?;
            path
        }
        Format::Json => {
            let path = with_suffix(&base, ".json");
            write_json_rows(&path, &rows, timestamp)?;
            path
        }
    };
    let summary_path = with_suffix(&base, ".summary.json");
    write_json(&summary_path, &summary)?;
    let plots = if config.output.plotdata {
        emit_plotdata(config.experiment.name(), &rows, &base)?
    } else {
        Vec::new()
    };
    Ok(RunOutcome {
        report,
        summary: summary_path,
        plots,
        summary_data: summary,
    })
}
