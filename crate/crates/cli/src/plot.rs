use std::io::Write;
use std::path::{Path, PathBuf};

use semicz::bourgain::ReportRow;

use crate::report::{fmt_float, with_suffix};
use crate::CliError;

/// One figure: a row quantity against the swept parameter, one column per `(level, instance)`,
/// optionally with the pointwise maximum over instances.
struct Figure {
    name: &'static str,
    quantity: &'static str,
    envelope: bool,
}

fn figures(experiment: &str) -> Vec<Figure> {
    let fig = |name, quantity, envelope| Figure {
        name,
        quantity,
        envelope,
    };
    match experiment {
        "weaktype" => vec![
            fig("t_a", "t_a", false),
            fig("t_left", "t_left", false),
            fig("t_mixed", "t_mixed", false),
            fig("t_pbp", "t_pbp", false),
        ],
        "kclosed" => vec![fig("ratio", "ratio", true)],
        "sobolev" => vec![fig("ratio", "ratio", true)],
        "czd" => vec![fig("c_a", "c_a", true), fig("c_p", "c_p", true)],
        _ => vec![fig("hormander_l1", "hormander_l1", true), fig("hormander_l2", "hormander_l2", true)],
    }
}

fn parameter_name(experiment: &str) -> &'static str {
    match experiment {
        "kclosed" | "sobolev" => "t",
        "kernelcheck" => "r",
        _ => "s",
    }
}

/// Writes `<base>_<figure>.tsv` for every figure of the experiment; rows are expected sorted.
pub fn emit_plotdata(experiment: &str, rows: &[ReportRow], base: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut series: Vec<(u32, usize)> = rows.iter().map(|r| (r.level, r.instance)).collect();
    series.sort_unstable();
    series.dedup();
    let mut params: Vec<f64> = rows.iter().map(|r| r.value).collect();
    params.sort_by(f64::total_cmp);
    params.dedup();

    let mut written = Vec::new();
    for fig in figures(experiment) {
        let path = with_suffix(base, &format!("_{}.tsv", fig.name));
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?);
        let mut header = vec![parameter_name(experiment).to_string()];
        header.extend(series.iter().map(|(l, i)| format!("L{l}_i{i}")));
        if fig.envelope {
            header.push("envelope".into());
        }
        writeln!(out, "{}", header.join("\t")).map_err(|e| CliError::io(&path, e))?;
        for &p in &params {
            let mut cells = vec![fmt_float(p)];
            let mut env = f64::NEG_INFINITY;
            for &(l, i) in &series {
                let v = rows
                    .iter()
                    .find(|r| r.level == l && r.instance == i && r.value == p)
                    .and_then(|r| r.quantity(fig.quantity));
                match v {
                    Some(v) => {
                        env = env.max(v);
                        cells.push(fmt_float(v));
                    }
                    None => cells.push("nan".into()),
                }
            }
            if fig.envelope {
                cells.push(if env.is_finite() { fmt_float(env) } else { "nan".into() });
            }
            writeln!(out, "{}", cells.join("\t")).map_err(|e| CliError::io(&path, e))?;
        }
        out.flush().map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
