use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use vamrate_core::iteration::{run_vame, IterationTrace};
use vamrate_core::rates::{standard_certificates, CatalogOptions, RateCertificate, RateError};
use vamrate_core::verify::{certify, compare_certificates, VerificationReport, VerifyError};

use crate::config::{ExperimentConfig, Instance};
use crate::CliError;

fn file_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// The configuration as run, seed overrides included.
fn write_config(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    fs::write(out.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, inst: &Instance) -> Result<IterationTrace, CliError> {
    Ok(run_vame(&inst.x0, &inst.operator, &inst.contraction, &inst.schedule, cfg.run.horizon)?.with_seed(cfg.run.seed))
}

/// Writes `trace.csv` and returns the trace.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<IterationTrace, CliError> {
    let inst = cfg.build()?;
    let trace = simulate(cfg, &inst)?;
    write_config(cfg, out)?;
    trace.write_csv(create(&out.join("trace.csv"))?)?;
    let succ = trace.successive_residuals().last().copied().unwrap_or(0.0);
    let scheme = trace.scheme_residuals().last().copied().unwrap_or(0.0);
    println!(
        "{}: {} iterations, final |x_(n+1) - x_n| = {succ:e}, final |x_n - J x_n| = {scheme:e}",
        out.display(),
        trace.horizon()
    );
    Ok(trace)
}

fn certificates(cfg: &ExperimentConfig, inst: &Instance) -> Result<Vec<RateCertificate>, CliError> {
    let opts = CatalogOptions {
        ms: cfg.run.ms.clone(),
        general: true,
    };
    let certs = standard_certificates(&inst.schedule, &inst.x0, &inst.z, &inst.contraction, &opts)?;
    Ok(match cfg.run.shrink {
        0 => certs,
        by => certs.iter().map(|c| c.shrunk(by)).collect(),
    })
}

/// Writes one table per certificate under `certificates/` and the
/// provenance of all of them to `certificates/provenance.txt`.
pub fn certify_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<RateCertificate>, CliError> {
    let inst = cfg.build()?;
    let certs = certificates(cfg, &inst)?;
    write_config(cfg, out)?;
    write_certificates(cfg, out, &certs)?;
    for c in &certs {
        let head: Vec<String> = (0..4.min(cfg.run.k_max + 1)).map(|k| c.modulus.eval(k).to_string()).collect();
        println!("{}: {} [{}, ...]", c.name, c.residual_kind, head.join(", "));
    }
    Ok(certs)
}

fn write_certificates(cfg: &ExperimentConfig, out: &Path, certs: &[RateCertificate]) -> Result<(), CliError> {
    let dir = out.join("certificates");
    let mut provenance = String::new();
    for c in certs {
        c.write_csv(cfg.run.k_max, create(&dir.join(format!("{}.csv", file_name(&c.name))))?)
            .map_err(VerifyError::from)?;
        provenance.push_str(&c.provenance_text());
        provenance.push('\n');
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("provenance.txt"), provenance)?;
    Ok(())
}

/// Outcome of `verify` for one configuration.
#[derive(Debug, Default)]
pub struct VerifyOutcome {
    pub reports: Vec<VerificationReport>,
    /// `(certificate, message)` for certificates whose hypotheses failed.
    pub violations: Vec<(String, String)>,
}

/// Simulates, builds the certificates and checks each one; writes
/// `trace.csv`, `certificates/`, `reports/<name>.csv`,
/// `reports/comparison-<residual>.csv` and `reports/summary.txt`.
pub fn verify_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<VerifyOutcome, CliError> {
    let inst = cfg.build()?;
    let trace = simulate(cfg, &inst)?;
    write_config(cfg, out)?;
    trace.write_csv(create(&out.join("trace.csv"))?)?;
    let certs = certificates(cfg, &inst)?;
    write_certificates(cfg, out, &certs)?;

    let dir = out.join("reports");
    let mut outcome = VerifyOutcome::default();
    let mut summary = format!("run: {}\n", trace.fingerprint());
    for c in &certs {
        match certify(&trace, c, cfg.run.k_max) {
            Ok(r) => {
                r.write_csv(create(&dir.join(format!("{}.csv", file_name(&c.name))))?)?;
                summary.push_str(&r.summary());
                summary.push('\n');
                outcome.reports.push(r);
            }
            Err(VerifyError::Rate(e @ RateError::Precondition { .. })) => {
                let line = format!("{}: precondition violation: {e}", c.name);
                summary.push_str(&line);
                summary.push('\n');
                outcome.violations.push((c.name.clone(), e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut by_kind: BTreeMap<String, Vec<VerificationReport>> = BTreeMap::new();
    for r in &outcome.reports {
        by_kind.entry(r.residual_kind.to_string()).or_default().push(r.clone());
    }
    for (kind, rs) in by_kind {
        let table = compare_certificates(&rs)?;
        table.write_csv(create(&dir.join(format!("comparison-{}.csv", file_name(&kind))))?)?;
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(outcome)
}

fn collect_reports(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_reports(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "csv")
            && p.parent().and_then(Path::file_name).is_some_and(|d| d == "reports")
            && !p.file_name().is_some_and(|f| f.to_string_lossy().starts_with("comparison-"))
        {
            out.push(p);
        }
    }
    Ok(())
}

/// Counts per report file found below `dir`, written to `dir/summary.csv`.
/// Returns the number of fail rows.
pub fn report_cmd(dir: &Path) -> Result<u64, CliError> {
    let mut files = Vec::new();
    collect_reports(dir, &mut files)?;
    if files.is_empty() {
        return Err(CliError::Config(format!("no verification reports below {}", dir.display())));
    }
    let mut w = csv::Writer::from_writer(create(&dir.join("summary.csv"))?);
    w.write_record(["run", "certificate", "pass", "fail", "horizon_skipped"])?;
    let mut total_fail = 0;
    for f in files {
        let mut counts = [0u64; 3];
        let mut r = csv::Reader::from_path(&f)?;
        let status = r
            .headers()?
            .iter()
            .position(|h| h == "status")
            .ok_or_else(|| CliError::Config(format!("{}: no status column", f.display())))?;
        for rec in r.records() {
            match &rec?[status] {
                "pass" => counts[0] += 1,
                "fail" => counts[1] += 1,
                _ => counts[2] += 1,
            }
        }
        total_fail += counts[1];
        let run = f
            .parent()
            .and_then(Path::parent)
            .and_then(|p| p.strip_prefix(dir).ok())
            .map(|p| p.display().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| ".".into());
        let cert = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        println!("{run:>12} {cert:>24}: {} pass, {} fail, {} horizon-skipped", counts[0], counts[1], counts[2]);
        w.write_record([run, cert, counts[0].to_string(), counts[1].to_string(), counts[2].to_string()])?;
    }
    w.flush()?;
    Ok(total_fail)
}
