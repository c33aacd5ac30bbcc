//! Report files: JSON per suite, plot-ready CSV, norm rows. Every file is
//! written to a temporary sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::norms::NormResult;
use crate::verify::{Num, VerificationReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FRACGRAD_OUT_DIR";

/// UTC stamp used in report file names.
pub fn timestamp() -> String {
    chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string()
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn report_json(rep: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
    s.push('\n');
    s
}

fn num(v: Option<Num>) -> String {
    match v {
        Some(Num(x)) => format!("{x:.16e}"),
        None => String::new(),
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per case: `suite,label,verdict,lhs,rhs,ratio,residual,tolerance`.
pub fn report_csv(rep: &VerificationReport) -> String {
    let mut out = String::from("suite,label,verdict,lhs,rhs,ratio,residual,tolerance\n");
    for c in &rep.cases {
        let verdict = serde_json::to_value(c.verdict).expect("verdict serializes");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rep.suite,
            csv_text(&c.label),
            verdict.as_str().unwrap_or(""),
            num(c.lhs),
            num(c.rhs),
            num(c.ratio),
            num(c.residual),
            num(c.tolerance),
        ));
    }
    out
}

pub const NORM_HEADER: &str = "kind,s,p,q,n,N,L,value";

/// `kind,s,p,q,n,N,L,value` for one result on a grid.
pub fn norm_row(r: &NormResult, points: usize, half_width: f64) -> String {
    format!(
        "{},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e}",
        r.kind.as_str(),
        r.params.s,
        r.params.p,
        r.params.q,
        r.params.n,
        points,
        half_width,
        r.value
    )
}

/// Writes `<suite>_<stamp>.json` (and `.csv` when asked) into `dir`.
pub fn write_report(rep: &VerificationReport, dir: &Path, stamp: &str, csv: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let json = dir.join(format!("{}_{stamp}.json", rep.suite));
    write_atomic(&json, report_json(rep).as_bytes())?;
    written.push(json);
    if csv {
        let path = dir.join(format!("{}_{stamp}.csv", rep.suite));
        write_atomic(&path, report_csv(rep).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{FracParams, NormKind};

    #[test]
    fn norm_row_layout() {
        let r = NormResult {
            value: 0.5,
            kind: NormKind::Gagliardo,
            params: FracParams { s: 0.5, p: 2.0, q: 2.0, n: 1 },
        };
        let row = norm_row(&r, 256, 10.0);
        assert_eq!(row.split(',').count(), NORM_HEADER.split(',').count());
        assert!(row.starts_with("gagliardo,5.0000000000000000e-1,"));
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_atomic(&p, b"x").unwrap();
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        assert_eq!(std::fs::read(&p).unwrap(), b"x");
    }
}
