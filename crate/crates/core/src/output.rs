//! CSV and JSON result files, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::adaptive::AdaptiveTrace;
use crate::alist::to_alist;
use crate::code::{CodeMetadata, CodePair};
use crate::error::Result;
use crate::sim::SweepResult;

pub const TOOL: &str = "aqncc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `bytes` to a sibling temp file and renames it over `path`, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `p,i,r,askew,px,pz,trials,phase_fail,bit_fail,block_fail,ber,ci_lo,ci_hi,seed`
pub fn sweep_csv(results: &[SweepResult]) -> Result<String> {
    if results.is_empty() {
        return Ok(
            "p,i,r,askew,px,pz,trials,phase_fail,bit_fail,block_fail,ber,ci_lo,ci_hi,seed\n".into(),
        );
    }
    to_csv(results)
}

#[derive(Serialize)]
struct TraceRow {
    block: u64,
    pz_true: f64,
    r: u32,
    phase_ok: bool,
    bit_ok: bool,
}

/// `block,pz_true,r,phase_ok,bit_ok`
pub fn trace_csv(trace: &AdaptiveTrace) -> Result<String> {
    if trace.records.is_empty() {
        return Ok("block,pz_true,r,phase_ok,bit_ok\n".into());
    }
    to_csv(trace.records.iter().map(|rec| TraceRow {
        block: rec.block_index,
        pz_true: rec.pz_true,
        r: rec.r_used,
        phase_ok: rec.phase_ok,
        bit_ok: rec.bit_ok,
    }))
}

/// Top-level JSON wrapper: tool, version, resolved config and results.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a C,
    pub results: &'a R,
}

pub fn envelope_json<C: Serialize, R: Serialize>(config: &C, results: &R) -> Result<String> {
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        config,
        results,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// Trace totals without the per-block records.
#[derive(Serialize)]
pub struct TraceSummary {
    pub blocks: u64,
    pub phase_fail: u64,
    pub bit_fail: u64,
    pub block_fail: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub r_bounds: (u32, u32),
    pub r_visited: (u32, u32),
    pub mean_r: f64,
}

impl TraceSummary {
    pub fn of(trace: &AdaptiveTrace) -> Self {
        let mean_r = trace.records.iter().map(|r| r.r_used as f64).sum::<f64>()
            / trace.records.len().max(1) as f64;
        TraceSummary {
            blocks: trace.blocks,
            phase_fail: trace.phase_fail,
            bit_fail: trace.bit_fail,
            block_fail: trace.block_fail,
            ber: trace.ber,
            ci_lo: trace.ci_lo,
            ci_hi: trace.ci_hi,
            r_bounds: trace.r_bounds,
            r_visited: trace.r_range(),
            mean_r,
        }
    }
}

/// Paths produced by [`export_code`].
#[derive(Clone, Debug)]
pub struct CodeFiles {
    pub phase: PathBuf,
    pub bit: PathBuf,
    pub metadata: PathBuf,
}

/// Writes `<stem>_h1.alist`, `<stem>_h2.alist` and `<stem>.json` into `dir`.
pub fn export_code<C: Serialize>(
    pair: &CodePair,
    dir: &Path,
    stem: &str,
    config: &C,
) -> Result<CodeFiles> {
    let files = CodeFiles {
        phase: dir.join(format!("{stem}_h1.alist")),
        bit: dir.join(format!("{stem}_h2.alist")),
        metadata: dir.join(format!("{stem}.json")),
    };
    write_atomic(&files.phase, to_alist(&pair.h1).as_bytes())?;
    write_atomic(&files.bit, to_alist(&pair.h2).as_bytes())?;
    let meta = CodeMetadata::of(pair);
    write_atomic(&files.metadata, envelope_json(config, &meta)?.as_bytes())?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{assemble, AqnccConfig};

    #[test]
    fn sweep_header_matches_schema() {
        let row = SweepResult {
            p: 7,
            i: 0,
            r: 1,
            askew: false,
            px: 0.005,
            pz: 0.02,
            trials: 10,
            phase_fail: 2,
            bit_fail: 1,
            block_fail: 3,
            ber: 0.3,
            ci_lo: 0.1,
            ci_hi: 0.6,
            seed: 5,
        };
        let csv = sweep_csv(&[row]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p,i,r,askew,px,pz,trials,phase_fail,bit_fail,block_fail,ber,ci_lo,ci_hi,seed"
        );
        assert_eq!(
            lines.next().unwrap(),
            "7,0,1,false,0.005,0.02,10,2,1,3,0.3,0.1,0.6,5"
        );
        assert_eq!(sweep_csv(&[]).unwrap().lines().count(), 1);
    }

    #[test]
    fn export_writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = AqnccConfig::new(7, 0, 0, false);
        let pair = assemble(&cfg).unwrap();
        let files = export_code(&pair, dir.path(), "code", &cfg).unwrap();
        let h1 = crate::alist::read_alist(&files.phase).unwrap();
        assert_eq!(h1, pair.h1);
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&files.metadata).unwrap()).unwrap();
        assert_eq!(meta["results"]["notation"], "[[49,12;1]]");
        assert_eq!(meta["config"]["p"], 7);
        assert_eq!(meta["tool"], "aqncc");
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
            .collect();
        assert!(leftovers.is_empty());
    }
}
