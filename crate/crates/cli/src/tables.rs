use std::path::{Path, PathBuf};

use jlgeom::octahedron::{self, DerivedRow, PoleSet, TableAudit};
use serde::Serialize;

#[derive(Serialize)]
struct TablesJson<'a> {
    n: usize,
    seed: u64,
    rows: &'a [DerivedRow],
    audit: &'a TableAudit,
}

pub struct Written {
    pub markdown: PathBuf,
    pub json: PathBuf,
    pub audit_pass: bool,
}

/// Derives the 48-row table at size `n` and writes `tables.md` and
/// `tables.json` into `dir`. Errors are configuration errors: the only
/// thing that can fail here is the destination.
pub fn emit(n: usize, seed: u64, dir: &Path) -> Result<Written, String> {
    let g = octahedron::generate_group(&PoleSet::standard(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let rows = octahedron::derived_table(&g);
    let audit = octahedron::table_diff_report(&g).map_err(|e| e.to_string())?;

    let mut md = format!("# Octahedral group, n = {n}\n\n## Derived elements\n\n");
    md.push_str(&octahedron::derived_table_markdown(&rows));
    md.push_str("\n## Reference table audit\n\n");
    md.push_str(&audit.to_markdown());
    let json = serde_json::to_string_pretty(&TablesJson {
        n,
        seed,
        rows: &rows,
        audit: &audit,
    })
    .map_err(|e| e.to_string())?;

    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let markdown = dir.join("tables.md");
    let json_path = dir.join("tables.json");
    std::fs::write(&markdown, md).map_err(|e| format!("cannot write {}: {e}", markdown.display()))?;
    std::fs::write(&json_path, json + "\n").map_err(|e| format!("cannot write {}: {e}", json_path.display()))?;
    Ok(Written {
        markdown,
        json: json_path,
        audit_pass: audit.pass,
    })
}
