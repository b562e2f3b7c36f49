//! All-or-nothing output: files are staged in memory and only written once
//! the whole command has succeeded.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use xisis::screening::{ScoreVector, ScreeningResult};

#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    /// Write every staged file into `dir`. Each file goes through a temporary
    /// in the same directory and is renamed into place.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, contents) in self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot write into {}", dir.display()))?;
            tmp.write_all(&contents)?;
            tmp.flush()?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, target) in staged {
            tmp.persist(&target)
                .with_context(|| format!("cannot write {}", target.display()))?;
            written.push(target);
        }
        Ok(written)
    }
}

/// Shortest-exact is not enough for some readers; 17 significant digits
/// always round-trip an f64.
pub fn fmt_score(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Serialize)]
pub struct ScoreRow<'a> {
    pub index: usize,
    pub name: &'a str,
    pub score: f64,
    pub rank: usize,
    pub selected: bool,
}

pub fn score_rows<'a>(
    names: &'a [String],
    scores: &ScoreVector,
    selection: &ScreeningResult,
) -> Vec<ScoreRow<'a>> {
    let mut rank = vec![0; scores.len()];
    for (pos, &k) in selection.ranking.iter().enumerate() {
        rank[k] = pos + 1;
    }
    (0..scores.len())
        .map(|k| ScoreRow {
            index: k,
            name: &names[k],
            score: scores.scores[k],
            rank: rank[k],
            selected: selection.is_selected(k),
        })
        .collect()
}

/// `index,name,score,rank,selected`, one row per predictor in column order.
pub fn scores_csv(rows: &[ScoreRow<'_>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "name", "score", "rank", "selected"])?;
    for row in rows {
        w.write_record([
            row.index.to_string(),
            row.name.to_string(),
            fmt_score(row.score),
            row.rank.to_string(),
            u8::from(row.selected).to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}
