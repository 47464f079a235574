//! CSV and markdown reports projected from run records.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use super::{records_to_jsonl, Mode, RunRecord};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::metrics::Goal;
use crate::stats::{delta_series, ks_test, median, SampleSeries};

/// Files written regardless of the goals in the records.
pub const REPORT_FILES: [&str; 12] = [
    "records.jsonl",
    "deltas.csv",
    "features.csv",
    "features.md",
    "evaluations.csv",
    "evaluations.md",
    "runtime.csv",
    "runtime.md",
    "ks.csv",
    "ks.md",
    "params.csv",
    "README.md",
];

fn goal_file(goal: Goal) -> &'static str {
    match goal {
        Goal::Prec => "precision",
        Goal::F => "f",
        Goal::Pd => "pd",
        Goal::Pf => "pf",
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn markdown(&self, title: &str) -> String {
        let mut out = format!("# {title}\n\n| {} |\n", self.header.join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }
}

fn triples_in_order(records: &[RunRecord]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    records
        .iter()
        .filter(|r| seen.insert(r.triple.clone()))
        .map(|r| r.triple.clone())
        .collect()
}

fn learners_present(records: &[RunRecord]) -> Vec<LearnerKind> {
    LearnerKind::ALL
        .into_iter()
        .filter(|l| records.iter().any(|r| r.learner == *l))
        .collect()
}

fn nps_in_order(records: &[RunRecord]) -> Vec<usize> {
    let mut out = Vec::new();
    for r in records.iter().filter(|r| r.mode == Mode::Tuned) {
        if !out.contains(&r.np) {
            out.push(r.np);
        }
    }
    out
}

fn goals_present(records: &[RunRecord]) -> Vec<Goal> {
    let goals: BTreeSet<Goal> = records.iter().filter_map(|r| r.goal).collect();
    if goals.is_empty() {
        vec![Goal::Prec, Goal::F]
    } else {
        goals.into_iter().collect()
    }
}

/// A column of per-triple values: one learner in one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Column {
    learner: LearnerKind,
    goal: Option<Goal>,
    np: usize,
}

impl Column {
    fn untuned(learner: LearnerKind) -> Self {
        Column {
            learner,
            goal: None,
            np: 0,
        }
    }

    fn matches(&self, r: &RunRecord) -> bool {
        r.learner == self.learner && r.goal == self.goal && r.np == self.np
    }

    fn name(&self, primary_np: Option<usize>) -> String {
        match self.goal {
            None => format!("{}_default", self.learner),
            Some(_) if Some(self.np) == primary_np => format!("{}_tuned", self.learner),
            Some(_) => format!("{}_tuned_np{}", self.learner, self.np),
        }
    }

    fn median_of(&self, records: &[RunRecord], triple: &str, value: impl Fn(&RunRecord) -> f64) -> Option<f64> {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.triple == triple && self.matches(r))
            .map(value)
            .collect();
        median(&xs)
    }
}

/// Per-triple medians of one goal's test score; best columns flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub rows: Vec<ScoreRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub triple: String,
    pub values: Vec<Option<f64>>,
    pub best: Vec<String>,
}

fn score_columns(records: &[RunRecord], goal: Goal, np: Option<usize>) -> Vec<Column> {
    let mut cols = Vec::new();
    for learner in learners_present(records) {
        let untuned = Column::untuned(learner);
        if records.iter().any(|r| untuned.matches(r)) {
            cols.push(untuned);
        }
        if let Some(np) = np {
            let tuned = Column {
                learner,
                goal: Some(goal),
                np,
            };
            if records.iter().any(|r| tuned.matches(r)) {
                cols.push(tuned);
            }
        }
    }
    cols
}

/// Builds the score table for `goal`, using the first population size seen
/// among tuned records.
pub fn build_score_table(records: &[RunRecord], goal: Goal) -> ScoreTable {
    let primary = nps_in_order(records).first().copied();
    let cols = score_columns(records, goal, primary);
    let rows = triples_in_order(records)
        .into_iter()
        .map(|triple| {
            let values: Vec<Option<f64>> = cols
                .iter()
                .map(|c| c.median_of(records, &triple, |r| r.scores.get(goal)))
                .collect();
            let top = values.iter().flatten().copied().reduce(|a, b| if goal.better(b, a) { b } else { a });
            let best = cols
                .iter()
                .zip(&values)
                .filter(|(_, v)| v.is_some() && *v == &top)
                .map(|(c, _)| c.name(primary))
                .collect();
            ScoreRow { triple, values, best }
        })
        .collect();
    ScoreTable {
        columns: cols.iter().map(|c| c.name(primary)).collect(),
        rows,
    }
}

pub fn score_table_csv(table: &ScoreTable) -> Result<String> {
    let mut t = Table::new(std::iter::once("triple".to_string()).chain(table.columns.clone()).chain(["best".to_string()]));
    for row in &table.rows {
        let mut cells = vec![row.triple.clone()];
        cells.extend(row.values.iter().map(|v| v.map_or(String::new(), |x| x.to_string())));
        cells.push(row.best.join(";"));
        t.rows.push(cells);
    }
    t.csv()
}

/// Inverse of [`score_table_csv`].
pub fn parse_score_table(text: &str) -> Result<ScoreTable> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[0] != "triple" || header[header.len() - 1] != "best" {
        return Err(Error::MissingColumn {
            column: "triple ... best".into(),
        });
    }
    let columns = header[1..header.len() - 1].to_vec();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::LengthMismatch {
                left: rec.len(),
                right: header.len(),
            });
        }
        let values = columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let cell = &rec[j + 1];
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse::<f64>().map(Some).map_err(|e| Error::Parse {
                    row: i + 2,
                    column: col.clone(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let best = rec[header.len() - 1]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        rows.push(ScoreRow {
            triple: rec[0].to_string(),
            values,
            best,
        });
    }
    Ok(ScoreTable { columns, rows })
}

fn score_table_md(table: &ScoreTable, goal: Goal) -> String {
    let mut t = Table::new(std::iter::once("triple".to_string()).chain(table.columns.clone()));
    for row in &table.rows {
        let mut cells = vec![row.triple.clone()];
        for (col, v) in table.columns.iter().zip(&row.values) {
            cells.push(match v {
                None => "-".into(),
                Some(x) if row.best.contains(col) => format!("**{:.0}**", x * 100.0),
                Some(x) => format!("{:.0}", x * 100.0),
            });
        }
        t.rows.push(cells);
    }
    let mut md = t.markdown(&format!("Test-release {} (%, median over repeats; best in bold)", goal.as_str()));
    md.push('\n');
    md
}

fn deltas(records: &[RunRecord], goals: &[Goal]) -> Result<Table> {
    let mut t = Table::new(["learner", "goal", "rank", "triple", "tuned", "untuned", "delta"]);
    for &goal in goals {
        let table = build_score_table(records, goal);
        for learner in learners_present(records).into_iter().filter(|l| l.is_tunable()) {
            let find = |suffix: &str| table.columns.iter().position(|c| *c == format!("{learner}_{suffix}"));
            let (Some(ti), Some(ui)) = (find("tuned"), find("default")) else {
                continue;
            };
            let mut rows: Vec<(f64, &str, f64, f64)> = table
                .rows
                .iter()
                .filter_map(|r| Some((r.values[ti]? - r.values[ui]?, r.triple.as_str(), r.values[ti]?, r.values[ui]?)))
                .collect();
            let keys: Vec<String> = rows.iter().map(|r| r.1.to_string()).collect();
            let sorted = delta_series(
                &SampleSeries::new("tuned", keys.clone(), rows.iter().map(|r| r.2).collect())?,
                &SampleSeries::new("untuned", keys, rows.iter().map(|r| r.3).collect())?,
            )?;
            rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
            debug_assert!(rows.iter().zip(&sorted).all(|(r, d)| r.0 == *d));
            for (rank, (d, triple, tv, uv)) in rows.into_iter().enumerate() {
                t.rows.push(vec![
                    learner.to_string(),
                    goal.to_string(),
                    rank.to_string(),
                    triple.to_string(),
                    tv.to_string(),
                    uv.to_string(),
                    d.to_string(),
                ]);
            }
        }
    }
    Ok(t)
}

fn feature_list(r: &RunRecord) -> String {
    r.features.iter().map(|a| a.name()).collect::<Vec<_>>().join(" ")
}

fn features(records: &[RunRecord], goals: &[Goal]) -> (Table, Table) {
    let mut csv = Table::new(["triple", "learner", "mode", "goal", "np", "count", "features"]);
    for r in records.iter().filter(|r| r.repeat == 0) {
        csv.rows.push(vec![
            r.triple.clone(),
            r.learner.to_string(),
            format!("{:?}", r.mode).to_lowercase(),
            r.goal.map_or(String::new(), |g| g.to_string()),
            r.np.to_string(),
            r.features.len().to_string(),
            feature_list(r),
        ]);
    }
    let primary = nps_in_order(records).first().copied().unwrap_or(0);
    let mut md = Table::new(std::iter::once("triple".to_string()).chain(std::iter::once("default".to_string())).chain(goals.iter().map(|g| format!("tuned ({g})"))));
    for triple in triples_in_order(records) {
        let pick = |goal: Option<Goal>, np: usize| {
            records
                .iter()
                .find(|r| r.repeat == 0 && r.triple == triple && r.learner == LearnerKind::Where && r.goal == goal && r.np == np)
                .map_or("-".to_string(), |r| format!("{}: {}", r.features.len(), feature_list(r)))
        };
        let mut row = vec![triple.clone(), pick(None, 0)];
        row.extend(goals.iter().map(|&g| pick(Some(g), primary)));
        if row[1..].iter().any(|c| c != "-") {
            md.rows.push(row);
        }
    }
    (csv, md)
}

fn tuned_columns(records: &[RunRecord], goals: &[Goal]) -> Vec<Column> {
    let nps = nps_in_order(records);
    let mut cols = Vec::new();
    for learner in learners_present(records) {
        for &goal in goals {
            for &np in &nps {
                let c = Column {
                    learner,
                    goal: Some(goal),
                    np,
                };
                if records.iter().any(|r| c.matches(r)) {
                    cols.push(c);
                }
            }
        }
    }
    cols
}

fn tuned_name(c: &Column, primary: Option<usize>) -> String {
    let goal = c.goal.map_or("default", Goal::as_str);
    if c.goal.is_none() || Some(c.np) == primary {
        format!("{}_{goal}", c.learner)
    } else {
        format!("{}_{goal}_np{}", c.learner, c.np)
    }
}

fn per_triple_table(records: &[RunRecord], cols: &[Column], value: impl Fn(&RunRecord) -> f64) -> Table {
    let primary = nps_in_order(records).first().copied();
    let mut t = Table::new(std::iter::once("triple".to_string()).chain(cols.iter().map(|c| tuned_name(c, primary))));
    for triple in triples_in_order(records) {
        let mut row = vec![triple.clone()];
        row.extend(cols.iter().map(|c| c.median_of(records, &triple, &value).map_or(String::new(), |v| v.to_string())));
        t.rows.push(row);
    }
    t
}

fn rounded(t: &Table, digits: usize) -> Table {
    Table {
        header: t.header.clone(),
        rows: t
            .rows
            .iter()
            .map(|r| {
                let mut out = vec![r[0].clone()];
                out.extend(r[1..].iter().map(|c| match c.parse::<f64>() {
                    Ok(v) => format!("{v:.digits$}"),
                    Err(_) => "-".into(),
                }));
                out
            })
            .collect(),
    }
}

fn runtime_columns(records: &[RunRecord], goals: &[Goal]) -> Vec<Column> {
    let primary = nps_in_order(records).first().copied();
    let mut cols = Vec::new();
    for learner in learners_present(records) {
        let d = Column::untuned(learner);
        if records.iter().any(|r| d.matches(r)) {
            cols.push(d);
        }
        for &goal in goals {
            if let Some(np) = primary {
                let c = Column {
                    learner,
                    goal: Some(goal),
                    np,
                };
                if records.iter().any(|r| c.matches(r)) {
                    cols.push(c);
                }
            }
        }
    }
    cols
}

fn ks(records: &[RunRecord], goals: &[Goal]) -> Result<Table> {
    let mut t = Table::new(["goal", "left", "right", "n", "m", "statistic", "threshold", "verdict"]);
    let nps = nps_in_order(records);
    let primary = nps.first().copied();
    for &goal in goals {
        let mut pairs: Vec<(Column, Column)> = Vec::new();
        if let Some(np) = primary {
            let tuned = |learner| Column {
                learner,
                goal: Some(goal),
                np,
            };
            pairs.push((tuned(LearnerKind::Cart), tuned(LearnerKind::RandomForest)));
            pairs.push((Column::untuned(LearnerKind::LogisticRegression), tuned(LearnerKind::RandomForest)));
            for learner in learners_present(records).into_iter().filter(|l| l.is_tunable()) {
                for &other in &nps[1..] {
                    pairs.push((
                        tuned(learner),
                        Column {
                            learner,
                            goal: Some(goal),
                            np: other,
                        },
                    ));
                }
            }
        }
        for (a, b) in pairs {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for triple in triples_in_order(records) {
                let x = a.median_of(records, &triple, |r| r.scores.get(goal));
                let y = b.median_of(records, &triple, |r| r.scores.get(goal));
                if let (Some(x), Some(y)) = (x, y) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            if xs.is_empty() {
                continue;
            }
            let out = ks_test(&xs, &ys)?;
            t.rows.push(vec![
                goal.to_string(),
                a.name(primary),
                b.name(primary),
                xs.len().to_string(),
                ys.len().to_string(),
                out.statistic.to_string(),
                out.threshold.to_string(),
                if out.not_different { "not different" } else { "different" }.to_string(),
            ]);
        }
    }
    Ok(t)
}

fn params(records: &[RunRecord]) -> Table {
    let mut t = Table::new(["triple", "learner", "goal", "np", "repeat", "parameter", "value"]);
    for r in records.iter().filter(|r| r.mode == Mode::Tuned) {
        for (name, value) in &r.config.values {
            t.rows.push(vec![
                r.triple.clone(),
                r.learner.to_string(),
                r.goal.map_or(String::new(), |g| g.to_string()),
                r.np.to_string(),
                r.repeat.to_string(),
                name.clone(),
                value.to_string(),
            ]);
        }
    }
    t
}

fn write(dir: &Path, name: &str, text: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    out.push(path);
    Ok(())
}

/// Writes every report for `records` into `out_dir` and returns the paths.
pub fn emit_reports(records: &[RunRecord], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Empty("no run records to report".into()));
    }
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let goals = goals_present(records);
    let mut out = Vec::new();
    write(dir, "records.jsonl", &records_to_jsonl(records)?, &mut out)?;

    let mut index = String::from("# Reports\n\n");
    for &goal in &goals {
        let table = build_score_table(records, goal);
        let stem = goal_file(goal);
        write(dir, &format!("{stem}.csv"), &score_table_csv(&table)?, &mut out)?;
        write(dir, &format!("{stem}.md"), &score_table_md(&table, goal), &mut out)?;
        index.push_str(&format!("- `{stem}.csv`, `{stem}.md`: test-release {goal} per triple\n"));
    }

    write(dir, "deltas.csv", &deltas(records, &goals)?.csv()?, &mut out)?;

    let (fcsv, fmd) = features(records, &goals);
    write(dir, "features.csv", &fcsv.csv()?, &mut out)?;
    write(dir, "features.md", &fmd.markdown("WHERE features used (repeat 0)"), &mut out)?;

    let evals = per_triple_table(records, &tuned_columns(records, &goals), |r| r.evaluations as f64);
    write(dir, "evaluations.csv", &evals.csv()?, &mut out)?;
    write(dir, "evaluations.md", &rounded(&evals, 0).markdown("DE evaluations (median over repeats)"), &mut out)?;

    let runtime = per_triple_table(records, &runtime_columns(records, &goals), |r| r.wall_seconds);
    write(dir, "runtime.csv", &runtime.csv()?, &mut out)?;
    write(dir, "runtime.md", &rounded(&runtime, 3).markdown("Wall-clock seconds (median over repeats)"), &mut out)?;

    let ks = ks(records, &goals)?;
    write(dir, "ks.csv", &ks.csv()?, &mut out)?;
    write(dir, "ks.md", &ks.markdown("Kolmogorov-Smirnov comparisons (95%)"), &mut out)?;

    write(dir, "params.csv", &params(records).csv()?, &mut out)?;

    index.push_str(concat!(
        "- `deltas.csv`: tuned minus untuned per learner and goal, ascending\n",
        "- `features.csv`, `features.md`: attributes used by each model\n",
        "- `evaluations.csv`, `evaluations.md`: DE evaluations per tuned run\n",
        "- `runtime.csv`, `runtime.md`: wall-clock seconds per run\n",
        "- `ks.csv`, `ks.md`: two-sample KS tests between score columns\n",
        "- `params.csv`: parameter values chosen by DE\n",
        "- `records.jsonl`: one run record per line\n",
    ));
    write(dir, "README.md", &index, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Config;
    use crate::metrics::Scores;

    fn record(triple: &str, learner: LearnerKind, goal: Option<Goal>, prec: f64) -> RunRecord {
        RunRecord {
            triple: triple.into(),
            learner,
            goal,
            mode: if goal.is_some() { Mode::Tuned } else { Mode::Untuned },
            repeat: 0,
            seed: 1,
            np: if goal.is_some() { 10 } else { 0 },
            scores: Scores {
                pd: 0.5,
                pf: 0.1,
                prec,
                f: prec / 2.0,
            },
            config: Config::default_for(learner),
            evaluations: if goal.is_some() { 60 } else { 0 },
            generations: if goal.is_some() { 5 } else { 0 },
            tune_score: goal.map(|_| 0.4),
            default_tune_score: goal.map(|_| 0.3),
            features: BTreeSet::new(),
            wall_seconds: 0.25,
        }
    }

    #[test]
    fn score_table_shape_and_best() {
        let recs = vec![
            record("a", LearnerKind::Cart, None, 0.2),
            record("a", LearnerKind::Cart, Some(Goal::Prec), 0.6),
            record("b", LearnerKind::Cart, None, 0.5),
            record("b", LearnerKind::Cart, Some(Goal::Prec), 0.5),
            record("a", LearnerKind::LogisticRegression, None, 0.1),
        ];
        let t = build_score_table(&recs, Goal::Prec);
        assert_eq!(t.columns, ["cart_default", "cart_tuned", "lr_default"]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].best, ["cart_tuned"]);
        assert_eq!(t.rows[1].best, ["cart_default", "cart_tuned"]);
        assert_eq!(t.rows[1].values[2], None);
        let back = parse_score_table(&score_table_csv(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn single_record_tables() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![record("only", LearnerKind::Cart, Some(Goal::Prec), 0.3)];
        emit_reports(&recs, dir.path()).unwrap();
        let t = parse_score_table(&fs::read_to_string(dir.path().join("precision.csv")).unwrap()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].best, ["cart_tuned"]);
        for f in REPORT_FILES {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn identical_columns_are_not_different() {
        let mut recs = Vec::new();
        for (i, t) in ["a", "b", "c"].iter().enumerate() {
            recs.push(record(t, LearnerKind::Cart, Some(Goal::Prec), 0.1 * i as f64));
            recs.push(record(t, LearnerKind::RandomForest, Some(Goal::Prec), 0.1 * i as f64));
        }
        let t = ks(&recs, &[Goal::Prec]).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][5], "0");
        assert_eq!(t.rows[0][7], "not different");
    }

    #[test]
    fn empty_records_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_reports(&[], dir.path()).is_err());
    }

    #[test]
    fn malformed_score_tables_rejected() {
        assert!(parse_score_table("a,b\n1,2\n").is_err());
        assert!(parse_score_table("triple,x,best\nt,oops,\n").is_err());
        assert!(parse_score_table("triple,x,best\nt,0.5\n").is_err());
    }
}
