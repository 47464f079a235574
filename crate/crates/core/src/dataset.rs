//! PROMISE CK-metric releases: loading, labelling and train/tune/test triples.
//!
//! A release is one CSV file holding one row per class. Twenty object-oriented
//! metrics feed the learners; the `bug` column holds the number of post-release
//! defects. A class is labelled defective when its defect count reaches
//! [`DEFECT_THRESHOLD`]. Releases of one project are ordered by a manifest file
//! and grouped into sliding windows of three consecutive releases.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const NUM_ATTRIBUTES: usize = 20;

/// Metric column names, sorted alphabetically. Index order is also the
/// tie-break order used by every split search.
pub const ATTRIBUTE_NAMES: [&str; NUM_ATTRIBUTES] = [
    "amc", "avg_cc", "ca", "cam", "cbm", "cbo", "ce", "dam", "dit", "ic", "lcom", "lcom3", "loc",
    "max_cc", "mfa", "moa", "noc", "npm", "rfc", "wmc",
];

/// Minimum defect count for a class to count as defective.
pub const DEFECT_THRESHOLD: u32 = 1;

pub const DEFAULT_DEFECT_COLUMN: &str = "bug";

/// One of the twenty CK metrics.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute(u8);

impl Attribute {
    pub fn new(index: usize) -> Option<Self> {
        (index < NUM_ATTRIBUTES).then_some(Attribute(index as u8))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ATTRIBUTE_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name.trim()))
            .map(|i| Attribute(i as u8))
    }

    pub fn all() -> impl Iterator<Item = Attribute> + Clone {
        (0..NUM_ATTRIBUTES as u8).map(Attribute)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        ATTRIBUTE_NAMES[self.index()]
    }
}

impl fmt::Debug for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Attribute {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Attribute {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Attribute::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown attribute `{name}`")))
    }
}

/// One class of one release.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    metrics: [f64; NUM_ATTRIBUTES],
    defect_count: u32,
    label: bool,
    ids: Vec<String>,
}

impl Instance {
    /// Builds an instance labelled with the default threshold.
    pub fn new(metrics: [f64; NUM_ATTRIBUTES], defect_count: u32) -> Result<Self> {
        if let Some(i) = metrics.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row: 0,
                column: ATTRIBUTE_NAMES[i].to_string(),
                message: "metric value is not finite".into(),
            });
        }
        Ok(Instance {
            metrics,
            defect_count,
            label: defect_count >= DEFECT_THRESHOLD,
            ids: Vec::new(),
        })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Self {
        self.ids = ids;
        self
    }

    #[inline]
    pub fn metric(&self, attribute: Attribute) -> f64 {
        self.metrics[attribute.index()]
    }

    pub fn metrics(&self) -> &[f64; NUM_ATTRIBUTES] {
        &self.metrics
    }

    pub fn defect_count(&self) -> u32 {
        self.defect_count
    }

    #[inline]
    pub fn is_defective(&self) -> bool {
        self.label
    }

    /// Identifier cells (project, version, class name, ...) kept for reporting.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    fn relabel(&mut self, threshold: u32) {
        self.label = self.defect_count >= threshold;
    }
}

/// One version of a project.
#[derive(Debug, Clone, PartialEq)]
pub struct Release {
    project: String,
    version_index: usize,
    name: String,
    id_columns: Vec<String>,
    instances: Vec<Instance>,
}

impl Release {
    pub fn new(
        project: impl Into<String>,
        version_index: usize,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let project = project.into();
        if instances.is_empty() {
            return Err(Error::Empty(format!(
                "release {version_index} of `{project}` has no instances"
            )));
        }
        Ok(Release {
            name: format!("{project}-{version_index}"),
            project,
            version_index,
            id_columns: Vec::new(),
            instances,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn project(&self) -> &str {
        &self.project
    }

    pub fn version_index(&self) -> usize {
        self.version_index
    }

    /// Display name, usually the CSV file stem (e.g. `ant-1.3`).
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id_columns(&self) -> &[String] {
        &self.id_columns
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn defective_count(&self) -> usize {
        self.instances.iter().filter(|i| i.is_defective()).count()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.instances.iter().map(Instance::is_defective).collect()
    }

    /// Re-derives every label with a different defect-count threshold.
    pub fn relabel(&mut self, threshold: u32) {
        for inst in &mut self.instances {
            inst.relabel(threshold);
        }
    }
}

/// Column names used to locate each metric and the defect count in a CSV header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attribute_columns: Vec<String>,
    defect_column: String,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            attribute_columns: ATTRIBUTE_NAMES.iter().map(|s| s.to_string()).collect(),
            defect_column: DEFAULT_DEFECT_COLUMN.to_string(),
        }
    }
}

impl Schema {
    pub fn with_attribute_column(mut self, attribute: Attribute, column: impl Into<String>) -> Self {
        self.attribute_columns[attribute.index()] = column.into();
        self
    }

    pub fn with_defect_column(mut self, column: impl Into<String>) -> Self {
        self.defect_column = column.into();
        self
    }

    pub fn attribute_column(&self, attribute: Attribute) -> &str {
        &self.attribute_columns[attribute.index()]
    }

    pub fn defect_column(&self) -> &str {
        &self.defect_column
    }
}

fn find_column(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::MissingColumn {
            column: name.to_string(),
        })
}

/// Parses one release from CSV text.
pub fn parse_release<R: Read>(
    reader: R,
    schema: &Schema,
    project: &str,
    version_index: usize,
) -> Result<Release> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::Empty("missing header row".into()));
    }

    let mut attr_idx = [0usize; NUM_ATTRIBUTES];
    for attr in Attribute::all() {
        attr_idx[attr.index()] = find_column(&header, schema.attribute_column(attr))?;
    }
    let defect_idx = find_column(&header, schema.defect_column())?;
    let id_idx: Vec<usize> = (0..header.len())
        .filter(|i| *i != defect_idx && !attr_idx.contains(i))
        .collect();

    let mut instances = Vec::new();
    for (n, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map_or(n + 2, |p| p.line() as usize);
        let cell = |idx: usize| -> Result<&str> {
            match record.get(idx) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(Error::Parse {
                    row,
                    column: header[idx].to_string(),
                    message: "missing value".into(),
                }),
            }
        };
        let number = |idx: usize| -> Result<f64> {
            let raw = cell(idx)?;
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    row,
                    column: header[idx].to_string(),
                    message: format!("`{raw}` is not a finite number"),
                }),
            }
        };

        let mut metrics = [0.0; NUM_ATTRIBUTES];
        for (slot, &idx) in metrics.iter_mut().zip(attr_idx.iter()) {
            *slot = number(idx)?;
        }
        let defects = number(defect_idx)?;
        if defects < 0.0 || defects >= f64::from(u32::MAX) {
            return Err(Error::Parse {
                row,
                column: header[defect_idx].to_string(),
                message: format!("defect count {defects} out of range"),
            });
        }
        let ids = id_idx
            .iter()
            .map(|&i| record.get(i).unwrap_or_default().to_string())
            .collect();
        instances.push(Instance::new(metrics, defects.floor() as u32)?.with_ids(ids));
    }

    if instances.is_empty() {
        return Err(Error::Empty("no data rows".into()));
    }
    let mut release = Release::new(project, version_index, instances)?;
    release.id_columns = id_idx.iter().map(|&i| header[i].to_string()).collect();
    Ok(release)
}

/// Loads one release CSV; the release is named after the file stem.
pub fn load_release(
    path: impl AsRef<Path>,
    schema: &Schema,
    project: &str,
    version_index: usize,
) -> Result<Release> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let release = parse_release(file, schema, project, version_index)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| release.name().to_string());
    Ok(release.with_name(stem))
}

/// Writes a release back out with the default schema's column names:
/// identifier columns first, then the twenty metrics, then `bug`.
pub fn write_release<W: Write>(release: &Release, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = release.id_columns.iter().map(String::as_str).collect();
    header.extend(ATTRIBUTE_NAMES.iter());
    header.push(DEFAULT_DEFECT_COLUMN);
    wtr.write_record(&header)?;
    for inst in release.instances() {
        let mut row: Vec<String> = release
            .id_columns
            .iter()
            .enumerate()
            .map(|(i, _)| inst.ids.get(i).cloned().unwrap_or_default())
            .collect();
        row.extend(inst.metrics.iter().map(|v| format!("{v:?}")));
        row.push(inst.defect_count.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

/// Release paths listed in a manifest, oldest first. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Loads every release listed in a manifest file. The project is named after
/// the manifest's file stem; relative paths resolve against its directory.
pub fn load_manifest(path: impl AsRef<Path>, schema: &Schema) -> Result<Vec<Release>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let project = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| Error::Manifest(format!("cannot name project from {}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let entries = parse_manifest(&text);
    if entries.is_empty() {
        return Err(Error::Manifest(format!("{} lists no releases", path.display())));
    }
    entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let p = Path::new(entry);
            let p = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
            load_release(p, schema, &project, i)
        })
        .collect()
}

/// Manifest files in a directory (`*.manifest`, sorted), or the path itself
/// when it names a single manifest file.
pub fn manifest_paths(path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let p = entry.map_err(|e| Error::io(path, e))?.path();
        if p.extension().is_some_and(|e| e == "manifest") {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(Error::Manifest(format!(
            "no *.manifest files in {}",
            path.display()
        )));
    }
    out.sort();
    Ok(out)
}

/// Loads every project under a manifest directory, in project-name order.
pub fn load_projects(path: impl AsRef<Path>, schema: &Schema) -> Result<Vec<Vec<Release>>> {
    manifest_paths(path)?
        .iter()
        .map(|p| load_manifest(p, schema))
        .collect()
}

/// Three consecutive releases: train on the first, tune on the second, test on the third.
#[derive(Debug, Clone)]
pub struct ExperimentTriple {
    pub name: String,
    pub train: Arc<Release>,
    pub tune: Arc<Release>,
    pub test: Arc<Release>,
}

/// Slides a window of three over a project's releases.
///
/// With more than three releases the triples are named `projectV0`,
/// `projectV1`, ...; a project with exactly three releases yields one triple
/// named after the project alone.
pub fn build_triples(releases: &[Release]) -> Result<Vec<ExperimentTriple>> {
    let project = releases.first().map(|r| r.project().to_string()).unwrap_or_default();
    if releases.len() < 3 {
        return Err(Error::TooFewReleases {
            project,
            count: releases.len(),
        });
    }
    for pair in releases.windows(2) {
        if pair[1].project() != project {
            return Err(Error::ProjectMismatch(project, pair[1].project().to_string()));
        }
        if pair[1].version_index() != pair[0].version_index() + 1 {
            return Err(Error::Manifest(format!(
                "releases of `{project}` are not consecutive: version {} follows {}",
                pair[1].version_index(),
                pair[0].version_index()
            )));
        }
    }
    let shared: Vec<Arc<Release>> = releases.iter().cloned().map(Arc::new).collect();
    let single = shared.len() == 3;
    Ok(shared
        .windows(3)
        .enumerate()
        .map(|(k, w)| ExperimentTriple {
            name: if single {
                project.clone()
            } else {
                format!("{project}V{k}")
            },
            train: Arc::clone(&w[0]),
            tune: Arc::clone(&w[1]),
            test: Arc::clone(&w[2]),
        })
        .collect())
}

/// Concatenates two releases of the same project (`a` first).
pub fn merge_releases(a: &Release, b: &Release) -> Result<Release> {
    if a.project() != b.project() {
        return Err(Error::ProjectMismatch(
            a.project().to_string(),
            b.project().to_string(),
        ));
    }
    let mut instances = Vec::with_capacity(a.len() + b.len());
    instances.extend_from_slice(a.instances());
    instances.extend_from_slice(b.instances());
    let mut merged = Release::new(a.project(), a.version_index(), instances)?
        .with_name(format!("{}+{}", a.name(), b.name()));
    merged.id_columns = if a.id_columns == b.id_columns {
        a.id_columns.clone()
    } else {
        Vec::new()
    };
    Ok(merged)
}

/// Published (defective, total) counts of the train, tune and test releases
/// for the seventeen PROMISE triples.
pub const REFERENCE_COUNTS: [(&str, [(usize, usize); 3]); 17] = [
    ("antV0", [(20, 125), (40, 178), (32, 293)]),
    ("antV1", [(40, 178), (32, 293), (92, 351)]),
    ("antV2", [(32, 293), (92, 351), (166, 745)]),
    ("camelV0", [(13, 339), (216, 608), (145, 872)]),
    ("camelV1", [(216, 608), (145, 872), (188, 965)]),
    ("ivy", [(63, 111), (16, 241), (40, 352)]),
    ("jeditV0", [(90, 272), (75, 306), (79, 312)]),
    ("jeditV1", [(75, 306), (79, 312), (48, 367)]),
    ("jeditV2", [(79, 312), (48, 367), (11, 492)]),
    ("log4j", [(34, 135), (37, 109), (189, 205)]),
    ("lucene", [(91, 195), (144, 247), (203, 340)]),
    ("poiV0", [(141, 237), (37, 314), (248, 385)]),
    ("poiV1", [(37, 314), (248, 385), (281, 442)]),
    ("synapse", [(16, 157), (60, 222), (86, 256)]),
    ("velocity", [(147, 196), (142, 214), (78, 229)]),
    ("xercesV0", [(77, 162), (71, 440), (69, 453)]),
    ("xercesV1", [(71, 440), (69, 453), (437, 588)]),
];

/// Outcome of comparing one triple's ingested counts with [`REFERENCE_COUNTS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountCheck {
    pub triple: String,
    pub expected: Option<[(usize, usize); 3]>,
    pub observed: [(usize, usize); 3],
}

impl CountCheck {
    pub fn matches(&self) -> bool {
        self.expected == Some(self.observed)
    }
}

fn counts(r: &Release) -> (usize, usize) {
    (r.defective_count(), r.len())
}

/// Checks every triple against the reference table. Reference triples that
/// are absent from `triples` are reported with zero observed counts.
pub fn check_reference_counts(triples: &[ExperimentTriple]) -> Vec<CountCheck> {
    let mut out: Vec<CountCheck> = triples
        .iter()
        .map(|t| CountCheck {
            triple: t.name.clone(),
            expected: REFERENCE_COUNTS
                .iter()
                .find(|(n, _)| *n == t.name)
                .map(|(_, c)| *c),
            observed: [counts(&t.train), counts(&t.tune), counts(&t.test)],
        })
        .collect();
    for (name, expected) in REFERENCE_COUNTS {
        if !triples.iter().any(|t| t.name == name) {
            out.push(CountCheck {
                triple: name.to_string(),
                expected: Some(expected),
                observed: [(0, 0); 3],
            });
        }
    }
    out
}
