//! Schedule CSV files and the network JSON export.
//!
//! Activities: `id,name,planned_start,planned_end,actual_start,actual_end`
//! with ISO dates and optional actuals. Dependencies: `predecessor,successor`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GraphError;
use crate::network::{build_network, ActivityNetwork, ActivityRecord, Dependency};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },
    #[error("{file}:{line}: {source}")]
    Invalid {
        file: String,
        line: u64,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parsed schedule rows with their source line numbers.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub activities: Vec<ActivityRecord>,
    pub dependencies: Vec<Dependency>,
    activities_file: String,
    dependencies_file: String,
    activity_lines: Vec<u64>,
    dependency_lines: Vec<u64>,
}

#[derive(Deserialize)]
struct ActivityRow {
    id: String,
    name: String,
    planned_start: NaiveDate,
    planned_end: NaiveDate,
    actual_start: Option<NaiveDate>,
    actual_end: Option<NaiveDate>,
}

fn open(path: &Path) -> Result<File, ScheduleError> {
    File::open(path).map_err(|source| ScheduleError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_rows<T, R>(reader: R, file: &str) -> Result<Vec<T>, ScheduleError>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for result in rdr.deserialize::<T>() {
        match result {
            Ok(row) => rows.push(row),
            Err(err) => {
                let line = err.position().map_or(0, |p| p.line());
                return Err(ScheduleError::Parse {
                    file: file.to_string(),
                    line,
                    message: err.to_string(),
                });
            }
        }
    }
    Ok(rows)
}

/// Record line numbers come from a second lightweight pass; the deserializing
/// iterator does not expose positions for successful rows.
fn record_lines<R: Read>(reader: R) -> Vec<u64> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let mut record = csv::StringRecord::new();
    let mut lines = Vec::new();
    while let Ok(true) = rdr.read_record(&mut record) {
        lines.push(record.position().map_or(0, |p| p.line()));
    }
    lines
}

impl Schedule {
    pub fn read(activities: &Path, dependencies: &Path) -> Result<Self, ScheduleError> {
        let mut act_text = String::new();
        let mut dep_text = String::new();
        let read = |path: &Path, buf: &mut String| {
            open(path)?
                .read_to_string(buf)
                .map(|_| ())
                .map_err(|source| ScheduleError::Io {
                    path: path.display().to_string(),
                    source,
                })
        };
        read(activities, &mut act_text)?;
        read(dependencies, &mut dep_text)?;
        Self::parse(
            &act_text,
            &activities.display().to_string(),
            &dep_text,
            &dependencies.display().to_string(),
        )
    }

    /// Parses the two CSV documents; `*_file` names are used in diagnostics.
    pub fn parse(
        activities_csv: &str,
        activities_file: &str,
        dependencies_csv: &str,
        dependencies_file: &str,
    ) -> Result<Self, ScheduleError> {
        let acts = parse_rows::<ActivityRow, _>(activities_csv.as_bytes(), activities_file)?;
        let deps = parse_rows::<Dependency, _>(dependencies_csv.as_bytes(), dependencies_file)?;
        let activities = acts
            .into_iter()
            .map(|r| ActivityRecord {
                id: r.id,
                name: r.name,
                planned_start: r.planned_start,
                planned_end: r.planned_end,
                actual_start: r.actual_start,
                actual_end: r.actual_end,
            })
            .collect();
        Ok(Self {
            activities,
            dependencies: deps,
            activities_file: activities_file.to_string(),
            dependencies_file: dependencies_file.to_string(),
            activity_lines: record_lines(activities_csv.as_bytes()),
            dependency_lines: record_lines(dependencies_csv.as_bytes()),
        })
    }

    /// Builds the network, attaching file and line to row-level errors.
    pub fn build(&self) -> Result<ActivityNetwork, ScheduleError> {
        build_network(self.activities.clone(), &self.dependencies).map_err(|err| {
            let located = |file: &str, lines: &[u64], index: usize| ScheduleError::Invalid {
                file: file.to_string(),
                line: lines.get(index).copied().unwrap_or(0),
                source: err.clone(),
            };
            match &err {
                GraphError::EmptyActivityId { index }
                | GraphError::DuplicateActivityId { index, .. } => {
                    located(&self.activities_file, &self.activity_lines, *index)
                }
                GraphError::InvalidDates { id, .. } => {
                    let index = self.activities.iter().position(|a| &a.id == id).unwrap_or(0);
                    located(&self.activities_file, &self.activity_lines, index)
                }
                GraphError::UnknownActivityId { index, .. } | GraphError::SelfLoop { index, .. } => {
                    located(&self.dependencies_file, &self.dependency_lines, *index)
                }
                _ => ScheduleError::Graph(err.clone()),
            }
        })
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn activities_csv(records: &[ActivityRecord]) -> String {
    if records.is_empty() {
        return "id,name,planned_start,planned_end,actual_start,actual_end\n".into();
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in records {
        wtr.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

pub fn dependencies_csv(deps: &[Dependency]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["predecessor", "successor"])
        .expect("in-memory csv write");
    for d in deps {
        wtr.write_record([&d.predecessor, &d.successor])
            .expect("in-memory csv write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

/// Writes `activities.csv` and `dependencies.csv` for `network` into `dir`.
pub fn write_schedule(network: &ActivityNetwork, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    File::create(dir.join("activities.csv"))?.write_all(activities_csv(network.nodes()).as_bytes())?;
    File::create(dir.join("dependencies.csv"))?
        .write_all(dependencies_csv(&network.dependencies()).as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    pub nodes: Vec<ActivityRecord>,
    pub edges: Vec<[usize; 2]>,
}

impl NetworkJson {
    pub fn from_network(network: &ActivityNetwork) -> Self {
        Self {
            nodes: network.nodes().to_vec(),
            edges: network.edges().iter().map(|&(s, t)| [s, t]).collect(),
        }
    }

    pub fn into_network(self) -> Result<ActivityNetwork, GraphError> {
        let deps = self
            .edges
            .iter()
            .map(|&[s, t]| {
                let id = |i: usize| {
                    self.nodes
                        .get(i)
                        .map(|a| a.id.clone())
                        .ok_or(GraphError::UnknownNode(i))
                };
                Ok(Dependency::new(id(s)?, id(t)?))
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        build_network(self.nodes, &deps)
    }
}
