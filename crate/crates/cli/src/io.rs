//! JSON file formats. Every number is an exact rational string such as
//! `"5/4"`; integers may omit the denominator and finite decimals are
//! accepted on input. Job and level indices are 0-based.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use speedscale::metrics::{Content, Segment};
use speedscale::{Instance, Job, JobOrder, Rational, Schedule, ScheduleMetrics, SpeedProfile, Variant};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub r: String,
    #[serde(default = "one")]
    pub v: String,
    #[serde(default = "one")]
    pub w: String,
    /// Number of identical copies; absent means one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

fn one() -> String {
    "1".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantEntry {
    #[serde(rename = "fe")]
    FlowEnergy,
    #[serde(rename = "budget")]
    Budget(String),
}

/// Where a generated instance came from and the constants derived on the way.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<InstanceFile>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub jobs: Vec<JobEntry>,
    pub speeds: Vec<String>,
    pub powers: Vec<String>,
    pub variant: VariantEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    pub start: String,
    pub end: String,
    /// Absent for idle time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsEntry {
    #[serde(rename = "C")]
    pub completion: Vec<String>,
    /// Extended completions along `ordering`, when the schedule has one.
    #[serde(rename = "C_hat", default, skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<Vec<String>>,
    #[serde(rename = "x")]
    pub processing: Vec<String>,
    #[serde(rename = "F")]
    pub flow: String,
    #[serde(rename = "E")]
    pub energy: String,
    pub objective: String,
}

/// A schedule together with the instance it solves, so files stand alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub solver: String,
    pub instance: InstanceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
    pub segments: Vec<SegmentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsEntry>,
}

pub fn rat(field: &str, s: &str) -> Result<Rational, CliError> {
    s.parse().map_err(|_| CliError::Parse(format!("{field}: not an exact rational: {s:?}")))
}

fn rats(field: &str, v: &[String]) -> Result<Vec<Rational>, CliError> {
    v.iter().enumerate().map(|(i, s)| rat(&format!("{field}[{i}]"), s)).collect()
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let jobs = instance
            .jobs()
            .iter()
            .map(|j| JobEntry { r: j.release.to_string(), v: j.volume.to_string(), w: j.weight.to_string(), count: None })
            .collect();
        let p = instance.profile();
        InstanceFile {
            jobs,
            speeds: strs(p.speeds()),
            powers: strs(p.powers()),
            variant: match instance.variant() {
                Variant::FlowEnergy => VariantEntry::FlowEnergy,
                Variant::Budget(b) => VariantEntry::Budget(b.to_string()),
            },
            ordering: None,
            provenance: None,
        }
    }

    /// Number of jobs after expanding counts.
    pub fn job_count(&self) -> u64 {
        self.jobs.iter().map(|j| j.count.unwrap_or(1)).sum()
    }

    /// Parses and validates, expanding job groups in file order.
    pub fn to_instance(&self) -> Result<Instance, CliError> {
        let mut jobs = Vec::new();
        for (i, e) in self.jobs.iter().enumerate() {
            let job = Job::new(
                rat(&format!("jobs[{i}].r"), &e.r)?,
                rat(&format!("jobs[{i}].v"), &e.v)?,
                rat(&format!("jobs[{i}].w"), &e.w)?,
            );
            let count = e.count.unwrap_or(1);
            if count == 0 {
                return Err(CliError::Parse(format!("jobs[{i}].count: must be positive")));
            }
            for _ in 0..count {
                jobs.push(job.clone());
            }
        }
        let profile = SpeedProfile::new(rats("speeds", &self.speeds)?, rats("powers", &self.powers)?)?;
        let variant = match &self.variant {
            VariantEntry::FlowEnergy => Variant::FlowEnergy,
            VariantEntry::Budget(b) => Variant::Budget(rat("variant.budget", b)?),
        };
        Ok(Instance::new(jobs, profile, variant)?)
    }

    pub fn order(&self) -> Result<Option<JobOrder>, CliError> {
        self.ordering.clone().map(|p| JobOrder::completion(p).map_err(CliError::from)).transpose()
    }
}

impl ScheduleFile {
    pub fn new(
        solver: &str,
        instance: &InstanceFile,
        schedule: &Schedule,
        order: Option<&JobOrder>,
        metrics: &ScheduleMetrics,
    ) -> Self {
        let segments = schedule
            .segments
            .iter()
            .map(|s| {
                let (job, level) = match s.content {
                    Content::Idle => (None, None),
                    Content::Run { job, level } => (Some(job), Some(level)),
                };
                SegmentEntry { start: s.start.to_string(), end: s.end.to_string(), job, level }
            })
            .collect();
        let mut instance = instance.clone();
        instance.ordering = None;
        ScheduleFile {
            solver: solver.to_string(),
            instance,
            ordering: order.map(|o| o.perm().to_vec()),
            segments,
            metrics: Some(MetricsEntry::from_metrics(metrics)),
        }
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        let mut segs = Vec::with_capacity(self.segments.len());
        for (i, s) in self.segments.iter().enumerate() {
            let content = match (s.job, s.level) {
                (None, None) => Content::Idle,
                (Some(job), Some(level)) => Content::Run { job, level },
                _ => return Err(CliError::Parse(format!("segments[{i}]: job and level must appear together"))),
            };
            segs.push(Segment {
                start: rat(&format!("segments[{i}].start"), &s.start)?,
                end: rat(&format!("segments[{i}].end"), &s.end)?,
                content,
            });
        }
        Ok(Schedule::new(segs))
    }

    pub fn order(&self) -> Result<Option<JobOrder>, CliError> {
        self.ordering.clone().map(|p| JobOrder::completion(p).map_err(CliError::from)).transpose()
    }
}

impl MetricsEntry {
    pub fn from_metrics(m: &ScheduleMetrics) -> Self {
        MetricsEntry {
            completion: strs(&m.completion),
            c_hat: m.extended.as_deref().map(strs),
            processing: strs(&m.processing),
            flow: m.flow.to_string(),
            energy: m.energy.to_string(),
            objective: m.objective.to_string(),
        }
    }
}

/// Pretty JSON with a trailing newline. Field order is fixed by the types,
/// so equal values always give equal bytes.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn from_json<D: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<D, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn read_file<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    from_json(&text, &path.display().to_string())
}

pub fn read_instance(path: &Path) -> Result<(InstanceFile, Instance), CliError> {
    let file: InstanceFile = read_file(path)?;
    let instance = file.to_instance()?;
    Ok((file, instance))
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, to_json(&InstanceFile::from_instance(instance)))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
