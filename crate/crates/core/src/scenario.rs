//! Scenario files: named surfaces and ambients plus an ordered task list,
//! run into a deterministic [`Report`].
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "surfaces": { "line": { "topology": { "genus": 0, "orientable": true },
//!                           "normal_euler": 1, "c1_pairing": 3,
//!                           "delta_plus": 0, "delta_minus": 0 } },
//!   "ambients": { "cp2": { "kind": { "type": "projective_plane", "degree": 1 } } },
//!   "tasks": [
//!     { "task": "check", "surface": "line", "ambient": "cp2", "variant": "embedded_star" },
//!     { "task": "plan", "name": "p", "target": { "degree": 1, "genus": 0, "delta_plus": 3 } },
//!     { "task": "replay", "recipe": "p" },
//!     { "task": "verify_local", "suite": "windings" }
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::invariants::{
    check_adjunction, lai, stein_condition, validate, verdict, AdjunctionVariant,
    AmbientDescriptor, ImmersionClass, IndexReport, Outcome, Verdict,
};
use crate::suites::{verify_local, NamedCertificate, Suite, SuiteParams, SuiteReport};
use crate::surgery::{plan_cp2, replay_traced, PlanTarget, SurgeryRecipe, SurgeryStep};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub surfaces: BTreeMap<String, ImmersionClass>,
    #[serde(default)]
    pub ambients: BTreeMap<String, AmbientDescriptor>,
    #[serde(default)]
    pub recipes: BTreeMap<String, RecipeSpec>,
    pub tasks: Vec<Task>,
}

/// A recipe as written in a file. Unlike [`SurgeryRecipe`] it may omit the
/// expected class or state a wrong one; replaying it is a task, not parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeSpec {
    pub base: ImmersionClass,
    pub steps: Vec<SurgeryStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ImmersionClass>,
}

impl From<SurgeryRecipe> for RecipeSpec {
    fn from(r: SurgeryRecipe) -> Self {
        RecipeSpec {
            base: *r.base(),
            steps: r.steps().to_vec(),
            expected: Some(*r.expected()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecipeRef {
    Named(String),
    Inline(RecipeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// With a variant, passes iff that adjunction inequality holds. Without
    /// one, passes iff the verdict is a Stein neighborhood after isotopy.
    Check {
        surface: String,
        ambient: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variant: Option<AdjunctionVariant>,
        #[serde(default)]
        class_nonzero: bool,
    },
    /// Passes iff the target is feasible. A `name` makes the recipe available
    /// to later replay tasks.
    Plan {
        target: PlanTarget,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Passes iff every step applies and the result matches `expected`.
    Replay { recipe: RecipeRef },
    VerifyLocal {
        suite: Suite,
        #[serde(default)]
        params: SuiteParams,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Check { .. } => "check",
            Task::Plan { .. } => "plan",
            Task::Replay { .. } => "replay",
            Task::VerifyLocal { .. } => "verify_local",
        }
    }

    fn label(&self) -> String {
        match self {
            Task::Check {
                surface,
                ambient,
                variant,
                ..
            } => match variant {
                Some(v) => format!("{surface} in {ambient} [{}]", v.rule()),
                None => format!("{surface} in {ambient}"),
            },
            Task::Plan { target, name } => {
                let mut s = match target.degree {
                    Some(d) => format!(
                        "degree {d}, genus {}, delta+ {}",
                        target.genus, target.delta_plus
                    ),
                    None => format!("unorientable genus {}", target.genus),
                };
                if let Some(n) = name {
                    s = format!("{n}: {s}");
                }
                s
            }
            Task::Replay { recipe } => match recipe {
                RecipeRef::Named(n) => n.clone(),
                RecipeRef::Inline(r) => format!("inline, {} steps", r.steps.len()),
            },
            Task::VerifyLocal { suite, .. } => suite.to_string(),
        }
    }
}

impl Scenario {
    /// Parses and checks that every name a task refers to is defined, plan
    /// names before their use.
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("scenario: {e}")))?;
        scenario.check_names()?;
        Ok(scenario)
    }

    pub fn check_names(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut recipes: BTreeSet<&str> = self.recipes.keys().map(String::as_str).collect();
        for (i, task) in self.tasks.iter().enumerate() {
            let missing = |what: &str, name: &str| {
                Error::InvalidInput(format!("task {}: unknown {what} `{name}`", i + 1))
            };
            match task {
                Task::Check {
                    surface, ambient, ..
                } => {
                    if !self.surfaces.contains_key(surface) {
                        return Err(missing("surface", surface));
                    }
                    if !self.ambients.contains_key(ambient) {
                        return Err(missing("ambient", ambient));
                    }
                }
                Task::Plan {
                    name: Some(name), ..
                } => {
                    if !recipes.insert(name) {
                        return Err(Error::InvalidInput(format!(
                            "task {}: recipe name `{name}` is already taken",
                            i + 1
                        )));
                    }
                }
                Task::Replay {
                    recipe: RecipeRef::Named(name),
                } if !recipes.contains(name.as_str()) => return Err(missing("recipe", name)),
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TaskDetail {
    Check {
        validity: Certificate,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<Certificate>,
        #[serde(skip_serializing_if = "Option::is_none")]
        verdict: Option<Verdict>,
    },
    Plan {
        recipe: RecipeSpec,
        stein: Certificate,
    },
    Replay {
        result: ImmersionClass,
        exceptional_spheres: u32,
        index: Option<IndexReport>,
        stein: Option<Certificate>,
    },
    VerifyLocal {
        suite: Suite,
        checks: Vec<NamedCertificate>,
    },
    None {},
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub task: &'static str,
    pub label: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub detail: TaskDetail,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub pass: bool,
    pub tasks: Vec<TaskReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Adds wall-clock times; off by default so reports are reproducible.
    pub timing: bool,
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs every task in order. Task failures are recorded in the report, never
/// returned as errors.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Report {
    let start = Instant::now();
    let mut planned: BTreeMap<String, RecipeSpec> = BTreeMap::new();
    let mut tasks = Vec::with_capacity(scenario.tasks.len());
    for (i, task) in scenario.tasks.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail, error) = match run_task(scenario, &planned, task) {
            Ok((pass, detail)) => (pass, detail, None),
            Err(e) => (false, TaskDetail::None {}, Some(e.to_string())),
        };
        if let (
            Task::Plan {
                name: Some(name), ..
            },
            TaskDetail::Plan { recipe, .. },
        ) = (task, &detail)
        {
            planned.insert(name.clone(), recipe.clone());
        }
        tasks.push(TaskReport {
            index: i + 1,
            task: task.kind(),
            label: task.label(),
            pass,
            error,
            detail,
            elapsed_ms: opts.timing.then(|| millis(t)),
        });
    }
    Report {
        schema_version: SCHEMA_VERSION,
        pass: tasks.iter().all(|t| t.pass),
        tasks,
        elapsed_ms: opts.timing.then(|| millis(start)),
    }
}

fn run_task(
    scenario: &Scenario,
    planned: &BTreeMap<String, RecipeSpec>,
    task: &Task,
) -> Result<(bool, TaskDetail)> {
    match task {
        Task::Check {
            surface,
            ambient,
            variant,
            class_nonzero,
        } => {
            let imm = lookup(&scenario.surfaces, surface, "surface")?;
            let amb = lookup(&scenario.ambients, ambient, "ambient")?;
            let validity = validate(imm);
            if !validity.pass {
                let detail = TaskDetail::Check {
                    validity,
                    certificate: None,
                    verdict: None,
                };
                return Ok((false, detail));
            }
            let certificate = variant.map(|v| check_adjunction(imm, v)).transpose()?;
            let verdict = verdict(imm, amb, *class_nonzero)?;
            let pass = match &certificate {
                Some(c) => c.pass,
                None => verdict.outcome == Outcome::SteinAfterIsotopy,
            };
            Ok((
                pass,
                TaskDetail::Check {
                    validity,
                    certificate,
                    verdict: Some(verdict),
                },
            ))
        }
        Task::Plan { target, .. } => {
            let recipe = plan_cp2(*target)?;
            let stein = stein_condition(recipe.expected())?;
            Ok((
                stein.pass,
                TaskDetail::Plan {
                    recipe: recipe.into(),
                    stein,
                },
            ))
        }
        Task::Replay { recipe } => {
            let spec = match recipe {
                RecipeRef::Inline(spec) => spec,
                RecipeRef::Named(name) => planned
                    .get(name)
                    .or_else(|| scenario.recipes.get(name))
                    .ok_or_else(|| Error::InvalidInput(format!("unknown recipe `{name}`")))?,
            };
            replay_spec(spec)
        }
        Task::VerifyLocal { suite, params } => {
            let SuiteReport {
                suite,
                pass,
                checks,
            } = verify_local(*suite, params)?;
            Ok((pass, TaskDetail::VerifyLocal { suite, checks }))
        }
    }
}

fn replay_spec(spec: &RecipeSpec) -> Result<(bool, TaskDetail)> {
    let trace = replay_traced(&spec.base, &spec.steps)?;
    let result = *trace.result();
    if let Some(expected) = spec.expected {
        if expected != result {
            return Err(Error::Mismatch(format!(
                "recipe replays to {result}, expected {expected}"
            )));
        }
    }
    let index = lai(&result).ok();
    let stein = stein_condition(&result).ok();
    Ok((
        true,
        TaskDetail::Replay {
            result,
            exceptional_spheres: trace.exceptional_spheres,
            index,
            stein,
        },
    ))
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, what: &str) -> Result<&'a T> {
    map.get(name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown {what} `{name}`")))
}

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports contain only finite data and string keys")
}

struct WitnessLine<'a>(&'a Witness);

impl fmt::Display for WitnessLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Witness::Sample {
                point,
                value,
                label,
            } => {
                let coords: Vec<String> = point.iter().map(|c| format!("{c:.4}")).collect();
                let label = label.as_deref().unwrap_or("value");
                write!(f, "{label} = {value:.6e} at ({})", coords.join(", "))
            }
            Witness::Relation {
                relation,
                lhs,
                rhs,
                holds,
            } => write!(
                f,
                "{relation}: {lhs} vs {rhs} ({})",
                if *holds { "holds" } else { "fails" }
            ),
            Witness::Note { note } => f.write_str(note),
        }
    }
}

fn cert_lines(out: &mut String, name: &str, cert: &Certificate) {
    let mark = if cert.pass { "ok" } else { "FAIL" };
    let _ = writeln!(out, "    {name} [{}] {mark}", cert.rule);
    for w in &cert.witnesses {
        let _ = writeln!(out, "      {}", WitnessLine(w));
    }
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    for t in &report.tasks {
        let mark = if t.pass { "PASS" } else { "FAIL" };
        let _ = write!(out, "task {} {} {}: {mark}", t.index, t.task, t.label);
        if let Some(ms) = t.elapsed_ms {
            let _ = write!(out, " ({ms:.1} ms)");
        }
        out.push('\n');
        if let Some(e) = &t.error {
            let _ = writeln!(out, "    error: {e}");
        }
        match &t.detail {
            TaskDetail::Check {
                validity,
                certificate,
                verdict,
            } => {
                if !validity.pass {
                    cert_lines(&mut out, "validity", validity);
                }
                if let Some(c) = certificate {
                    cert_lines(&mut out, "adjunction", c);
                }
                if let Some(v) = verdict {
                    let _ = writeln!(out, "    verdict: {:?} by {}", v.outcome, v.rule);
                    if let Some(h) = &v.unresolved {
                        let _ = writeln!(out, "      unresolved: {h}");
                    }
                }
            }
            TaskDetail::Plan { recipe, stein } => {
                let _ = writeln!(out, "    base: {}", recipe.base);
                for (i, step) in recipe.steps.iter().enumerate() {
                    let _ = writeln!(out, "    {:>3}. {}", i + 1, step.name());
                }
                if let Some(e) = &recipe.expected {
                    let _ = writeln!(out, "    result: {e}");
                }
                cert_lines(&mut out, "result", stein);
            }
            TaskDetail::Replay {
                result,
                exceptional_spheres,
                index,
                ..
            } => {
                let _ = writeln!(out, "    result: {result}");
                if *exceptional_spheres > 0 {
                    let _ = writeln!(out, "    exceptional spheres: {exceptional_spheres}");
                }
                match index {
                    Some(IndexReport {
                        positive: Some(p),
                        negative: Some(n),
                        ..
                    }) => {
                        let _ = writeln!(out, "    index: I+ = {p}, I- = {n}");
                    }
                    Some(ix) => {
                        let _ = writeln!(out, "    index: I = {}", ix.total);
                    }
                    None => {}
                }
            }
            TaskDetail::VerifyLocal { checks, .. } => {
                for c in checks {
                    cert_lines(&mut out, &c.name, &c.certificate);
                }
            }
            TaskDetail::None {} => {}
        }
    }
    let failed = report.tasks.iter().filter(|t| !t.pass).count();
    let _ = write!(
        out,
        "overall: {} ({failed} of {} tasks failed)",
        if report.pass { "PASS" } else { "FAIL" },
        report.tasks.len()
    );
    if let Some(ms) = report.elapsed_ms {
        let _ = write!(out, " in {ms:.1} ms");
    }
    out.push('\n');
    out
}
