//! Check records and the machine-readable run report.
//!
//! Every pipeline stage reduces to records of the same shape: a measured
//! number, the bound it must respect, and the direction of that comparison.
//! The report is written through the canonical JSON writer, so reruns with
//! the same configuration are byte-identical.

use std::collections::BTreeMap;

use serde::Serialize;
use whlab_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// the measurement ran but did not settle; never counts as a pass
    Inconclusive,
}

impl Status {
    pub fn word(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Relation {
    fn holds(self, measured: f64, bound: f64) -> bool {
        // NaN fails either way
        match self {
            Relation::AtMost => measured <= bound,
            Relation::AtLeast => measured >= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// the claim this record verifies, stated as a property
    pub anchor: String,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub status: Status,
    pub note: String,
}

impl CheckRecord {
    pub fn new(
        name: &str,
        anchor: &str,
        measured: f64,
        bound: f64,
        relation: Relation,
        note: String,
    ) -> CheckRecord {
        let status = if relation.holds(measured, bound) {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            measured,
            bound,
            relation,
            status,
            note,
        }
    }

    /// for verdicts decided elsewhere (three-way outcomes, composite flags)
    pub fn with_status(
        name: &str,
        anchor: &str,
        status: Status,
        measured: f64,
        bound: f64,
        relation: Relation,
        note: String,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            measured,
            bound,
            relation,
            status,
            note,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub package: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    /// file names relative to the run directory
    pub artifacts: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub counts: Counts,
    pub overall: Status,
}

pub fn finalize(
    command: &str,
    config: BTreeMap<String, String>,
    checks: Vec<CheckRecord>,
    artifacts: Vec<String>,
) -> Result<VerificationReport> {
    if checks.is_empty() {
        return Err(Error::InvalidArgument(
            "a verification report needs at least one check".into(),
        ));
    }
    let counts = Counts {
        pass: checks.iter().filter(|c| c.status == Status::Pass).count(),
        fail: checks.iter().filter(|c| c.status == Status::Fail).count(),
        inconclusive: checks
            .iter()
            .filter(|c| c.status == Status::Inconclusive)
            .count(),
    };
    // a fail is a fail no matter how many probes merely failed to settle
    let overall = if counts.fail > 0 {
        Status::Fail
    } else if counts.inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    Ok(VerificationReport {
        command: command.into(),
        package: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config,
        artifacts,
        checks,
        counts,
        overall,
    })
}

pub fn exit_code(overall: Status) -> i32 {
    match overall {
        Status::Pass => 0,
        Status::Fail => 2,
        Status::Inconclusive => 3,
    }
}
