//! Text and JSON rendering.

use std::fmt;

use clap::ValueEnum;
use fibpairs::corpus::{self, CorpusEntry, Mode, RunReport, Status};
use fibpairs::expr::GridRanges;
use fibpairs::pairs::{CertifyReport, PairSpec, Params};
use fibpairs::Identity;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub struct Printer {
    format: Format,
}

#[derive(Serialize)]
struct IdentityRecord {
    label: String,
    lhs: String,
    rhs: String,
    variables: Vec<String>,
    constraints: Vec<String>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Params>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl IdentityRecord {
    fn new(id: &Identity, status: &Status) -> Self {
        let (witness, detail) = match status {
            Status::Failed { witness, .. } => (witness.clone(), Some(status.to_string())),
            Status::Error(msg) => (None, Some(msg.clone())),
            _ => (None, None),
        };
        Self {
            label: id.label.clone(),
            lhs: id.lhs.to_string(),
            rhs: id.rhs.to_string(),
            variables: id.variables.clone(),
            constraints: id.constraints.iter().map(|c| c.to_string()).collect(),
            status: status.name().to_string(),
            witness,
            detail,
        }
    }
}

#[derive(Serialize)]
struct PairRecord {
    name: String,
    rank: usize,
    params: Params,
    scale: String,
    w: String,
    x: String,
    det_w: String,
    det_x: String,
    singular: bool,
    char_poly: String,
    w_template: Option<String>,
    xw_template: Option<String>,
}

impl PairRecord {
    fn new(p: &PairSpec) -> Self {
        Self {
            name: p.name.clone(),
            rank: p.rank,
            params: p.params.clone(),
            scale: p.scale.to_string(),
            w: p.w.to_string(),
            x: p.x.to_string(),
            det_w: p.det_w.to_string(),
            det_x: p.det_x.to_string(),
            singular: p.singular_w,
            char_poly: p.char_poly.to_string(),
            w_template: p.w_template.as_ref().map(|t| t.to_string()),
            xw_template: p.xw_template.as_ref().map(|t| t.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CertifyRecord {
    pair: String,
    params: Params,
    exponents_checked: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

fn params_text(p: &Params) -> String {
    if p.is_empty() {
        return String::new();
    }
    let kv: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(" ({})", kv.join(", "))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

impl Printer {
    pub fn new(format: Format) -> Self {
        Self { format }
    }

    pub fn pair_list(&self, specs: &[PairSpec]) {
        match self.format {
            Format::Json => print_json(&specs.iter().map(PairRecord::new).collect::<Vec<_>>()),
            Format::Text => {
                for p in specs {
                    let kind = if p.singular_w { ", singular" } else { "" };
                    println!("{:<12} rank {}{}{kind}", p.name, p.rank, params_text(&p.params));
                }
            }
        }
    }

    pub fn pair_show(&self, p: &PairSpec) {
        let r = PairRecord::new(p);
        match self.format {
            Format::Json => print_json(&r),
            Format::Text => {
                println!("pair:       {}{}", r.name, params_text(&r.params));
                println!("rank:       {}", r.rank);
                println!("w:          {}", r.w);
                println!("x:          {}", r.x);
                println!("det w:      {}{}", r.det_w, if r.singular { " (singular)" } else { "" });
                println!("det x:      {}", r.det_x);
                println!("char poly:  {}", r.char_poly);
                println!("scale:      {}", r.scale);
                let block = |t: &Option<String>| {
                    t.as_deref()
                        .map_or("(none)".to_string(), |t| t.replace('\n', "\n            "))
                };
                println!("w^n:        {}", block(&r.w_template));
                println!("x w^n:      {}", block(&r.xw_template));
            }
        }
    }

    pub fn certify(&self, reports: &[CertifyReport]) {
        let records: Vec<CertifyRecord> = reports
            .iter()
            .map(|r| CertifyRecord {
                pair: r.pair.clone(),
                params: r.params.clone(),
                exponents_checked: r.exponents_checked,
                passed: r.passed(),
                failure: r.failure.as_ref().map(|f| f.to_string()),
            })
            .collect();
        match self.format {
            Format::Json => print_json(&records),
            Format::Text => {
                for r in &records {
                    let head = format!("{}{}", r.pair, params_text(&r.params));
                    match &r.failure {
                        None => println!("ok    {head}: {} exponents", r.exponents_checked),
                        Some(f) => println!("FAIL  {head}: {f}"),
                    }
                }
            }
        }
    }

    /// Checks and prints generated identities; true when all hold.
    pub fn identities(&self, ids: &[Identity]) -> bool {
        let statuses: Vec<Status> = ids
            .iter()
            .map(|id| corpus::check(id, Mode::Auto, &GridRanges::new()))
            .collect();
        match self.format {
            Format::Json => print_json(
                &ids.iter()
                    .zip(&statuses)
                    .map(|(id, s)| IdentityRecord::new(id, s))
                    .collect::<Vec<_>>(),
            ),
            Format::Text => {
                for (id, s) in ids.iter().zip(&statuses) {
                    let cons: Vec<String> = id.constraints.iter().map(|c| c.to_string()).collect();
                    let cons = if cons.is_empty() {
                        String::new()
                    } else {
                        format!("  [{}]", cons.join(", "))
                    };
                    println!("{}: {id}{cons}", id.label);
                    println!("    {s}");
                }
            }
        }
        statuses.iter().all(Status::passed)
    }

    pub fn run_report(&self, entries: &[CorpusEntry], report: &RunReport) {
        match self.format {
            Format::Json => print_json(
                &entries
                    .iter()
                    .zip(&report.entries)
                    .map(|(e, r)| IdentityRecord::new(&e.identity, &r.status))
                    .collect::<Vec<_>>(),
            ),
            Format::Text => {
                for (e, r) in entries.iter().zip(&report.entries) {
                    let mark = if r.status.passed() { "ok  " } else { "FAIL" };
                    println!("{mark}  {:<8} {} ({:.1} ms)", e.label, r.status, r.millis);
                }
                let failed = report.failures().count();
                println!(
                    "{} entries, {} failed, {:.1} ms",
                    report.entries.len(),
                    failed,
                    report.millis
                );
            }
        }
    }

    pub fn value(&self, v: &impl fmt::Display) {
        match self.format {
            Format::Json => println!("{}", serde_json::json!(v.to_string())),
            Format::Text => println!("{v}"),
        }
    }
}
