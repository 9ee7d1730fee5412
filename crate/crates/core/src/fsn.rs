//! Journal entries to a financial statements network, and from there to a
//! many-valued context of signed account shares per business process.

use std::io::Read;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scaling::ManyValuedContext;
use crate::weight::{parse_decimal, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct JournalEntry {
    pub id: i64,
    pub tid: String,
    pub account: String,
    /// Negative when credited, positive when debited.
    pub value: BigRational,
}

impl JournalEntry {
    pub fn new(id: i64, tid: impl Into<String>, account: impl Into<String>, value: BigRational) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroEntry { id });
        }
        Ok(JournalEntry {
            id,
            tid: tid.into(),
            account: normalize_account(&account.into()),
            value,
        })
    }
}

/// Collapses runs of whitespace and trims, so `"other  expenses "` and
/// `"other expenses"` name the same account.
pub fn normalize_account(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Deserialize)]
struct JournalRow {
    id: i64,
    tid: String,
    account: String,
    value: String,
}

/// Reads a journal CSV with header `id,tid,account,value`.
pub fn read_journal<R: Read>(reader: R) -> Result<Vec<JournalEntry>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut entries = Vec::new();
    for row in rdr.deserialize::<JournalRow>() {
        let row = row?;
        let value = parse_decimal(&row.value)
            .ok_or_else(|| Error::Parse(format!("entry {}: not a decimal: {:?}", row.id, row.value)))?;
        entries.push(JournalEntry::new(row.id, row.tid, row.account, value)?);
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusinessProcess {
    pub tid: String,
    /// Credited accounts with positive amounts, in first-appearance order.
    pub credited: Vec<(String, BigRational)>,
    /// Debited accounts with positive amounts, in first-appearance order.
    pub debited: Vec<(String, BigRational)>,
    /// Every account touched, in journal order.
    pub accounts: Vec<String>,
}

fn accumulate(side: &mut Vec<(String, BigRational)>, account: &str, amount: BigRational) {
    match side.iter_mut().find(|(a, _)| a == account) {
        Some((_, total)) => *total += amount,
        None => side.push((account.to_string(), amount)),
    }
}

fn side_total(side: &[(String, BigRational)]) -> BigRational {
    side.iter().fold(BigRational::zero(), |acc, (_, v)| acc + v)
}

impl BusinessProcess {
    pub fn total_credited(&self) -> BigRational {
        side_total(&self.credited)
    }

    pub fn total_debited(&self) -> BigRational {
        side_total(&self.debited)
    }

    /// Signed shares: `-amount/total_credited` for credited accounts and
    /// `+amount/total_debited` for debited ones. An account on both sides
    /// gets the sum of its two shares.
    pub fn shares(&self) -> Vec<(String, BigRational)> {
        let credited = self.total_credited();
        let debited = self.total_debited();
        let mut out: Vec<(String, BigRational)> = Vec::new();
        for (account, amount) in &self.credited {
            accumulate(&mut out, account, -(amount / &credited));
        }
        for (account, amount) in &self.debited {
            accumulate(&mut out, account, amount / &debited);
        }
        out
    }
}

/// One process per distinct tid, in order of first appearance.
pub fn group_by_tid(entries: &[JournalEntry]) -> Result<Vec<BusinessProcess>> {
    if entries.is_empty() {
        return Err(Error::Empty("journal"));
    }
    let mut processes: Vec<BusinessProcess> = Vec::new();
    for e in entries {
        let idx = match processes.iter().position(|p| p.tid == e.tid) {
            Some(i) => i,
            None => {
                processes.push(BusinessProcess {
                    tid: e.tid.clone(),
                    credited: Vec::new(),
                    debited: Vec::new(),
                    accounts: Vec::new(),
                });
                processes.len() - 1
            }
        };
        let p = &mut processes[idx];
        if !p.accounts.contains(&e.account) {
            p.accounts.push(e.account.clone());
        }
        if e.value.is_negative() {
            accumulate(&mut p.credited, &e.account, -e.value.clone());
        } else {
            accumulate(&mut p.debited, &e.account, e.value.clone());
        }
    }
    for p in &processes {
        if p.credited.is_empty() {
            return Err(Error::OneSidedProcess {
                tid: p.tid.clone(),
                side: "credit",
            });
        }
        if p.debited.is_empty() {
            return Err(Error::OneSidedProcess {
                tid: p.tid.clone(),
                side: "debit",
            });
        }
        if p.total_credited() != p.total_debited() {
            log::warn!(
                "process {} is unbalanced: credited {}, debited {}",
                p.tid,
                p.total_credited(),
                p.total_debited()
            );
        }
    }
    Ok(processes)
}

pub fn compute_shares(bp: &BusinessProcess) -> Vec<(String, BigRational)> {
    bp.shares()
}

/// Exact share table: objects `a<tid>`, accounts in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable {
    pub objects: Vec<String>,
    pub features: Vec<String>,
    pub values: Vec<Vec<BigRational>>,
}

pub fn share_table(processes: &[BusinessProcess]) -> Result<ShareTable> {
    if processes.is_empty() {
        return Err(Error::Empty("process list"));
    }
    let shares: Vec<Vec<(String, BigRational)>> = processes.iter().map(compute_shares).collect();
    let mut order: Vec<String> = Vec::new();
    for a in processes.iter().flat_map(|p| &p.accounts) {
        if !order.contains(a) {
            order.push(a.clone());
        }
    }
    let values = shares
        .iter()
        .map(|row| {
            order
                .iter()
                .map(|f| {
                    row.iter()
                        .find(|(a, _)| a == f)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(BigRational::zero)
                })
                .collect()
        })
        .collect();
    Ok(ShareTable {
        objects: processes.iter().map(|p| format!("a{}", p.tid)).collect(),
        features: order,
        values,
    })
}

pub fn to_mv_context(processes: &[BusinessProcess]) -> Result<ManyValuedContext> {
    let table = share_table(processes)?;
    let values = table
        .values
        .iter()
        .map(|row| row.iter().map(Weight::to_f64).collect())
        .collect();
    ManyValuedContext::new(table.objects, table.features, values)
}

/// Groups, shares and converts in one step.
pub fn ingest(entries: &[JournalEntry]) -> Result<ManyValuedContext> {
    to_mv_context(&group_by_tid(entries)?)
}
