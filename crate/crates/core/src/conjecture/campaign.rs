//! Campaigns: generate instances, check them globally, re-verify violations.

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;

use super::generate::gen_instance;
use super::global::{global_adk_check, Target};
use super::{GenConfig, GraphKind};
use crate::diffusion::{exact_spread_many, spread_table, GtInstance, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::{bits, difference, submasks, AdkWitness, Order};

/// Regression campaigns cover proved cases; search campaigns cover the open one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Regression,
    Search,
}

impl Mode {
    /// Search iff general graphs with `3 ≤ k ≤ n−1`.
    pub fn of(cfg: &GenConfig) -> Mode {
        match (cfg.graph_kind, cfg.k) {
            (GraphKind::General, Order::Finite(k)) if k >= 3 && k < cfg.n => Mode::Search,
            _ => Mode::Regression,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Regression => "regression",
            Mode::Search => "search",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceStatus {
    Pass,
    Violation {
        target: Target,
        witness: AdkWitness,
        /// Same difference recomputed on a relabelled copy of the instance.
        permuted_agrees: bool,
        /// Same difference recomputed by breakpoint enumeration; `None` if over budget.
        breakpoint_agrees: Option<bool>,
    },
    /// Exact oracle refused the instance.
    Budget(String),
    /// Threshold generator exhausted its draws.
    Generator(String),
}

impl InstanceStatus {
    /// Reproduced by both independent recomputations.
    pub fn confirmed_violation(&self) -> bool {
        matches!(
            self,
            InstanceStatus::Violation {
                permuted_agrees: true,
                breakpoint_agrees: Some(true),
                ..
            }
        )
    }

    /// Reproduced on the relabelled instance; breakpoint recomputation over budget.
    pub fn unverified_violation(&self) -> bool {
        matches!(
            self,
            InstanceStatus::Violation {
                permuted_agrees: true,
                breakpoint_agrees: None,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRecord {
    pub index: u64,
    pub nodes: usize,
    pub edges: usize,
    pub status: InstanceStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    AllPass,
    /// Confirmed violation of a proved case.
    Violation,
    /// Confirmed violation in the open range.
    Counterexample,
    /// A violation the breakpoint oracle could not recheck within budget.
    Unverified,
    /// A violation that an independent recomputation did not reproduce.
    Inconsistent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AllPass => "all-pass",
            Verdict::Violation => "violation",
            Verdict::Counterexample => "counterexample",
            Verdict::Unverified => "unverified",
            Verdict::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub index: u64,
    pub instance: GtInstance,
    pub target: Target,
    pub witness: AdkWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureReport {
    pub config: GenConfig,
    pub mode: Mode,
    pub records: Vec<InstanceRecord>,
    pub counterexample: Option<Counterexample>,
}

impl ConjectureReport {
    /// Instances that reached a verdict.
    pub fn instances_checked(&self) -> usize {
        self.count(|s| matches!(s, InstanceStatus::Pass | InstanceStatus::Violation { .. }))
    }

    pub fn count(&self, pred: impl Fn(&InstanceStatus) -> bool) -> usize {
        self.records.iter().filter(|r| pred(&r.status)).count()
    }

    pub fn verdict(&self) -> Verdict {
        if self.records.iter().any(|r| r.status.confirmed_violation()) {
            return match self.mode {
                Mode::Regression => Verdict::Violation,
                Mode::Search => Verdict::Counterexample,
            };
        }
        if self.records.iter().any(|r| r.status.unverified_violation()) {
            return Verdict::Unverified;
        }
        if self.count(|s| matches!(s, InstanceStatus::Violation { .. })) > 0 {
            return Verdict::Inconsistent;
        }
        Verdict::AllPass
    }
}

fn agreement(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "agree",
        Some(false) => "disagree",
        None => "skipped",
    }
}

impl fmt::Display for ConjectureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "campaign {} instances={} mode={}",
            self.config,
            self.records.len(),
            self.mode
        )?;
        for r in &self.records {
            write!(
                f,
                "instance index={} nodes={} edges={} ",
                r.index, r.nodes, r.edges
            )?;
            match &r.status {
                InstanceStatus::Pass => writeln!(f, "status=pass")?,
                InstanceStatus::Violation {
                    target,
                    witness,
                    permuted_agrees,
                    breakpoint_agrees,
                } => writeln!(
                    f,
                    "status=violation target={target} s={:#b} a={:#b} value={} permuted={} breakpoint={}",
                    witness.s,
                    witness.a,
                    rational::format(&witness.value),
                    agreement(Some(*permuted_agrees)),
                    agreement(*breakpoint_agrees)
                )?,
                InstanceStatus::Budget(msg) => writeln!(f, "status=budget detail={msg:?}")?,
                InstanceStatus::Generator(msg) => writeln!(f, "status=generator detail={msg:?}")?,
            }
        }
        writeln!(
            f,
            "summary checked={} passed={} violations={} budget={} generator={} verdict={}",
            self.instances_checked(),
            self.count(|s| *s == InstanceStatus::Pass),
            self.count(|s| matches!(s, InstanceStatus::Violation { .. })),
            self.count(|s| matches!(s, InstanceStatus::Budget(_))),
            self.count(|s| matches!(s, InstanceStatus::Generator(_))),
            self.verdict()
        )?;
        if let Some(c) = &self.counterexample {
            writeln!(
                f,
                "counterexample index={} target={} s={:#b} a={:#b} value={}",
                c.index,
                c.target,
                c.witness.s,
                c.witness.a,
                rational::format(&c.witness.value)
            )?;
            writeln!(f, "begin-instance")?;
            f.write_str(&crate::cli::serialize_gt(&c.instance))?;
            writeln!(f, "end-instance")?;
        }
        Ok(())
    }
}

/// Regenerates instance `index` of a campaign.
pub fn replay_instance(cfg: &GenConfig, index: u64) -> Result<GtInstance> {
    Ok(gen_instance(cfg, index)?.0)
}

/// `Δ_A` of the target at `S`, recomputed on the instance relabelled by `v ↦ n−1−v`.
fn permuted_difference(
    inst: &GtInstance,
    target: Target,
    witness: &AdkWitness,
    budget: u128,
) -> Result<Rational> {
    let n = inst.n();
    let perm: Vec<usize> = (0..n).map(|v| n - 1 - v).collect();
    let relabel = |m: u32| bits(m as u64).fold(0u32, |acc, v| acc | 1 << perm[v]);
    let image = inst.permuted(&perm)?;
    let table = spread_table(&image, budget)?;
    let target = match target {
        Target::Sigma => Target::Sigma,
        Target::Node(v) => Target::Node(perm[v]),
    };
    let f = target.function(&table, &image)?;
    Ok(difference(&f, relabel(witness.a), relabel(witness.s)))
}

/// `Δ_A` of the target at `S` from breakpoint enumeration; `None` if over budget.
fn breakpoint_difference(
    inst: &GtInstance,
    target: Target,
    witness: &AdkWitness,
) -> Result<Option<Rational>> {
    let a = witness.a as u64;
    let s = witness.s as u64;
    let subsets: Vec<u64> = submasks(a).collect();
    let seeds: Vec<u64> = subsets.iter().map(|c| s | c).collect();
    let spreads = match exact_spread_many(inst, &seeds, DEFAULT_BUDGET) {
        Ok(x) => x,
        Err(e) if e.is_budget() => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut total = Rational::zero();
    for (c, e) in subsets.iter().zip(&spreads) {
        let value = match target {
            Target::Sigma => &e.sigma,
            Target::Node(v) => &e.per_node[v],
        };
        if (a.count_ones() - c.count_ones()).is_multiple_of(2) {
            total += value;
        } else {
            total -= value;
        }
    }
    Ok(Some(total))
}

fn check_instance(cfg: &GenConfig, index: u64, budget: u128) -> Result<(InstanceRecord, Option<GtInstance>)> {
    let inst = match gen_instance(cfg, index) {
        Ok((inst, _)) => inst,
        Err(e @ Error::RejectionBudget(_)) => {
            return Ok((
                InstanceRecord {
                    index,
                    nodes: cfg.n,
                    edges: 0,
                    status: InstanceStatus::Generator(e.to_string()),
                },
                None,
            ))
        }
        Err(e) => return Err(e),
    };
    let mut record = InstanceRecord {
        index,
        nodes: inst.n(),
        edges: inst.graph().edges().len(),
        status: InstanceStatus::Pass,
    };
    let report = match global_adk_check(&inst, cfg.k, budget) {
        Ok(r) => r,
        Err(e) if e.is_budget() => {
            record.status = InstanceStatus::Budget(e.to_string());
            return Ok((record, None));
        }
        Err(e) => return Err(e),
    };
    let Some((target, witness)) = report.first_violation() else {
        return Ok((record, None));
    };
    let permuted = permuted_difference(&inst, target, witness, budget)?;
    let breakpoint = breakpoint_difference(&inst, target, witness)?;
    record.status = InstanceStatus::Violation {
        target,
        witness: witness.clone(),
        permuted_agrees: permuted == witness.value,
        breakpoint_agrees: breakpoint.map(|b| b == witness.value),
    };
    Ok((record, Some(inst)))
}

/// Generates `instances` instances from `cfg` and checks each for global AD-k.
///
/// Instances run in parallel; records come back in index order, so the report
/// depends only on the configuration.
pub fn run_campaign(cfg: &GenConfig, instances: u64, budget: u128) -> Result<ConjectureReport> {
    cfg.validate()?;
    let results = (0..instances)
        .into_par_iter()
        .map(|i| check_instance(cfg, i, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut counterexample = None;
    let mut records = Vec::with_capacity(results.len());
    for (record, inst) in results {
        if counterexample.is_none() && record.status.confirmed_violation() {
            if let (Some(instance), InstanceStatus::Violation { target, witness, .. }) =
                (inst, &record.status)
            {
                counterexample = Some(Counterexample {
                    index: record.index,
                    instance,
                    target: *target,
                    witness: witness.clone(),
                });
            }
        }
        records.push(record);
    }
    Ok(ConjectureReport {
        config: cfg.clone(),
        mode: Mode::of(cfg),
        records,
        counterexample,
    })
}
