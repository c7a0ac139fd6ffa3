use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::leakage::{exact_mutual_information, LeakageReport};
use super::posterior::Prior;
use crate::actions::{
    check_conditions, fixed_line_embedding, ActionInstance, ConditionReport, InstanceDescriptor, InstanceKind,
    DEFAULT_WORK_CAP,
};
use crate::algebra::{commutator_subgroup, enumerate_gl2, subgroup_closure, Mat2, DEFAULT_PRIME_CAP};
use crate::error::{Error, Result};
use crate::protocol::roundtrip_success_iff_comm_fixed;

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub p: u32,
    pub max_generators: usize,
    /// Per-instance bound on joint-enumeration work.
    pub work_cap: u64,
    #[serde(skip)]
    pub prime_cap: u32,
}

impl SearchConfig {
    pub fn new(p: u32, max_generators: usize) -> Self {
        SearchConfig {
            p,
            max_generators,
            work_cap: DEFAULT_WORK_CAP,
            prime_cap: DEFAULT_PRIME_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    FullPlane,
    CommFixedEmbedded,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceOutcome {
    pub instance: String,
    pub variant: Variant,
    pub descriptor: InstanceDescriptor,
    pub secret_count: usize,
    /// Masking coverage, transcript equivalence, comm-fixed set, then the
    /// round-trip/comm-fixed agreement check.
    pub conditions: Vec<ConditionReport>,
    pub leakage: Option<LeakageReport>,
    /// `zero_leakage` agrees with the transcript-equivalence verdict.
    pub leakage_agrees: Option<bool>,
    /// Rebuilt from its descriptor and re-checked: identical verdicts and
    /// counterexamples, every counterexample confirmed by direct evaluation.
    pub revalidated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl InstanceOutcome {
    fn all_pass(&self) -> bool {
        !self.conditions.is_empty()
            && self.conditions.iter().all(ConditionReport::passed)
            && self.leakage.as_ref().is_some_and(|l| l.zero_leakage)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupEntry {
    pub index: usize,
    pub order: usize,
    pub abelian: bool,
    pub commutator_order: usize,
    /// The first generator set, in enumeration order, whose closure is this
    /// subgroup.
    pub generators: Vec<Mat2>,
    pub instances: Vec<InstanceOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub p: u32,
    pub max_generators: usize,
    pub work_cap: u64,
    pub generator_sets: u64,
    pub subgroups: Vec<SubgroupEntry>,
    /// Names of instances passing every check with `|S| > 1`.
    pub candidates: Vec<String>,
    /// Every instance was analysed within the cap.
    pub complete: bool,
}

impl SearchReport {
    pub fn instances(&self) -> impl Iterator<Item = &InstanceOutcome> {
        self.subgroups.iter().flat_map(|s| s.instances.iter())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn analyse(instance: &ActionInstance, cap: u64) -> Result<(Vec<ConditionReport>, LeakageReport)> {
    let mut conditions = check_conditions(instance, cap)?;
    conditions.push(roundtrip_success_iff_comm_fixed(instance, cap)?);
    let leakage = exact_mutual_information(instance, &Prior::uniform(instance), cap)?;
    Ok((conditions, leakage))
}

fn examine(instance: ActionInstance, variant: Variant, config: &SearchConfig) -> Result<InstanceOutcome> {
    let mut outcome = InstanceOutcome {
        instance: instance.name().to_string(),
        variant,
        descriptor: instance.descriptor().clone(),
        secret_count: instance.secrets().len(),
        conditions: Vec::new(),
        leakage: None,
        leakage_agrees: None,
        revalidated: false,
        skipped: None,
    };
    let (conditions, leakage) = match analyse(&instance, config.work_cap) {
        Ok(r) => r,
        Err(e @ Error::CapExceeded { .. }) => {
            outcome.skipped = Some(e.to_string());
            return Ok(outcome);
        }
        Err(e) => return Err(e),
    };
    let te = conditions[1].passed();

    let rebuilt = outcome.descriptor.build_with_cap(config.prime_cap)?;
    let (again, again_leak) = analyse(&rebuilt, config.work_cap)?;
    let mut revalidated = again == conditions && again_leak.zero_leakage == leakage.zero_leakage;
    for report in &conditions {
        revalidated &= report.revalidate(&rebuilt)?;
    }

    outcome.leakage_agrees = Some(leakage.zero_leakage == te);
    outcome.conditions = conditions;
    outcome.leakage = Some(leakage);
    outcome.revalidated = revalidated;
    Ok(outcome)
}

/// Bounded search for an instance on which the three-pass exchange both
/// round-trips and leaks nothing.
///
/// Closes every generator subset of `GL₂(F_p)` of size at most
/// `max_generators` (the empty set gives `{I}`), deduplicates closures by
/// element set, and for each subgroup examines the full-plane instance plus,
/// for non-abelian groups whose commutator subgroup fixes some nonzero
/// point, the embedded variant on those fixed points.
pub fn search_instances(config: &SearchConfig) -> Result<SearchReport> {
    let gl = enumerate_gl2(config.p, config.prime_cap)?;
    let n = gl.len();
    let sets: Vec<Vec<usize>> = (0..=config.max_generators.min(n))
        .flat_map(|k| combinations(n, k))
        .collect();
    let closures: Vec<Vec<usize>> = sets
        .par_iter()
        .map(|set| {
            let gens: Vec<Mat2> = if set.is_empty() {
                vec![Mat2::identity(gl.domain())]
            } else {
                set.iter().map(|&i| gl.element(i).clone()).collect()
            };
            let h = subgroup_closure(&gens)?;
            let mut key: Vec<usize> = h
                .elements()
                .iter()
                .map(|m| gl.index_of(m).expect("closure stays in GL2"))
                .collect();
            key.sort_unstable();
            Ok(key)
        })
        .collect::<Result<_>>()?;

    // First generator set per distinct element set, in enumeration order.
    let mut distinct: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (i, key) in closures.into_iter().enumerate() {
        distinct.entry(key).or_insert(i);
    }
    let mut groups: Vec<(Vec<usize>, usize)> = distinct.into_iter().collect();
    groups.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));

    let subgroups: Vec<SubgroupEntry> = groups
        .par_iter()
        .enumerate()
        .map(|(index, (elements, first_set))| {
            let gens: Vec<Mat2> = if sets[*first_set].is_empty() {
                vec![Mat2::identity(gl.domain())]
            } else {
                sets[*first_set].iter().map(|&i| gl.element(i).clone()).collect()
            };
            let group = subgroup_closure(&gens)?;
            let comm = commutator_subgroup(&group)?;
            let base = format!("subgroup-{index}-p{}", config.p);
            let full = InstanceDescriptor::new(InstanceKind::Custom, config.p)
                .with_name(base.clone())
                .with_generators(&gens)
                .build_with_cap(config.prime_cap)?;
            let mut instances = vec![examine(full, Variant::FullPlane, config)?];
            if !comm.is_trivial() {
                if let Ok((secrets, embedding)) = fixed_line_embedding(&group, None) {
                    let embedded = InstanceDescriptor::new(InstanceKind::Custom, config.p)
                        .with_name(format!("{base}-embedded"))
                        .with_generators(&gens)
                        .with_secret_domain(&secrets)
                        .with_embedding(&embedding)
                        .build_with_cap(config.prime_cap)?;
                    instances.push(examine(embedded, Variant::CommFixedEmbedded, config)?);
                }
            }
            Ok(SubgroupEntry {
                index,
                order: elements.len(),
                abelian: group.is_abelian(),
                commutator_order: comm.len(),
                generators: gens,
                instances,
            })
        })
        .collect::<Result<_>>()?;

    let mut candidates = Vec::new();
    let mut complete = true;
    for outcome in subgroups.iter().flat_map(|s| s.instances.iter()) {
        complete &= outcome.skipped.is_none();
        if outcome.secret_count > 1 && outcome.all_pass() {
            assert!(
                outcome.revalidated,
                "{}: candidate failed revalidation",
                outcome.instance
            );
            candidates.push(outcome.instance.clone());
        }
    }
    Ok(SearchReport {
        p: config.p,
        max_generators: config.max_generators,
        work_cap: config.work_cap,
        generator_sets: sets.len() as u64,
        subgroups,
        candidates,
        complete,
    })
}
