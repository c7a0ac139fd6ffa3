use rayon::prelude::*;

use crate::actions::{
    check_comm_fixed_set, ensure_within_cap, ActionInstance, ConditionId, ConditionReport, Counterexample,
};
use crate::error::Result;

/// Compares "every session on the (embedded) `S²` round-trips, for all
/// `A, B ∈ G`" against "`S²` is comm-fixed". Pass iff the two agree; both
/// truth values are recorded as facts.
pub fn roundtrip_success_iff_comm_fixed(instance: &ActionInstance, cap: u64) -> Result<ConditionReport> {
    let table = instance.table()?;
    let ng = table.group_len() as u64;
    let work = (table.encodings().len() as u64).saturating_mul(ng * ng);
    ensure_within_cap(work, cap)?;

    let first_failure = table.encodings().par_iter().find_map_first(|e| {
        (0..table.group_len()).find_map(|a| {
            (0..table.group_len()).find_map(|b| {
                let v4 = table.final_point(e.point, a, b);
                (v4 != e.point).then_some((e.point, a, b, v4))
            })
        })
    });
    let all_succeed = first_failure.is_none();
    let comm = check_comm_fixed_set(instance)?;
    let comm_fixed = comm.passed();

    let group = instance.finite_group()?;
    let cx = match (all_succeed, comm_fixed) {
        (false, true) => first_failure.map(|(v, a, b, v4)| Counterexample::Session {
            v: table.point(v),
            a: group.element(a).clone(),
            b: group.element(b).clone(),
            v4: table.point(v4),
        }),
        (true, false) => comm.counterexample.clone(),
        _ => None,
    };
    let mut report = ConditionReport::new(instance.name(), ConditionId::RoundtripCommFixed, cx, work + comm.work);
    report.facts.insert("all_sessions_succeed".into(), all_succeed);
    report.facts.insert("comm_fixed".into(), comm_fixed);
    Ok(report)
}
