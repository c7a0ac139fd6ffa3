use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use triplepass_core::actions::{
    check_conditions, ActionInstance, ConditionReport, InstanceDescriptor, InstanceKind, Point,
};
use triplepass_core::algebra::{Domain, Mat2, Scalar};
use triplepass_core::analysis::{
    exact_mutual_information, posterior_from_transcript, quotient_attack, search_instances, LeakageReport,
    PosteriorReport, Prior, SearchConfig, SearchReport,
};
use triplepass_core::protocol::{
    read_transcripts, roundtrip_success_iff_comm_fixed, run_session, run_session_with, SecretEncoding, SessionOutcome,
    Transcript,
};

use crate::args::{AnalyzeArgs, CheckArgs, DemoArgs, InstanceArgs, RunArgs, SearchArgs};
use crate::artifact::{envelope, read_file, CliError, CliResult, ExperimentConfig, Outcome};

/// A named kind with `--p`, or a descriptor JSON file.
pub fn resolve_instance(args: &InstanceArgs) -> CliResult<ActionInstance> {
    let spec = args
        .instance
        .as_deref()
        .ok_or_else(|| CliError::Usage("--instance is required".into()))?;
    let path = Path::new(spec);
    let descriptor = if path.is_file() {
        if !args.generators.is_empty() {
            return Err(CliError::Usage(
                "--generator cannot be combined with a descriptor file".into(),
            ));
        }
        InstanceDescriptor::from_json(&read_file(path)?)?
    } else {
        let kind: InstanceKind = spec.parse()?;
        let mut d = InstanceDescriptor::new(kind, args.p);
        if !args.generators.is_empty() {
            d.generators = Some(args.generators.clone());
        }
        d
    };
    Ok(descriptor.build()?)
}

/// Rebuild a named instance from a transcript's `instance` field
/// (`kind-pN` or `rational-gl2`).
fn instance_from_name(name: &str) -> CliResult<ActionInstance> {
    if name == "rational-gl2" {
        return Ok(InstanceDescriptor::new(InstanceKind::RationalGl2, 0).build()?);
    }
    let parsed = name.rsplit_once("-p").and_then(|(kind, p)| {
        let kind: InstanceKind = kind.parse().ok()?;
        Some((kind, p.parse::<u32>().ok()?))
    });
    match parsed {
        Some((kind, p)) if kind != InstanceKind::Custom => Ok(InstanceDescriptor::new(kind, p).build()?),
        _ => Err(CliError::Usage(format!(
            "cannot rebuild instance `{name}` from its name; pass --instance"
        ))),
    }
}

fn session_rng(seed: u64, session: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(session);
    rng
}

#[derive(Serialize)]
struct DemoSession<'a> {
    instance: &'a str,
    s: &'a Scalar,
    t: &'a Scalar,
    v: &'a Point,
    #[serde(rename = "A")]
    a: &'a Mat2,
    #[serde(rename = "B")]
    b: &'a Mat2,
    v1: &'a Point,
    v2: &'a Point,
    v3: &'a Point,
    v4: &'a Point,
    success: bool,
    masks_commute: bool,
    commutator_applied: &'a Mat2,
    #[serde(skip_serializing_if = "Option::is_none")]
    v1_reachable: Option<Reach>,
}

/// Where pass 1 can land for this `v` as `A` ranges over the group.
#[derive(Serialize)]
struct Reach {
    points: usize,
    contains_zero: bool,
}

fn reach(instance: &ActionInstance, v: &Point) -> CliResult<Option<Reach>> {
    if !instance.is_finite() {
        return Ok(None);
    }
    let mut seen = std::collections::BTreeSet::new();
    for g in instance.finite_group()?.elements() {
        seen.insert(triplepass_core::actions::act(g, v)?);
    }
    Ok(Some(Reach {
        points: seen.len(),
        contains_zero: seen.iter().any(Point::is_zero),
    }))
}

fn demo_record(instance: &ActionInstance, out: &SessionOutcome) -> CliResult<(Value, String)> {
    let truth = out.transcript.truth.as_ref().expect("sessions record ground truth");
    let v = instance.encode_point(&truth.s, &truth.t)?;
    let masks_commute = truth.a.commutes_with(&truth.b)?;
    let record = DemoSession {
        instance: instance.name(),
        s: &truth.s,
        t: &truth.t,
        v: &v,
        a: &truth.a,
        b: &truth.b,
        v1: &out.transcript.v1,
        v2: &out.transcript.v2,
        v3: &out.transcript.v3,
        v4: &out.v4,
        success: out.success,
        masks_commute,
        commutator_applied: &out.commutator_applied,
        v1_reachable: reach(instance, &v)?,
    };
    let mut h = String::new();
    writeln!(h, "{}: v = {v}, A = {}, B = {}", instance.name(), truth.a, truth.b).unwrap();
    writeln!(h, "  pass 1  Alice -> Bob    v1 = {}", out.transcript.v1).unwrap();
    writeln!(h, "  pass 2  Bob -> Alice    v2 = {}", out.transcript.v2).unwrap();
    writeln!(h, "  pass 3  Alice -> Bob    v3 = {}", out.transcript.v3).unwrap();
    writeln!(h, "  Bob unmasks             v4 = {}", out.v4).unwrap();
    writeln!(h, "  A·B·A⁻¹·B⁻¹ = {}", out.commutator_applied).unwrap();
    if let Some(r) = &record.v1_reachable {
        writeln!(
            h,
            "  v1 ranges over {} point(s) as A varies{}",
            r.points,
            if r.contains_zero { ", including 0" } else { ", never 0" }
        )
        .unwrap();
    }
    let verdict = match (out.success, masks_commute) {
        (true, true) => "round trip succeeded: v4 = v, masks commute",
        (true, false) => "round trip succeeded: v4 = v although the masks do not commute",
        (false, _) => "round trip FAILED: v4 ≠ v, masks do not commute",
    };
    writeln!(h, "  {verdict}").unwrap();
    Ok((serde_json::to_value(&record).expect("serializable"), h))
}

pub fn demo(args: &DemoArgs) -> CliResult<Outcome> {
    let mut config = ExperimentConfig::new("demo", &args.output);
    let mut records = Vec::new();
    let mut human = String::new();
    let code;
    if args.rational || args.instance.instance.is_some() {
        let instance = if args.rational {
            config.rational = Some(true);
            InstanceDescriptor::new(InstanceKind::RationalGl2, 0).build()?
        } else {
            resolve_instance(&args.instance)?
        };
        config.instance = Some(instance.descriptor().clone());
        let mut rng = session_rng(args.output.seed, 0);
        let s = instance.sample_secret(&mut rng);
        let out = run_session(&instance, &s, &mut rng, 0)?;
        let (r, h) = demo_record(&instance, &out)?;
        records.push(r);
        human.push_str(&h);
        code = 0;
    } else {
        let gl = InstanceDescriptor::new(InstanceKind::GeneralLinear, 2).build()?;
        let fail = run_session_with(
            &gl,
            &SecretEncoding {
                s: Scalar::fp(1, 2),
                t: Scalar::fp(0, 2),
                v: Point::fp(2, 1, 0),
            },
            &Mat2::fp(2, [[1, 1], [0, 1]]),
            &Mat2::fp(2, [[1, 0], [1, 1]]),
            0,
        )?;
        let diag = InstanceDescriptor::new(InstanceKind::Diagonal, 5).build()?;
        let ok = run_session_with(
            &diag,
            &SecretEncoding {
                s: Scalar::fp(2, 5),
                t: Scalar::fp(3, 5),
                v: Point::fp(5, 2, 3),
            },
            &Mat2::fp(5, [[2, 0], [0, 1]]),
            &Mat2::fp(5, [[3, 0], [0, 4]]),
            1,
        )?;
        for (inst, out) in [(&gl, &fail), (&diag, &ok)] {
            let (r, h) = demo_record(inst, out)?;
            records.push(r);
            human.push_str(&h);
            human.push('\n');
        }
        let expected = !fail.success && ok.success;
        writeln!(
            human,
            "{}",
            if expected {
                "non-commuting masks broke the round trip; commuting masks restored it"
            } else {
                "unexpected outcome: the scripted sessions did not behave as designed"
            }
        )
        .unwrap();
        code = if expected { 0 } else { 1 };
    }
    let artifact = envelope("triplepass.demo/1", &config, json!({ "sessions": records }));
    Ok(Outcome {
        artifact,
        human,
        csv: None,
        code,
    })
}

pub fn run(args: &RunArgs) -> CliResult<Outcome> {
    let instance = resolve_instance(&args.instance)?;
    let mut config = ExperimentConfig::new("run", &args.output);
    config.instance = Some(instance.descriptor().clone());
    config.sessions = Some(args.sessions);
    config.lab_view = Some(args.lab_view);

    let seed = args.output.seed;
    let outcomes: Vec<SessionOutcome> = (0..args.sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = session_rng(seed, i);
            let s = instance.sample_secret(&mut rng);
            run_session(&instance, &s, &mut rng, i)
        })
        .collect::<Result<_, _>>()?;

    let successes = outcomes.iter().filter(|o| o.success).count();
    let transcripts: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            if args.lab_view {
                o.transcript.to_lab_value()
            } else {
                o.transcript.to_adversary_value()
            }
        })
        .collect();
    let results: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "session": o.transcript.session, "success": o.success }))
        .collect();

    let mut human = format!(
        "{}: {} session(s), {} round-tripped\n",
        instance.name(),
        outcomes.len(),
        successes
    );
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["session", "success", "v1", "v2", "v3"])
        .expect("in-memory csv");
    for o in &outcomes {
        let t = &o.transcript;
        writeln!(
            human,
            "  #{:<4} v1 = {}  v2 = {}  v3 = {}  {}",
            t.session,
            t.v1,
            t.v2,
            t.v3,
            if o.success { "ok" } else { "FAILED" }
        )
        .unwrap();
        csv.write_record([
            t.session.to_string(),
            o.success.to_string(),
            t.v1.to_string(),
            t.v2.to_string(),
            t.v3.to_string(),
        ])
        .expect("in-memory csv");
    }
    let csv = String::from_utf8(csv.into_inner().expect("in-memory csv")).expect("utf-8 csv");

    let artifact = envelope(
        "triplepass.run/1",
        &config,
        json!({
            "instance": instance.name(),
            "sessions": outcomes.len(),
            "successes": successes,
            "results": results,
            "transcripts": transcripts,
        }),
    );
    Ok(Outcome {
        artifact,
        human,
        csv: Some(csv),
        code: 0,
    })
}

#[derive(Serialize)]
struct AttackResult {
    applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_hat: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches_truth: Option<bool>,
}

fn attack(t: &Transcript) -> AttackResult {
    match quotient_attack(t) {
        Ok(q) => AttackResult {
            applicable: true,
            matches_truth: t.truth.as_ref().map(|g| g.s == q.s_hat),
            s_hat: Some(q.s_hat),
        },
        Err(_) => AttackResult {
            applicable: false,
            s_hat: None,
            matches_truth: None,
        },
    }
}

fn human_posterior(r: &PosteriorReport, h: &mut String) {
    writeln!(h, "transcript {}", r.transcript).unwrap();
    for m in &r.posterior {
        writeln!(h, "  P(s = {}) = {}", m.s, m.p).unwrap();
    }
    writeln!(
        h,
        "  {} witness(es); posterior {}",
        r.witnesses,
        if r.uniform { "uniform" } else { "not uniform" }
    )
    .unwrap();
}

fn human_leakage(r: &LeakageReport) -> String {
    format!(
        "{}: I(S; transcript) = {} bits of H(S) = {} bits\n  {} reachable transcript(s) from {} session(s)\n  zero leakage: {}\n",
        r.instance,
        r.mutual_information_bits,
        r.secret_entropy_bits,
        r.transcripts_examined,
        r.sessions_enumerated,
        if r.zero_leakage { "yes" } else { "no" }
    )
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<Outcome> {
    let mut config = ExperimentConfig::new("analyze", &args.output);
    config.prior = Some(args.prior.clone());
    let cap = args.output.cap;

    let Some(path) = &args.transcript else {
        let instance = resolve_instance(&args.instance)?;
        config.instance = Some(instance.descriptor().clone());
        let prior = Prior::parse(&args.prior, &instance)?;
        let report = exact_mutual_information(&instance, &prior, cap)?;
        let human = human_leakage(&report);
        let artifact = envelope("triplepass.leakage/1", &config, json!({ "leakage": report }));
        return Ok(Outcome {
            artifact,
            human,
            csv: None,
            code: 0,
        });
    };

    config.transcript = Some(path.clone());
    let transcripts = read_transcripts(&read_file(path)?)?;
    let instance = match (&args.instance.instance, transcripts.first()) {
        (Some(_), _) => resolve_instance(&args.instance)?,
        (None, Some(t)) => instance_from_name(&t.instance)?,
        (None, None) => return Err(CliError::Usage("transcript file holds no transcripts".into())),
    };
    config.instance = Some(instance.descriptor().clone());
    let prior = Prior::parse(&args.prior, &instance)?;
    let mut human = String::new();
    let mut posteriors = Vec::new();
    let mut attacks = Vec::new();
    for t in &transcripts {
        let r = posterior_from_transcript(t, &instance, &prior, cap)?;
        human_posterior(&r, &mut human);
        let a = attack(t);
        if let Some(s) = &a.s_hat {
            writeln!(human, "  quotient attack guesses s = {s}").unwrap();
        }
        posteriors.push(r);
        attacks.push(a);
    }
    let artifact = envelope(
        "triplepass.posterior/1",
        &config,
        json!({ "instance": instance.name(), "posteriors": posteriors, "quotient_attack": attacks }),
    );
    Ok(Outcome {
        artifact,
        human,
        csv: None,
        code: 0,
    })
}

fn human_conditions(name: &str, reports: &[ConditionReport]) -> String {
    let mut h = format!("{name}\n");
    for r in reports {
        writeln!(
            h,
            "  {:<24} {}",
            r.condition.to_string(),
            if r.passed() { "pass" } else { "FAIL" }
        )
        .unwrap();
        if let Some(cx) = &r.counterexample {
            writeln!(
                h,
                "    counterexample: {}",
                serde_json::to_string(cx).expect("serializable")
            )
            .unwrap();
        }
        for (k, v) in &r.facts {
            writeln!(h, "    {k}: {v}").unwrap();
        }
    }
    h
}

pub fn check(args: &CheckArgs) -> CliResult<Outcome> {
    let instance = resolve_instance(&args.instance)?;
    let mut config = ExperimentConfig::new("check", &args.output);
    config.instance = Some(instance.descriptor().clone());
    let cap = args.output.cap;
    let mut reports = check_conditions(&instance, cap)?;
    reports.push(roundtrip_success_iff_comm_fixed(&instance, cap)?);
    let mut revalidated = true;
    for r in &reports {
        revalidated &= r.revalidate(&instance)?;
    }
    let all_pass = reports.iter().all(ConditionReport::passed);
    let human = human_conditions(instance.name(), &reports);
    let artifact = envelope(
        "triplepass.check/1",
        &config,
        json!({
            "instance": instance.name(),
            "all_pass": all_pass,
            "revalidated": revalidated,
            "reports": reports,
        }),
    );
    Ok(Outcome {
        artifact,
        human,
        csv: None,
        code: if all_pass { 0 } else { 1 },
    })
}

fn human_search(r: &SearchReport) -> String {
    let mut h = format!(
        "GL2(F{}): {} generator set(s) of size ≤ {}, {} distinct subgroup(s)\n",
        r.p,
        r.generator_sets,
        r.max_generators,
        r.subgroups.len()
    );
    for s in &r.subgroups {
        for o in &s.instances {
            let verdicts: Vec<&str> = o
                .conditions
                .iter()
                .map(|c| if c.passed() { "pass" } else { "fail" })
                .collect();
            writeln!(
                h,
                "  {:<28} |G|={:<4} |S|={:<3} {}  zero-leakage={}{}",
                o.instance,
                s.order,
                o.secret_count,
                verdicts.join("/"),
                o.leakage
                    .as_ref()
                    .map_or("?", |l| if l.zero_leakage { "yes" } else { "no" }),
                o.skipped.as_ref().map_or(String::new(), |m| format!("  skipped: {m}"))
            )
            .unwrap();
        }
    }
    writeln!(
        h,
        "candidates: {}\nsearch {}",
        if r.candidates.is_empty() {
            "none".to_string()
        } else {
            r.candidates.join(", ")
        },
        if r.complete {
            "complete"
        } else {
            "INCOMPLETE (cap reached)"
        }
    )
    .unwrap();
    h
}

pub fn search(args: &SearchArgs) -> CliResult<Outcome> {
    let mut config = ExperimentConfig::new("search", &args.output);
    config.p = Some(args.p);
    config.max_generators = Some(args.generators);
    Domain::prime(args.p)?;
    let mut sc = SearchConfig::new(args.p, args.generators);
    sc.work_cap = args.output.cap;
    let report = search_instances(&sc)?;
    let human = human_search(&report);
    let code = if report.complete { 0 } else { 3 };
    let artifact = envelope("triplepass.search/1", &config, json!({ "search": report }));
    Ok(Outcome {
        artifact,
        human,
        csv: None,
        code,
    })
}
