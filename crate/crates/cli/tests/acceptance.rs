//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.
//!
//! Oracles here work on raw `u64` bitmasks and brute-force enumeration so they
//! share no code with the library under test.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use attrex_cli::{cmd_explore, ExploreArgs, MaskArgs};
use attrex_core::base::{find_completion, normalize, ExplorationBase, PartialExample};
use attrex_core::engine::{explore, Exploration, Termination};
use attrex_core::expert::{expert_closure, validate_expert, Condition, Expert, ExpertAnswer};
use attrex_core::format;
use attrex_core::logic::{close, close_in, entails, Conclusion, Implication, InferenceMode};
use attrex_core::{AttributeSet, CumulatedClause, ExplorationSchema, MaskPolicy, ScriptedDomain};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("canonical base reproduction", canonical_base),
        (
            "validated implications and background capture the domain",
            domain_theory,
        ),
        (
            "non-refuted implications are exactly the entailed ones",
            refutation_matches_entailment,
        ),
        ("normalization soundness", normalization_soundness),
        ("consistency oracle equivalence", consistency_oracle),
        ("expert axioms and broken mutants", expert_axioms),
        ("closure and expert-closure laws", closure_laws),
        ("determinism and resumability", determinism_and_resumability),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.2}s)"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason} ({secs:.2}s)");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------------------
// bitmask oracles

fn full(n: usize) -> u64 {
    (1u64 << n) - 1
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

fn bits(s: &AttributeSet) -> u64 {
    s.bits()
}

fn set(n: usize, b: u64) -> AttributeSet {
    AttributeSet::from_bits(n, b)
}

/// Intersection of the members containing `x`; everything if none does.
fn domain_closure(domain: &[u64], n: usize, x: u64) -> u64 {
    domain
        .iter()
        .filter(|d| subset(x, **d))
        .fold(full(n), |acc, d| acc & d)
}

fn valid_in(domain: &[u64], premise: u64, conclusion: u64) -> bool {
    domain
        .iter()
        .all(|d| !subset(premise, *d) || subset(conclusion, *d))
}

/// Pseudo-closed sets of the domain closure, each paired with its closure.
fn duquenne_guigues(domain: &[u64], n: usize) -> Vec<(u64, u64)> {
    let mut by_size: Vec<u64> = (0..=full(n)).collect();
    by_size.sort_by_key(|s| (s.count_ones(), *s));
    let mut pseudo: Vec<(u64, u64)> = Vec::new();
    for p in by_size {
        let cp = domain_closure(domain, n, p);
        if cp == p {
            continue;
        }
        if pseudo
            .iter()
            .all(|&(q, cq)| !(subset(q, p) && q != p) || subset(cq, p))
        {
            pseudo.push((p, cp));
        }
    }
    pseudo
}

fn fixpoint(imps: &[(u64, u64)], x: u64) -> u64 {
    let mut cur = x;
    loop {
        let next = imps
            .iter()
            .filter(|(p, _)| subset(*p, cur))
            .fold(cur, |acc, (_, c)| acc | c);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

struct RawClause {
    premise: u64,
    disjuncts: Vec<u64>,
}

fn satisfies(x: u64, clauses: &[RawClause]) -> bool {
    clauses
        .iter()
        .all(|c| !subset(c.premise, x) || c.disjuncts.iter().any(|d| subset(*d, x)))
}

fn respects(x: u64, imps: &[(u64, Option<u64>)]) -> bool {
    imps.iter().all(|(p, c)| match c {
        _ if !subset(*p, x) => true,
        Some(c) => subset(*c, x),
        None => false,
    })
}

fn raw_implications(imps: &[Implication]) -> Vec<(u64, Option<u64>)> {
    imps.iter()
        .map(|i| (bits(i.premise()), i.conclusion().as_set().map(bits)))
        .collect()
}

fn oracle_models(n: usize, imps: &[(u64, Option<u64>)], clauses: &[RawClause]) -> Vec<u64> {
    (0..=full(n))
        .filter(|x| respects(*x, imps) && satisfies(*x, clauses))
        .collect()
}

// ---------------------------------------------------------------------------
// random instances

fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> u64 {
    (0..n)
        .filter(|_| rng.random_bool(p))
        .fold(0, |acc, i| acc | (1 << i))
}

fn random_clauses(rng: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<RawClause> {
    (0..rng.random_range(0..=max))
        .map(|_| RawClause {
            premise: random_subset(rng, n, 0.35),
            disjuncts: (0..rng.random_range(0..=2))
                .map(|_| random_subset(rng, n, 0.35) | (1 << rng.random_range(0..n)))
                .collect(),
        })
        .collect()
}

fn random_implications(rng: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<(u64, u64)> {
    (0..rng.random_range(0..=max))
        .map(|_| (random_subset(rng, n, 0.3), random_subset(rng, n, 0.3)))
        .collect()
}

fn to_implications(n: usize, raw: &[(u64, u64)]) -> Vec<Implication> {
    raw.iter()
        .map(|(p, c)| Implication::new(set(n, *p), set(n, *c)))
        .collect()
}

fn schema(n: usize, clauses: &[RawClause]) -> ExplorationSchema {
    let names: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let background = clauses
        .iter()
        .map(|c| {
            CumulatedClause::new(
                set(n, c.premise),
                c.disjuncts.iter().map(|d| set(n, *d)).collect(),
            )
        })
        .collect();
    ExplorationSchema::new(names, background).expect("generated schema is well formed")
}

/// A schema with a background that admits at least one set, and a domain
/// drawn from the admitted sets.
fn random_domain_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_clauses: usize,
    max_members: usize,
) -> (Vec<RawClause>, Vec<u64>) {
    loop {
        let clauses = random_clauses(rng, n, max_clauses);
        let admitted: Vec<u64> = (0..=full(n)).filter(|x| satisfies(*x, &clauses)).collect();
        if admitted.is_empty() {
            continue;
        }
        let size = rng.random_range(0..=max_members);
        let mut domain: Vec<u64> = (0..size)
            .map(|_| admitted[rng.random_range(0..admitted.len())])
            .collect();
        domain.sort_unstable();
        domain.dedup();
        return (clauses, domain);
    }
}

fn random_mask(rng: &mut ChaCha8Rng, n: usize, i: usize) -> MaskPolicy {
    match i % 3 {
        0 => MaskPolicy::FixedHideSet(set(n, random_subset(rng, n, 0.4))),
        1 => MaskPolicy::PerQueryRandom { seed: rng.random() },
        _ => MaskPolicy::None,
    }
}

fn scripted(
    s: &ExplorationSchema,
    domain: &[u64],
    mask: MaskPolicy,
) -> Result<ScriptedDomain, String> {
    ScriptedDomain::new(s, domain.iter().map(|d| set(s.len(), *d)).collect(), mask)
        .map_err(|e| e.to_string())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took <= limit, || {
        format!(
            "took {:.1}s, limit {}s",
            took.as_secs_f64(),
            limit.as_secs()
        )
    })
}

// ---------------------------------------------------------------------------
// criteria

fn canonical_base() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut total = 0;
    for case in 0..200 {
        let n = rng.random_range(3..=7);
        let size = rng.random_range(0..=15);
        let domain: Vec<u64> = (0..size).map(|_| random_subset(&mut rng, n, 0.5)).collect();
        let s = schema(n, &[]);
        let mut expert = scripted(&s, &domain, MaskPolicy::None)?;
        let result =
            explore(&s, &mut expert, Vec::new(), None).map_err(|e| format!("case {case}: {e}"))?;
        check(result.terminated == Termination::Complete, || {
            format!("case {case}: not complete")
        })?;

        let oracle = duquenne_guigues(&domain, n);
        for x in 0..=full(n) {
            let ours = match close(&result.validated, &set(n, x)) {
                Conclusion::Set(c) => bits(&c),
                Conclusion::Bottom => return Err(format!("case {case}: bottom closure")),
            };
            check(
                ours == fixpoint(&oracle, x) && ours == domain_closure(&domain, n, x),
                || format!("case {case}: closure of {x:#b} differs"),
            )?;
        }
        check(result.validated.len() == oracle.len(), || {
            format!(
                "case {case}: {} implications, canonical base has {}",
                result.validated.len(),
                oracle.len()
            )
        })?;
        total += oracle.len();
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("200 domains, {total} implications, all canonical"))
}

fn explore_masked(
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(ExplorationSchema, Vec<u64>, ExplorationBase), String> {
    let n = rng.random_range(2..=5);
    let (clauses, domain) = random_domain_instance(rng, n, 3, 8);
    let s = schema(n, &clauses);
    let mask = random_mask(rng, n, case % 2);
    let mut expert = scripted(&s, &domain, mask)?;
    let result =
        explore(&s, &mut expert, Vec::new(), None).map_err(|e| format!("case {case}: {e}"))?;
    check(result.terminated == Termination::Complete, || {
        format!("case {case}: not complete")
    })?;
    Ok((s, domain, result.final_base))
}

fn domain_theory() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7E02);
    let mut checked = 0;
    for case in 0..100 {
        let (s, domain, base) = explore_masked(case, &mut rng)?;
        let n = s.len();
        for a in 0..=full(n) {
            for m in 0..n {
                let c = a | (1 << m);
                let imp = Implication::new(set(n, a), set(n, c));
                let derived = entails(
                    base.implications(),
                    s.background(),
                    &imp,
                    InferenceMode::WithBackground,
                );
                check(derived == valid_in(&domain, a, c), || {
                    format!(
                        "case {case}: {a:#b} -> m{m}: entailed {derived}, domain says the opposite"
                    )
                })?;
                checked += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("100 masked explorations, {checked} implications"))
}

fn refutation_matches_entailment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7E01);
    let mut checked = 0;
    for case in 0..100 {
        let (s, _, base) = explore_masked(case, &mut rng)?;
        let n = s.len();
        for r in 0..=full(n) {
            for c in 0..=full(n) {
                let imp = Implication::new(set(n, r), set(n, c));
                let unrefuted = base.examples().iter().all(|e| !e.refutes(&imp));
                let derived = entails(
                    base.implications(),
                    s.background(),
                    &imp,
                    InferenceMode::WithBackground,
                );
                check(unrefuted == derived, || {
                    format!(
                        "case {case}: {r:#b} -> {c:#b}: unrefuted {unrefuted}, entailed {derived}"
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "100 terminated explorations, {checked} implications"
    ))
}

fn random_consistent_base(rng: &mut ChaCha8Rng) -> (usize, Vec<RawClause>, ExplorationBase) {
    loop {
        let n = rng.random_range(1..=6);
        let clauses = random_clauses(rng, n, 2);
        let raw = random_implications(rng, n, 4);
        let imps = to_implications(n, &raw);
        let models = oracle_models(n, &raw_implications(&imps), &clauses);
        if models.is_empty() {
            continue;
        }
        let examples = (0..rng.random_range(1..=6))
            .map(|_| {
                let d = models[rng.random_range(0..models.len())];
                let lower = d & random_subset(rng, n, 0.6);
                let upper = d | random_subset(rng, n, 0.4);
                PartialExample::new(set(n, lower), set(n, upper)).expect("lower within upper")
            })
            .collect();
        return (n, clauses, ExplorationBase::from_parts(imps, examples));
    }
}

fn normalization_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4E0);
    let mut rewrites = 0;
    for case in 0..500 {
        let (n, clauses, pre) = random_consistent_base(&mut rng);
        let mut post = pre.clone();
        let report = normalize(&mut post).map_err(|e| format!("case {case}: {e}"))?;
        rewrites += report.rewrites;

        let before = oracle_models(n, &raw_implications(pre.implications()), &clauses);
        let after = oracle_models(n, &raw_implications(post.implications()), &clauses);
        check(before == after, || format!("case {case}: models changed"))?;
        check(report.origins.len() == post.examples().len(), || {
            format!("case {case}: origins")
        })?;
        for (ex, &origin) in post.examples().iter().zip(&report.origins) {
            let old = &pre.examples()[origin];
            let tighter = old.lower().is_subset(ex.lower()) && ex.upper().is_subset(old.upper());
            check(tighter, || {
                format!("case {case}: example {origin} loosened")
            })?;
        }
        let mut again = post.clone();
        let second = normalize(&mut again).map_err(|e| format!("case {case}: {e}"))?;
        check(
            second.rewrites == 0 && again.examples() == post.examples(),
            || format!("case {case}: second pass rewrote {}", second.rewrites),
        )?;
    }
    Ok(format!("500 bases, {rewrites} rewrites"))
}

fn consistency_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C05);
    let mut with_completion = 0;
    for case in 0..1000 {
        let n = rng.random_range(1..=10);
        let clauses = random_clauses(&mut rng, n, 3);
        let imps = to_implications(n, &random_implications(&mut rng, n, 6));
        let raw = raw_implications(&imps);
        let s = schema(n, &clauses);
        let examples: Vec<PartialExample> = (0..rng.random_range(1..=3))
            .map(|_| {
                let lower = random_subset(&mut rng, n, 0.25);
                let upper = lower | random_subset(&mut rng, n, 0.5);
                PartialExample::new(set(n, lower), set(n, upper)).expect("lower within upper")
            })
            .collect();

        let mut all = true;
        for ex in &examples {
            let (u, v) = (bits(ex.lower()), bits(ex.upper()));
            let exists = (0..=full(n)).any(|d| {
                subset(u, d) && subset(d, v) && respects(d, &raw) && satisfies(d, &clauses)
            });
            match find_completion(ex, &imps, s.background()) {
                Some(d) => {
                    let d = bits(&d);
                    let sound =
                        subset(u, d) && subset(d, v) && respects(d, &raw) && satisfies(d, &clauses);
                    check(sound, || format!("case {case}: invalid witness {d:#b}"))?;
                    with_completion += 1;
                }
                None => check(!exists, || format!("case {case}: missed a completion"))?,
            }
            all &= exists;
        }
        let base = ExplorationBase::from_parts(imps, examples);
        check(base.is_consistent(&s) == all, || {
            format!("case {case}: consistency flag disagrees")
        })?;
    }
    Ok(format!(
        "1000 instances, {with_completion} completable examples"
    ))
}

fn all_queries(n: usize) -> Vec<Implication> {
    let mut queries = Vec::new();
    for r in 0..=full(n) {
        for c in 0..=full(n) {
            if subset(r, c) {
                queries.push(Implication::new(set(n, r), set(n, c)));
            }
        }
    }
    queries
}

fn expert_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE49E27);
    let mut queries_checked = 0;
    for case in 0..100 {
        let n = rng.random_range(1..=5);
        let (clauses, domain) = random_domain_instance(&mut rng, n, 3, 8);
        let s = schema(n, &clauses);
        let mut expert = scripted(&s, &domain, random_mask(&mut rng, n, case))?;
        let queries = all_queries(n);
        let validated: Vec<Implication> = queries
            .iter()
            .filter(|q| {
                valid_in(
                    &domain,
                    bits(q.premise()),
                    bits(q.conclusion().as_set().unwrap()),
                )
            })
            .cloned()
            .collect();
        let report = validate_expert(&mut expert, &s, &validated, &queries);
        check(report.is_clean(), || {
            format!(
                "case {case}: {} violations, first {:?}",
                report.violations.len(),
                report.violations[0]
            )
        })?;
        queries_checked += report.checked_queries;
    }

    // Mutant (i): a counter-example that refutes nothing.
    let n = 3;
    let s = schema(n, &[]);
    let mut vacuous = |_: &Implication| {
        ExpertAnswer::Counterexample(PartialExample::new(set(n, 0), set(n, full(n))).unwrap())
    };
    let got = validate_expert(&mut vacuous, &s, &[], &all_queries(n)).conditions();
    check(got == [Condition::I].into(), || {
        format!("mutant i flagged {got:?}")
    })?;

    // Mutant (ii): truthful except for one invalid query answered valid.
    let domain = [0b001, 0b011, 0b110];
    let mut truthful = scripted(&s, &domain, MaskPolicy::None)?;
    let lie = Implication::new(set(n, 0b001), set(n, 0b011));
    let mut liar = |q: &Implication| {
        if *q == lie {
            ExpertAnswer::Valid
        } else {
            truthful.answer(q)
        }
    };
    let got = validate_expert(&mut liar, &s, &[], &all_queries(n)).conditions();
    check(got == [Condition::Ii].into(), || {
        format!("mutant ii flagged {got:?}")
    })?;

    // Mutant (iii): answers with the bare premise, which the background
    // forbids when the premise is empty.
    let n = 2;
    let s = schema(
        n,
        &[RawClause {
            premise: 0,
            disjuncts: vec![0b01, 0b10],
        }],
    );
    let domain = [0b01, 0b10];
    let mut premise_only = |q: &Implication| {
        let (r, c) = (bits(q.premise()), bits(q.conclusion().as_set().unwrap()));
        if valid_in(&domain, r, c) {
            ExpertAnswer::Valid
        } else {
            ExpertAnswer::Counterexample(PartialExample::exact(set(n, r)))
        }
    };
    let got = validate_expert(&mut premise_only, &s, &[], &all_queries(n)).conditions();
    check(got == [Condition::Iii].into(), || {
        format!("mutant iii flagged {got:?}")
    })?;

    Ok(format!(
        "100 domains, {queries_checked} queries clean; 3 mutants caught"
    ))
}

const LAW_CASES: usize = 10_000;

fn closure_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A25);

    // Implication closure: extensive, monotone, idempotent, equal to the naive fixpoint.
    for case in 0..LAW_CASES {
        let n = rng.random_range(1..=8);
        let raw = random_implications(&mut rng, n, 6);
        let imps = to_implications(n, &raw);
        let x = random_subset(&mut rng, n, 0.3);
        let y = x | random_subset(&mut rng, n, 0.3);
        let cl = |z: u64| {
            bits(
                &close(&imps, &set(n, z))
                    .into_set()
                    .expect("no bottom conclusions"),
            )
        };
        let (cx, cy) = (cl(x), cl(y));
        check(
            subset(x, cx) && subset(cx, cy) && cl(cx) == cx && cx == fixpoint(&raw, x),
            || format!("implication closure case {case}"),
        )?;
    }

    // Closure with background: the meet of the models above the start set.
    for case in 0..LAW_CASES {
        let n = rng.random_range(1..=6);
        let clauses = random_clauses(&mut rng, n, 3);
        let imps = to_implications(n, &random_implications(&mut rng, n, 4));
        let models = oracle_models(n, &raw_implications(&imps), &clauses);
        let bg = schema(n, &clauses);
        let x = random_subset(&mut rng, n, 0.3);
        let y = x | random_subset(&mut rng, n, 0.3);
        let cl = |z: u64| match close_in(
            &imps,
            bg.background(),
            &set(n, z),
            InferenceMode::WithBackground,
        ) {
            Conclusion::Set(s) => Some(bits(&s)),
            Conclusion::Bottom => None,
        };
        let expected = models
            .iter()
            .filter(|m| subset(x, **m))
            .fold(None, |acc: Option<u64>, m| Some(acc.map_or(*m, |a| a & m)));
        let (cx, cy) = (cl(x), cl(y));
        let monotone = match (cx, cy) {
            (Some(a), Some(b)) => subset(a, b),
            (_, None) => true,
            (None, Some(_)) => false,
        };
        let extensive_idempotent = cx.is_none_or(|c| subset(x, c) && cl(c) == Some(c));
        check(cx == expected && monotone && extensive_idempotent, || {
            format!("background closure case {case}")
        })?;
    }

    // Expert closure: a closure operator whose value is the largest Y with X -> Y valid.
    for case in 0..LAW_CASES {
        let n = rng.random_range(1..=8);
        let domain: Vec<u64> = (0..rng.random_range(0..=10))
            .map(|_| random_subset(&mut rng, n, 0.5))
            .collect();
        let expert = scripted(&schema(n, &[]), &domain, MaskPolicy::None)?;
        let x = random_subset(&mut rng, n, 0.3);
        let y = x | random_subset(&mut rng, n, 0.3);
        let cl = |z: u64| bits(&expert_closure(&expert, &set(n, z)));
        let (cx, cy) = (cl(x), cl(y));
        let candidate = random_subset(&mut rng, n, 0.5);
        let largest =
            valid_in(&domain, x, cx) && (!valid_in(&domain, x, candidate) || subset(candidate, cx));
        check(
            subset(x, cx)
                && subset(cx, cy)
                && cl(cx) == cx
                && largest
                && cx == domain_closure(&domain, n, x),
            || format!("expert closure case {case}"),
        )?;
    }

    // Implications valid in a domain entail only implications valid in it.
    for case in 0..LAW_CASES {
        let n = rng.random_range(1..=6);
        let (clauses, domain) = random_domain_instance(&mut rng, n, 2, 8);
        let bg = schema(n, &clauses);
        let valid: Vec<Implication> = (0..rng.random_range(0..=4))
            .map(|_| {
                let p = random_subset(&mut rng, n, 0.3);
                let c = domain_closure(&domain, n, p) & (p | random_subset(&mut rng, n, 0.6));
                Implication::new(set(n, p), set(n, c))
            })
            .collect();
        let a = random_subset(&mut rng, n, 0.3);
        let b = random_subset(&mut rng, n, 0.4);
        let query = Implication::new(set(n, a), set(n, b));
        let mode = if case % 2 == 0 {
            InferenceMode::ImplicationsOnly
        } else {
            InferenceMode::WithBackground
        };
        let follows = entails(&valid, bg.background(), &query, mode);
        check(!follows || valid_in(&domain, a, a | b), || {
            format!("inference closure case {case}")
        })?;
    }
    Ok(format!("4 x {LAW_CASES} cases"))
}

fn answer_until_done(state: &mut Exploration, expert: &mut ScriptedDomain) -> Result<(), String> {
    while let Some(q) = state.question() {
        let answer = expert.answer(q.implication());
        state.submit(&q, answer).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn determinism_and_resumability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE7);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;

    for run in 0..5 {
        let n = rng.random_range(3..=6);
        let (clauses, domain) = random_domain_instance(&mut rng, n, 2, 10);
        let s = schema(n, &clauses);
        let schema_path = dir.path().join(format!("schema{run}.json"));
        let domain_path = dir.path().join(format!("domain{run}.json"));
        let schema_text = serde_json::to_string(&format::SchemaFile::from_schema(&s))
            .map_err(|e| e.to_string())?;
        let domain_file = format::DomainFile {
            sets: domain.iter().map(|d| s.names_of(&set(n, *d))).collect(),
            mask: format::MaskRecord::None,
        };
        fs::write(&schema_path, schema_text).map_err(|e| e.to_string())?;
        fs::write(&domain_path, serde_json::to_string(&domain_file).unwrap())
            .map_err(|e| e.to_string())?;

        let seed: u64 = rng.random();
        let outputs: Vec<String> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("out{run}_{k}"));
                cmd_explore(&ExploreArgs {
                    schema: schema_path.clone(),
                    domain: domain_path.clone(),
                    out: out.clone(),
                    budget: None,
                    mask: MaskArgs {
                        mask: Some("random".into()),
                        seed: Some(seed),
                    },
                    max_enum: 20,
                })
                .map_err(|e| format!("{e:#}"))?;
                [
                    "journal.jsonl",
                    "implications.txt",
                    "implications.json",
                    "summary.json",
                ]
                .iter()
                .map(|f| fs::read_to_string(out.join(f)).map_err(|e| e.to_string()))
                .collect::<Result<String, String>>()
            })
            .collect::<Result<_, _>>()?;
        check(outputs[0] == outputs[1], || {
            format!("run {run}: outputs differ between runs")
        })?;
    }

    let mut prefixes = 0;
    for case in 0..20 {
        let n = rng.random_range(3..=5);
        let (clauses, domain) = random_domain_instance(&mut rng, n, 2, 8);
        let s = schema(n, &clauses);
        let mask = random_mask(&mut rng, n, case);
        let mut expert = scripted(&s, &domain, mask)?;

        let mut original = Exploration::start(s.clone(), Vec::new()).map_err(|e| e.to_string())?;
        answer_until_done(&mut original, &mut expert)?;
        let mut text = Vec::new();
        format::write_journal(&mut text, &s, original.base().journal())
            .map_err(|e| e.to_string())?;
        let text = String::from_utf8(text).unwrap();
        let lines: Vec<&str> = text.lines().collect();

        for k in 0..=lines.len() {
            let prefix: String = lines[..k].iter().map(|l| format!("{l}\n")).collect();
            let entries =
                format::parse_journal(&prefix, &s).map_err(|e| format!("case {case}: {e}"))?;
            let mut resumed = Exploration::resume(s.clone(), &entries)
                .map_err(|e| format!("case {case}: {e}"))?;
            answer_until_done(&mut resumed, &mut expert)?;
            check(
                resumed.base().implications() == original.base().implications(),
                || format!("case {case}: resuming after {k} entries reached a different base"),
            )?;
            prefixes += 1;
        }
    }
    Ok(format!(
        "5 repeated explorations byte-identical; {prefixes} resumed prefixes over 20 sessions"
    ))
}
