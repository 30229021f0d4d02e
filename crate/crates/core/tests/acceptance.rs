//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Every check is exact; wall-clock budgets are part of the criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lcs_cohomology::abgroup::{FinAbGroup, GroupElement, Homomorphism};
use lcs_cohomology::actions::{enumerate_action_pairs_cyclic, validate_action_pair, ActionPair};
use lcs_cohomology::classify::{
    classify_matrix_example, classify_trivial_h_cyclic, classify_yleft_nonzero_cyclic,
    h2_identity_closed_form, matrix_example_action, CaseReport, CheckOutcome,
};
use lcs_cohomology::cohomology::{
    compute_h2, construct_f, is_coboundary, verify_identities, CocycleParams,
};
use lcs_cohomology::complex::{direct_cocycle_equations, oracle_h2, total_d2, ComplexError};
use lcs_cohomology::cycleset::{verify_cycle_set, CycleSetParams};
use lcs_cohomology::extensions::{
    build_standard_extension, check_inclusion_projection, socle_inclusion,
    verify_extension_conditions,
};

/// Extensions are materialised as full tables only up to this order.
const EXTENSION_LIMIT: u128 = 243;

type Outcome = Result<String, String>;

fn params(p: i64, nu: u32, eta: u32) -> CycleSetParams {
    CycleSetParams::new(p, nu, eta).expect("valid (p, nu, eta)")
}

fn group(orders: &[i64]) -> FinAbGroup {
    FinAbGroup::new(orders.to_vec()).expect("valid group")
}

fn pair(par: CycleSetParams, g: &FinAbGroup, a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> ActionPair {
    let ap = ActionPair::from_matrices(par, g, a, b).expect("endomorphisms");
    assert!(validate_action_pair(&ap).is_empty(), "invalid action pair");
    ap
}

fn describe(ap: &ActionPair) -> String {
    format!(
        "(p={}, nu={}, eta={}, I={:?}, A={:?}, B={:?})",
        ap.params.p,
        ap.params.nu,
        ap.params.eta,
        ap.group.orders(),
        ap.a.matrix(),
        ap.b.matrix()
    )
}

/// All `A = a Id` with `B = 0` on `Z_n`.
fn cyclic_b_zero(par: CycleSetParams, n: i64) -> Vec<ActionPair> {
    enumerate_action_pairs_cyclic(&par, n)
        .expect("enumeration")
        .into_iter()
        .map(|(ap, _)| ap)
        .filter(|ap| ap.b_is_zero())
        .collect()
}

fn unitriangular() -> Vec<Vec<i64>> {
    vec![vec![1, 1], vec![0, 1]]
}

fn zero2() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![0, 0]]
}

fn criterion1_pairs() -> Vec<ActionPair> {
    [
        (3, 1, 1, 3),
        (3, 1, 1, 9),
        (3, 1, 2, 9),
        (5, 1, 1, 5),
        (3, 2, 2, 27),
    ]
    .into_iter()
    .map(|(p, nu, eta, n)| {
        let g = group(&[n]);
        ActionPair::trivial(params(p, nu, eta), &g).expect("trivial action")
    })
    .collect()
}

fn criterion2_pairs() -> Vec<ActionPair> {
    let mut out = Vec::new();
    for (nu, eta) in [(1, 1), (1, 2)] {
        let par = params(3, nu, eta);
        out.extend(cyclic_b_zero(par, 3));
        let g = group(&[3, 3]);
        out.push(pair(par, &g, vec![vec![1, 0], vec![0, 1]], zero2()));
        out.push(pair(par, &g, unitriangular(), zero2()));
    }
    out
}

fn criterion3_pairs() -> Vec<ActionPair> {
    let par = params(3, 1, 2);
    let mut out: Vec<ActionPair> = cyclic_b_zero(par, 9)
        .into_iter()
        .filter(|ap| (ap.a.matrix()[0][0] - 1) % 3 == 0)
        .collect();
    let g = group(&[9, 9]);
    out.push(pair(par, &g, vec![vec![1, 0], vec![0, 1]], zero2()));
    out.push(pair(par, &g, unitriangular(), zero2()));
    out
}

/// `(p, eta, r)` for the trivial-`H` tables.
const TABLE_GRID: [(i64, u32, u32); 7] = [
    (3, 1, 1),
    (3, 2, 1),
    (3, 2, 2),
    (3, 1, 2),
    (2, 1, 1),
    (2, 1, 2),
    (2, 2, 3),
];

fn criterion4_reports() -> Result<Vec<(ActionPair, CaseReport)>, String> {
    let mut out = Vec::new();
    for (p, eta, r) in TABLE_GRID {
        let reports = classify_trivial_h_cyclic(p, eta, r)
            .map_err(|e| format!("(p={p}, eta={eta}, r={r}): {e}"))?;
        let g = group(&[p.pow(r)]);
        for rep in reports {
            let ap = pair(params(p, eta, eta), &g, rep.a.clone(), rep.b.clone());
            out.push((ap, rep));
        }
    }
    Ok(out)
}

fn criterion5_report() -> Result<(ActionPair, CaseReport), String> {
    let rep = classify_yleft_nonzero_cyclic(3, 2, 2, 2, 4, 3).map_err(|e| e.to_string())?;
    let ap = pair(params(3, 2, 2), &group(&[9]), rep.a.clone(), rep.b.clone());
    Ok((ap, rep))
}

fn criterion6_report() -> Result<(ActionPair, CaseReport), String> {
    let rep = classify_matrix_example(3, 1, 1, 1, 1, 1).map_err(|e| e.to_string())?;
    let ap = matrix_example_action(3, 1, 1, 1, 1, 1).map_err(|e| e.to_string())?;
    Ok((ap, rep))
}

/// Every action pair touched by criteria 1–6.
fn instance_grid() -> Result<Vec<ActionPair>, String> {
    let mut out = criterion1_pairs();
    out.extend(criterion2_pairs());
    out.extend(criterion3_pairs());
    out.extend(criterion4_reports()?.into_iter().map(|(ap, _)| ap));
    out.push(criterion5_report()?.0);
    out.push(criterion6_report()?.0);
    Ok(out)
}

/// Every `(f0, γ)` emitted in criteria 1–6: transversals and classification families.
fn parameter_grid() -> Result<Vec<(ActionPair, CocycleParams)>, String> {
    let mut out = Vec::new();
    for ap in instance_grid()? {
        let h2 = compute_h2(&ap).map_err(|e| format!("{}: {e}", describe(&ap)))?;
        out.extend(h2.params.into_iter().map(|cp| (ap.clone(), cp)));
    }
    let mut reports = criterion4_reports()?;
    reports.push(criterion5_report()?);
    reports.push(criterion6_report()?);
    for (ap, rep) in reports {
        out.extend(
            rep.parameter_family
                .members
                .into_iter()
                .map(|cp| (ap.clone(), cp)),
        );
    }
    Ok(out)
}

fn elements(g: &FinAbGroup) -> Vec<GroupElement> {
    g.enumerate_elements().expect("small group").collect()
}

/// `|H^1(Z_m, I)| |H^0(Z_m, I')|` for `σ = A + p^nu Id` (an action once `p^eta I = 0`), by
/// enumeration: `ker N / (σ - 1) I` and `ker(σ - 1)` on `I'` (all of `I`, or the `p^nu`-torsion).
fn cyclic_group_cohomology(ap: &ActionPair, h0_on_torsion: bool) -> u128 {
    let g = &ap.group;
    let m = ap.params.modulus;
    let els = elements(g);
    let sigma = ap.a.add(&Homomorphism::scalar(g, ap.params.pnu)).unwrap();
    let mut powers = vec![Homomorphism::identity(g)];
    for _ in 1..m {
        powers.push(powers.last().unwrap().compose(&sigma).unwrap());
    }
    let norm = |y: &GroupElement| g.sum_all(&powers.iter().map(|s| s.apply(y)).collect::<Vec<_>>());
    let sigma_minus_1 = |y: &GroupElement| g.sub(&sigma.apply(y), y);
    let ker_n = els.iter().filter(|y| norm(y) == g.zero()).count() as u128;
    let mut image: Vec<GroupElement> = els.iter().map(sigma_minus_1).collect();
    image.sort_by_key(|y| g.index_of(y));
    image.dedup();
    let h1 = ker_n / image.len() as u128;
    let pnu = ap.params.pnu;
    let h0 = els
        .iter()
        .filter(|y| !h0_on_torsion || g.scale(pnu, y) == g.zero())
        .filter(|y| sigma_minus_1(y) == g.zero())
        .count() as u128;
    h1 * h0
}

fn check_orders_against_cohomology(pairs: &[ActionPair], h0_on_torsion: bool) -> Outcome {
    for ap in pairs {
        let h2 = compute_h2(ap).map_err(|e| format!("{}: {e}", describe(ap)))?;
        let expected = cyclic_group_cohomology(ap, h0_on_torsion);
        if h2.order() != expected {
            return Err(format!(
                "{}: compute_h2 order {} != {expected}",
                describe(ap),
                h2.order()
            ));
        }
    }
    Ok(format!("{} instances", pairs.len()))
}

fn criterion1() -> Outcome {
    let pairs = criterion1_pairs();
    for ap in &pairs {
        let h2 = compute_h2(ap).map_err(|e| e.to_string())?;
        let closed = h2_identity_closed_form(ap).map_err(|e| e.to_string())?;
        if h2.invariant_factors() != closed.invariant_factors.as_slice()
            || h2.order() != closed.order
        {
            return Err(format!(
                "{}: compute_h2 {:?} != closed form {:?}",
                describe(ap),
                h2.invariant_factors(),
                closed.invariant_factors
            ));
        }
    }
    Ok(format!("{} instances", pairs.len()))
}

fn criterion2() -> Outcome {
    check_orders_against_cohomology(&criterion2_pairs(), false)
}

fn criterion3() -> Outcome {
    check_orders_against_cohomology(&criterion3_pairs(), true)
}

fn require(rep: &CaseReport, check: &str) -> Result<(), String> {
    match rep.cross_checks.get(check) {
        Some(CheckOutcome::Pass) => Ok(()),
        other => Err(format!("{}: {check} is {other:?}", rep.case_id)),
    }
}

fn criterion4() -> Outcome {
    let reports = criterion4_reports()?;
    let mut members = 0;
    for (ap, rep) in &reports {
        for check in [
            "cardinality",
            "admissible",
            "closed_form_f",
            "distinct_mod_image",
        ] {
            require(rep, check).map_err(|e| format!("{}: {e}", describe(ap)))?;
        }
        // Pairwise non-equivalence, independent of the report's own size guard.
        let fam = &rep.parameter_family.members;
        let g = &ap.group;
        for (i, x) in fam.iter().enumerate() {
            for y in &fam[..i] {
                let diff = CocycleParams::new(g.sub(&x.f0, &y.f0), g.sub(&x.gamma, &y.gamma));
                if is_coboundary(ap, &diff)
                    .map_err(|e| e.to_string())?
                    .is_some()
                {
                    return Err(format!("{}: {x:?} ~ {y:?}", describe(ap)));
                }
            }
        }
        members += fam.len();
    }
    Ok(format!(
        "{} tables, {members} family members",
        reports.len()
    ))
}

fn formula_route(rep: &CaseReport, expected: u128) -> Outcome {
    require(rep, "formula_order")?;
    let oracle = rep.oracle_order.ok_or("oracle skipped")?;
    if rep.h2_order != expected || oracle != expected {
        return Err(format!(
            "expected order {expected}; formula = compute_h2 = {}, oracle = {oracle}",
            rep.h2_order
        ));
    }
    Ok(format!("formula = compute_h2 = oracle = {expected}"))
}

fn criterion5() -> Outcome {
    formula_route(&criterion5_report()?.1, 9)
}

fn criterion6() -> Outcome {
    formula_route(&criterion6_report()?.1, 27)
}

fn criterion7() -> Outcome {
    let grid = parameter_grid()?;
    for (ap, cp) in &grid {
        let sc = construct_f(ap, cp).map_err(|e| e.to_string())?;
        let c = sc.two_cochain(&ap.params);
        let total = total_d2(&c, ap).map_err(|e| e.to_string())?.is_zero();
        let direct = direct_cocycle_equations(&sc.f_table, &cp.gamma, ap);
        if !total || !direct {
            return Err(format!(
                "{} {cp:?}: total_d2 = 0 is {total}, direct equations {direct}",
                describe(ap)
            ));
        }
    }
    Ok(format!("{} cocycles", grid.len()))
}

fn criterion8() -> Outcome {
    let mut built = 0;
    let mut skipped = 0;
    for (ap, cp) in parameter_grid()? {
        if ap.group.order() * ap.params.modulus as u128 > EXTENSION_LIMIT {
            skipped += 1;
            continue;
        }
        let ctx = format!("{} {cp:?}", describe(&ap));
        let ext = build_standard_extension(&ap, &cp).map_err(|e| format!("{ctx}: {e}"))?;
        let conditions =
            verify_extension_conditions(&ext.data).map_err(|e| format!("{ctx}: {e}"))?;
        let table = verify_cycle_set(&ext.table);
        let morphisms = check_inclusion_projection(&ext.data, &ext.table);
        let socle = socle_inclusion(&ext).map_err(|e| format!("{ctx}: {e}"))?;
        if !conditions.is_empty()
            || !table.is_empty()
            || !morphisms.is_empty()
            || socle != ap.b_is_zero()
        {
            return Err(format!(
                "{ctx}: {} condition, {} cycle-set, {} morphism violations, socle {socle}",
                conditions.len(),
                table.len(),
                morphisms.len()
            ));
        }
        built += 1;
    }
    Ok(format!(
        "{built} extensions, {skipped} above order {EXTENSION_LIMIT}"
    ))
}

fn criterion9() -> Outcome {
    let grid = instance_grid()?;
    for ap in &grid {
        let report = verify_identities(ap).map_err(|e| format!("{}: {e}", describe(ap)))?;
        if let Some(v) = report.first() {
            return Err(format!(
                "{}: {} violations, first {}: {}",
                describe(ap),
                report.len(),
                v.rule,
                v.witness
            ));
        }
    }
    Ok(format!("{} instances", grid.len()))
}

fn criterion10() -> Outcome {
    let (mut agreed, mut guarded) = (0, 0);
    for ap in instance_grid()? {
        let h2 = compute_h2(&ap).map_err(|e| e.to_string())?;
        match oracle_h2(&ap) {
            Ok(sq) if sq.invariant_factors == h2.invariant_factors() => agreed += 1,
            Ok(sq) => {
                return Err(format!(
                    "{}: oracle {:?} != compute_h2 {:?}",
                    describe(&ap),
                    sq.invariant_factors,
                    h2.invariant_factors()
                ))
            }
            Err(ComplexError::SizeGuardExceeded { .. }) => guarded += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!("{agreed} agree, {guarded} beyond the oracle guard"))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome, Option<u64>); 10] = [
        (1, criterion1, Some(10)),
        (2, criterion2, Some(5)),
        (3, criterion3, Some(10)),
        (4, criterion4, Some(60)),
        (5, criterion5, Some(60)),
        (6, criterion6, Some(60)),
        (7, criterion7, Some(120)),
        (8, criterion8, Some(120)),
        (9, criterion9, Some(120)),
        (10, criterion10, None),
    ];
    let mut failed = 0;
    for (n, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(s) => {
                Err(format!("took {:.2}s, budget {s}s", elapsed.as_secs_f64()))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {n}: PASS ({msg}; {:.2}s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg}; {:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
