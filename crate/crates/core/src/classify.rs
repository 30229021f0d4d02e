//! Explicit classification families for cyclic coefficient groups.
//!
//! Each case emits a family of `(f0, γ)` parameters together with, where one is
//! known, a closed form for `f_{f0}`. Families are never trusted: every report
//! re-derives `H^2` through [`compute_h2`] (and the complex oracle when small enough)
//! and checks the family against it class by class.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{
    md, subquotient, FinAbGroup, GroupElement, GroupError, Homomorphism, Subquotient,
};
use crate::actions::{
    enumerate_action_pairs_cyclic, validate_action_pair, ActionError, ActionPair,
};
use crate::cohomology::{
    compute_h2, construct_f, is_coboundary, maps_fg, poly_data, CocycleParams, CohomologyError,
};
use crate::complex::{oracle_h2, ComplexError};
use crate::cycleset::{binom, CycleSetError, CycleSetParams};

/// Families larger than this skip the pairwise `is_coboundary` sweep (coset check still runs).
pub const PAIRWISE_GUARD: usize = 81;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    CycleSet(#[from] CycleSetError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

type Result<T> = std::result::Result<T, ClassifyError>;

fn violated<T>(msg: impl Into<String>) -> Result<T> {
    Err(ClassifyError::HypothesisViolated(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckOutcome {
    Pass,
    Fail,
    Skipped,
}

impl CheckOutcome {
    fn of(ok: bool) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParameterFamily {
    /// Set-builder description with the case's constants substituted.
    pub symbolic: String,
    pub closed_form_f: Option<String>,
    pub members: Vec<CocycleParams>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub case_id: String,
    pub p: i64,
    pub nu: u32,
    pub eta: u32,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    pub parameter_family: ParameterFamily,
    pub h2_order: u128,
    pub invariant_factors: Vec<i64>,
    pub oracle_order: Option<u128>,
    pub cross_checks: BTreeMap<String, CheckOutcome>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.cross_checks.values().all(|c| *c != CheckOutcome::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.cross_checks
            .iter()
            .filter(|(_, c)| **c == CheckOutcome::Fail)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// `f(h, h')` from the case's closed form, given the family coordinates `z` and `f0`.
type ClosedForm = Box<dyn Fn(&[i64], &GroupElement, i64, i64) -> GroupElement>;
type MemberFn = Box<dyn Fn(&[i64]) -> (Vec<i64>, Vec<i64>)>;

struct FamilySpec {
    case_id: String,
    symbolic: String,
    ranges: Vec<i64>,
    member: MemberFn,
    closed_form: Option<(String, ClosedForm)>,
    /// Order predicted by the case's own group-theoretic formula, if it states one.
    formula_order: Option<u128>,
}

fn pw(p: i64, e: u32) -> i64 {
    p.pow(e)
}

fn valuation(mut x: i64, p: i64) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn pow_mod(base: i64, e: u32, n: i64) -> i128 {
    let mut acc = md(1, n) as i128;
    for _ in 0..e {
        acc = acc * md(base as i128, n) as i128 % n as i128;
    }
    acc
}

/// `A_{hl} = Σ_{j=l}^{h-1} (-1)^j C(j, l)`.
pub fn a_hl(h: i64, l: i64) -> i128 {
    (l..h)
        .map(|j| {
            if j % 2 == 0 {
                binom(j, l)
            } else {
                -binom(j, l)
            }
        })
        .sum()
}

/// `Σ_{l<h} coef(h, l) q^l f0 h'` in `Z_n`, for the binomial-sum closed forms.
fn binomial_sum(n: i64, q: i64, h: i64, hp: i64, f0: i64, coef: impl Fn(i64, i64) -> i128) -> i64 {
    let mut s: i128 = 0;
    for l in 0..h {
        let c = md(coef(h, l), n) as i128;
        s = (s + c * pow_mod(q, l as u32, n)) % n as i128;
    }
    md(s * f0 as i128 % n as i128 * hp as i128, n)
}

fn cyclic_closed(n: i64, f: impl Fn(&[i64], i64, i64, i64) -> i128 + 'static) -> ClosedForm {
    Box::new(move |z, f0, h, hp| GroupElement {
        coords: vec![md(f(z, f0.coords[0], h, hp), n)],
    })
}

fn f0hh(n: i64) -> (String, ClosedForm) {
    (
        "f0 h h'".into(),
        cyclic_closed(n, |_, f0, h, hp| f0 as i128 * h as i128 * hp as i128),
    )
}

fn binomial_closed(n: i64, q: i64, label: String) -> (String, ClosedForm) {
    (
        label,
        cyclic_closed(n, move |_, f0, h, hp| {
            binomial_sum(n, q, h, hp, f0, |h, l| binom(h, l + 1)) as i128
        }),
    )
}

fn alternating_closed(n: i64, q: i64, label: String) -> (String, ClosedForm) {
    (
        label,
        cyclic_closed(n, move |_, f0, h, hp| {
            binomial_sum(n, q, h, hp, f0, a_hl) as i128
        }),
    )
}

fn parity_closed(n: i64) -> (String, ClosedForm) {
    (
        "f0 h' for odd h, 0 for even h".into(),
        cyclic_closed(n, |_, f0, h, hp| {
            if h % 2 == 1 {
                f0 as i128 * hp as i128
            } else {
                0
            }
        }),
    )
}

fn zero_closed(n: i64) -> (String, ClosedForm) {
    ("0".into(), cyclic_closed(n, |_, _, _, _| 0))
}

fn cyclic_member(f: impl Fn(&[i64]) -> (i64, i64) + 'static) -> MemberFn {
    Box::new(move |z| {
        let (a, b) = f(z);
        (vec![a], vec![b])
    })
}

/// Split `a = ±(1 + q k)` for `p = 2`; the sign is read off `a mod 4` (needs `4 | q`).
fn split_signed(a: i64, n: i64, q: i64) -> (bool, i64) {
    if a % 4 == 1 {
        (true, (a - 1) / q)
    } else {
        (false, (n - a - 1) / q)
    }
}

fn trivial_spec(p: i64, eta: u32, r: u32, a: i64) -> Result<FamilySpec> {
    let n = pw(p, r);
    let a = md(a as i128, n);
    let spec = |case_id: String,
                symbolic: String,
                ranges: Vec<i64>,
                member: MemberFn,
                closed: (String, ClosedForm)| FamilySpec {
        case_id,
        symbolic,
        ranges,
        member,
        closed_form: Some(closed),
        formula_order: None,
    };
    let in_first = if p == 2 { r <= eta.min(2) } else { r <= eta };
    let in_second = if p == 2 { (eta, r) == (1, 2) } else { r > eta };
    if in_first {
        if md(a as i128 - 1, p) != 0 {
            return violated(format!("a = {a} is not 1 mod {p}"));
        }
        let k = (a - 1) / p;
        if k == 0 {
            return Ok(spec(
                "trivialH/r<=eta/k=0".into(),
                format!("{{(z1, z2) : 0 <= z1, z2 < {n}}}"),
                vec![n, n],
                cyclic_member(|z| (z[0], z[1])),
                f0hh(n),
            ));
        }
        let u = valuation(k, p);
        let s = k / pw(p, u);
        let g = pw(p, r - u - 1);
        let q = pw(p, u + 1) * s;
        return Ok(spec(
            format!("trivialH/r<=eta/k!=0 (u={u}, s={s})"),
            format!("{{(z1, {g} z2) : 0 <= z1, z2 < {}}}", pw(p, u + 1)),
            vec![pw(p, u + 1), pw(p, u + 1)],
            cyclic_member(move |z| (z[0], g * z[1])),
            binomial_closed(n, q, format!("sum_l C(h,l+1) {p}^({}l) {s}^l f0 h'", u + 1)),
        ));
    }
    if in_second {
        let q = pw(p, r - eta);
        if md(a as i128 - 1, q) != 0 {
            return violated(format!("a = {a} is not 1 mod {q}"));
        }
        let k = (a - 1) / q;
        let pe = pw(p, eta);
        if k == 0 {
            return Ok(spec(
                "trivialH/r>eta/k=0".into(),
                format!("{{({q} z1, z2) : 0 <= z1, z2 < {pe}}}"),
                vec![pe, pe],
                cyclic_member(move |z| (q * z[0], z[1])),
                f0hh(n),
            ));
        }
        let u = valuation(k, p);
        let s = k / pw(p, u);
        if p == 2 {
            return Ok(spec(
                "trivialH/r>eta/k!=0/p=2".into(),
                "{(2 z1 - z2, z2) : 0 <= z1, z2 < 2}".into(),
                vec![2, 2],
                cyclic_member(|z| (2 * z[0] - z[1], z[1])),
                f0hh(n),
            ));
        }
        if r + u >= 2 * eta {
            let g = pw(p, eta - u);
            return Ok(spec(
                format!("trivialH/r>eta/k!=0/r+u>=2eta (u={u}, s={s})"),
                format!(
                    "{{({q} (z1 - {s} z2), {g} z2) : 0 <= z1 < {pe}, 0 <= z2 < {}}}",
                    pw(p, u)
                ),
                vec![pe, pw(p, u)],
                cyclic_member(move |z| (q * (z[0] - s * z[1]), g * z[1])),
                f0hh(n),
            ));
        }
        let g = pw(p, eta - u);
        let e = r - eta + u;
        return Ok(spec(
            format!("trivialH/r>eta/k!=0/r+u<2eta (u={u}, s={s})"),
            format!(
                "{{({} z1, {g} (z2 - z1)) : 0 <= z1 < {}, 0 <= z2 < {}}}",
                q * s,
                pw(p, u),
                pw(p, e)
            ),
            vec![pw(p, u), pw(p, e)],
            cyclic_member(move |z| (q * s * z[0], g * (z[1] - z[0]))),
            binomial_closed(
                n,
                pw(p, e) * s,
                format!("sum_l {p}^({e}l) {s}^l C(h,l+1) f0 h'"),
            ),
        ));
    }
    // p = 2 and r >= 3 from here on.
    let two = |e: u32| pw(2, e);
    let anti = || -> (i64, MemberFn) {
        let (g1, g2) = (two(r - 1), two(eta - 1));
        (2, cyclic_member(move |z| (z[0], g1 * z[1] + g2 * z[0])))
    };
    let anti_symbolic = format!(
        "{{(z1, {} z2 + {} z1) : 0 <= z1, z2 < 2}}",
        two(r - 1),
        two(eta - 1)
    );
    if r <= eta + 1 {
        let (plus, k) = split_signed(a, n, 4);
        if k == 0 && plus {
            if r <= eta {
                return Ok(spec(
                    "trivialH/p=2/3<=r<=eta+1/a=1/r<=eta".into(),
                    format!("{{(z1, z2) : 0 <= z1, z2 < {n}}}"),
                    vec![n, n],
                    cyclic_member(|z| (z[0], z[1])),
                    f0hh(n),
                ));
            }
            return Ok(spec(
                "trivialH/p=2/3<=r<=eta+1/a=1/r=eta+1".into(),
                format!("{{(2 z1, z2) : 0 <= z1, z2 < {}}}", two(r - 1)),
                vec![two(r - 1), two(r - 1)],
                cyclic_member(|z| (2 * z[0], z[1])),
                f0hh(n),
            ));
        }
        if k == 0 {
            let (c, member) = anti();
            return Ok(spec(
                "trivialH/p=2/3<=r<=eta+1/a=-1".into(),
                anti_symbolic,
                vec![c, c],
                member,
                parity_closed(n),
            ));
        }
        let u = valuation(k, 2);
        let s = k / two(u);
        let q = 4 * k;
        if plus {
            let label = format!("sum_l C(h,l+1) 4^l {k}^l f0 h'");
            if r <= eta {
                let g = two(r - u - 2);
                return Ok(spec(
                    format!("trivialH/p=2/3<=r<=eta+1/a=1+4k/r<=eta (u={u}, s={s})"),
                    format!("{{(z1, {g} z2) : 0 <= z1, z2 < {}}}", two(u + 2)),
                    vec![two(u + 2), two(u + 2)],
                    cyclic_member(move |z| (z[0], g * z[1])),
                    binomial_closed(n, q, label),
                ));
            }
            let (g1, g2) = (two(r - u - 2), two(eta - u - 1));
            return Ok(spec(
                format!("trivialH/p=2/3<=r<=eta+1/a=1+4k/r=eta+1 (u={u}, s={s})"),
                format!(
                    "{{(2 z1, {g1} z2 - {g2} z1) : 0 <= z1 < {}, 0 <= z2 < {}}}",
                    two(u + 1),
                    two(u + 2)
                ),
                vec![two(u + 1), two(u + 2)],
                cyclic_member(move |z| (2 * z[0], g1 * z[1] - g2 * z[0])),
                binomial_closed(n, q, label),
            ));
        }
        let (c, member) = anti();
        return Ok(spec(
            format!("trivialH/p=2/3<=r<=eta+1/a=-1-4k (u={u}, s={s})"),
            anti_symbolic,
            vec![c, c],
            member,
            alternating_closed(n, q, format!("sum_l A_hl 4^l {k}^l f0 h'")),
        ));
    }
    // p = 2, r > eta + 1.
    let q = two(r - eta);
    let (plus, k) = split_signed(a, n, q);
    let pe = two(eta);
    if k == 0 && plus {
        return Ok(spec(
            "trivialH/p=2/r>eta+1/a=1".into(),
            format!("{{({q} z1, z2) : 0 <= z1, z2 < {pe}}}"),
            vec![pe, pe],
            cyclic_member(move |z| (q * z[0], z[1])),
            f0hh(n),
        ));
    }
    if k == 0 {
        let (c, member) = anti();
        return Ok(spec(
            "trivialH/p=2/r>eta+1/a=-1".into(),
            anti_symbolic,
            vec![c, c],
            member,
            parity_closed(n),
        ));
    }
    let u = valuation(k, 2);
    let s = k / two(u);
    let g_odd = two(r - 1);
    let odd_k = || {
        spec(
            format!("trivialH/p=2/r>eta+1/a=-1-qk/k odd (u={u}, s={s})"),
            format!("{{(0, {g_odd} z2) : 0 <= z2 < 2}}"),
            vec![2],
            cyclic_member(move |z| (0, g_odd * z[0])),
            zero_closed(n),
        )
    };
    if r + u > 2 * eta {
        if plus {
            let g = two(eta - u);
            return Ok(spec(
                format!("trivialH/p=2/r>eta+1/r+u>2eta/a=1+qk (u={u}, s={s})"),
                format!(
                    "{{({q} (z1 - {s} z2), {g} z2) : 0 <= z1 < {pe}, 0 <= z2 < {}}}",
                    two(u)
                ),
                vec![pe, two(u)],
                cyclic_member(move |z| (q * (z[0] - s * z[1]), g * z[1])),
                f0hh(n),
            ));
        }
        if k % 2 == 1 {
            return Ok(odd_k());
        }
        let c = two(r - eta - 1) * k;
        let (g1, g2) = (two(r - 1), two(eta - 1));
        return Ok(spec(
            format!("trivialH/p=2/r>eta+1/r+u>2eta/a=-1-qk/k even (u={u}, s={s})"),
            format!("{{(z1 + {c} z1, {g1} z2 + {g2} z1) : 0 <= z1, z2 < 2}}"),
            vec![2, 2],
            cyclic_member(move |z| (z[0] + c * z[0], g1 * z[1] + g2 * z[0])),
            (
                format!("z1 h' + {c} z1 h h' for odd h, -{c} z1 h h' for even h"),
                cyclic_closed(n, move |z, _, h, hp| {
                    let hh = z[0] as i128 * h as i128 * hp as i128 * c as i128;
                    if h % 2 == 1 {
                        z[0] as i128 * hp as i128 + hh
                    } else {
                        -hh
                    }
                }),
            ),
        ));
    }
    if plus {
        let g = two(eta - u);
        let e = r + u - eta;
        return Ok(spec(
            format!("trivialH/p=2/r>eta+1/r+u<=2eta/a=1+qk (u={u}, s={s})"),
            format!(
                "{{({} z1, {g} (z2 - z1)) : 0 <= z1 < {}, 0 <= z2 < {}}}",
                q * s,
                two(u),
                two(e)
            ),
            vec![two(u), two(e)],
            cyclic_member(move |z| (q * s * z[0], g * (z[1] - z[0]))),
            binomial_closed(n, q * k, format!("sum_l C(h,l+1) {q}^l {k}^l f0 h'")),
        ));
    }
    if k % 2 == 1 {
        return Ok(odd_k());
    }
    let c = 1 - two(r - eta - 1) * k;
    let (g1, g2) = (two(r - 1), two(eta - 1) * c);
    Ok(spec(
        format!("trivialH/p=2/r>eta+1/r+u<=2eta/a=-1-qk/k even (u={u}, s={s})"),
        format!("{{(z1, {g1} z2 + {g2} z1) : 0 <= z1, z2 < 2}}"),
        vec![2, 2],
        cyclic_member(move |z| (z[0], g1 * z[1] + g2 * z[0])),
        alternating_closed(n, q * k, format!("sum_l A_hl {q}^l {k}^l f0 h'")),
    ))
}

fn enumerate_ranges(ranges: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &r in ranges {
        out = out
            .into_iter()
            .flat_map(|z| {
                (0..r).map(move |v| {
                    let mut w = z.clone();
                    w.push(v);
                    w
                })
            })
            .collect();
    }
    out
}

/// Smallest-index representative of `x + im G`, with `im G` listed explicitly.
fn coset_key(pair: &FinAbGroup, image: &[GroupElement], x: &GroupElement) -> usize {
    image
        .iter()
        .map(|y| pair.index_of(&pair.add(x, y)))
        .min()
        .expect("image contains zero")
}

fn image_elements(ap: &ActionPair, g_map: &Homomorphism) -> Result<Vec<GroupElement>> {
    let set: HashSet<GroupElement> = ap
        .group
        .enumerate_elements()?
        .map(|y| g_map.apply(&y))
        .collect();
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort();
    Ok(v)
}

fn validate(ap: &ActionPair, spec: FamilySpec) -> Result<CaseReport> {
    let g = &ap.group;
    let pair = g.power(2);
    let mut checks = BTreeMap::new();
    let zs = enumerate_ranges(&spec.ranges);
    let members: Vec<CocycleParams> = zs
        .iter()
        .map(|z| {
            let (f0, gamma) = (spec.member)(z);
            CocycleParams::new(g.elem(&f0), g.elem(&gamma))
        })
        .collect();

    let h2 = compute_h2(ap)?;
    let order = h2.order();
    checks.insert(
        "cardinality".to_string(),
        CheckOutcome::of(members.len() as u128 == order),
    );
    if let Some(fo) = spec.formula_order {
        checks.insert("formula_order".to_string(), CheckOutcome::of(fo == order));
    }
    let oracle_order = match oracle_h2(ap) {
        Ok(sq) => {
            let ok = sq.invariant_factors == h2.subquotient.invariant_factors;
            checks.insert("oracle".to_string(), CheckOutcome::of(ok));
            Some(sq.order)
        }
        Err(ComplexError::SizeGuardExceeded { .. }) => {
            checks.insert("oracle".to_string(), CheckOutcome::Skipped);
            None
        }
        Err(e) => return Err(e.into()),
    };

    // Admissibility and the closed form of f, member by member.
    let mut admissible = true;
    let mut closed_ok = true;
    let m = ap.params.modulus;
    for (z, cp) in zs.iter().zip(&members) {
        match construct_f(ap, cp) {
            Ok(sc) => {
                if let Some((_, cf)) = &spec.closed_form {
                    for h in 0..m {
                        for hp in 0..m {
                            if cf(z, &cp.f0, h, hp) != *sc.f_table.get(&[h, hp]) {
                                closed_ok = false;
                            }
                        }
                    }
                }
            }
            Err(CohomologyError::ParamsNotAdmissible(_)) => {
                admissible = false;
                closed_ok = false;
            }
            Err(e) => return Err(e.into()),
        }
    }
    checks.insert("admissible".to_string(), CheckOutcome::of(admissible));
    checks.insert(
        "closed_form_f".to_string(),
        if spec.closed_form.is_some() {
            CheckOutcome::of(closed_ok)
        } else {
            CheckOutcome::Skipped
        },
    );

    // Distinct classes, and the same classes as the transversal of compute_h2.
    let (_, _, g_map) = maps_fg(ap)?;
    let image = image_elements(ap, &g_map)?;
    let keys: HashSet<usize> = members
        .iter()
        .map(|cp| coset_key(&pair, &image, &cp.to_pair()))
        .collect();
    checks.insert(
        "distinct_mod_image".to_string(),
        CheckOutcome::of(keys.len() == members.len()),
    );
    let reference: HashSet<usize> = h2
        .subquotient
        .class_representatives(&pair)
        .iter()
        .map(|x| coset_key(&pair, &image, x))
        .collect();
    checks.insert(
        "set_equality_mod_image".to_string(),
        CheckOutcome::of(admissible && keys == reference),
    );
    let pairwise = if !admissible {
        CheckOutcome::Fail
    } else if members.len() > PAIRWISE_GUARD {
        CheckOutcome::Skipped
    } else {
        let mut ok = true;
        'outer: for (i, x) in members.iter().enumerate() {
            for y in &members[i + 1..] {
                let d = CocycleParams::new(g.sub(&x.f0, &y.f0), g.sub(&x.gamma, &y.gamma));
                if is_coboundary(ap, &d)?.is_some() {
                    ok = false;
                    break 'outer;
                }
            }
        }
        CheckOutcome::of(ok)
    };
    checks.insert("pairwise_non_equivalent".to_string(), pairwise);

    Ok(CaseReport {
        case_id: spec.case_id,
        p: ap.params.p,
        nu: ap.params.nu,
        eta: ap.params.eta,
        a: ap.a.matrix().to_vec(),
        b: ap.b.matrix().to_vec(),
        parameter_family: ParameterFamily {
            symbolic: spec.symbolic,
            closed_form_f: spec.closed_form.map(|(s, _)| s),
            members,
        },
        h2_order: order,
        invariant_factors: h2.subquotient.invariant_factors.clone(),
        oracle_order,
        cross_checks: checks,
    })
}

/// Trivial `H` (`nu = eta`), `I = Z_{p^r}`, `B = 0`: one report per admissible `A = a Id`.
pub fn classify_trivial_h_cyclic(p: i64, eta: u32, r: u32) -> Result<Vec<CaseReport>> {
    if r == 0 || eta == 0 {
        return violated("need eta >= 1 and r >= 1");
    }
    let par = CycleSetParams::new(p, eta, eta)?;
    let n = pw(p, r);
    let mut out = Vec::new();
    for (ap, _) in enumerate_action_pairs_cyclic(&par, n)? {
        if !ap.b_is_zero() {
            continue;
        }
        let a = ap.a.matrix()[0][0];
        out.push(validate(&ap, trivial_spec(p, eta, r, a)?)?);
    }
    Ok(out)
}

/// `t1`, `t2` for `I = Z_{p^r}`, `A = a`, `B = b`; `t2` is capped at `r`.
pub fn t_values(p: i64, r: u32, a: i64, b: i64) -> (u32, u32) {
    let n = pw(p, r);
    let k = md(a as i128 - 1, n) / p;
    // k = 0 behaves like u + 1 = r: A acts trivially.
    let (u, v) = if k == 0 {
        (r - 1, 1)
    } else {
        let u = valuation(k, p);
        (u, k / pw(p, u))
    };
    let b = md(b as i128, n);
    if b == 0 {
        return (u + 1, u + 1);
    }
    let s = valuation(b, p);
    let d = b / pw(p, s);
    let t1 = (u + 1).min(s);
    let t2 = if s != u + 1 {
        t1
    } else {
        let w = md(
            v as i128 + d as i128 + pw(p, s) as i128 * v as i128 * d as i128,
            n,
        );
        if w == 0 {
            r
        } else {
            s + valuation(w, p)
        }
    };
    (t1.min(r), t2.min(r))
}

/// `H` general, `I = Z_{p^r}` with `r <= nu`, `A = a`, `B = b`.
pub fn classify_yleft_nonzero_cyclic(
    p: i64,
    nu: u32,
    eta: u32,
    r: u32,
    a: i64,
    b: i64,
) -> Result<CaseReport> {
    if p == 2 {
        return violated("p must be odd");
    }
    if r == 0 || r > nu {
        return violated(format!("need 1 <= r <= nu, got r = {r}, nu = {nu}"));
    }
    let par = CycleSetParams::new(p, nu, eta)?;
    let n = pw(p, r);
    let (a, b) = (md(a as i128, n), md(b as i128, n));
    if md(a as i128 - 1, p) != 0 {
        return violated(format!("a = {a} is not 1 mod {p}"));
    }
    if b != 0 {
        let s = valuation(b, p);
        if !(s < r && r <= 2 * s) {
            return violated(format!("b = {b} needs s < r <= 2s"));
        }
    }
    let group = FinAbGroup::new(vec![n])?;
    let ap = ActionPair::from_matrices(par, &group, vec![vec![a]], vec![vec![b]])?;
    let report = validate_action_pair(&ap);
    if !report.is_empty() {
        return violated(format!("{} action identity violations", report.len()));
    }
    let (t1, t2) = t_values(p, r, a, b);
    let g = pw(p, r - t1);
    let spec = FamilySpec {
        case_id: format!("yleft/cyclic (t1={t1}, t2={t2})"),
        symbolic: format!(
            "{{(z1, {g} z2) : 0 <= z1 < {}, 0 <= z2 < {}}}",
            pw(p, t2),
            pw(p, t1)
        ),
        ranges: vec![pw(p, t2), pw(p, t1)],
        member: cyclic_member(move |z| (z[0], g * z[1])),
        closed_form: None,
        formula_order: Some(pw(p, t1 + t2) as u128),
    };
    let mut rep = validate(&ap, spec)?;
    shortcut_check(&ap, &mut rep)?;
    Ok(rep)
}

/// The action pair `A = [[1, a], [0, 1]]`, `B = [[0, b], [0, 0]]` on `Z_{p^r}²`, validated.
pub fn matrix_example_action(
    p: i64,
    nu: u32,
    eta: u32,
    r: u32,
    a: i64,
    b: i64,
) -> Result<ActionPair> {
    let par = CycleSetParams::new(p, nu, eta)?;
    let n = pw(p, r);
    let group = FinAbGroup::new(vec![n, n])?;
    let ap = ActionPair::from_matrices(
        par,
        &group,
        vec![vec![1, a], vec![0, 1]],
        vec![vec![0, b], vec![0, 0]],
    )?;
    let report = validate_action_pair(&ap);
    if !report.is_empty() {
        return violated(format!("{} action identity violations", report.len()));
    }
    Ok(ap)
}

/// `H` general, `I = Z_{p^r}²`, `A = [[1, a], [0, 1]]`, `B = [[0, b], [0, 0]]`.
pub fn classify_matrix_example(
    p: i64,
    nu: u32,
    eta: u32,
    r: u32,
    a: i64,
    b: i64,
) -> Result<CaseReport> {
    if p == 2 {
        return violated("p must be odd");
    }
    if r == 0 || r > nu {
        return violated(format!("need 1 <= r <= nu, got r = {r}, nu = {nu}"));
    }
    let ap = matrix_example_action(p, nu, eta, r, a, b)?;
    let n = pw(p, r);
    let (a, b) = (md(a as i128, n), md(b as i128, n));
    let c = md(a as i128 + b as i128, n);
    if a == 0 || b == 0 || c == 0 {
        return violated(format!("a, b, a + b must be non-zero mod {n}"));
    }
    let c2 = valuation(c, p);
    let t = valuation(a, p).min(valuation(b, p));
    let g = pw(p, r - t);
    let spec = FamilySpec {
        case_id: format!("matrix (c2={c2}, t={t})"),
        symbolic: format!(
            "{{((z1, z2), (z3, {g} z4)) : 0 <= z1 < {}, 0 <= z2, z3 < {n}, 0 <= z4 < {}}}",
            pw(p, c2),
            pw(p, t)
        ),
        ranges: vec![pw(p, c2), n, n, pw(p, t)],
        member: Box::new(move |z| (vec![z[0], z[1]], vec![z[2], g * z[3]])),
        closed_form: None,
        formula_order: Some(pw(p, c2 + 2 * r + t) as u128),
    };
    let mut rep = validate(&ap, spec)?;
    shortcut_check(&ap, &mut rep)?;
    Ok(rep)
}

fn shortcut_check(ap: &ActionPair, rep: &mut CaseReport) -> Result<()> {
    let outcome = match h2_shortcut_pnu_zero(ap) {
        Ok(sq) => CheckOutcome::of(sq.invariant_factors == rep.invariant_factors),
        Err(ClassifyError::HypothesisViolated(_)) => CheckOutcome::Skipped,
        Err(e) => return Err(e),
    };
    rep.cross_checks.insert("shortcut".to_string(), outcome);
    Ok(())
}

/// `H^2 = I / im(Id − A − BA) ⊕ (ker(Id − A) ∩ ker B)` when `p^nu I = 0`, `P(A) = 0`
/// and `B R(A) = 0`; realised inside `I ⊕ I` so the transversal is a valid `(f0, γ)` list.
pub fn h2_shortcut_pnu_zero(ap: &ActionPair) -> Result<Subquotient> {
    let g = &ap.group;
    if !Homomorphism::scalar(g, ap.params.pnu).is_zero() {
        return violated("p^nu I != 0");
    }
    let pd = poly_data(ap)?;
    if !pd.p_a.is_zero() {
        return violated("P(A) != 0");
    }
    if !ap.b.compose(&pd.r_a)?.is_zero() {
        return violated("B R(A) != 0");
    }
    let id = Homomorphism::identity(g);
    let zero = Homomorphism::zero(g, g);
    let id_minus_a = id.sub(&ap.a)?;
    let ba = ap.b.compose(&ap.a)?;
    let k1 = zero.hjoin(&id_minus_a)?;
    let k2 = zero.hjoin(&ap.b)?;
    let img = Homomorphism::stack(&[id_minus_a.sub(&ba)?, zero.clone()])?;
    Ok(subquotient(&g.power(2), &[k1, k2], &img)?)
}

/// `A = Id`, `B = 0`: `H^2 = I / p^nu I ⊕ I[p^nu]`, realised inside `I ⊕ I`.
pub fn h2_identity_closed_form(ap: &ActionPair) -> Result<Subquotient> {
    let g = &ap.group;
    if ap.a != Homomorphism::identity(g) || !ap.b_is_zero() {
        return violated("needs A = Id and B = 0");
    }
    let pnu = Homomorphism::scalar(g, ap.params.pnu);
    let zero = Homomorphism::zero(g, g);
    let k = zero.hjoin(&pnu)?;
    let img = Homomorphism::stack(&[pnu, zero])?;
    Ok(subquotient(&g.power(2), &[k], &img)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_pass(reports: &[CaseReport]) {
        for r in reports {
            assert!(r.passed(), "{} a={:?}: {:?}", r.case_id, r.a, r.failures());
        }
    }

    #[test]
    fn a_hl_closed_values() {
        for h in 0..40 {
            assert_eq!(a_hl(h, 0), (h % 2) as i128, "A_{{{h},0}}");
            let e = if h % 2 == 0 {
                -(h as i128) / 2
            } else {
                (h as i128 - 1) / 2
            };
            assert_eq!(a_hl(h, 1), e, "A_{{{h},1}}");
        }
    }

    #[test]
    fn trivial_h_odd_examples() {
        let r = classify_trivial_h_cyclic(3, 1, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].h2_order, 9);
        assert_eq!(r[0].parameter_family.members.len(), 9);
        assert_all_pass(&r);

        let r = classify_trivial_h_cyclic(3, 2, 1).unwrap();
        assert_eq!(
            r[0].parameter_family.symbolic,
            "{(z1, z2) : 0 <= z1, z2 < 3}"
        );
        assert_all_pass(&r);

        let r = classify_trivial_h_cyclic(3, 1, 2).unwrap();
        assert_eq!(r.len(), 3);
        let k1 = r.iter().find(|c| c.a[0][0] == 4).unwrap();
        assert!(k1.case_id.contains("r+u>=2eta"));
        assert_all_pass(&r);
    }

    #[test]
    fn trivial_h_grid() {
        for (p, eta, r) in [
            (3, 2, 2),
            (2, 1, 1),
            (2, 1, 2),
            (2, 2, 1),
            (2, 2, 2),
            (2, 2, 3),
            (5, 1, 1),
        ] {
            let reps = classify_trivial_h_cyclic(p, eta, r).unwrap();
            assert!(!reps.is_empty());
            assert_all_pass(&reps);
        }
    }

    #[test]
    fn trivial_h_p2_large_r() {
        for (eta, r) in [(1, 3), (1, 4), (2, 4), (3, 4), (3, 5)] {
            let reps = classify_trivial_h_cyclic(2, eta, r).unwrap();
            assert_all_pass(&reps);
        }
    }

    #[test]
    fn trivial_h_odd_r_gt_eta_small_u() {
        // r + u < 2 eta needs eta >= 2 with r > eta.
        let reps = classify_trivial_h_cyclic(3, 2, 3).unwrap();
        assert!(reps.iter().any(|c| c.case_id.contains("r+u<2eta")));
        assert_all_pass(&reps);
    }

    #[test]
    fn yleft_t_values() {
        assert_eq!(t_values(3, 2, 4, 0), (1, 1));
        assert_eq!(t_values(3, 2, 4, 3), (1, 1));
        // s = u + 1 = 1, v + d + p^s v d = 1 + 2 + 6 = 9: uncapped t2 = 3 > r.
        assert_eq!(t_values(3, 2, 4, 6), (1, 2));
        assert_eq!(t_values(3, 2, 1, 0), (2, 2));
    }

    #[test]
    fn yleft_examples() {
        let rep = classify_yleft_nonzero_cyclic(3, 2, 2, 2, 4, 3).unwrap();
        assert_eq!(rep.h2_order, 9);
        assert_eq!(rep.oracle_order, Some(9));
        assert!(rep.passed(), "{:?}", rep.failures());
        for b in [0, 6] {
            let rep = classify_yleft_nonzero_cyclic(3, 2, 2, 2, 4, b).unwrap();
            assert!(rep.passed(), "b={b}: {:?}", rep.failures());
        }
        assert!(matches!(
            classify_yleft_nonzero_cyclic(3, 1, 1, 2, 4, 3),
            Err(ClassifyError::HypothesisViolated(_))
        ));
        assert!(matches!(
            classify_yleft_nonzero_cyclic(3, 2, 2, 2, 2, 0),
            Err(ClassifyError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn matrix_examples() {
        let rep = classify_matrix_example(3, 1, 1, 1, 1, 1).unwrap();
        assert_eq!(rep.h2_order, 9);
        assert_eq!(rep.oracle_order, Some(9));
        assert!(rep.passed(), "{:?}", rep.failures());
        let rep = classify_matrix_example(5, 1, 1, 1, 1, 1).unwrap();
        assert_eq!(rep.h2_order, 25);
        assert!(rep.passed(), "{:?}", rep.failures());
        assert!(matches!(
            classify_matrix_example(3, 1, 1, 1, 1, 2),
            Err(ClassifyError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn shortcut_cases() {
        let par = CycleSetParams::new(3, 1, 1).unwrap();
        let g = FinAbGroup::new(vec![3]).unwrap();
        let ap = ActionPair::trivial(par, &g).unwrap();
        let sq = h2_shortcut_pnu_zero(&ap).unwrap();
        assert_eq!(sq.invariant_factors, vec![3, 3]);

        let g2 = FinAbGroup::new(vec![3, 3]).unwrap();
        let ap =
            ActionPair::from_matrices(par, &g2, vec![vec![1, 1], vec![0, 1]], vec![vec![0; 2]; 2])
                .unwrap();
        let sq = h2_shortcut_pnu_zero(&ap).unwrap();
        assert_eq!(sq.invariant_factors, vec![3, 3]);
        assert_eq!(
            sq.invariant_factors,
            compute_h2(&ap).unwrap().invariant_factors()
        );

        let ap = ActionPair::trivial(par, &FinAbGroup::new(vec![9]).unwrap()).unwrap();
        assert_eq!(
            h2_identity_closed_form(&ap).unwrap().invariant_factors,
            vec![3, 3]
        );
        assert!(matches!(
            h2_shortcut_pnu_zero(&ap),
            Err(ClassifyError::HypothesisViolated(_))
        ));
    }
}
