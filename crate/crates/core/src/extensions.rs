//! Extensions `I ×_{β,f} H` as concrete finite linear cycle sets, their defining
//! conditions, and equivalence of extensions sharing an action pair.

use thiserror::Error;

use crate::abgroup::{FinAbGroup, GroupElement, GroupError};
use crate::actions::{verify_eqq123, ActionError, ActionPair};
use crate::cohomology::{self, CocycleParams, CohomologyError};
use crate::complex::{self, Cochain, ComplexError, TwoCochain};
use crate::cycleset::{
    socle, verify_cycle_set, CycleSetError, CycleSetParams, FiniteCycleSetTable,
};
use crate::{Report, Violation};

/// Largest number of maps `φ : H -> I` tried by the literal equivalence search.
pub const PHI_SEARCH_GUARD: u128 = 1_000_000;
/// Largest `|I| · p^eta` materialized as a table.
pub const EXTENSION_GUARD: u128 = crate::cycleset::TABLE_GUARD as u128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("(β, f) is not a 2-cocycle")]
    NotACocycle,
    #[error("extensions use different action pairs")]
    ActionMismatch,
    #[error("size guard exceeded: {size} > {guard}")]
    SizeGuardExceeded { size: u128, guard: u128 },
    #[error("verification routes disagree: {0}")]
    RouteDisagreement(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    CycleSet(#[from] CycleSetError),
}

type Result<T> = std::result::Result<T, ExtensionError>;

/// `β` and `f` here are the maps of the extension itself (already sign-adjusted).
#[derive(Debug, Clone)]
pub struct ExtensionData {
    pub params: CycleSetParams,
    pub group: FinAbGroup,
    pub action: ActionPair,
    pub beta: Cochain,
    pub f: Cochain,
}

/// `y + w_h`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionElement {
    pub y: GroupElement,
    pub h: i64,
}

impl ExtensionElement {
    pub fn new(y: GroupElement, h: i64) -> Self {
        ExtensionElement { y, h }
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub data: ExtensionData,
    pub table: FiniteCycleSetTable,
}

impl ExtensionData {
    pub fn order(&self) -> u128 {
        self.group.order() * self.params.modulus as u128
    }

    /// Table index `h |I| + index(y)`.
    pub fn index_of(&self, x: &ExtensionElement) -> usize {
        x.h as usize * self.group.order() as usize + self.group.index_of(&x.y)
    }

    pub fn element(&self, idx: usize) -> ExtensionElement {
        let n = self.group.order() as usize;
        ExtensionElement {
            y: self.group.from_index(idx % n),
            h: (idx / n) as i64,
        }
    }
}

/// `(y + y' + β(h,h'), h + h')`
pub fn ext_add(e: &ExtensionData, x: &ExtensionElement, z: &ExtensionElement) -> ExtensionElement {
    let g = &e.group;
    ExtensionElement {
        y: g.add(&g.add(&x.y, &z.y), e.beta.get(&[x.h, z.h])),
        h: e.params.reduce(x.h as i128 + z.h as i128),
    }
}

/// `(h◇y' + f(h,h') + (h◇y)⊰(h·h'), h·h')`
pub fn ext_dot(e: &ExtensionData, x: &ExtensionElement, z: &ExtensionElement) -> ExtensionElement {
    let g = &e.group;
    let ap = &e.action;
    let hh = e.params.h_dot(x.h, z.h);
    let mut y = g.add(&ap.diamond(x.h, &z.y), e.f.get(&[x.h, z.h]));
    if !ap.b_is_zero() {
        y = g.add(&y, &ap.yleft(&ap.diamond(x.h, &x.y), hh));
    }
    ExtensionElement { y, h: hh }
}

fn guard(e: &ExtensionData) -> Result<()> {
    if e.order() > EXTENSION_GUARD {
        return Err(ExtensionError::SizeGuardExceeded {
            size: e.order(),
            guard: EXTENSION_GUARD,
        });
    }
    Ok(())
}

/// Dense tables of the data as given, with no precondition on `(β, f)`.
pub fn materialize(e: &ExtensionData) -> Result<FiniteCycleSetTable> {
    guard(e)?;
    let n = e.order() as usize;
    let els: Vec<ExtensionElement> = (0..n).map(|i| e.element(i)).collect();
    let mut add = vec![0u32; n * n];
    let mut dot = vec![0u32; n * n];
    for (i, x) in els.iter().enumerate() {
        for (j, z) in els.iter().enumerate() {
            add[i * n + j] = e.index_of(&ext_add(e, x, z)) as u32;
            dot[i * n + j] = e.index_of(&ext_dot(e, x, z)) as u32;
        }
    }
    Ok(FiniteCycleSetTable::new(n, add, dot)?)
}

/// Build the extension attached to a 2-cocycle `(β, f)`: the table uses `(β, −f)`.
pub fn build_extension(ap: &ActionPair, cocycle: &TwoCochain) -> Result<Extension> {
    if !complex::is_2cocycle(cocycle, ap)? {
        return Err(ExtensionError::NotACocycle);
    }
    let data = ExtensionData {
        params: ap.params,
        group: ap.group.clone(),
        action: ap.clone(),
        beta: cocycle.beta.clone(),
        f: cocycle.f.neg(),
    };
    let table = materialize(&data)?;
    let report = verify_cycle_set(&table);
    if !report.is_empty() {
        return Err(ExtensionError::RouteDisagreement(format!(
            "cocycle gives a table failing {}",
            report[0].rule
        )));
    }
    let morph = check_inclusion_projection(&data, &table);
    if !morph.is_empty() {
        return Err(ExtensionError::RouteDisagreement(morph[0].rule.clone()));
    }
    Ok(Extension { data, table })
}

/// Build from `(f0, γ)` via the standard cocycle.
pub fn build_standard_extension(ap: &ActionPair, cp: &CocycleParams) -> Result<Extension> {
    let sc = cohomology::construct_f(ap, cp)?;
    build_extension(ap, &sc.two_cochain(&ap.params))
}

/// `ι(y) = (y, 0)` and `π(y, h) = h` respect `+` and `·`.
pub fn check_inclusion_projection(e: &ExtensionData, t: &FiniteCycleSetTable) -> Report {
    let mut out = Vec::new();
    let g = &e.group;
    let els: Vec<GroupElement> = g
        .enumerate_elements()
        .map(|it| it.collect())
        .unwrap_or_default();
    let iota = |y: &GroupElement| e.index_of(&ExtensionElement::new(y.clone(), 0));
    for y in &els {
        for z in &els {
            if t.sum(iota(y), iota(z)) != iota(&g.add(y, z)) {
                out.push(Violation::new("iota additive", format!("{y} {z}")));
            }
            // I is trivial: y·z = z
            if t.mul(iota(y), iota(z)) != iota(z) {
                out.push(Violation::new("iota multiplicative", format!("{y} {z}")));
            }
        }
    }
    let n = t.order;
    let pi = |i: usize| e.element(i).h;
    for i in 0..n {
        for j in 0..n {
            if pi(t.sum(i, j)) != e.params.reduce(pi(i) as i128 + pi(j) as i128)
                || pi(t.mul(i, j)) != e.params.h_dot(pi(i), pi(j))
            {
                out.push(Violation::new("pi morphism", format!("{i} {j}")));
            }
        }
    }
    out
}

fn is_zero(x: &GroupElement) -> bool {
    x.coords.iter().all(|&c| c == 0)
}

/// The abelian-extension conditions on `β`, the action conditions, and the two mixed
/// conditions on `(β, f)` over all triples of `H`. With `B = 0` the reduced form of the
/// last condition is evaluated alongside and must agree pointwise.
pub fn verify_extension_conditions(e: &ExtensionData) -> Result<Report> {
    guard(e)?;
    let mut out = verify_eqq123(&e.action)?;
    let g = &e.group;
    let ap = &e.action;
    let par = &e.params;
    let m = par.modulus;
    let (beta, f) = (&e.beta, &e.f);
    let add = |a: i64, b: i64| par.reduce(a as i128 + b as i128);
    for h in 0..m {
        if !is_zero(beta.get(&[h, 0])) || !is_zero(beta.get(&[0, h])) {
            out.push(Violation::new("beta normalized", format!("h={h}")));
        }
        if !is_zero(f.get(&[h, 0])) || !is_zero(f.get(&[0, h])) {
            out.push(Violation::new("f normalized", format!("h={h}")));
        }
        for hp in 0..m {
            if beta.get(&[h, hp]) != beta.get(&[hp, h]) {
                out.push(Violation::new("beta symmetric", format!("({h},{hp})")));
            }
        }
    }
    for h in 0..m {
        for hp in 0..m {
            let dot = par.h_dot(h, hp);
            for hpp in 0..m {
                let w = format!("({h},{hp},{hpp})");
                let lhs = g.add(beta.get(&[h, hp]), beta.get(&[add(h, hp), hpp]));
                let rhs = g.add(beta.get(&[hp, hpp]), beta.get(&[h, add(hp, hpp)]));
                if lhs != rhs {
                    out.push(Violation::new("beta group cocycle", w.clone()));
                }
                // eqq 4
                let lhs = g.add(
                    &ap.diamond(h, beta.get(&[hp, hpp])),
                    f.get(&[h, add(hp, hpp)]),
                );
                let rhs = g.sum_all(&[
                    f.get(&[h, hp]).clone(),
                    f.get(&[h, hpp]).clone(),
                    beta.get(&[dot, par.h_dot(h, hpp)]).clone(),
                ]);
                if lhs != rhs {
                    out.push(Violation::new("eqq4", w.clone()));
                }
                // eqq 5
                let s = add(h, hp);
                let lhs = g.add(
                    f.get(&[s, hpp]),
                    &ap.yleft(&ap.diamond(s, beta.get(&[h, hp])), par.h_dot(s, hpp)),
                );
                let hhpp = par.h_dot(h, hpp);
                let rhs = g.sum_all(&[
                    ap.diamond(dot, f.get(&[h, hpp])),
                    f.get(&[dot, hhpp]).clone(),
                    ap.yleft(&ap.diamond(dot, f.get(&[h, hp])), par.h_dot(dot, hhpp)),
                ]);
                let full = lhs == rhs;
                if ap.b_is_zero() {
                    let reduced = *f.get(&[s, hpp])
                        == g.add(&ap.diamond(dot, f.get(&[h, hpp])), f.get(&[dot, hhpp]));
                    if reduced != full {
                        return Err(ExtensionError::RouteDisagreement(format!(
                            "reduced eqq5 at {w}"
                        )));
                    }
                }
                if !full {
                    out.push(Violation::new("eqq5", w));
                }
            }
        }
    }
    Ok(out)
}

/// Runs [`verify_extension_conditions`] and the table axioms; they must agree.
pub fn verify_both_routes(e: &ExtensionData) -> Result<bool> {
    let conditions = verify_extension_conditions(e)?.is_empty();
    let table = verify_cycle_set(&materialize(e)?).is_empty();
    if conditions != table {
        return Err(ExtensionError::RouteDisagreement(format!(
            "conditions say {conditions}, table axioms say {table}"
        )));
    }
    Ok(conditions)
}

/// `ι(I) ⊆ Soc`; checked on the table and compared with `B = 0`.
pub fn socle_inclusion(ext: &Extension) -> Result<bool> {
    let soc = socle(&ext.table);
    let e = &ext.data;
    let included = e.group.enumerate_elements()?.all(|y| {
        soc.binary_search(&e.index_of(&ExtensionElement::new(y, 0)))
            .is_ok()
    });
    if included != e.action.b_is_zero() {
        return Err(ExtensionError::RouteDisagreement(
            "socle inclusion vs B = 0".into(),
        ));
    }
    Ok(included)
}

fn same_action(e1: &ExtensionData, e2: &ExtensionData) -> bool {
    e1.params == e2.params
        && e1.group == e2.group
        && e1.action.a == e2.action.a
        && e1.action.b == e2.action.b
}

/// Both conditions on `φ` for an equivalence `E1 -> E2`.
fn is_equivalence(e1: &ExtensionData, e2: &ExtensionData, phi: &[GroupElement]) -> bool {
    let g = &e1.group;
    let ap = &e1.action;
    let par = &e1.params;
    let m = par.modulus;
    if !is_zero(&phi[0]) {
        return false;
    }
    for h in 0..m {
        for hp in 0..m {
            let s = par.reduce(h as i128 + hp as i128) as usize;
            let lhs = g.add(&g.sub(&phi[h as usize], &phi[s]), &phi[hp as usize]);
            if lhs != g.sub(e1.beta.get(&[h, hp]), e2.beta.get(&[h, hp])) {
                return false;
            }
            let dot = par.h_dot(h, hp);
            let lhs = g.add(&phi[dot as usize], e1.f.get(&[h, hp]));
            let mut rhs = g.add(&ap.diamond(h, &phi[hp as usize]), e2.f.get(&[h, hp]));
            if !ap.b_is_zero() {
                rhs = g.add(&rhs, &ap.yleft(&ap.diamond(h, &phi[h as usize]), dot));
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// `φ` from `φ(1)` through `φ(h+1) = φ(h) + φ(1) − (β1 − β2)(h, 1)`; every solution has this form.
fn phi_from_one(e1: &ExtensionData, e2: &ExtensionData, one: &GroupElement) -> Vec<GroupElement> {
    let g = &e1.group;
    let m = e1.params.modulus;
    let mut phi = vec![g.zero(); m as usize];
    for h in 1..m as usize {
        let d = g.sub(
            e1.beta.get(&[h as i64 - 1, 1]),
            e2.beta.get(&[h as i64 - 1, 1]),
        );
        phi[h] = g.sub(&g.add(&phi[h - 1], one), &d);
    }
    phi
}

/// Equivalences determined by `φ(1)`, scanning `I`.
pub fn find_equivalence(
    e1: &ExtensionData,
    e2: &ExtensionData,
) -> Result<Option<Vec<GroupElement>>> {
    if !same_action(e1, e2) {
        return Err(ExtensionError::ActionMismatch);
    }
    for one in e1.group.enumerate_elements()? {
        let phi = phi_from_one(e1, e2, &one);
        if is_equivalence(e1, e2, &phi) {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Literal search over all `φ : H -> I` with `φ(0) = 0`.
pub fn find_equivalence_exhaustive(
    e1: &ExtensionData,
    e2: &ExtensionData,
) -> Result<Option<Vec<GroupElement>>> {
    if !same_action(e1, e2) {
        return Err(ExtensionError::ActionMismatch);
    }
    let g = &e1.group;
    let n = g.order();
    let slots = (e1.params.modulus - 1) as u32;
    let total = n
        .checked_pow(slots)
        .filter(|&t| t <= PHI_SEARCH_GUARD)
        .ok_or(ExtensionError::SizeGuardExceeded {
            size: n.saturating_pow(slots),
            guard: PHI_SEARCH_GUARD,
        })?;
    let mut phi = vec![g.zero(); slots as usize + 1];
    for code in 0..total {
        let mut c = code;
        for slot in phi.iter_mut().skip(1) {
            *slot = g.from_index((c % n) as usize);
            c /= n;
        }
        if is_equivalence(e1, e2, &phi) {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Equivalence of two standard extensions. The parameter-difference test is primary; the
/// `φ(1)`-driven search always runs, and the literal search runs when its guard allows.
pub fn are_equivalent(
    ap: &ActionPair,
    cp1: &CocycleParams,
    cp2: &CocycleParams,
) -> Result<Option<Vec<GroupElement>>> {
    let g = &ap.group;
    let diff = CocycleParams::new(g.sub(&cp1.f0, &cp2.f0), g.sub(&cp1.gamma, &cp2.gamma));
    let primary = cohomology::is_coboundary(ap, &diff)?;
    let e1 = data_for(ap, cp1)?;
    let e2 = data_for(ap, cp2)?;
    let searched = find_equivalence(&e1, &e2)?;
    if primary.is_some() != searched.is_some() {
        return Err(ExtensionError::RouteDisagreement(
            "coboundary test vs φ search".into(),
        ));
    }
    match find_equivalence_exhaustive(&e1, &e2) {
        Ok(lit) if lit.is_some() != searched.is_some() => {
            return Err(ExtensionError::RouteDisagreement(
                "φ search vs literal search".into(),
            ))
        }
        Ok(_) | Err(ExtensionError::SizeGuardExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(searched)
}

/// Extension data of the standard cocycle `(f0, γ)`, without materializing tables.
pub fn data_for(ap: &ActionPair, cp: &CocycleParams) -> Result<ExtensionData> {
    let sc = cohomology::construct_f(ap, cp)?;
    Ok(ExtensionData {
        params: ap.params,
        group: ap.group.clone(),
        action: ap.clone(),
        beta: sc.beta(&ap.params),
        f: sc.f_table.neg(),
    })
}

impl Extension {
    /// Table plus metadata.
    pub fn to_json(&self, cp: Option<&CocycleParams>) -> serde_json::Value {
        let e = &self.data;
        serde_json::json!({
            "p": e.params.p,
            "nu": e.params.nu,
            "eta": e.params.eta,
            "group": e.group.orders(),
            "A": e.action.a.matrix(),
            "B": e.action.b.matrix(),
            "f0": cp.map(|c| c.f0.coords.clone()),
            "gamma": cp.map(|c| c.gamma.coords.clone()),
            "table": self.table,
        })
    }
}
