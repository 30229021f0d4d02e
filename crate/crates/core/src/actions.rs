//! Action data `(◇, ⊰)` of `H` on a coefficient group `I`, encoded by a pair of
//! endomorphisms `(A, B)`: `1^{×l} ◇ y = A^l y` and `y ⊰ h = h B y`.

use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{gcd, md, FinAbGroup, GroupElement, GroupError, Homomorphism};
use crate::cycleset::{CycleSetError, CycleSetParams};
use crate::{Report, Violation};

/// Bound on `p^eta * |I|` for exhaustive sweeps and enumerations.
pub const ACTION_GUARD: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    CycleSet(#[from] CycleSetError),
    #[error("A and B must be endomorphisms of I")]
    NotEndomorphism,
    #[error("A and B do not commute")]
    NotCommuting,
    #[error("quad action data needs (p, nu, eta) = (2, 1, 2)")]
    WrongParams,
    #[error("size guard exceeded: {size} > {guard}")]
    SizeGuardExceeded { size: u128, guard: u128 },
}

/// Endomorphisms `(A, B)` of `I` together with the cycle set they act through.
#[derive(Debug, Clone)]
pub struct ActionPair {
    pub params: CycleSetParams,
    pub group: FinAbGroup,
    pub a: Homomorphism,
    pub b: Homomorphism,
    /// A^l for 0 <= l < p^eta
    a_pows: Vec<Homomorphism>,
}

impl ActionPair {
    /// Build without checking the operator identities (see [`validate_action_pair`]).
    /// Only the cyclic case is accepted; the excluded case uses [`QuadActionData`].
    pub fn new(
        params: CycleSetParams,
        a: Homomorphism,
        b: Homomorphism,
    ) -> Result<Self, ActionError> {
        if !params.is_cyclic() {
            return Err(CycleSetError::NotCyclic.into());
        }
        let group = a.domain.clone();
        if a.codomain != group || b.domain != group || b.codomain != group {
            return Err(ActionError::NotEndomorphism);
        }
        if !a.validate() || !b.validate() {
            return Err(GroupError::NotAHomomorphism.into());
        }
        let mut a_pows = Vec::with_capacity(params.modulus as usize);
        let mut cur = Homomorphism::identity(&group);
        for _ in 0..params.modulus {
            let next = cur.compose(&a)?;
            a_pows.push(cur);
            cur = next;
        }
        Ok(ActionPair {
            params,
            group,
            a,
            b,
            a_pows,
        })
    }

    pub fn from_matrices(
        params: CycleSetParams,
        group: &FinAbGroup,
        a: Vec<Vec<i64>>,
        b: Vec<Vec<i64>>,
    ) -> Result<Self, ActionError> {
        Self::new(
            params,
            Homomorphism::endo(group, a)?,
            Homomorphism::endo(group, b)?,
        )
    }

    /// `A = Id`, `B = 0`.
    pub fn trivial(params: CycleSetParams, group: &FinAbGroup) -> Result<Self, ActionError> {
        Self::new(
            params,
            Homomorphism::identity(group),
            Homomorphism::zero(group, group),
        )
    }

    /// `A^e` for any integer exponent (reduced mod p^eta).
    pub fn a_pow(&self, e: i64) -> &Homomorphism {
        &self.a_pows[md(e as i128, self.params.modulus) as usize]
    }

    pub fn b_is_zero(&self) -> bool {
        self.b.is_zero()
    }

    /// `h ◇ y = A^{l(h)} y`
    pub fn diamond(&self, h: i64, y: &GroupElement) -> GroupElement {
        self.a_pow(self.params.log(h)).apply(y)
    }

    /// `y ⊰ h = h B y`
    pub fn yleft(&self, y: &GroupElement, h: i64) -> GroupElement {
        self.group
            .scale(self.params.reduce(h as i128), &self.b.apply(y))
    }

    /// `y ▹ h = h ◇ (y - y ⊰ h)`
    pub fn triangleleft(&self, y: &GroupElement, h: i64) -> GroupElement {
        self.diamond(h, &self.group.sub(y, &self.yleft(y, h)))
    }

    /// `y ▹ 1^{×l} = (A - AB)^l y`
    pub fn triangleleft_power(&self, y: &GroupElement, l: i64) -> GroupElement {
        let ab = self.a.compose(&self.b).expect("endomorphisms");
        let t = self.a.sub(&ab).expect("endomorphisms");
        let e = md(l as i128, self.params.modulus) as u64;
        t.power(e).expect("endomorphism").apply(y)
    }

    fn guard(&self) -> Result<(), ActionError> {
        let size = self.group.order() * self.params.modulus as u128;
        if size > ACTION_GUARD {
            return Err(ActionError::SizeGuardExceeded {
                size,
                guard: ACTION_GUARD,
            });
        }
        Ok(())
    }
}

/// `A^{p^eta} = Id`, `p^eta B = 0` and `BA - AB = BAB + p^nu AB`.
pub fn validate_action_pair(ap: &ActionPair) -> Report {
    validate_operators(&ap.params, &ap.a, &ap.b)
}

pub(crate) fn validate_operators(
    params: &CycleSetParams,
    a: &Homomorphism,
    b: &Homomorphism,
) -> Report {
    let mut r = Report::new();
    let g = &a.domain;
    let id = Homomorphism::identity(g);
    if a.power(params.modulus as u64).ok().as_ref() != Some(&id) {
        r.push(Violation::new(
            "A^{p^eta} = Id",
            format!("{:?}", a.matrix()),
        ));
    }
    if !b.scale(params.modulus).is_zero() {
        r.push(Violation::new("p^eta B = 0", format!("{:?}", b.matrix())));
    }
    let ba = b.compose(a).expect("endo");
    let ab = a.compose(b).expect("endo");
    let lhs = ba.sub(&ab).expect("endo");
    let rhs = b
        .compose(&ab)
        .expect("endo")
        .add(&ab.scale(params.pnu))
        .expect("endo");
    if lhs != rhs {
        r.push(Violation::new(
            "BA - AB = BAB + p^nu AB",
            format!("{:?} vs {:?}", lhs.matrix(), rhs.matrix()),
        ));
    }
    r
}

/// Generic exhaustive check of the three action conditions for `◇`, `⊰` given as closures.
pub(crate) fn check_eqq123<D, Y>(
    params: &CycleSetParams,
    group: &FinAbGroup,
    diamond: D,
    yleft: Y,
) -> Result<Report, ActionError>
where
    D: Fn(i64, &GroupElement) -> GroupElement,
    Y: Fn(&GroupElement, i64) -> GroupElement,
{
    let m = params.modulus;
    let size = group.order() * (m as u128) * (m as u128);
    let pair_size = group.order() * group.order() * m as u128;
    let guard = 10 * ACTION_GUARD;
    if size.max(pair_size) > guard {
        return Err(ActionError::SizeGuardExceeded {
            size: size.max(pair_size),
            guard,
        });
    }
    let elems: Vec<GroupElement> = group.enumerate_elements_with_guard(guard)?.collect();
    let tri = |y: &GroupElement, h: i64| diamond(h, &group.sub(y, &yleft(y, h)));
    let power = |y: &GroupElement, h: i64| group.sub(y, &yleft(y, h));
    let mut r = Report::new();
    let mut push = |rule: &str, w: String| {
        if r.len() < 32 {
            r.push(Violation::new(rule, w));
        }
    };
    let zero = group.zero();
    for y in &elems {
        if tri(y, 0) != *y {
            push("eqq1: y ▹ 0 = y", format!("y={y}"));
        }
        if diamond(0, y) != *y {
            push("eqq2: 0 ◇ y = y", format!("y={y}"));
        }
        for h in 0..m {
            for hp in 0..m {
                if tri(&tri(y, h), hp) != tri(y, params.h_times(h, hp)) {
                    push(
                        "eqq1: (y ▹ h) ▹ h' = y ▹ (h × h')",
                        format!("y={y} h={h} h'={hp}"),
                    );
                }
                if diamond(params.h_times(hp, h), y) != diamond(h, &diamond(hp, y)) {
                    push(
                        "eqq2: (h' × h) ◇ y = h ◇ (h' ◇ y)",
                        format!("y={y} h={h} h'={hp}"),
                    );
                }
                let lhs = group.add(&power(y, params.reduce(h as i128 + hp as i128)), y);
                let rhs = group.add(&power(y, h), &power(y, hp));
                if lhs != rhs {
                    push(
                        "eqq3: y^{h+h'} + y = y^h + y^{h'}",
                        format!("y={y} h={h} h'={hp}"),
                    );
                }
            }
            // y^h = h^{×-1} ◇ (y ▹ h)
            if power(y, h) != diamond(params.times_inverse(h), &tri(y, h)) {
                push("eqq3: y^h = h^{×-1} ◇ (y ▹ h)", format!("y={y} h={h}"));
            }
        }
    }
    for h in 0..m {
        if power(&zero, h) != zero {
            push("eqq3: 0^h = 0", format!("h={h}"));
        }
        for y in &elems {
            for yp in &elems {
                let s = group.add(y, yp);
                if tri(&s, h) != group.add(&tri(y, h), &tri(yp, h)) {
                    push("eqq1: ▹ additive", format!("y={y} y'={yp} h={h}"));
                }
                if diamond(h, &s) != group.add(&diamond(h, y), &diamond(h, yp)) {
                    push("eqq2: ◇ additive", format!("y={y} y'={yp} h={h}"));
                }
            }
        }
    }
    Ok(r)
}

/// Exhaustive check of conditions (eqq1)-(eqq3) for the action encoded by `ap`.
pub fn verify_eqq123(ap: &ActionPair) -> Result<Report, ActionError> {
    ap.guard()?;
    check_eqq123(
        &ap.params,
        &ap.group,
        |h, y| ap.diamond(h, y),
        |y, h| ap.yleft(y, h),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CommutingCase {
    /// B = 0
    One,
    /// B != 0, B^2 = 0, p^nu B = 0
    Two,
    /// B^2 != 0, p^eta B = 0, B^3 = 0, B^2 + p^nu B = 0
    Three,
    Invalid,
}

impl CommutingCase {
    pub fn tag(&self) -> Option<u8> {
        match self {
            CommutingCase::One => Some(1),
            CommutingCase::Two => Some(2),
            CommutingCase::Three => Some(3),
            CommutingCase::Invalid => None,
        }
    }
}

pub fn classify_commuting_pair(ap: &ActionPair) -> Result<CommutingCase, ActionError> {
    let ab = ap.a.compose(&ap.b)?;
    let ba = ap.b.compose(&ap.a)?;
    if ab != ba {
        return Err(ActionError::NotCommuting);
    }
    if ap.a.power(ap.params.modulus as u64)? != Homomorphism::identity(&ap.group) {
        return Ok(CommutingCase::Invalid);
    }
    let b = &ap.b;
    let b2 = b.compose(b)?;
    let b3 = b2.compose(b)?;
    if b.is_zero() {
        return Ok(CommutingCase::One);
    }
    if b2.is_zero() && b.scale(ap.params.pnu).is_zero() {
        return Ok(CommutingCase::Two);
    }
    if !b2.is_zero()
        && b.scale(ap.params.modulus).is_zero()
        && b3.is_zero()
        && b2.add(&b.scale(ap.params.pnu))?.is_zero()
    {
        return Ok(CommutingCase::Three);
    }
    Ok(CommutingCase::Invalid)
}

fn pow_mod(mut base: i64, mut e: u64, n: i64) -> i64 {
    let mut acc = md(1, n) as i128;
    let mut b = md(base as i128, n) as i128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % n as i128;
        }
        b = b * b % n as i128;
        e >>= 1;
    }
    base = acc as i64;
    base
}

fn valuation(mut x: i64, p: i64) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// `a^{p^eta} = 1 mod p^r` via the congruence characterizations.
pub(crate) fn a_admissible_p_part(p: i64, eta: u32, r: u32, a: i64) -> bool {
    if r == 0 {
        return true;
    }
    let pr = p.pow(r);
    if p == 2 && r > 2 {
        let eta0 = (r - 2).min(eta);
        let q = 1i64 << (r + 1 - eta0);
        md(a as i128 * a as i128 - 1, q) == 0
    } else {
        let eta0 = (r - 1).min(eta);
        let q = p.pow(r - eta0);
        md(a as i128 - 1, q.min(pr)) == 0
    }
}

/// All valid `(a, b)` for `I = Z_n` with `A = a Id`, `B = b Id`, tagged by commuting case.
pub fn enumerate_action_pairs_cyclic(
    params: &CycleSetParams,
    n: i64,
) -> Result<Vec<(ActionPair, CommutingCase)>, ActionError> {
    let size = n as u128 * params.modulus as u128;
    if size > ACTION_GUARD {
        return Err(ActionError::SizeGuardExceeded {
            size,
            guard: ACTION_GUARD,
        });
    }
    let p = params.p;
    let mut r = 0u32;
    let mut c = n;
    while c % p == 0 {
        c /= p;
        r += 1;
    }
    let group = FinAbGroup::new(vec![n])?;
    let pr = p.pow(r);
    let mut out = Vec::new();
    for a in 0..n {
        if gcd(a, n) != 1 && n > 1 {
            continue;
        }
        let by_lemma = a_admissible_p_part(p, params.eta, r, md(a as i128, pr))
            && pow_mod(a, params.modulus as u64, c) == md(1, c);
        let direct = pow_mod(a, params.modulus as u64, n) == md(1, n);
        assert_eq!(
            by_lemma, direct,
            "congruence characterization disagrees at a={a}, n={n}"
        );
        if !direct {
            continue;
        }
        for b in 0..n {
            let case = if b == 0 {
                CommutingCase::One
            } else {
                let s = valuation(b, p);
                let d = b / p.pow(s);
                let nu = params.nu;
                if s < r && r <= (nu + s).min(2 * s) && d % c == 0 {
                    CommutingCase::Two
                } else if s == nu
                    && 2 * nu < r
                    && r <= params.eta + nu
                    && md(d as i128 + 1, p.pow(r - 2 * nu)) == 0
                    && d % c == 0
                {
                    CommutingCase::Three
                } else {
                    continue;
                }
            };
            let ap = ActionPair::from_matrices(*params, &group, vec![vec![a]], vec![vec![b]])?;
            out.push((ap, case));
        }
    }
    Ok(out)
}

/// Action data for the non-cyclic case `(p, nu, eta) = (2, 1, 2)`.
#[derive(Debug, Clone)]
pub struct QuadActionData {
    pub params: CycleSetParams,
    pub group: FinAbGroup,
    pub a1: Homomorphism,
    pub a2: Homomorphism,
    pub b: Homomorphism,
}

impl QuadActionData {
    pub fn new(
        group: &FinAbGroup,
        a1: Vec<Vec<i64>>,
        a2: Vec<Vec<i64>>,
        b: Vec<Vec<i64>>,
    ) -> Result<Self, ActionError> {
        Ok(QuadActionData {
            params: CycleSetParams::new(2, 1, 2)?,
            group: group.clone(),
            a1: Homomorphism::endo(group, a1)?,
            a2: Homomorphism::endo(group, a2)?,
            b: Homomorphism::endo(group, b)?,
        })
    }

    /// `◇`: 0 -> Id, 1 -> A1, 2 -> A2, 3 -> A1 A2.
    pub fn diamond(&self, h: i64, y: &GroupElement) -> GroupElement {
        match md(h as i128, 4) {
            0 => y.clone(),
            1 => self.a1.apply(y),
            2 => self.a2.apply(y),
            _ => self.a1.apply(&self.a2.apply(y)),
        }
    }

    pub fn yleft(&self, y: &GroupElement, h: i64) -> GroupElement {
        self.group.scale(md(h as i128, 4), &self.b.apply(y))
    }
}

pub fn validate_quad_action(q: &QuadActionData) -> Result<Report, ActionError> {
    let par = &q.params;
    if (par.p, par.nu, par.eta) != (2, 1, 2) {
        return Err(ActionError::WrongParams);
    }
    let g = &q.group;
    let id = Homomorphism::identity(g);
    let (a1, a2, b) = (&q.a1, &q.a2, &q.b);
    let a1b = a1.compose(b)?;
    let a2b = a2.compose(b)?;
    let a1a2 = a1.compose(a2)?;
    let a1a2b = a1a2.compose(b)?;
    let t1 = a1.sub(&a1b)?;
    let t2 = a2.sub(&a2b.scale(2))?;
    let t12 = a1a2.sub(&a1a2b.scale(3))?;
    let mut r = Report::new();
    if !b.scale(4).is_zero() {
        r.push(Violation::new("4B = 0", format!("{:?}", b.matrix())));
    }
    for (name, m) in [
        ("A1^2", a1),
        ("A2^2", a2),
        ("(A1-A1B)^2", &t1),
        ("(A2-2A2B)^2", &t2),
        ("(A1A2-3A1A2B)^2", &t12),
    ] {
        if m.compose(m)? != id {
            r.push(Violation::new(
                format!("{name} = Id"),
                format!("{:?}", m.matrix()),
            ));
        }
    }
    if a1a2 != a2.compose(a1)? {
        r.push(Violation::new("A1A2 = A2A1", String::new()));
    }
    if t1.compose(&t2)? != t12 || t2.compose(&t1)? != t12 {
        r.push(Violation::new(
            "(A1-A1B)(A2-2A2B) = (A2-2A2B)(A1-A1B) = A1A2-3A1A2B",
            String::new(),
        ));
    }
    r.extend(check_eqq123(
        par,
        g,
        |h, y| q.diamond(h, y),
        |y, h| q.yleft(y, h),
    )?);
    Ok(r)
}
