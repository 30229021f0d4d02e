//! The linear cycle sets `H(p, nu, eta)` and a verifier for arbitrary finite
//! linear cycle sets given by operation tables.
//!
//! Elements of `H` are plain residues in `[0, p^eta)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::md;
use crate::{Report, Violation};

/// Table-based structures are dense `n x n`; verification is cubic.
pub const TABLE_GUARD: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleSetError {
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("need 0 < nu <= eta <= 2 nu, got nu={nu}, eta={eta}")]
    BadExponents { nu: u32, eta: u32 },
    #[error("modulus p^eta too large for exact arithmetic")]
    Overflow,
    #[error("(Z_{{p^eta}}, x) is not cyclic for (p, nu, eta) = (2, 1, 2)")]
    NotCyclic,
    #[error("tables do not form a left brace: {0}")]
    NotABrace(String),
    #[error("table of order {0} exceeds the guard")]
    TooLarge(usize),
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// The triple `(p, nu, eta)` with `0 < nu <= eta <= 2 nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleSetParams {
    pub p: i64,
    pub nu: u32,
    pub eta: u32,
    /// p^eta
    pub modulus: i64,
    /// p^nu
    pub pnu: i64,
}

pub(crate) fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || n < k {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

/// C(k, 2) = k(k-1)/2 for any integer k.
pub(crate) fn c2(k: i128) -> i128 {
    k * (k - 1) / 2
}

impl CycleSetParams {
    pub fn new(p: i64, nu: u32, eta: u32) -> Result<Self, CycleSetError> {
        if !is_prime(p) {
            return Err(CycleSetError::NotPrime(p));
        }
        if nu == 0 || nu > eta || eta > 2 * nu {
            return Err(CycleSetError::BadExponents { nu, eta });
        }
        let modulus = p.checked_pow(eta).ok_or(CycleSetError::Overflow)?;
        if modulus > crate::abgroup::MAX_ORDER {
            return Err(CycleSetError::Overflow);
        }
        Ok(CycleSetParams {
            p,
            nu,
            eta,
            modulus,
            pnu: p.pow(nu),
        })
    }

    /// `(Z_{p^eta}, x)` is cyclic (generated by 1) except for `(2, 1, 2)`.
    pub fn is_cyclic(&self) -> bool {
        !(self.p == 2 && self.nu == 1 && self.eta == 2)
    }

    fn require_cyclic(&self) -> Result<(), CycleSetError> {
        if self.is_cyclic() {
            Ok(())
        } else {
            Err(CycleSetError::NotCyclic)
        }
    }

    /// Whether the `p = 2, eta = 2 nu > 2` formulas apply.
    fn two_adic_top(&self) -> bool {
        self.p == 2 && self.eta == 2 * self.nu && self.eta > 2
    }

    #[inline]
    pub fn reduce(&self, x: i128) -> i64 {
        md(x, self.modulus)
    }

    /// `i·j = (1 - p^nu i) j`
    pub fn h_dot(&self, i: i64, j: i64) -> i64 {
        self.reduce((1 - self.pnu as i128 * i as i128) * j as i128)
    }

    /// `i×j = i + j + p^nu i j`
    pub fn h_times(&self, i: i64, j: i64) -> i64 {
        self.reduce(i as i128 + j as i128 + self.pnu as i128 * i as i128 * j as i128)
    }

    /// `i^{×j} = i j + C(j,2) p^nu i^2`, for any integer `j`.
    pub fn times_power(&self, i: i64, j: i64) -> i64 {
        let (i, j) = (i as i128, j as i128);
        let m = self.modulus as i128;
        let cj = md(c2(j), self.modulus) as i128;
        self.reduce(i * j % m + cj * self.pnu as i128 % m * (i * i % m))
    }

    /// The multiplicative inverse `i^{×-1}`.
    pub fn times_inverse(&self, i: i64) -> i64 {
        self.times_power(i, -1)
    }

    /// The discrete logarithm `l(h)` with `1^{×l(h)} = h`.
    pub fn l_of(&self, h: i64) -> Result<i64, CycleSetError> {
        self.require_cyclic()?;
        Ok(self.log(h))
    }

    /// `l(h)` without the cyclicity check (callers have already checked).
    pub(crate) fn log(&self, h: i64) -> i64 {
        let h = h as i128;
        let c = if self.two_adic_top() {
            self.pnu as i128 + (1i128 << (2 * self.nu - 1))
        } else {
            self.pnu as i128
        };
        let m = self.modulus;
        self.reduce(h - md(c2(h), m) as i128 * c)
    }

    /// `L(l, l')` with `1^{×l} + 1^{×l'} = 1^{×L}`.
    pub fn big_l(&self, l: i64, lp: i64) -> Result<i64, CycleSetError> {
        self.require_cyclic()?;
        let (a, b) = (
            md(l as i128, self.modulus) as i128,
            md(lp as i128, self.modulus) as i128,
        );
        let c = if self.two_adic_top() {
            self.pnu as i128 + (1i128 << (2 * self.nu - 1))
        } else {
            self.pnu as i128
        };
        Ok(self.reduce(a + b - a * b % self.modulus as i128 * c))
    }

    /// `b_k = k + C(k+1, 2) p^nu`.
    pub fn b_k(&self, k: i64) -> i64 {
        let k = k as i128;
        self.reduce(k + md(c2(k + 1), self.modulus) as i128 * self.pnu as i128)
    }

    /// Canonical representative in `[0, p^eta)` of `l(u)`.
    pub fn ell_rep(&self, u: i64) -> Result<i64, CycleSetError> {
        self.l_of(self.reduce(u as i128))
    }

    /// The dense tables of `H` as a linear cycle set.
    pub fn table(&self) -> FiniteCycleSetTable {
        let n = self.modulus as usize;
        let mut add = vec![0u32; n * n];
        let mut dot = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = ((i + j) % n) as u32;
                dot[i * n + j] = self.h_dot(i as i64, j as i64) as u32;
            }
        }
        FiniteCycleSetTable { order: n, add, dot }
    }
}

pub fn h_dot(p: &CycleSetParams, i: i64, j: i64) -> i64 {
    p.h_dot(i, j)
}
pub fn h_times(p: &CycleSetParams, i: i64, j: i64) -> i64 {
    p.h_times(i, j)
}
pub fn times_power(p: &CycleSetParams, i: i64, j: i64) -> i64 {
    p.times_power(i, j)
}
pub fn l_of(p: &CycleSetParams, h: i64) -> Result<i64, CycleSetError> {
    p.l_of(h)
}
#[allow(non_snake_case)]
pub fn L_of(p: &CycleSetParams, l: i64, lp: i64) -> Result<i64, CycleSetError> {
    p.big_l(l, lp)
}
pub fn b_k(p: &CycleSetParams, k: i64) -> i64 {
    p.b_k(k)
}
pub fn ell_rep(p: &CycleSetParams, u: i64) -> Result<i64, CycleSetError> {
    p.ell_rep(u)
}

/// A finite structure with sum and `·` given as dense row-major tables.
/// Element 0 is expected to be the additive identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCycleSetTable {
    pub order: usize,
    pub add: Vec<u32>,
    pub dot: Vec<u32>,
}

impl FiniteCycleSetTable {
    pub fn new(order: usize, add: Vec<u32>, dot: Vec<u32>) -> Result<Self, CycleSetError> {
        if order > TABLE_GUARD {
            return Err(CycleSetError::TooLarge(order));
        }
        if add.len() != order * order || dot.len() != order * order {
            return Err(CycleSetError::Malformed(
                "table size must be order^2".into(),
            ));
        }
        if add.iter().chain(dot.iter()).any(|&x| x as usize >= order) {
            return Err(CycleSetError::Malformed("entry out of range".into()));
        }
        Ok(FiniteCycleSetTable { order, add, dot })
    }

    /// The trivial linear cycle set `a·b = b` on `Z_n`.
    pub fn trivial_cyclic(n: usize) -> Self {
        let mut add = vec![0u32; n * n];
        let mut dot = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = ((i + j) % n) as u32;
                dot[i * n + j] = j as u32;
            }
        }
        FiniteCycleSetTable { order: n, add, dot }
    }

    #[inline]
    pub fn sum(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.dot[a * self.order + b] as usize
    }

    fn neg(&self, a: usize) -> Option<usize> {
        (0..self.order).find(|&b| self.sum(a, b) == 0)
    }
}

const MAX_REPORTED: usize = 32;

fn push(report: &mut Report, rule: &str, witness: impl FnOnce() -> String) {
    if report.len() < MAX_REPORTED {
        report.push(Violation::new(rule, witness()));
    }
}

/// All violated instances (capped) of the linear cycle set axioms.
pub fn verify_cycle_set(t: &FiniteCycleSetTable) -> Report {
    let n = t.order;
    let mut r = Report::new();
    // (A, +) abelian group with identity 0
    for a in 0..n {
        if t.sum(0, a) != a {
            push(&mut r, "additive identity", || format!("0+{a}"));
        }
        if t.neg(a).is_none() {
            push(&mut r, "additive inverse", || format!("{a}"));
        }
        for b in 0..n {
            if t.sum(a, b) != t.sum(b, a) {
                push(&mut r, "commutativity", || format!("({a},{b})"));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = t.sum(a, b);
            for c in 0..n {
                if t.sum(ab, c) != t.sum(a, t.sum(b, c)) {
                    push(&mut r, "associativity", || format!("({a},{b},{c})"));
                }
            }
        }
    }
    // bijective left translations
    let mut seen = vec![false; n];
    for a in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for b in 0..n {
            seen[t.mul(a, b)] = true;
        }
        if seen.iter().any(|s| !s) {
            push(&mut r, "bijective left translation", || format!("{a}"));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = t.mul(a, b);
            let ba = t.mul(b, a);
            let apb = t.sum(a, b);
            for c in 0..n {
                let ac = t.mul(a, c);
                if t.mul(a, t.sum(b, c)) != t.sum(ab, ac) {
                    push(&mut r, "a·(b+c) = a·b + a·c", || {
                        format!("({a},{b},{c})")
                    });
                }
                if t.mul(apb, c) != t.mul(ab, ac) {
                    push(&mut r, "(a+b)·c = (a·b)·(a·c)", || {
                        format!("({a},{b},{c})")
                    });
                }
                if t.mul(ab, ac) != t.mul(ba, t.mul(b, c)) {
                    push(&mut r, "(a·b)·(a·c) = (b·a)·(b·c)", || {
                        format!("({a},{b},{c})")
                    });
                }
            }
        }
    }
    r
}

/// The brace product `a×b = ^a b + a`, where `b -> ^a b` inverts `b -> a·b`.
pub fn to_brace(t: &FiniteCycleSetTable) -> Result<Vec<u32>, CycleSetError> {
    let n = t.order;
    let mut times = vec![0u32; n * n];
    for a in 0..n {
        let mut inv = vec![u32::MAX; n];
        for b in 0..n {
            inv[t.mul(a, b)] = b as u32;
        }
        if inv.iter().any(|&x| x == u32::MAX) {
            return Err(CycleSetError::Malformed(format!(
                "left translation by {a} is not bijective"
            )));
        }
        for b in 0..n {
            times[a * n + b] = t.sum(inv[b] as usize, a) as u32;
        }
    }
    Ok(times)
}

/// The linear cycle set `a·b = a^{×-1} × (a+b)` of a left brace.
pub fn from_brace(times: &[u32], add: &[u32]) -> Result<FiniteCycleSetTable, CycleSetError> {
    let n = (add.len() as f64).sqrt().round() as usize;
    if n * n != add.len() || times.len() != add.len() {
        return Err(CycleSetError::Malformed(
            "tables must be square and equal".into(),
        ));
    }
    let tm = |a: usize, b: usize| times[a * n + b] as usize;
    let sm = |a: usize, b: usize| add[a * n + b] as usize;
    let neg = |a: usize| (0..n).find(|&b| sm(a, b) == 0);
    // multiplicative group with identity 0
    let mut inv = vec![0usize; n];
    for a in 0..n {
        if tm(0, a) != a || tm(a, 0) != a {
            return Err(CycleSetError::NotABrace(format!(
                "0 is not a x-identity at {a}"
            )));
        }
        inv[a] = (0..n)
            .find(|&b| tm(a, b) == 0)
            .ok_or_else(|| CycleSetError::NotABrace(format!("{a} has no x-inverse")))?;
        for b in 0..n {
            for c in 0..n {
                if tm(tm(a, b), c) != tm(a, tm(b, c)) {
                    return Err(CycleSetError::NotABrace(format!(
                        "x not associative at ({a},{b},{c})"
                    )));
                }
                let na =
                    neg(a).ok_or_else(|| CycleSetError::NotABrace("no additive inverse".into()))?;
                if tm(a, sm(b, c)) != sm(sm(tm(a, b), tm(a, c)), na) {
                    return Err(CycleSetError::NotABrace(format!(
                        "a×(b+c) != a×b + a×c - a at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    let mut dot = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            dot[a * n + b] = tm(inv[a], sm(a, b)) as u32;
        }
    }
    FiniteCycleSetTable::new(n, add.to_vec(), dot)
}

/// `{y : y·a = a for all a}`
pub fn socle(t: &FiniteCycleSetTable) -> Vec<usize> {
    (0..t.order)
        .filter(|&y| (0..t.order).all(|a| t.mul(y, a) == a))
        .collect()
}

/// `{y in socle : a·y = y for all a}`
pub fn center(t: &FiniteCycleSetTable) -> Vec<usize> {
    socle(t)
        .into_iter()
        .filter(|&y| (0..t.order).all(|a| t.mul(a, y) == y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(p: i64, nu: u32, eta: u32) -> CycleSetParams {
        CycleSetParams::new(p, nu, eta).unwrap()
    }

    /// Brute-force logarithm by iterating powers of 1.
    fn brute_log(par: &CycleSetParams, x: i64) -> Option<i64> {
        let mut acc = 0;
        for l in 0..par.modulus {
            if acc == x {
                return Some(l);
            }
            acc = par.h_times(acc, 1);
        }
        None
    }

    fn grid() -> Vec<CycleSetParams> {
        let mut v = Vec::new();
        for p in [2i64, 3, 5] {
            for nu in 1..=3u32 {
                for eta in nu..=2 * nu {
                    if p.pow(eta) <= 256 {
                        v.push(h(p, nu, eta));
                    }
                }
            }
        }
        v
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            CycleSetParams::new(4, 1, 1),
            Err(CycleSetError::NotPrime(4))
        );
        assert!(CycleSetParams::new(3, 1, 3).is_err());
        assert!(!h(2, 1, 2).is_cyclic());
        assert!(h(2, 2, 4).is_cyclic());
    }

    #[test]
    fn small_values() {
        let par = h(3, 1, 2);
        assert_eq!(par.h_dot(1, 1), 7);
        assert_eq!(par.h_times(1, 1), 5);
        assert_eq!(par.times_power(1, 2), 5);
        assert_eq!(par.times_power(1, 9), 0);
        assert_eq!(par.times_power(4, 0), 0);
        assert_eq!(par.l_of(5).unwrap(), 2);
        assert_eq!(par.big_l(1, 1).unwrap(), 8);
        assert_eq!(par.b_k(1), 4);
        assert_eq!(par.b_k(0), 0);
        assert_eq!(par.b_k(8), 8);
        assert_eq!(h(2, 2, 4).big_l(1, 1).unwrap(), 6);
        assert_eq!(h(2, 2, 3).ell_rep(2).unwrap(), 6);
        assert_eq!(h(3, 1, 2).ell_rep(3).unwrap(), 3);
        assert_eq!(h(2, 1, 2).l_of(1), Err(CycleSetError::NotCyclic));
    }

    #[test]
    fn log_matches_brute_force_everywhere() {
        for par in grid() {
            if !par.is_cyclic() {
                continue;
            }
            for x in 0..par.modulus {
                assert_eq!(
                    Some(par.l_of(x).unwrap()),
                    brute_log(&par, x),
                    "{par:?} x={x}"
                );
                assert_eq!(par.times_power(1, par.l_of(x).unwrap()), x);
                assert_eq!(par.l_of(par.times_power(1, x)).unwrap(), x);
            }
        }
    }

    #[test]
    fn excluded_case_has_exponent_two() {
        let par = h(2, 1, 2);
        for x in 0..4 {
            assert_eq!(par.h_times(x, x), 0);
        }
    }

    #[test]
    fn ell_of_p_eta_minus_nu() {
        for par in grid() {
            if !par.is_cyclic() {
                continue;
            }
            let u = par.p.pow(par.eta - par.nu);
            let expected = if par.p != 2 || par.eta == par.nu {
                u
            } else {
                u + (1 << (par.eta - 1))
            };
            // the p = 2 closed form is stated for 1 < nu < eta
            if par.p == 2 && par.eta > par.nu && par.nu == 1 {
                continue;
            }
            assert_eq!(
                par.ell_rep(u).unwrap(),
                par.reduce(expected as i128),
                "{par:?}"
            );
        }
    }

    #[test]
    fn exhaustive_identities() {
        for par in grid() {
            if !par.is_cyclic() {
                continue;
            }
            let m = par.modulus;
            for j in 0..m {
                for c in 0..m {
                    assert_eq!(par.h_dot(par.times_power(1, j), c), par.h_dot(j, c));
                    for jp in 0..m.min(12) {
                        assert_eq!(par.h_dot(j + jp, c), par.h_dot(j, par.h_dot(jp, c)));
                    }
                }
                // 1^{×(k+1)} = 1 + b_k
                assert_eq!(
                    par.times_power(1, j + 1),
                    par.reduce(1 + par.b_k(j) as i128)
                );
                for jp in 0..m {
                    let big = par.big_l(j, jp).unwrap();
                    let lhs =
                        par.reduce(par.times_power(1, j) as i128 + par.times_power(1, jp) as i128);
                    assert_eq!(lhs, par.times_power(1, big));
                    assert_eq!(
                        par.h_dot(par.times_power(1, j), par.times_power(1, jp)),
                        par.times_power(1, big - j)
                    );
                }
            }
        }
    }

    #[test]
    fn lemma_b_plus_c() {
        // b_j + (l-1-j)·(1^{×l'}) = b_{M-l+j}, M the representative of L(l, l')
        for par in grid() {
            if !par.is_cyclic() || par.modulus > 32 {
                continue;
            }
            let m = par.modulus;
            for l in 1..m {
                for lp in 0..m {
                    let big = par.big_l(l, lp).unwrap();
                    for j in 0..l {
                        let lhs = par.reduce(
                            par.b_k(j) as i128
                                + par.h_dot(l - 1 - j, par.times_power(1, lp)) as i128,
                        );
                        assert_eq!(lhs, par.b_k(big - l + j), "{par:?} l={l} l'={lp} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn tables_and_brace() {
        assert!(verify_cycle_set(&FiniteCycleSetTable::trivial_cyclic(6)).is_empty());
        let par = h(3, 1, 2);
        let t = par.table();
        assert!(verify_cycle_set(&t).is_empty());
        let times = to_brace(&t).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(times[a * 9 + b] as i64, par.h_times(a as i64, b as i64));
            }
        }
        assert_eq!(from_brace(&times, &t.add).unwrap(), t);
        let triv = FiniteCycleSetTable::trivial_cyclic(5);
        let tb = to_brace(&triv).unwrap();
        assert_eq!(tb, triv.add);
        let t2 = h(2, 1, 1).table();
        assert_eq!(from_brace(&to_brace(&t2).unwrap(), &t2.add).unwrap(), t2);

        let mut bad = t.clone();
        bad.dot[9 + 1] = (bad.dot[9 + 1] + 1) % 9;
        assert!(!verify_cycle_set(&bad).is_empty());
    }

    #[test]
    fn socle_and_center() {
        let triv = FiniteCycleSetTable::trivial_cyclic(4);
        assert_eq!(socle(&triv), vec![0, 1, 2, 3]);
        assert_eq!(center(&triv), vec![0, 1, 2, 3]);
        assert_eq!(socle(&h(3, 1, 2).table()), vec![0, 3, 6]);
    }

    proptest! {
        #[test]
        fn times_power_is_iterated_product(i in 0i64..125, j in 0i64..125) {
            let par = h(5, 2, 3);
            let mut acc = 0;
            for _ in 0..j { acc = par.h_times(acc, i); }
            prop_assert_eq!(par.times_power(i, j), acc);
        }

        #[test]
        fn brace_roundtrip(i in 0i64..81, x in 0i64..81) {
            let par = h(3, 2, 4);
            let inv = par.times_inverse(i);
            prop_assert_eq!(par.h_times(i, inv), 0);
            // a·b = a^{×-1} × (a+b)
            prop_assert_eq!(par.h_dot(i, x), par.h_times(inv, par.reduce(i as i128 + x as i128)));
        }
    }
}
