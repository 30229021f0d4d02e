//! The normalized double complex of `H` with coefficients in `I`, its
//! differentials `∂_h`, `∂_v`, the perturbation `D`, and an independent
//! homology oracle for `H^2` assembled from the differential matrices alone.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{
    subquotient, FinAbGroup, GroupElement, GroupError, Homomorphism, Subquotient,
};
use crate::actions::ActionPair;

/// Maximum number of rows (tuple coordinates) of the degree-3 matrix used by the oracle.
pub const ORACLE_GUARD: u128 = 5_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("bidegree ({r},{s}) out of range")]
    DegreeOutOfRange { r: usize, s: usize },
    #[error("cochains live over different groups or moduli")]
    Mismatch,
    #[error("size guard exceeded: {size} > {guard}")]
    SizeGuardExceeded { size: u128, guard: u128 },
    #[error(
        "cocycle routes disagree: total differential says {total}, direct equations say {direct}"
    )]
    RouteDisagreement { total: bool, direct: bool },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed cochain: {0}")]
    Malformed(String),
}

/// A dense map `H^{r+s} -> I` in bidegree `(r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub r: usize,
    pub s: usize,
    /// p^eta
    pub m: i64,
    pub group: FinAbGroup,
    values: Vec<GroupElement>,
}

#[derive(Serialize, Deserialize)]
struct CochainJson {
    r: usize,
    s: usize,
    m: i64,
    orders: Vec<i64>,
    values: Vec<Vec<i64>>,
}

impl Cochain {
    pub fn zeros(r: usize, s: usize, m: i64, group: &FinAbGroup) -> Self {
        let len = (m as usize).pow((r + s) as u32);
        Cochain {
            r,
            s,
            m,
            group: group.clone(),
            values: vec![group.zero(); len],
        }
    }

    pub fn from_fn<F: FnMut(&[i64]) -> GroupElement>(
        r: usize,
        s: usize,
        m: i64,
        group: &FinAbGroup,
        mut f: F,
    ) -> Self {
        let mut c = Self::zeros(r, s, m, group);
        let n = r + s;
        let mut tuple = vec![0i64; n];
        for idx in 0..c.values.len() {
            c.decode(idx, &mut tuple);
            c.values[idx] = f(&tuple);
        }
        c
    }

    pub fn arity(&self) -> usize {
        self.r + self.s
    }

    fn decode(&self, mut idx: usize, out: &mut [i64]) {
        for x in out.iter_mut().rev() {
            *x = (idx % self.m as usize) as i64;
            idx /= self.m as usize;
        }
    }

    fn index(&self, args: &[i64]) -> usize {
        debug_assert_eq!(args.len(), self.arity());
        args.iter().fold(0usize, |acc, &h| {
            acc * self.m as usize + crate::abgroup::md(h as i128, self.m) as usize
        })
    }

    /// Value at a tuple; arguments are reduced mod p^eta.
    pub fn get(&self, args: &[i64]) -> &GroupElement {
        &self.values[self.index(args)]
    }

    pub fn set(&mut self, args: &[i64], v: GroupElement) {
        let i = self.index(args);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.coords.iter().all(|&c| c == 0))
    }

    fn same_shape(&self, o: &Cochain) -> bool {
        self.r == o.r && self.s == o.s && self.m == o.m && self.group == o.group
    }

    pub fn add(&self, o: &Cochain) -> Result<Cochain, ComplexError> {
        if !self.same_shape(o) {
            return Err(ComplexError::Mismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| self.group.add(a, b))
            .collect();
        Ok(Cochain {
            values,
            ..self.clone_shape()
        })
    }

    pub fn scale(&self, c: i64) -> Cochain {
        let values = self.values.iter().map(|a| self.group.scale(c, a)).collect();
        Cochain {
            values,
            ..self.clone_shape()
        }
    }

    pub fn neg(&self) -> Cochain {
        self.scale(-1)
    }

    fn clone_shape(&self) -> Cochain {
        Cochain {
            r: self.r,
            s: self.s,
            m: self.m,
            group: self.group.clone(),
            values: Vec::new(),
        }
    }

    /// Zero whenever some argument is zero.
    pub fn is_normalized(&self) -> bool {
        let mut t = vec![0i64; self.arity()];
        (0..self.values.len()).all(|idx| {
            self.decode(idx, &mut t);
            !t.contains(&0) || self.values[idx].coords.iter().all(|&c| c == 0)
        })
    }

    /// Signed shuffle sums over the last `s` arguments vanish.
    pub fn satisfies_shuffles(&self) -> bool {
        let n = self.arity();
        let mut t = vec![0i64; n];
        let shuffles: Vec<Vec<(Vec<usize>, i64)>> =
            (1..self.s).map(|l| shuffles(l, self.s)).collect();
        for idx in 0..self.values.len() {
            self.decode(idx, &mut t);
            for sh in &shuffles {
                let mut acc = self.group.zero();
                let mut args = t.clone();
                for (sigma, sign) in sh {
                    for (i, &pos) in sigma.iter().enumerate() {
                        args[self.r + pos] = t[self.r + i];
                    }
                    acc = self
                        .group
                        .add(&acc, &self.group.scale(*sign, self.get(&args)));
                }
                if acc.coords.iter().any(|&c| c != 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CochainJson {
            r: self.r,
            s: self.s,
            m: self.m,
            orders: self.group.orders().to_vec(),
            values: self.values.iter().map(|v| v.coords.clone()).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Cochain, ComplexError> {
        let j: CochainJson = serde_json::from_value(v.clone())
            .map_err(|e| ComplexError::Malformed(e.to_string()))?;
        let group = FinAbGroup::new(j.orders)?;
        let len = (j.m as usize).pow((j.r + j.s) as u32);
        if j.values.len() != len {
            return Err(ComplexError::Malformed(format!("expected {len} values")));
        }
        let values = j
            .values
            .iter()
            .map(|c| group.try_elem(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cochain {
            r: j.r,
            s: j.s,
            m: j.m,
            group,
            values,
        })
    }
}

/// `(l, s-l)`-shuffles as (positions of the moved arguments, sign).
fn shuffles(l: usize, s: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << s) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let first: Vec<usize> = (0..s).filter(|&i| mask & (1 << i) != 0).collect();
        let rest: Vec<usize> = (0..s).filter(|&i| mask & (1 << i) == 0).collect();
        let sigma: Vec<usize> = first.iter().chain(rest.iter()).copied().collect();
        let mut inv = 0;
        for i in 0..s {
            for j in (i + 1)..s {
                if sigma[i] > sigma[j] {
                    inv += 1;
                }
            }
        }
        out.push((sigma, if inv % 2 == 0 { 1 } else { -1 }));
    }
    out
}

/// The degree-2 cochain `(β, f)` in bidegrees (0,2) and (1,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCochain {
    pub beta: Cochain,
    pub f: Cochain,
}

/// The degree-3 cochain in bidegrees (0,3), (1,2), (2,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeCochain {
    pub c03: Cochain,
    pub c12: Cochain,
    pub c21: Cochain,
}

impl ThreeCochain {
    pub fn is_zero(&self) -> bool {
        self.c03.is_zero() && self.c12.is_zero() && self.c21.is_zero()
    }
}

fn check_degree(c: &Cochain) -> Result<(), ComplexError> {
    if c.s == 0 || c.arity() > 2 {
        return Err(ComplexError::DegreeOutOfRange { r: c.r, s: c.s });
    }
    Ok(())
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Horizontal differential `(r, s) -> (r+1, s)`.
pub fn del_h(c: &Cochain, ap: &ActionPair) -> Result<Cochain, ComplexError> {
    check_degree(c)?;
    let (r, n) = (c.r, c.arity());
    let par = &ap.params;
    let g = &c.group;
    let out = Cochain::from_fn(r + 1, c.s, c.m, g, |h| {
        let mut args: Vec<i64> = h[1..].iter().map(|&x| par.h_dot(h[0], x)).collect();
        let mut acc = c.get(&args).clone();
        for j in 1..=r {
            args.clear();
            args.extend_from_slice(&h[..j - 1]);
            args.push(par.reduce(h[j - 1] as i128 + h[j] as i128));
            args.extend_from_slice(&h[j + 1..]);
            acc = g.add(&acc, &g.scale(sign(j), c.get(&args)));
        }
        let x: i128 = h[..r].iter().map(|&v| v as i128).sum();
        let act = par.h_dot(par.reduce(x), h[r]);
        args.clear();
        args.extend_from_slice(&h[..r]);
        args.extend_from_slice(&h[r + 1..=n]);
        let last = ap.diamond(act, c.get(&args));
        g.add(&acc, &g.scale(sign(r + 1), &last))
    });
    debug_assert!(out.is_normalized());
    Ok(out)
}

/// Vertical differential `(r, s) -> (r, s+1)`.
pub fn del_v(c: &Cochain) -> Result<Cochain, ComplexError> {
    check_degree(c)?;
    let (r, s, n) = (c.r, c.s, c.arity());
    let m = c.m;
    let g = &c.group;
    let red = |x: i128| crate::abgroup::md(x, m);
    let out = Cochain::from_fn(r, s + 1, m, g, |h| {
        let mut args: Vec<i64> = h[..r].iter().chain(h[r + 1..].iter()).copied().collect();
        let mut acc = g.scale(sign(r), c.get(&args));
        for j in (r + 1)..=(r + s) {
            args.clear();
            args.extend_from_slice(&h[..j - 1]);
            args.push(red(h[j - 1] as i128 + h[j] as i128));
            args.extend_from_slice(&h[j + 1..]);
            acc = g.add(&acc, &g.scale(sign(j), c.get(&args)));
        }
        g.add(&acc, &g.scale(sign(r + s + 1), c.get(&h[..n])))
    });
    debug_assert!(out.is_normalized());
    Ok(out)
}

/// The perturbation `D : (r, s) -> (r+s, 1)`.
pub fn d_map(c: &Cochain, ap: &ActionPair) -> Result<Cochain, ComplexError> {
    check_degree(c)?;
    let (r, n) = (c.r, c.arity());
    let par = &ap.params;
    let g = &c.group;
    let out = Cochain::from_fn(n, 1, c.m, g, |h| {
        if ap.b_is_zero() {
            return g.zero();
        }
        let x = par.reduce(h[..r].iter().map(|&v| v as i128).sum());
        let y = par.reduce(h[r..n].iter().map(|&v| v as i128).sum());
        let inner = ap.diamond(par.h_dot(x, y), c.get(&h[..n]));
        let at = par.h_dot(par.reduce(x as i128 + y as i128), h[n]);
        g.scale(sign(n), &ap.yleft(&inner, at))
    });
    debug_assert!(out.is_normalized());
    Ok(out)
}

/// `t -> (∂_v t, ∂_h t + D t)`
pub fn total_d1(t: &Cochain, ap: &ActionPair) -> Result<TwoCochain, ComplexError> {
    if (t.r, t.s) != (0, 1) {
        return Err(ComplexError::DegreeOutOfRange { r: t.r, s: t.s });
    }
    Ok(TwoCochain {
        beta: del_v(t)?,
        f: del_h(t, ap)?.add(&d_map(t, ap)?)?,
    })
}

/// `(β, f) -> (∂_v β, ∂_h β + ∂_v f, ∂_h f + D β + D f)`
pub fn total_d2(c: &TwoCochain, ap: &ActionPair) -> Result<ThreeCochain, ComplexError> {
    if (c.beta.r, c.beta.s, c.f.r, c.f.s) != (0, 2, 1, 1) {
        return Err(ComplexError::DegreeOutOfRange {
            r: c.beta.r,
            s: c.beta.s,
        });
    }
    Ok(ThreeCochain {
        c03: del_v(&c.beta)?,
        c12: del_h(&c.beta, ap)?.add(&del_v(&c.f)?)?,
        c21: del_h(&c.f, ap)?
            .add(&d_map(&c.beta, ap)?)?
            .add(&d_map(&c.f, ap)?)?,
    })
}

/// If `β` has the shape `β(i,j) = γ` exactly when `i + j >= p^eta`, return `γ`.
fn standard_gamma(beta: &Cochain) -> Option<GroupElement> {
    let m = beta.m;
    let gamma = beta.get(&[m - 1, 1]).clone();
    let z = beta.group.zero();
    for i in 0..m {
        for j in 0..m {
            let want = if i + j >= m { &gamma } else { &z };
            if beta.get(&[i, j]) != want {
                return None;
            }
        }
    }
    Some(gamma)
}

/// Direct evaluation of the two cocycle equations for `(β, f)` with `β` standard.
pub fn direct_cocycle_equations(f: &Cochain, gamma: &GroupElement, ap: &ActionPair) -> bool {
    let par = &ap.params;
    let g = &f.group;
    let m = f.m;
    let alpha = |i: i64, j: i64| if i + j >= m { gamma.clone() } else { g.zero() };
    for a in 0..m {
        for b in 0..m {
            let ab = par.h_dot(a, b);
            let apb = par.reduce(a as i128 + b as i128);
            for c in 0..m {
                let ac = par.h_dot(a, c);
                let lhs = g.sub(
                    &g.sub(
                        f.get(&[a, par.reduce(b as i128 + c as i128)]),
                        f.get(&[a, b]),
                    ),
                    f.get(&[a, c]),
                );
                let rhs = g.sub(&ap.diamond(a, &alpha(b, c)), &alpha(ab, ac));
                if lhs != rhs {
                    return false;
                }
                let w = par.h_dot(apb, c);
                let rhs2 = g.sum_all(&[
                    ap.diamond(ab, f.get(&[a, c])),
                    f.get(&[ab, ac]).clone(),
                    ap.yleft(&ap.diamond(ab, f.get(&[a, b])), w),
                    ap.yleft(&ap.diamond(apb, &alpha(a, b)), w),
                ]);
                if *f.get(&[apb, c]) != rhs2 {
                    return false;
                }
            }
        }
    }
    true
}

/// `total_d2(c) = 0`, cross-checked against the direct equations when `β` is standard.
pub fn is_2cocycle(c: &TwoCochain, ap: &ActionPair) -> Result<bool, ComplexError> {
    let total = total_d2(c, ap)?.is_zero();
    if let Some(gamma) = standard_gamma(&c.beta) {
        let direct = direct_cocycle_equations(&c.f, &gamma, ap);
        if direct != total {
            return Err(ComplexError::RouteDisagreement { total, direct });
        }
    }
    Ok(total)
}

/// `H^2` computed as ker(total_d2) / im(total_d1) over the free coordinates of the
/// normalized complex: β on pairs `1 <= h <= h'` (symmetric), f on all nonzero pairs.
pub fn oracle_h2(ap: &ActionPair) -> Result<Subquotient, ComplexError> {
    let m = ap.params.modulus;
    let g = &ap.group;
    let k = g.rank();
    let nz = (m - 1) as u128;
    let rows = 3 * nz * nz * nz * k as u128;
    if rows > ORACLE_GUARD {
        return Err(ComplexError::SizeGuardExceeded {
            size: rows,
            guard: ORACLE_GUARD,
        });
    }
    let beta_coords: Vec<(i64, i64)> = (1..m).flat_map(|h| (h..m).map(move |hp| (h, hp))).collect();
    let f_coords: Vec<(i64, i64)> = (1..m).flat_map(|h| (1..m).map(move |hp| (h, hp))).collect();
    let c2_group = g.power(beta_coords.len() + f_coords.len());
    let c3_group = g.power(3 * (nz * nz * nz) as usize);
    let c1_group = g.power((m - 1) as usize);

    let read2 = |c: &TwoCochain| -> Vec<i64> {
        let mut v = Vec::with_capacity(c2_group.rank());
        for &(h, hp) in &beta_coords {
            v.extend_from_slice(&c.beta.get(&[h, hp]).coords);
        }
        for &(h, hp) in &f_coords {
            v.extend_from_slice(&c.f.get(&[h, hp]).coords);
        }
        v
    };
    let read3 = |c: &ThreeCochain| -> Vec<i64> {
        let mut v = Vec::with_capacity(c3_group.rank());
        for part in [&c.c03, &c.c12, &c.c21] {
            for a in 1..m {
                for b in 1..m {
                    for cc in 1..m {
                        v.extend_from_slice(&part.get(&[a, b, cc]).coords);
                    }
                }
            }
        }
        v
    };

    let mut d2_cols: Vec<Vec<i64>> = Vec::new();
    for &(h, hp) in &beta_coords {
        for e in 0..k {
            let mut beta = Cochain::zeros(0, 2, m, g);
            beta.set(&[h, hp], g.basis(e));
            beta.set(&[hp, h], g.basis(e));
            let c = TwoCochain {
                beta,
                f: Cochain::zeros(1, 1, m, g),
            };
            d2_cols.push(read3(&total_d2(&c, ap)?));
        }
    }
    for &(h, hp) in &f_coords {
        for e in 0..k {
            let mut f = Cochain::zeros(1, 1, m, g);
            f.set(&[h, hp], g.basis(e));
            let c = TwoCochain {
                beta: Cochain::zeros(0, 2, m, g),
                f,
            };
            d2_cols.push(read3(&total_d2(&c, ap)?));
        }
    }
    let mut d1_cols: Vec<Vec<i64>> = Vec::new();
    for h in 1..m {
        for e in 0..k {
            let mut t = Cochain::zeros(0, 1, m, g);
            t.set(&[h], g.basis(e));
            d1_cols.push(read2(&total_d1(&t, ap)?));
        }
    }
    let transpose = |cols: &[Vec<i64>], nrows: usize| -> Vec<Vec<i64>> {
        (0..nrows)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect()
    };
    let d2 = Homomorphism::new(
        c2_group.clone(),
        c3_group.clone(),
        transpose(&d2_cols, c3_group.rank()),
    )?;
    let d1 = Homomorphism::new(
        c1_group,
        c2_group.clone(),
        transpose(&d1_cols, c2_group.rank()),
    )?;
    Ok(subquotient(&c2_group, &[d2], &d1)?)
}
