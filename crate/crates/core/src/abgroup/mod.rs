//! Finite abelian groups Z_{n1} + ... + Z_{nk}, their elements and homomorphisms,
//! with kernel / image / subquotient computations.

mod snf;

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use snf::{gcd, lcm, md};

/// Largest admissible cyclic order: n^2 must stay below 2^62.
pub const MAX_ORDER: i64 = 1 << 31;

/// Default bound for exhaustive enumeration of a group.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

/// Cosets are canonicalized to their least element only when the image is at most this large.
const CANONICAL_GUARD: u128 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid cyclic order {0}")]
    InvalidOrder(i64),
    #[error("cyclic order {0} exceeds the exact arithmetic bound")]
    OrderOverflow(i64),
    #[error("element or map does not belong to the expected group")]
    GroupMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix does not define a homomorphism")]
    NotAHomomorphism,
    #[error("image is not contained in the kernel")]
    ImageNotInKernel,
    #[error("size guard exceeded: {size} > {guard}")]
    SizeGuardExceeded { size: u128, guard: u128 },
    #[error("cannot parse group literal {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    orders: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Vec<i64>,
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn make_group(orders: &[i64]) -> Result<FinAbGroup, GroupError> {
    FinAbGroup::new(orders.to_vec())
}

impl FinAbGroup {
    pub fn new(orders: Vec<i64>) -> Result<Self, GroupError> {
        for &n in &orders {
            if n < 1 {
                return Err(GroupError::InvalidOrder(n));
            }
            if n > MAX_ORDER {
                return Err(GroupError::OrderOverflow(n));
            }
        }
        Ok(FinAbGroup { orders })
    }

    /// `k` copies of `Z_n`.
    pub fn cyclic_power(n: i64, k: usize) -> Result<Self, GroupError> {
        Self::new(vec![n; k])
    }

    pub fn trivial() -> Self {
        FinAbGroup { orders: vec![] }
    }

    /// Direct sum `self + other`.
    pub fn sum(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FinAbGroup { orders }
    }

    /// `k` copies of `self`.
    pub fn power(&self, k: usize) -> FinAbGroup {
        let mut orders = Vec::with_capacity(self.orders.len() * k);
        for _ in 0..k {
            orders.extend_from_slice(&self.orders);
        }
        FinAbGroup { orders }
    }

    /// Parse literals such as `Z9`, `Z3+Z27` or `z9+z9` (empty or `0` is the trivial group).
    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let t = s.trim();
        if t.is_empty() || t == "0" {
            return Ok(Self::trivial());
        }
        let mut orders = Vec::new();
        for part in t.split('+') {
            let part = part.trim();
            let digits = part
                .strip_prefix('Z')
                .or_else(|| part.strip_prefix('z'))
                .ok_or_else(|| GroupError::Parse(s.to_string()))?;
            let n: i64 = digits
                .trim()
                .parse()
                .map_err(|_| GroupError::Parse(s.to_string()))?;
            orders.push(n);
        }
        Self::new(orders)
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&n| n as u128).product()
    }

    /// Least common multiple of the cyclic orders (1 for the trivial group).
    pub fn exponent(&self) -> i64 {
        self.orders.iter().fold(1, |acc, &n| lcm(acc, n))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Reduce arbitrary integer coordinates into a canonical element.
    pub fn elem(&self, coords: &[i64]) -> GroupElement {
        assert_eq!(coords.len(), self.rank(), "coordinate count mismatch");
        GroupElement {
            coords: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| md(c as i128, n))
                .collect(),
        }
    }

    pub fn try_elem(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        if coords.len() != self.rank() {
            return Err(GroupError::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        Ok(self.elem(coords))
    }

    /// The i-th standard generator.
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        self.elem(&c)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.rank()
            && x.coords
                .iter()
                .zip(&self.orders)
                .all(|(&c, &n)| (0..n).contains(&c))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.orders)
                .map(|((&a, &b), &n)| md(a as i128 + b as i128, n))
                .collect(),
        }
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.orders)
                .map(|((&a, &b), &n)| md(a as i128 - b as i128, n))
                .collect(),
        }
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        self.scale(-1, x)
    }

    pub fn scale(&self, c: i64, x: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&self.orders)
                .map(|(&a, &n)| md(c as i128 * a as i128, n))
                .collect(),
        }
    }

    pub fn sum_all<'a, I: IntoIterator<Item = &'a GroupElement>>(&self, xs: I) -> GroupElement {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Additive order of `x`.
    pub fn elem_order(&self, x: &GroupElement) -> i64 {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&c, &n)| lcm(acc, n / gcd(c, n)))
    }

    /// Mixed-radix index of an element (lexicographic position).
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn from_index(&self, mut idx: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (c, &n) in coords.iter_mut().zip(&self.orders).rev() {
            *c = (idx % n as usize) as i64;
            idx /= n as usize;
        }
        GroupElement { coords }
    }

    pub fn enumerate_elements(&self) -> Result<ElementIter, GroupError> {
        self.enumerate_elements_with_guard(ENUMERATION_GUARD)
    }

    pub fn enumerate_elements_with_guard(&self, guard: u128) -> Result<ElementIter, GroupError> {
        let size = self.order();
        if size > guard {
            return Err(GroupError::SizeGuardExceeded { size, guard });
        }
        Ok(ElementIter {
            group: self.clone(),
            next: 0,
            total: size as usize,
        })
    }

    /// All elements of the subgroup generated by `gens` (breadth-first closure).
    pub fn subgroup_elements(
        &self,
        gens: &[GroupElement],
        guard: u128,
    ) -> Result<Vec<GroupElement>, GroupError> {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut queue = VecDeque::new();
        let z = self.zero();
        seen.insert(z.clone());
        queue.push_back(z);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g);
                if !seen.contains(&y) {
                    if seen.len() as u128 >= guard {
                        return Err(GroupError::SizeGuardExceeded {
                            size: seen.len() as u128 + 1,
                            guard,
                        });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
            out.push(x);
        }
        out.sort();
        Ok(out)
    }

    /// Order of the subgroup generated by `gens`.
    pub fn subgroup_order(&self, gens: &[GroupElement]) -> u128 {
        let n = self.exponent();
        let m = self.embed_columns(gens, n);
        snf::image_order(m, gens.len(), n)
    }

    /// Matrix over Z/N whose columns are the scaled embeddings of `gens`.
    fn embed_columns(&self, gens: &[GroupElement], n: i64) -> Vec<Vec<i64>> {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &ni)| gens.iter().map(|g| (n / ni) * g.coords[i]).collect())
            .collect()
    }
}

pub fn elem_add(
    g: &FinAbGroup,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<GroupElement, GroupError> {
    if !g.contains(x) || !g.contains(y) {
        return Err(GroupError::GroupMismatch);
    }
    Ok(g.add(x, y))
}

pub fn elem_neg(g: &FinAbGroup, x: &GroupElement) -> Result<GroupElement, GroupError> {
    if !g.contains(x) {
        return Err(GroupError::GroupMismatch);
    }
    Ok(g.neg(x))
}

pub fn elem_scale(g: &FinAbGroup, c: i64, x: &GroupElement) -> Result<GroupElement, GroupError> {
    if !g.contains(x) {
        return Err(GroupError::GroupMismatch);
    }
    Ok(g.scale(c, x))
}

pub struct ElementIter {
    group: FinAbGroup,
    next: usize,
    total: usize,
}

impl Iterator for ElementIter {
    type Item = GroupElement;
    fn next(&mut self) -> Option<GroupElement> {
        if self.next >= self.total {
            return None;
        }
        let x = self.group.from_index(self.next);
        self.next += 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.total - self.next;
        (r, Some(r))
    }
}

/// A homomorphism given by an integer matrix (codomain rows x domain columns).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    pub domain: FinAbGroup,
    pub codomain: FinAbGroup,
    matrix: Vec<Vec<i64>>,
}

impl Homomorphism {
    /// Build from a matrix, reducing row i mod the i-th codomain order. Does not check
    /// well-definedness; see [`Homomorphism::validate`] and [`Homomorphism::new`].
    pub fn from_matrix(
        domain: FinAbGroup,
        codomain: FinAbGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self, GroupError> {
        if matrix.len() != codomain.rank() || matrix.iter().any(|r| r.len() != domain.rank()) {
            return Err(GroupError::ShapeMismatch(format!(
                "expected {}x{} matrix",
                codomain.rank(),
                domain.rank()
            )));
        }
        let matrix = matrix
            .into_iter()
            .zip(codomain.orders())
            .map(|(row, &n)| row.into_iter().map(|x| md(x as i128, n)).collect())
            .collect();
        Ok(Homomorphism {
            domain,
            codomain,
            matrix,
        })
    }

    /// Build and require well-definedness.
    pub fn new(
        domain: FinAbGroup,
        codomain: FinAbGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self, GroupError> {
        let h = Self::from_matrix(domain, codomain, matrix)?;
        if !h.validate() {
            return Err(GroupError::NotAHomomorphism);
        }
        Ok(h)
    }

    pub fn endo(g: &FinAbGroup, matrix: Vec<Vec<i64>>) -> Result<Self, GroupError> {
        Self::new(g.clone(), g.clone(), matrix)
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        let k = g.rank();
        let m = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::from_matrix(g.clone(), g.clone(), m).expect("square")
    }

    pub fn zero(domain: &FinAbGroup, codomain: &FinAbGroup) -> Self {
        Homomorphism {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: vec![vec![0; domain.rank()]; codomain.rank()],
        }
    }

    /// Multiplication by an integer on `g`.
    pub fn scalar(g: &FinAbGroup, c: i64) -> Self {
        Self::identity(g).scale(c)
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// m[i][j] * n_j^{dom} = 0 mod n_i^{cod} for all i, j.
    pub fn validate(&self) -> bool {
        self.matrix
            .iter()
            .zip(self.codomain.orders())
            .all(|(row, &ni)| {
                row.iter()
                    .zip(self.domain.orders())
                    .all(|(&m, &nj)| md(m as i128 * nj as i128, ni) == 0)
            })
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        debug_assert_eq!(x.coords.len(), self.domain.rank());
        GroupElement {
            coords: self
                .matrix
                .iter()
                .zip(self.codomain.orders())
                .map(|(row, &n)| {
                    let s: i128 = row
                        .iter()
                        .zip(&x.coords)
                        .map(|(&a, &b)| a as i128 * b as i128)
                        .sum();
                    md(s, n)
                })
                .collect(),
        }
    }

    pub fn try_apply(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        if !self.domain.contains(x) {
            return Err(GroupError::GroupMismatch);
        }
        Ok(self.apply(x))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism, GroupError> {
        if inner.codomain != self.domain {
            return Err(GroupError::GroupMismatch);
        }
        let cols = inner.domain.rank();
        let matrix = self
            .matrix
            .iter()
            .zip(self.codomain.orders())
            .map(|(row, &n)| {
                (0..cols)
                    .map(|k| {
                        let s: i128 = row
                            .iter()
                            .zip(&inner.matrix)
                            .map(|(&a, irow)| a as i128 * irow[k] as i128)
                            .sum();
                        md(s, n)
                    })
                    .collect()
            })
            .collect();
        Ok(Homomorphism {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        })
    }

    pub fn power(&self, mut e: u64) -> Result<Homomorphism, GroupError> {
        if self.domain != self.codomain {
            return Err(GroupError::GroupMismatch);
        }
        let mut acc = Homomorphism::identity(&self.domain);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Homomorphism) -> Result<Homomorphism, GroupError> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Homomorphism) -> Result<Homomorphism, GroupError> {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Homomorphism, sign: i64) -> Result<Homomorphism, GroupError> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(GroupError::GroupMismatch);
        }
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .zip(self.codomain.orders())
            .map(|((r1, r2), &n)| {
                r1.iter()
                    .zip(r2)
                    .map(|(&a, &b)| md(a as i128 + sign as i128 * b as i128, n))
                    .collect()
            })
            .collect();
        Ok(Homomorphism {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        })
    }

    pub fn scale(&self, c: i64) -> Homomorphism {
        let matrix = self
            .matrix
            .iter()
            .zip(self.codomain.orders())
            .map(|(row, &n)| row.iter().map(|&a| md(a as i128 * c as i128, n)).collect())
            .collect();
        Homomorphism {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Stack maps with a common domain into one map to the direct sum of codomains.
    pub fn stack(maps: &[Homomorphism]) -> Result<Homomorphism, GroupError> {
        let first = maps
            .first()
            .ok_or_else(|| GroupError::ShapeMismatch("no maps".into()))?;
        let mut codomain = FinAbGroup::trivial();
        let mut matrix = Vec::new();
        for m in maps {
            if m.domain != first.domain {
                return Err(GroupError::GroupMismatch);
            }
            codomain = codomain.sum(&m.codomain);
            matrix.extend(m.matrix.iter().cloned());
        }
        Ok(Homomorphism {
            domain: first.domain.clone(),
            codomain,
            matrix,
        })
    }

    /// Block map `(x, y) -> self(x) + other(y)` from the sum of the domains.
    pub fn hjoin(&self, other: &Homomorphism) -> Result<Homomorphism, GroupError> {
        if self.codomain != other.codomain {
            return Err(GroupError::GroupMismatch);
        }
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Ok(Homomorphism {
            domain: self.domain.sum(&other.domain),
            codomain: self.codomain.clone(),
            matrix,
        })
    }

    /// Matrix over Z/N of the lifted map (Z/N)^{dom rank} -> (Z/N)^{cod rank},
    /// codomain row i scaled by N / n_i so that the codomain embeds in (Z/N)^k.
    fn lifted(&self, n: i64) -> Vec<Vec<i64>> {
        self.matrix
            .iter()
            .zip(self.codomain.orders())
            .map(|(row, &ni)| {
                row.iter()
                    .map(|&x| md((n / ni) as i128 * x as i128, n))
                    .collect()
            })
            .collect()
    }

    fn common_exponent(&self) -> i64 {
        lcm(self.domain.exponent(), self.codomain.exponent()).max(1)
    }
}

pub fn hom_validate(h: &Homomorphism) -> bool {
    h.validate()
}

/// Generators of the kernel.
pub fn kernel_gens(h: &Homomorphism) -> Vec<GroupElement> {
    let n = h.common_exponent();
    let mut rows = h.lifted(n);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    rows.sort();
    rows.dedup();
    let cols = h.domain.rank();
    let gens = snf::kernel(rows, cols, n);
    let mut out: Vec<GroupElement> = gens
        .into_iter()
        .map(|g| h.domain.elem(&g))
        .filter(|g| g.coords.iter().any(|&c| c != 0))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Generators of the image (images of the standard generators).
pub fn image_gens(h: &Homomorphism) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = (0..h.domain.rank())
        .map(|j| h.apply(&h.domain.basis(j)))
        .filter(|g| g.coords.iter().any(|&c| c != 0))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The group (∩ ker) / im with invariant factors d1 | d2 | ... and one representative per factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subquotient {
    pub invariant_factors: Vec<i64>,
    pub transversal: Vec<GroupElement>,
    pub order: u128,
    /// Generators of the image subgroup, kept for membership tests.
    #[serde(skip)]
    pub image: Vec<GroupElement>,
}

impl Subquotient {
    /// Every element of the quotient as a representative combination of the transversal.
    pub fn class_representatives(&self, g: &FinAbGroup) -> Vec<GroupElement> {
        let mut reps = vec![g.zero()];
        for (gen, &d) in self.transversal.iter().zip(&self.invariant_factors) {
            let mut next = Vec::with_capacity(reps.len() * d as usize);
            for r in &reps {
                for c in 0..d {
                    next.push(g.add(r, &g.scale(c, gen)));
                }
            }
            reps = next;
        }
        reps
    }
}

/// Compute (∩_i ker kernel_maps[i]) / im(image_map) inside `g`.
pub fn subquotient(
    g: &FinAbGroup,
    kernel_maps: &[Homomorphism],
    image_map: &Homomorphism,
) -> Result<Subquotient, GroupError> {
    if image_map.codomain != *g || kernel_maps.iter().any(|k| k.domain != *g) {
        return Err(GroupError::GroupMismatch);
    }
    let kgens = if kernel_maps.is_empty() {
        (0..g.rank())
            .map(|i| g.basis(i))
            .filter(|x| x.coords.iter().any(|&c| c != 0))
            .collect()
    } else {
        kernel_gens(&Homomorphism::stack(kernel_maps)?)
    };
    let igens = image_gens(image_map);
    for y in &igens {
        if kernel_maps
            .iter()
            .any(|k| k.apply(y).coords.iter().any(|&c| c != 0))
        {
            return Err(GroupError::ImageNotInKernel);
        }
    }
    Ok(quotient_of_generated(g, &kgens, &igens))
}

/// <kgens> / <igens> where <igens> ⊆ <kgens>.
pub(crate) fn quotient_of_generated(
    g: &FinAbGroup,
    kgens: &[GroupElement],
    igens: &[GroupElement],
) -> Subquotient {
    let n = g.exponent().max(1);
    let a = kgens.len();
    // relations among the kernel generators modulo the image:
    // x with sum x_j k_j in <igens>, from the kernel of (x, y) -> sum x_j k_j - sum y_l i_l
    let all: Vec<GroupElement> = kgens.iter().chain(igens.iter()).cloned().collect();
    let joined = g.embed_columns(&all, n);
    let rel = snf::kernel(joined, all.len(), n);
    // rows of `rel_t` are relation vectors restricted to the kernel generators;
    // diagonalize the a x (#relations) matrix whose columns are the relations
    let mut rmat: Vec<Vec<i64>> = vec![Vec::with_capacity(rel.len()); a];
    for r in &rel {
        for j in 0..a {
            rmat[j].push(r[j]);
        }
    }
    let d = snf::diagonalize(rmat, rel.len(), n, true);
    let u_inv = d.u_inv.expect("requested");
    let mut cyclic: Vec<(GroupElement, i64)> = Vec::new();
    for i in 0..a {
        let di = d.diag.get(i).copied().unwrap_or(0);
        let ord = gcd(di, n);
        if ord <= 1 {
            continue;
        }
        let mut x = g.zero();
        for (j, kg) in kgens.iter().enumerate() {
            x = g.add(&x, &g.scale(u_inv[j][i], kg));
        }
        cyclic.push((x, ord));
    }

    // split into prime-power parts, then recombine into invariant factors
    let mut primes: Vec<i64> = Vec::new();
    for &(_, o) in &cyclic {
        for q in prime_factors(o) {
            if !primes.contains(&q) {
                primes.push(q);
            }
        }
    }
    primes.sort();
    let mut per_prime: Vec<Vec<(i64, GroupElement)>> = Vec::new();
    for &q in &primes {
        let mut parts = Vec::new();
        for (x, o) in &cyclic {
            let mut qe = 1;
            let mut rest = *o;
            while rest % q == 0 {
                rest /= q;
                qe *= q;
            }
            if qe > 1 {
                parts.push((qe, g.scale(rest, x)));
            }
        }
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        per_prime.push(parts);
    }
    let count = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors: Vec<(i64, GroupElement)> = (0..count)
        .map(|j| {
            let mut d = 1;
            let mut x = g.zero();
            for parts in &per_prime {
                if let Some((qe, y)) = parts.get(j) {
                    d *= qe;
                    x = g.add(&x, y);
                }
            }
            (d, x)
        })
        .collect();
    factors.reverse(); // d1 | d2 | ...

    let image_order = g.subgroup_order(igens);
    if image_order <= CANONICAL_GUARD {
        if let Ok(img) = g.subgroup_elements(igens, CANONICAL_GUARD) {
            for (_, x) in factors.iter_mut() {
                *x = img.iter().map(|i| g.add(x, i)).min().expect("nonempty");
            }
        }
    }
    let order = factors.iter().map(|(d, _)| *d as u128).product();
    Subquotient {
        invariant_factors: factors.iter().map(|(d, _)| *d).collect(),
        transversal: factors.into_iter().map(|(_, x)| x).collect(),
        order,
        image: igens.to_vec(),
    }
}

fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Is `x` in the subgroup generated by `gens`?
pub fn in_subgroup(g: &FinAbGroup, gens: &[GroupElement], x: &GroupElement) -> bool {
    let mut with = gens.to_vec();
    with.push(x.clone());
    g.subgroup_order(&with) == g.subgroup_order(gens)
}

/// Order of (∩ ker)/im by brute force; used as an independent check on small groups.
pub fn subquotient_order_exhaustive(
    g: &FinAbGroup,
    kernel_maps: &[Homomorphism],
    image_map: &Homomorphism,
    guard: u128,
) -> Result<u128, GroupError> {
    let ker = g
        .enumerate_elements_with_guard(guard)?
        .filter(|x| {
            kernel_maps
                .iter()
                .all(|k| k.apply(x).coords.iter().all(|&c| c == 0))
        })
        .count() as u128;
    let img: HashSet<GroupElement> = image_map
        .domain
        .enumerate_elements_with_guard(guard)?
        .map(|y| image_map.apply(&y))
        .collect();
    Ok(ker / img.len() as u128)
}
