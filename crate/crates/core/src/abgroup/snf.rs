//! Diagonalization of matrices over the ring Z/N.
//!
//! Every group handled by this crate is killed by its exponent N, so all
//! relation matrices can be reduced mod N before elimination. Working in Z/N
//! keeps entries bounded by N instead of letting them grow like integer SNF
//! coefficients do. Row and column operations are the usual unimodular
//! (Bezout) ones, applied to representatives in [0, N).

pub(crate) type Mat = Vec<Vec<i64>>;

#[inline]
pub(crate) fn md(x: i128, n: i64) -> i64 {
    let n = n as i128;
    (((x % n) + n) % n) as i64
}

/// Extended gcd on nonnegative integers: returns (g, s, t) with s*a + t*b = g.
pub(crate) fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0 as i64, -s0 as i64, -t0 as i64)
    } else {
        (r0 as i64, s0 as i64, t0 as i64)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Result of `U * M * V = D` over Z/N.
pub(crate) struct Diagonal {
    /// Diagonal entries d_0, d_1, ... (length min(rows, cols)); representatives in [0, N).
    pub diag: Vec<i64>,
    /// Column transform V (cols x cols).
    pub v: Mat,
    /// Inverse of the row transform, U^{-1} (rows x rows). Only filled when requested.
    pub u_inv: Option<Mat>,
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Diagonalize `m` (rows x cols, entries mod `n`).
pub(crate) fn diagonalize(mut m: Mat, cols: usize, n: i64, want_u_inv: bool) -> Diagonal {
    let rows = m.len();
    for row in m.iter_mut() {
        debug_assert_eq!(row.len(), cols);
        for x in row.iter_mut() {
            *x = md(*x as i128, n);
        }
    }
    let mut v = identity(cols);
    let mut u_inv = if want_u_inv {
        Some(identity(rows))
    } else {
        None
    };
    let k = rows.min(cols);
    let mut diag = Vec::with_capacity(k);

    for t in 0..k {
        // smallest nonzero entry in the trailing block becomes the pivot
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.map_or(true, |(_, _, b)| x < b) {
                    best = Some((i, j, x));
                    if x == 1 {
                        break;
                    }
                }
            }
            if best.map_or(false, |b| b.2 == 1) {
                break;
            }
        }
        let Some((pi, pj, _)) = best else {
            diag.extend(std::iter::repeat(0).take(k - t));
            break;
        };
        if pi != t {
            m.swap(pi, t);
            if let Some(ui) = u_inv.as_mut() {
                for row in ui.iter_mut() {
                    row.swap(pi, t);
                }
            }
        }
        if pj != t {
            for row in m.iter_mut() {
                row.swap(pj, t);
            }
            for row in v.iter_mut() {
                row.swap(pj, t);
            }
        }

        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in (t + 1)..rows {
                let b = m[i][t];
                if b == 0 {
                    continue;
                }
                let a = m[t][t];
                if b % a == 0 {
                    let q = b / a;
                    row_sub(&mut m, i, t, q, n);
                    if let Some(ui) = u_inv.as_mut() {
                        for row in ui.iter_mut() {
                            row[t] = md(row[t] as i128 + q as i128 * row[i] as i128, n);
                        }
                    }
                } else {
                    let (g, s, tt) = egcd(a, b);
                    let (ag, bg) = (a / g, b / g);
                    row_bezout(&mut m, t, i, s, tt, ag, bg, n);
                    if let Some(ui) = u_inv.as_mut() {
                        for row in ui.iter_mut() {
                            let (ct, ci) = (row[t] as i128, row[i] as i128);
                            row[t] = md(ct * ag as i128 + ci * bg as i128, n);
                            row[i] = md(-(tt as i128) * ct + s as i128 * ci, n);
                        }
                    }
                }
            }
            // clear row t right of the pivot
            for j in (t + 1)..cols {
                let b = m[t][j];
                if b == 0 {
                    continue;
                }
                let a = m[t][t];
                if b % a == 0 {
                    let q = b / a;
                    for row in m.iter_mut().chain(v.iter_mut()) {
                        row[j] = md(row[j] as i128 - q as i128 * row[t] as i128, n);
                    }
                } else {
                    let (g, s, tt) = egcd(a, b);
                    let (ag, bg) = (a / g, b / g);
                    for row in m.iter_mut().chain(v.iter_mut()) {
                        let (xt, xj) = (row[t] as i128, row[j] as i128);
                        row[t] = md(s as i128 * xt + tt as i128 * xj, n);
                        row[j] = md(-(bg as i128) * xt + ag as i128 * xj, n);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        diag.push(m[t][t]);
    }
    Diagonal { diag, v, u_inv }
}

fn row_sub(m: &mut Mat, i: usize, t: usize, q: i64, n: i64) {
    let (lo, hi) = m.split_at_mut(i);
    let src = &lo[t];
    for (x, &y) in hi[0].iter_mut().zip(src.iter()) {
        *x = md(*x as i128 - q as i128 * y as i128, n);
    }
}

#[allow(clippy::too_many_arguments)]
fn row_bezout(m: &mut Mat, t: usize, i: usize, s: i64, tt: i64, ag: i64, bg: i64, n: i64) {
    let (lo, hi) = m.split_at_mut(i);
    let rt = &mut lo[t];
    let ri = &mut hi[0];
    for (xt, xi) in rt.iter_mut().zip(ri.iter_mut()) {
        let (a, b) = (*xt as i128, *xi as i128);
        *xt = md(s as i128 * a + tt as i128 * b, n);
        *xi = md(-(bg as i128) * a + ag as i128 * b, n);
    }
}

/// Generators of {x in (Z/N)^cols : M x = 0}.
pub(crate) fn kernel(m: Mat, cols: usize, n: i64) -> Vec<Vec<i64>> {
    let d = diagonalize(m, cols, n, false);
    let mut gens = Vec::new();
    for j in 0..cols {
        let dj = d.diag.get(j).copied().unwrap_or(0);
        let g = gcd(dj, n);
        let scale = n / g;
        if scale % n == 0 {
            continue;
        }
        let col: Vec<i64> = (0..cols)
            .map(|i| md(scale as i128 * d.v[i][j] as i128, n))
            .collect();
        if col.iter().any(|&x| x != 0) {
            gens.push(col);
        }
    }
    gens
}

/// Order of the column space of M inside (Z/N)^rows.
pub(crate) fn image_order(m: Mat, cols: usize, n: i64) -> u128 {
    let d = diagonalize(m, cols, n, false);
    d.diag.iter().map(|&x| (n / gcd(x, n)) as u128).product()
}
