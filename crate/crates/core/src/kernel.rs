//! Characteristic equation, segment bases and the boundary determinant.
//!
//! Free vibration of the arch reduces to
//!
//! ```text
//! X'''' + (2 + K eta) X'' + (1 - K) X = 0
//! ```
//!
//! Substituting `X = exp(lambda phi)` gives the bi-quadratic
//! `lambda^4 + p2 lambda^2 + p0 = 0` with `p2 = 2 + K eta`, `p0 = 1 - K`. Both
//! roots `s = lambda^2` are real for `K >= 0`: the lower root `s_lo <= -1` is
//! always oscillatory and the upper root `s_hi` changes sign at `K = 1`.
//!
//! Each root contributes the pair
//!
//! ```text
//! C(s, x) = cosh(sqrt(s) x)            S(s, x) = sinh(sqrt(s) x) / sqrt(s)     s > 0
//! C(s, x) = 1                          S(s, x) = x                             s = 0
//! C(s, x) = cos(sqrt(-s) x)            S(s, x) = sin(sqrt(-s) x) / sqrt(-s)    s < 0
//! ```
//!
//! which is analytic in `s`, so the determinant stays continuous when `s_hi`
//! crosses zero. Derivatives follow from `C' = s S` and `S' = C`. Hyperbolic
//! columns are divided by `cosh(sqrt(s) L)` (L = segment length) so entries
//! stay bounded. The lower pair is divided by `s_hi - s_lo`; close to the
//! double root at `K = 0` it is replaced by the divided difference between the
//! two roots, and exactly at the double root by the derivative in `s`.

use crate::error::{Error, Result};

/// Relative threshold below which `p0` or the discriminant count as zero.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Pivots at or below this size (on the row-normalized matrix) give sign 0.
pub const ZERO_PIVOT_TOL: f64 = 1e-13;

/// Minimum relative length of a crack segment.
const SEGMENT_TOL: f64 = 1e-9;

/// Below this root separation the lower pair uses divided differences.
const DIVIDED_DIFFERENCE_GAP: f64 = 1.0;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoeffs {
    pub p2: f64,
    pub p0: f64,
    pub K: f64,
    pub eta_nd: f64,
}

#[allow(non_snake_case)]
pub fn characteristic_coefficients(K: f64, eta_nd: f64) -> CharCoeffs {
    CharCoeffs {
        p2: 2.0 + K * eta_nd,
        p0: 1.0 - K,
        K,
        eta_nd,
    }
}

impl CharCoeffs {
    /// `p2^2 - 4 p0`, expanded as `K (4 + 4 eta + K eta^2)` to avoid cancellation.
    pub fn discriminant(&self) -> f64 {
        let (k, eta) = (self.K, self.eta_nd);
        k * (4.0 + 4.0 * eta + k * eta * eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `K < 1`: both `lambda^2` negative.
    TwoTrig,
    /// `K > 1`: one positive and one negative `lambda^2`.
    TrigPlusHyperbolic,
    /// `K = 1`: `lambda^2 = 0` is a root, basis `{1, phi}` for that pair.
    DegenerateZeroRoot,
    /// `K = 0`: double root `lambda^2 = -1`.
    DegenerateRepeated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LowerPair {
    Plain,
    DividedDifference,
    Derivative,
}

/// Four independent solutions of the characteristic ODE at a trial `K`.
///
/// Column order is `[C(s_hi), S(s_hi), C(s_lo), S(s_lo)]` up to the positive
/// scalings described in the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    coeffs: CharCoeffs,
    branch: Branch,
    lower: LowerPair,
    s_hi: f64,
    s_lo: f64,
}

pub fn quartic_roots(coeffs: CharCoeffs, tol: f64) -> ModeBasis {
    let scale = (coeffs.p2 * coeffs.p2).max(1.0);
    let disc = coeffs.discriminant().max(0.0);
    if disc <= tol * scale {
        let s = -0.5 * coeffs.p2;
        return ModeBasis {
            coeffs,
            branch: Branch::DegenerateRepeated,
            lower: LowerPair::Derivative,
            s_hi: s,
            s_lo: s,
        };
    }
    let gap = disc.sqrt();
    let mut s_lo = -0.5 * (coeffs.p2 + gap);
    let (s_hi, branch) = if coeffs.p0.abs() <= tol * scale {
        s_lo = -coeffs.p2;
        (0.0, Branch::DegenerateZeroRoot)
    } else if coeffs.p0 > 0.0 {
        (coeffs.p0 / s_lo, Branch::TwoTrig)
    } else {
        (coeffs.p0 / s_lo, Branch::TrigPlusHyperbolic)
    };
    let lower = if s_hi - s_lo < DIVIDED_DIFFERENCE_GAP {
        LowerPair::DividedDifference
    } else {
        LowerPair::Plain
    };
    ModeBasis {
        coeffs,
        branch,
        lower,
        s_hi,
        s_lo,
    }
}

/// `C(s, x)` and `S(s, x)`, with hyperbolic values divided by `cosh(sqrt(s) span)`.
///
/// The damping factor is even in `sqrt(s)`, hence analytic in `s`.
fn pair(s: f64, x: f64, span: f64) -> (f64, f64) {
    if s > 0.0 {
        let a = s.sqrt();
        let (ax, al) = (a * x, a * span);
        if al < 20.0 {
            let damp = al.cosh();
            (ax.cosh() / damp, ax.sinh() / a / damp)
        } else {
            // cosh(ax) / cosh(al) = (e^(ax - al) + e^(-ax - al)) / (1 + e^(-2 al))
            let ep = (ax - al).exp();
            let em = (-ax - al).exp();
            let den = 1.0 + (-2.0 * al).exp();
            ((ep + em) / den, (ep - em) / (a * den))
        }
    } else if s < 0.0 {
        let w = (-s).sqrt();
        let (sin, cos) = (w * x).sin_cos();
        (cos, sin / w)
    } else {
        (1.0, x)
    }
}

/// `order`-th x-derivative of `C` (`sine = false`) or `S` (`sine = true`).
fn derivative(s: f64, c: f64, sn: f64, sine: bool, order: usize) -> f64 {
    let even = order.is_multiple_of(2);
    let (power, base) = match (sine, even) {
        (false, true) => (order / 2, c),
        (false, false) => (order / 2 + 1, sn),
        (true, true) => (order / 2, sn),
        (true, false) => (order / 2, c),
    };
    s.powi(power as i32) * base
}

/// Derivative in `s` of the `order`-th x-derivative of `C` or `S`.
fn derivative_ds(s: f64, x: f64, c: f64, sn: f64, sine: bool, order: usize) -> f64 {
    let c_s = 0.5 * x * sn;
    let sn_s = (x * c - sn) / (2.0 * s);
    let even = order.is_multiple_of(2);
    let (power, base, base_s) = match (sine, even) {
        (false, true) => (order / 2, c, c_s),
        (false, false) => (order / 2 + 1, sn, sn_s),
        (true, true) => (order / 2, sn, sn_s),
        (true, false) => (order / 2, c, c_s),
    };
    let m = power as i32;
    let lead = if m == 0 {
        0.0
    } else {
        m as f64 * s.powi(m - 1) * base
    };
    lead + s.powi(m) * base_s
}

impl ModeBasis {
    pub fn coeffs(&self) -> CharCoeffs {
        self.coeffs
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// The two roots `lambda^2`, upper first.
    pub fn lambda_squared(&self) -> (f64, f64) {
        (self.s_hi, self.s_lo)
    }

    /// Magnitudes `sqrt(|lambda^2|)` of both roots, upper first.
    pub fn wavenumbers(&self) -> (f64, f64) {
        (self.s_hi.abs().sqrt(), self.s_lo.abs().sqrt())
    }

    /// Value of the `order`-th derivative (0..=4) of basis function `col`
    /// at local coordinate `x` on a segment of length `span`.
    pub fn eval(&self, col: usize, order: usize, x: f64, span: f64) -> f64 {
        debug_assert!(col < 4 && order <= 4);
        let sine = col % 2 == 1;
        if col < 2 {
            let (c, sn) = pair(self.s_hi, x, span);
            return derivative(self.s_hi, c, sn, sine, order);
        }
        match self.lower {
            LowerPair::Plain => {
                let (c, sn) = pair(self.s_lo, x, span);
                derivative(self.s_lo, c, sn, sine, order) / (self.s_hi - self.s_lo)
            }
            LowerPair::DividedDifference => {
                let (ch, sh) = pair(self.s_hi, x, span);
                let (cl, sl) = pair(self.s_lo, x, span);
                (derivative(self.s_hi, ch, sh, sine, order)
                    - derivative(self.s_lo, cl, sl, sine, order))
                    / (self.s_hi - self.s_lo)
            }
            LowerPair::Derivative => {
                let (c, sn) = pair(self.s_lo, x, span);
                derivative_ds(self.s_lo, x, c, sn, sine, order)
            }
        }
    }

    /// ODE residual of basis function `col` at `x`, relative to its largest term.
    pub fn residual(&self, col: usize, x: f64, span: f64) -> f64 {
        let d0 = self.eval(col, 0, x, span);
        let d2 = self.eval(col, 2, x, span);
        let d4 = self.eval(col, 4, x, span);
        let terms = [d4, self.coeffs.p2 * d2, self.coeffs.p0 * d0];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        (terms[0] + terms[1] + terms[2]).abs() / scale
    }
}

/// Closed-form eigenvalue of the uncracked simply supported arch for mode
/// `X = sin(n pi phi / beta)`: `K_n = (l^2 - 1)^2 / (1 + eta l^2)`, `l = n pi / beta`.
#[allow(non_snake_case)]
pub fn uncracked_K_closed_form(n: u32, beta: f64, eta_nd: f64) -> f64 {
    let l2 = (n as f64 * std::f64::consts::PI / beta).powi(2);
    (l2 - 1.0).powi(2) / (1.0 + eta_nd * l2)
}

/// Square matrix with rows in a documented condition order, plus the row
/// max-abs factors used to normalize it before factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    order: usize,
    entries: Vec<f64>,
    row_scale: Vec<f64>,
}

impl BoundaryMatrix {
    /// Builds from row-major entries. Panics on a size mismatch or non-finite entries.
    pub fn new(order: usize, entries: Vec<f64>) -> Self {
        assert_eq!(
            entries.len(),
            order * order,
            "entries must be order x order"
        );
        assert!(
            entries.iter().all(|v| v.is_finite()),
            "boundary matrix has non-finite entries"
        );
        let row_scale = entries
            .chunks(order)
            .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect();
        Self {
            order,
            entries,
            row_scale,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn row_scale(&self) -> &[f64] {
        &self.row_scale
    }

    fn normalized(&self) -> Option<Vec<f64>> {
        if self.row_scale.contains(&0.0) {
            return None;
        }
        let n = self.order;
        let mut a = self.entries.clone();
        for (i, row) in a.chunks_mut(n).enumerate() {
            for v in row {
                *v /= self.row_scale[i];
            }
        }
        Some(a)
    }
}

/// `[X(0), X''(0), X(beta), X''(beta)]` applied to each basis function.
pub fn assemble_uncracked(basis: &ModeBasis, beta: f64) -> BoundaryMatrix {
    let mut e = Vec::with_capacity(16);
    for (x, order) in [(0.0, 0), (0.0, 2), (beta, 0), (beta, 2)] {
        for col in 0..4 {
            e.push(basis.eval(col, order, x, beta));
        }
    }
    BoundaryMatrix::new(4, e)
}

/// Two-segment system with a rotational-spring crack at `alpha`.
///
/// Unknowns are four coefficients on `[0, alpha]` followed by four on
/// `[alpha, beta]`, each segment in local coordinates. Rows, in order:
/// `X1(0)`, `X1''(0)`, `X2(beta)`, `X2''(beta)`, `X1(a) - X2(a)`,
/// `X1''(a) - X2''(a)`, `X1'''(a) - X2'''(a)`, `X2'(a) - X1'(a) - theta X1''(a)`.
pub fn assemble_cracked(
    basis: &ModeBasis,
    beta: f64,
    alpha: f64,
    theta_c: f64,
) -> Result<BoundaryMatrix> {
    let tol = SEGMENT_TOL * beta.max(1.0);
    if alpha <= tol || beta - alpha <= tol {
        return Err(Error::DegenerateSegment { alpha, beta });
    }
    let (l1, l2) = (alpha, beta - alpha);
    let left =
        |order: usize, x: f64| -> [f64; 4] { std::array::from_fn(|c| basis.eval(c, order, x, l1)) };
    let right =
        |order: usize, x: f64| -> [f64; 4] { std::array::from_fn(|c| basis.eval(c, order, x, l2)) };
    let zero = [0.0; 4];
    let neg = |v: [f64; 4]| v.map(|x| -x);

    let mut rows: Vec<([f64; 4], [f64; 4])> = vec![
        (left(0, 0.0), zero),
        (left(2, 0.0), zero),
        (zero, right(0, l2)),
        (zero, right(2, l2)),
        (left(0, l1), neg(right(0, 0.0))),
        (left(2, l1), neg(right(2, 0.0))),
        (left(3, l1), neg(right(3, 0.0))),
    ];
    let slope = left(1, l1);
    let curvature = left(2, l1);
    let jump: [f64; 4] = std::array::from_fn(|c| -slope[c] - theta_c * curvature[c]);
    rows.push((jump, right(1, 0.0)));

    let entries = rows
        .into_iter()
        .flat_map(|(a, b)| a.into_iter().chain(b))
        .collect();
    Ok(BoundaryMatrix::new(8, entries))
}

/// Determinant summary from an LU factorization of the row-normalized matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetSign {
    /// -1, 0 or +1; 0 when a pivot of the normalized matrix is negligible.
    pub sign: i8,
    /// `ln |det|` of the matrix as given.
    pub log_magnitude: f64,
    /// `ln |det|` of the row-normalized matrix.
    pub scaled_log_magnitude: f64,
    /// Smallest absolute pivot of the row-normalized matrix.
    pub min_pivot: f64,
}

struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
    swaps: usize,
}

fn lu_decompose(mut a: Vec<f64>, n: usize) -> Lu {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = a[k * n + k];
        if pivot == 0.0 {
            continue;
        }
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            a[i * n + k] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    Lu { n, a, perm, swaps }
}

impl Lu {
    fn pivot(&self, k: usize) -> f64 {
        self.a[k * self.n + k]
    }

    /// Solves `A y = b` given `P A = L U`; zero pivots are replaced by `floor`.
    fn solve(&self, b: &[f64], floor: f64) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.a[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.a[i * n + j] * y[j];
            }
            let mut p = self.pivot(i);
            if p.abs() < floor {
                p = if p < 0.0 { -floor } else { floor };
            }
            y[i] /= p;
        }
        y
    }
}

/// Sign and log-magnitude of the determinant via LU with partial pivoting on
/// the row-normalized matrix.
pub fn det_sign_logmag(matrix: &BoundaryMatrix) -> DetSign {
    let n = matrix.order;
    let Some(a) = matrix.normalized() else {
        return DetSign {
            sign: 0,
            log_magnitude: f64::NEG_INFINITY,
            scaled_log_magnitude: f64::NEG_INFINITY,
            min_pivot: 0.0,
        };
    };
    let lu = lu_decompose(a, n);
    let mut negative = lu.swaps % 2 == 1;
    let mut scaled = 0.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let p = lu.pivot(k);
        min_pivot = min_pivot.min(p.abs());
        negative ^= p < 0.0;
        scaled += p.abs().ln();
    }
    let scales: f64 = matrix.row_scale.iter().map(|s| s.ln()).sum();
    let sign = if min_pivot <= ZERO_PIVOT_TOL {
        0
    } else if negative {
        -1
    } else {
        1
    };
    DetSign {
        sign,
        log_magnitude: scaled + scales,
        scaled_log_magnitude: scaled,
        min_pivot,
    }
}

/// Approximate null vector of a (numerically) singular matrix, normalized to
/// unit max-abs with its largest entry positive.
///
/// Back-substitutes through the smallest pivot of the row-normalized LU, then
/// applies one inverse-iteration step.
pub fn null_vector(matrix: &BoundaryMatrix) -> Vec<f64> {
    let n = matrix.order;
    let Some(a) = matrix.normalized() else {
        // any vector is annihilated by a zero row; pick the least constrained column
        return (0..n).map(|j| if j == n - 1 { 1.0 } else { 0.0 }).collect();
    };
    let lu = lu_decompose(a, n);
    let k = (0..n)
        .min_by(|&i, &j| lu.pivot(i).abs().total_cmp(&lu.pivot(j).abs()))
        .unwrap_or(0);
    let mut x = vec![0.0; n];
    x[k] = 1.0;
    for i in (0..k).rev() {
        let s: f64 = (i + 1..=k).map(|j| lu.a[i * n + j] * x[j]).sum();
        let p = lu.pivot(i);
        x[i] = if p != 0.0 { -s / p } else { 0.0 };
    }
    let x = normalize(x);
    let y = lu.solve(&x, f64::MIN_POSITIVE.sqrt());
    if y.iter().all(|v| v.is_finite()) {
        normalize(y)
    } else {
        x
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let (idx, max) = v.iter().enumerate().fold((0, 0.0f64), |(bi, bm), (i, x)| {
        if x.abs() > bm {
            (i, x.abs())
        } else {
            (bi, bm)
        }
    });
    if max > 0.0 {
        let s = if v[idx] < 0.0 { -max } else { max };
        for x in &mut v {
            *x /= s;
        }
    }
    v
}
