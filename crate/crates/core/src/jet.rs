//! Truncated multivariate Taylor-polynomial (jet) arithmetic over complex
//! coefficients.
//!
//! A [`JetScalar`] holds every Taylor coefficient of a function at a chart
//! point up to a truncation degree. Arithmetic, elementary functions and
//! linear solves propagate the coefficients, so any quantity computed from
//! jets automatically carries its partial derivatives.
//!
//! The `order` of a jet is its *usable* order: each partial derivative
//! returns a jet of one order less, and asking for a coefficient beyond the
//! usable order is an [`JetError::OrderExhausted`] error rather than a
//! silently wrong zero. Mixed-order arithmetic truncates to the smaller
//! order, which is exactly the bookkeeping rule for derived quantities.
//!
//! Storage is dense, indexed by graded-lexicographic rank; with `dim <= 5`
//! and `order <= 8` a jet has at most 1287 coefficients.

use crate::scalar::{Real, C};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

pub const MAX_DIM: usize = 5;
pub const MAX_ORDER: usize = 8;

/// Relative pivot threshold for [`JetMatrix::solve`].
pub const PIVOT_RTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("jet order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("requested derivative of degree {degree} exceeds usable order {order}")]
    OrderExhausted { degree: usize, order: usize },
    #[error("constant-term matrix is numerically singular (pivot {pivot:.3e} < {threshold:.3e})")]
    SingularConstantTerm { pivot: f64, threshold: f64 },
    #[error("singular constant term in '{func}': |{value:.3e}| too small")]
    DomainError { func: &'static str, value: f64 },
    #[error("unsupported jet shape: dim {dim}, order {order}")]
    BadShape { dim: usize, order: usize },
}

pub type JetResult<V> = Result<V, JetError>;

/// Exponent tuple of one Taylor monomial. Unused trailing slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub [u8; MAX_DIM]);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex([0; MAX_DIM])
    }

    pub fn unit(i: usize) -> Self {
        let mut m = [0u8; MAX_DIM];
        m[i] = 1;
        MultiIndex(m)
    }

    pub fn from_slice(exps: &[usize]) -> Self {
        let mut m = [0u8; MAX_DIM];
        for (slot, &e) in m.iter_mut().zip(exps) {
            *slot = e as u8;
        }
        MultiIndex(m)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// alpha! = prod (alpha_i!)
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product()
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of multi-indices in `dim` variables with total degree <= order.
pub fn coeff_count(dim: usize, order: usize) -> usize {
    binom(dim + order, dim)
}

/// Number of multi-indices in `dim` variables with total degree == d.
fn degree_count(dim: usize, d: usize) -> usize {
    binom(dim + d - 1, dim - 1)
}

/// Cached index layout for one (dim, order) shape: the multi-index of each
/// rank plus degree block offsets, in graded-lexicographic order.
struct Layout {
    dim: usize,
    indices: Vec<MultiIndex>,
    /// offsets[d] = first rank of degree d; offsets[order+1] = total count.
    offsets: Vec<usize>,
}

impl Layout {
    fn build(dim: usize, order: usize) -> Arc<Layout> {
        let mut indices = Vec::with_capacity(coeff_count(dim, order));
        let mut offsets = Vec::with_capacity(order + 2);
        for d in 0..=order {
            offsets.push(indices.len());
            let mut cur = vec![0usize; dim];
            enumerate_degree(dim, d, 0, &mut cur, &mut indices);
        }
        offsets.push(indices.len());
        Arc::new(Layout {
            dim,
            indices,
            offsets,
        })
    }

    /// Rank of a multi-index within this layout (graded, then lexicographic
    /// with the first variable most significant, largest exponent first).
    fn rank(&self, m: &MultiIndex) -> usize {
        let d = m.degree();
        let mut r = self.offsets[d];
        let mut rem = d;
        let mut vars = self.dim;
        for i in 0..self.dim {
            let e = m.0[i] as usize;
            // indices with a larger exponent in slot i come first
            for v in (e + 1)..=rem {
                r += degree_count(vars - 1, rem - v);
            }
            rem -= e;
            vars -= 1;
        }
        r
    }
}

fn enumerate_degree(
    dim: usize,
    d: usize,
    pos: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if pos == dim - 1 {
        cur[pos] = d;
        out.push(MultiIndex::from_slice(cur));
        return;
    }
    for e in (0..=d).rev() {
        cur[pos] = e;
        enumerate_degree(dim, d - e, pos + 1, cur, out);
    }
}

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

fn layout(dim: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((dim, order))
        .or_insert_with(|| Layout::build(dim, order))
        .clone()
}

/// Truncated Taylor expansion of a complex-valued function at a chart point.
#[derive(Clone, PartialEq)]
pub struct JetScalar<T: Real> {
    dim: usize,
    order: usize,
    coeffs: Vec<C<T>>,
}

impl<T: Real> fmt::Debug for JetScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(dim={}, order={}, value={:?})",
            self.dim,
            self.order,
            self.value()
        )
    }
}

fn check_shape(dim: usize, order: usize) -> JetResult<()> {
    if dim == 0 || dim > MAX_DIM || order > MAX_ORDER {
        return Err(JetError::BadShape { dim, order });
    }
    Ok(())
}

impl<T: Real> JetScalar<T> {
    pub fn zero(dim: usize, order: usize) -> Self {
        check_shape(dim, order).expect("jet shape");
        JetScalar {
            dim,
            order,
            coeffs: vec![C::new(T::zero(), T::zero()); coeff_count(dim, order)],
        }
    }

    pub fn constant(value: C<T>, dim: usize, order: usize) -> Self {
        let mut j = Self::zero(dim, order);
        j.coeffs[0] = value;
        j
    }

    /// Jet of the coordinate function `x_index` at the point.
    pub fn variable(index: usize, value: C<T>, dim: usize, order: usize) -> JetResult<Self> {
        check_shape(dim, order)?;
        if index >= dim {
            return Err(JetError::IndexOutOfRange { index, dim });
        }
        let mut j = Self::zero(dim, order);
        j.coeffs[0] = value;
        if order >= 1 {
            let lay = layout(dim, order);
            let r = lay.rank(&MultiIndex::unit(index));
            j.coeffs[r] = C::new(T::one(), T::zero());
        }
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Value at the expansion point (zero multi-index coefficient).
    pub fn value(&self) -> C<T> {
        self.coeffs[0]
    }

    /// Raw Taylor coefficient of a multi-index (derivative / multi-factorial).
    pub fn coeff(&self, m: &MultiIndex) -> JetResult<C<T>> {
        let d = m.degree();
        if d > self.order {
            return Err(JetError::OrderExhausted {
                degree: d,
                order: self.order,
            });
        }
        let lay = layout(self.dim, self.order);
        Ok(self.coeffs[lay.rank(m)])
    }

    /// Partial derivative value `d^m f` at the point (coefficient times m!).
    pub fn extract(&self, m: &MultiIndex) -> JetResult<C<T>> {
        let c = self.coeff(m)?;
        Ok(c * cr::<T>(m.factorial()))
    }

    /// Largest coefficient magnitude; used for residual norms.
    pub fn norm_inf(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Discard coefficients above `new_order` (exact truncation).
    pub fn truncate(&self, new_order: usize) -> Self {
        if new_order >= self.order {
            return self.clone();
        }
        let n = coeff_count(self.dim, new_order);
        JetScalar {
            dim: self.dim,
            order: new_order,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Re-embed into a larger variable space: old variable `i` becomes
    /// variable `var_map[i]` of a `new_dim`-dimensional jet.
    pub fn promote(&self, new_dim: usize, var_map: &[usize]) -> JetResult<Self> {
        check_shape(new_dim, self.order)?;
        assert_eq!(var_map.len(), self.dim);
        let src = layout(self.dim, self.order);
        let dst = layout(new_dim, self.order);
        let mut out = JetScalar::zero(new_dim, self.order);
        for (r, &c) in self.coeffs.iter().enumerate() {
            let m = src.indices[r];
            let mut nm = MultiIndex::zero();
            for i in 0..self.dim {
                nm.0[var_map[i]] = m.0[i];
            }
            out.coeffs[dst.rank(&nm)] = c;
        }
        Ok(out)
    }

    /// Partial derivative with respect to variable `i`; usable order drops.
    pub fn partial(&self, i: usize) -> JetResult<Self> {
        if i >= self.dim {
            return Err(JetError::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        if self.order == 0 {
            return Err(JetError::OrderExhausted {
                degree: 1,
                order: 0,
            });
        }
        let src = layout(self.dim, self.order);
        let dst = layout(self.dim, self.order - 1);
        let mut out = JetScalar::zero(self.dim, self.order - 1);
        for (r, m) in dst.indices.iter().enumerate() {
            let mut up = *m;
            up.0[i] += 1;
            let k = T::of((up.0[i]) as f64);
            out.coeffs[r] = self.coeffs[src.rank(&up)] * C::new(k, T::zero());
        }
        Ok(out)
    }

    /// Coefficient-wise complex conjugate. Valid as the conjugate *function*
    /// because all chart variables are real.
    pub fn conj(&self) -> Self {
        JetScalar {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        JetScalar {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    fn binop(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let order = self.order.min(rhs.order);
        let n = coeff_count(self.dim, order);
        let coeffs = (0..n).map(|i| f(self.coeffs[i], rhs.coeffs[i])).collect();
        JetScalar {
            dim: self.dim,
            order,
            coeffs,
        }
    }

    /// Truncated Cauchy product. Mixed orders truncate to the smaller one.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let order = self.order.min(rhs.order);
        let lay = layout(self.dim, order);
        let n = lay.indices.len();
        let mut out = vec![C::new(T::zero(), T::zero()); n];
        let zero = T::zero();
        for i in 0..n {
            let a = self.coeffs[i];
            if a.re == zero && a.im == zero {
                continue;
            }
            let di = lay.indices[i].degree();
            let jmax = lay.offsets[order - di + 1];
            for j in 0..jmax {
                let b = rhs.coeffs[j];
                if b.re == zero && b.im == zero {
                    continue;
                }
                let mut m = lay.indices[i];
                for (slot, &e) in m.0.iter_mut().zip(lay.indices[j].0.iter()) {
                    *slot += e;
                }
                out[lay.rank(&m)] = out[lay.rank(&m)] + a * b;
            }
        }
        JetScalar {
            dim: self.dim,
            order,
            coeffs: out,
        }
    }

    /// Strict-contract product: dimensions and orders must match exactly.
    pub fn checked_mul(&self, rhs: &Self) -> JetResult<Self> {
        if self.dim != rhs.dim {
            return Err(JetError::DimMismatch(self.dim, rhs.dim));
        }
        if self.order != rhs.order {
            return Err(JetError::OrderMismatch(self.order, rhs.order));
        }
        Ok(self.mul(rhs))
    }

    /// Horner evaluation of a univariate series in (self - constant term).
    /// `series[k]` is the k-th Taylor coefficient of the outer function at
    /// the constant term of `self`.
    fn compose(&self, series: &[C<T>]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = C::new(T::zero(), T::zero());
        let mut acc = JetScalar::constant(series[self.order], self.dim, self.order);
        for k in (0..self.order).rev() {
            acc = acc.mul(&delta);
            acc.coeffs[0] = acc.coeffs[0] + series[k];
        }
        acc
    }

    fn domain_check(&self, func: &'static str, min_abs: f64) -> JetResult<C<T>> {
        let v = self.value();
        if v.norm() <= T::of(min_abs) {
            return Err(JetError::DomainError {
                func,
                value: v.norm().to_f64().unwrap_or(0.0),
            });
        }
        Ok(v)
    }

    pub fn exp(&self) -> Self {
        let e0 = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = T::one();
        for k in 0..=self.order {
            if k > 0 {
                fact = fact * T::of(k as f64);
            }
            series.push(e0 / C::new(fact, T::zero()));
        }
        self.compose(&series)
    }

    /// Principal-branch logarithm; the constant term must be nonzero.
    pub fn log(&self) -> JetResult<Self> {
        let v = self.domain_check("log", 1e-300)?;
        let mut series = Vec::with_capacity(self.order + 1);
        series.push(v.ln());
        // d^k/dx^k log = (-1)^{k-1} (k-1)! / x^k ; coefficient = that / k!
        let mut pw = v;
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(C::new(T::of(sign / k as f64), T::zero()) / pw);
            pw = pw * v;
        }
        Ok(self.compose(&series))
    }

    /// Principal-branch square root; the constant term must be nonzero.
    pub fn sqrt(&self) -> JetResult<Self> {
        self.domain_check("sqrt", 1e-300)?;
        self.powf(T::of(0.5))
    }

    /// Power by a real exponent (principal branch). Small integer exponents
    /// are evaluated by repeated multiplication and need no domain guard.
    pub fn powf(&self, r: T) -> JetResult<Self> {
        let rounded = r.round();
        if (r - rounded).abs() < T::of(1e-12) && rounded.abs() <= T::of(16.0) {
            let n = rounded.to_i32().unwrap();
            return self.powi(n);
        }
        let v = self.domain_check("powf", 1e-300)?;
        // series[k] = binom(r, k) * v^{r-k}
        let mut series = Vec::with_capacity(self.order + 1);
        let mut coef = T::one();
        for k in 0..=self.order {
            if k > 0 {
                coef = coef * (r - T::of((k - 1) as f64)) / T::of(k as f64);
            }
            let p = v.powf(r - T::of(k as f64));
            series.push(p * C::new(coef, T::zero()));
        }
        Ok(self.compose(&series))
    }

    pub fn powi(&self, n: i32) -> JetResult<Self> {
        if n == 0 {
            return Ok(JetScalar::constant(
                C::new(T::one(), T::zero()),
                self.dim,
                self.order,
            ));
        }
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut base = self.clone();
        let mut acc: Option<JetScalar<T>> = None;
        let mut n = n as u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.unwrap())
    }

    pub fn recip(&self) -> JetResult<Self> {
        let v = self.domain_check("recip", 1e-300)?;
        let mut series = Vec::with_capacity(self.order + 1);
        let mut pw = v;
        for k in 0..=self.order {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            series.push(C::new(T::of(sign), T::zero()) / pw);
            pw = pw * v;
        }
        Ok(self.compose(&series))
    }

    pub fn sin(&self) -> Self {
        let (s0, c0) = (self.value().sin(), self.value().cos());
        let cycle = [s0, c0, -s0, -c0];
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = T::one();
        for k in 0..=self.order {
            if k > 0 {
                fact = fact * T::of(k as f64);
            }
            series.push(cycle[k % 4] / C::new(fact, T::zero()));
        }
        self.compose(&series)
    }

    pub fn cos(&self) -> Self {
        let (s0, c0) = (self.value().sin(), self.value().cos());
        let cycle = [c0, -s0, -c0, s0];
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = T::one();
        for k in 0..=self.order {
            if k > 0 {
                fact = fact * T::of(k as f64);
            }
            series.push(cycle[k % 4] / C::new(fact, T::zero()));
        }
        self.compose(&series)
    }

    pub fn div(&self, rhs: &Self) -> JetResult<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// |self| for a jet known to be real-valued with nonvanishing constant
    /// term: multiplies by the sign of the constant term (exact).
    pub fn abs_real(&self) -> Self {
        if self.value().re < T::zero() {
            self.scale(cr(-1.0))
        } else {
            self.clone()
        }
    }

    /// Principal argument as a real jet: Im(log self).
    pub fn arg(&self) -> JetResult<Self> {
        let l = self.log()?;
        Ok(l.imag_part())
    }

    pub fn real_part(&self) -> Self {
        // Re f = (f + conj f)/2, coefficient-wise.
        JetScalar {
            dim: self.dim,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| C::new(c.re, T::zero()))
                .collect(),
        }
    }

    pub fn imag_part(&self) -> Self {
        JetScalar {
            dim: self.dim,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| C::new(c.im, T::zero()))
                .collect(),
        }
    }

    /// Modulus of a complex jet with nonvanishing constant term:
    /// sqrt(self * conj(self)); the result is a real jet.
    pub fn modulus(&self) -> JetResult<Self> {
        self.mul(&self.conj()).sqrt()
    }
}

impl<T: Real> std::ops::Add for &JetScalar<T> {
    type Output = JetScalar<T>;
    fn add(self, rhs: Self) -> JetScalar<T> {
        self.binop(rhs, |a, b| a + b)
    }
}

impl<T: Real> std::ops::Sub for &JetScalar<T> {
    type Output = JetScalar<T>;
    fn sub(self, rhs: Self) -> JetScalar<T> {
        self.binop(rhs, |a, b| a - b)
    }
}

impl<T: Real> std::ops::Mul for &JetScalar<T> {
    type Output = JetScalar<T>;
    fn mul(self, rhs: Self) -> JetScalar<T> {
        JetScalar::mul(self, rhs)
    }
}

impl<T: Real> std::ops::Neg for &JetScalar<T> {
    type Output = JetScalar<T>;
    fn neg(self) -> JetScalar<T> {
        self.scale(cr(-1.0))
    }
}

use crate::scalar::cr;

/// Dense matrix of jets sharing one dimension and order.
#[derive(Clone, Debug)]
pub struct JetMatrix<T: Real> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<JetScalar<T>>,
}

impl<T: Real> JetMatrix<T> {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> JetScalar<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        let m = JetMatrix { rows, cols, data };
        m.check_consistent();
        m
    }

    pub fn identity(n: usize, dim: usize, order: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                JetScalar::constant(C::new(T::one(), T::zero()), dim, order)
            } else {
                JetScalar::zero(dim, order)
            }
        })
    }

    fn check_consistent(&self) {
        let d = self.data[0].dim();
        assert!(
            self.data.iter().all(|j| j.dim() == d),
            "jet matrix entries must share dim"
        );
    }

    pub fn at(&self, r: usize, c: usize) -> &JetScalar<T> {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut JetScalar<T> {
        &mut self.data[r * self.cols + c]
    }

    pub fn min_order(&self) -> usize {
        self.data.iter().map(|j| j.order()).min().unwrap()
    }

    pub fn mul_mat(&self, rhs: &JetMatrix<T>) -> JetMatrix<T> {
        assert_eq!(self.cols, rhs.rows);
        JetMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = self.at(r, 0).mul(rhs.at(0, c));
            for k in 1..self.cols {
                acc = &acc + &self.at(r, k).mul(rhs.at(k, c));
            }
            acc
        })
    }

    /// Solve A x = b over the jet ring by Gaussian elimination with partial
    /// pivoting on constant-term magnitude.
    pub fn solve(&self, b: &JetMatrix<T>) -> JetResult<JetMatrix<T>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let order = self.min_order().min(b.min_order());
        let mut a: Vec<JetScalar<T>> = self.data.iter().map(|j| j.truncate(order)).collect();
        let mut x: Vec<JetScalar<T>> = b.data.iter().map(|j| j.truncate(order)).collect();
        let bc = b.cols;

        for col in 0..n {
            let (mut pivot_row, mut pivot_mag) = (col, a[col * n + col].value().norm());
            for r in (col + 1)..n {
                let mag = a[r * n + col].value().norm();
                if mag > pivot_mag {
                    pivot_row = r;
                    pivot_mag = mag;
                }
            }
            // row-scale threshold keeps degenerate coframes detectable
            let row_max = (0..n)
                .map(|c| a[pivot_row * n + c].value().norm())
                .fold(T::zero(), |m, v| if v > m { v } else { m });
            let threshold = T::of(PIVOT_RTOL) * (row_max + T::one());
            if pivot_mag <= threshold {
                return Err(JetError::SingularConstantTerm {
                    pivot: pivot_mag.to_f64().unwrap_or(0.0),
                    threshold: threshold.to_f64().unwrap_or(0.0),
                });
            }
            if pivot_row != col {
                for c in 0..n {
                    a.swap(col * n + c, pivot_row * n + c);
                }
                for c in 0..bc {
                    x.swap(col * bc + c, pivot_row * bc + c);
                }
            }
            let inv = a[col * n + col].recip()?;
            for c in 0..n {
                a[col * n + c] = a[col * n + c].mul(&inv);
            }
            for c in 0..bc {
                x[col * bc + c] = x[col * bc + c].mul(&inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col].clone();
                if factor.norm_inf() == T::zero() {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] = &a[r * n + c] - &factor.mul(&a[col * n + c]);
                }
                for c in 0..bc {
                    x[r * bc + c] = &x[r * bc + c] - &factor.mul(&x[col * bc + c]);
                }
            }
        }
        Ok(JetMatrix {
            rows: n,
            cols: bc,
            data: x,
        })
    }

    pub fn inverse(&self) -> JetResult<JetMatrix<T>> {
        let order = self.min_order();
        self.solve(&JetMatrix::identity(self.rows, self.data[0].dim(), order))
    }

    /// inf-norm of (A x - b) over all coefficients of all entries.
    pub fn residual_norm(&self, x: &JetMatrix<T>, b: &JetMatrix<T>) -> T {
        let r = self.mul_mat(x);
        let mut worst = T::zero();
        for i in 0..r.data.len() {
            let d = &r.data[i] - &b.data[i].truncate(r.data[i].order());
            let v = d.norm_inf();
            if v > worst {
                worst = v;
            }
        }
        worst
    }
}
