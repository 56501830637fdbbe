//! Newman-Penrose layer: the null tetrad carried by the coframe, the five
//! Weyl spinors, and the invariant-based Petrov classification.

use super::curvature::CurvatureBundle;
use super::metric::MetricJets;
use crate::forms::{FormsError, FormsResult};
use crate::scalar::{Real, C};

const N: usize = 4;

/// Constant dual frame: row i holds the components of the vector dual to
/// coframe form theta^i at the point.
pub fn dual_frame_consts<T: Real>(mj: &MetricJets<T>) -> FormsResult<[[C<T>; 4]; 4]> {
    // solve theta M = I for M columns: M = theta^{-1}
    let mut a = [[C::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..N {
        for mu in 0..N {
            a[i][mu] = mj.theta[i].comps[mu].value();
        }
    }
    let inv = invert4(a)
        .ok_or_else(|| FormsError::Invalid("coframe constant matrix is singular".into()))?;
    // dual vector i has components inv[mu][i]
    let mut out = [[C::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..N {
        for mu in 0..N {
            out[i][mu] = inv[mu][i];
        }
    }
    Ok(out)
}

fn invert4<T: Real>(a: [[C<T>; 4]; 4]) -> Option<[[C<T>; 4]; 4]> {
    let mut m = a;
    let mut inv = [[C::new(T::zero(), T::zero()); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = C::new(T::one(), T::zero());
    }
    for col in 0..N {
        let mut piv = col;
        for r in (col + 1)..N {
            if m[r][col].norm() > m[piv][col].norm() {
                piv = r;
            }
        }
        if m[piv][col].norm() < T::of(1e-13) {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for c in 0..N {
            m[col][c] = m[col][c] / d;
            inv[col][c] = inv[col][c] / d;
        }
        for r in 0..N {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f.norm() == T::zero() {
                continue;
            }
            for c in 0..N {
                m[r][c] = m[r][c] - f * m[col][c];
                inv[r][c] = inv[r][c] - f * inv[col][c];
            }
        }
    }
    Some(inv)
}

/// The five Weyl spinors in the tetrad carried by the coframe:
/// m = dual(theta^1), mbar = dual(theta^2), n = -dual(theta^3),
/// l = dual(theta^4), so that g(l,n) = -1 and g(m,mbar) = +1 (the standard
/// normalization; the coframe pairing itself has +1 on the 3-4 slot). The
/// conventions are pinned by the plane-wave Psi_4 = 2(i alpha - c - 1),
/// the circle-bundle Psi_2 = (1-4t) K1/6, and the type-D degeneracy
/// 2 Psi_3^2 = 3 Psi_2 Psi_4 on the Kerr family.
#[derive(Debug, Clone)]
pub struct WeylSpinors<T: Real> {
    pub psi: [C<T>; 5],
}

impl<T: Real> WeylSpinors<T> {
    pub fn max_abs(&self) -> T {
        self.psi
            .iter()
            .map(|p| p.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Contract the Weyl tensor with tetrad vectors: C(x, y, z, w).
fn weyl_contract<T: Real>(
    cb: &CurvatureBundle<T>,
    x: &[C<T>; 4],
    y: &[C<T>; 4],
    z: &[C<T>; 4],
    w: &[C<T>; 4],
) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for a in 0..N {
        for b in 0..N {
            if x[a].norm() == T::zero() || y[b].norm() == T::zero() {
                continue;
            }
            for c in 0..N {
                for d in 0..N {
                    let v = cb.weyl.at(a, b, c, d).value();
                    if v.norm() == T::zero() {
                        continue;
                    }
                    acc = acc + v * x[a] * y[b] * z[c] * w[d];
                }
            }
        }
    }
    acc
}

/// Weyl spinors with an optional boost A on the (l, n) pair: l -> A l,
/// n -> n / A. `boost = 1` gives the canonical tetrad.
pub fn weyl_spinors_boosted<T: Real>(
    cb: &CurvatureBundle<T>,
    boost: T,
) -> FormsResult<WeylSpinors<T>> {
    let frame = dual_frame_consts(&cb.mj)?;
    let m = frame[0];
    let mbar = frame[1];
    let mut n = frame[2];
    let mut l = frame[3];
    for mu in 0..N {
        n[mu] = -n[mu];
        l[mu] = l[mu] * C::new(boost, T::zero());
        n[mu] = n[mu] / C::new(boost, T::zero());
    }
    let psi0 = weyl_contract(cb, &l, &m, &l, &m);
    let psi1 = weyl_contract(cb, &l, &n, &l, &m);
    let psi2 = weyl_contract(cb, &l, &m, &mbar, &n);
    let psi3 = weyl_contract(cb, &l, &n, &mbar, &n);
    let psi4 = weyl_contract(cb, &n, &mbar, &n, &mbar);
    Ok(WeylSpinors {
        psi: [psi0, psi1, psi2, psi3, psi4],
    })
}

pub fn weyl_spinors<T: Real>(cb: &CurvatureBundle<T>) -> FormsResult<WeylSpinors<T>> {
    weyl_spinors_boosted(cb, T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PetrovType {
    I,
    II,
    D,
    III,
    N,
    O,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PetrovReport {
    pub petrov: PetrovType,
    pub i_invariant: [f64; 2],
    pub j_invariant: [f64; 2],
    pub d_invariant: [f64; 2],
    pub tol: f64,
    pub ambiguous: bool,
}

/// Invariant-based Petrov classification with a tolerance ladder. The
/// quartic coefficients are Moebius-shifted when the leading one
/// degenerates, which preserves the root-multiplicity pattern.
pub fn petrov<T: Real>(ws: &WeylSpinors<T>, tol: f64) -> PetrovReport {
    let scale = ws.max_abs().to_f64().unwrap_or(0.0);
    let to64 = |c: C<T>| {
        num_complex::Complex64::new(c.re.to_f64().unwrap_or(0.0), c.im.to_f64().unwrap_or(0.0))
    };
    let mut p: [num_complex::Complex64; 5] = [
        to64(ws.psi[0]),
        to64(ws.psi[1]),
        to64(ws.psi[2]),
        to64(ws.psi[3]),
        to64(ws.psi[4]),
    ];
    if scale < 1e-13 {
        return PetrovReport {
            petrov: PetrovType::O,
            i_invariant: [0.0; 2],
            j_invariant: [0.0; 2],
            d_invariant: [0.0; 2],
            tol,
            ambiguous: false,
        };
    }
    for q in p.iter_mut() {
        *q /= scale;
    }

    // make the quartic leading coefficient (Psi4 slot) order one: first by
    // the inversion zeta -> 1/zeta (coefficient reversal), then by shifts
    // zeta -> zeta + b; both preserve the root-multiplicity pattern
    normalize_leading(&mut p);

    let i_inv = p[0] * p[4] - 4.0 * p[1] * p[3] + 3.0 * p[2] * p[2];
    let j_inv = p[0] * (p[2] * p[4] - p[3] * p[3]) - p[1] * (p[1] * p[4] - p[2] * p[3])
        + p[2] * (p[1] * p[3] - p[2] * p[2]);
    let d_inv = i_inv.powu(3) - 27.0 * j_inv * j_inv;
    let k_inv = p[1] * p[4] * p[4] - 3.0 * p[4] * p[3] * p[2] + 2.0 * p[3].powu(3);
    let l_inv = p[2] * p[4] - p[3] * p[3];
    let n_inv = 12.0 * l_inv * l_inv - p[4] * p[4] * i_inv;

    let z = |v: f64| v < tol;
    let ambiguous = |v: f64| v >= tol && v < tol * 100.0;
    let mut amb = false;
    let petrov = if z(d_inv.norm()) {
        amb |= ambiguous(d_inv.norm());
        if z(i_inv.norm()) && z(j_inv.norm()) {
            if z(k_inv.norm()) && z(l_inv.norm()) {
                PetrovType::N
            } else {
                PetrovType::III
            }
        } else if z(k_inv.norm()) && z(n_inv.norm()) {
            PetrovType::D
        } else {
            PetrovType::II
        }
    } else {
        PetrovType::I
    };
    PetrovReport {
        petrov,
        i_invariant: [i_inv.re, i_inv.im],
        j_invariant: [j_inv.re, j_inv.im],
        d_invariant: [d_inv.re, d_inv.im],
        tol,
        ambiguous: amb,
    }
}

fn normalize_leading(p: &mut [num_complex::Complex64; 5]) {
    let renorm = |p: &mut [num_complex::Complex64; 5]| {
        let mx = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if mx > 0.0 {
            for q in p.iter_mut() {
                *q /= mx;
            }
        }
    };
    if p[4].norm() < 0.1 {
        p.reverse();
        renorm(p);
    }
    let mut tries = 0;
    while p[4].norm() < 0.1 && tries < 8 {
        *p = shift_quartic(
            p,
            num_complex::Complex64::new(0.7 + 0.3 * tries as f64, 0.2),
        );
        renorm(p);
        if p[4].norm() < 0.1 {
            p.reverse();
            renorm(p);
        }
        tries += 1;
    }
}

/// Coefficients of W(zeta + b) from those of W(zeta) for the Weyl quartic
/// W = p0 + 4 p1 z + 6 p2 z^2 + 4 p3 z^3 + p4 z^4.
fn shift_quartic(
    p: &[num_complex::Complex64; 5],
    b: num_complex::Complex64,
) -> [num_complex::Complex64; 5] {
    let w = [p[0], 4.0 * p[1], 6.0 * p[2], 4.0 * p[3], p[4]];
    // polynomial coefficients of W(z + b)
    let mut out = [num_complex::Complex64::new(0.0, 0.0); 5];
    let binom = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0],
        [1.0, 3.0, 3.0, 1.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0],
    ];
    for k in 0..5 {
        // coefficient of z^j in (z + b)^k
        let mut bpow = num_complex::Complex64::new(1.0, 0.0);
        for j in (0..=k).rev() {
            out[j] += w[k] * binom[k][j] * bpow;
            bpow *= b;
        }
    }
    [out[0], out[1] / 4.0, out[2] / 6.0, out[3] / 4.0, out[4]]
}

/// Brute-force Petrov type from root multiplicities of the Weyl quartic;
/// test-only oracle, independent of the invariant ladder.
pub fn petrov_by_roots(psi: &[num_complex::Complex64; 5], tol: f64) -> PetrovType {
    let scale = psi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale < 1e-13 {
        return PetrovType::O;
    }
    let mut p = *psi;
    for q in p.iter_mut() {
        *q /= scale;
    }
    normalize_leading(&mut p);
    // Durand-Kerner on the monic quartic
    let c = [
        p[0] / p[4],
        4.0 * p[1] / p[4],
        6.0 * p[2] / p[4],
        4.0 * p[3] / p[4],
    ];
    let eval = |z: num_complex::Complex64| {
        ((z + c[3]) * z + c[2]) * z * z + c[1] * z + c[0] + (z.powu(4) - z.powu(4))
    };
    let poly = |z: num_complex::Complex64| {
        z.powu(4) + c[3] * z.powu(3) + c[2] * z.powu(2) + c[1] * z + c[0]
    };
    let _ = eval;
    let mut roots = [
        num_complex::Complex64::new(0.4, 0.9),
        num_complex::Complex64::new(-0.9, 0.4),
        num_complex::Complex64::new(-0.4, -0.9),
        num_complex::Complex64::new(0.9, -0.4),
    ];
    for _ in 0..200 {
        let mut next = roots;
        for i in 0..4 {
            let mut den = num_complex::Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            next[i] = roots[i] - poly(roots[i]) / den;
        }
        roots = next;
    }
    // cluster roots by tolerance
    let mut mults = vec![1usize; 4];
    let mut used = [false; 4];
    let mut pattern = Vec::new();
    let cluster_tol = tol.max(1e-5);
    for i in 0..4 {
        if used[i] {
            continue;
        }
        let mut m = 1;
        used[i] = true;
        for j in (i + 1)..4 {
            if !used[j] && (roots[i] - roots[j]).norm() < cluster_tol {
                used[j] = true;
                m += 1;
            }
        }
        pattern.push(m);
    }
    let _ = &mut mults;
    pattern.sort_unstable_by(|a, b| b.cmp(a));
    match pattern.as_slice() {
        [1, 1, 1, 1] => PetrovType::I,
        [2, 1, 1] => PetrovType::II,
        [2, 2] => PetrovType::D,
        [3, 1] => PetrovType::III,
        [4] => PetrovType::N,
        _ => PetrovType::I,
    }
}
