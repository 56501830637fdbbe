//! Levi-Civita curvature pipeline: Christoffels, Riemann, Ricci, Weyl,
//! and the Cotton/Bach tensors, all computed pointwise from metric jets.
//!
//! Conventions (validated by the test pins): the Riemann sign is
//! R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce}
//! Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}; Ricci_{bd} = R^a_{bad};
//! signature (+,+,+,-); and the Bach tensor is
//! B_{ab} = grad^c grad^d C_{acbd} + (1/2) R^{cd} C_{acbd}.

use super::metric::{Metric4, MetricJets};
use crate::forms::{FormsError, FormsResult};
use crate::jet::JetScalar;
use crate::scalar::{cr, Real, C};

const N: usize = 4;

/// Rank-3 array of jets indexed (a,b,c).
pub struct T3<T: Real>(Vec<JetScalar<T>>);

impl<T: Real> T3<T> {
    pub fn at(&self, a: usize, b: usize, c: usize) -> &JetScalar<T> {
        &self.0[(a * N + b) * N + c]
    }
}

/// Rank-4 array of jets indexed (a,b,c,d).
pub struct T4<T: Real>(Vec<JetScalar<T>>);

impl<T: Real> T4<T> {
    pub fn at(&self, a: usize, b: usize, c: usize, d: usize) -> &JetScalar<T> {
        &self.0[((a * N + b) * N + c) * N + d]
    }
}

fn build3<T: Real>(mut f: impl FnMut(usize, usize, usize) -> JetScalar<T>) -> T3<T> {
    let mut v = Vec::with_capacity(N * N * N);
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                v.push(f(a, b, c));
            }
        }
    }
    T3(v)
}

fn build4<T: Real>(mut f: impl FnMut(usize, usize, usize, usize) -> JetScalar<T>) -> T4<T> {
    let mut v = Vec::with_capacity(N * N * N * N);
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    v.push(f(a, b, c, d));
                }
            }
        }
    }
    T4(v)
}

/// All curvature data at one point, jet-valued so that callers can take
/// further covariant derivatives.
pub struct CurvatureBundle<T: Real> {
    pub mj: MetricJets<T>,
    /// Gamma^a_{bc}
    pub christoffel: T3<T>,
    /// R_{abcd}, all indices down
    pub riemann: T4<T>,
    pub ricci: Vec<JetScalar<T>>,
    pub ricci_scalar: JetScalar<T>,
    /// C_{abcd}, all indices down
    pub weyl: T4<T>,
}

impl<T: Real> CurvatureBundle<T> {
    pub fn ricci_at(&self, a: usize, b: usize) -> &JetScalar<T> {
        &self.ricci[a * N + b]
    }

    /// max |Ricci_{ab}| at the point, normalized by the metric scale.
    pub fn ricci_norm(&self) -> T {
        let scale = self.metric_scale();
        let mut worst = T::zero();
        for a in 0..N {
            for b in 0..N {
                let v = self.ricci_at(a, b).value().norm();
                if v > worst {
                    worst = v;
                }
            }
        }
        worst / scale
    }

    pub fn metric_scale(&self) -> T {
        let mut s = T::zero();
        for a in 0..N {
            for b in 0..N {
                let v = self.mj.g.at(a, b).value().norm();
                if v > s {
                    s = v;
                }
            }
        }
        s.max(T::of(1e-30))
    }

    /// Residuals of the Riemann symmetries and the Weyl trace, relative to
    /// the largest curvature component.
    pub fn symmetry_residuals(&self) -> (T, T) {
        let mut scale = T::of(1e-30);
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    for d in 0..N {
                        scale = scale.max(self.riemann.at(a, b, c, d).value().norm());
                    }
                }
            }
        }
        let mut worst = T::zero();
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    for d in 0..N {
                        let r = self.riemann.at(a, b, c, d).value();
                        // antisymmetry both pairs, pair exchange
                        worst = worst.max((r + self.riemann.at(b, a, c, d).value()).norm());
                        worst = worst.max((r + self.riemann.at(a, b, d, c).value()).norm());
                        worst = worst.max((r - self.riemann.at(c, d, a, b).value()).norm());
                        // first Bianchi
                        let bianchi = r
                            + self.riemann.at(a, c, d, b).value()
                            + self.riemann.at(a, d, b, c).value();
                        worst = worst.max(bianchi.norm());
                    }
                }
            }
        }
        // Weyl trace: g^{ac} C_{abcd} = 0
        let mut trace_worst = T::zero();
        for b in 0..N {
            for d in 0..N {
                let mut acc = C::new(T::zero(), T::zero());
                for a in 0..N {
                    for c in 0..N {
                        acc =
                            acc + self.mj.ginv.at(a, c).value() * self.weyl.at(a, b, c, d).value();
                    }
                }
                trace_worst = trace_worst.max(acc.norm());
            }
        }
        (worst / scale, trace_worst / scale)
    }
}

/// The Levi-Civita curvature of a metric at a point, to jet order `order`
/// in the metric components (Riemann then carries order - 2).
pub fn curvature<T: Real>(
    metric: &Metric4<T>,
    point: &[T],
    order: usize,
) -> FormsResult<CurvatureBundle<T>> {
    if order < 2 {
        return Err(FormsError::Invalid(
            "curvature needs metric jets of order >= 2".into(),
        ));
    }
    let mj = metric.eval(point, order)?;
    curvature_of(mj)
}

pub fn curvature_of<T: Real>(mj: MetricJets<T>) -> FormsResult<CurvatureBundle<T>> {
    // dg[c][a][b] = d_c g_{ab}
    let mut dg: Vec<JetScalar<T>> = Vec::with_capacity(N * N * N);
    for c in 0..N {
        for a in 0..N {
            for b in 0..N {
                dg.push(mj.g.at(a, b).partial(c)?);
            }
        }
    }
    let dg_at = |c: usize, a: usize, b: usize| &dg[(c * N + a) * N + b];

    let half = cr::<T>(0.5);
    let christoffel = build3(|a, b, c| {
        // Gamma^a_{bc} = (1/2) g^{ad} (d_b g_{dc} + d_c g_{bd} - d_d g_{bc})
        let mut acc: Option<JetScalar<T>> = None;
        for d in 0..N {
            let sum = &(dg_at(b, d, c) + dg_at(c, b, d)) - dg_at(d, b, c);
            let term = mj.ginv.at(a, d).mul(&sum);
            acc = Some(match acc {
                None => term,
                Some(s) => &s + &term,
            });
        }
        acc.unwrap().scale(half)
    });

    // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    //             + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    let riemann_up = build4(|a, b, c, d| {
        let mut acc = &christoffel.at(a, d, b).partial(c).unwrap()
            - &christoffel.at(a, c, b).partial(d).unwrap();
        for e in 0..N {
            acc = &acc + &christoffel.at(a, c, e).mul(christoffel.at(e, d, b));
            acc = &acc - &christoffel.at(a, d, e).mul(christoffel.at(e, c, b));
        }
        acc
    });

    let riemann = build4(|a, b, c, d| {
        let mut acc: Option<JetScalar<T>> = None;
        for e in 0..N {
            let term = mj.g.at(a, e).mul(riemann_up.at(e, b, c, d));
            acc = Some(match acc {
                None => term,
                Some(s) => &s + &term,
            });
        }
        acc.unwrap()
    });

    // Ricci_{bd} = R^a_{bad}
    let mut ricci = Vec::with_capacity(N * N);
    for b in 0..N {
        for d in 0..N {
            let mut acc: Option<JetScalar<T>> = None;
            for a in 0..N {
                let term = riemann_up.at(a, b, a, d).clone();
                acc = Some(match acc {
                    None => term,
                    Some(s) => &s + &term,
                });
            }
            ricci.push(acc.unwrap());
        }
    }
    let mut ricci_scalar: Option<JetScalar<T>> = None;
    for b in 0..N {
        for d in 0..N {
            let term = mj.ginv.at(b, d).mul(&ricci[b * N + d]);
            ricci_scalar = Some(match ricci_scalar {
                None => term,
                Some(s) => &s + &term,
            });
        }
    }
    let ricci_scalar = ricci_scalar.unwrap();

    // Weyl in four dimensions
    let weyl = build4(|a, b, c, d| {
        let mut acc = riemann.at(a, b, c, d).clone();
        let gac_rbd = mj.g.at(a, c).mul(&ricci[b * N + d]);
        let gad_rbc = mj.g.at(a, d).mul(&ricci[b * N + c]);
        let gbd_rac = mj.g.at(b, d).mul(&ricci[a * N + c]);
        let gbc_rad = mj.g.at(b, c).mul(&ricci[a * N + d]);
        acc = &acc - &(&(&gac_rbd - &gad_rbc) + &(&gbd_rac - &gbc_rad)).scale(half);
        let gg = &mj.g.at(a, c).mul(mj.g.at(b, d)) - &mj.g.at(a, d).mul(mj.g.at(b, c));
        acc = &acc + &gg.mul(&ricci_scalar).scale(cr(1.0 / 6.0));
        acc
    });

    Ok(CurvatureBundle {
        mj,
        christoffel,
        riemann,
        ricci,
        ricci_scalar,
        weyl,
    })
}

/// The Bach tensor at a point (real symmetric matrix of constants), with
/// the Cotton tensor of the Schouten 2-form as the intermediate; needs
/// metric jets supporting four derivatives.
pub struct BachResult<T: Real> {
    pub bach: [[T; 4]; 4],
    /// Cotton tensor C_{abc} = grad_a P_{bc} - grad_b P_{ac} (constants).
    pub cotton: Vec<C<T>>,
    /// max |Im| over the computed Bach components (sanity).
    pub imag_residual: T,
}

pub fn bach<T: Real>(metric: &Metric4<T>, point: &[T], order: usize) -> FormsResult<BachResult<T>> {
    if order < 4 {
        return Err(FormsError::Invalid(
            "the Bach tensor needs metric jets of order >= 4".into(),
        ));
    }
    let cb = curvature(metric, point, order)?;
    bach_of(&cb)
}

pub fn bach_of<T: Real>(cb: &CurvatureBundle<T>) -> FormsResult<BachResult<T>> {
    let gamma = &cb.christoffel;
    // Schouten P_{ab} = (1/2)(R_{ab} - (R/6) g_{ab})
    let schouten: Vec<JetScalar<T>> = (0..N * N)
        .map(|i| {
            let (a, b) = (i / N, i % N);
            (&cb.ricci[i] - &cb.mj.g.at(a, b).mul(&cb.ricci_scalar).scale(cr(1.0 / 6.0)))
                .scale(cr(0.5))
        })
        .collect();
    // Cotton C_{abc} = grad_a P_{bc} - grad_b P_{ac}
    let grad_p = build3(|e, b, c| {
        let mut acc = schouten[b * N + c].partial(e).unwrap();
        for f in 0..N {
            acc = &acc - &gamma.at(f, e, b).mul(&schouten[f * N + c]);
            acc = &acc - &gamma.at(f, e, c).mul(&schouten[b * N + f]);
        }
        acc
    });
    let mut cotton = Vec::with_capacity(N * N * N);
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                cotton.push((grad_p.at(a, b, c) - grad_p.at(b, a, c)).value());
            }
        }
    }

    // grad_e C_{acbd}
    let dc = build_nabla_weyl(cb)?;
    // grad_g (grad C)_{e,acbd}, contracted on the fly:
    // B_ab = g^{gc} g^{ed} grad_g grad_e C_{acbd} + (1/2) R^{cd} C_{acbd}
    let mut bach = [[T::zero(); 4]; 4];
    let mut imag = T::zero();
    // R^{cd}
    let mut ricci_up = [C::new(T::zero(), T::zero()); N * N];
    for c in 0..N {
        for d in 0..N {
            let mut acc = C::new(T::zero(), T::zero());
            for e in 0..N {
                for f in 0..N {
                    acc = acc
                        + cb.mj.ginv.at(c, e).value()
                            * cb.mj.ginv.at(d, f).value()
                            * cb.ricci[e * N + f].value();
                }
            }
            ricci_up[c * N + d] = acc;
        }
    }

    for a in 0..N {
        for b in 0..N {
            let mut total = C::new(T::zero(), T::zero());
            for g in 0..N {
                for e in 0..N {
                    // (grad grad C)_{g e a c b d} contracted with g^{gc} g^{ed}
                    for c_ix in 0..N {
                        for d_ix in 0..N {
                            let w_gc = cb.mj.ginv.at(g, c_ix).value();
                            let w_ed = cb.mj.ginv.at(e, d_ix).value();
                            if w_gc.norm() == T::zero() || w_ed.norm() == T::zero() {
                                continue;
                            }
                            let mut v = dc.at5(e, a, c_ix, b, d_ix).partial(g).unwrap().value();
                            for f in 0..N {
                                v = v - gamma.at(f, g, e).value()
                                    * dc.at5(f, a, c_ix, b, d_ix).value();
                                v = v - gamma.at(f, g, a).value()
                                    * dc.at5(e, f, c_ix, b, d_ix).value();
                                v = v - gamma.at(f, g, c_ix).value()
                                    * dc.at5(e, a, f, b, d_ix).value();
                                v = v - gamma.at(f, g, b).value()
                                    * dc.at5(e, a, c_ix, f, d_ix).value();
                                v = v - gamma.at(f, g, d_ix).value()
                                    * dc.at5(e, a, c_ix, b, f).value();
                            }
                            total = total + w_gc * w_ed * v;
                        }
                    }
                }
            }
            for c_ix in 0..N {
                for d_ix in 0..N {
                    total = total
                        + ricci_up[c_ix * N + d_ix]
                            * cb.weyl.at(a, c_ix, b, d_ix).value()
                            * C::new(T::of(0.5), T::zero());
                }
            }
            bach[a][b] = total.re;
            imag = imag.max(total.im.abs());
        }
    }
    Ok(BachResult {
        bach,
        cotton,
        imag_residual: imag,
    })
}

/// Rank-5 array for grad C.
pub struct T5<T: Real>(Vec<JetScalar<T>>);

impl<T: Real> T5<T> {
    pub fn at5(&self, e: usize, a: usize, b: usize, c: usize, d: usize) -> &JetScalar<T> {
        &self.0[(((e * N + a) * N + b) * N + c) * N + d]
    }
}

fn build_nabla_weyl<T: Real>(cb: &CurvatureBundle<T>) -> FormsResult<T5<T>> {
    let gamma = &cb.christoffel;
    let mut v = Vec::with_capacity(N * N * N * N * N);
    for e in 0..N {
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    for d in 0..N {
                        let mut acc = cb.weyl.at(a, b, c, d).partial(e)?;
                        for f in 0..N {
                            acc = &acc - &gamma.at(f, e, a).mul(cb.weyl.at(f, b, c, d));
                            acc = &acc - &gamma.at(f, e, b).mul(cb.weyl.at(a, f, c, d));
                            acc = &acc - &gamma.at(f, e, c).mul(cb.weyl.at(a, b, f, d));
                            acc = &acc - &gamma.at(f, e, d).mul(cb.weyl.at(a, b, c, f));
                        }
                        v.push(acc);
                    }
                }
            }
        }
    }
    Ok(T5(v))
}

/// Bach components in the coframe basis: B_ij = e_i^mu e_j^nu B_{mu nu}
/// where e are the frame vectors dual to the coframe.
pub fn bach_in_coframe<T: Real>(
    cb: &CurvatureBundle<T>,
    bach: &[[T; 4]; 4],
) -> FormsResult<[[C<T>; 4]; 4]> {
    let frame = super::np::dual_frame_consts(&cb.mj)?;
    let mut out = [[C::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..N {
        for j in 0..N {
            let mut acc = C::new(T::zero(), T::zero());
            for mu in 0..N {
                for nu in 0..N {
                    acc = acc + frame[i][mu] * frame[j][nu] * C::new(bach[mu][nu], T::zero());
                }
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}
