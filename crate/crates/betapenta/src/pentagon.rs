//! Beta-pentagon families and the five-term relation verifier.
//!
//! A family is five functions `phi_0..phi_4` on `A^2`. Over a finite cyclic
//! group everything is exact table arithmetic; over the reals a family is a
//! set of closures on complexified arguments together with metadata: where
//! its defining integrals converge and how the five-term `z`-integrand decays
//! and where its pole families sit, so the verifier can place a separating
//! contour or reject a sample instead of silently truncating.
//!
//! The five-term relation verified here, written additively over the reals:
//!
//! ```text
//! phi1(x,y) phi3(u,v)
//!   = int phi4(u+y, v-z) phi2(x+y+u+v-z, z) phi0(x+v, y-z) dz.
//! ```

use crate::error::{Error, Result};
use crate::faddeev::{ChainDir, ExpRates, FaddeevTuple};
use crate::gamma;
use crate::lca::{Group, GroupKind};
use crate::qdilog::{log_psi, EvalMethod, HbarContext, EVAL_TOL};
use crate::quad::{integrate_2d, integrate_contour, integrate_line, Contour, TailHint, Window};
use crate::report::{inputs_of, PointRecord, VerificationReport};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Constructed,
    ClosedForm,
    Transformed,
}

/// Exact family over a finite cyclic group: five N x N value tables.
#[derive(Debug, Clone)]
pub struct CyclicFamily {
    group: Group,
    tables: [Vec<Complex64>; 5],
}

impl CyclicFamily {
    pub fn from_tables(group: Group, tables: [Vec<Complex64>; 5]) -> Self {
        let n = match group.kind {
            GroupKind::Cyclic(n) => n,
            _ => panic!("cyclic family needs a cyclic group"),
        };
        for t in &tables {
            assert_eq!(t.len(), (n * n) as usize, "table must be N x N");
        }
        CyclicFamily { group, tables }
    }

    pub fn from_fn<F>(group: Group, f: F) -> Self
    where
        F: Fn(usize, u64, u64) -> Complex64,
    {
        let n = match group.kind {
            GroupKind::Cyclic(n) => n,
            _ => panic!("cyclic family needs a cyclic group"),
        };
        let mut tables: [Vec<Complex64>; 5] = Default::default();
        for (i, t) in tables.iter_mut().enumerate() {
            *t = (0..n * n)
                .map(|k| f(i, k / n, k % n))
                .collect();
        }
        CyclicFamily { group, tables }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn order(&self) -> u64 {
        match self.group.kind {
            GroupKind::Cyclic(n) => n,
            _ => unreachable!(),
        }
    }

    pub fn value(&self, i: usize, x: u64, y: u64) -> Complex64 {
        let n = self.order();
        self.tables[i][(x % n * n + y % n) as usize]
    }

    /// Argument-inverted family `phi'(x, y) = phi(-x, -y)`.
    pub fn invert(&self) -> CyclicFamily {
        let n = self.order();
        let mut tables: [Vec<Complex64>; 5] = Default::default();
        for (i, t) in tables.iter_mut().enumerate() {
            *t = (0..n * n)
                .map(|k| {
                    let (x, y) = (k / n, k % n);
                    self.value(i, (n - x) % n, (n - y) % n)
                })
                .collect();
        }
        CyclicFamily {
            group: self.group,
            tables,
        }
    }
}

/// A complexified evaluation point over the reals.
#[derive(Debug, Clone, Copy)]
pub struct RealSample {
    pub x: Complex64,
    pub y: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

impl RealSample {
    pub fn mirrored(&self) -> RealSample {
        RealSample {
            x: -self.x,
            y: -self.y,
            u: -self.u,
            v: -self.v,
        }
    }
}

/// Placement of the five-term `z`-integration for one sample: the decay
/// exponents of the integrand and a pole-separating straight line.
#[derive(Debug, Clone)]
pub struct ZPlan {
    pub rates: ExpRates,
    pub contour_im: f64,
}

type EvalFn = Arc<dyn Fn(usize, Complex64, Complex64) -> Result<Complex64> + Send + Sync>;
type PlanFn = Arc<dyn Fn(&RealSample) -> Result<ZPlan> + Send + Sync>;

/// Family over the reals: complexified evaluators plus convergence metadata.
#[derive(Clone)]
pub struct RealFamily {
    group: Group,
    eval: EvalFn,
    alt_eval: Option<EvalFn>,
    plan: PlanFn,
    pub provenance: Provenance,
}

impl RealFamily {
    pub fn group(&self) -> Group {
        self.group
    }

    pub fn phi(&self, i: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
        assert!(i < 5, "labels are 0..=4");
        (self.eval)(i, x, y)
    }

    /// Cross-checking evaluator (the Fourier-side route), when attached.
    pub fn phi_alt(&self, i: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
        match &self.alt_eval {
            Some(f) => f(i, x, y),
            None => Err(Error::ConfigError(
                "family carries no alternate evaluator".into(),
            )),
        }
    }

    pub fn has_alt(&self) -> bool {
        self.alt_eval.is_some()
    }

    pub fn z_plan(&self, s: &RealSample) -> Result<ZPlan> {
        (self.plan)(s)
    }
}

impl std::fmt::Debug for RealFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFamily")
            .field("provenance", &self.provenance)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum PentagonFamily {
    Cyclic(CyclicFamily),
    Real(RealFamily),
}

impl PentagonFamily {
    pub fn group(&self) -> Group {
        match self {
            PentagonFamily::Cyclic(c) => c.group(),
            PentagonFamily::Real(r) => r.group(),
        }
    }
}

/// An evaluation point for the five-term verifier.
#[derive(Debug, Clone)]
pub enum SamplePoint {
    Cyclic { x: u64, y: u64, u: u64, v: u64 },
    Real {
        s: RealSample,
        /// Explicit `z`-contour override; `None` uses the family's plan.
        z_contour: Option<Contour>,
    },
}

impl SamplePoint {
    pub fn real(x: Complex64, y: Complex64, u: Complex64, v: Complex64) -> Self {
        SamplePoint::Real {
            s: RealSample { x, y, u, v },
            z_contour: None,
        }
    }
}

/// The exact constant solution over a cyclic group: `phi_i = 1/(N s)` for
/// measure weight `s` per point (that value is forced by the relation).
pub fn constant_solution(g: &Group) -> Result<PentagonFamily> {
    let n = match g.kind {
        GroupKind::Cyclic(n) => n,
        _ => {
            return Err(Error::ConfigError(
                "constant solution is a cyclic-group fixture".into(),
            ))
        }
    };
    let c = Complex64::new(1.0 / (n as f64 * g.measure_scale), 0.0);
    Ok(PentagonFamily::Cyclic(CyclicFamily::from_fn(*g, |_, _, _| c)))
}

/// Argument inversion `phi'_i(x, y) = phi_i(-x, -y)`; an involution that
/// preserves the pentagon relation.
pub fn symmetry_invert(fam: &PentagonFamily) -> PentagonFamily {
    match fam {
        PentagonFamily::Cyclic(c) => PentagonFamily::Cyclic(c.invert()),
        PentagonFamily::Real(r) => {
            let eval = r.eval.clone();
            let alt = r.alt_eval.clone();
            let plan = r.plan.clone();
            PentagonFamily::Real(RealFamily {
                group: r.group,
                eval: Arc::new(move |i, x, y| eval(i, -x, -y)),
                alt_eval: alt.map(|a| {
                    let a = a.clone();
                    let f: EvalFn = Arc::new(move |i, x: Complex64, y: Complex64| a(i, -x, -y));
                    f
                }),
                plan: Arc::new(move |s: &RealSample| {
                    let p = plan(&s.mirrored())?;
                    Ok(ZPlan {
                        rates: p.rates.reflected(),
                        contour_im: -p.contour_im,
                    })
                }),
                provenance: Provenance::Transformed,
            })
        }
    }
}

/// Closed form of the pentagon solution built from the quantum dilogarithm
/// tuple paired with itself:
/// `Psi(x - ic) Psi(y + ic) Psi(-x - y + ic)` with `c = 1/(2 sqrt(hbar))`.
pub fn phi_plus_closed(ctx: &HbarContext, x: Complex64, y: Complex64) -> Result<Complex64> {
    let c = ctx.strip_halfwidth();
    let args = [x - I * c, y + I * c, -x - y + I * c];
    let mut log = Complex64::new(0.0, 0.0);
    for a in args {
        let dist = ctx.pole_distance(a);
        if dist < 1e-7 {
            return Err(Error::PoleHit { dist });
        }
        log += log_psi(ctx, a)?;
    }
    Ok(log.exp())
}

/// The closed-form family with all five members equal to `phi_plus`.
pub fn phi_plus_family(ctx: &HbarContext) -> PentagonFamily {
    let c = ctx.strip_halfwidth();
    let ctx_eval = ctx.clone();
    let eval: EvalFn = Arc::new(move |_i, x, y| phi_plus_closed(&ctx_eval, x, y));
    let plan: PlanFn = Arc::new(move |s: &RealSample| {
        let w = s.x + s.y + s.u + s.v;
        // Ascending pole chains root at z = 0, u+y+v and x+v+y; descending
        // ones at z = v, y and x+y+u+v - 2ic. A separating line must thread
        // between them.
        let hi = 0.0f64
            .min((s.u + s.y + s.v).im)
            .min((s.x + s.v + s.y).im);
        let lo = s.v.im.max(s.y.im).max(w.im - 2.0 * c);
        if hi - lo < 2e-3 {
            return Err(Error::NonConvergent(format!(
                "no z-line separates the pole chains (gap {:.3e}); complexify the sample",
                hi - lo
            )));
        }
        Ok(ZPlan {
            rates: ExpRates {
                neg: 4.0 * PI * c,
                pos: -4.0 * PI * c,
            },
            contour_im: 0.5 * (hi + lo),
        })
    });
    PentagonFamily::Real(RealFamily {
        group: Group::reals(),
        eval,
        alt_eval: None,
        plan,
        provenance: Provenance::ClosedForm,
    })
}

/// Regularized evaluation of the reflected-pair solution
/// `int Phi(x/2 + t) / Phi(x/2 - t) e^{2 pi i t y} e^{-eps t^2} dt`.
///
/// The unregularized integrand is a pure Gaussian phase in both tails, so the
/// integral is only conditionally convergent; the Gaussian regulator makes it
/// absolute and the limit is recovered by extrapolation.
pub fn phi_minus(ctx: &HbarContext, x: Complex64, y: Complex64, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::ConfigError("regulator must be positive".into()));
    }
    let integrand = |t: f64| -> Complex64 {
        let tc = Complex64::new(t, 0.0);
        let a = ctx.log_phi(x / 2.0 + tc, EvalMethod::Auto, EVAL_TOL);
        let b = ctx.log_phi(x / 2.0 - tc, EvalMethod::Auto, EVAL_TOL);
        match (a, b) {
            (Ok(la), Ok(lb)) => (la - lb + 2.0 * PI * I * tc * y - eps * t * t).exp(),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let growth = PI * x.im.abs() + 2.0 * PI * y.im.abs();
    let from = (3.0f64).max((growth + 1.0) / eps);
    let coeff = integrand(from).norm().max(integrand(-from).norm()).max(1e-9) * 1e3;
    let rate = 2.0 * eps * from - growth;
    let r = integrate_line(
        integrand,
        Window::RealLine {
            left: TailHint::new(-from, rate, coeff),
            right: TailHint::new(from, rate, coeff),
        },
        1e-10,
    )?;
    Ok(r.value)
}

/// Regulator extrapolation `eps, eps/2, eps/4 -> 0` (the value is analytic in
/// the regulator, so three-point Richardson removes the linear and quadratic
/// terms). Returns the extrapolated value and a step-difference error gauge.
pub fn phi_minus_extrapolated(
    ctx: &HbarContext,
    x: Complex64,
    y: Complex64,
    eps0: f64,
) -> Result<(Complex64, f64)> {
    let v1 = phi_minus(ctx, x, y, eps0)?;
    let v2 = phi_minus(ctx, x, y, eps0 / 2.0)?;
    let v4 = phi_minus(ctx, x, y, eps0 / 4.0)?;
    let extrap = (8.0 * v4 - 6.0 * v2 + v1) / 3.0;
    Ok((extrap, (v4 - v2).norm()))
}

/// Euler-beta pentagon solution with the distributional `+-i0` prescriptions
/// replaced by a finite `eps`:
/// `B(2 pi i (x + y - i eps), -2 pi i (y + i eps))`, identical for all labels.
pub fn beta_solution(eps: f64, x: Complex64, y: Complex64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::ConfigError("eps must be positive".into()));
    }
    let a = 2.0 * PI * I * (x + y - I * eps);
    let b = -2.0 * PI * I * (y + I * eps);
    gamma::beta(a, b)
}

pub fn beta_family(eps: f64) -> Result<PentagonFamily> {
    if !(eps > 0.0) {
        return Err(Error::ConfigError("eps must be positive".into()));
    }
    let eval: EvalFn = Arc::new(move |_i, x, y| beta_solution(eps, x, y));
    let plan: PlanFn = Arc::new(move |_s: &RealSample| {
        // Gamma-factor decay: four factors of e^{-pi^2 |z|} survive in the
        // product, with algebraic corrections; poles sit a distance eps off
        // the real line.
        Ok(ZPlan {
            rates: ExpRates {
                neg: 3.2 * PI * PI,
                pos: -3.2 * PI * PI,
            },
            contour_im: 0.0,
        })
    });
    Ok(PentagonFamily::Real(RealFamily {
        group: Group::reals(),
        eval,
        alt_eval: None,
        plan,
        provenance: Provenance::ClosedForm,
    }))
}

fn line_quad(
    integrand: &dyn Fn(Complex64) -> Complex64,
    rates: ExpRates,
    contour_im: f64,
    dodges: &[(f64, f64)],
    anchor: f64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    if !rates.decays() {
        return Err(Error::NonConvergent(format!(
            "integrand does not decay: rates ({}, {})",
            rates.neg, rates.pos
        )));
    }
    let probe = |t: f64| integrand(Complex64::new(t, contour_im)).norm();
    let coeff_left = (probe(-anchor).max(probe(-anchor - 0.37)) * 1e3).max(1e-12);
    let coeff_right = (probe(anchor).max(probe(anchor + 0.37)) * 1e3).max(1e-12);
    let left = TailHint::new(-anchor, 0.9 * rates.neg.min(1e6), coeff_left);
    let right = TailHint::new(anchor, -0.9 * rates.pos.max(-1e6), coeff_right);
    let contour = Contour::dodging_line(contour_im, dodges, (-anchor, anchor), left, right)?;
    let r = integrate_contour(integrand, &contour, tol)?;
    Ok((r.value, r.err_estimate))
}

/// Pentagon family constructed from two function tuples by the pairing
/// `phi_j(x, y) = int e^{2 pi i y t} f_j(t + x/2) conj-ext(g_j)(t - x/2) dt`,
/// with the Fourier-side evaluator
/// `phi_j(x, y) = int e^{2 pi i x t} ft_j(t - y/2) conj-ext(gt_j)(t + y/2) dt`
/// attached for cross-checking whenever both tuples have function transforms.
pub fn construct_theorem2(f: &FaddeevTuple, g: &FaddeevTuple) -> Result<PentagonFamily> {
    let phi_minus_case = f.is_phi() && g.is_reflected_phi();
    let f70 = f.clone();
    let g70 = g.clone();
    let eval: EvalFn = Arc::new(move |j, x, y| {
        if phi_minus_case {
            // The direct pairing integrand is a pure quadratic phase in both
            // tails here; evaluate through the extrapolated regulator.
            let ctx = f70.phi_context().expect("phi tuple carries a context");
            return phi_minus_extrapolated(ctx, x, y, 0.04).map(|(v, _)| v);
        }
        let char_rates = ExpRates {
            neg: -2.0 * PI * y.im,
            pos: -2.0 * PI * y.im,
        };
        let rates = char_rates
            .add(f70.rates_f(j, x.im / 2.0))
            .add(g70.rates_f_bar(j, -x.im / 2.0));
        let f70 = &f70;
        let g70 = &g70;
        let integrand = move |t: Complex64| -> Complex64 {
            let a = f70.f(j, t + x / 2.0);
            let b = g70.f_bar(j, t - x / 2.0);
            match (a, b) {
                (Ok(a), Ok(b)) => a * b * (2.0 * PI * I * y * t).exp(),
                _ => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        let anchor = x.norm() / 2.0 + 3.5;
        line_quad(&integrand, rates, 0.0, &[], anchor, 1e-9).map(|(v, _)| v)
    });

    let alt_eval: Option<EvalFn> = if f.has_function_transform() && g.has_function_transform() {
        let ft = f.clone();
        let gt = g.clone();
        Some(Arc::new(move |j, x, y| {
            let char_rates = ExpRates {
                neg: -2.0 * PI * x.im,
                pos: -2.0 * PI * x.im,
            };
            let rates = char_rates
                .add(ft.rates_f_tilde(j, -y.im / 2.0)?)
                .add(gt.rates_f_tilde_bar(j, y.im / 2.0)?);
            // Pole chains: ft root at t = y/2, conj-ext(gt) root at t = -y/2.
            let mut dodges = Vec::new();
            let clearance = 0.08;
            if let Some(dir) = ft.ft_chain(j)? {
                if let Some(d) = plan_dodge_at(y / 2.0, dir, clearance) {
                    dodges.push(d);
                }
            }
            if let Some(dir) = gt.ft_bar_chain(j)? {
                if let Some(d) = plan_dodge_at(-y / 2.0, dir, clearance) {
                    dodges.push(d);
                }
            }
            let ft = &ft;
            let gt = &gt;
            let integrand = move |t: Complex64| -> Complex64 {
                let a = ft.f_tilde(j, t - y / 2.0);
                let b = gt.f_tilde_bar(j, t + y / 2.0);
                match (a, b) {
                    (Ok(a), Ok(b)) => a * b * (2.0 * PI * I * x * t).exp(),
                    _ => Complex64::new(f64::NAN, f64::NAN),
                }
            };
            let anchor = y.norm() / 2.0 + 3.5;
            line_quad(&integrand, rates, 0.0, &dodges, anchor, 1e-9).map(|(v, _)| v)
        }))
    } else {
        None
    };

    // Five-term decay exponents, by tuple combination.
    let plan: PlanFn = if f.is_phi() && g.is_phi() {
        let c = f.phi_context().expect("phi tuple").strip_halfwidth();
        Arc::new(move |s: &RealSample| {
            let w = s.x + s.y + s.u + s.v;
            let hi = 0.0f64
                .min((s.u + s.y + s.v).im)
                .min((s.x + s.v + s.y).im);
            let lo = s.v.im.max(s.y.im).max(w.im - 2.0 * c);
            if hi - lo < 2e-3 {
                return Err(Error::NonConvergent(
                    "no separating z-line for this sample".into(),
                ));
            }
            Ok(ZPlan {
                rates: ExpRates {
                    neg: 4.0 * PI * c,
                    pos: -4.0 * PI * c,
                },
                contour_im: 0.5 * (hi + lo),
            })
        })
    } else if phi_minus_case {
        let c = f.phi_context().expect("phi tuple").strip_halfwidth();
        Arc::new(move |_s: &RealSample| {
            Ok(ZPlan {
                rates: ExpRates {
                    neg: 1.6 * PI * c,
                    pos: -1.6 * PI * c,
                },
                contour_im: 0.0,
            })
        })
    } else if f.is_phi() && g.is_constant() {
        let c = f.phi_context().expect("phi tuple").strip_halfwidth();
        Arc::new(move |s: &RealSample| {
            let hi = 0.0f64.min((s.u + s.y + s.v).im).min((s.x + s.v + s.y).im);
            let lo = s.v.im.max(s.y.im);
            if hi - lo < 2e-3 {
                return Err(Error::NonConvergent(
                    "no separating z-line for this sample".into(),
                ));
            }
            let pos = -2.0 * PI * c - 2.0 * PI * (s.y + s.v).im;
            if pos >= 0.0 {
                return Err(Error::NonConvergent(
                    "five-term integrand does not decay for this sample".into(),
                ));
            }
            Ok(ZPlan {
                rates: ExpRates {
                    neg: 4.0 * PI * c,
                    pos,
                },
                contour_im: 0.5 * (hi + lo),
            })
        })
    } else {
        // Gaussian-backed combinations decay super-exponentially.
        Arc::new(move |_s: &RealSample| {
            Ok(ZPlan {
                rates: ExpRates {
                    neg: 2.0 * PI,
                    pos: -2.0 * PI,
                },
                contour_im: 0.0,
            })
        })
    };

    Ok(PentagonFamily::Real(RealFamily {
        group: Group::reals(),
        eval,
        alt_eval,
        plan,
        provenance: Provenance::Constructed,
    }))
}

fn plan_dodge_at(root: Complex64, dir: ChainDir, clearance: f64) -> Option<(f64, f64)> {
    match dir {
        ChainDir::Asc => {
            if root.im > clearance {
                None
            } else {
                Some((root.re, root.im - clearance))
            }
        }
        ChainDir::Desc => {
            if root.im < -clearance {
                None
            } else {
                Some((root.re, root.im + clearance))
            }
        }
    }
}

/// Verify the five-term relation on the given samples.
pub fn verify_pentagon(
    fam: &PentagonFamily,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<VerificationReport> {
    let mut points = Vec::new();
    for sp in samples {
        match (fam, sp) {
            (PentagonFamily::Cyclic(cf), SamplePoint::Cyclic { x, y, u, v }) => {
                points.push(cyclic_point(cf, *x, *y, *u, *v));
            }
            (PentagonFamily::Real(rf), SamplePoint::Real { s, z_contour }) => {
                points.push(real_point(rf, s, z_contour.as_ref(), tol));
            }
            _ => {
                return Err(Error::ConfigError(
                    "sample kind does not match family group".into(),
                ))
            }
        }
    }
    Ok(VerificationReport::from_points("pentagon", tol, points))
}

fn cyclic_point(cf: &CyclicFamily, x: u64, y: u64, u: u64, v: u64) -> PointRecord {
    let n = cf.order();
    let w = cf.group().measure_scale;
    let lhs = cf.value(1, x, y) * cf.value(3, u, v);
    let mut rhs = Complex64::new(0.0, 0.0);
    for z in 0..n {
        let zb = (n - z) % n;
        rhs += cf.value(4, (u + y) % n, (v + zb) % n)
            * cf.value(2, (x + y + u + v + zb) % n, z)
            * cf.value(0, (x + v) % n, (y + zb) % n);
    }
    rhs *= w;
    let inputs = inputs_of(&[
        ("x", Complex64::new(x as f64, 0.0)),
        ("y", Complex64::new(y as f64, 0.0)),
        ("u", Complex64::new(u as f64, 0.0)),
        ("v", Complex64::new(v as f64, 0.0)),
    ]);
    PointRecord::new(inputs, lhs, rhs, 0.0)
}

fn real_point(
    rf: &RealFamily,
    s: &RealSample,
    z_contour: Option<&Contour>,
    tol: f64,
) -> PointRecord {
    let inputs = inputs_of(&[("x", s.x), ("y", s.y), ("u", s.u), ("v", s.v)]);
    let result = (|| -> Result<(Complex64, Complex64, f64)> {
        let lhs = rf.phi(1, s.x, s.y)? * rf.phi(3, s.u, s.v)?;
        let w = s.x + s.y + s.u + s.v;
        let integrand = |z: Complex64| -> Complex64 {
            let a = rf.phi(4, s.u + s.y, s.v - z);
            let b = rf.phi(2, w - z, z);
            let c = rf.phi(0, s.x + s.v, s.y - z);
            match (a, b, c) {
                (Ok(a), Ok(b), Ok(c)) => a * b * c,
                _ => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        let quad_tol = tol * lhs.norm().max(1e-6) / 30.0;
        let (value, err) = match z_contour {
            Some(contour) => {
                let r = integrate_contour(integrand, contour, quad_tol)?;
                (r.value, r.err_estimate)
            }
            None => {
                let plan = rf.z_plan(s)?;
                let anchor = [s.x, s.y, s.u, s.v]
                    .iter()
                    .map(|z| z.re.abs())
                    .fold(0.0f64, f64::max)
                    * 2.0
                    + 3.0;
                line_quad(&integrand, plan.rates, plan.contour_im, &[], anchor, quad_tol)?
            }
        };
        let rhs = value * rf.group().measure_scale;
        Ok((lhs, rhs, err))
    })();
    match result {
        Ok((lhs, rhs, err)) => PointRecord::new(inputs, lhs, rhs, err),
        Err(e) => PointRecord::failed(inputs, e.to_string()),
    }
}

/// Complexified sample points for the quantum-dilogarithm families: the
/// imaginary offsets follow the convergence recipe
/// `Im x = Im u = delta > 0 > Im y = Im v = -delta/4` with
/// `delta = c/4 = 1/(8 sqrt hbar)`, which keeps every defining integral
/// absolutely convergent and every pole chain clear of the z-line.
pub fn seeded_complex_samples(ctx: &HbarContext, n: usize, seed: u64) -> Vec<SamplePoint> {
    use rand::{Rng, SeedableRng};
    let delta = ctx.strip_halfwidth() / 4.0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut draw = || rng.gen_range(-0.9..0.9);
            SamplePoint::real(
                Complex64::new(draw(), delta),
                Complex64::new(draw(), -delta / 4.0),
                Complex64::new(draw(), delta),
                Complex64::new(draw(), -delta / 4.0),
            )
        })
        .collect()
}

/// Seeded cyclic sample points.
pub fn seeded_cyclic_samples(n_points: usize, order: u64, seed: u64) -> Vec<SamplePoint> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n_points)
        .map(|_| SamplePoint::Cyclic {
            x: rng.gen_range(0..order),
            y: rng.gen_range(0..order),
            u: rng.gen_range(0..order),
            v: rng.gen_range(0..order),
        })
        .collect()
}

/// The double Fourier transform of the self-paired solution, evaluated on
/// pole-separated shifted lines (absolutely convergent, no regulator):
/// `int int e^{2 pi i (x v - y u)} phi_plus(u, v) du dv` with
/// `u` on `R + 0.8 i c` and `v` on `R - 0.4 i c`.
pub fn phi_plus_double_fourier(
    ctx: &HbarContext,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<Complex64> {
    let c = ctx.strip_halfwidth();
    let alpha = 0.8 * c;
    let beta = -0.4 * c;
    let rate_u = 0.9 * PI * 0.4 * c;
    let rate_v = 0.9 * PI * 1.2 * c;
    let char_growth = 2.0 * PI * (x.abs() + y.abs());
    let from_u = 6.0 + char_growth / rate_u;
    let from_v = 6.0 + char_growth / rate_v;
    let outer = Window::RealLine {
        left: TailHint::new(-from_u, rate_u, 50.0),
        right: TailHint::new(from_u, rate_u, 50.0),
    };
    let inner = Window::RealLine {
        left: TailHint::new(-from_v, rate_v, 50.0),
        right: TailHint::new(from_v, rate_v, 50.0),
    };
    let f = |su: f64, tv: f64| -> Complex64 {
        let u = Complex64::new(su, alpha);
        let v = Complex64::new(tv, beta);
        match phi_plus_closed(ctx, u, v) {
            Ok(p) => {
                (2.0 * PI * I * (Complex64::new(x, 0.0) * v - Complex64::new(y, 0.0) * u)).exp()
                    * p
            }
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let r = integrate_2d(f, outer, inner, tol)?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    /// Independent brute-force oracle for the cyclic five-term relation.
    fn brute_force_residual(cf: &CyclicFamily, x: u64, y: u64, u: u64, v: u64) -> f64 {
        let n = cf.order();
        let lhs = cf.value(1, x, y) * cf.value(3, u, v);
        let mut rhs = c(0.0, 0.0);
        for z in 0..n {
            let minus_z = (n - z) % n;
            let a = cf.value(4, (u + y) % n, (v + minus_z) % n);
            let b = cf.value(2, (x + y + u + v + minus_z) % n, z);
            let d = cf.value(0, (x + v) % n, (y + minus_z) % n);
            rhs += a * b * d;
        }
        rhs *= cf.group().measure_scale;
        (lhs - rhs).norm()
    }

    #[test]
    fn constant_solution_exact() {
        for n in [1u64, 4, 7] {
            let g = Group::cyclic(n).unwrap();
            let fam = constant_solution(&g).unwrap();
            let samples = seeded_cyclic_samples(6, n, 42);
            let rep = verify_pentagon(&fam, &samples, 1e-12).unwrap();
            assert!(rep.pass, "N={n}: {}", rep.max_rel_err);
            if let PentagonFamily::Cyclic(cf) = &fam {
                for sp in &samples {
                    if let SamplePoint::Cyclic { x, y, u, v } = sp {
                        assert!(brute_force_residual(cf, *x, *y, *u, *v) < 1e-14);
                    }
                }
                // Spec'd value check for N = 4: LHS = 1/16 = sum_z (1/4)^3.
                if n == 4 {
                    assert!((cf.value(1, 0, 0) - c(0.25, 0.0)).norm() < 1e-15);
                    assert!(brute_force_residual(cf, 1, 2, 3, 0) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn constant_solution_rejects_non_cyclic() {
        assert!(constant_solution(&Group::reals()).is_err());
    }

    #[test]
    fn inversion_is_involution_and_fixes_constants() {
        let g = Group::cyclic(5).unwrap();
        let fam = constant_solution(&g).unwrap();
        let inv = symmetry_invert(&fam);
        if let (PentagonFamily::Cyclic(a), PentagonFamily::Cyclic(b)) = (&fam, &inv) {
            for x in 0..5 {
                for y in 0..5 {
                    assert_eq!(a.value(2, x, y), b.value(2, x, y));
                }
            }
        }
        let twice = symmetry_invert(&inv);
        if let (PentagonFamily::Cyclic(a), PentagonFamily::Cyclic(b)) = (&fam, &twice) {
            for x in 0..5 {
                assert_eq!(a.value(0, x, 3), b.value(0, x, 3));
            }
        }
    }

    #[test]
    fn beta_function_identities() {
        let one = beta_solution(0.05, c(0.0, 0.0), c(0.0, 0.0));
        assert!(one.is_ok());
        let b = gamma::beta(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((b - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn phi_plus_closed_matches_theorem2_integral() {
        let ctx = HbarContext::new(0.5);
        let t = crate::faddeev::make_phi(&ctx);
        let fam = construct_theorem2(&t, &t).unwrap();
        let delta = ctx.strip_halfwidth() / 4.0;
        let x = c(0.3, delta);
        let y = c(-0.45, -delta / 4.0);
        if let PentagonFamily::Real(rf) = &fam {
            let quad70 = rf.phi(2, x, y).unwrap();
            let closed = phi_plus_closed(&ctx, x, y).unwrap();
            assert!(
                rel(quad70, closed) < 1e-6,
                "eq70 {quad70} vs closed {closed}"
            );
            let quad75 = rf.phi_alt(2, x, y).unwrap();
            assert!(
                rel(quad75, closed) < 1e-6,
                "eq75 {quad75} vs closed {closed}"
            );
        } else {
            panic!("expected real family");
        }
    }

    #[test]
    fn phi_plus_pole_hit_detected() {
        let ctx = HbarContext::new(0.5);
        // y = 0 puts the second factor right on the first lattice pole.
        assert!(matches!(
            phi_plus_closed(&ctx, c(0.3, 0.1), c(0.0, 0.0)),
            Err(Error::PoleHit { .. })
        ));
    }

    #[test]
    fn theorem2_constant_partner_reproduces_transform_form() {
        // f = Phi tuple, g = constant: the pairing collapses to
        // e^{-pi i x y} (F Phi)(y).
        let ctx = HbarContext::new(0.5);
        let f = crate::faddeev::make_phi(&ctx);
        let g = crate::faddeev::make_constant();
        let fam = construct_theorem2(&f, &g).unwrap();
        // Convergence needs Im y < 0 < Im x + 2 Im y.
        let delta = ctx.strip_halfwidth() / 4.0;
        let x = c(0.4, delta);
        let y = c(-0.3, -delta / 4.0);
        if let PentagonFamily::Real(rf) = &fam {
            assert!(!rf.has_alt(), "constant partner has no transform side");
            let quad = rf.phi(1, x, y).unwrap();
            let closed = (-PI * I * x * y).exp()
                * crate::qdilog::fourier_phi_closed(&ctx, y).unwrap();
            assert!(rel(quad, closed) < 1e-7, "{quad} vs {closed}");
        }
    }

    #[test]
    fn phi_minus_routes_agree_and_are_real() {
        let ctx = HbarContext::new(0.5);
        let f = crate::faddeev::make_phi(&ctx);
        let g = crate::faddeev::make_reflected(&f);
        let fam = construct_theorem2(&f, &g).unwrap();
        let (x, y) = (c(0.3, 0.0), c(-0.2, 0.0));
        let (reg, gauge) = phi_minus_extrapolated(&ctx, x, y, 0.04).unwrap();
        // Exact reality at real arguments.
        assert!(reg.im.abs() < 1e-7, "Im = {}", reg.im);
        if let PentagonFamily::Real(rf) = &fam {
            // The Fourier-side evaluator is absolutely convergent and fully
            // independent of the regulator route.
            let alt = rf.phi_alt(0, x, y).unwrap();
            assert!(
                rel(reg, alt) < 1e-5,
                "regulated {reg} vs transform-side {alt} (gauge {gauge})"
            );
            assert!(alt.im.abs() < 1e-8);
        }
    }

    #[test]
    fn pentagon_phi_plus_single_sample() {
        let ctx = HbarContext::new(0.5);
        let fam = phi_plus_family(&ctx);
        let samples = seeded_complex_samples(&ctx, 2, 3);
        let rep = verify_pentagon(&fam, &samples, 1e-5).unwrap();
        assert!(rep.pass, "report: {}", rep.to_json());
    }

    #[test]
    fn pentagon_rejects_uncomplexified_phi_plus_sample() {
        let ctx = HbarContext::new(0.5);
        let fam = phi_plus_family(&ctx);
        let bad = vec![SamplePoint::real(
            c(0.3, 0.0),
            c(0.1, 0.0),
            c(-0.2, 0.0),
            c(0.4, 0.0),
        )];
        let rep = verify_pentagon(&fam, &bad, 1e-5).unwrap();
        assert!(!rep.pass);
        assert!(rep.points[0].error.is_some());
    }

    #[test]
    fn inverted_phi_plus_passes_at_mirrored_samples() {
        let ctx = HbarContext::new(0.5);
        let fam = phi_plus_family(&ctx);
        let inv = symmetry_invert(&fam);
        let samples: Vec<SamplePoint> = seeded_complex_samples(&ctx, 2, 9)
            .into_iter()
            .map(|sp| match sp {
                SamplePoint::Real { s, .. } => SamplePoint::Real {
                    s: s.mirrored(),
                    z_contour: None,
                },
                other => other,
            })
            .collect();
        let rep = verify_pentagon(&inv, &samples, 1e-5).unwrap();
        assert!(rep.pass, "report: {}", rep.to_json());
    }

    #[test]
    fn beta_residual_shrinks_with_eps() {
        let sample = SamplePoint::real(c(0.31, 0.0), c(0.17, 0.0), c(-0.23, 0.0), c(0.11, 0.0));
        let mut residuals = Vec::new();
        for &eps in &[0.1, 0.05, 0.025] {
            let fam = beta_family(eps).unwrap();
            let rep = verify_pentagon(&fam, &[sample.clone()], 1.0).unwrap();
            assert!(rep.points[0].error.is_none(), "{:?}", rep.points[0].error);
            residuals.push(rep.points[0].rel_err);
        }
        assert!(
            residuals[0] > residuals[1] && residuals[1] > residuals[2],
            "residual trend not decreasing: {residuals:?}"
        );
    }
}
