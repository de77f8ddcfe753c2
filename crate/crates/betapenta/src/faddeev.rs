//! Function tuples satisfying the operator five-term relation, represented
//! and verified through the equivalent Fourier-side identity
//!
//! ```text
//! ft1(x) ft3(y) = e^{-2 pi i x y} int ft4(y-z) ft2(z) ft0(x-z) e^{i pi z^2} dz
//! ```
//!
//! where `ft = F^{-1} f`. The catalogue is the constant tuple (distributional
//! transform, rejected by the verifier), Gaussian tuples, the quantum
//! dilogarithm tuple, and reflections. Each tuple carries its tail exponents
//! and pole-chain orientations as metadata so the verifiers can certify decay
//! and build separating contours instead of guessing.

use crate::error::{Error, Result};
use crate::qdilog::{zeta_ft, EvalMethod, HbarContext, EVAL_TOL};
use crate::quad::{integrate_contour, Contour, TailHint};
use crate::report::{inputs_of, PointRecord, VerificationReport};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exponential tail behaviour of `|f(t + i im)|` as `t -> -inf` (`neg`) and
/// `t -> +inf` (`pos`): `|f| ~ C e^{rate * t}`. `-inf`/`+inf` encode
/// super-exponential (Gaussian) decay.
#[derive(Debug, Clone, Copy)]
pub struct ExpRates {
    pub neg: f64,
    pub pos: f64,
}

impl ExpRates {
    pub fn add(self, other: ExpRates) -> ExpRates {
        ExpRates {
            neg: sat_add(self.neg, other.neg),
            pos: sat_add(self.pos, other.pos),
        }
    }
    /// Rates of `t -> f(c - t)` given the rates of `f` at the mirrored offset.
    pub fn reflected(self) -> ExpRates {
        ExpRates {
            neg: -self.pos,
            pos: -self.neg,
        }
    }
    /// Decays at both ends: negative rate towards +inf, positive towards -inf.
    pub fn decays(&self) -> bool {
        self.neg > 0.0 && self.pos < 0.0
    }
}

fn sat_add(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        a
    } else if b.is_infinite() {
        b
    } else {
        a + b
    }
}

pub const SUPER: ExpRates = ExpRates {
    neg: f64::INFINITY,
    pos: f64::NEG_INFINITY,
};
pub const FLAT: ExpRates = ExpRates { neg: 0.0, pos: 0.0 };

/// Orientation of a pole chain rooted at argument 0: ascending chains extend
/// into the upper half-plane, descending ones into the lower half-plane. A
/// separating contour passes below an ascending chain's root and above a
/// descending chain's root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainDir {
    Asc,
    Desc,
}

impl ChainDir {
    pub fn flip(self) -> ChainDir {
        match self {
            ChainDir::Asc => ChainDir::Desc,
            ChainDir::Desc => ChainDir::Asc,
        }
    }
}

#[derive(Debug, Clone)]
enum TupleKind {
    Constant,
    Gaussian {
        amp: [Complex64; 5],
        width: [Complex64; 5],
    },
    Phi(HbarContext),
    Reflected(Box<FaddeevTuple>),
}

/// A labelled five-tuple `f_0..f_4` of functions on the line, with
/// Fourier-side access and decay metadata.
#[derive(Debug, Clone)]
pub struct FaddeevTuple {
    kind: TupleKind,
    pub square_integrable: bool,
}

/// The constant unit tuple. Its Fourier transform is distributional, so the
/// five-term verifier rejects it; it remains usable where a consumer
/// tolerates distributional partners.
pub fn make_constant() -> FaddeevTuple {
    FaddeevTuple {
        kind: TupleKind::Constant,
        square_integrable: false,
    }
}

/// Gaussian tuple `f_j(x) = a_j exp(-b_j x^2)` with real amplitudes.
pub fn make_gaussian(a: [f64; 5], bcoef: [Complex64; 5]) -> Result<FaddeevTuple> {
    let amp = [
        Complex64::new(a[0], 0.0),
        Complex64::new(a[1], 0.0),
        Complex64::new(a[2], 0.0),
        Complex64::new(a[3], 0.0),
        Complex64::new(a[4], 0.0),
    ];
    make_gaussian_complex(amp, bcoef)
}

/// Gaussian tuple with complex amplitudes; `Re b_j > 0` keeps every member
/// square-integrable.
pub fn make_gaussian_complex(amp: [Complex64; 5], width: [Complex64; 5]) -> Result<FaddeevTuple> {
    for b in &width {
        if !(b.re > 0.0) {
            return Err(Error::ConfigError(
                "gaussian widths need positive real part".into(),
            ));
        }
    }
    Ok(FaddeevTuple {
        kind: TupleKind::Gaussian { amp, width },
        square_integrable: true,
    })
}

/// The quantum-dilogarithm tuple `f_j = Phi` for every label.
pub fn make_phi(ctx: &HbarContext) -> FaddeevTuple {
    FaddeevTuple {
        kind: TupleKind::Phi(ctx.clone()),
        // |Phi| = 1 on the real line; the transform is nevertheless an honest
        // function away from its pole lattice, with declared decay.
        square_integrable: false,
    }
}

/// Reflection `g_j(x) = f_j(-x)`; an involution.
pub fn make_reflected(t: &FaddeevTuple) -> FaddeevTuple {
    if let TupleKind::Reflected(inner) = &t.kind {
        return (**inner).clone();
    }
    FaddeevTuple {
        kind: TupleKind::Reflected(Box::new(t.clone())),
        square_integrable: t.square_integrable,
    }
}

/// Gaussian tuple solving the five-term identity.
///
/// Completing the square in the identity with `ft_j(x) = A_j exp(-B_j x^2)`
/// forces, with `S = B0 + B2 + B4 - i pi`:
///
/// ```text
/// B0 B4 = i pi S,   B1 = B0 (S - B0) / S,   B3 = B4 (S - B4) / S,
/// A1 A3 = A0 A2 A4 sqrt(pi / S),
/// ```
///
/// which has no solution with all widths real positive (the first constraint
/// has nonzero imaginary part whenever the B are real). This constructor
/// picks `B0 = B4 = 1 + 4i`, which satisfies every constraint with complex
/// widths of positive real part.
pub fn make_gaussian_solved() -> FaddeevTuple {
    let b0 = Complex64::new(1.0, 4.0);
    let b4 = b0;
    let s = b0 * b4 / (I * PI); // forced by the cross-term constraint
    let b2 = s - b0 - b4 + I * PI;
    let b1 = b0 * (s - b0) / s;
    let b3 = b4 * (s - b4) / s;
    let one = Complex64::new(1.0, 0.0);
    let a13 = (Complex64::new(PI, 0.0) / s).sqrt();
    let a1 = a13.sqrt();
    let a3 = a1;
    let big_b = [b0, b1, b2, b3, b4];
    let big_a = [one, a1, one, a3, one];
    // Pull back to the x side: ft_j = a_j sqrt(pi/b_j) exp(-pi^2 x^2 / b_j).
    let mut amp = [Complex64::new(0.0, 0.0); 5];
    let mut width = [Complex64::new(0.0, 0.0); 5];
    for j in 0..5 {
        width[j] = PI * PI / big_b[j];
        amp[j] = big_a[j] / (Complex64::new(PI, 0.0) / width[j]).sqrt();
    }
    make_gaussian_complex(amp, width).expect("solved widths have positive real part")
}

/// Residuals of the four Gaussian matching constraints for a tuple of
/// Fourier-side parameters; all near zero iff the tuple satisfies the
/// five-term identity.
pub fn gaussian_constraint_residuals(t: &FaddeevTuple) -> Result<[f64; 4]> {
    let (amp, width) = match &t.kind {
        TupleKind::Gaussian { amp, width } => (amp, width),
        _ => {
            return Err(Error::ConfigError(
                "constraint residuals are defined for gaussian tuples".into(),
            ))
        }
    };
    let big_b: Vec<Complex64> = width.iter().map(|b| PI * PI / b).collect();
    let big_a: Vec<Complex64> = amp
        .iter()
        .zip(width.iter())
        .map(|(a, b)| a * (Complex64::new(PI, 0.0) / b).sqrt())
        .collect();
    let s = big_b[0] + big_b[2] + big_b[4] - I * PI;
    let r_cross = (big_b[0] * big_b[4] - I * PI * s).norm() / (PI * s.norm());
    let r_b1 = (big_b[1] - big_b[0] * (s - big_b[0]) / s).norm() / big_b[1].norm();
    let r_b3 = (big_b[3] - big_b[4] * (s - big_b[4]) / s).norm() / big_b[3].norm();
    let lhs = big_a[1] * big_a[3];
    let rhs = big_a[0] * big_a[2] * big_a[4] * (Complex64::new(PI, 0.0) / s).sqrt();
    let r_amp = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
    Ok([r_cross, r_b1, r_b3, r_amp])
}

impl FaddeevTuple {
    fn check_label(j: usize) {
        assert!(j < 5, "tuple labels are 0..=4");
    }

    /// `f_j(w)`, analytically continued.
    pub fn f(&self, j: usize, w: Complex64) -> Result<Complex64> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Ok(Complex64::new(1.0, 0.0)),
            TupleKind::Gaussian { amp, width } => Ok(amp[j] * (-width[j] * w * w).exp()),
            TupleKind::Phi(ctx) => Ok(ctx.log_phi(w, EvalMethod::Auto, EVAL_TOL)?.exp()),
            TupleKind::Reflected(t) => t.f(j, -w),
        }
    }

    /// Analytic extension of the conjugate, `conj(f_j(conj w))`. For the
    /// quantum dilogarithm this is `1 / Phi(w)`.
    pub fn f_bar(&self, j: usize, w: Complex64) -> Result<Complex64> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Ok(Complex64::new(1.0, 0.0)),
            TupleKind::Gaussian { amp, width } => {
                Ok(amp[j].conj() * (-width[j].conj() * w * w).exp())
            }
            TupleKind::Phi(ctx) => Ok((-ctx.log_phi(w, EvalMethod::Auto, EVAL_TOL)?).exp()),
            TupleKind::Reflected(t) => t.f_bar(j, -w),
        }
    }

    /// `ft_j(w) = (F^{-1} f_j)(w)`, in closed form.
    pub fn f_tilde(&self, j: usize, w: Complex64) -> Result<Complex64> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Err(Error::DistributionalInput),
            TupleKind::Gaussian { amp, width } => {
                let b = width[j];
                Ok(amp[j] * (Complex64::new(PI, 0.0) / b).sqrt() * (-PI * PI * w * w / b).exp())
            }
            TupleKind::Phi(ctx) => {
                // (F^{-1} Phi)(w) = (F Phi)(-w)
                //                 = e^{-i pi w^2} Phi(-w + i c) zeta'.
                let c = ctx.strip_halfwidth();
                let arg = -w + I * c;
                let lp = ctx.log_phi(arg, EvalMethod::Auto, EVAL_TOL)?;
                Ok((lp - I * PI * w * w).exp() * zeta_ft(ctx))
            }
            TupleKind::Reflected(t) => t.f_tilde(j, -w),
        }
    }

    /// Analytic extension of the conjugate transform, `conj(ft_j(conj w))`.
    pub fn f_tilde_bar(&self, j: usize, w: Complex64) -> Result<Complex64> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Err(Error::DistributionalInput),
            TupleKind::Gaussian { amp, width } => {
                let b = width[j].conj();
                Ok(amp[j].conj()
                    * (Complex64::new(PI, 0.0) / b).sqrt()
                    * (-PI * PI * w * w / b).exp())
            }
            TupleKind::Phi(ctx) => {
                let c = ctx.strip_halfwidth();
                let arg = -w - I * c;
                let lp = ctx.log_phi(arg, EvalMethod::Auto, EVAL_TOL)?;
                Ok((I * PI * w * w - lp).exp() * zeta_ft(ctx).conj())
            }
            TupleKind::Reflected(t) => t.f_tilde_bar(j, -w),
        }
    }

    /// Tail exponents of `|f_j(t + i im)|`.
    pub fn rates_f(&self, j: usize, im: f64) -> ExpRates {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => FLAT,
            TupleKind::Gaussian { .. } => SUPER,
            TupleKind::Phi(_) => ExpRates {
                neg: 0.0,
                pos: -2.0 * PI * im,
            },
            TupleKind::Reflected(t) => t.rates_f(j, -im).reflected(),
        }
    }

    /// Tail exponents of `|f_bar_j(t + i im)|`.
    pub fn rates_f_bar(&self, j: usize, im: f64) -> ExpRates {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => FLAT,
            TupleKind::Gaussian { .. } => SUPER,
            TupleKind::Phi(_) => ExpRates {
                neg: 0.0,
                pos: 2.0 * PI * im,
            },
            TupleKind::Reflected(t) => t.rates_f_bar(j, -im).reflected(),
        }
    }

    /// Tail exponents of `|ft_j(t + i im)|`.
    pub fn rates_f_tilde(&self, j: usize, im: f64) -> Result<ExpRates> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Err(Error::DistributionalInput),
            TupleKind::Gaussian { .. } => Ok(SUPER),
            TupleKind::Phi(ctx) => Ok(ExpRates {
                neg: 2.0 * PI * ctx.strip_halfwidth(),
                pos: 2.0 * PI * im,
            }),
            TupleKind::Reflected(t) => Ok(t.rates_f_tilde(j, -im)?.reflected()),
        }
    }

    /// Tail exponents of `|ft_bar_j(t + i im)|`.
    pub fn rates_f_tilde_bar(&self, j: usize, im: f64) -> Result<ExpRates> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Err(Error::DistributionalInput),
            TupleKind::Gaussian { .. } => Ok(SUPER),
            TupleKind::Phi(ctx) => Ok(ExpRates {
                neg: 2.0 * PI * ctx.strip_halfwidth(),
                pos: -2.0 * PI * im,
            }),
            TupleKind::Reflected(t) => Ok(t.rates_f_tilde_bar(j, -im)?.reflected()),
        }
    }

    /// Pole-chain orientation of `ft_j` (chain rooted at argument 0), `None`
    /// for entire transforms.
    pub fn ft_chain(&self, j: usize) -> Result<Option<ChainDir>> {
        Self::check_label(j);
        match &self.kind {
            TupleKind::Constant => Err(Error::DistributionalInput),
            TupleKind::Gaussian { .. } => Ok(None),
            TupleKind::Phi(_) => Ok(Some(ChainDir::Desc)),
            TupleKind::Reflected(t) => Ok(t.ft_chain(j)?.map(ChainDir::flip)),
        }
    }

    /// Pole-chain orientation of `ft_bar_j`.
    pub fn ft_bar_chain(&self, j: usize) -> Result<Option<ChainDir>> {
        Ok(self.ft_chain(j)?.map(ChainDir::flip))
    }

    /// Whether the Fourier side exists as honest functions.
    pub fn has_function_transform(&self) -> bool {
        !matches!(self.kind, TupleKind::Constant)
    }

    /// Borrow the underlying context when the tuple is quantum-dilogarithm
    /// based (directly or via reflection).
    pub fn phi_context(&self) -> Option<&HbarContext> {
        match &self.kind {
            TupleKind::Phi(ctx) => Some(ctx),
            TupleKind::Reflected(t) => t.phi_context(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, TupleKind::Constant)
    }

    pub fn is_reflected_phi(&self) -> bool {
        match &self.kind {
            TupleKind::Reflected(t) => matches!(t.kind, TupleKind::Phi(_)),
            _ => false,
        }
    }

    pub fn is_phi(&self) -> bool {
        matches!(self.kind, TupleKind::Phi(_))
    }
}

/// A dodge plan entry: where the straight path must locally detour and to
/// which height.
fn plan_dodge(root: Complex64, dir: ChainDir, clearance: f64) -> Option<(f64, f64)> {
    match dir {
        // Contour must pass below the root.
        ChainDir::Asc => {
            if root.im > clearance {
                None
            } else {
                Some((root.re, root.im - clearance))
            }
        }
        // Contour must pass above the root.
        ChainDir::Desc => {
            if root.im < -clearance {
                None
            } else {
                Some((root.re, root.im + clearance))
            }
        }
    }
}

/// Evaluate the right-hand side of the five-term Fourier identity at `(x, y)`
/// with kernel `e^{sign * i pi z^2}`; `ft` evaluates factor `j` at a point
/// and `chain(j)` orients its pole chain.
fn five_term_rhs<F, G, R>(
    ft: F,
    chain: G,
    rates: R,
    x: f64,
    y: f64,
    sign: f64,
    tol: f64,
) -> Result<(Complex64, f64)>
where
    F: Fn(usize, Complex64) -> Result<Complex64>,
    G: Fn(usize) -> Result<Option<ChainDir>>,
    R: Fn(usize) -> Result<ExpRates>,
{
    // Integrand factors: ft4(y - z) ft2(z) ft0(x - z); pole-chain roots in z
    // sit at y, 0 and x with orientation flipped for the reflected arguments.
    let mut dodges: Vec<(f64, f64)> = Vec::new();
    let clearance = 0.08;
    let specs = [
        (Complex64::new(y, 0.0), chain(4)?.map(ChainDir::flip)),
        (Complex64::new(0.0, 0.0), chain(2)?),
        (Complex64::new(x, 0.0), chain(0)?.map(ChainDir::flip)),
    ];
    for (root, dir) in specs.iter() {
        if let Some(d) = dir {
            if let Some(dodge) = plan_dodge(*root, *d, clearance) {
                dodges.push(dodge);
            }
        }
    }
    // Merge dodges that coincide on the same side; reject pinches.
    dodges.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for d in dodges {
        if let Some(last) = merged.last_mut() {
            if (d.0 - last.0).abs() < 1e-9 {
                if (d.1 > 0.0) != (last.1 > 0.0) {
                    return Err(Error::NonConvergent(
                        "coincident poles require opposite dodges; sample is pinched".into(),
                    ));
                }
                last.1 = if d.1 > 0.0 {
                    last.1.max(d.1)
                } else {
                    last.1.min(d.1)
                };
                continue;
            }
        }
        merged.push(d);
    }

    // Tail exponents of the integrand; the quadratic kernel phases are
    // modulus-one along the real tails.
    let r4 = rates(4)?.reflected();
    let r2 = rates(2)?;
    let r0 = rates(0)?.reflected();
    let total = r4.add(r2).add(r0);
    if !total.decays() {
        return Err(Error::NonConvergent(format!(
            "five-term integrand does not decay: rates ({}, {})",
            total.neg, total.pos
        )));
    }

    let integrand = |z: Complex64| -> Complex64 {
        let v4 = ft(4, Complex64::new(y, 0.0) - z);
        let v2 = ft(2, z);
        let v0 = ft(0, Complex64::new(x, 0.0) - z);
        match (v4, v2, v0) {
            (Ok(a), Ok(b), Ok(c)) => a * b * c * (sign * I * PI * z * z).exp(),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };

    // Anchor the rays beyond every root and probe there for tail coefficients.
    let span = merged
        .iter()
        .map(|d| d.0.abs())
        .fold(x.abs().max(y.abs()), f64::max);
    let anchor = span + 2.5;
    let probe = |t: f64| integrand(Complex64::new(t, 0.0)).norm();
    let coeff_left = (probe(-anchor).max(probe(-anchor - 0.37)) * 1e3).max(1e-12);
    let coeff_right = (probe(anchor).max(probe(anchor + 0.37)) * 1e3).max(1e-12);
    let left = TailHint::new(-anchor, 0.9 * total.neg.min(1e6), coeff_left);
    let right = TailHint::new(anchor, -0.9 * total.pos.max(-1e6), coeff_right);
    let contour = Contour::dodging_line(0.0, &merged, (-anchor, anchor), left, right)?;
    let r = integrate_contour(integrand, &contour, tol)?;
    let prefactor = (-sign * 2.0 * PI * I * x * y).exp();
    Ok((prefactor * r.value, r.err_estimate))
}

/// Verify the Fourier-side five-term identity on real samples.
pub fn verify_eq50(
    t: &FaddeevTuple,
    samples: &[(f64, f64)],
    tol: f64,
) -> Result<VerificationReport> {
    verify_five_term(t, samples, tol, false)
}

/// Conjugate variant: kernel `e^{-i pi z^2}`, prefactor `e^{+2 pi i x y}`,
/// conjugated transforms. Holds whenever the plain identity holds.
pub fn verify_eq60(
    t: &FaddeevTuple,
    samples: &[(f64, f64)],
    tol: f64,
) -> Result<VerificationReport> {
    verify_five_term(t, samples, tol, true)
}

fn verify_five_term(
    t: &FaddeevTuple,
    samples: &[(f64, f64)],
    tol: f64,
    conjugated: bool,
) -> Result<VerificationReport> {
    if !t.has_function_transform() {
        return Err(Error::DistributionalInput);
    }
    let suite = if conjugated { "faddeev-eq60" } else { "faddeev-eq50" };
    let mut points = Vec::new();
    for &(x, y) in samples {
        let inputs = inputs_of(&[
            ("x", Complex64::new(x, 0.0)),
            ("y", Complex64::new(y, 0.0)),
        ]);
        let result = (|| -> Result<(Complex64, Complex64, f64)> {
            let (lhs, rhs, quad_err);
            if conjugated {
                lhs = t.f_tilde_bar(1, Complex64::new(x, 0.0))?
                    * t.f_tilde_bar(3, Complex64::new(y, 0.0))?;
                let (v, e) = five_term_rhs(
                    |j, w| t.f_tilde_bar(j, w),
                    |j| t.ft_bar_chain(j),
                    |j| t.rates_f_tilde_bar(j, 0.0),
                    x,
                    y,
                    -1.0,
                    tol * lhs.norm().max(1e-3) / 50.0,
                )?;
                rhs = v;
                quad_err = e;
            } else {
                lhs = t.f_tilde(1, Complex64::new(x, 0.0))?
                    * t.f_tilde(3, Complex64::new(y, 0.0))?;
                let (v, e) = five_term_rhs(
                    |j, w| t.f_tilde(j, w),
                    |j| t.ft_chain(j),
                    |j| t.rates_f_tilde(j, 0.0),
                    x,
                    y,
                    1.0,
                    tol * lhs.norm().max(1e-3) / 50.0,
                )?;
                rhs = v;
                quad_err = e;
            }
            Ok((lhs, rhs, quad_err))
        })();
        match result {
            Ok((lhs, rhs, quad_err)) => points.push(PointRecord::new(inputs, lhs, rhs, quad_err)),
            Err(e) => points.push(PointRecord::failed(inputs, e.to_string())),
        }
    }
    Ok(VerificationReport::from_points(suite, tol, points))
}

/// Draw eq50 sample pairs that keep the pole roots `0`, `x`, `y` separated so
/// the dodging contour can thread between them.
pub fn seeded_samples(n: usize, seed: u64) -> Vec<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = rng.gen_range(0.45..1.4) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let y = rng.gen_range(0.45..1.4) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if (x - y).abs() > 0.25 {
            out.push((x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_line, Window};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn constant_tuple_basics() {
        let t = make_constant();
        assert_eq!(t.f(2, c(17.3, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(!t.square_integrable);
        assert!(matches!(
            verify_eq50(&t, &[(0.3, 0.5)], 1e-6),
            Err(Error::DistributionalInput)
        ));
    }

    #[test]
    fn gaussian_transform_matches_quadrature() {
        let t = make_gaussian([1.3, 0.7, 1.0, 0.4, 2.0], [
            c(1.0, 0.3),
            c(0.8, 0.0),
            c(1.5, -0.4),
            c(0.6, 0.1),
            c(2.0, 0.0),
        ])
        .unwrap();
        for j in [0usize, 2, 4] {
            for &x in &[0.0, 0.45, -1.2] {
                let w = c(x, 0.0);
                let closed = t.f_tilde(j, w).unwrap();
                let quad = integrate_line(
                    |s| {
                        t.f(j, c(s, 0.0)).unwrap() * (-2.0 * PI * I * w * s).exp()
                    },
                    Window::RealLine {
                        left: TailHint::new(-4.0, 3.0, 1.0),
                        right: TailHint::new(4.0, 3.0, 1.0),
                    },
                    1e-12,
                )
                .unwrap();
                assert!(
                    rel(closed, quad.value) < 1e-9,
                    "j={j} x={x}: {closed} vs {}",
                    quad.value
                );
            }
        }
    }

    #[test]
    fn phi_tuple_transform_matches_quadrature() {
        let ctx = HbarContext::new(0.5);
        let t = make_phi(&ctx);
        // ft(w) = (F Phi)(-w); the direct-quadrature route needs Im(-w) < 0.
        let w = c(0.4, 0.12);
        let closed = t.f_tilde(0, w).unwrap();
        let quad = crate::qdilog::fourier_phi_quad(&ctx, -w, 1e-10).unwrap();
        assert!(rel(closed, quad) < 1e-8);
        assert!((t.f(3, c(0.2, 0.0)).unwrap()
            - crate::qdilog::phi_eval(&ctx, c(0.2, 0.0), EvalMethod::Auto).unwrap())
        .norm()
            < 1e-12);
    }

    #[test]
    fn reflection_is_involution() {
        let ctx = HbarContext::new(0.5);
        let t = make_phi(&ctx);
        let r2 = make_reflected(&make_reflected(&t));
        for &x in &[0.3, -0.8] {
            assert!(
                (t.f(1, c(x, 0.1)).unwrap() - r2.f(1, c(x, 0.1)).unwrap()).norm() < 1e-12
            );
        }
        let r = make_reflected(&t);
        assert!(
            (r.f(2, c(0.5, 0.0)).unwrap() - t.f(2, c(-0.5, 0.0)).unwrap()).norm() < 1e-14
        );
        assert!(
            (r.f_tilde(2, c(0.5, -0.1)).unwrap() - t.f_tilde(2, c(-0.5, 0.1)).unwrap()).norm()
                < 1e-12
        );
    }

    #[test]
    fn phi_bar_is_reciprocal() {
        let ctx = HbarContext::new(0.5);
        let t = make_phi(&ctx);
        let w = c(0.3, 0.2);
        let direct = t.f(0, w).unwrap();
        let bar = t.f_bar(0, w).unwrap();
        assert!(rel(bar, 1.0 / direct) < 1e-10);
        // On the real axis the bar really is the conjugate.
        let x = c(0.7, 0.0);
        assert!(rel(t.f_bar(0, x).unwrap(), t.f(0, x).unwrap().conj()) < 1e-10);
    }

    #[test]
    fn eq50_phi_tuple() {
        let ctx = HbarContext::new(0.5);
        let t = make_phi(&ctx);
        let rep = verify_eq50(&t, &[(0.1, -0.2), (0.7, 0.9)], 1e-6).unwrap();
        assert!(rep.pass, "max_rel_err = {} {:?}", rep.max_rel_err, rep.points);
    }

    #[test]
    fn eq50_reflected_phi_tuple() {
        let ctx = HbarContext::new(0.5);
        let t = make_reflected(&make_phi(&ctx));
        let rep = verify_eq50(&t, &[(0.1, -0.2), (-0.6, 0.8)], 1e-6).unwrap();
        assert!(rep.pass, "max_rel_err = {}", rep.max_rel_err);
    }

    #[test]
    fn eq50_solved_gaussian() {
        let t = make_gaussian_solved();
        let res = gaussian_constraint_residuals(&t).unwrap();
        for r in res {
            assert!(r < 1e-12, "constraint residuals {res:?}");
        }
        let rep = verify_eq50(&t, &[(0.2, 0.1), (-0.5, 0.8), (1.1, -0.3)], 1e-8).unwrap();
        assert!(rep.pass, "max_rel_err = {}", rep.max_rel_err);
    }

    #[test]
    fn eq50_generic_gaussian_fails_constraints() {
        // Real positive widths cannot satisfy the identity; the verifier must
        // report a finite, nonzero residual rather than an error.
        let t = make_gaussian([1.0; 5], [c(1.0, 0.0); 5]).unwrap();
        let res = gaussian_constraint_residuals(&t).unwrap();
        assert!(res[0] > 0.1, "cross-term constraint should fail: {res:?}");
        let rep = verify_eq50(&t, &[(0.3, 0.4)], 1e-8).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_rel_err > 1e-3);
    }

    #[test]
    fn eq60_holds_where_eq50_holds() {
        let ctx = HbarContext::new(0.5);
        let t = make_phi(&ctx);
        let rep = verify_eq60(&t, &[(0.1, -0.2), (0.7, 0.9)], 1e-6).unwrap();
        assert!(rep.pass, "max_rel_err = {}", rep.max_rel_err);

        let g = make_gaussian_solved();
        let rep = verify_eq60(&g, &[(0.2, 0.1)], 1e-8).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn seeded_samples_are_separated() {
        let s = seeded_samples(10, 7);
        assert_eq!(s.len(), 10);
        for (x, y) in s {
            assert!(x.abs() > 0.4 && y.abs() > 0.4 && (x - y).abs() > 0.2);
        }
    }
}
