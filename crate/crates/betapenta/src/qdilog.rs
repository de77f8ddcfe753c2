//! Faddeev's quantum dilogarithm and derived functions.
//!
//! Two independent representations back each other: the contour integral
//!
//! ```text
//! Phi(x) = exp( int_{R+ie} e^{-2ixz} / (4 sinh(zb) sinh(z/b) z) dz )
//! ```
//!
//! absolutely convergent for |Im x| < 1/(2 sqrt(hbar)), and (for hbar > 1/4,
//! where |q| < 1) the ratio of q-Pochhammer products
//!
//! ```text
//! Phi(x) = (-q e^{2 pi b x}; q^2)_inf / (-qb e^{2 pi x / b}; qb^2)_inf,
//! q = e^{i pi b^2},  qb = e^{-i pi / b^2},
//! ```
//!
//! which continues Phi to a meromorphic function of the plane. Everything is
//! computed through logarithms so that large quadratic phases never overflow.

use crate::error::{Error, Result};
use crate::quad::{integrate_line, TailHint, Window};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default absolute tolerance for internal quadratures and product tails.
pub const EVAL_TOL: f64 = 1e-12;

/// Which representation to evaluate `Phi` by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Integral,
    Product,
    /// Product when `hbar > 1/4`, otherwise the integral, with the
    /// functional-equation ladder outside the strip.
    Auto,
}

/// All `hbar`-dependent data shared by `Phi` evaluations.
#[derive(Debug, Clone)]
pub struct HbarContext {
    hbar: f64,
    b: Complex64,
    q: Complex64,
    qbar: Complex64,
    sqrt_hbar: f64,
    strip_halfwidth: f64,
    contour_offset: f64,
    log_phi0: Complex64,
}

impl HbarContext {
    /// Context with the default contour offset
    /// `eps = min(1/10, |Im of nearest nonzero integrand pole| / 4)`.
    pub fn new(hbar: f64) -> Self {
        let b = admissible_root(hbar);
        let eps = default_offset(b);
        Self::assemble(hbar, b, eps)
    }

    /// Context with an explicit contour offset.
    pub fn with_offset(hbar: f64, contour_offset: f64) -> Self {
        let b = admissible_root(hbar);
        Self::assemble(hbar, b, contour_offset)
    }

    /// Context with an explicit root of `(b + 1/b)^{-2} = hbar`. The
    /// evaluated function is invariant under `b <-> 1/b`; this constructor
    /// exists so that invariance can be checked.
    pub fn with_root(hbar: f64, b: Complex64) -> Result<Self> {
        let s = b + 1.0 / b;
        let back = 1.0 / (s * s);
        if (back - Complex64::new(hbar, 0.0)).norm() > 1e-12 * hbar.max(1.0) {
            return Err(Error::ConfigError(format!(
                "(b + 1/b)^-2 = {back} does not match hbar = {hbar}"
            )));
        }
        Ok(Self::assemble(hbar, b, default_offset(b)))
    }

    fn assemble(hbar: f64, b: Complex64, contour_offset: f64) -> Self {
        assert!(hbar > 0.0, "hbar must be positive");
        assert!(contour_offset > 0.0, "contour offset must be positive");
        let q = (I * PI * b * b).exp();
        let qbar = (-I * PI / (b * b)).exp();
        let sqrt_hbar = hbar.sqrt();
        let mut ctx = HbarContext {
            hbar,
            b,
            q,
            qbar,
            sqrt_hbar,
            strip_halfwidth: 0.5 / sqrt_hbar,
            contour_offset,
            log_phi0: Complex64::new(0.0, 0.0),
        };
        ctx.log_phi0 = ctx
            .log_phi_integral(Complex64::new(0.0, 0.0), EVAL_TOL)
            .expect("x = 0 lies inside the strip for every hbar > 0");
        ctx
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn q(&self) -> Complex64 {
        self.q
    }
    pub fn qbar(&self) -> Complex64 {
        self.qbar
    }
    pub fn sqrt_hbar(&self) -> f64 {
        self.sqrt_hbar
    }
    /// Half-width `1/(2 sqrt(hbar))` of the analyticity strip of the integral
    /// representation; also the imaginary part of the first pole of `Phi`.
    pub fn strip_halfwidth(&self) -> f64 {
        self.strip_halfwidth
    }
    pub fn contour_offset(&self) -> f64 {
        self.contour_offset
    }
    /// `log Phi(0)`, pinned by direct evaluation of the contour integral.
    pub fn log_phi0(&self) -> Complex64 {
        self.log_phi0
    }
    pub fn phi0(&self) -> Complex64 {
        self.log_phi0.exp()
    }

    /// log of the integral representation; valid for |Im x| strictly inside
    /// the strip (a small guard band keeps truncation lengths finite).
    pub fn log_phi_integral(&self, x: Complex64, tol: f64) -> Result<Complex64> {
        let inv_sqrt_hbar = 1.0 / self.sqrt_hbar;
        let rate_right = inv_sqrt_hbar - 2.0 * x.im;
        let rate_left = inv_sqrt_hbar + 2.0 * x.im;
        let floor = 0.02 * inv_sqrt_hbar;
        if rate_right <= floor || rate_left <= floor {
            return Err(Error::OutsideStrip {
                im: x.im.abs(),
                halfwidth: self.strip_halfwidth,
            });
        }
        let eps = self.contour_offset;
        let b = self.b;
        let rmin = b.re.min((1.0 / b).re);
        let from = (3.0f64).max(2.0 / rmin);
        let denom = {
            let a = (from * rmin - eps).max(0.1);
            (1.0 - (-2.0 * a).exp()).powi(2) * from
        };
        let coeff = (2.0 * (x.re.abs() * eps + eps)).exp() / denom;
        // The integrand peaks like eps^-3 at the origin, so the roundoff floor
        // of the error estimate scales like eps^-2; do not demand less.
        let tol = tol.max(5e-14 * (2.0 * x.re.abs() * eps).exp() / (eps * eps));

        let integrand = move |t: f64| {
            let z = Complex64::new(t, eps);
            let num = (-2.0 * I * x * z).exp();
            let den = 4.0 * (z * b).sinh() * (z / b).sinh() * z;
            num / den
        };
        let window = Window::RealLine {
            left: TailHint::new(-from, rate_left, coeff),
            right: TailHint::new(from, rate_right, coeff),
        };
        let r = integrate_line(integrand, window, tol)?;
        Ok(r.value)
    }

    /// log of the product representation (hbar > 1/4). The branch is the sum
    /// of principal factor logarithms; exponentiating recovers `Phi` exactly.
    pub fn log_phi_product(&self, x: Complex64, tol: f64) -> Result<Complex64> {
        if self.hbar <= 0.25 {
            return Err(Error::ConfigError(
                "product representation requires hbar > 1/4 (arg b > 0)".into(),
            ));
        }
        let num_head = -self.q * (2.0 * PI * self.b * x).exp();
        let den_head = -self.qbar * (2.0 * PI * x / self.b).exp();
        let num = log_pochhammer_inf(num_head, self.q * self.q, tol)?;
        let den = log_pochhammer_inf(den_head, self.qbar * self.qbar, tol)?;
        Ok(num - den)
    }

    /// log Phi by the requested method; `Auto` uses the product wherever it
    /// is legal and otherwise the integral, ladder-extended beyond the strip.
    pub fn log_phi(&self, x: Complex64, method: EvalMethod, tol: f64) -> Result<Complex64> {
        match method {
            EvalMethod::Integral => self.log_phi_integral(x, tol),
            EvalMethod::Product => self.log_phi_product(x, tol),
            EvalMethod::Auto => {
                if self.hbar > 0.25 {
                    self.log_phi_product(x, tol)
                } else {
                    self.log_phi_ladder(x, tol).map(|(v, _)| v)
                }
            }
        }
    }

    /// Integral-representation evaluation extended outside the strip by the
    /// functional equations used as ladder relations. Returns the value and
    /// the number of ladder steps taken.
    pub fn log_phi_ladder(&self, x: Complex64, tol: f64) -> Result<(Complex64, usize)> {
        let c = self.strip_halfwidth;
        let safe = 0.9 * c;
        if x.im.abs() < safe {
            return Ok((self.log_phi_integral(x, tol)?, 0));
        }
        // Real-root case: both b and 1/b are real; step with the larger one.
        let step = self.b.re.max((1.0 / self.b).re);
        if step <= 0.0 || self.b.im.abs() > 1e-12 {
            return Err(Error::OutsideStrip {
                im: x.im.abs(),
                halfwidth: c,
            });
        }
        let beta = Complex64::new(step, 0.0);
        let mut v = x;
        let mut log_corr = Complex64::new(0.0, 0.0);
        let mut steps = 0usize;
        const MAX_STEPS: usize = 256;
        while v.im >= safe {
            // Phi(v) = Phi(v - i beta) / (1 + e^{2 pi beta (v - i beta / 2)})
            log_corr -= (Complex64::new(1.0, 0.0)
                + (2.0 * PI * beta * (v - I * beta / 2.0)).exp())
            .ln();
            v -= I * beta;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergent("ladder did not reach the strip".into()));
            }
        }
        while v.im <= -safe {
            // Phi(v) = (1 + e^{2 pi beta (v + i beta / 2)}) Phi(v + i beta)
            log_corr += (Complex64::new(1.0, 0.0)
                + (2.0 * PI * beta * (v + I * beta / 2.0)).exp())
            .ln();
            v += I * beta;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergent("ladder did not reach the strip".into()));
            }
        }
        Ok((self.log_phi_integral(v, tol)? + log_corr, steps))
    }

    /// Distance from `w` to the pole lattice
    /// `{ i/(2 sqrt hbar) + i m b + i n / b : m, n >= 0 }`.
    pub fn pole_distance(&self, w: Complex64) -> f64 {
        let base = I * (self.b + 1.0 / self.b) / 2.0;
        let sb = I * self.b;
        let sbi = I / self.b;
        let reach = w.norm() + base.norm() + 2.0;
        let k_m = ((reach / sb.norm()).ceil() as usize).min(200);
        let k_n = ((reach / sbi.norm()).ceil() as usize).min(200);
        let mut best = f64::INFINITY;
        for m in 0..=k_m {
            for n in 0..=k_n {
                let p = base + sb * m as f64 + sbi * n as f64;
                best = best.min((w - p).norm());
            }
        }
        best
    }

    /// Distance from `w` to the zero lattice (the reflected pole lattice).
    pub fn zero_distance(&self, w: Complex64) -> f64 {
        self.pole_distance(-w)
    }
}

fn admissible_root(hbar: f64) -> Complex64 {
    assert!(hbar > 0.0, "hbar must be positive");
    let s = 1.0 / hbar.sqrt(); // b + 1/b
    if hbar > 0.25 {
        // Unit-circle root with 0 < arg b < pi/2.
        let theta = (s / 2.0).acos();
        Complex64::from_polar(1.0, theta)
    } else {
        // Both roots are real positive; take |b| <= 1 (the function is
        // symmetric under b <-> 1/b, so the choice is observationally inert).
        let b = (s - (s * s - 4.0).sqrt()) / 2.0;
        Complex64::new(b, 0.0)
    }
}

fn default_offset(b: Complex64) -> f64 {
    let nearest_pole_im = PI * b.re.min((1.0 / b).re);
    (0.1f64).min(nearest_pole_im / 4.0)
}

/// Sum of principal logarithms of the factors of `(x; q)_inf`, truncated when
/// `|x q^n| < tol (1 - |q|)`, which bounds the neglected log-tail by `tol`.
pub fn log_pochhammer_inf(x: Complex64, q: Complex64, tol: f64) -> Result<Complex64> {
    let qn = q.norm();
    if qn >= 1.0 {
        return Err(Error::DivergentParameter(qn));
    }
    let cutoff = tol * (1.0 - qn);
    let mut term = x;
    let mut sum = Complex64::new(0.0, 0.0);
    loop {
        let factor = Complex64::new(1.0, 0.0) - term;
        let fnorm = factor.norm();
        if fnorm < 1e-250 {
            return Err(Error::PoleHit { dist: fnorm });
        }
        sum += factor.ln();
        term *= q;
        if term.norm() < cutoff {
            break;
        }
    }
    Ok(sum)
}

/// The infinite product `(x; q)_inf` for `|q| < 1`.
pub fn pochhammer_inf(x: Complex64, q: Complex64, tol: f64) -> Result<Complex64> {
    if q.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0) - x);
    }
    match log_pochhammer_inf(x, q, tol) {
        Ok(log) => Ok(log.exp()),
        // A vanishing factor is a legitimate zero of the product.
        Err(Error::PoleHit { .. }) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Evaluate `Phi_hbar(x)` by the requested representation.
pub fn phi_eval(ctx: &HbarContext, x: Complex64, method: EvalMethod) -> Result<Complex64> {
    Ok(ctx.log_phi(x, method, EVAL_TOL)?.exp())
}

/// `Psi(x) = Phi(x) / Phi(0) * exp(-i pi x^2 / 2)`, the unit-normalized
/// Gaussian-damped variant used by the closed-form pentagon solutions.
pub fn psi_eval(ctx: &HbarContext, x: Complex64) -> Result<Complex64> {
    Ok(log_psi(ctx, x)?.exp())
}

/// log Psi, safe against overflow for large quadratic phases.
pub fn log_psi(ctx: &HbarContext, x: Complex64) -> Result<Complex64> {
    let lp = ctx.log_phi(x, EvalMethod::Auto, EVAL_TOL)?;
    Ok(lp - ctx.log_phi0() - I * PI * x * x / 2.0)
}

/// Phase constant `zeta' = exp(i pi (1 + 1/hbar) / 12)` appearing in the
/// closed form of the Fourier transform of `Phi`.
pub fn zeta_ft(ctx: &HbarContext) -> Complex64 {
    (I * PI * (1.0 + 1.0 / ctx.hbar()) / 12.0).exp()
}

/// The constant in the inversion relation
/// `Phi(x) Phi(-x) = exp(i pi x^2) * inversion_constant(hbar)`,
/// equal to `Phi(0)^2`.
///
/// Both defining representations pin it to `exp(-i pi (2 - 1/hbar) / 12)`:
/// the residue of the contour integrand at the origin gives
/// `log Phi(0) = i pi (b^2 + b^-2) / 24` with `b^2 + b^-2 = 1/hbar - 2`, and
/// at `hbar = 1/2` the product representation gives `Phi(0) = 1` directly
/// (`q = qbar` there). Note the sign of the `1/hbar` term: the constant is
/// `exp(-i pi (2 - 1/hbar) / 12)`, not `exp(-i pi (2 + 1/hbar) / 12)`.
pub fn inversion_constant(hbar: f64) -> Complex64 {
    (-I * PI * (2.0 - 1.0 / hbar) / 12.0).exp()
}

/// Closed form of `(F Phi)(y) = int e^{2 pi i y t} Phi(t) dt`:
/// `exp(-i pi y^2) Phi(y + i/(2 sqrt hbar)) zeta'`, as a boundary value;
/// poles sit on the lattice `y in { i m b + i n / b }`.
pub fn fourier_phi_closed(ctx: &HbarContext, y: Complex64) -> Result<Complex64> {
    let c = ctx.strip_halfwidth();
    let w = y + I * c;
    let dist = ctx.pole_distance(w);
    if dist < 1e-8 {
        return Err(Error::PoleHit { dist });
    }
    let lp = ctx.log_phi(w, EvalMethod::Auto, EVAL_TOL)?;
    Ok((lp - I * PI * y * y).exp() * zeta_ft(ctx))
}

/// Direct quadrature of `(F Phi)(y)` for `Im y < 0`.
///
/// The integrand tends to 1 at `t -> -inf` and to a pure Gaussian phase at
/// `t -> +inf`, so the transform is split into three absolutely convergent
/// pieces: the left tail of `Phi - 1`, the exact character integral of the
/// constant, and a right piece whose tail is rotated by `pi/4` into the
/// decaying sector.
pub fn fourier_phi_quad(ctx: &HbarContext, y: Complex64, tol: f64) -> Result<Complex64> {
    if y.im >= 0.0 {
        return Err(Error::NonConvergent(
            "direct transform needs Im y < 0; use the closed form elsewhere".into(),
        ));
    }
    let char_eval = |t: Complex64| (2.0 * PI * I * y * t).exp();

    // Left piece: (Phi(t) - 1) e^{2 pi i y t} over (-inf, 0].
    let b = ctx.b();
    let rmin = b.re.min((1.0 / b).re);
    let left_rate = 2.0 * PI * rmin - 2.0 * PI * y.im; // Im y < 0 strengthens decay
    let left = {
        let f = |t: f64| {
            let z = Complex64::new(t, 0.0);
            let phi = ctx
                .log_phi(z, EvalMethod::Auto, EVAL_TOL)
                .map(|l| l.exp())
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            (phi - 1.0) * char_eval(z)
        };
        let cut = (2.0f64).max((4.0 / left_rate) * (1.0 / tol).ln());
        integrate_line(f, Window::Finite(-cut, 0.0), tol / 4.0)?
    };

    // Exact character integral of the constant over (-inf, 0].
    let const_piece = 1.0 / (2.0 * PI * I * y);

    // Right piece on [0, t0], then a pi/4 ray where the Gaussian phase decays.
    let t0 = 1.0;
    let straight = {
        let f = |t: f64| {
            let z = Complex64::new(t, 0.0);
            ctx.log_phi(z, EvalMethod::Auto, EVAL_TOL)
                .map(|l| (l + 2.0 * PI * I * y * z).exp())
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        integrate_line(f, Window::Finite(0.0, t0), tol / 4.0)?
    };
    let dir = Complex64::from_polar(1.0, PI / 4.0);
    let k = 2.0 * PI * (y.im.abs() + y.re.abs()) / std::f64::consts::SQRT_2 + 0.5;
    let s0 = (2.0f64).max(k / PI);
    let ray_len = {
        let rate = 2.0 * PI * (1.0 / std::f64::consts::SQRT_2 + s0 / 2.0) - k;
        s0 + ((1.0 / tol).ln() / rate).max(1.0) + 4.0
    };
    let ray = {
        let f = |s: f64| {
            let z = Complex64::new(t0, 0.0) + dir * s;
            ctx.log_phi(z, EvalMethod::Auto, EVAL_TOL)
                .map(|l| (l + 2.0 * PI * I * y * z).exp() * dir)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        integrate_line(f, Window::Finite(0.0, ray_len), tol / 4.0)?
    };

    Ok(left.value + const_piece + straight.value + ray.value)
}
