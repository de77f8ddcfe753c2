//! Adaptive complex-valued quadrature over real windows and polyline contours.
//!
//! The core rule is the embedded Gauss(7)/Kronrod(15) pair; the reported error
//! estimate is the QUADPACK-style rescaled difference between the two rules,
//! never a guess. Infinite windows are truncated where a caller-declared
//! exponential tail bound guarantees the discarded tail is below `tol / 10`;
//! windows without a decaying bound are rejected.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Result of a quadrature: value, embedded error estimate, evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult {
            value: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            evaluations: 1,
        }
    }

    fn merge(&mut self, other: &QuadResult) {
        self.value += other.value;
        self.err_estimate += other.err_estimate;
        self.evaluations += other.evaluations;
    }
}

/// Exponential tail bound `|f(t)| <= coeff * exp(-rate * |t - from|)` valid
/// beyond `from` in the tail direction.
#[derive(Debug, Clone, Copy)]
pub struct TailHint {
    pub from: f64,
    pub rate: f64,
    pub coeff: f64,
}

impl TailHint {
    pub fn new(from: f64, rate: f64, coeff: f64) -> Self {
        TailHint { from, rate, coeff }
    }

    /// Truncation offset beyond `from` such that the remaining tail integral
    /// is below `tail_tol`.
    fn cutoff(&self, tail_tol: f64) -> Result<f64> {
        if !(self.rate > 0.0) {
            return Err(Error::NonConvergent(format!(
                "declared tail rate {} is not positive; regularize or complexify the integrand",
                self.rate
            )));
        }
        let arg = self.coeff / (self.rate * tail_tol);
        let len = if arg > 1.0 { arg.ln() / self.rate } else { 0.0 };
        Ok(len)
    }
}

/// Integration window for [`integrate_line`].
#[derive(Debug, Clone, Copy)]
pub enum Window {
    /// Finite interval `[a, b]`.
    Finite(f64, f64),
    /// The whole real line with declared tail bounds on each side.
    RealLine { left: TailHint, right: TailHint },
}

// Kronrod-15 nodes (positive half) and weights, with the embedded Gauss-7
// weights, as tabulated in QUADPACK.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One Gauss-Kronrod 15-point pass over `[a, b]`.
fn qk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |t: f64| -> Result<Complex64> {
        let v = f(t);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainError { at: t })
        }
    };

    let f_center = eval(center)?;
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = f_center;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        fv[j] = eval(center - dx)?;
        fv[14 - j] = eval(center + dx)?;
    }

    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];
    for j in 0..7 {
        let fsum = fv[j] + fv[14 - j];
        res_kronrod += fsum * WGK[j];
        res_abs += WGK[j] * (fv[j].norm() + fv[14 - j].norm());
        if j % 2 == 1 {
            res_gauss += fsum * WG[j / 2];
        }
    }
    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }

    let err = ((res_kronrod - res_gauss) * half).norm();
    let value = res_kronrod * half;
    let abserr = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    Ok((value, abserr))
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

const MAX_PANELS: usize = 40_000;

/// Globally adaptive Gauss-Kronrod integration of a complex-valued function
/// over a finite interval.
fn adaptive_finite<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(QuadResult::zero());
    }
    let mut evals = 15usize;
    let (v, e) = qk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_err = e;

    while total_err > tol && heap.len() < MAX_PANELS {
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot refine further.
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk15(f, worst.a, mid)?;
        let (v2, e2) = qk15(f, mid, worst.b)?;
        evals += 30;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }

    let value = heap
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    if total_err > tol && heap.len() >= MAX_PANELS {
        return Err(Error::NonConvergent(format!(
            "error estimate {:.3e} stalled above tol {:.3e} after {} panels",
            total_err,
            tol,
            heap.len()
        )));
    }
    Ok(QuadResult {
        value,
        err_estimate: total_err,
        evaluations: evals,
    })
}

/// Integrate a complex-valued function of one real variable.
///
/// For [`Window::RealLine`] the tails are truncated where the declared decay
/// bound keeps the discarded mass below `tol / 10`; the truncation bound is
/// folded into the reported error estimate.
pub fn integrate_line<F>(f: F, window: Window, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    assert!(tol > 0.0, "tolerance must be positive");
    match window {
        Window::Finite(a, b) => {
            if a == b {
                return Ok(QuadResult::zero());
            }
            adaptive_finite(&f, a, b, tol)
        }
        Window::RealLine { left, right } => {
            let tail_tol = tol / 10.0;
            let lo = left.from - left.cutoff(tail_tol)?;
            let hi = right.from + right.cutoff(tail_tol)?;
            if lo >= hi {
                return Err(Error::NonConvergent(
                    "tail hints leave an empty core window".into(),
                ));
            }
            let mut res = adaptive_finite(&f, lo, hi, tol)?;
            res.err_estimate += 2.0 * tail_tol;
            Ok(res)
        }
    }
}

/// A ray to infinity: direction angle plus a decay bound along arclength.
/// `decay.from` is ignored here; `decay.coeff` bounds |f| at the ray origin.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub angle: f64,
    pub decay: TailHint,
}

/// An oriented polyline contour, optionally extended to infinity at either
/// end by rays with declared decay.
#[derive(Debug, Clone)]
pub struct Contour {
    pub vertices: Vec<Complex64>,
    /// Incoming ray (traversed from infinity towards `vertices[0]`).
    pub head: Option<Ray>,
    /// Outgoing ray (traversed from the last vertex towards infinity).
    pub tail: Option<Ray>,
}

impl Contour {
    /// Finite polyline through the given vertices.
    pub fn polyline(vertices: Vec<Complex64>) -> Self {
        assert!(!vertices.is_empty(), "contour needs at least one vertex");
        Contour {
            vertices,
            head: None,
            tail: None,
        }
    }

    /// Horizontal line `Re z in R, Im z = offset` with per-side decay bounds.
    pub fn horizontal_line(offset: f64, left: TailHint, right: TailHint) -> Self {
        Contour {
            vertices: vec![Complex64::new(0.0, offset)],
            head: Some(Ray {
                angle: std::f64::consts::PI,
                decay: left,
            }),
            tail: Some(Ray {
                angle: 0.0,
                decay: right,
            }),
        }
    }

    fn segment_count(&self) -> usize {
        let finite = self.vertices.len().saturating_sub(1);
        finite + usize::from(self.head.is_some()) + usize::from(self.tail.is_some())
    }

    /// A horizontal line locally deformed to pass clear of poles.
    ///
    /// Each dodge `(re, height)` asks the contour to sit at imaginary part
    /// `height` when crossing `Re z = re`, returning to `base_im` in between.
    /// Dodge widths shrink near conflicting neighbours so that opposite-side
    /// dodges thread between close pole pairs.
    pub fn dodging_line(
        base_im: f64,
        dodges: &[(f64, f64)],
        anchors: (f64, f64),
        left: TailHint,
        right: TailHint,
    ) -> Result<Self> {
        let mut ds: Vec<(f64, f64)> = dodges.to_vec();
        ds.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite dodge positions"));
        let mut vertices = vec![Complex64::new(anchors.0, base_im)];
        for (i, &(re, height)) in ds.iter().enumerate() {
            let mut w: f64 = 0.35;
            if i > 0 {
                let gap = re - ds[i - 1].0;
                if gap <= 1e-9 {
                    return Err(Error::NonConvergent(format!(
                        "pole dodges at Re z = {re} coincide; contour is pinched"
                    )));
                }
                w = w.min(0.45 * gap);
            }
            if i + 1 < ds.len() {
                let gap = ds[i + 1].0 - re;
                w = w.min(0.45 * gap);
            }
            vertices.push(Complex64::new(re - w, base_im));
            vertices.push(Complex64::new(re - 0.4 * w, height));
            vertices.push(Complex64::new(re + 0.4 * w, height));
            vertices.push(Complex64::new(re + w, base_im));
        }
        vertices.push(Complex64::new(anchors.1, base_im));
        if anchors.0 > ds.first().map_or(anchors.1, |d| d.0 - 0.5)
            || anchors.1 < ds.last().map_or(anchors.0, |d| d.0 + 0.5)
        {
            return Err(Error::NonConvergent(
                "contour anchors do not enclose the pole dodges".into(),
            ));
        }
        Ok(Contour {
            vertices,
            head: Some(Ray {
                angle: std::f64::consts::PI,
                decay: left,
            }),
            tail: Some(Ray {
                angle: 0.0,
                decay: right,
            }),
        })
    }
}

/// Integrate `f` along a contour. Finite segments are parameterized linearly;
/// infinite rays are truncated by their declared decay bounds.
pub fn integrate_contour<F>(f: F, contour: &Contour, tol: f64) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Complex64,
{
    assert!(tol > 0.0, "tolerance must be positive");
    let pieces = contour.segment_count().max(1);
    let piece_tol = tol / pieces as f64;
    let mut total = QuadResult {
        value: Complex64::new(0.0, 0.0),
        err_estimate: 0.0,
        evaluations: 0,
    };

    if let Some(ray) = &contour.head {
        let v0 = contour.vertices[0];
        let dir = Complex64::from_polar(1.0, ray.angle);
        let len = ray.decay.cutoff(piece_tol / 10.0)?;
        // Traverse from infinity inwards: z(s) = v0 + dir * (len - s), s in [0, len].
        let g = |s: f64| f(v0 + dir * (len - s)) * (-dir);
        let mut r = adaptive_finite(&g, 0.0, len, piece_tol)?;
        r.err_estimate += piece_tol / 10.0;
        total.merge(&r);
    }

    for w in contour.vertices.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        let d = z1 - z0;
        if d.norm() == 0.0 {
            continue;
        }
        let g = |s: f64| f(z0 + d * s) * d;
        let r = adaptive_finite(&g, 0.0, 1.0, piece_tol)?;
        total.merge(&r);
    }

    if let Some(ray) = &contour.tail {
        let v0 = *contour.vertices.last().expect("non-empty vertices");
        let dir = Complex64::from_polar(1.0, ray.angle);
        let len = ray.decay.cutoff(piece_tol / 10.0)?;
        let g = |s: f64| f(v0 + dir * s) * dir;
        let mut r = adaptive_finite(&g, 0.0, len, piece_tol)?;
        r.err_estimate += piece_tol / 10.0;
        total.merge(&r);
    }

    total.evaluations = total.evaluations.max(1);
    Ok(total)
}

/// Iterated two-dimensional integration: the outer integral runs over
/// `outer`, and for each outer point the inner integral runs over `inner`.
/// Inner error estimates compose additively into the reported estimate.
pub fn integrate_2d<F>(f: F, outer: Window, inner: Window, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    assert!(tol > 0.0, "tolerance must be positive");
    let outer_measure = match outer {
        Window::Finite(a, b) => (b - a).abs(),
        Window::RealLine { left, right } => {
            let tail_tol = tol / 10.0;
            (right.from + right.cutoff(tail_tol)? - (left.from - left.cutoff(tail_tol)?)).abs()
        }
    };
    let inner_tol = (tol / (2.0 * outer_measure.max(1.0))).max(1e-14);

    use std::cell::Cell;
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let g = |x: f64| -> Complex64 {
        match integrate_line(|y| f(x, y), inner, inner_tol) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.err_estimate));
                inner_evals.set(inner_evals.get() + r.evaluations);
                r.value
            }
            // Poison the outer integrand so the failure surfaces as DomainError.
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let outer_res = integrate_line(g, outer, tol / 2.0)?;
    Ok(QuadResult {
        value: outer_res.value,
        err_estimate: outer_res.err_estimate + inner_err.get() * outer_measure,
        evaluations: inner_evals.get(),
    })
}
