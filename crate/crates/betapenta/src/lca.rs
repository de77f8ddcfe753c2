//! Locally compact abelian groups with explicit Haar normalization:
//! Pontryagin duals, characters, Haar integration, and the Fourier transform
//! of pentagon families (exact double DFT over finite cyclic groups).
//!
//! Four kinds cover everything the identities are exercised on: the reals,
//! finite cyclic groups (the exact oracle), the integers, and the circle.
//! Dual measure bookkeeping is explicit so that Fourier inversion and
//! Plancherel hold on the nose.

use crate::error::{Error, Result};
use crate::pentagon::{CyclicFamily, PentagonFamily};
use crate::quad::{integrate_line, TailHint, Window};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Reals,
    Cyclic(u64),
    Integers,
    Circle,
}

/// A group together with a Haar measure: `measure_scale` multiplies Lebesgue
/// measure (Reals), the counting measure (Cyclic, Integers), or the unit-mass
/// measure on `[0, 1)` (Circle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Group {
    pub kind: GroupKind,
    pub measure_scale: f64,
}

impl Group {
    pub fn reals() -> Self {
        Group {
            kind: GroupKind::Reals,
            measure_scale: 1.0,
        }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ConfigError("cyclic group needs N >= 1".into()));
        }
        Ok(Group {
            kind: GroupKind::Cyclic(n),
            measure_scale: 1.0,
        })
    }

    pub fn integers() -> Self {
        Group {
            kind: GroupKind::Integers,
            measure_scale: 1.0,
        }
    }

    pub fn circle() -> Self {
        Group {
            kind: GroupKind::Circle,
            measure_scale: 1.0,
        }
    }

    pub fn with_scale(mut self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::ConfigError("measure scale must be positive".into()));
        }
        self.measure_scale = s;
        Ok(self)
    }

    /// The Pontryagin dual with the Plancherel-consistent dual measure.
    pub fn dual(&self) -> Group {
        let s = self.measure_scale;
        match self.kind {
            GroupKind::Reals => Group {
                kind: GroupKind::Reals,
                measure_scale: 1.0 / s,
            },
            GroupKind::Cyclic(n) => Group {
                kind: GroupKind::Cyclic(n),
                measure_scale: 1.0 / (n as f64 * s),
            },
            GroupKind::Integers => Group {
                kind: GroupKind::Circle,
                measure_scale: 1.0 / s,
            },
            GroupKind::Circle => Group {
                kind: GroupKind::Integers,
                measure_scale: 1.0 / s,
            },
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Reals => GroupElement::Real(0.0),
            GroupKind::Cyclic(n) => GroupElement::Cyclic { n, v: 0 },
            GroupKind::Integers => GroupElement::Integer(0),
            GroupKind::Circle => GroupElement::Circle(0.0),
        }
    }

    /// Parse the CLI group spec: `r`, `zn:<N>`, `z`, `t`, with an optional
    /// trailing `:scale=<s>`.
    pub fn parse(spec: &str) -> Result<Group> {
        let mut parts = spec.split(':').peekable();
        let head = parts
            .next()
            .ok_or_else(|| Error::ConfigError("empty group spec".into()))?;
        let mut group = match head {
            "r" => Group::reals(),
            "z" => Group::integers(),
            "t" => Group::circle(),
            "zn" => {
                let n: u64 = parts
                    .next()
                    .ok_or_else(|| Error::ConfigError("zn:<N> needs N".into()))?
                    .parse()
                    .map_err(|_| Error::ConfigError(format!("bad cyclic order in {spec:?}")))?;
                Group::cyclic(n)?
            }
            other => {
                return Err(Error::ConfigError(format!(
                    "unknown group {other:?}; expected r, zn:<N>, z or t"
                )))
            }
        };
        for part in parts {
            if let Some(s) = part.strip_prefix("scale=") {
                let scale: f64 = s
                    .parse()
                    .map_err(|_| Error::ConfigError(format!("bad scale in {spec:?}")))?;
                group = group.with_scale(scale)?;
            } else {
                return Err(Error::ConfigError(format!(
                    "unexpected group spec component {part:?}"
                )));
            }
        }
        Ok(group)
    }
}

/// A group element, tagged by kind. Circle values are reduced mod 1 and
/// cyclic values mod N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    Real(f64),
    Cyclic { n: u64, v: u64 },
    Integer(i64),
    Circle(f64),
}

impl GroupElement {
    pub fn cyclic(n: u64, v: i64) -> Self {
        let m = n as i64;
        GroupElement::Cyclic {
            n,
            v: v.rem_euclid(m) as u64,
        }
    }

    pub fn circle(v: f64) -> Self {
        GroupElement::Circle(v.rem_euclid(1.0))
    }

    pub fn op(self, other: Self) -> Self {
        match (self, other) {
            (GroupElement::Real(a), GroupElement::Real(b)) => GroupElement::Real(a + b),
            (GroupElement::Cyclic { n, v: a }, GroupElement::Cyclic { n: m, v: b }) => {
                assert_eq!(n, m, "cyclic orders must match");
                GroupElement::Cyclic { n, v: (a + b) % n }
            }
            (GroupElement::Integer(a), GroupElement::Integer(b)) => GroupElement::Integer(a + b),
            (GroupElement::Circle(a), GroupElement::Circle(b)) => GroupElement::circle(a + b),
            _ => panic!("group elements of different kinds"),
        }
    }

    pub fn inv(self) -> Self {
        match self {
            GroupElement::Real(a) => GroupElement::Real(-a),
            GroupElement::Cyclic { n, v } => GroupElement::Cyclic {
                n,
                v: if v == 0 { 0 } else { n - v },
            },
            GroupElement::Integer(a) => GroupElement::Integer(-a),
            GroupElement::Circle(a) => GroupElement::circle(-a),
        }
    }
}

/// A character of `group`, stored by its dual-group parameter so that
/// equality and composition stay decidable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Character {
    pub group: Group,
    pub param: GroupElement,
}

impl Character {
    pub fn new(group: Group, param: GroupElement) -> Self {
        Character { group, param }
    }

    pub fn eval(&self, x: GroupElement) -> Complex64 {
        let two_pi = 2.0 * PI;
        let phase = match (self.param, x) {
            (GroupElement::Real(t), GroupElement::Real(v)) => two_pi * t * v,
            (GroupElement::Cyclic { n, v: k }, GroupElement::Cyclic { n: m, v }) => {
                assert_eq!(n, m, "character/argument group mismatch");
                two_pi * (k as f64) * (v as f64) / (n as f64)
            }
            (GroupElement::Circle(theta), GroupElement::Integer(m)) => two_pi * theta * m as f64,
            (GroupElement::Integer(k), GroupElement::Circle(theta)) => two_pi * theta * k as f64,
            _ => panic!("character parameter does not match argument kind"),
        };
        Complex64::from_polar(1.0, phase)
    }
}

/// Decay information for Haar integration over non-compact groups.
#[derive(Debug, Clone, Copy)]
pub enum IntegrandHints {
    /// Compact group (Cyclic, Circle): nothing needed.
    None,
    /// Reals: exponential tail bounds on each side.
    RealTails { left: TailHint, right: TailHint },
    /// Integers: `|f(m)| <= coeff * exp(-rate * |m|)` beyond `|m| > from`.
    IntegerTail { from: u64, rate: f64, coeff: f64 },
}

/// Integrate `f` against the group's Haar measure.
pub fn haar_integrate<F>(f: F, g: &Group, hints: &IntegrandHints, tol: f64) -> Result<Complex64>
where
    F: Fn(GroupElement) -> Complex64,
{
    let s = g.measure_scale;
    match g.kind {
        GroupKind::Cyclic(n) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for v in 0..n {
                acc += f(GroupElement::Cyclic { n, v });
            }
            Ok(acc * s)
        }
        GroupKind::Circle => {
            let r = integrate_line(
                |t| f(GroupElement::Circle(t)),
                Window::Finite(0.0, 1.0),
                tol,
            )?;
            Ok(r.value * s)
        }
        GroupKind::Reals => match hints {
            IntegrandHints::RealTails { left, right } => {
                let r = integrate_line(
                    |t| f(GroupElement::Real(t)),
                    Window::RealLine {
                        left: *left,
                        right: *right,
                    },
                    tol,
                )?;
                Ok(r.value * s)
            }
            _ => Err(Error::NonConvergent(
                "integration over the reals needs decay hints".into(),
            )),
        },
        GroupKind::Integers => match hints {
            IntegrandHints::IntegerTail { from, rate, coeff } => {
                if !(*rate > 0.0) {
                    return Err(Error::NonConvergent(
                        "integer-sum tail rate must be positive".into(),
                    ));
                }
                let extra = ((coeff / (tol * (1.0 - (-rate).exp()))).ln() / rate).max(0.0);
                let m_max = *from as i64 + extra.ceil() as i64 + 1;
                let mut acc = Complex64::new(0.0, 0.0);
                for m in -m_max..=m_max {
                    acc += f(GroupElement::Integer(m));
                }
                Ok(acc * s)
            }
            _ => Err(Error::NonConvergent(
                "summation over the integers needs a tail bound".into(),
            )),
        },
    }
}

/// Fourier transform of a pentagon family, `phi_hat_i(xi, eta) =
/// int_{A^2} xi(y) eta(x)^{-1} phi_i(x, y) dx dy`, landing over the dual
/// group. Exact (a double DFT) over cyclic groups; real families are only
/// transformable when declared integrable, which none of the built-in ones
/// are.
pub fn fourier_family(fam: &PentagonFamily) -> Result<PentagonFamily> {
    match fam {
        PentagonFamily::Cyclic(cf) => Ok(PentagonFamily::Cyclic(fourier_cyclic(cf))),
        PentagonFamily::Real(_) => Err(Error::NotIntegrable),
    }
}

pub(crate) fn fourier_cyclic(cf: &CyclicFamily) -> CyclicFamily {
    let n = cf.order();
    let s = cf.group().measure_scale;
    let dual = cf.group().dual();
    let nf = n as usize;
    let mut tables: [Vec<Complex64>; 5] = Default::default();
    for (i, table) in tables.iter_mut().enumerate() {
        let mut vals = vec![Complex64::new(0.0, 0.0); nf * nf];
        for k in 0..n {
            for l in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..n {
                    for y in 0..n {
                        let phase =
                            2.0 * PI * ((k * y) as f64 - (l * x) as f64) / (n as f64);
                        acc += Complex64::from_polar(1.0, phase) * cf.value(i, x, y);
                    }
                }
                vals[(k * n + l) as usize] = acc * s * s;
            }
        }
        *table = vals;
    }
    CyclicFamily::from_tables(dual, tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pentagon;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dual_measures() {
        let z4 = Group::cyclic(4).unwrap();
        let d = z4.dual();
        assert_eq!(d.kind, GroupKind::Cyclic(4));
        assert!((d.measure_scale - 0.25).abs() < 1e-15);

        let r = Group::reals();
        assert_eq!(r.dual(), r);

        let z = Group::integers();
        let t = z.dual();
        assert_eq!(t.kind, GroupKind::Circle);
        assert!((t.measure_scale - 1.0).abs() < 1e-15);
        assert_eq!(t.dual().kind, GroupKind::Integers);
    }

    #[test]
    fn fourier_inversion_on_deltas() {
        // Forward transform with the counting measure, inverse with the dual
        // weight 1/N; deltas must come back exactly.
        let n = 4u64;
        let g = Group::cyclic(n).unwrap();
        let d = g.dual();
        for p in 0..n {
            let f = |x: GroupElement| match x {
                GroupElement::Cyclic { v, .. } if v == p => c(1.0, 0.0),
                _ => c(0.0, 0.0),
            };
            // hat f(k) = sum_x conj(chi_k(x)) f(x) * scale
            let hat = |k: u64| -> Complex64 {
                let chi = Character::new(g, GroupElement::Cyclic { n, v: k });
                haar_integrate(
                    |x| chi.eval(x).conj() * f(x),
                    &g,
                    &IntegrandHints::None,
                    1e-12,
                )
                .unwrap()
            };
            for x in 0..n {
                let chi_of = |k: u64| {
                    Character::new(g, GroupElement::Cyclic { n, v: k })
                        .eval(GroupElement::Cyclic { n, v: x })
                };
                let mut back = c(0.0, 0.0);
                for k in 0..n {
                    back += chi_of(k) * hat(k);
                }
                back *= d.measure_scale;
                let want = f(GroupElement::Cyclic { n, v: x });
                assert!((back - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_examples() {
        let z5 = Group::cyclic(5).unwrap();
        let total = haar_integrate(|_| c(1.0, 0.0), &z5, &IntegrandHints::None, 1e-12).unwrap();
        assert!((total - c(5.0, 0.0)).norm() < 1e-12);

        let d5 = z5.dual();
        let total = haar_integrate(|_| c(1.0, 0.0), &d5, &IntegrandHints::None, 1e-12).unwrap();
        assert!((total - c(1.0, 0.0)).norm() < 1e-12);

        let r = Group::reals();
        let hints = IntegrandHints::RealTails {
            left: TailHint::new(-1.0, 4.0, 1.0),
            right: TailHint::new(1.0, 4.0, 1.0),
        };
        let gauss =
            haar_integrate(|x| match x {
                GroupElement::Real(t) => c((-PI * t * t).exp(), 0.0),
                _ => unreachable!(),
            }, &r, &hints, 1e-12)
            .unwrap();
        assert!((gauss - c(1.0, 0.0)).norm() < 1e-11);

        let circle = Group::circle();
        let one = haar_integrate(|_| c(1.0, 0.0), &circle, &IntegrandHints::None, 1e-12).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-12);

        let z = Group::integers();
        let geo = haar_integrate(
            |x| match x {
                GroupElement::Integer(m) => c(0.5f64.powi(m.unsigned_abs() as i32), 0.0),
                _ => unreachable!(),
            },
            &z,
            &IntegrandHints::IntegerTail {
                from: 0,
                rate: std::f64::consts::LN_2,
                coeff: 1.0,
            },
            1e-12,
        )
        .unwrap();
        // sum_{m in Z} (1/2)^|m| = 3
        assert!((geo - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn characters_are_unitary_and_multiplicative() {
        let g = Group::cyclic(7).unwrap();
        let chi = Character::new(g, GroupElement::Cyclic { n: 7, v: 3 });
        for a in 0..7u64 {
            for b in 0..7u64 {
                let ea = GroupElement::Cyclic { n: 7, v: a };
                let eb = GroupElement::Cyclic { n: 7, v: b };
                assert!((chi.eval(ea).norm() - 1.0).abs() < 1e-14);
                let prod = chi.eval(ea) * chi.eval(eb);
                assert!((chi.eval(ea.op(eb)) - prod).norm() < 1e-13);
            }
        }
        let r = Group::reals();
        let chi = Character::new(r, GroupElement::Real(0.37));
        let (a, b) = (GroupElement::Real(1.2), GroupElement::Real(-0.4));
        assert!((chi.eval(a) * chi.eval(b) - chi.eval(a.op(b))).norm() < 1e-14);
    }

    #[test]
    fn group_spec_parsing() {
        assert_eq!(Group::parse("r").unwrap(), Group::reals());
        assert_eq!(Group::parse("zn:6").unwrap(), Group::cyclic(6).unwrap());
        assert_eq!(Group::parse("z").unwrap(), Group::integers());
        assert_eq!(Group::parse("t").unwrap(), Group::circle());
        let g = Group::parse("zn:5:scale=0.5").unwrap();
        assert!((g.measure_scale - 0.5).abs() < 1e-15);
        assert!(Group::parse("zn:0").is_err());
        assert!(Group::parse("nope").is_err());
    }

    #[test]
    fn constant_family_transform_is_delta_supported() {
        let n = 5u64;
        let fam = pentagon::constant_solution(&Group::cyclic(n).unwrap()).unwrap();
        let hat = fourier_family(&fam).unwrap();
        let cf = match &hat {
            PentagonFamily::Cyclic(cf) => cf,
            _ => panic!(),
        };
        for i in 0..5 {
            for k in 0..n {
                for l in 0..n {
                    let want = if k == 0 && l == 0 {
                        c(n as f64, 0.0)
                    } else {
                        c(0.0, 0.0)
                    };
                    assert!(
                        (cf.value(i, k, l) - want).norm() < 1e-10,
                        "i={i} k={k} l={l}: {}",
                        cf.value(i, k, l)
                    );
                }
            }
        }
    }

    #[test]
    fn double_transform_against_direct_dft_oracle() {
        // Independent double-DFT oracle on Z_3 with seeded values. The kernel
        // xi(y) / eta(x) swaps the roles of the two arguments, so applying the
        // transform twice is the identity (the measure factors cancel), NOT
        // the argument inversion the symmetric-kernel transform would give.
        use rand::{Rng, SeedableRng};
        let n = 3u64;
        let g = Group::cyclic(n).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut tables: [Vec<Complex64>; 5] = Default::default();
        for t in tables.iter_mut() {
            *t = (0..(n * n))
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
        }
        let fam = PentagonFamily::Cyclic(CyclicFamily::from_tables(g, tables.clone()));
        // Direct four-fold-loop oracle for one application.
        let oracle_once = |input: &[Vec<Complex64>; 5], scale: f64| -> [Vec<Complex64>; 5] {
            let mut out: [Vec<Complex64>; 5] = Default::default();
            for i in 0..5 {
                let mut vals = vec![c(0.0, 0.0); (n * n) as usize];
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = c(0.0, 0.0);
                        for x in 0..n {
                            for y in 0..n {
                                let ph = 2.0 * PI * ((k * y) as f64 - (l * x) as f64)
                                    / n as f64;
                                acc += Complex64::from_polar(1.0, ph)
                                    * input[i][(x * n + y) as usize];
                            }
                        }
                        vals[(k * n + l) as usize] = acc * scale * scale;
                    }
                }
                out[i] = vals;
            }
            out
        };
        let once = fourier_family(&fam).unwrap();
        let oracle1 = oracle_once(&tables, 1.0);
        if let PentagonFamily::Cyclic(cf) = &once {
            for i in 0..5 {
                for k in 0..n {
                    for l in 0..n {
                        assert!(
                            (cf.value(i, k, l) - oracle1[i][(k * n + l) as usize]).norm()
                                < 1e-12
                        );
                    }
                }
            }
        }
        let twice = fourier_family(&once).unwrap();
        let oracle2 = oracle_once(&oracle1, 1.0 / n as f64);
        let cf = match &twice {
            PentagonFamily::Cyclic(cf) => cf,
            _ => panic!(),
        };
        for i in 0..5 {
            for x in 0..n {
                for y in 0..n {
                    let idx = (x * n + y) as usize;
                    assert!((cf.value(i, x, y) - oracle2[i][idx]).norm() < 1e-12);
                    // and the oracle composition is the identity
                    assert!(
                        (cf.value(i, x, y) - tables[i][idx]).norm() < 1e-12,
                        "i={i} x={x} y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn parseval_on_cyclic() {
        use rand::{Rng, SeedableRng};
        let n = 6u64;
        let g = Group::cyclic(n).unwrap();
        let d = g.dual();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let hat = |k: u64| -> Complex64 {
            let chi = Character::new(g, GroupElement::Cyclic { n, v: k });
            (0..n)
                .map(|x| chi.eval(GroupElement::Cyclic { n, v: x }).conj() * f[x as usize])
                .sum::<Complex64>()
                * g.measure_scale
        };
        let lhs: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.measure_scale;
        let rhs: f64 = (0..n).map(|k| hat(k).norm_sqr()).sum::<f64>() * d.measure_scale;
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
