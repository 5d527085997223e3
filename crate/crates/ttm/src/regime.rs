//! Dynamical regime classification across the whole parameter plane:
//! contracting, unit-modulus, real expanding, and complex expanding cases,
//! plus boundedness certificates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{build_ell_chain, build_perimeter, clip_half_plane, PerimeterClass};
use crate::param::Parameter;

#[derive(Debug, Clone, PartialEq)]
pub enum RegimeTag {
    /// r < 1: every orbit is attracted to the origin.
    GlobalAttractorAtOrigin,
    /// c = 1: the map is the identity on the closed region above the fold.
    UnitIdentityHalfPlane,
    /// c = -1: every point of the strip |Im z| <= 1 has period two.
    UnitPeriodTwoStrip,
    /// Unit modulus, rational rotation 2*pi*j/k: an invariant regular
    /// k-gon on which f^k is the identity.
    UnitRationalPolygon { k: u32, vertices: Vec<Complex64> },
    /// Unit modulus, irrational rotation: orbits shadow rotations of the
    /// closed unit disk.
    UnitIrrationalDisk,
    /// Real expanding parameter with an interval invariant set on the
    /// imaginary axis.
    RealSegment { endpoints: (Complex64, Complex64) },
    /// Real parameter beyond modulus 2: invariant set is a Cantor set.
    RealCantor,
    ComplexPolygon,
    ComplexPolygonWithHoles,
    ComplexRamsHead,
}

#[derive(Debug, Clone)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Named numeric facts the decision used.
    pub certificates: Vec<(String, f64)>,
}

/// Supported boundedness facts; the Cantor flag is heuristic only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundednessCertificate {
    /// r > 3: the invariant set sits inside the open unit disk.
    UnitDiskBound,
    /// r > 2: the invariant set is totally disconnected.
    TotallyDisconnected,
    /// CONJECTURE-BASED: every sampled spiral vertex stays strictly above
    /// the folding line, suggesting a Cantor invariant set. Not a theorem.
    ConjectureCantor,
}

impl std::fmt::Display for BoundednessCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::UnitDiskBound => write!(f, "UnitDiskBound"),
            Self::TotallyDisconnected => write!(f, "TotallyDisconnected"),
            Self::ConjectureCantor => write!(f, "ConjectureCantor (CONJECTURE-BASED)"),
        }
    }
}

const UNIT_TOL: f64 = 1e-12;

/// Best rational approximation j/k of x in [0,1) with k <= cap, accepted
/// only when |x - j/k| < tol. Continued-fraction convergents.
fn detect_rational(x: f64, cap: u64, tol: f64) -> Option<(u64, u64)> {
    let mut a = x;
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..40 {
        let ai = a.floor();
        let p2 = ai as i64 * p1 + p0;
        let q2 = ai as i64 * q1 + q0;
        if q2 as u64 > cap {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = a - ai;
        if frac.abs() < 1e-15 {
            break;
        }
        a = 1.0 / frac;
    }
    if q1 <= 0 {
        return None;
    }
    let (j, k) = (p1.rem_euclid(q1) as u64, q1 as u64);
    if (x - j as f64 / k as f64).abs() < tol {
        Some((j, k))
    } else {
        None
    }
}

/// Invariant regular k-gon for a unit-modulus parameter with rotation
/// number j/k. For the convex rotations (j = 1 or k-1) the vertices are the
/// orbit of the corner gamma_0; otherwise the polygon is the central cell
/// of the k-pointed star through the rotated corners.
pub fn unit_modulus_polygon(p: &Parameter, j: u32, k: u32) -> Result<Vec<Complex64>> {
    let err = Error::BadRotation { j, k };
    if (p.r - 1.0).abs() > 1e-9 || k < 3 || gcd(j as u64, k as u64) != 1 {
        return Err(err);
    }
    let tau = 2.0 * std::f64::consts::PI;
    let want = tau * j as f64 / k as f64;
    if (p.theta - want).abs() > 1e-9 && (tau - p.theta - want).abs() > 1e-9 {
        return Err(err);
    }
    let g0 = p.gamma0()?;
    if j == 1 || j == k - 1 {
        let mut vertices = Vec::with_capacity(k as usize);
        let mut z = g0;
        for _ in 0..k {
            vertices.push(z);
            z = p.apply(z).value;
        }
        Ok(vertices)
    } else {
        // Star corners: powers of c applied to gamma_0. The central cell is
        // the intersection of the origin-side half-planes of the chords.
        let corners: Vec<Complex64> = (0..k).map(|m| p.c.powi(m as i32) * g0).collect();
        let reach = 2.0 * g0.norm() + 2.0;
        let mut cell = vec![
            Complex64::new(-reach, -reach),
            Complex64::new(reach, -reach),
            Complex64::new(reach, reach),
            Complex64::new(-reach, reach),
        ];
        for m in 0..k as usize {
            let a = corners[m];
            let b = corners[(m + 1) % k as usize];
            let dir = b - a;
            let mut n = Complex64::new(-dir.im, dir.re);
            if n.re * (0.0 - a.re) + n.im * (0.0 - a.im) < 0.0 {
                n = -n;
            }
            cell = clip_half_plane(&cell, a, n);
            if cell.len() < 3 {
                return Err(err);
            }
        }
        Ok(cell)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Maps any raw parameter to its dynamical regime.
pub fn classify(c_raw: Complex64) -> Regime {
    let p = Parameter::canonicalize(c_raw);
    let mut certs = vec![
        ("r".to_string(), p.r),
        ("alpha".to_string(), p.alpha),
        ("beta".to_string(), p.beta),
    ];

    if p.r < 1.0 - UNIT_TOL {
        return Regime { tag: RegimeTag::GlobalAttractorAtOrigin, certificates: certs };
    }

    if (p.r - 1.0).abs() < UNIT_TOL {
        let tau = 2.0 * std::f64::consts::PI;
        let x = p.theta / tau;
        certs.push(("theta".to_string(), p.theta));
        if p.theta.abs() < 1e-9 || (p.theta - tau).abs() < 1e-9 {
            return Regime { tag: RegimeTag::UnitIdentityHalfPlane, certificates: certs };
        }
        if (p.theta - std::f64::consts::PI).abs() < 1e-9 {
            return Regime { tag: RegimeTag::UnitPeriodTwoStrip, certificates: certs };
        }
        if let Some((j, k)) = detect_rational(x, 64, 1e-9) {
            certs.push(("rotation_j".to_string(), j as f64));
            certs.push(("rotation_k".to_string(), k as f64));
            if let Ok(vertices) = unit_modulus_polygon(&p, j as u32, k as u32) {
                return Regime {
                    tag: RegimeTag::UnitRationalPolygon { k: k as u32, vertices },
                    certificates: certs,
                };
            }
        }
        return Regime { tag: RegimeTag::UnitIrrationalDisk, certificates: certs };
    }

    if p.is_real() {
        // Use the signed real value: canonicalization never flips reals.
        let a = c_raw.re;
        let tag = if a > 1.0 && a <= 2.0 {
            RegimeTag::RealSegment {
                endpoints: (Complex64::new(0.0, -2.0 / a), Complex64::new(0.0, 0.0)),
            }
        } else if a >= -2.0 && a < -1.0 {
            let lo = Complex64::new(0.0, -2.0) / (Complex64::new(a, 0.0) * (1.0 + a));
            let hi = Complex64::new(0.0, -2.0) / Complex64::new(1.0 + a, 0.0);
            RegimeTag::RealSegment { endpoints: (lo, hi) }
        } else {
            RegimeTag::RealCantor
        };
        return Regime { tag, certificates: certs };
    }

    match build_perimeter(&p) {
        Ok(rep) => {
            if rep.zeta.exists {
                certs.push(("im_zeta".to_string(), rep.zeta.point.im));
                certs.push(("side_count".to_string(), rep.side_count as f64));
            }
            let tag = match rep.classification {
                PerimeterClass::Polygon => RegimeTag::ComplexPolygon,
                PerimeterClass::PolygonWithHoles => RegimeTag::ComplexPolygonWithHoles,
                PerimeterClass::RamsHead => RegimeTag::ComplexRamsHead,
            };
            Regime { tag, certificates: certs }
        }
        Err(_) => Regime { tag: RegimeTag::ComplexRamsHead, certificates: certs },
    }
}

/// Certificates about the size and connectivity of the invariant set for an
/// expanding parameter.
pub fn boundedness_certificates(p: &Parameter) -> Vec<BoundednessCertificate> {
    let mut out = Vec::new();
    if p.r > 3.0 {
        out.push(BoundednessCertificate::UnitDiskBound);
    }
    if p.r > 2.0 {
        out.push(BoundednessCertificate::TotallyDisconnected);
    }
    if p.beta > 0.0 {
        if let Ok(chain) = build_ell_chain(p, -100, 100) {
            if chain.vertices.iter().all(|(_, v)| v.im > -1.0 + 1e-9) {
                out.push(BoundednessCertificate::ConjectureCantor);
            }
        }
    }
    out
}

/// Plain-text report for one parameter, one `key: value` per line.
pub fn report(c_raw: Complex64) -> String {
    let regime = classify(c_raw);
    let fc = |z: Complex64| {
        if z.im >= 0.0 {
            format!("{}+{}i", z.re, z.im)
        } else {
            format!("{}{}i", z.re, z.im)
        }
    };
    let mut out = String::new();
    out.push_str(&format!("c: {}\n", fc(c_raw)));
    let tag = match &regime.tag {
        RegimeTag::GlobalAttractorAtOrigin => "GlobalAttractorAtOrigin".to_string(),
        RegimeTag::UnitIdentityHalfPlane => "UnitIdentityHalfPlane".to_string(),
        RegimeTag::UnitPeriodTwoStrip => "UnitPeriodTwoStrip".to_string(),
        RegimeTag::UnitRationalPolygon { k, .. } => format!("UnitRationalPolygon(k={k})"),
        RegimeTag::UnitIrrationalDisk => "UnitIrrationalDisk".to_string(),
        RegimeTag::RealSegment { endpoints } => {
            format!("RealSegment endpoints=({}, {})", fc(endpoints.0), fc(endpoints.1))
        }
        RegimeTag::RealCantor => "RealCantor".to_string(),
        RegimeTag::ComplexPolygon => "ComplexPolygon".to_string(),
        RegimeTag::ComplexPolygonWithHoles => "ComplexPolygonWithHoles".to_string(),
        RegimeTag::ComplexRamsHead => "ComplexRamsHead".to_string(),
    };
    out.push_str(&format!("regime: {tag}\n"));
    for (name, value) in &regime.certificates {
        out.push_str(&format!("{name}: {value}\n"));
    }
    let p = Parameter::canonicalize(c_raw);
    if p.r > 1.0 {
        for cert in boundedness_certificates(&p) {
            out.push_str(&format!("certificate: {cert}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn contracting_case() {
        let r = classify(C::new(0.3, 0.4));
        assert_eq!(r.tag, RegimeTag::GlobalAttractorAtOrigin);
    }

    #[test]
    fn real_segment_positive() {
        let r = classify(C::new(1.5, 0.0));
        match r.tag {
            RegimeTag::RealSegment { endpoints } => {
                assert!((endpoints.0 - C::new(0.0, -4.0 / 3.0)).norm() < 1e-12);
                assert!(endpoints.1.norm() < 1e-12);
            }
            other => panic!("wrong tag {other:?}"),
        }
    }

    #[test]
    fn real_segment_negative() {
        let r = classify(C::new(-1.5, 0.0));
        match r.tag {
            RegimeTag::RealSegment { endpoints } => {
                assert!((endpoints.0 - C::new(0.0, -8.0 / 3.0)).norm() < 1e-12);
                assert!((endpoints.1 - C::new(0.0, 4.0)).norm() < 1e-12);
                // The top endpoint is the non-zero fixed point.
                let p = Parameter::canonicalize(C::new(-1.5, 0.0));
                assert!((p.apply(endpoints.1).value - endpoints.1).norm() < 1e-12);
            }
            other => panic!("wrong tag {other:?}"),
        }
    }

    #[test]
    fn real_cantor_beyond_two() {
        assert_eq!(classify(C::new(2.5, 0.0)).tag, RegimeTag::RealCantor);
        assert_eq!(classify(C::new(-3.0, 0.0)).tag, RegimeTag::RealCantor);
    }

    #[test]
    fn real_segment_dynamics() {
        // Interior points survive long iteration; points off the segment on
        // the axis escape.
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for a in [1.5, -1.5, 1.9, -1.2] {
            let p = Parameter::canonicalize(C::new(a, 0.0));
            let (lo, hi) = match classify(C::new(a, 0.0)).tag {
                RegimeTag::RealSegment { endpoints } => endpoints,
                other => panic!("{other:?}"),
            };
            let radius = p.escape_radius().unwrap();
            for _ in 0..1000 {
                let t: f64 = rng.gen_range(0.0..1.0);
                let z = lo + t * (hi - lo);
                assert!(
                    !p.iterate_until_escape(z, 1000, radius).escaped(),
                    "interior point escaped for c={a}"
                );
            }
            for _ in 0..1000 {
                let off: f64 = rng.gen_range(1e-3..0.5);
                let z = if rng.gen_bool(0.5) {
                    hi + C::new(0.0, off)
                } else {
                    lo - C::new(0.0, off)
                };
                assert!(
                    p.iterate_until_escape(z, 4000, radius).escaped(),
                    "outside point survived for c={a} z={z}"
                );
            }
        }
    }

    #[test]
    fn unit_identity_and_period_two() {
        assert_eq!(classify(C::new(1.0, 0.0)).tag, RegimeTag::UnitIdentityHalfPlane);
        assert_eq!(classify(C::new(-1.0, 0.0)).tag, RegimeTag::UnitPeriodTwoStrip);
        // Period two is exact in floating point on the strip.
        let p = Parameter::canonicalize(C::new(-1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..1000 {
            let z = C::new(rng.gen_range(-5.0..5.0), rng.gen_range(-1.0..1.0));
            assert_eq!(p.apply_n(z, 2), z);
        }
    }

    #[test]
    fn unit_rational_pentagon() {
        let tau = 2.0 * std::f64::consts::PI;
        let c5 = C::from_polar(1.0, tau / 5.0);
        let r = classify(c5);
        let vertices = match r.tag {
            RegimeTag::UnitRationalPolygon { k, vertices } => {
                assert_eq!(k, 5);
                vertices
            }
            other => panic!("{other:?}"),
        };
        assert_eq!(vertices.len(), 5);
        let p = Parameter::canonicalize(c5);
        // f^5 fixes the polygon interior.
        let centroid = vertices.iter().sum::<C>() / 5.0;
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..100 {
            let i = rng.gen_range(0..5);
            let t: f64 = rng.gen_range(0.0..1.0);
            let s: f64 = rng.gen_range(0.0..1.0);
            let z = centroid + s * (vertices[i] + t * (vertices[(i + 1) % 5] - vertices[i]) - centroid);
            assert!((p.apply_n(z, 5) - z).norm() < 1e-9);
        }
    }

    #[test]
    fn unit_rational_triangle_on_fold() {
        let tau = 2.0 * std::f64::consts::PI;
        let c3 = C::from_polar(1.0, tau / 3.0);
        let p = Parameter::canonicalize(c3);
        let vs = unit_modulus_polygon(&p, 1, 3).unwrap();
        assert_eq!(vs.len(), 3);
        // Equilateral with its bottom edge on the folding line.
        let mut sides: Vec<f64> = (0..3).map(|i| (vs[i] - vs[(i + 1) % 3]).norm()).collect();
        sides.sort_by(f64::total_cmp);
        assert!((sides[2] - sides[0]).abs() < 1e-9);
        let on_fold = (0..3)
            .filter(|&i| (vs[i].im + 1.0).abs() < 1e-9 && (vs[(i + 1) % 3].im + 1.0).abs() < 1e-9)
            .count();
        assert_eq!(on_fold, 1);
    }

    #[test]
    fn unit_rational_star_cell() {
        let tau = 2.0 * std::f64::consts::PI;
        let c52 = C::from_polar(1.0, 2.0 * tau / 5.0);
        let p = Parameter::canonicalize(c52);
        let cell = unit_modulus_polygon(&p, 2, 5).unwrap();
        assert!(cell.len() >= 5);
        let centroid = cell.iter().sum::<C>() / cell.len() as f64;
        assert!((p.apply_n(centroid, 5) - centroid).norm() < 1e-9);
    }

    #[test]
    fn bad_rotation_rejected() {
        let p = Parameter::canonicalize(C::from_polar(1.0, 1.0));
        assert!(matches!(
            unit_modulus_polygon(&p, 1, 5),
            Err(Error::BadRotation { j: 1, k: 5 })
        ));
    }

    #[test]
    fn unit_irrational_detected() {
        let r = classify(C::from_polar(1.0, 1.0)); // 1 rad: irrational rotation
        assert_eq!(r.tag, RegimeTag::UnitIrrationalDisk);
    }

    #[test]
    fn rational_detector() {
        assert_eq!(detect_rational(0.2, 64, 1e-9), Some((1, 5)));
        assert_eq!(detect_rational(3.0 / 7.0, 64, 1e-9), Some((3, 7)));
        assert_eq!(detect_rational(1.0 / std::f64::consts::PI, 64, 1e-9), None);
        assert_eq!(detect_rational(1.0 / 100.0, 64, 1e-9), None);
    }

    #[test]
    fn certificates_examples() {
        let p = Parameter::canonicalize(C::new(3.2, 0.1));
        let certs = boundedness_certificates(&p);
        assert!(certs.contains(&BoundednessCertificate::UnitDiskBound));
        assert!(certs.contains(&BoundednessCertificate::TotallyDisconnected));

        let p = Parameter::canonicalize(C::new(0.0, 2.5));
        let certs = boundedness_certificates(&p);
        assert!(certs.contains(&BoundednessCertificate::TotallyDisconnected));
        assert!(!certs.contains(&BoundednessCertificate::UnitDiskBound));

        let p = Parameter::canonicalize(C::new(1.01, 0.01));
        assert!(boundedness_certificates(&p).is_empty());
    }

    #[test]
    fn tent_conjugacy_real_parameter() {
        // phi(z) = c*i*z/2 carries the axis dynamics to the slope-c tent map.
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for a in [1.3, 1.5, 1.9] {
            let p = Parameter::canonicalize(C::new(a, 0.0));
            let tent = |x: f64| if x <= 0.5 { a * x } else { a * (1.0 - x) };
            for _ in 0..1000 {
                let t: f64 = rng.gen_range(0.0..2.0 / a);
                let z = C::new(0.0, -t);
                let phi = |w: C| (p.c * C::new(0.0, 1.0) * w / 2.0).re;
                assert!((phi(p.apply(z).value) - tent(phi(z))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classification_consistency_with_perimeter() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..200 {
            let r = rng.gen_range(1.01..1.6);
            let th = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
            let c = C::from_polar(r, th);
            let p = Parameter::canonicalize(c);
            let rep = build_perimeter(&p).unwrap();
            let want = match rep.classification {
                PerimeterClass::Polygon => RegimeTag::ComplexPolygon,
                PerimeterClass::PolygonWithHoles => RegimeTag::ComplexPolygonWithHoles,
                PerimeterClass::RamsHead => RegimeTag::ComplexRamsHead,
            };
            assert_eq!(classify(c).tag, want);
        }
    }

    #[test]
    fn report_contains_regime_line() {
        let text = report(C::new(1.5, 0.0));
        assert!(text.contains("regime: RealSegment"));
        let text = report(C::new(3.2, 0.1));
        assert!(text.contains("UnitDiskBound"));
    }
}
