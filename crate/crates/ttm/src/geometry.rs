//! Exact boundary geometry of the filled-in invariant set.
//!
//! Builds the vertex spirals ell_k and gamma_k, locates the first crossing
//! zeta of the forward spiral with the pre-folding line, assembles the
//! outer-most boundary polygon, carves out the convex escape regions S_k,
//! and classifies the perimeter set P.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::param::Parameter;

/// Which spiral a chain stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Ell,
    Gamma,
}

/// An indexed vertex spiral; consecutive vertices bound the chain segments.
#[derive(Debug, Clone)]
pub struct SpiralChain {
    pub kind: ChainKind,
    /// (index k, vertex) pairs, ordered by descending k.
    pub vertices: Vec<(i64, Complex64)>,
}

impl SpiralChain {
    pub fn vertex(&self, k: i64) -> Result<Complex64> {
        self.vertices
            .iter()
            .find(|(i, _)| *i == k)
            .map(|(_, v)| *v)
            .ok_or(Error::InsufficientChain(k))
    }

    /// Segment with index j runs from vertex j to vertex j+1.
    pub fn segment(&self, j: i64) -> Result<(Complex64, Complex64)> {
        Ok((self.vertex(j)?, self.vertex(j + 1)?))
    }
}

/// Outcome of the zeta search along the forward spiral.
#[derive(Debug, Clone, Copy)]
pub struct ZetaFinding {
    pub exists: bool,
    pub point: Complex64,
    /// Smallest n >= 1 with segment n meeting the pre-folding line.
    pub n: u32,
    /// True iff the crossing already happens on the mirror segment between
    /// vertices -1 and 0, which shares its crossing point with segment 1.
    pub via_l_minus1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerimeterClass {
    Polygon,
    PolygonWithHoles,
    RamsHead,
}

/// A polyline; `closed` rings implicitly join the last vertex to the first.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub vertices: Vec<Complex64>,
    pub closed: bool,
}

impl Boundary {
    pub fn side_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }
}

/// One convex escape region. The mirror of region k (reflected about the
/// pre-folding line) carries the same index with `mirrored` set.
#[derive(Debug, Clone)]
pub struct SRegion {
    pub index: i64,
    pub mirrored: bool,
    pub vertices: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct PerimeterReport {
    pub classification: PerimeterClass,
    pub outer_boundary: Boundary,
    pub s_regions: Vec<SRegion>,
    pub zeta: ZetaFinding,
    pub side_count: usize,
    /// Set when the S recursion or a spiral chain was cut at max depth
    /// rather than collapsing on its own.
    pub truncated: bool,
    /// Inner spiral chain (and its mirror) bounding the cavity in the
    /// ram's-head case.
    pub inner_boundary: Option<(Boundary, Boundary)>,
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

/// Intersection parameter t of segment [a,b] with the line through q along
/// direction d, when a + t(b-a) lies on the line. None for (near-)parallel.
fn segment_line_t(a: Complex64, b: Complex64, q: Complex64, d: Complex64) -> Option<f64> {
    let denom = cross(b - a, d);
    let scale = (b - a).norm() * d.norm();
    if denom.abs() <= 1e-15 * scale.max(1e-300) {
        return None;
    }
    Some(cross(q - a, d) / denom)
}

const SEG_HIT_TOL: f64 = 1e-12;

/// Builds the ell spiral for indices in [k_min, k_max]: divide by c going
/// forward, mirror about the pre-folding line going backward.
pub fn build_ell_chain(p: &Parameter, k_min: i64, k_max: i64) -> Result<SpiralChain> {
    if p.beta == 0.0 {
        return Err(Error::DegenerateReal);
    }
    let ell0 = p.ell0()?;
    let mut vertices = Vec::with_capacity((k_max - k_min + 1).max(0) as usize);
    for k in (k_min..=k_max).rev() {
        let v = if k >= 0 {
            ell0 / p.c.powi(k as i32)
        } else {
            // ell_k = reflect_pfl(ell_{1-k}) for k < 0.
            p.reflect_pfl(ell0 / p.c.powi((1 - k) as i32))
        };
        vertices.push((k, v));
    }
    Ok(SpiralChain { kind: ChainKind::Ell, vertices })
}

/// Builds the gamma spiral gamma_k = gamma_0 / c^k for k in [k_min, k_max].
pub fn build_gamma_chain(p: &Parameter, k_min: i64, k_max: i64) -> Result<SpiralChain> {
    let g0 = p.gamma0()?;
    let mut vertices = Vec::with_capacity((k_max - k_min + 1).max(0) as usize);
    for k in (k_min..=k_max).rev() {
        vertices.push((k, g0 / p.c.powi(k as i32)));
    }
    Ok(SpiralChain { kind: ChainKind::Gamma, vertices })
}

/// Walks the forward spiral segments looking for the first crossing with the
/// pre-folding line. The line sits at distance exactly 1/r from the origin,
/// so the walk stops once a whole segment lies inside that disk: no later
/// segment can reach the line.
pub fn find_zeta(p: &Parameter) -> Result<ZetaFinding> {
    if p.beta == 0.0 {
        return Err(Error::DegenerateReal);
    }
    let ell0 = p.ell0()?;
    // PFL through -i/c with direction 1/c.
    let q = Complex64::new(0.0, -1.0) / p.c;
    let d = Complex64::new(1.0, 0.0) / p.c;
    let inner = 1.0 / p.r - 1e-12;

    let mut a = ell0 / p.c; // ell_1
    for n in 1..=10_000u32 {
        let b = a / p.c; // ell_{n+1}
        if a.norm() < inner && b.norm() < inner {
            return Ok(ZetaFinding {
                exists: false,
                point: Complex64::new(0.0, 0.0),
                n: 0,
                via_l_minus1: false,
            });
        }
        if let Some(t) = segment_line_t(a, b, q, d) {
            if (-SEG_HIT_TOL..=1.0 + SEG_HIT_TOL).contains(&t) {
                let point = a + t * (b - a);
                return Ok(ZetaFinding { exists: true, point, n, via_l_minus1: n == 1 });
            }
        }
        a = b;
    }
    Ok(ZetaFinding {
        exists: false,
        point: Complex64::new(0.0, 0.0),
        n: 0,
        via_l_minus1: false,
    })
}

/// Assembles the outer boundary.
///
/// With a crossing on segment n the result is the closed (2n+1)-gon running
/// zeta, ell_{-(n-1)}, ..., ell_n, back to zeta. Without one it is the open
/// double spiral through every chain vertex, outermost first.
pub fn outer_boundary(p: &Parameter, z: &ZetaFinding, chain: &SpiralChain) -> Result<Boundary> {
    let _ = p;
    if z.exists {
        let n = z.n as i64;
        let mut vertices = Vec::with_capacity(2 * n as usize + 1);
        vertices.push(z.point);
        for k in -(n - 1)..=n {
            vertices.push(chain.vertex(k)?);
        }
        Ok(Boundary { vertices, closed: true })
    } else {
        let vertices = chain.vertices.iter().map(|(_, v)| *v).collect();
        Ok(Boundary { vertices, closed: false })
    }
}

/// Clips a convex polygon to the half-plane { z : dot(normal, z - q) >= 0 }.
pub fn clip_half_plane(poly: &[Complex64], q: Complex64, normal: Complex64) -> Vec<Complex64> {
    let side = |z: Complex64| normal.re * (z - q).re + normal.im * (z - q).im;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let sa = side(a);
        let sb = side(b);
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
            let t = sa / (sa - sb);
            out.push(a + t * (b - a));
        }
    }
    out
}

fn polygon_diameter(poly: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max((poly[i] - poly[j]).norm());
        }
    }
    d
}

/// How far inside a convex polygon the point sits: positive depth means
/// strictly interior, <= 0 means on the boundary or outside. Works for
/// either vertex orientation.
pub fn convex_depth(poly: &[Complex64], z: Complex64) -> f64 {
    if poly.len() < 3 {
        return f64::NEG_INFINITY;
    }
    let area2: f64 = (0..poly.len())
        .map(|i| cross(poly[i], poly[(i + 1) % poly.len()]))
        .sum();
    let orient = if area2 >= 0.0 { 1.0 } else { -1.0 };
    let mut depth = f64::INFINITY;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = b - a;
        let len = e.norm();
        if len < 1e-300 {
            continue;
        }
        depth = depth.min(orient * cross(e, z - a) / len);
    }
    depth
}

/// Builds the convex escape regions: S_1 from its four bounding lines, the
/// forward recursion S_k = S_{k-1}/c intersected with the pre-upper half
/// plane, S_0 = c*S_1, and the mirror of every region about the pre-folding
/// line. Returns (regions, truncated).
pub fn build_s_regions(
    p: &Parameter,
    clip_radius: f64,
    max_depth: u32,
) -> Result<(Vec<SRegion>, bool)> {
    if p.beta == 0.0 {
        return Err(Error::DegenerateReal);
    }
    let ell0 = p.ell0()?;
    let ell1 = ell0 / p.c;
    let g1 = p.gamma0()? / p.c;
    let m0 = (ell0 + ell1) * 0.5;
    let m1 = m0 / p.c;

    // Interior witness: far along the bisector of the wedge at gamma_1.
    let u = (m0 - g1) / (m0 - g1).norm();
    let v = (m1 - g1) / (m1 - g1).norm();
    let bis = u + v;
    let reach = 10.0 * (g1.norm() + ell1.norm() + m0.norm() + m1.norm() + 1.0);
    let w = g1 + reach * (bis / bis.norm());

    // Start from the clip square, then cut with each bounding line keeping
    // the side that contains the witness.
    let cr = clip_radius;
    let mut s1 = vec![
        Complex64::new(-cr, -cr),
        Complex64::new(cr, -cr),
        Complex64::new(cr, cr),
        Complex64::new(-cr, cr),
    ];
    for (a, b) in [(g1, m0), (m0, ell1), (ell1, m1), (m1, g1)] {
        let dir = b - a;
        let mut n = Complex64::new(-dir.im, dir.re);
        if n.re * (w - a).re + n.im * (w - a).im < 0.0 {
            n = -n;
        }
        s1 = clip_half_plane(&s1, a, n);
        if s1.len() < 3 {
            return Ok((Vec::new(), false));
        }
    }

    // Half-plane Im(c*z) >= -1, i.e. dot(i*conj(c), z - q) >= 0 with q on
    // the pre-folding line.
    let pfl_q = Complex64::new(0.0, -1.0) / p.c;
    let ph_normal = Complex64::new(p.beta, p.alpha); // gradient of Im(c*z)
    let ph_normal = ph_normal / ph_normal.norm();

    let mut forward: Vec<(i64, Vec<Complex64>)> = vec![(1, s1.clone())];
    let mut truncated = false;
    let mut cur = s1.clone();
    for k in 2..=max_depth as i64 {
        let shrunk: Vec<Complex64> = cur.iter().map(|z| z / p.c).collect();
        let next = clip_half_plane(&shrunk, pfl_q, ph_normal);
        if next.len() < 3 {
            break;
        }
        if polygon_diameter(&next) < 1e-9 {
            break;
        }
        forward.push((k, next.clone()));
        cur = next;
        if k == max_depth as i64 {
            truncated = true;
        }
    }

    let mut regions = Vec::with_capacity(2 * forward.len() + 2);
    let s0: Vec<Complex64> = s1.iter().map(|z| z * p.c).collect();
    regions.push(SRegion { index: 0, mirrored: false, vertices: s0.clone() });
    regions.push(SRegion {
        index: 0,
        mirrored: true,
        vertices: s0.iter().map(|z| p.reflect_pfl(*z)).collect(),
    });
    for (k, poly) in forward {
        regions.push(SRegion {
            index: k,
            mirrored: true,
            vertices: poly.iter().map(|z| p.reflect_pfl(*z)).collect(),
        });
        regions.push(SRegion { index: k, mirrored: false, vertices: poly });
    }
    Ok((regions, truncated))
}

/// Full perimeter construction and three-way classification.
pub fn build_perimeter(p: &Parameter) -> Result<PerimeterReport> {
    if p.beta == 0.0 {
        return Err(Error::DegenerateReal);
    }
    let zeta = find_zeta(p)?;
    let classification = if zeta.exists {
        if zeta.point.im <= -1.0 {
            PerimeterClass::Polygon
        } else {
            PerimeterClass::PolygonWithHoles
        }
    } else {
        PerimeterClass::RamsHead
    };

    let depth: i64 = if zeta.exists { (zeta.n as i64 + 2).max(8) } else { 64 };
    let chain = build_ell_chain(p, -depth, depth + 1)?;
    let boundary = outer_boundary(p, &zeta, &chain)?;

    let clip = p.escape_radius()?.max(2.0 * p.ell0()?.norm());
    let (s_regions, truncated) = build_s_regions(p, clip, 64)?;

    let inner_boundary = if classification == PerimeterClass::RamsHead {
        let gamma = build_gamma_chain(p, 0, 64)?;
        let inner: Vec<Complex64> = gamma.vertices.iter().rev().map(|(_, v)| *v).collect();
        let mirror: Vec<Complex64> = inner.iter().map(|z| p.reflect_pfl(*z)).collect();
        Some((
            Boundary { vertices: inner, closed: false },
            Boundary { vertices: mirror, closed: false },
        ))
    } else {
        None
    };

    let side_count = boundary.side_count();
    Ok(PerimeterReport {
        classification,
        outer_boundary: boundary,
        s_regions,
        zeta,
        side_count,
        truncated: truncated || !zeta.exists,
        inner_boundary,
    })
}

/// True iff Re(gamma_0) < Re(ell_0); analytically equivalent to alpha < -1.
pub fn predicate_alpha_vs_gamma(p: &Parameter) -> bool {
    p.alpha < -1.0
}

/// True iff Im(ell_{-1}) > -1; analytically equivalent to r > sqrt(2).
pub fn predicate_ell_minus1(p: &Parameter) -> bool {
    p.r > std::f64::consts::SQRT_2
}

/// True iff the fixed-point segment L_0 stays inside the bounded invariant
/// set; analytically alpha >= -1 and r <= sqrt(2).
pub fn predicate_l0_in_k(p: &Parameter) -> bool {
    p.alpha >= -1.0 && p.r <= std::f64::consts::SQRT_2
}

/// Distance-based membership in the perimeter set: a point belongs to P iff
/// it is not strictly interior to any escape region. Returns the worst
/// interior depth (<= tol means member).
pub fn perimeter_violation(regions: &[SRegion], z: Complex64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for r in regions {
        worst = worst.max(convex_depth(&r.vertices, z));
    }
    worst
}

/// Serializes a polyline as CSV, one "x,y" per line; closed rings repeat the
/// first vertex at the end.
pub fn boundary_to_csv(b: &Boundary) -> String {
    let mut out = String::new();
    for v in &b.vertices {
        out.push_str(&format!("{},{}\n", v.re, v.im));
    }
    if b.closed {
        if let Some(v) = b.vertices.first() {
            out.push_str(&format!("{},{}\n", v.re, v.im));
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

    fn param(re: f64, im: f64) -> Parameter {
        Parameter::canonicalize(C::new(re, im))
    }

    fn random_param(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> Parameter {
        let r = rng.gen_range(r_lo..r_hi);
        let th = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
        Parameter::canonicalize(C::from_polar(r, th))
    }

    fn dist_to_pfl(p: &Parameter, z: C) -> f64 {
        // |Im(c*z) + 1| / r: distance from z to the line Im(c*z) = -1.
        ((p.c * z).im + 1.0).abs() / p.r
    }

    #[test]
    fn ell_chain_forward_ratio() {
        let p = param(1.1, 0.6);
        let chain = build_ell_chain(&p, -4, 6).unwrap();
        for k in 0..5 {
            let a = chain.vertex(k).unwrap().norm();
            let b = chain.vertex(k + 1).unwrap().norm();
            assert!((b - a / p.r).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn ell_chain_mirror_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let chain = build_ell_chain(&p, -7, 8).unwrap();
            for k in -6..=6i64 {
                let lhs = p.reflect_pfl(chain.vertex(k).unwrap());
                let rhs = chain.vertex(-k + 1).unwrap();
                assert!(
                    (lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()),
                    "mirror failed at k={k} c={}",
                    p.c
                );
            }
        }
    }

    #[test]
    fn ell_minus1_at_sqrt2_modulus() {
        // |c| = sqrt(2): the first backward vertex lands exactly on the
        // folding line and shares its real part with the fixed point.
        let p = param(1.0, 1.0);
        let chain = build_ell_chain(&p, -2, 2).unwrap();
        let em1 = chain.vertex(-1).unwrap();
        assert!((em1.im + 1.0).abs() < 1e-12);
        assert!((em1.re - chain.vertex(0).unwrap().re).abs() < 1e-12);
    }

    #[test]
    fn ell_backward_vertical_segment() {
        // Re(ell_{-1}) = Re(ell_0) holds for every parameter.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.02, 2.8);
            let chain = build_ell_chain(&p, -1, 1).unwrap();
            let e0 = chain.vertex(0).unwrap();
            let em1 = chain.vertex(-1).unwrap();
            assert!((em1.re - e0.re).abs() < 1e-9 * (1.0 + e0.norm()));
        }
    }

    #[test]
    fn gamma_chain_divides() {
        let p = param(-0.65, 0.88);
        let chain = build_gamma_chain(&p, -3, 5).unwrap();
        let g0 = p.gamma0().unwrap();
        for k in -3..=5i64 {
            assert!((chain.vertex(k).unwrap() - g0 / p.c.powi(k as i32)).norm() < 1e-12);
        }
    }

    #[test]
    fn pfl_is_perpendicular_bisector_of_l0() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let e0 = p.ell0().unwrap();
            let e1 = e0 / p.c;
            let mid = (e0 + e1) * 0.5;
            assert!(dist_to_pfl(&p, mid) < 1e-10 * (1.0 + mid.norm()));
            // Perpendicularity: L_0 direction vs PFL direction 1/c.
            let u = e1 - e0;
            let v = C::new(1.0, 0.0) / p.c;
            let dot = u.re * v.re + u.im * v.im;
            let angle = (dot / (u.norm() * v.norm())).abs();
            assert!(angle < 1e-8);
        }
    }

    #[test]
    fn zeta_triangle_example() {
        // Crossing already on the first segment: triangular outer boundary.
        let p = param(-1.06, 0.5);
        let z = find_zeta(&p).unwrap();
        assert!(z.exists);
        assert_eq!(z.n, 1);
        assert!(z.via_l_minus1);
        assert!(dist_to_pfl(&p, z.point) < 1e-9);
        let chain = build_ell_chain(&p, -2, 3).unwrap();
        let b = outer_boundary(&p, &z, &chain).unwrap();
        assert!(b.closed);
        assert_eq!(b.side_count(), 3);
    }

    #[test]
    fn zeta_point_on_segment_and_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut found = 0;
        for _ in 0..400 {
            let p = random_param(&mut rng, 1.02, 1.45);
            let z = find_zeta(&p).unwrap();
            if !z.exists {
                continue;
            }
            found += 1;
            assert!(dist_to_pfl(&p, z.point) < 1e-9);
            let chain = build_ell_chain(&p, -1, z.n as i64 + 1).unwrap();
            let (a, b) = chain.segment(z.n as i64).unwrap();
            // On the segment: within tolerance of the hull of its endpoints.
            let t = ((z.point - a).re * (b - a).re + (z.point - a).im * (b - a).im)
                / (b - a).norm_sqr();
            assert!((-1e-9..=1.0 + 1e-9).contains(&t));
            assert!((a + t * (b - a) - z.point).norm() < 1e-9 * (1.0 + a.norm()));
            // Minimality: no earlier segment hits the line.
            let q = C::new(0.0, -1.0) / p.c;
            let d = C::new(1.0, 0.0) / p.c;
            for m in 1..z.n as i64 {
                let (a, b) = chain.segment(m).unwrap();
                if let Some(t) = segment_line_t(a, b, q, d) {
                    assert!(!(1e-9..=1.0 - 1e-9).contains(&t), "earlier hit at m={m}");
                }
            }
        }
        assert!(found > 50);
    }

    #[test]
    fn no_zeta_deep_spiral() {
        // All forward segments shrink inside the 1/r disk without touching
        // the line for some parameters; classification is the ram's head.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut seen = false;
        for _ in 0..2000 {
            let p = random_param(&mut rng, 1.02, 1.6);
            let z = find_zeta(&p).unwrap();
            if !z.exists {
                seen = true;
                let rep = build_perimeter(&p).unwrap();
                assert_eq!(rep.classification, PerimeterClass::RamsHead);
                assert!(!rep.outer_boundary.closed);
                assert!(rep.inner_boundary.is_some());
                break;
            }
        }
        assert!(seen, "expected at least one spiral without a crossing");
    }

    #[test]
    fn side_count_odd_when_zeta_exists() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.02, 1.5);
            let rep = build_perimeter(&p).unwrap();
            if rep.zeta.exists {
                assert_eq!(rep.side_count % 2, 1, "c={}", p.c);
                assert_eq!(rep.side_count as u32, 2 * rep.zeta.n + 1);
            }
        }
    }

    #[test]
    fn s_regions_recursion_and_mirrors() {
        let p = param(0.5567, 0.8471);
        let clip = p.escape_radius().unwrap();
        let (regions, _) = build_s_regions(&p, clip, 16).unwrap();
        let get = |k: i64, m: bool| {
            regions
                .iter()
                .find(|r| r.index == k && r.mirrored == m)
                .map(|r| r.vertices.clone())
        };
        let s1 = get(1, false).unwrap();
        let s2 = get(2, false).unwrap();
        // Recursion: S_2 = S_1/c clipped to the pre-upper half plane; check
        // region containment both ways on vertices.
        for v in &s2 {
            assert!(p.in_pre_upper(*v) || ((p.c * v).im + 1.0).abs() < 1e-9);
            let back = v * p.c;
            assert!(convex_depth(&s1, back) > -1e-9, "S_2 vertex not from S_1");
        }
        // Every region has its mirror.
        for r in &regions {
            let twin = get(r.index, !r.mirrored).unwrap();
            assert_eq!(twin.len(), r.vertices.len());
            for v in &r.vertices {
                let mv = p.reflect_pfl(*v);
                assert!(twin.iter().any(|t| (t - mv).norm() < 1e-7 * (1.0 + mv.norm())));
            }
        }
        // S_0 = c * S_1.
        let s0 = get(0, false).unwrap();
        for (a, b) in s0.iter().zip(s1.iter()) {
            assert!((a - b * p.c).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn s_interior_points_escape() {
        // Escape regions lie outside the bounded invariant set: points well
        // inside them must escape under iteration.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..20 {
            let p = random_param(&mut rng, 1.1, 1.5);
            let radius = p.escape_radius().unwrap();
            let (regions, _) = build_s_regions(&p, radius, 16).unwrap();
            for r in regions.iter().filter(|r| r.index <= 4) {
                let n = r.vertices.len() as f64;
                let centroid = r.vertices.iter().sum::<C>() / n;
                if convex_depth(&r.vertices, centroid) < 1e-6 {
                    continue; // too thin to probe
                }
                let v = p.iterate_until_escape(centroid, 3000, radius);
                assert!(
                    v.escaped(),
                    "centroid of S_{}{} survived for c={}",
                    r.index,
                    if r.mirrored { "'" } else { "" },
                    p.c
                );
            }
        }
    }

    #[test]
    fn outer_boundary_right_of_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let p = random_param(&mut rng, 1.02, 1.45);
            let rep = build_perimeter(&p).unwrap();
            if !rep.zeta.exists {
                continue;
            }
            let e0 = p.ell0().unwrap();
            for v in &rep.outer_boundary.vertices {
                assert!(v.re >= e0.re - 1e-10, "vertex {v} left of fixed point {e0}");
            }
        }
    }

    #[test]
    fn predicates_match_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.02, 2.0);
            // alpha side
            let g0 = p.gamma0().unwrap();
            let e0 = p.ell0().unwrap();
            if (p.alpha + 1.0).abs() > 1e-6 {
                assert_eq!(g0.re < e0.re, predicate_alpha_vs_gamma(&p));
            }
            // modulus side
            let chain = build_ell_chain(&p, -1, 1).unwrap();
            let em1 = chain.vertex(-1).unwrap();
            if (p.r - std::f64::consts::SQRT_2).abs() > 1e-6 {
                assert_eq!(em1.im > -1.0, predicate_ell_minus1(&p));
            }
        }
    }

    #[test]
    fn l0_invariance_via_second_iterate() {
        // When the predicate holds, two steps return every point of the
        // fixed segment back onto it.
        for (re, im, expect) in [
            (0.0, 1.2, true),
            (0.3, 1.1, true),
            (-1.3, 0.6, false),
            (1.2, 1.2, false),
        ] {
            let p = param(re, im);
            assert_eq!(predicate_l0_in_k(&p), expect, "c={re}+{im}i");
            let e0 = p.ell0().unwrap();
            let e1 = e0 / p.c;
            let mut ok = true;
            for i in 0..200 {
                let t = i as f64 / 199.0;
                let z = e0 + t * (e1 - e0);
                let w = p.apply_n(z, 2);
                // Distance from w to the segment [e0, e1].
                let s = (((w - e0).re * (e1 - e0).re + (w - e0).im * (e1 - e0).im)
                    / (e1 - e0).norm_sqr())
                .clamp(0.0, 1.0);
                if (e0 + s * (e1 - e0) - w).norm() > 1e-8 {
                    ok = false;
                    break;
                }
            }
            assert_eq!(ok, expect, "second-iterate check for c={re}+{im}i");
        }
    }

    #[test]
    fn polygon_class_necessary_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.02, 1.45);
            let rep = build_perimeter(&p).unwrap();
            if rep.classification == PerimeterClass::Polygon {
                assert!(p.alpha >= -1.0 - 1e-12);
                assert!(p.r <= std::f64::consts::SQRT_2 + 1e-12);
            }
        }
    }

    #[test]
    fn polygon_forward_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let mut checked = 0;
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.02, 1.4);
            let rep = build_perimeter(&p).unwrap();
            if rep.classification != PerimeterClass::Polygon {
                continue;
            }
            checked += 1;
            let vs = &rep.outer_boundary.vertices;
            for i in 0..vs.len() {
                let a = vs[i];
                let b = vs[(i + 1) % vs.len()];
                for j in 0..8 {
                    let z = a + (j as f64 / 8.0) * (b - a);
                    let img = p.apply(z).value;
                    assert!(
                        perimeter_violation(&rep.s_regions, img) < 1e-8,
                        "image left P for c={}",
                        p.c
                    );
                }
            }
            if checked >= 20 {
                break;
            }
        }
        assert!(checked >= 5);
    }

    #[test]
    fn segment_before_line_guard() {
        // If two forward segments cross each other, some earlier segment
        // must already have met the folding line.
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..1000 {
            let p = random_param(&mut rng, 1.02, 2.0);
            let chain = build_ell_chain(&p, 0, 12).unwrap();
            let seg = |j: i64| chain.segment(j).unwrap();
            for n in 2..11i64 {
                for m in 1..n {
                    let (a1, b1) = seg(n);
                    let (a2, b2) = seg(m);
                    // Proper crossing test via orientation signs.
                    let d1 = b1 - a1;
                    let d2 = b2 - a2;
                    let s1 = cross(d1, a2 - a1) * cross(d1, b2 - a1);
                    let s2 = cross(d2, a1 - a2) * cross(d2, b1 - a2);
                    if s1 < -1e-18 && s2 < -1e-18 {
                        // Some segment preceding the crossing meets the
                        // folding line (Im = -1); the chain cannot close a
                        // crossing while staying strictly above it.
                        let hit = (1..n).any(|k| {
                            let (a, b) = seg(k);
                            (a.im + 1.0) * (b.im + 1.0) <= 1e-12
                        });
                        assert!(hit, "crossing without earlier fold contact, c={}", p.c);
                    }
                }
            }
        }
    }

    #[test]
    fn csv_round_shape() {
        let b = Boundary {
            vertices: vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0)],
            closed: true,
        };
        let csv = boundary_to_csv(&b);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], lines[3]);
        assert_eq!(lines[1], "1,0");
    }

    #[test]
    fn clip_half_plane_square() {
        let sq = vec![
            C::new(-1.0, -1.0),
            C::new(1.0, -1.0),
            C::new(1.0, 1.0),
            C::new(-1.0, 1.0),
        ];
        let right = clip_half_plane(&sq, C::new(0.0, 0.0), C::new(1.0, 0.0));
        assert_eq!(right.len(), 4);
        for v in &right {
            assert!(v.re >= -1e-12);
        }
        let gone = clip_half_plane(&sq, C::new(2.0, 0.0), C::new(1.0, 0.0));
        assert!(gone.len() < 3);
    }
}
