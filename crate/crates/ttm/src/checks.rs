//! Named runtime invariant suite. The CLI `verify` subcommand runs these
//! and prints one pass/fail line per property; tests reuse them too.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::entropy::{itinerary_counts, segment_samples};
use crate::geometry::{
    build_ell_chain, build_perimeter, perimeter_violation, PerimeterClass,
};
use crate::param::Parameter;
use crate::raster::{
    render_julia, render_param_bubbles, shade_point, Mode, Palette, ShaderConfig, Viewport,
};
use crate::regime::{classify, RegimeTag};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match run() {
        Ok(detail) => CheckResult { name, passed: true, detail },
        Err(detail) => CheckResult { name, passed: false, detail },
    }
}

fn random_param(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> Parameter {
    let r = rng.gen_range(r_lo..r_hi);
    let th = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
    Parameter::canonicalize(Complex64::from_polar(r, th))
}

/// Runs the whole suite with a fixed sampling seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();

    out.push(check("fixed-points", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let p = random_param(&mut rng, 1.01, 3.0);
            if p.apply(Complex64::new(0.0, 0.0)).value != Complex64::new(0.0, 0.0) {
                return Err("origin moved".into());
            }
            let e0 = p.ell0().map_err(|e| e.to_string())?;
            let dev = (p.apply(e0).value - e0).norm() / e0.norm().max(1.0);
            worst = worst.max(dev);
            if dev > 1e-10 {
                return Err(format!("residual {dev} at c={}", p.c));
            }
        }
        Ok(format!("worst relative residual {worst:.2e}"))
    }));

    out.push(check("fold-symmetry", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let m = p.reflect_pfl(z);
            let a = p.apply(z).value;
            let b = p.apply(m).value;
            if (a - b).norm() > 1e-9 * (1.0 + a.norm()) {
                return Err(format!("images differ at c={} z={z}", p.c));
            }
        }
        Ok("mirror points share images".into())
    }));

    out.push(check("conjugation-equivariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
        let phi = |z: Complex64| -z.conj();
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let lhs = phi(p.apply(z).value);
            let rhs = crate::map::apply_c(p.c.conj(), phi(z)).value;
            if (lhs - rhs).norm() > 1e-9 * (1.0 + lhs.norm()) {
                return Err(format!("mismatch at c={}", p.c));
            }
        }
        Ok("phi(z) = -conj(z) intertwines conjugate parameters".into())
    }));

    out.push(check("lipschitz-bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
        for _ in 0..2000 {
            let p = random_param(&mut rng, 1.01, 3.0);
            let z = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let w = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            if (p.apply(z).value - p.apply(w).value).norm() > p.r * (z - w).norm() + 1e-12 {
                return Err(format!("expansion beyond r at c={}", p.c));
            }
        }
        Ok("|f(z)-f(w)| <= r|z-w|".into())
    }));

    out.push(check("escape-soundness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
        for _ in 0..200 {
            let p = random_param(&mut rng, 1.05, 3.0);
            let radius = p.escape_radius().map_err(|e| e.to_string())?;
            let mut z = Complex64::from_polar(radius * 1.01, rng.gen_range(0.0..6.28));
            let mut last = z.norm();
            for _ in 0..40 {
                z = p.apply(z).value;
                if z.norm() <= last {
                    return Err(format!("modulus fell back at c={}", p.c));
                }
                last = z.norm();
            }
        }
        Ok("orbits beyond the certified radius grow monotonically".into())
    }));

    out.push(check("pfl-bisector", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let e0 = p.ell0().map_err(|e| e.to_string())?;
            let e1 = e0 / p.c;
            let mid = (e0 + e1) * 0.5;
            if ((p.c * mid).im + 1.0).abs() / p.r > 1e-9 * (1.0 + mid.norm()) {
                return Err(format!("midpoint off the line at c={}", p.c));
            }
            let u = e1 - e0;
            let v = Complex64::new(1.0, 0.0) / p.c;
            if ((u.re * v.re + u.im * v.im) / (u.norm() * v.norm())).abs() > 1e-8 {
                return Err(format!("segment not perpendicular at c={}", p.c));
            }
        }
        Ok("pre-folding line perpendicularly bisects the fixed segment".into())
    }));

    out.push(check("backward-vertex-vertical", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(6));
        for _ in 0..500 {
            let p = random_param(&mut rng, 1.02, 2.8);
            let chain = build_ell_chain(&p, -1, 1).map_err(|e| e.to_string())?;
            let e0 = chain.vertex(0).map_err(|e| e.to_string())?;
            let em1 = chain.vertex(-1).map_err(|e| e.to_string())?;
            if (em1.re - e0.re).abs() > 1e-9 * (1.0 + e0.norm()) {
                return Err(format!("real parts differ at c={}", p.c));
            }
        }
        Ok("first backward vertex sits directly below the fixed point".into())
    }));

    out.push(check("spiral-mirror-symmetry", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7));
        for _ in 0..300 {
            let p = random_param(&mut rng, 1.05, 2.5);
            let chain = build_ell_chain(&p, -7, 8).map_err(|e| e.to_string())?;
            for k in -6..=6i64 {
                let lhs = p.reflect_pfl(chain.vertex(k).map_err(|e| e.to_string())?);
                let rhs = chain.vertex(-k + 1).map_err(|e| e.to_string())?;
                if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
                    return Err(format!("mirror broke at k={k} c={}", p.c));
                }
            }
        }
        Ok("reflecting vertex k yields vertex 1-k".into())
    }));

    out.push(check("perimeter-symmetry", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(8));
        for _ in 0..60 {
            let p = random_param(&mut rng, 1.02, 1.5);
            let rep = build_perimeter(&p).map_err(|e| e.to_string())?;
            for region in &rep.s_regions {
                if !rep
                    .s_regions
                    .iter()
                    .any(|r| r.index == region.index && r.mirrored != region.mirrored)
                {
                    return Err(format!("region {} lacks a mirror at c={}", region.index, p.c));
                }
            }
        }
        Ok("every escape region is reported with its mirror".into())
    }));

    out.push(check("polygon-forward-invariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9));
        let mut checked = 0;
        for _ in 0..400 {
            let p = random_param(&mut rng, 1.02, 1.4);
            let rep = build_perimeter(&p).map_err(|e| e.to_string())?;
            if rep.classification != PerimeterClass::Polygon {
                continue;
            }
            checked += 1;
            let vs = &rep.outer_boundary.vertices;
            for i in 0..vs.len() {
                let a = vs[i];
                let b = vs[(i + 1) % vs.len()];
                for j in 0..10 {
                    let z = a + (j as f64 / 10.0) * (b - a);
                    if perimeter_violation(&rep.s_regions, p.apply(z).value) > 1e-8 {
                        return Err(format!("boundary image left P at c={}", p.c));
                    }
                }
            }
            if checked >= 15 {
                break;
            }
        }
        if checked == 0 {
            return Err("no polygon parameters sampled".into());
        }
        Ok(format!("checked {checked} polygon parameters"))
    }));

    out.push(check("perimeter-real-bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(10));
        for _ in 0..150 {
            let p = random_param(&mut rng, 1.02, 1.45);
            let rep = build_perimeter(&p).map_err(|e| e.to_string())?;
            if !rep.zeta.exists {
                continue;
            }
            let e0 = p.ell0().map_err(|e| e.to_string())?;
            for v in &rep.outer_boundary.vertices {
                if v.re < e0.re - 1e-10 {
                    return Err(format!("vertex {v} left of the fixed point at c={}", p.c));
                }
            }
        }
        Ok("outer boundary stays right of the fixed point".into())
    }));

    out.push(check("coded-monotonicity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(11));
        for _ in 0..100 {
            let p = random_param(&mut rng, 1.02, 1.4);
            let radius = p.escape_radius().map_err(|e| e.to_string())?;
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..0.0));
            let mut last = 0;
            for bailout in [30u32, 60, 120, 240] {
                let cfg = ShaderConfig { coded_bailout: bailout, ..Default::default() };
                let code = shade_point(p.c, z, radius, &cfg).code;
                if code < last {
                    return Err(format!("code decreased at c={} z={z}", p.c));
                }
                last = code;
            }
        }
        Ok("code iteration nondecreasing in the bailout".into())
    }));

    out.push(check("render-schedule-independence", || {
        let p = Parameter::canonicalize(Complex64::new(0.5567, 0.8471));
        let vp = Viewport::new(Complex64::new(0.0, -0.6), 3.0, 64, 64);
        let cfg = ShaderConfig { mode: Mode::Fastest, ..Default::default() };
        let reference = render_julia(&p, &vp, &cfg).map_err(|e| e.to_string())?.cells;
        #[cfg(feature = "parallel")]
        for threads in [1usize, 4, 16] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let cells = pool.install(|| render_julia(&p, &vp, &cfg).map(|r| r.cells));
            if cells.map_err(|e| e.to_string())? != reference {
                return Err(format!("cells differ with {threads} workers"));
            }
        }
        let seq = {
            let radius = p.escape_radius().map_err(|e| e.to_string())?;
            crate::raster::fill_sequential(64, 64, &|i, j| {
                shade_point(p.c, vp.pixel_center(i, j), radius, &cfg)
            })
        };
        if seq != reference {
            return Err("sequential path disagrees".into());
        }
        Ok("identical cells across schedules".into())
    }));

    out.push(check("param-render-conjugation", || {
        let vp = Viewport::new(Complex64::new(0.2, 0.8), 2.0, 32, 32);
        let cfg = ShaderConfig { max_iter: 300, ..Default::default() };
        for j in 0..32 {
            for i in 0..32 {
                let c = vp.pixel_center(i, j);
                if c.im == 0.0 {
                    continue;
                }
                let shade = |cc: Complex64| -> Result<Option<crate::raster::Cell>, String> {
                    let p = Parameter::canonicalize(cc);
                    if p.r <= 1.0 {
                        return Ok(None);
                    }
                    let radius = p.escape_radius().map_err(|e| e.to_string())?;
                    let g0 = p.gamma0().map_err(|e| e.to_string())?;
                    Ok(Some(shade_point(p.c, g0, radius, &cfg)))
                };
                if shade(c)? != shade(c.conj())? {
                    return Err(format!("conjugate pixels differ at {c}"));
                }
            }
        }
        Ok("corner-point shading symmetric under conjugation".into())
    }));

    out.push(check("real-segment-dynamics", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(12));
        for a in [1.5f64, -1.5, 1.8] {
            let p = Parameter::canonicalize(Complex64::new(a, 0.0));
            let (lo, hi) = match classify(Complex64::new(a, 0.0)).tag {
                RegimeTag::RealSegment { endpoints } => endpoints,
                other => return Err(format!("unexpected regime {other:?}")),
            };
            let radius = p.escape_radius().map_err(|e| e.to_string())?;
            for _ in 0..200 {
                let t: f64 = rng.gen_range(0.0..1.0);
                if p.iterate_until_escape(lo + t * (hi - lo), 1000, radius).escaped() {
                    return Err(format!("segment point escaped for c={a}"));
                }
                let off: f64 = rng.gen_range(1e-3..0.3);
                if !p
                    .iterate_until_escape(hi + Complex64::new(0.0, off), 4000, radius)
                    .escaped()
                {
                    return Err(format!("outside point survived for c={a}"));
                }
            }
        }
        Ok("segment points persist, outside points flee".into())
    }));

    out.push(check("unit-period-two", || {
        let p = Parameter::canonicalize(Complex64::new(-1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(13));
        for _ in 0..1000 {
            let z = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-1.0..1.0));
            if p.apply_n(z, 2) != z {
                return Err(format!("second iterate moved {z}"));
            }
        }
        Ok("second iterate is the exact identity on the strip".into())
    }));

    out.push(check("tent-conjugacy", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(14));
        for a in [1.3f64, 1.5, 1.9] {
            let p = Parameter::canonicalize(Complex64::new(a, 0.0));
            let tent = |x: f64| if x <= 0.5 { a * x } else { a * (1.0 - x) };
            let phi = |w: Complex64| (p.c * Complex64::new(0.0, 1.0) * w / 2.0).re;
            for _ in 0..300 {
                let z = Complex64::new(0.0, -rng.gen_range(0.0..2.0 / a));
                if (phi(p.apply(z).value) - tent(phi(z))).abs() > 1e-12 {
                    return Err(format!("conjugacy broke for c={a}"));
                }
            }
        }
        Ok("axis dynamics conjugate to the slope-r tent map".into())
    }));

    out.push(check("classification-consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(15));
        for _ in 0..100 {
            let p = random_param(&mut rng, 1.01, 1.6);
            let rep = build_perimeter(&p).map_err(|e| e.to_string())?;
            let want = match rep.classification {
                PerimeterClass::Polygon => RegimeTag::ComplexPolygon,
                PerimeterClass::PolygonWithHoles => RegimeTag::ComplexPolygonWithHoles,
                PerimeterClass::RamsHead => RegimeTag::ComplexRamsHead,
            };
            if classify(p.c).tag != want {
                return Err(format!("classifier disagrees at c={}", p.c));
            }
        }
        Ok("classifier matches the perimeter report".into())
    }));

    out.push(check("itinerary-count-ceilings", || {
        let p = Parameter::canonicalize(Complex64::new(1.5, 0.0));
        let samples =
            segment_samples(Complex64::new(0.0, -4.0 / 3.0), Complex64::new(0.0, 0.0), 20_000);
        let ic = itinerary_counts(&p, &samples, 12).map_err(|e| e.to_string())?;
        for (i, &count) in ic.counts.iter().enumerate() {
            if count > (1usize << (i + 1)).min(ic.survivors) {
                return Err(format!("count {count} too large at n={}", i + 1));
            }
            if i > 0 && count < ic.counts[i - 1] {
                return Err(format!("count decreased at n={}", i + 1));
            }
        }
        Ok("counts monotone and within both ceilings".into())
    }));

    out.push(check("ppm-byte-determinism", || {
        let vp = Viewport::new(Complex64::new(0.2, 0.9), 2.4, 32, 32);
        let raster = render_param_bubbles(&vp, 30);
        let palette = Palette::default();
        let a = crate::raster::ppm::ppm_bytes(&raster, &palette, Mode::EscapeTime);
        let b = crate::raster::ppm::ppm_bytes(
            &render_param_bubbles(&vp, 30),
            &palette,
            Mode::EscapeTime,
        );
        if a != b {
            return Err("bytes differ between identical renders".into());
        }
        if !a.starts_with(b"P6\n32 32\n255\n") {
            return Err("bad header".into());
        }
        Ok(format!("{} bytes, stable", a.len()))
    }));

    out
}

/// Formats the suite outcome; one line per check.
pub fn format_results(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{} {} - {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_suite_passes() {
        let results = run_all(2024);
        let text = format_results(&results);
        assert!(
            results.iter().all(|r| r.passed),
            "failing checks:\n{text}"
        );
        assert!(text.lines().count() >= 15);
    }
}
