//! Empirical topological-entropy estimation by counting distinct binary
//! itineraries over the two-cell partition (above / below the pre-folding
//! line in the dynamical sense: whether the map acts linearly).

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::param::Parameter;
use crate::regime::{classify, RegimeTag};

/// Distinct-itinerary counts per word length, plus how many samples
/// survived deep enough to contribute.
#[derive(Debug, Clone)]
pub struct ItineraryCounts {
    pub n_max: usize,
    pub counts: Vec<usize>,
    pub survivors: usize,
}

#[derive(Debug, Clone)]
pub struct EntropyEstimate {
    pub n_values: Vec<usize>,
    pub log_counts: Vec<f64>,
    /// Fitted growth rate in nats per iterate.
    pub slope: f64,
    /// Closed-form value when the regime provides one.
    pub theoretical: Option<f64>,
    /// Upper bound log min(2, r^2).
    pub bound: f64,
}

fn itinerary_of(p: &Parameter, z0: Complex64, n_max: usize, radius: f64) -> Option<u64> {
    let mut z = z0;
    let mut word = 0u64;
    for j in 0..n_max {
        if z.norm_sqr() > radius * radius {
            return None;
        }
        let step = p.apply(z);
        if !step.folded {
            word |= 1u64 << j;
        }
        z = step.value;
    }
    if z.norm_sqr() > radius * radius {
        return None;
    }
    Some(word)
}

/// Counts distinct length-n itineraries among the samples for every
/// n <= n_max. Samples escaping within n_max steps are dropped; errors if
/// none remain.
pub fn itinerary_counts(
    p: &Parameter,
    samples: &[Complex64],
    n_max: usize,
) -> Result<ItineraryCounts> {
    assert!(n_max >= 1 && n_max <= 64);
    let radius = p.escape_radius()?;

    #[cfg(feature = "parallel")]
    let words: Vec<Option<u64>> = {
        use rayon::prelude::*;
        samples
            .par_iter()
            .map(|&z| itinerary_of(p, z, n_max, radius))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let words: Vec<Option<u64>> = samples
        .iter()
        .map(|&z| itinerary_of(p, z, n_max, radius))
        .collect();

    let survivors: Vec<u64> = words.into_iter().flatten().collect();
    if survivors.is_empty() {
        return Err(Error::NoSurvivors);
    }

    let mut counts = Vec::with_capacity(n_max);
    let mut set: HashSet<u64> = HashSet::with_capacity(survivors.len());
    for n in 1..=n_max {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        set.clear();
        for w in &survivors {
            set.insert(w & mask);
        }
        counts.push(set.len());
    }
    Ok(ItineraryCounts { n_max, counts, survivors: survivors.len() })
}

/// Least-squares slope of log counts over the window n in
/// [window.0, window.1]. The window is cut short before counts saturate
/// against the sample budget (half the survivors); fewer than 3 usable
/// points is an error.
pub fn estimate_entropy(
    p: &Parameter,
    ic: &ItineraryCounts,
    window: (usize, usize),
) -> Result<EntropyEstimate> {
    let (lo, hi) = window;
    let hi = hi.min(ic.n_max);
    let mut n_values = Vec::new();
    let mut log_counts = Vec::new();
    for n in lo..=hi {
        let count = ic.counts[n - 1];
        if count * 2 >= ic.survivors {
            break;
        }
        n_values.push(n);
        log_counts.push((count as f64).ln());
    }
    if n_values.len() < 3 {
        return Err(Error::DegenerateWindow(n_values.len()));
    }

    let m = n_values.len() as f64;
    let sx: f64 = n_values.iter().map(|&n| n as f64).sum();
    let sy: f64 = log_counts.iter().sum();
    let sxx: f64 = n_values.iter().map(|&n| (n * n) as f64).sum();
    let sxy: f64 = n_values.iter().zip(&log_counts).map(|(&n, &y)| n as f64 * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    let theoretical = match classify(p.c).tag {
        RegimeTag::RealSegment { .. } if p.alpha > 1.0 && p.alpha < 2.0 => Some(p.alpha.ln()),
        RegimeTag::ComplexPolygon => Some(2.0 * p.r.ln()),
        _ => None,
    };
    let bound = p.r.powi(2).min(2.0).ln();
    Ok(EntropyEstimate { n_values, log_counts, slope, theoretical, bound })
}

/// Keeps only samples whose orbit stays inside the escape disk for `depth`
/// steps. Near slowly-expanding parameters the itinerary length alone is
/// far too shallow a filter: almost any point survives a dozen steps, and
/// counting its itinerary would measure the sampling box instead of the
/// invariant set.
pub fn filter_bounded(p: &Parameter, samples: &[Complex64], depth: u32) -> Result<Vec<Complex64>> {
    let radius = p.escape_radius()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(samples
            .par_iter()
            .copied()
            .filter(|&z| !p.iterate_until_escape(z, depth, radius).escaped())
            .collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(samples
            .iter()
            .copied()
            .filter(|&z| !p.iterate_until_escape(z, depth, radius).escaped())
            .collect())
    }
}

/// CSV dump: `n,count,log_count`.
pub fn counts_csv(ic: &ItineraryCounts) -> String {
    let mut out = String::from("n,count,log_count\n");
    for (i, &count) in ic.counts.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, count, (count as f64).ln()));
    }
    out
}

/// Evenly spaced samples on the segment [a, b].
pub fn segment_samples(a: Complex64, b: Complex64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|i| a + (i as f64 / (count - 1) as f64) * (b - a))
        .collect()
}

/// Grid samples over an axis-aligned box.
pub fn grid_samples(
    lo: Complex64,
    hi: Complex64,
    nx: usize,
    ny: usize,
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nx * ny);
    for jy in 0..ny {
        let t = jy as f64 / (ny - 1).max(1) as f64;
        for jx in 0..nx {
            let s = jx as f64 / (nx - 1).max(1) as f64;
            out.push(Complex64::new(
                lo.re + s * (hi.re - lo.re),
                lo.im + t * (hi.im - lo.im),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn param(re: f64, im: f64) -> Parameter {
        Parameter::canonicalize(C::new(re, im))
    }

    #[test]
    fn two_cells_at_length_one() {
        let p = param(1.5, 0.0);
        let samples = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 10_000);
        let ic = itinerary_counts(&p, &samples, 8).unwrap();
        assert_eq!(ic.counts[0], 2);
        // Counts never decrease and respect both ceilings.
        for n in 1..8 {
            assert!(ic.counts[n] >= ic.counts[n - 1]);
            assert!(ic.counts[n] <= 1 << (n + 1));
            assert!(ic.counts[n] <= ic.survivors);
        }
    }

    #[test]
    fn constant_orbit_single_itinerary() {
        let p = param(1.5, 0.0);
        let samples = vec![C::new(0.0, 0.0); 50];
        let ic = itinerary_counts(&p, &samples, 10).unwrap();
        assert!(ic.counts.iter().all(|&c| c == 1));
    }

    #[test]
    fn tent_slope_recovered() {
        let p = param(1.5, 0.0);
        let samples = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 100_000);
        let ic = itinerary_counts(&p, &samples, 14).unwrap();
        let est = estimate_entropy(&p, &ic, (6, 14)).unwrap();
        assert!((est.slope - 1.5f64.ln()).abs() < 0.05, "slope {}", est.slope);
        assert_eq!(est.theoretical, Some(1.5f64.ln()));
        assert!((est.bound - 2.0f64.ln().min(1.5f64.powi(2).ln())).abs() < 1e-12);
        assert!(est.slope <= 2.0f64.ln() + 0.05);
    }

    #[test]
    fn full_shift_beyond_two() {
        // Real parameter past 2: surviving points realize every word until
        // coverage runs out.
        let p = param(2.5, 0.0);
        let samples = segment_samples(C::new(0.0, -0.8), C::new(0.0, 0.0), 200_000);
        let ic = itinerary_counts(&p, &samples, 8).unwrap();
        for n in 1..=8usize {
            assert_eq!(ic.counts[n - 1], 1 << n, "n={n}");
        }
    }

    #[test]
    fn doubling_samples_never_decreases_counts() {
        let p = param(1.5, 0.0);
        let coarse = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 20_000);
        let fine = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 40_000);
        let a = itinerary_counts(&p, &coarse, 12).unwrap();
        let b = itinerary_counts(&p, &fine, 12).unwrap();
        for n in 0..12 {
            assert!(b.counts[n] >= a.counts[n]);
        }
    }

    #[test]
    fn no_survivors_error() {
        let p = param(3.0, 0.0);
        let samples = vec![C::new(5.0, 5.0); 10];
        assert!(matches!(itinerary_counts(&p, &samples, 6), Err(Error::NoSurvivors)));
    }

    #[test]
    fn degenerate_window_rejected() {
        let p = param(1.5, 0.0);
        let samples = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 100);
        let ic = itinerary_counts(&p, &samples, 6).unwrap();
        // With 100 samples the saturation guard kills the window quickly.
        match estimate_entropy(&p, &ic, (6, 6)) {
            Err(Error::DegenerateWindow(_)) => {}
            other => panic!("expected degenerate window, got {other:?}"),
        }
    }

    #[test]
    fn polygon_regime_quadratic_slope() {
        use crate::geometry::build_perimeter;
        use crate::regime::RegimeTag;
        // Scan for a polygon-class parameter at moderate modulus.
        let mut found = None;
        'scan: for ri in 0..6 {
            let r = 1.12 + 0.02 * ri as f64;
            for ti in 1..40 {
                let th = 0.05 + ti as f64 * 0.07;
                let c = C::from_polar(r, th);
                if classify(c).tag == RegimeTag::ComplexPolygon {
                    found = Some(c);
                    break 'scan;
                }
            }
        }
        let c = found.expect("no polygon parameter in scan range");
        let p = Parameter::canonicalize(c);
        let rep = build_perimeter(&p).unwrap();
        // Sample the bounding box of the outer boundary.
        let vs = &rep.outer_boundary.vertices;
        let (mut lo, mut hi) = (vs[0], vs[0]);
        for v in vs {
            lo = C::new(lo.re.min(v.re), lo.im.min(v.im));
            hi = C::new(hi.re.max(v.re), hi.im.max(v.im));
        }
        let raw = grid_samples(lo, hi, 1024, 1024);
        let samples = filter_bounded(&p, &raw, 600).unwrap();
        assert!(samples.len() > 10_000, "only {} bounded samples", samples.len());
        // Cell counts converge to the r^2 growth rate only past a slow
        // polynomial prefactor, so fit a deeper window than the real case.
        let ic = itinerary_counts(&p, &samples, 24).unwrap();
        let est = estimate_entropy(&p, &ic, (16, 24)).unwrap();
        let want = 2.0 * p.r.ln();
        assert!(
            (est.slope - want).abs() < 0.08,
            "slope {} vs 2 log r {} for c={c}",
            est.slope,
            want
        );
        assert_eq!(est.theoretical, Some(want));
        assert!(est.slope <= 2.0f64.ln() + 0.05);
    }

    #[test]
    fn csv_header_and_rows() {
        let p = param(1.5, 0.0);
        let samples = segment_samples(C::new(0.0, -4.0 / 3.0), C::new(0.0, 0.0), 1000);
        let ic = itinerary_counts(&p, &samples, 4).unwrap();
        let csv = counts_csv(&ic);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,count,log_count");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,2,"));
    }
}
