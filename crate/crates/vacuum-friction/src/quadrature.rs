//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! A 7/15-point Gauss–Kronrod rule is applied per panel; the panel with the
//! largest error estimate is bisected until the accumulated error estimate
//! meets the requested tolerance. Panel selection uses a total order
//! (error, insertion sequence), and all arithmetic is straight-line `f64`,
//! so results are bit-reproducible for identical inputs.
//!
//! Integrands return `Result` so that domain failures deep inside a kernel
//! (for example, a tabulated material queried above its grid) propagate out
//! of the integration loop instead of being silently absorbed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae (non-negative half, descending order).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Weights of the 15-point Kronrod rule, aligned with `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_82,
];

/// Weights of the embedded 7-point Gauss rule (nodes XGK[1], XGK[3],
/// XGK[5], and the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Converged integral with diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOutcome {
    /// Integral estimate.
    pub value: f64,
    /// Absolute error estimate (sum of panel estimates).
    pub abs_error: f64,
    /// Number of integrand evaluations performed.
    pub evaluations: u64,
    /// Number of panel bisections performed.
    pub subdivisions: u32,
}

/// One evaluated panel in the subdivision queue.
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal && self.seq == other.seq
    }
}
impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by insertion order so the heap
        // pop sequence is fully deterministic.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Scale a raw Kronrod−Gauss difference into a reliable error estimate
/// (the standard QUADPACK heuristic).
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err.abs();
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// Apply the 7/15 Gauss–Kronrod rule on `[a, b]`.
///
/// Returns (integral, error estimate, ∫|f|, ∫|f − mean|).
fn kronrod_panel<F>(f: &mut F, a: f64, b: f64, evaluations: &mut u64) -> Result<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(centre)?;
    *evaluations += 1;

    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(centre - x)?;
        let f2 = f(centre + x)?;
        *evaluations += 2;
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * abs_half;
    let resasc = resasc * abs_half;
    let error = rescale_error((resk - resg) * half, resabs, resasc);
    Ok((value, error, resabs, resasc))
}

/// Integrate `f` over the range spanned by `breakpoints`, refining panels
/// adaptively until the total error estimate satisfies
/// `err ≤ max(rel_tol·|I|, abs_floor, roundoff floor)`.
///
/// `breakpoints` must contain at least two values; they are sorted and
/// deduplicated, each adjacent pair seeding one initial panel. Placing
/// breakpoints on known kinks or removable singularities keeps the rule's
/// smoothness assumptions valid on every panel.
pub fn integrate<F>(
    mut f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_floor: f64,
    max_subdivisions: u32,
) -> Result<QuadratureOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut edges: Vec<f64> = breakpoints.to_vec();
    if edges.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite breakpoint".into()));
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    if edges.len() < 2 {
        return Err(Error::Domain(
            "need at least two distinct breakpoints".into(),
        ));
    }

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut evaluations: u64 = 0;
    let mut result = 0.0_f64;
    let mut errsum = 0.0_f64;
    let mut resabs_total = 0.0_f64;

    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (value, error, resabs, _) = kronrod_panel(&mut f, a, b, &mut evaluations)?;
        result += value;
        errsum += error;
        resabs_total += resabs;
        heap.push(Panel {
            a,
            b,
            value,
            error,
            seq,
        });
        seq += 1;
    }

    let mut subdivisions: u32 = 0;
    loop {
        let tolerance = (rel_tol * result.abs())
            .max(abs_floor)
            .max(50.0 * f64::EPSILON * resabs_total);
        if errsum <= tolerance {
            return Ok(QuadratureOutcome {
                value: result,
                abs_error: errsum,
                evaluations,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                partial: result,
                error_estimate: errsum,
                evaluations,
                subdivisions,
            });
        }

        let worst = heap.pop().expect("heap cannot be empty while errsum > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Panel narrower than machine spacing: no further refinement
            // is possible.
            return Err(Error::QuadratureNonConvergence {
                partial: result,
                error_estimate: errsum,
                evaluations,
                subdivisions,
            });
        }

        // The roundoff floor stays pinned to the initial-panel ∫|f|, so the
        // children's resabs are not accumulated here.
        let (v1, e1, _, _) = kronrod_panel(&mut f, worst.a, mid, &mut evaluations)?;
        let (v2, e2, _, _) = kronrod_panel(&mut f, mid, worst.b, &mut evaluations)?;
        result += v1 + v2 - worst.value;
        errsum += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            seq,
        });
        seq += 1;
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            seq,
        });
        seq += 1;
        subdivisions += 1;
    }
}
