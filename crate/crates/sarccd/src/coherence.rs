//! Windowed sample coherence, multilook averaging and coherence-difference
//! (CCD) map formation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::scene::{is_no_data, ComplexScene, RasterKind, ScalarRaster};

/// Window sums at or above this many terms switch to compensated summation.
const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// Centered estimation window; both dimensions must be odd so the window has
/// a well-defined center pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorWindow {
    rows: usize,
    cols: usize,
}

impl EstimatorWindow {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(Error::DegenerateWindow { rows, cols });
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn area(&self) -> usize {
        self.rows * self.cols
    }
}

impl Default for EstimatorWindow {
    /// 5x5: resolves bridge-scale features at medium-resolution pixels while
    /// keeping the zero-coherence estimation bias moderate.
    fn default() -> Self {
        Self { rows: 5, cols: 5 }
    }
}

/// Sample coherence magnitude of two equally-sized complex grids, f64 samples.
///
/// This is the numeric core behind [`estimate_coherence`]. Per pixel `p`, with
/// `W` the estimation window centered at `p` (clipped at the grid edges):
///
/// ```text
/// coh(p) = |sum_W a * conj(b)| / sqrt(sum_W |a|^2 * sum_W |b|^2)
/// ```
///
/// Pixels whose window has zero energy in either grid become the no-data
/// sentinel (NaN). Every valid output lies in [0, 1]; the quotient is clamped
/// at 1 to absorb last-ulp rounding above the Cauchy-Schwarz bound.
///
/// The computation is symmetric in its inputs bit-for-bit, and each output
/// pixel depends only on its own window, so any evaluation order (including a
/// parallel one) produces identical bits.
pub fn coherence_map(
    a: &[Complex64],
    b: &[Complex64],
    width: usize,
    height: usize,
    window: EstimatorWindow,
) -> Result<Vec<f64>> {
    let expected = width * height;
    if a.len() != expected {
        return Err(Error::SampleCountMismatch {
            expected,
            actual: a.len(),
        });
    }
    if b.len() != expected {
        return Err(Error::SampleCountMismatch {
            expected,
            actual: b.len(),
        });
    }

    // Per-pixel products, computed once; the window pass then only sums.
    let mut cross_re = vec![0.0f64; expected];
    let mut cross_im = vec![0.0f64; expected];
    let mut power_a = vec![0.0f64; expected];
    let mut power_b = vec![0.0f64; expected];
    for i in 0..expected {
        let (ar, ai) = (a[i].re, a[i].im);
        let (br, bi) = (b[i].re, b[i].im);
        cross_re[i] = ar * br + ai * bi;
        cross_im[i] = ai * br - ar * bi;
        power_a[i] = ar * ar + ai * ai;
        power_b[i] = br * br + bi * bi;
    }

    let compensated = window.area() >= COMPENSATED_SUM_THRESHOLD;
    let half_rows = window.rows() / 2;
    let half_cols = window.cols() / 2;
    let mut out = vec![0.0f64; expected];
    for row in 0..height {
        let r0 = row.saturating_sub(half_rows);
        let r1 = (row + half_rows).min(height - 1);
        for col in 0..width {
            let c0 = col.saturating_sub(half_cols);
            let c1 = (col + half_cols).min(width - 1);
            let (s_re, s_im, p_a, p_b) = if compensated {
                window_sums_compensated(&cross_re, &cross_im, &power_a, &power_b, width, r0, r1, c0, c1)
            } else {
                window_sums_plain(&cross_re, &cross_im, &power_a, &power_b, width, r0, r1, c0, c1)
            };
            out[row * width + col] = coherence_from_sums(s_re, s_im, p_a, p_b);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn window_sums_plain(
    cross_re: &[f64],
    cross_im: &[f64],
    power_a: &[f64],
    power_b: &[f64],
    width: usize,
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
) -> (f64, f64, f64, f64) {
    let mut s_re = 0.0;
    let mut s_im = 0.0;
    let mut p_a = 0.0;
    let mut p_b = 0.0;
    for r in r0..=r1 {
        let lo = r * width + c0;
        let hi = r * width + c1;
        for i in lo..=hi {
            s_re += cross_re[i];
            s_im += cross_im[i];
            p_a += power_a[i];
            p_b += power_b[i];
        }
    }
    (s_re, s_im, p_a, p_b)
}

#[allow(clippy::too_many_arguments)]
fn window_sums_compensated(
    cross_re: &[f64],
    cross_im: &[f64],
    power_a: &[f64],
    power_b: &[f64],
    width: usize,
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
) -> (f64, f64, f64, f64) {
    let mut s_re = KahanSum::new();
    let mut s_im = KahanSum::new();
    let mut p_a = KahanSum::new();
    let mut p_b = KahanSum::new();
    for r in r0..=r1 {
        let lo = r * width + c0;
        let hi = r * width + c1;
        for i in lo..=hi {
            s_re.add(cross_re[i]);
            s_im.add(cross_im[i]);
            p_a.add(power_a[i]);
            p_b.add(power_b[i]);
        }
    }
    (s_re.value(), s_im.value(), p_a.value(), p_b.value())
}

#[inline]
fn coherence_from_sums(s_re: f64, s_im: f64, p_a: f64, p_b: f64) -> f64 {
    if p_a <= 0.0 || p_b <= 0.0 {
        return f64::NAN;
    }
    let numerator = (s_re * s_re + s_im * s_im).sqrt();
    let denominator = (p_a * p_b).sqrt();
    (numerator / denominator).min(1.0)
}

/// Windowed sample coherence of two co-registered scenes.
///
/// Edge pixels use the clipped (smaller) window rather than padded samples;
/// they are valid output but carry higher estimator variance.
pub fn estimate_coherence(
    a: &ComplexScene,
    b: &ComplexScene,
    window: EstimatorWindow,
) -> Result<ScalarRaster> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            context: "coherence estimation".to_string(),
            expected_width: a.width(),
            expected_height: a.height(),
            actual_width: b.width(),
            actual_height: b.height(),
        });
    }
    if !a.geotransform().bit_eq(b.geotransform()) {
        return Err(Error::GeotransformMismatch {
            scene: "second scene".to_string(),
        });
    }
    let to_c64 = |s: &ComplexScene| {
        s.samples()
            .iter()
            .map(|v| Complex64::new(v.re as f64, v.im as f64))
            .collect::<Vec<_>>()
    };
    let values = coherence_map(&to_c64(a), &to_c64(b), a.width(), a.height(), window)?;
    ScalarRaster::new(
        a.width(),
        a.height(),
        values,
        *a.geotransform(),
        RasterKind::Coherence,
    )
}

/// Block-averages a raster by integer factors.
///
/// Output dimensions are `ceil(height / row_factor) x ceil(width /
/// col_factor)`; each output pixel is the mean of the valid input pixels in
/// its block, or no-data when the block has none. The geotransform's linear
/// terms scale with the factors so block centers keep their geographic
/// position.
pub fn multilook(r: &ScalarRaster, row_factor: usize, col_factor: usize) -> Result<ScalarRaster> {
    if row_factor < 1 || col_factor < 1 {
        return Err(Error::DegenerateFactors {
            row_factor,
            col_factor,
        });
    }
    let out_height = r.height().div_ceil(row_factor);
    let out_width = r.width().div_ceil(col_factor);
    let mut values = vec![f64::NAN; out_width * out_height];
    for out_row in 0..out_height {
        let r0 = out_row * row_factor;
        let r1 = (r0 + row_factor).min(r.height());
        for out_col in 0..out_width {
            let c0 = out_col * col_factor;
            let c1 = (c0 + col_factor).min(r.width());
            let mut sum = KahanSum::new();
            let mut count = 0usize;
            let mut single = 0.0f64;
            for row in r0..r1 {
                for col in c0..c1 {
                    let v = r.value(row, col);
                    if is_no_data(v) {
                        continue;
                    }
                    sum.add(v);
                    count += 1;
                    single = v;
                }
            }
            values[out_row * out_width + out_col] = match count {
                0 => f64::NAN,
                // A one-pixel block must reproduce its value bit-for-bit.
                1 => single,
                n => sum.value() / n as f64,
            };
        }
    }
    let mut gt = *r.geotransform();
    gt.pixel_width *= col_factor as f64;
    gt.col_rotation *= col_factor as f64;
    gt.pixel_height *= row_factor as f64;
    gt.row_rotation *= row_factor as f64;
    ScalarRaster::new(out_width, out_height, values, gt, r.kind())
}

/// Per-pixel coherence difference: pre-event coherence minus post-event
/// coherence.
///
/// No-data in either input propagates. Positive values flag change between
/// the two coherence products, values near zero stable ground, negative
/// values newly stable ground.
pub fn ccd(coh_pre: &ScalarRaster, coh_post: &ScalarRaster) -> Result<ScalarRaster> {
    for (name, r) in [("pre", coh_pre), ("post", coh_post)] {
        if r.kind() != RasterKind::Coherence {
            return Err(Error::KindMismatch {
                expected: format!("coherence ({name} input)"),
                actual: r.kind().label().to_string(),
            });
        }
    }
    if coh_pre.width() != coh_post.width() || coh_pre.height() != coh_post.height() {
        return Err(Error::DimensionMismatch {
            context: "ccd".to_string(),
            expected_width: coh_pre.width(),
            expected_height: coh_pre.height(),
            actual_width: coh_post.width(),
            actual_height: coh_post.height(),
        });
    }
    if !coh_pre.geotransform().bit_eq(coh_post.geotransform()) {
        return Err(Error::GeotransformMismatch {
            scene: "post coherence raster".to_string(),
        });
    }
    let values = coh_pre
        .values()
        .iter()
        .zip(coh_post.values().iter())
        .map(|(&pre, &post)| {
            if is_no_data(pre) || is_no_data(post) {
                f64::NAN
            } else {
                pre - post
            }
        })
        .collect();
    ScalarRaster::new(
        coh_pre.width(),
        coh_pre.height(),
        values,
        *coh_pre.geotransform(),
        RasterKind::Ccd,
    )
}
