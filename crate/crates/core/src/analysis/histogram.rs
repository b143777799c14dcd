use serde::Serialize;

/// Fixed-width histogram over `[lo, hi)` with half-open bins and a single
/// bucket for everything outside the range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub overflow: usize,
    pub normalized: bool,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.overflow
    }

    pub fn in_range(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Bin index containing `v`, if in range.
    pub fn bin_of(&self, v: f64) -> Option<usize> {
        let lo = self.edges[0];
        let w = self.width();
        if !(v >= lo) {
            return None;
        }
        let n = self.counts.len();
        if !(v < self.edges[n]) {
            return None;
        }
        // Division can land one bin off near an edge; the edges decide.
        let mut i = (((v - lo) / w).floor() as usize).min(n - 1);
        if i > 0 && v < self.edges[i] {
            i -= 1;
        } else if i + 1 < n && v >= self.edges[i + 1] {
            i += 1;
        }
        Some(i)
    }

    /// Bin fractions relative to the total sample count.
    pub fn fractions(&self) -> Vec<f64> {
        let n = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Bins that are circular local maxima holding at least `min_fraction`
    /// of the samples.
    pub fn circular_peaks(&self, min_fraction: f64) -> Vec<usize> {
        let n = self.counts.len();
        let total = self.total().max(1) as f64;
        (0..n)
            .filter(|&i| {
                let c = self.counts[i];
                let prev = self.counts[(i + n - 1) % n];
                let next = self.counts[(i + 1) % n];
                c as f64 / total >= min_fraction && c >= prev && c >= next && c > 0
            })
            .collect()
    }

    pub fn top_fraction(&self) -> f64 {
        let n = self.total().max(1) as f64;
        self.counts.iter().copied().max().unwrap_or(0) as f64 / n
    }
}

/// Histogram of `values` over `[lo, hi)` with bins of `width`.
///
/// The number of bins is `ceil((hi - lo) / width)`; values outside the range
/// (and NaNs) land in the overflow bucket.
pub fn histogram(values: &[f64], width: f64, lo: f64, hi: f64) -> Histogram {
    assert!(width > 0.0, "bin width must be positive");
    assert!(hi > lo, "empty histogram range");
    let n = ((hi - lo) / width - 1e-9).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=n).map(|i| lo + i as f64 * width).collect();
    let mut h = Histogram {
        edges,
        counts: vec![0; n],
        overflow: 0,
        normalized: false,
    };
    for &v in values {
        match h.bin_of(v) {
            Some(i) => h.counts[i] += 1,
            None => h.overflow += 1,
        }
    }
    h
}

/// Histogram whose range is aligned to multiples of `width` and covers all
/// values in both slices, so two samples can be compared bin by bin.
pub fn aligned_histograms(a: &[f64], b: &[f64], width: f64) -> (Histogram, Histogram) {
    let finite = a.iter().chain(b).copied().filter(|v| v.is_finite());
    let (mn, mx) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if mn.is_finite() {
        let lo = (mn / width).floor() * width;
        let hi = ((mx / width).floor() + 1.0) * width;
        (lo, hi)
    } else {
        (0.0, width)
    };
    (histogram(a, width, lo, hi), histogram(b, width, lo, hi))
}

/// Total-variation distance between two histograms on identical bins,
/// each normalized by its own total.
pub fn total_variation(a: &Histogram, b: &Histogram) -> f64 {
    assert_eq!(a.edges, b.edges, "histograms must share bins");
    let pa = a.fractions();
    let pb = b.fractions();
    let na = a.total().max(1) as f64;
    let nb = b.total().max(1) as f64;
    let bins: f64 = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum();
    0.5 * (bins + (a.overflow as f64 / na - b.overflow as f64 / nb).abs())
}
