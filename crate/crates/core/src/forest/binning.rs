use crate::encoding::FeatureMatrix;

pub(crate) const MAX_BINS: usize = 256;

/// Column-major quantized copy of a feature matrix.
///
/// For feature `f`, bin `b` holds values in `(cuts[f][b-1], cuts[f][b]]`, so
/// a split "bin <= b" is the same as "value <= cuts[f][b]" on raw data.
/// Features with at most [`MAX_BINS`] distinct values are binned exactly.
pub(crate) struct BinnedMatrix {
    pub n_rows: usize,
    pub bins: Vec<u8>,
    pub cuts: Vec<Vec<f64>>,
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

fn cut_points(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.len() <= MAX_BINS {
        return values.windows(2).map(|w| midpoint(w[0], w[1])).collect();
    }
    let n = values.len();
    let mut cuts = Vec::with_capacity(MAX_BINS - 1);
    for q in 1..MAX_BINS {
        let i = q * n / MAX_BINS;
        let c = midpoint(values[i - 1], values[i]);
        if cuts.last().is_none_or(|last| c > *last) {
            cuts.push(c);
        }
    }
    cuts
}

impl BinnedMatrix {
    pub fn new(matrix: &FeatureMatrix) -> BinnedMatrix {
        let n_rows = matrix.n_rows();
        let n_cols = matrix.n_cols();
        let mut bins = vec![0u8; n_rows * n_cols];
        let mut cuts = Vec::with_capacity(n_cols);
        for j in 0..n_cols {
            let column: Vec<f64> = matrix.column(j).collect();
            let c = cut_points(column.clone());
            let out = &mut bins[j * n_rows..(j + 1) * n_rows];
            for (slot, x) in out.iter_mut().zip(&column) {
                *slot = c.partition_point(|cut| cut < x) as u8;
            }
            cuts.push(c);
        }
        BinnedMatrix { n_rows, bins, cuts }
    }

    pub fn n_cols(&self) -> usize {
        self.cuts.len()
    }

    pub fn column(&self, j: usize) -> &[u8] {
        &self.bins[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn n_bins(&self, j: usize) -> usize {
        self.cuts[j].len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn few_distinct_values_bin_exactly() {
        let m = FeatureMatrix::from_rows(
            vec!["x".into()],
            &[vec![0.0], vec![1.0], vec![0.0], vec![5.0]],
            vec![false, true, false, true],
        )
        .unwrap();
        let b = BinnedMatrix::new(&m);
        assert_eq!(b.cuts[0], vec![0.5, 3.0]);
        assert_eq!(b.column(0), &[0, 1, 0, 2]);
    }

    #[test]
    fn many_distinct_values_respect_cuts() {
        let rows: Vec<Vec<f64>> = (0..1000).map(|i| vec![(i as f64).sin()]).collect();
        let m = FeatureMatrix::from_rows(vec!["x".into()], &rows, vec![false; 1000]).unwrap();
        let b = BinnedMatrix::new(&m);
        assert!(b.n_bins(0) <= MAX_BINS);
        for (i, row) in rows.iter().enumerate() {
            let bin = b.column(0)[i] as usize;
            if bin < b.cuts[0].len() {
                assert!(row[0] <= b.cuts[0][bin]);
            }
            if bin > 0 {
                assert!(row[0] > b.cuts[0][bin - 1]);
            }
        }
    }
}
