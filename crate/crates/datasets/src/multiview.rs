use ccalign_tensor::Tensor;

use crate::error::{DataError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Test,
}

impl std::fmt::Display for SplitTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitTag::Train => write!(f, "train"),
            SplitTag::Test => write!(f, "test"),
        }
    }
}

/// Paired view matrices with optional labels. Row `i` of `x` corresponds to
/// row `i` of `y`; transforms must never permute rows independently.
#[derive(Clone, Debug)]
pub struct MultiViewDataset {
    x: Tensor,
    y: Tensor,
    labels: Option<Vec<i64>>,
    split: SplitTag,
}

impl MultiViewDataset {
    pub fn new(
        x: Tensor,
        y: Tensor,
        labels: Option<Vec<i64>>,
        split: SplitTag,
    ) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(DataError::RowMismatch {
                x_rows: x.rows(),
                y_rows: y.rows(),
            });
        }
        if let Some(l) = &labels {
            if l.len() != x.rows() {
                return Err(DataError::LabelMismatch {
                    labels: l.len(),
                    rows: x.rows(),
                });
            }
        }
        Ok(Self {
            x,
            y,
            labels,
            split,
        })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn dim_x(&self) -> usize {
        self.x.cols()
    }

    pub fn dim_y(&self) -> usize {
        self.y.cols()
    }

    pub fn x(&self) -> &Tensor {
        &self.x
    }

    pub fn y(&self) -> &Tensor {
        &self.y
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn split(&self) -> SplitTag {
        self.split
    }

    /// Gather the given rows from both views, preserving pairing.
    pub fn batch(&self, rows: &[usize]) -> (Tensor, Tensor) {
        (gather(&self.x, rows), gather(&self.y, rows))
    }

    /// First `n` rows of both views (labels included), as a new dataset.
    pub fn take(&self, n: usize) -> Self {
        let n = n.min(self.n());
        let rows: Vec<usize> = (0..n).collect();
        let (x, y) = self.batch(&rows);
        Self {
            x,
            y,
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
            split: self.split,
        }
    }

    /// Apply a per-row transform to one view. The closure sees each row and
    /// returns its replacement (same width), so pairing is untouched.
    pub fn map_view<F>(&self, which: View, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &[f64]) -> Vec<f64>,
    {
        let src = match which {
            View::X => &self.x,
            View::Y => &self.y,
        };
        let cols = src.cols();
        let mut data = Vec::with_capacity(src.len());
        for i in 0..src.rows() {
            let row = f(i, src.row(i));
            assert_eq!(row.len(), cols, "map_view must preserve row width");
            data.extend_from_slice(&row);
        }
        let mapped = Tensor::new(vec![src.rows(), cols], data)?;
        let (x, y) = match which {
            View::X => (mapped, self.y.clone()),
            View::Y => (self.x.clone(), mapped),
        };
        Self::new(x, y, self.labels.clone(), self.split)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    X,
    Y,
}

impl std::fmt::Display for View {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            View::X => write!(f, "x"),
            View::Y => write!(f, "y"),
        }
    }
}

pub(crate) fn gather(t: &Tensor, rows: &[usize]) -> Tensor {
    let c = t.cols();
    let mut data = Vec::with_capacity(rows.len() * c);
    for &r in rows {
        data.extend_from_slice(t.row(r));
    }
    Tensor::from_vec(vec![rows.len(), c], data)
}
