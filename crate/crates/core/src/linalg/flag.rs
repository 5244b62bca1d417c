use super::{orthonormal_columns, subspace_distance, Matrix, ProjectivePoint, SubspacePoint};
use crate::error::{Error, Result};

/// A nested flag F_1 ⊂ … ⊂ F_r with dim F_i = i, stored through an
/// adapted orthonormal frame whose first i columns span F_i.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagPoint {
    frame: Matrix,
    /// Frame of F_r kept verbatim when only the sub-flag was replaced.
    top_frame: Option<Matrix>,
}

impl FlagPoint {
    /// Flag of leading column spans of `m` (columns must be independent).
    pub fn from_frame(m: &Matrix) -> Result<Self> {
        let q = orthonormal_columns(m, 1e-13);
        if q.ncols() != m.ncols() || q.ncols() == 0 {
            return Err(Error::Degenerate("flag frame columns are dependent".into()));
        }
        Ok(Self { frame: q, top_frame: None })
    }

    /// Build from explicit levels, checking F_i ⊂ F_{i+1}.
    pub fn from_subspaces(levels: &[SubspacePoint]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("empty flag".into()));
        }
        for (i, f) in levels.iter().enumerate() {
            if f.dim_sub() != i + 1 {
                return Err(Error::InvalidArgument(format!("level {} has dimension {}", i + 1, f.dim_sub())));
            }
            if i > 0 && subspace_distance(&levels[i - 1], f)? >= 1e-9 {
                return Err(Error::InvalidArgument(format!("F_{} is not contained in F_{}", i, i + 1)));
            }
        }
        let top = levels.last().unwrap();
        let mut cols = Matrix::zeros(top.dim_ambient(), 0);
        for f in levels {
            let prev = cols.ncols();
            let mut m = Matrix::zeros(top.dim_ambient(), prev + f.dim_sub());
            for j in 0..prev {
                m.set_column(j, &cols.column(j));
            }
            for j in 0..f.dim_sub() {
                m.set_column(prev + j, &f.frame().column(j));
            }
            let q = orthonormal_columns(&m, 1e-9);
            cols = q.columns(0, prev + 1).into_owned();
        }
        Ok(Self { frame: cols, top_frame: None })
    }

    pub fn rank(&self) -> usize {
        self.frame.ncols()
    }

    pub fn dim_ambient(&self) -> usize {
        self.frame.nrows()
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    /// F_i for 1 ≤ i ≤ r.
    pub fn level(&self, i: usize) -> SubspacePoint {
        assert!(i >= 1 && i <= self.rank(), "flag level out of range");
        match (&self.top_frame, i == self.rank()) {
            (Some(t), true) => SubspacePoint::from_orthonormal(t.clone()),
            _ => SubspacePoint::from_orthonormal(self.frame.columns(0, i).into_owned()),
        }
    }

    /// Flag (G_1, …, G_{r−1}, F_r) whose adapted frame is `top.frame()·q`
    /// for an r×r orthogonal `q`; `level(r)` returns `top` bit for bit.
    pub fn with_top(top: &SubspacePoint, q: &Matrix) -> Result<Self> {
        let r = top.dim_sub();
        if q.nrows() != r || q.ncols() != r {
            return Err(Error::DimensionMismatch { expected: r, got: q.nrows() });
        }
        if (q.transpose() * q - Matrix::identity(r, r)).norm() > 1e-10 {
            return Err(Error::InvalidArgument("rotation of the top frame must be orthogonal".into()));
        }
        Ok(Self { frame: top.frame() * q, top_frame: Some(top.frame().clone()) })
    }

    /// F_r.
    pub fn top(&self) -> SubspacePoint {
        self.level(self.rank())
    }

    /// F_1 as a projective point.
    pub fn line(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.frame.column(0).into_owned()).expect("unit column")
    }

    pub fn levels(&self) -> Vec<SubspacePoint> {
        (1..=self.rank()).map(|i| self.level(i)).collect()
    }

    /// The truncated flag (F_1, …, F_{r−1}).
    pub fn truncate(&self) -> Option<Self> {
        (self.rank() > 1).then(|| Self { frame: self.frame.columns(0, self.rank() - 1).into_owned(), top_frame: None })
    }

    /// g·x, re-orthonormalized so nested spans are preserved.
    pub fn act(&self, g: &Matrix) -> Result<Self> {
        if g.ncols() != self.dim_ambient() {
            return Err(Error::DimensionMismatch { expected: self.dim_ambient(), got: g.ncols() });
        }
        Self::from_frame(&(g * &self.frame))
    }
}
