use crate::error::{Error, Result};
use crate::linalg::{
    projective_distance, random::haar_frame, subspace_distance, FlagPoint, Matrix, ProjectivePoint, SubspacePoint,
    Vector,
};
use crate::rng::StreamRng;

/// A point of a compact homogeneous space on which GL(d) acts.
pub trait SpacePoint: Clone + Send + Sync + Sized {
    /// Space tag such as `projective(3)`, `grassmann(2,4)` or `flag(2,4)`.
    fn tag(&self) -> String;
    fn act(&self, g: &Matrix) -> Result<Self>;
    fn distance(&self, other: &Self) -> f64;
    /// A canonical embedding into ℝ^N used for grid quantization.
    fn embedding(&self) -> Vec<f64>;
    /// Frame columns for serialization.
    fn columns(&self) -> Vec<Vec<f64>>;
    fn from_columns(cols: &[Vec<f64>], tag: &str) -> Result<Self>;
    /// A draw from the rotation-invariant measure of the same space.
    fn random_like(&self, rng: &mut StreamRng) -> Self;
    /// Weighted barycenter of nearby points (used when merging atoms).
    fn barycenter(items: &[(f64, &Self)]) -> Self {
        heaviest(items)
    }
}

fn heaviest<P: Clone>(items: &[(f64, &P)]) -> P {
    let mut best = 0;
    for (i, it) in items.iter().enumerate() {
        if it.0 > items[best].0 {
            best = i;
        }
    }
    items[best].1.clone()
}

fn frame_columns(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().cloned().collect()).collect()
}

fn columns_to_matrix(cols: &[Vec<f64>]) -> Result<Matrix> {
    if cols.is_empty() {
        return Err(Error::Parse("point has no columns".into()));
    }
    let d = cols[0].len();
    if cols.iter().any(|c| c.len() != d) {
        return Err(Error::Parse("ragged point columns".into()));
    }
    Ok(Matrix::from_fn(d, cols.len(), |i, j| cols[j][i]))
}

fn projector_entries(frame: &Matrix) -> Vec<f64> {
    let p = frame * frame.transpose();
    let d = p.nrows();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            out.push(p[(i, j)]);
        }
    }
    out
}

impl SpacePoint for ProjectivePoint {
    fn tag(&self) -> String {
        format!("projective({})", self.dim())
    }

    fn act(&self, g: &Matrix) -> Result<Self> {
        ProjectivePoint::act(self, g)
    }

    fn distance(&self, other: &Self) -> f64 {
        projective_distance(self, other).unwrap_or(1.0)
    }

    fn embedding(&self) -> Vec<f64> {
        self.vector().iter().cloned().collect()
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        vec![self.vector().iter().cloned().collect()]
    }

    fn from_columns(cols: &[Vec<f64>], _tag: &str) -> Result<Self> {
        if cols.len() != 1 {
            return Err(Error::Parse("projective point needs exactly one column".into()));
        }
        ProjectivePoint::new(Vector::from_column_slice(&cols[0]))
    }

    fn random_like(&self, rng: &mut StreamRng) -> Self {
        ProjectivePoint::new(crate::linalg::random::unit_vector(self.dim(), rng)).expect("unit vector")
    }

    fn barycenter(items: &[(f64, &Self)]) -> Self {
        let rep = heaviest(items);
        let mut acc = Vector::zeros(rep.dim());
        for (w, p) in items {
            let s = if p.vector().dot(rep.vector()) < 0.0 { -*w } else { *w };
            acc.axpy(s, p.vector(), 1.0);
        }
        ProjectivePoint::new(acc).unwrap_or(rep)
    }
}

impl SpacePoint for SubspacePoint {
    fn tag(&self) -> String {
        format!("grassmann({},{})", self.dim_sub(), self.dim_ambient())
    }

    fn act(&self, g: &Matrix) -> Result<Self> {
        SubspacePoint::act(self, g)
    }

    fn distance(&self, other: &Self) -> f64 {
        subspace_distance(self, other).unwrap_or(1.0)
    }

    fn embedding(&self) -> Vec<f64> {
        projector_entries(self.frame())
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        frame_columns(self.frame())
    }

    fn from_columns(cols: &[Vec<f64>], _tag: &str) -> Result<Self> {
        SubspacePoint::from_columns(&columns_to_matrix(cols)?)
    }

    fn random_like(&self, rng: &mut StreamRng) -> Self {
        SubspacePoint::from_columns(&haar_frame(self.dim_ambient(), self.dim_sub(), rng)).expect("haar frame")
    }

    fn barycenter(items: &[(f64, &Self)]) -> Self {
        let rep = heaviest(items);
        let d = rep.dim_ambient();
        let mut p = Matrix::zeros(d, d);
        for (w, s) in items {
            p += s.projector() * *w;
        }
        let eig = p.symmetric_eigen();
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let cols: Vec<Vector> = idx[..rep.dim_sub()].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        SubspacePoint::from_vectors(&cols).unwrap_or(rep)
    }
}

impl SpacePoint for FlagPoint {
    fn tag(&self) -> String {
        format!("flag({},{})", self.rank(), self.dim_ambient())
    }

    fn act(&self, g: &Matrix) -> Result<Self> {
        FlagPoint::act(self, g)
    }

    fn distance(&self, other: &Self) -> f64 {
        (1..=self.rank().min(other.rank()))
            .map(|i| subspace_distance(&self.level(i), &other.level(i)).unwrap_or(1.0))
            .fold(0.0, f64::max)
    }

    fn embedding(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 1..=self.rank() {
            out.extend(projector_entries(&self.frame().columns(0, i).into_owned()));
        }
        out
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        frame_columns(self.frame())
    }

    fn from_columns(cols: &[Vec<f64>], _tag: &str) -> Result<Self> {
        FlagPoint::from_frame(&columns_to_matrix(cols)?)
    }

    fn random_like(&self, rng: &mut StreamRng) -> Self {
        FlagPoint::from_frame(&haar_frame(self.dim_ambient(), self.rank(), rng)).expect("haar frame")
    }
}
