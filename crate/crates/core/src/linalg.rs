//! Small complex linear-algebra helpers shared by the representation and
//! transform modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// Max absolute entry.
pub fn max_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Matrix with independent entries uniform in the complex unit square.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random unitary via QR of a random matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let qr = random_matrix(rng, n, n).qr();
    qr.q()
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Orthonormal basis of the (numerical) nullspace of `a`, with rank decided
/// by the singular-value threshold `rel_tol · max(σ_max, scale_floor)`.
///
/// The floor keeps the threshold meaningful when `a` consists entirely of
/// rounding noise (e.g. intertwining systems between numerically equal
/// representations); callers pass the natural scale of the entries.
///
/// Returns `(nullity, basis columns)`. Errs with the offending singular value
/// if one lies too close to the threshold to classify.
pub fn nullspace(a: &CMat, rel_tol: f64, scale_floor: f64) -> Result<(usize, Vec<CVec>), f64> {
    let cols = a.ncols();
    // Pad to at least square so V^T carries the whole kernel.
    let padded = if a.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 && scale_floor == 0.0 {
        // Zero map: nullspace is everything.
        return Ok((
            cols,
            (0..cols)
                .map(|j| CVec::from_fn(cols, |i, _| if i == j { cone() } else { czero() }))
                .collect(),
        ));
    }
    let threshold = rel_tol * smax.max(scale_floor);
    for &s in svd.singular_values.iter() {
        if s > threshold / 50.0 && s < threshold * 50.0 {
            return Err(s / smax.max(scale_floor));
        }
    }
    let v_t = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= threshold {
            basis.push(v_t.row(i).adjoint());
        }
    }
    // Rows of V^T beyond the number of singular values also span the kernel
    // (when a is wider than tall).
    for i in svd.singular_values.len()..v_t.nrows() {
        basis.push(v_t.row(i).adjoint());
    }
    Ok((basis.len(), basis))
}

/// Groups sorted values into clusters separated by gaps larger than `gap`.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > gap {
            clusters.push(start..i);
            start = i;
        }
    }
    if !values.is_empty() {
        clusters.push(start..values.len());
    }
    clusters
}
