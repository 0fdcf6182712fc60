//! Dense linear-algebra kernels: matrix exponential and a sorted symmetric
//! eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{abs, is_finite, lit, Scalar};

// Backward-error bounds for the [m/m] Padé approximants (Higham 2005, double precision).
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120., 60., 12., 1.];
const PADE_5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const PADE_7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const PADE_9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const PADE_13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

/// Maximum absolute column sum.
pub fn norm_1<T: Scalar>(a: &DMatrix<T>) -> T {
    a.column_iter()
        .map(|c| c.iter().fold(T::zero(), |s, &x| s + abs(x)))
        .fold(T::zero(), |m, x| if x > m { x } else { m })
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, &x| if abs(x) > m { abs(x) } else { m })
}

/// Largest absolute entry of `A - Aᵀ`.
pub fn asymmetry<T: Scalar>(a: &DMatrix<T>) -> T {
    let n = a.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let d = abs(a[(i, j)] - a[(j, i)]);
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub(crate) fn require_square<T: Scalar>(a: &DMatrix<T>, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Contract(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn require_symmetric<T: Scalar>(a: &DMatrix<T>, what: &str) -> Result<()> {
    require_square(a, what)?;
    let scale = max_abs(a).max(T::one());
    if asymmetry(a) > scale * lit(1e-12) {
        return Err(Error::Contract(format!("{what} is not symmetric")));
    }
    Ok(())
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// The approximant order and the number of squarings are chosen from the
/// 1-norm of `a` so that the backward error stays at unit roundoff.
pub fn expm<T: Scalar>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    require_square(a, "matrix exponential argument")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = norm_1(a);
    if !is_finite(norm) {
        return Err(Error::Numeric("matrix exponential of a non-finite matrix".into()));
    }
    let ident = DMatrix::<T>::identity(n, n);

    for &(m, theta) in &THETA {
        if norm <= lit(theta) {
            let coeffs: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = pade_low_order(a, &ident, coeffs);
            return pade_quotient(u, v);
        }
    }

    let ratio = crate::scalar::to_f64(norm) / THETA_13;
    let squarings = if ratio > 1.0 { ratio.log2().ceil() as i32 } else { 0 };
    let scaled = a * lit::<T>(0.5f64.powi(squarings));
    let b = |i: usize| lit::<T>(PADE_13[i]);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &scaled * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1));
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);
    let mut x = pade_quotient(u, v)?;
    for _ in 0..squarings {
        x = &x * &x;
    }
    if !x.iter().all(|&e| is_finite(e)) {
        return Err(Error::Numeric("matrix exponential overflowed".into()));
    }
    Ok(x)
}

fn pade_low_order<T: Scalar>(a: &DMatrix<T>, ident: &DMatrix<T>, coeffs: &[f64]) -> (DMatrix<T>, DMatrix<T>) {
    let a2 = a * a;
    let mut power = ident.clone();
    let mut u_sum = ident * lit::<T>(coeffs[1]);
    let mut v = ident * lit::<T>(coeffs[0]);
    for pair in coeffs.chunks_exact(2).skip(1) {
        power = &power * &a2;
        v += &power * lit::<T>(pair[0]);
        u_sum += &power * lit::<T>(pair[1]);
    }
    (a * u_sum, v)
}

fn pade_quotient<T: Scalar>(u: DMatrix<T>, v: DMatrix<T>) -> Result<DMatrix<T>> {
    let denom = &v - &u;
    let numer = v + u;
    denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::Numeric("singular Padé denominator in matrix exponential".into()))
}

/// Eigendecomposition of a symmetric matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum<T: Scalar> {
    pub eigenvalues: DVector<T>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: DMatrix<T>,
}

impl<T: Scalar> SymmetricSpectrum<T> {
    pub fn new(a: &DMatrix<T>) -> Result<Self> {
        require_symmetric(a, "matrix")?;
        let n = a.nrows();
        let eig = SymmetricEigen::try_new(a.clone(), T::default_epsilon(), 1000 * n.max(1) + 1000)
            .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        if !eigenvalues.iter().all(|&x| is_finite(x)) {
            return Err(Error::Numeric("non-finite eigenvalue".into()));
        }
        Ok(SymmetricSpectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `Q · diag(f(λ)) · Qᵀ`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(self.eigenvalues.iter()) {
            col *= f(lambda);
        }
        scaled * self.eigenvectors.transpose()
    }
}
