//! Variance-matrix algebra for zero-mean two-mode Gaussian states.
//!
//! Ordering is `(x_a, p_a, x_b, p_b)` and the vacuum variance matrix is the
//! identity. The symplectic form is `Omega = J (+) J` with `J = [[0, 1], [-1, 0]]`.
//!
//! The two symplectic invariants `Delta` and `det V` are evaluated exactly on
//! the stored (dyadic) entries with big rationals and rounded once. Pure
//! states sit on the degeneracy `nu_+ = nu_-` where the spectrum formula has
//! a square-root singularity, so ordinary rounding in `Delta^2 - 4 det V`
//! would otherwise cost about half the available digits.

use nalgebra::Matrix4;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Block<T> = [[T; 2]; 2];

/// Entries of `Omega`.
pub const OMEGA: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];

/// Base tolerance of the `nu_- >= 1` physicality test.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Largest tolerated `|S^T Omega S - Omega|` entry.
pub const SYMPLECTIC_TOL: f64 = 1e-8;

fn omega<T: Real>() -> [[T; 4]; 4] {
    OMEGA.map(|row| row.map(T::lit))
}

fn matmul<T: Real>(a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = (0..4).map(|m| a[j][m] * b[m][k]).sum();
        }
    }
    out
}

fn transpose<T: Real>(a: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = *a;
    for (j, row) in a.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            out[k][j] = x;
        }
    }
    out
}

fn max_abs_diff<T: Real>(a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> T {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (*x - *y).abs())
        .fold(T::zero(), T::max)
}

fn exact<T: Real>(x: T) -> BigRational {
    BigRational::from_float(x.as_f64()).expect("finite matrix entry")
}

fn det2(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> BigRational {
    a * d - b * c
}

/// Exact `det A`, `det B`, `det C` and `det V` of a stored matrix.
struct ExactInvariants {
    det_a: BigRational,
    det_b: BigRational,
    det_c: BigRational,
    det_v: BigRational,
}

impl ExactInvariants {
    fn of<T: Real>(m: &[[T; 4]; 4]) -> Self {
        let q: Vec<Vec<BigRational>> = m
            .iter()
            .map(|row| row.iter().map(|&x| exact(x)).collect())
            .collect();
        let minor = |rows: (usize, usize), cols: (usize, usize)| {
            det2(
                &q[rows.0][cols.0],
                &q[rows.0][cols.1],
                &q[rows.1][cols.0],
                &q[rows.1][cols.1],
            )
        };
        // Laplace expansion along rows 0 and 1.
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut det_v = BigRational::zero();
        for &(c0, c1) in &pairs {
            let rest: Vec<usize> = (0..4).filter(|&c| c != c0 && c != c1).collect();
            let term = minor((0, 1), (c0, c1)) * minor((2, 3), (rest[0], rest[1]));
            // Sign (-1)^(rows + cols) with rows 0 + 1.
            if (1 + c0 + c1) % 2 == 0 {
                det_v += term;
            } else {
                det_v -= term;
            }
        }
        Self {
            det_a: minor((0, 1), (0, 1)),
            det_b: minor((2, 3), (2, 3)),
            det_c: minor((0, 1), (2, 3)),
            det_v,
        }
    }

    fn delta(&self) -> BigRational {
        &self.det_a + &self.det_b + BigRational::from_integer(2.into()) * &self.det_c
    }

    /// `Delta` of the partially transposed matrix: only `det C` flips sign.
    fn delta_pt(&self) -> BigRational {
        &self.det_a + &self.det_b - BigRational::from_integer(2.into()) * &self.det_c
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(nu_+, nu_-)` from exact invariants.
fn spectrum_from(delta: &BigRational, det: &BigRational) -> Result<(f64, f64)> {
    if det.is_negative() {
        return Err(Error::NonPhysical(format!("det V = {:e} < 0", to_f64(det))));
    }
    let four = BigRational::from_integer(4.into());
    let disc = delta * delta - &four * det;
    let delta_f = to_f64(delta);
    let mut disc_f = to_f64(&disc);
    if disc.is_negative() {
        if disc_f > -1e-9 * delta_f.abs().powi(2).max(1.0) {
            disc_f = 0.0;
        } else {
            return Err(Error::NonPhysical(format!(
                "Delta^2 - 4 det V = {disc_f:e} < 0"
            )));
        }
    }
    if delta_f < 0.0 {
        return Err(Error::NonPhysical(format!("Delta = {delta_f:e} < 0")));
    }
    let nu_plus_sq = 0.5 * (delta_f + disc_f.sqrt());
    // nu_+^2 nu_-^2 = det V avoids cancellation when nu_- is small.
    let nu_minus_sq = if nu_plus_sq > 0.0 {
        to_f64(det) / nu_plus_sq
    } else {
        0.0
    };
    Ok((nu_plus_sq.sqrt(), nu_minus_sq.sqrt()))
}

/// `V_jk = <{q_j, q_k}> - 2 <q_j><q_k>` of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceMatrix<T> {
    m: [[T; 4]; 4],
}

impl<T: Real> VarianceMatrix<T> {
    /// Checks finiteness and symmetry (relative to the largest entry).
    pub fn new(m: [[T; 4]; 4]) -> Result<Self> {
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "variance matrix has non-finite entries".into(),
            ));
        }
        let scale = m.iter().flatten().fold(T::one(), |acc, x| acc.max(x.abs()));
        let asym = max_abs_diff(&m, &transpose(&m));
        if asym > T::tol(1e-12) * scale {
            return Err(Error::NotSymmetric(asym.as_f64()));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_array_unchecked(m: [[T; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::from_diagonal([T::one(); 4])
    }

    pub fn from_diagonal(d: [T; 4]) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (j, x) in d.into_iter().enumerate() {
            m[j][j] = x;
        }
        Self { m }
    }

    /// `[[A, C], [C^T, B]]`.
    pub fn from_blocks(a: Block<T>, b: Block<T>, c: Block<T>) -> Result<Self> {
        let mut m = [[T::zero(); 4]; 4];
        for j in 0..2 {
            for k in 0..2 {
                m[j][k] = a[j][k];
                m[j + 2][k + 2] = b[j][k];
                m[j][k + 2] = c[j][k];
                m[k + 2][j] = c[j][k];
            }
        }
        Self::new(m)
    }

    pub fn get(&self, j: usize, k: usize) -> T {
        self.m[j][k]
    }

    pub fn as_array(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    fn block(&self, row: usize, col: usize) -> Block<T> {
        [
            [self.m[row][col], self.m[row][col + 1]],
            [self.m[row + 1][col], self.m[row + 1][col + 1]],
        ]
    }

    /// Mode-a block.
    pub fn a_block(&self) -> Block<T> {
        self.block(0, 0)
    }

    /// Mode-b block.
    pub fn b_block(&self) -> Block<T> {
        self.block(2, 2)
    }

    /// Correlation block (rows of mode a, columns of mode b).
    pub fn c_block(&self) -> Block<T> {
        self.block(0, 2)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        max_abs_diff(&self.m, &other.m)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        self.m
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn det(&self) -> T {
        T::lit(to_f64(&ExactInvariants::of(&self.m).det_v))
    }

    /// `Delta = det A + det B + 2 det C`.
    pub fn delta_invariant(&self) -> T {
        T::lit(to_f64(&ExactInvariants::of(&self.m).delta()))
    }

    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum<T>> {
        let inv = ExactInvariants::of(&self.m);
        let delta = inv.delta();
        let (nu_plus, nu_minus) = spectrum_from(&delta, &inv.det_v)?;
        Ok(SymplecticSpectrum {
            nu_plus: T::lit(nu_plus),
            nu_minus: T::lit(nu_minus),
            delta: T::lit(to_f64(&delta)),
            det_v: T::lit(to_f64(&inv.det_v)),
        })
    }

    /// `(1 (+) sigma_z) V (1 (+) sigma_z)`: flips the sign of `p_b`.
    pub fn partial_transpose(&self) -> Self {
        let mut m = self.m;
        for row in m.iter_mut().take(3) {
            row[3] = -row[3];
        }
        for x in &mut m[3][..3] {
            *x = -*x;
        }
        Self { m }
    }

    /// Smallest symplectic eigenvalue of the partial transpose.
    pub fn ppt_smallest_eigenvalue(&self) -> Result<T> {
        let inv = ExactInvariants::of(&self.m);
        let (_, nu_minus) = spectrum_from(&inv.delta_pt(), &inv.det_v)?;
        Ok(T::lit(nu_minus))
    }

    /// Separable by the PPT criterion, `nu~_- >= 1`.
    pub fn is_ppt_separable(&self) -> Result<bool> {
        Ok(self.ppt_smallest_eigenvalue()? >= T::one() - self.physicality_tolerance())
    }

    /// `1 / sqrt(det V)`.
    pub fn purity(&self) -> Result<T> {
        let det = self.det();
        if !(det > T::zero()) {
            return Err(Error::NonPhysical(format!("det V = {det:e} <= 0")));
        }
        Ok(T::one() / det.sqrt())
    }

    /// Tolerance on `nu_- >= 1`. Rounding each stored entry by one ulp moves
    /// the spectrum by up to about `eps |V|^2`, which dominates the base
    /// tolerance for strongly squeezed states.
    pub fn physicality_tolerance(&self) -> T {
        let n = self.norm_inf();
        T::lit(PHYSICALITY_TOL) + T::lit(4.0) * T::epsilon() * n * n
    }

    /// Heisenberg-Robertson condition `V + i Omega >= 0`, tested as `nu_- >= 1`.
    pub fn is_physical(&self) -> bool {
        match self.symplectic_eigenvalues() {
            Ok(spec) => spec.nu_minus >= T::one() - self.physicality_tolerance(),
            Err(_) => false,
        }
    }

    /// `S V S^T`.
    pub fn apply_symplectic(&self, s: &SymplecticTransform<T>) -> Self {
        let out = matmul(&matmul(&s.s, &self.m), &transpose(&s.s));
        let mut m = out;
        for j in 0..4 {
            for k in (j + 1)..4 {
                let avg = (out[j][k] + out[k][j]) * T::lit(0.5);
                m[j][k] = avg;
                m[k][j] = avg;
            }
        }
        Self { m }
    }
}

/// `(|eig(i Omega V)|)` sorted descending, from a general nonsymmetric
/// eigensolver. Independent of the invariant route; used to cross-check it.
pub fn symplectic_eigenvalues_eigensolver<T: Real>(v: &VarianceMatrix<T>) -> (f64, f64) {
    let vm = Matrix4::from_fn(|j, k| v.get(j, k).as_f64());
    let om = Matrix4::from_fn(|j, k| OMEGA[j][k]);
    // Eigenvalues of Omega V are +-i nu, so those of i Omega V are real +-nu.
    let mut nus: Vec<f64> = (om * vm)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    nus.sort_by(|a, b| b.total_cmp(a));
    (0.5 * (nus[0] + nus[1]), 0.5 * (nus[2] + nus[3]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum<T> {
    pub nu_plus: T,
    pub nu_minus: T,
    pub delta: T,
    pub det_v: T,
}

/// Linear phase-space map with `S^T Omega S = Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticTransform<T> {
    s: [[T; 4]; 4],
}

impl<T: Real> SymplecticTransform<T> {
    pub fn new(s: [[T; 4]; 4]) -> Result<Self> {
        if s.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "transform has non-finite entries".into(),
            ));
        }
        let out = Self { s };
        let defect = out.symplectic_defect();
        if defect > T::tol(SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic(defect.as_f64()));
        }
        Ok(out)
    }

    pub fn identity() -> Self {
        let mut s = [[T::zero(); 4]; 4];
        for (j, row) in s.iter_mut().enumerate() {
            row[j] = T::one();
        }
        Self { s }
    }

    /// `S_a (+) S_b`; each block must have unit determinant.
    pub fn local(sa: Block<T>, sb: Block<T>) -> Result<Self> {
        let mut s = [[T::zero(); 4]; 4];
        for j in 0..2 {
            for k in 0..2 {
                s[j][k] = sa[j][k];
                s[j + 2][k + 2] = sb[j][k];
            }
        }
        Self::new(s)
    }

    /// `e^{-r sigma_z} = diag(e^{-r}, e^{r})` on one mode.
    pub fn squeezer_block(r: T) -> Block<T> {
        [[(-r).exp(), T::zero()], [T::zero(), r.exp()]]
    }

    /// Phase rotation by `theta` on one mode.
    pub fn rotation_block(theta: T) -> Block<T> {
        let (s, c) = theta.sin_cos();
        [[c, s], [-s, c]]
    }

    /// Beam splitter of transmissivity `cos^2 theta` mixing the two modes.
    pub fn beam_splitter(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        let z = T::zero();
        Self {
            s: [[c, z, s, z], [z, c, z, s], [-s, z, c, z], [z, -s, z, c]],
        }
    }

    /// Two-mode squeezer; maps the vacuum to `vm_tmss(r)`.
    pub fn two_mode_squeezer(r: T) -> Self {
        let (ch, sh) = (r.cosh(), r.sinh());
        let z = T::zero();
        Self {
            s: [
                [ch, z, sh, z],
                [z, ch, z, -sh],
                [sh, z, ch, z],
                [z, -sh, z, ch],
            ],
        }
    }

    pub fn matrix(&self) -> &[[T; 4]; 4] {
        &self.s
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            s: matmul(&self.s, &other.s),
        }
    }

    /// Largest entry of `|S^T Omega S - Omega|`.
    pub fn symplectic_defect(&self) -> T {
        let om = omega::<T>();
        max_abs_diff(&matmul(&matmul(&transpose(&self.s), &om), &self.s), &om)
    }

    pub fn is_local(&self) -> bool {
        (0..2).all(|j| (2..4).all(|k| self.s[j][k] == T::zero() && self.s[k][j] == T::zero()))
    }
}

/// Two-mode squeezed vacuum: `A = B = cosh 2r I`, `C = sinh 2r sigma_z`.
pub fn vm_tmss<T: Real>(r: T) -> VarianceMatrix<T> {
    let two_r = r + r;
    let (c, s) = (two_r.cosh(), two_r.sinh());
    let z = T::zero();
    VarianceMatrix {
        m: [[c, z, s, z], [z, c, z, -s], [s, z, c, z], [z, -s, z, c]],
    }
}

/// Variance matrix of the beam-splitter state: `A = B = diag(e^r cosh r,
/// e^-r cosh r)`, `C = diag(e^r sinh r, -e^-r sinh r)`.
pub fn vm_beamsplitter_state<T: Real>(r: T) -> VarianceMatrix<T> {
    let (c, s) = (r.cosh(), r.sinh());
    let (up, down) = (r.exp(), (-r).exp());
    let z = T::zero();
    VarianceMatrix {
        m: [
            [up * c, z, up * s, z],
            [z, down * c, z, -down * s],
            [up * s, z, up * c, z],
            [z, -down * s, z, down * c],
        ],
    }
}

/// `e^{-(r/2) sigma_z} (+) e^{-(r/2) sigma_z}`.
pub fn local_antisqueeze<T: Real>(r: T) -> SymplecticTransform<T> {
    let block = SymplecticTransform::squeezer_block(r * T::lit(0.5));
    let mut s = [[T::zero(); 4]; 4];
    for j in 0..2 {
        s[j][j] = block[j][j];
        s[j + 2][j + 2] = block[j][j];
    }
    SymplecticTransform { s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_examples() {
        assert_eq!(VarianceMatrix::<f64>::identity().delta_invariant(), 2.0);
        assert_abs_diff_eq!(vm_tmss(1.0_f64).delta_invariant(), 2.0, epsilon = 1e-12);
        let c2 = 2.0_f64.cosh();
        let s2 = 2.0_f64.sinh();
        assert_abs_diff_eq!(2.0 * c2 * c2 - 2.0 * s2 * s2, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let spec = VarianceMatrix::<f64>::identity()
            .symplectic_eigenvalues()
            .unwrap();
        assert_eq!((spec.nu_plus, spec.nu_minus), (1.0, 1.0));
        let spec = vm_tmss(1.0_f64).symplectic_eigenvalues().unwrap();
        assert_abs_diff_eq!(spec.nu_plus, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.nu_minus, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.det_v, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.delta, 2.0, epsilon = 1e-12);
        let thermal = VarianceMatrix::from_diagonal([2.0_f64; 4])
            .symplectic_eigenvalues()
            .unwrap();
        assert_eq!((thermal.nu_plus, thermal.nu_minus), (2.0, 2.0));
    }

    #[test]
    fn spectrum_of_distinct_thermal_modes() {
        let v = VarianceMatrix::from_diagonal([3.0_f64, 3.0, 1.5, 1.5]);
        let spec = v.symplectic_eigenvalues().unwrap();
        assert_abs_diff_eq!(spec.nu_plus, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.nu_minus, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn spectrum_rejects_negative_determinant() {
        let v = VarianceMatrix::from_diagonal([1.0_f64, -1.0, 1.0, 1.0]);
        assert!(matches!(
            v.symplectic_eigenvalues(),
            Err(Error::NonPhysical(_))
        ));
        assert!(!v.is_physical());
        assert!(v.purity().is_err());
    }

    #[test]
    fn ppt_examples() {
        assert_eq!(
            VarianceMatrix::<f64>::identity()
                .ppt_smallest_eigenvalue()
                .unwrap(),
            1.0
        );
        let nu = vm_tmss(1.0_f64).ppt_smallest_eigenvalue().unwrap();
        assert_abs_diff_eq!(nu, (-2.0_f64).exp(), epsilon = 1e-12);
        assert!(!vm_tmss(1.0_f64).is_ppt_separable().unwrap());
        // Product of a squeezed vacuum and a thermal mode.
        let v = VarianceMatrix::from_diagonal([0.5_f64, 2.0, 1.7, 1.7]);
        let nu = v.ppt_smallest_eigenvalue().unwrap();
        assert_abs_diff_eq!(nu, 1.0, epsilon = 1e-15);
        assert!(v.is_ppt_separable().unwrap());
    }

    #[test]
    fn purity_examples() {
        assert_eq!(VarianceMatrix::<f64>::identity().purity().unwrap(), 1.0);
        assert_abs_diff_eq!(vm_tmss(0.8_f64).purity().unwrap(), 1.0, epsilon = 1e-12);
        let v = VarianceMatrix::from_diagonal([4.0_f64; 4]);
        assert_eq!(v.purity().unwrap(), 1.0 / 16.0);
    }

    #[test]
    fn tmss_and_beamsplitter_values() {
        assert_eq!(vm_tmss(0.0_f64), VarianceMatrix::identity());
        assert_eq!(vm_beamsplitter_state(0.0_f64), VarianceMatrix::identity());
        let v = vm_tmss(1.0_f64);
        assert_abs_diff_eq!(v.get(0, 0), 3.7621956910836314, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(0, 2), 3.626860407847019, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(1, 3), -3.626860407847019, epsilon = 1e-14);
        let b = vm_beamsplitter_state(1.0_f64);
        assert_abs_diff_eq!(b.get(0, 0), 1.0_f64.exp() * 1.0_f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(b.get(0, 0), 4.194528049465325, epsilon = 1e-14);
    }

    #[test]
    fn blocks_round_trip() {
        let v = vm_tmss(0.7_f64);
        let w = VarianceMatrix::from_blocks(v.a_block(), v.b_block(), v.c_block()).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn construction_rejects_asymmetry() {
        let mut m = *VarianceMatrix::<f64>::identity().as_array();
        m[0][1] = 0.1;
        assert!(matches!(
            VarianceMatrix::new(m),
            Err(Error::NotSymmetric(_))
        ));
        m[0][1] = f64::NAN;
        assert!(VarianceMatrix::new(m).is_err());
    }

    #[test]
    fn antisqueeze_reduces_beamsplitter_state() {
        assert_eq!(local_antisqueeze(0.0_f64), SymplecticTransform::identity());
        for &r in &[0.0, 0.3, 1.0, 2.0] {
            let reduced = vm_beamsplitter_state(r).apply_symplectic(&local_antisqueeze(r));
            assert!(reduced.max_abs_diff(&vm_tmss(r / 2.0)) < 1e-10, "r = {r}");
        }
        assert_eq!(local_antisqueeze(1.3_f64).symplectic_defect(), 0.0);
    }

    #[test]
    fn identity_transform_is_neutral() {
        let v = vm_beamsplitter_state(0.9_f64);
        assert_eq!(v.apply_symplectic(&SymplecticTransform::identity()), v);
    }

    #[test]
    fn non_symplectic_rejected() {
        let mut s = *SymplecticTransform::<f64>::identity().matrix();
        s[0][0] = 2.0;
        assert!(matches!(
            SymplecticTransform::new(s),
            Err(Error::NotSymplectic(_))
        ));
        let bad = [[2.0, 0.0], [0.0, 1.0]];
        assert!(SymplecticTransform::local(bad, bad).is_err());
    }

    #[test]
    fn two_mode_squeezer_generates_tmss() {
        let s = SymplecticTransform::two_mode_squeezer(0.8_f64);
        assert!(s.symplectic_defect() < 1e-14);
        assert!(!s.is_local());
        let v = VarianceMatrix::identity().apply_symplectic(&s);
        assert!(v.max_abs_diff(&vm_tmss(0.8)) < 1e-13);
        assert!(SymplecticTransform::beam_splitter(0.4_f64).symplectic_defect() < 1e-15);
    }

    #[test]
    fn eigensolver_agrees_on_examples() {
        for v in [
            VarianceMatrix::<f64>::identity(),
            vm_tmss(1.0),
            vm_beamsplitter_state(0.6),
            VarianceMatrix::from_diagonal([3.0, 3.0, 1.5, 1.5]),
        ] {
            let spec = v.symplectic_eigenvalues().unwrap();
            let (p, m) = symplectic_eigenvalues_eigensolver(&v);
            assert_abs_diff_eq!(spec.nu_plus, p, epsilon = 1e-8);
            assert_abs_diff_eq!(spec.nu_minus, m, epsilon = 1e-8);
        }
    }

    #[test]
    fn physicality_grid() {
        for i in 0..=50 {
            let r = 0.1 * f64::from(i);
            assert!(vm_tmss(r).is_physical(), "tmss r = {r}");
            assert!(vm_beamsplitter_state(r).is_physical(), "bs r = {r}");
        }
        assert!(!VarianceMatrix::from_diagonal([0.5_f64; 4]).is_physical());
    }

    #[test]
    fn single_precision_smoke() {
        let spec = vm_tmss(0.5_f32).symplectic_eigenvalues().unwrap();
        assert!((spec.nu_minus - 1.0).abs() < 1e-5);
        assert!(vm_tmss(0.5_f32).is_physical());
    }
}
