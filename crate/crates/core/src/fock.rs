//! Truncated Fock-space representation of bipartite pure states.
//!
//! Everything here is computed from amplitudes and operator matrix elements,
//! never from closed forms, so the module doubles as the reference oracle for
//! [`crate::complementarity`].

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gaussian::VarianceMatrix;
use crate::scalar::Real;

/// Above this value of `xi` the closed-form quotients lose too many digits to
/// cancellation and explicit finite sums are used instead.
pub const SERIES_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// `x^n` for a non-negative integer exponent.
pub(crate) fn pow_n<T: Real>(x: T, n: usize) -> T {
    match i32::try_from(n) {
        Ok(n) => x.powi(n),
        Err(_) => x.powf(T::from_usize(n).unwrap()),
    }
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Dense square complex matrix acting on one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Operator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![czero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for j in 0..dim {
            op.set(j, j, Complex::new(T::one(), T::zero()));
        }
        op
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Bosonic annihilation operator on the Fock states `0..dim`.
    pub fn annihilation(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for n in 1..dim {
            let amp = T::from_usize(n).unwrap().sqrt();
            op.set(n - 1, n, Complex::new(amp, T::zero()));
        }
        op
    }

    /// Position quadrature `(a + a^dag)/sqrt(2)`; vacuum variance 1/2.
    pub fn position(dim: usize) -> Self {
        let a = Self::annihilation(dim);
        let s = T::one() / T::SQRT_2();
        a.add(&a.adjoint()).scale(Complex::new(s, T::zero()))
    }

    /// Momentum quadrature `(a - a^dag)/(i sqrt(2))`.
    pub fn momentum(dim: usize) -> Self {
        let a = Self::annihilation(dim);
        let s = T::one() / T::SQRT_2();
        a.sub(&a.adjoint()).scale(Complex::new(T::zero(), -s))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.data[j * self.dim + k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: Complex<T>) {
        self.data[j * self.dim + k] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                out.set(k, j, self.get(j, k).conj());
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for j in 0..d {
            for k in 0..d {
                let mut acc = czero();
                for m in 0..d {
                    acc = acc + self.get(j, m) * other.get(m, k);
                }
                out.set(j, k, acc);
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(czero(), |acc, j| acc + self.get(j, j))
    }

    /// Largest `|O_jk - conj(O_kj)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.dim {
            for k in 0..self.dim {
                worst = worst.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        worst
    }

    /// `Tr(rho O)`.
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> Complex<T> {
        assert_eq!(self.dim, rho.dim, "operator and state dimensions differ");
        let mut acc = czero();
        for j in 0..self.dim {
            for k in 0..self.dim {
                acc = acc + rho.get(j, k) * self.get(k, j);
            }
        }
        acc
    }

    /// Applies `O` to one factor of a `dim x dim` amplitude table.
    fn apply_local(&self, table: &[Complex<T>], which: Subsystem) -> Vec<Complex<T>> {
        let d = self.dim;
        let mut out = vec![czero(); d * d];
        for j in 0..d {
            for k in 0..d {
                let mut acc = czero();
                for m in 0..d {
                    acc = match which {
                        Subsystem::A => acc + self.get(j, m) * table[m * d + k],
                        Subsystem::B => acc + self.get(k, m) * table[j * d + m],
                    };
                }
                out[j * d + k] = acc;
            }
        }
        out
    }
}

/// Pure state of two `dim`-level systems, `sum_jk a_jk |j,k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState<T> {
    dim: usize,
    amp: Vec<Complex<T>>,
}

impl<T: Real> BipartitePureState<T> {
    /// Takes a row-major `dim x dim` amplitude table that must already be
    /// normalized.
    pub fn new(dim: usize, amp: Vec<Complex<T>>) -> Result<Self> {
        Self::check_shape(dim, &amp)?;
        let norm_sq = amp.iter().map(|a| a.norm_sqr()).sum::<T>();
        if (norm_sq - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::NotNormalized(norm_sq.as_f64()));
        }
        Ok(Self { dim, amp })
    }

    /// Rescales the table to unit norm.
    pub fn normalized(dim: usize, amp: Vec<Complex<T>>) -> Result<Self> {
        Self::check_shape(dim, &amp)?;
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        let amp = amp.into_iter().map(|a| a / norm).collect();
        Ok(Self { dim, amp })
    }

    /// Product basis state `|j,k>`.
    pub fn basis(dim: usize, j: usize, k: usize) -> Result<Self> {
        if j >= dim || k >= dim {
            return Err(Error::Dimension(format!(
                "basis index ({j},{k}) outside dimension {dim}"
            )));
        }
        let mut amp = vec![czero(); dim * dim];
        amp[j * dim + k] = Complex::new(T::one(), T::zero());
        Self::new(dim, amp)
    }

    /// `|a> (x) |b>` for two single-system vectors of equal length.
    pub fn product(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "factor lengths {} and {} differ",
                a.len(),
                b.len()
            )));
        }
        let amp = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        Self::normalized(a.len(), amp)
    }

    /// Normalized table of i.i.d. standard complex Gaussian amplitudes, which
    /// is unitarily invariant (Haar) on the unit sphere.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self
    where
        StandardNormal: Distribution<T>,
    {
        assert!(dim >= 1, "dimension must be positive");
        loop {
            let amp = (0..dim * dim)
                .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(state) = Self::normalized(dim, amp) {
                return state;
            }
        }
    }

    fn check_shape(dim: usize, amp: &[Complex<T>]) -> Result<()> {
        if dim == 0 {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        if amp.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for local dimension {dim}, got {}",
                dim * dim,
                amp.len()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitude(&self, j: usize, k: usize) -> Complex<T> {
        self.amp[j * self.dim + k]
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> T {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Partial trace over the other subsystem.
    pub fn reduce(&self, which: Subsystem) -> DensityMatrix<T> {
        let d = self.dim;
        let mut rho = vec![czero(); d * d];
        for j in 0..d {
            for k in 0..d {
                let mut acc = czero();
                for m in 0..d {
                    acc = match which {
                        Subsystem::A => acc + self.amplitude(j, m) * self.amplitude(k, m).conj(),
                        Subsystem::B => acc + self.amplitude(m, j) * self.amplitude(m, k).conj(),
                    };
                }
                rho[j * d + k] = acc;
            }
        }
        DensityMatrix { dim: d, rho }
    }

    /// `<psi| O (x) 1 |psi>` (or `1 (x) O`).
    pub fn local_expectation(&self, op: &Operator<T>, which: Subsystem) -> Complex<T> {
        op.expectation(&self.reduce(which))
    }

    /// Copy of the state with each local dimension grown to `dim`, padding
    /// with zero amplitudes.
    fn embed(&self, dim: usize) -> Vec<Complex<T>> {
        let mut out = vec![czero(); dim * dim];
        for j in 0..self.dim {
            for k in 0..self.dim {
                out[j * dim + k] = self.amplitude(j, k);
            }
        }
        out
    }
}

/// Parameters of the two-mode squeezed vacuum cut at Fock number `t`:
/// `N(xi) sum_{n<=t} xi^n |n,n>` with `xi = tanh r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedTmss<T> {
    r: T,
    xi: T,
    one_minus_xi_sq: T,
    cutoff: usize,
}

impl<T: Real> TruncatedTmss<T> {
    pub fn new(r: T, cutoff: usize) -> Result<Self> {
        if !r.is_finite() || r < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "squeezing r must be finite and >= 0, got {r}"
            )));
        }
        let sech = T::one() / r.cosh();
        Ok(Self {
            r,
            xi: r.tanh(),
            one_minus_xi_sq: sech * sech,
            cutoff,
        })
    }

    /// Parametrizes by `xi = tanh r` directly, which must lie in `[0, 1)`.
    pub fn from_xi(xi: T, cutoff: usize) -> Result<Self> {
        if !(xi >= T::zero() && xi < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "xi must lie in [0, 1), got {xi}"
            )));
        }
        Ok(Self {
            r: xi.atanh(),
            xi,
            one_minus_xi_sq: (T::one() - xi) * (T::one() + xi),
            cutoff,
        })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `1 - xi^2`, evaluated without cancellation.
    pub fn one_minus_xi_sq(&self) -> T {
        self.one_minus_xi_sq
    }

    /// `cosh^2 r`.
    pub fn cosh_sq(&self) -> T {
        T::one() / self.one_minus_xi_sq
    }

    /// Whether closed-form quotients should be replaced by finite sums.
    pub fn use_series(&self) -> bool {
        self.xi > T::lit(SERIES_THRESHOLD)
    }

    /// `N(xi)^2 = (1 - xi^2) / (1 - xi^(2t+2))`.
    pub fn norm_sq(&self) -> T {
        if self.xi == T::zero() {
            return T::one();
        }
        if self.use_series() {
            return T::one() / self.geometric_sum(self.xi * self.xi, self.cutoff);
        }
        let x = self.xi * self.xi;
        self.one_minus_xi_sq / (T::one() - pow_n(x, self.cutoff + 1))
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// `sum_{n=0}^{t} x^n` by explicit summation.
    fn geometric_sum(&self, x: T, t: usize) -> T {
        let mut term = T::one();
        let mut acc = T::zero();
        for _ in 0..=t {
            acc = acc + term;
            term = term * x;
        }
        acc
    }

    /// Schmidt coefficients `N xi^n`, `n = 0..=t`.
    pub fn amplitudes(&self) -> Vec<T> {
        let norm = self.norm();
        let mut out = Vec::with_capacity(self.cutoff + 1);
        let mut term = norm;
        for _ in 0..=self.cutoff {
            out.push(term);
            term = term * self.xi;
        }
        out
    }

    /// The state as a `(t+1) x (t+1)` amplitude table.
    pub fn state(&self) -> BipartitePureState<T> {
        let d = self.cutoff + 1;
        let mut amp = vec![czero(); d * d];
        for (n, a) in self.amplitudes().into_iter().enumerate() {
            amp[n * d + n] = Complex::new(a, T::zero());
        }
        BipartitePureState { dim: d, amp }
    }
}

/// Builds the truncated two-mode squeezed state with squeezing `r` and cut-off `t`.
pub fn make_truncated_tmss<T: Real>(r: T, t: usize) -> Result<BipartitePureState<T>> {
    Ok(TruncatedTmss::new(r, t)?.state())
}

/// Single-system density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dim: usize,
    rho: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dim: usize, rho: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 || rho.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                rho.len()
            )));
        }
        let out = Self { dim, rho };
        let herm = out.as_operator().hermiticity_defect();
        if herm > T::tol(1e-12) {
            return Err(Error::NotHermitian(herm.as_f64()));
        }
        let tr = out.trace();
        if (tr - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::BadTrace(tr.as_f64()));
        }
        let min_eig = out.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -T::tol(1e-10).as_f64() {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(out)
    }

    pub fn diagonal(populations: &[T]) -> Result<Self> {
        let d = populations.len();
        let mut rho = vec![czero(); d * d];
        for (j, p) in populations.iter().enumerate() {
            rho[j * d + j] = Complex::new(*p, T::zero());
        }
        Self::new(d, rho)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let p = T::one() / T::from_usize(dim).unwrap();
        Self::diagonal(&vec![p; dim])
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let d = psi.len();
        let rho = psi
            .iter()
            .flat_map(|a| psi.iter().map(move |b| a * b.conj()))
            .collect();
        Self::new(d, rho)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.rho[j * self.dim + k]
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|j| self.get(j, j).re).sum()
    }

    fn as_operator(&self) -> Operator<T> {
        Operator {
            dim: self.dim,
            data: self.rho.clone(),
        }
    }

    /// Eigenvalues in ascending order, computed in double precision.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |j, k| {
            let z = self.get(j, k);
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `V^2 = 2 sum_{j != k} |rho_jk|^2`.
    pub fn visibility_sq(&self) -> T {
        let mut acc = T::zero();
        for j in 0..self.dim {
            for k in 0..self.dim {
                if j != k {
                    acc = acc + self.get(j, k).norm_sqr();
                }
            }
        }
        T::lit(2.0) * acc
    }

    /// `P^2 = 2 [sum_j rho_jj^2 - 1/d]`.
    pub fn predictability_sq(&self) -> T {
        let pop: T = (0..self.dim).map(|j| self.get(j, j).re.powi(2)).sum();
        T::lit(2.0) * (pop - T::one() / T::from_usize(self.dim).unwrap())
    }

    /// `C_I^2 = 2 (1 - Tr rho^2)`.
    pub fn iconcurrence_sq(&self) -> T {
        T::lit(2.0) * (T::one() - self.purity())
    }
}

/// Generalized Bloch basis of `d^2 - 1` traceless Hermitian observables:
/// symmetric `u_jk`, antisymmetric `v_jk` and diagonal `w_l`.
#[derive(Debug, Clone)]
pub struct HioeEberlyBasis<T> {
    dim: usize,
    u: Vec<Operator<T>>,
    v: Vec<Operator<T>>,
    w: Vec<Operator<T>>,
}

impl<T: Real> HioeEberlyBasis<T> {
    pub fn new(dim: usize) -> Self {
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let mut u = Vec::new();
        let mut v = Vec::new();
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut uj = Operator::zeros(dim);
                uj.set(k, j, one);
                uj.set(j, k, one);
                u.push(uj);
                let mut vj = Operator::zeros(dim);
                vj.set(k, j, i);
                vj.set(j, k, -i);
                v.push(vj);
            }
        }
        let w = (1..dim)
            .map(|l| {
                let lf = T::from_usize(l).unwrap();
                let pref = (T::lit(2.0) / (lf * (lf + T::one()))).sqrt();
                let mut wl = Operator::zeros(dim);
                for j in 0..l {
                    wl.set(j, j, Complex::new(pref, T::zero()));
                }
                wl.set(l, l, Complex::new(-pref * lf, T::zero()));
                wl
            })
            .collect();
        Self { dim, u, v, w }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.u.len() + self.v.len() + self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self) -> &[Operator<T>] {
        &self.u
    }

    pub fn v(&self) -> &[Operator<T>] {
        &self.v
    }

    pub fn w(&self) -> &[Operator<T>] {
        &self.w
    }

    pub fn iter(&self) -> impl Iterator<Item = &Operator<T>> {
        self.u.iter().chain(&self.v).chain(&self.w)
    }

    /// `sum_{j<k} |<u_jk>|^2 + |<v_jk>|^2`.
    pub fn visibility_sq(&self, rho: &DensityMatrix<T>) -> T {
        self.u
            .iter()
            .chain(&self.v)
            .map(|op| op.expectation(rho).norm_sqr())
            .sum()
    }

    /// `sum_l |<w_l>|^2`.
    pub fn predictability_sq(&self, rho: &DensityMatrix<T>) -> T {
        self.w.iter().map(|op| op.expectation(rho).norm_sqr()).sum()
    }
}

fn pauli<T: Real>(entries: [[(f64, f64); 2]; 2]) -> Operator<T> {
    let data = entries
        .iter()
        .flatten()
        .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))
        .collect();
    Operator { dim: 2, data }
}

fn require_qubits<T: Real>(state: &BipartitePureState<T>) -> Result<()> {
    if state.dim() != 2 {
        return Err(Error::Dimension(format!(
            "two-qubit operation called on local dimension {}",
            state.dim()
        )));
    }
    Ok(())
}

/// `|<psi*| sigma_y (x) sigma_y |psi>|` for a two-qubit state.
pub fn concurrence_2qubit<T: Real>(state: &BipartitePureState<T>) -> Result<T> {
    require_qubits(state)?;
    let sy = pauli::<T>([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]]);
    let flipped = sy.apply_local(
        &sy.apply_local(state.amplitudes(), Subsystem::A),
        Subsystem::B,
    );
    // <psi*| carries the unconjugated amplitudes.
    let overlap = state
        .amplitudes()
        .iter()
        .zip(&flipped)
        .fold(czero::<T>(), |acc, (a, b)| acc + a * b);
    Ok(overlap.norm())
}

/// Squared terms of the two-qubit complementarity relation for one subsystem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triality<T> {
    pub v_sq: T,
    pub p_sq: T,
    pub c_sq: T,
    /// `V^2 + P^2 + C^2 - 1`.
    pub residual: T,
}

/// Evaluates `V = 2|<sigma_+>|`, `P = |<sigma_z>|` on the full state and the
/// concurrence, and returns their squares with the residual of `V^2+P^2+C^2 = 1`.
pub fn triality_check<T: Real>(
    state: &BipartitePureState<T>,
    which: Subsystem,
) -> Result<Triality<T>> {
    require_qubits(state)?;
    let sigma_plus = pauli::<T>([[(0.0, 0.0), (1.0, 0.0)], [(0.0, 0.0), (0.0, 0.0)]]);
    let sigma_z = pauli::<T>([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]]);
    let vis = T::lit(2.0) * state.local_expectation(&sigma_plus, which).norm();
    let pred = state.local_expectation(&sigma_z, which).norm();
    let conc = concurrence_2qubit(state)?;
    let (v_sq, p_sq, c_sq) = (vis * vis, pred * pred, conc * conc);
    Ok(Triality {
        v_sq,
        p_sq,
        c_sq,
        residual: v_sq + p_sq + c_sq - T::one(),
    })
}

/// Variance matrix of a state read as Fock amplitudes, from quadrature
/// matrix elements: `V_jk = <{q_j, q_k}> - 2 <q_j><q_k>` with
/// `q = (x_a, p_a, x_b, p_b)`.
///
/// The state is embedded one level higher before the quadratures act, so
/// `q_k |psi>` is exact; second moments are then taken as `<q_j psi | q_k psi>`.
pub fn quadrature_vm_oracle<T: Real>(state: &BipartitePureState<T>) -> VarianceMatrix<T> {
    let d = state.dim() + 1;
    let psi = state.embed(d);
    let x = Operator::<T>::position(d);
    let p = Operator::<T>::momentum(d);
    let images = [
        x.apply_local(&psi, Subsystem::A),
        p.apply_local(&psi, Subsystem::A),
        x.apply_local(&psi, Subsystem::B),
        p.apply_local(&psi, Subsystem::B),
    ];
    let inner = |a: &[Complex<T>], b: &[Complex<T>]| {
        a.iter()
            .zip(b)
            .fold(czero::<T>(), |acc, (x, y)| acc + x.conj() * y)
    };
    let means: Vec<T> = images.iter().map(|phi| inner(&psi, phi).re).collect();
    let two = T::lit(2.0);
    let mut m = [[T::zero(); 4]; 4];
    for j in 0..4 {
        for k in j..4 {
            let value = two * inner(&images[j], &images[k]).re - two * means[j] * means[k];
            m[j][k] = value;
            m[k][j] = value;
        }
    }
    VarianceMatrix::from_array_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn bell() -> BipartitePureState<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        BipartitePureState::new(2, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn truncated_tmss_at_zero_squeezing_is_vacuum() {
        let s = make_truncated_tmss(0.0_f64, 5).unwrap();
        assert_eq!(s.dim(), 6);
        assert_eq!(s.amplitude(0, 0), c(1.0));
        let rest: f64 = s.amplitudes().iter().skip(1).map(|a| a.norm()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn truncated_tmss_half_xi_amplitudes() {
        let s = TruncatedTmss::from_xi(0.5_f64, 1).unwrap().state();
        assert_abs_diff_eq!(s.amplitude(0, 0).re, 0.8_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(1, 1).re, 0.5 * 0.8_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(s.amplitude(0, 1), c(0.0));

        let via_r = make_truncated_tmss(0.5_f64.atanh(), 1).unwrap();
        assert_abs_diff_eq!(via_r.amplitude(0, 0).re, 0.8_f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn truncated_tmss_normalized_everywhere() {
        for &r in &[0.0, 0.3, 1.0, 2.5, 5.0, 20.0, 40.0] {
            for &t in &[0usize, 1, 2, 7, 50, 300] {
                let tmss = TruncatedTmss::new(r, t).unwrap();
                let total: f64 = tmss.amplitudes().iter().map(|a| a * a).sum();
                assert!((total - 1.0).abs() < 1e-12, "r={r} t={t} total={total}");
            }
        }
    }

    #[test]
    fn truncated_tmss_rejects_bad_squeezing() {
        assert!(TruncatedTmss::new(-0.1_f64, 3).is_err());
        assert!(TruncatedTmss::new(f64::NAN, 3).is_err());
        assert!(TruncatedTmss::from_xi(1.0_f64, 3).is_err());
        assert!(TruncatedTmss::from_xi(-0.2_f64, 3).is_err());
    }

    #[test]
    fn state_construction_checks() {
        assert!(matches!(
            BipartitePureState::new(2, vec![c(1.0), c(1.0), c(0.0), c(0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            BipartitePureState::<f64>::new(2, vec![c(1.0)]),
            Err(Error::Dimension(_))
        ));
        assert!(BipartitePureState::<f64>::normalized(2, vec![c(0.0); 4]).is_err());
        assert!(BipartitePureState::<f64>::basis(2, 2, 0).is_err());
    }

    #[test]
    fn reduce_examples() {
        let rho = bell().reduce(Subsystem::A);
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(1, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 1).norm(), 0.0, epsilon = 1e-15);

        let tmss = TruncatedTmss::from_xi(0.5_f64, 1).unwrap().state();
        for which in [Subsystem::A, Subsystem::B] {
            let rho = tmss.reduce(which);
            assert_abs_diff_eq!(rho.get(0, 0).re, 0.8, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.get(1, 1).re, 0.2, epsilon = 1e-15);
        }

        let vac = BipartitePureState::<f64>::basis(3, 0, 0)
            .unwrap()
            .reduce(Subsystem::B);
        assert_eq!(vac.get(0, 0), c(1.0));
        assert_eq!(vac.get(1, 1), c(0.0));
    }

    #[test]
    fn reduce_picks_the_right_factor() {
        // |1> (x) |0> in d = 2: A holds |1>, B holds |0>.
        let s = BipartitePureState::<f64>::basis(2, 1, 0).unwrap();
        assert_eq!(s.reduce(Subsystem::A).get(1, 1), c(1.0));
        assert_eq!(s.reduce(Subsystem::B).get(0, 0), c(1.0));
    }

    #[test]
    fn visibility_examples() {
        let diag = DensityMatrix::diagonal(&[0.7_f64, 0.2, 0.1]).unwrap();
        assert_eq!(diag.visibility_sq(), 0.0);
        let plus = DensityMatrix::new(2, vec![c(0.5); 4]).unwrap();
        assert_abs_diff_eq!(plus.visibility_sq(), 1.0, epsilon = 1e-15);
        assert_eq!(
            DensityMatrix::<f64>::maximally_mixed(4)
                .unwrap()
                .visibility_sq(),
            0.0
        );
    }

    #[test]
    fn predictability_examples() {
        let zero = DensityMatrix::diagonal(&[1.0_f64, 0.0]).unwrap();
        assert_abs_diff_eq!(zero.predictability_sq(), 1.0, epsilon = 1e-15);
        let mixed = DensityMatrix::<f64>::maximally_mixed(5).unwrap();
        assert_abs_diff_eq!(mixed.predictability_sq(), 0.0, epsilon = 1e-15);
        let rho = DensityMatrix::diagonal(&[0.8_f64, 0.2]).unwrap();
        assert_abs_diff_eq!(rho.predictability_sq(), 0.36, epsilon = 1e-15);
    }

    #[test]
    fn iconcurrence_examples() {
        let pure = DensityMatrix::diagonal(&[1.0_f64, 0.0, 0.0]).unwrap();
        assert_eq!(pure.iconcurrence_sq(), 0.0);
        let half = DensityMatrix::diagonal(&[0.5_f64, 0.5]).unwrap();
        assert_abs_diff_eq!(half.iconcurrence_sq(), 1.0, epsilon = 1e-15);
        let rho = DensityMatrix::diagonal(&[0.8_f64, 0.2]).unwrap();
        assert_abs_diff_eq!(rho.iconcurrence_sq(), 0.64, epsilon = 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::new(2, vec![c(0.5), c(0.1), c(0.2), c(0.5)]),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[0.5_f64, 0.6]),
            Err(Error::BadTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[1.2_f64, -0.2]),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn hioe_eberly_operators_are_traceless_hermitian() {
        for d in [2usize, 3, 5, 8] {
            let basis = HioeEberlyBasis::<f64>::new(d);
            assert_eq!(basis.len(), d * d - 1);
            for op in basis.iter() {
                assert!(op.hermiticity_defect() < 1e-15);
                assert!(op.trace().norm() < 1e-14);
                // Normalized as generalized Gell-Mann matrices: Tr(O^2) = 2.
                assert_abs_diff_eq!(op.matmul(op).trace().re, 2.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn hioe_eberly_w_prefactor() {
        let basis = HioeEberlyBasis::<f64>::new(4);
        let w3 = &basis.w()[2];
        let pref = (2.0_f64 / 12.0).sqrt();
        assert_abs_diff_eq!(w3.get(0, 0).re, pref, epsilon = 1e-15);
        assert_abs_diff_eq!(w3.get(3, 3).re, -3.0 * pref, epsilon = 1e-15);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence_2qubit(&bell()).unwrap(), 1.0, epsilon = 1e-15);
        let prod = BipartitePureState::<f64>::basis(2, 0, 1).unwrap();
        assert_eq!(concurrence_2qubit(&prod).unwrap(), 0.0);
        let tmss = TruncatedTmss::from_xi(0.5_f64, 1).unwrap().state();
        assert_abs_diff_eq!(concurrence_2qubit(&tmss).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(2.0 * 0.5 / (1.0 + 0.25), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn concurrence_rejects_qutrits() {
        let s = BipartitePureState::<f64>::basis(3, 0, 0).unwrap();
        assert!(matches!(concurrence_2qubit(&s), Err(Error::Dimension(_))));
        assert!(triality_check(&s, Subsystem::A).is_err());
    }

    #[test]
    fn triality_examples() {
        let t = triality_check(&bell(), Subsystem::A).unwrap();
        assert_abs_diff_eq!(t.v_sq, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.p_sq, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.c_sq, 1.0, epsilon = 1e-15);
        assert!(t.residual.abs() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_zero = BipartitePureState::product(&[c(h), c(h)], &[c(1.0), c(0.0)]).unwrap();
        let t = triality_check(&plus_zero, Subsystem::A).unwrap();
        assert_abs_diff_eq!(t.v_sq, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.p_sq, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.c_sq, 0.0, epsilon = 1e-15);
        // Subsystem B is |0>: all predictability.
        let t = triality_check(&plus_zero, Subsystem::B).unwrap();
        assert_abs_diff_eq!(t.p_sq, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn triality_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7121);
        for _ in 0..1000 {
            let s = BipartitePureState::<f64>::random(2, &mut rng);
            for which in [Subsystem::A, Subsystem::B] {
                let t = triality_check(&s, which).unwrap();
                assert!(t.residual.abs() < 1e-10, "residual {}", t.residual);
            }
        }
    }

    #[test]
    fn quadrature_oracle_vacuum_is_identity() {
        for d in [1usize, 2, 4] {
            let vac = BipartitePureState::<f64>::basis(d, 0, 0).unwrap();
            let v = quadrature_vm_oracle(&vac);
            for j in 0..4 {
                for k in 0..4 {
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(v.get(j, k), expected, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn quadrature_oracle_half_xi() {
        let s = TruncatedTmss::from_xi(0.5_f64, 1).unwrap().state();
        let v = quadrature_vm_oracle(&s);
        assert_abs_diff_eq!(v.get(0, 0), 1.4, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(0, 2), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(1, 3), -0.8, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_oracle_single_photon() {
        // |1,0>: <x_a^2> = 3/2, so V_11 = 3; mode b stays vacuum.
        let s = BipartitePureState::<f64>::basis(2, 1, 0).unwrap();
        let v = quadrature_vm_oracle(&s);
        assert_abs_diff_eq!(v.get(0, 0), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(1, 1), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(2, 2), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(0, 2), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_oracle_coherent_superposition_has_mean() {
        // (|0> + |1>)/sqrt2 on mode a: <x_a> = 1/sqrt2, <x_a^2> = 1, V_11 = 2 - 1 = 1.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = BipartitePureState::product(&[c(h), c(h)], &[c(1.0), c(0.0)]).unwrap();
        let v = quadrature_vm_oracle(&s);
        assert_abs_diff_eq!(v.get(0, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.get(1, 1), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn single_precision_smoke() {
        let s = TruncatedTmss::from_xi(0.5_f32, 1).unwrap().state();
        let rho = s.reduce(Subsystem::A);
        assert!((rho.predictability_sq() - 0.36).abs() < 1e-6);
        let v = quadrature_vm_oracle(&s);
        assert!((v.get(0, 0) - 1.4).abs() < 1e-5);
    }
}
