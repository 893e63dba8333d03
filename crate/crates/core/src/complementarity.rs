//! Closed forms for the truncated two-mode squeezed state: predictability,
//! I-concurrence, state fidelity, the two independent variance-matrix
//! entries, and the identities tying them together. Also figure sweeps.
//!
//! Closed-form quotients are used for `xi <= 0.99`; above that the explicit
//! finite sums take over (see [`TruncatedTmss::use_series`]).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{pow_n, TruncatedTmss};
use crate::gaussian::VarianceMatrix;
use crate::scalar::Real;

/// Below this `V_13` the ratio `(V_11 - 1)/V_13` is treated as `0/0`.
pub const DEGENERATE_V13: f64 = 1e-14;

/// `Tr(rho^2) = N^4 (1 - xi^(4t+4)) / (1 - xi^4)` of either reduced state.
pub fn reduced_purity<T: Real>(s: &TruncatedTmss<T>) -> T {
    let n_sq = s.norm_sq();
    let x = s.xi() * s.xi();
    if s.use_series() {
        let x2 = x * x;
        let mut term = T::one();
        let mut acc = T::zero();
        for _ in 0..=s.cutoff() {
            acc = acc + term;
            term = term * x2;
        }
        return n_sq * n_sq * acc;
    }
    let one_minus_xi4 = s.one_minus_xi_sq() * (T::one() + x);
    n_sq * n_sq * (T::one() - pow_n(x, 2 * s.cutoff() + 2)) / one_minus_xi4
}

fn dimension<T: Real>(s: &TruncatedTmss<T>) -> T {
    T::from_usize(s.cutoff() + 1).unwrap()
}

/// `P^2 = 2 [N^4 (1 - xi^(4t+4))/(1 - xi^4) - 1/(t+1)]`, evaluated over the
/// common denominator so that `r = 0` gives `2t/(t+1)` to the last bit.
pub fn predictability_closed<T: Real>(s: &TruncatedTmss<T>) -> T {
    let p = reduced_purity(s);
    let d = dimension(s);
    T::lit(2.0) * ((d - T::one()) * p - (T::one() - p)) / d
}

/// `C_I^2 = 2 (1 - N^4 (1 - xi^(4t+4))/(1 - xi^4))`.
pub fn iconcurrence_closed<T: Real>(s: &TruncatedTmss<T>) -> T {
    T::lit(2.0) * (T::one() - reduced_purity(s))
}

/// `|<psi(t)|TMSS>|^2 = 1 / (N^2 cosh^2 r)`.
pub fn fidelity_to_tmss<T: Real>(s: &TruncatedTmss<T>) -> T {
    s.one_minus_xi_sq() / s.norm_sq()
}

/// Complementarity terms of one reduced mode together with their bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplementarityBudget<T> {
    pub p_sq: T,
    pub v_sq: T,
    pub c_i_sq: T,
    /// `2t/(t+1)` at cut-off `t`; 2 for the untruncated state.
    pub bound: T,
}

impl<T: Real> ComplementarityBudget<T> {
    pub fn total(&self) -> T {
        self.p_sq + self.v_sq + self.c_i_sq
    }

    /// `total - bound`; zero for pure states.
    pub fn residual(&self) -> T {
        self.total() - self.bound
    }

    pub fn within_bound(&self) -> bool {
        let floor = -T::tol(1e-12);
        self.p_sq >= floor
            && self.v_sq >= floor
            && self.c_i_sq >= floor
            && self.total() <= self.bound + T::tol(1e-10)
    }
}

/// Budget of the truncated state. The reduced state is diagonal in the Fock
/// basis, so the visibility vanishes identically.
pub fn budget<T: Real>(s: &TruncatedTmss<T>) -> ComplementarityBudget<T> {
    let t = T::from_usize(s.cutoff()).unwrap();
    ComplementarityBudget {
        p_sq: predictability_closed(s),
        v_sq: T::zero(),
        c_i_sq: iconcurrence_closed(s),
        bound: T::lit(2.0) * t / (t + T::one()),
    }
}

/// The two independent variance-matrix entries of the truncated state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VmElements<T> {
    pub v11: T,
    pub v13: T,
}

impl<T: Real> VmElements<T> {
    /// Full matrix with pattern `V11 = V22 = V33 = V44`, `V13 = -V24`.
    pub fn to_matrix(self) -> VarianceMatrix<T> {
        let (d, c, z) = (self.v11, self.v13, T::zero());
        VarianceMatrix::from_array_unchecked([
            [d, z, c, z],
            [z, d, z, -c],
            [c, z, d, z],
            [z, -c, z, d],
        ])
    }
}

/// `V_11 = N^2 sum_{n<=t} xi^{2n} (2n+1)`, `V_13 = 2 N^2 sum_{n<t} xi^{2n+1} (n+1)`.
pub fn vm_elements_series<T: Real>(s: &TruncatedTmss<T>) -> VmElements<T> {
    let n_sq = s.norm_sq();
    let xi = s.xi();
    let x = xi * xi;
    let mut v11 = T::zero();
    let mut v13 = T::zero();
    let mut pow = T::one();
    for n in 0..=s.cutoff() {
        let nf = T::from_usize(n).unwrap();
        v11 = v11 + pow * (nf + nf + T::one());
        if n < s.cutoff() {
            v13 = v13 + pow * xi * (nf + T::one());
        }
        pow = pow * x;
    }
    VmElements {
        v11: n_sq * v11,
        v13: T::lit(2.0) * n_sq * v13,
    }
}

/// Rational closed forms of the two entries, always as quotients:
///
/// `V_11 = [1 + xi^2 - (3+2t) xi^(2t+2) + (1+2t) xi^(2t+4)] / [(1-xi^2)(1-xi^(2t+2))]`,
/// `V_13 = 2 xi [1 - (t+1) xi^(2t) + t xi^(2t+2)] / [(1-xi^2)(1-xi^(2t+2))]`.
pub fn vm_elements_quotient<T: Real>(s: &TruncatedTmss<T>) -> VmElements<T> {
    let t = s.cutoff();
    let tf = T::from_usize(t).unwrap();
    let one = T::one();
    let two = T::lit(2.0);
    let xi = s.xi();
    let x = xi * xi;
    let x_t = pow_n(x, t);
    let x_t1 = x_t * x;
    let x_t2 = x_t1 * x;
    let denom = s.one_minus_xi_sq() * (one - x_t1);
    if denom == T::zero() {
        // xi = 0: the vacuum.
        return VmElements {
            v11: one,
            v13: T::zero(),
        };
    }
    let v11 = (one + x - (T::lit(3.0) + two * tf) * x_t1 + (one + two * tf) * x_t2) / denom;
    let v13 = two * xi * (one - (tf + one) * x_t + tf * x_t1) / denom;
    VmElements { v11, v13 }
}

/// Production evaluation: quotients, or finite sums when `xi > 0.99`.
pub fn vm_elements_closed<T: Real>(s: &TruncatedTmss<T>) -> VmElements<T> {
    if s.use_series() {
        vm_elements_series(s)
    } else {
        vm_elements_quotient(s)
    }
}

/// Result of inverting `xi = (V_11 - 1)/V_13`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiFromVm<T> {
    pub xi: T,
    /// `V_13` was too small for the ratio to be meaningful; `xi` is set to 0.
    pub degenerate: bool,
}

/// `xi = (V_11 - 1)/V_13`, exact for the truncated state at every cut-off.
pub fn xi_from_vm<T: Real>(v11: T, v13: T) -> XiFromVm<T> {
    if !(v13 > T::lit(DEGENERATE_V13)) {
        return XiFromVm {
            xi: T::zero(),
            degenerate: true,
        };
    }
    XiFromVm {
        xi: (v11 - T::one()) / v13,
        degenerate: false,
    }
}

/// `sqrt(V_11^2 - 1) - V_13`: how far the entries are from what purity of a
/// Gaussian state would force.
pub fn purity_discrepancy<T: Real>(s: &TruncatedTmss<T>) -> T {
    let (pure, v13) = purity_curves(s);
    pure - v13
}

/// `(sqrt(V_11^2 - 1), V_13)`.
pub fn purity_curves<T: Real>(s: &TruncatedTmss<T>) -> (T, T) {
    let e = vm_elements_closed(s);
    let pure = ((e.v11 - T::one()) * (e.v11 + T::one()))
        .max(T::zero())
        .sqrt();
    (pure, e.v13)
}

/// Both sides of the large-cut-off relation
/// `N^4 (1 - xi^(4t+4))/(1 - xi^4) ~ [V13^2 - (V11-1)^2] / [V13^2 + (V11-1)^2]`.
pub fn approx_lhs_rhs<T: Real>(s: &TruncatedTmss<T>) -> Result<(T, T)> {
    if !(s.r() > T::zero()) || s.cutoff() < 1 {
        return Err(Error::InvalidParameter(format!(
            "large-cut-off relation needs r > 0 and t >= 1, got r = {}, t = {}",
            s.r(),
            s.cutoff()
        )));
    }
    let e = vm_elements_closed(s);
    let a = e.v13 * e.v13;
    let b = (e.v11 - T::one()) * (e.v11 - T::one());
    Ok((reduced_purity(s), (a - b) / (a + b)))
}

/// `C_I^2 = 2 (1 - 1/V_11)` for a pure symmetric two-mode Gaussian state.
pub fn iconcurrence_from_vm<T: Real>(v11: T) -> Result<T> {
    if !(v11 >= T::one()) {
        return Err(Error::NonPhysical(format!("V_11 = {v11} < 1")));
    }
    Ok(T::lit(2.0) * (T::one() - T::one() / v11))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Predictability,
    Fidelity,
    #[serde(rename = "iconcurrence")]
    IConcurrence,
    VmDiscrepancy,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Predictability,
        Quantity::Fidelity,
        Quantity::IConcurrence,
        Quantity::VmDiscrepancy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Predictability => "predictability",
            Quantity::Fidelity => "fidelity",
            Quantity::IConcurrence => "iconcurrence",
            Quantity::VmDiscrepancy => "vm-discrepancy",
        }
    }

    /// Whether rows carry a second value column.
    pub fn has_second_value(self) -> bool {
        self == Quantity::VmDiscrepancy
    }

    /// Meaning of the value columns.
    pub fn columns(self) -> (&'static str, Option<&'static str>) {
        match self {
            Quantity::Predictability => ("P^2", None),
            Quantity::Fidelity => ("|<psi(t)|TMSS>|^2", None),
            Quantity::IConcurrence => ("C_I^2", None),
            Quantity::VmDiscrepancy => ("V13", Some("sqrt(V11^2-1)")),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown quantity {s:?}")))
    }
}

/// Continuous axis of a sweep: squeezing `r` or `xi = tanh r`.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis<T> {
    Squeezing(Vec<T>),
    Xi(Vec<T>),
}

impl<T: Real> SweepAxis<T> {
    pub fn values(&self) -> &[T] {
        match self {
            SweepAxis::Squeezing(v) | SweepAxis::Xi(v) => v,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Squeezing(_) => "r",
            SweepAxis::Xi(_) => "xi",
        }
    }

    fn state(&self, value: T, t: usize) -> Result<TruncatedTmss<T>> {
        match self {
            SweepAxis::Squeezing(_) => TruncatedTmss::new(value, t),
            SweepAxis::Xi(_) => TruncatedTmss::from_xi(value, t),
        }
    }
}

/// `min, min + step, ...` up to `max` inclusive (with a 1e-9 step slack).
pub fn stepped_range<T: Real>(min: T, max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "range needs finite bounds and step > 0, got {min}..{max} step {step}"
        )));
    }
    if max < min {
        return Err(Error::InvalidParameter(format!("empty range {min}..{max}")));
    }
    let count = ((max - min) / step + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap()
        + 1;
    Ok((0..count)
        .map(|i| min + T::from_usize(i).unwrap() * step)
        .collect())
}

/// Axes and quantity of a figure-style sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    axis: SweepAxis<T>,
    t_values: Vec<usize>,
    quantity: Quantity,
}

fn strictly_increasing<X: PartialOrd>(v: &[X]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl<T: Real> SweepGrid<T> {
    pub fn new(axis: SweepAxis<T>, t_values: Vec<usize>, quantity: Quantity) -> Result<Self> {
        let values = axis.values();
        if values.is_empty() || t_values.is_empty() {
            return Err(Error::InvalidParameter(
                "sweep axes must be non-empty".into(),
            ));
        }
        if !strictly_increasing(values) || !strictly_increasing(&t_values) {
            return Err(Error::InvalidParameter(
                "sweep axes must be strictly increasing".into(),
            ));
        }
        // Validates the parameter domain of every axis value once.
        for &v in values {
            axis.state(v, 0)?;
        }
        Ok(Self {
            axis,
            t_values,
            quantity,
        })
    }

    /// Preset grids reproducing figures 1-4: `r` in `[0, 3]` step 0.05 with
    /// `t` in `1..=50` for predictability, fidelity and I-concurrence; `xi` in
    /// `[0, 0.99]` step 0.01 with `t` in `{5, 10, 15, 20}` for the
    /// variance-matrix discrepancy.
    pub fn figure(n: u8) -> Result<Self> {
        let surface = |q| {
            Self::new(
                SweepAxis::Squeezing(stepped_range(T::zero(), T::lit(3.0), T::lit(0.05))?),
                (1..=50).collect(),
                q,
            )
        };
        match n {
            1 => surface(Quantity::Predictability),
            2 => surface(Quantity::Fidelity),
            3 => surface(Quantity::IConcurrence),
            4 => Self::new(
                SweepAxis::Xi(stepped_range(T::zero(), T::lit(0.99), T::lit(0.01))?),
                vec![5, 10, 15, 20],
                Quantity::VmDiscrepancy,
            ),
            _ => Err(Error::InvalidParameter(format!(
                "no figure {n}; expected 1-4"
            ))),
        }
    }

    pub fn axis(&self) -> &SweepAxis<T> {
        &self.axis
    }

    pub fn t_values(&self) -> &[usize] {
        &self.t_values
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn len(&self) -> usize {
        self.axis.values().len() * self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub r: T,
    pub t: usize,
    pub xi: T,
    pub value: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value2: Option<T>,
}

fn evaluate<T: Real>(s: &TruncatedTmss<T>, q: Quantity) -> (T, Option<T>) {
    match q {
        Quantity::Predictability => (predictability_closed(s), None),
        Quantity::Fidelity => (fidelity_to_tmss(s), None),
        Quantity::IConcurrence => (iconcurrence_closed(s), None),
        Quantity::VmDiscrepancy => {
            let (pure, v13) = purity_curves(s);
            (v13, Some(pure))
        }
    }
}

/// Evaluates the grid row-major (axis value outer, cut-off inner). Points
/// are computed in parallel; row order does not depend on the thread count.
pub fn generate_sweep<T: Real>(grid: &SweepGrid<T>) -> Vec<SweepRow<T>> {
    grid.axis
        .values()
        .par_iter()
        .map(|&a| {
            grid.t_values
                .iter()
                .map(|&t| {
                    let s = grid
                        .axis
                        .state(a, t)
                        .expect("axis validated at construction");
                    let (value, value2) = evaluate(&s, grid.quantity);
                    SweepRow {
                        r: s.r(),
                        t,
                        xi: s.xi(),
                        value,
                        value2,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}
