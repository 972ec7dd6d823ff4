//! Fixed-capacity vectors and matrices for the at most three conserved
//! components handled by the 1D models.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

pub const MAX_COMPONENTS: usize = 3;

/// Conserved (or auxiliary) quantities at one degree of freedom.
#[derive(Clone, Copy, PartialEq)]
pub struct State {
    data: [f64; MAX_COMPONENTS],
    len: usize,
}

impl State {
    pub fn zeros(len: usize) -> Self {
        assert!(
            (1..=MAX_COMPONENTS).contains(&len),
            "component count {len} out of range"
        );
        Self {
            data: [0.0; MAX_COMPONENTS],
            len,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self::from_slice(&[value])
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut s = Self::zeros(values.len());
        s.data[..values.len()].copy_from_slice(values);
        s
    }

    pub fn filled(len: usize, value: f64) -> Self {
        let mut s = Self::zeros(len);
        s.data[..len].fill(value);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.len]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.as_slice().iter()
    }

    pub fn dot(&self, other: &State) -> f64 {
        debug_assert_eq!(self.len, other.len);
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm_inf(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> State {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn zip_with(&self, other: &State, f: impl Fn(f64, f64) -> f64) -> State {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (o, b) in out.as_mut_slice().iter_mut().zip(other.iter()) {
            *o = f(*o, *b);
        }
        out
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for State {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        self.map(|v| -v)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, rhs: f64) -> State {
        self.map(|v| v * rhs)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, rhs: State) -> State {
        rhs * self
    }
}

impl AddAssign for State {
    fn add_assign(&mut self, rhs: State) {
        *self = *self + rhs;
    }
}

impl SubAssign for State {
    fn sub_assign(&mut self, rhs: State) {
        *self = *self - rhs;
    }
}

/// Square matrix of size `dim <= 3`, used for flux Jacobians and
/// eigenvector bases.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMat {
    data: [[f64; MAX_COMPONENTS]; MAX_COMPONENTS],
    dim: usize,
}

impl SmallMat {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_COMPONENTS).contains(&dim));
        Self {
            data: [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS],
            dim,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &State) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i][j] = v;
    }

    pub fn mul_state(&self, x: &State) -> State {
        debug_assert_eq!(self.dim, x.len());
        let mut out = State::zeros(self.dim);
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.data[i][j] * x[j]).sum();
        }
        out
    }

    pub fn matmul(&self, rhs: &SmallMat) -> SmallMat {
        debug_assert_eq!(self.dim, rhs.dim);
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.data[i][k] * rhs.data[k][j]).sum()
        })
    }

    pub fn try_inverse(&self) -> Option<SmallMat> {
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| self.data[i][j]);
        let inv = m.try_inverse()?;
        if inv.iter().all(|v| v.is_finite()) {
            Some(Self::from_fn(self.dim, |i, j| inv[(i, j)]))
        } else {
            None
        }
    }

    pub fn max_abs_diff(&self, other: &SmallMat) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.data[i][j] - other.data[i][j]).abs());
            }
        }
        m
    }
}

impl fmt::Debug for SmallMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.dim).map(|i| &self.data[i][..self.dim]).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Flattens per-DOF states into a component-major-within-DOF buffer.
pub fn flatten(states: &[State]) -> Vec<f64> {
    states.iter().flat_map(|s| s.iter().copied()).collect()
}

pub fn unflatten(buf: &[f64], components: usize) -> Vec<State> {
    buf.chunks_exact(components).map(State::from_slice).collect()
}
