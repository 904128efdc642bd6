//! Dense statevector over little-endian wires (wire 0 is the least
//! significant bit of the basis index).

use num_complex::Complex64 as C;

pub type Gate1 = [[C; 2]; 2];

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn h() -> Gate1 {
    [
        [C::new(R, 0.0), C::new(R, 0.0)],
        [C::new(R, 0.0), C::new(-R, 0.0)],
    ]
}

pub fn x() -> Gate1 {
    [
        [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
    ]
}

pub fn y() -> Gate1 {
    [
        [C::new(0.0, 0.0), C::new(0.0, -1.0)],
        [C::new(0.0, 1.0), C::new(0.0, 0.0)],
    ]
}

pub fn z() -> Gate1 {
    diag(C::new(1.0, 0.0), C::new(-1.0, 0.0))
}

pub fn s() -> Gate1 {
    diag(C::new(1.0, 0.0), C::new(0.0, 1.0))
}

pub fn t() -> Gate1 {
    diag(C::new(1.0, 0.0), C::new(R, R))
}

fn diag(a: C, b: C) -> Gate1 {
    [[a, C::new(0.0, 0.0)], [C::new(0.0, 0.0), b]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

impl Default for StateVector {
    fn default() -> Self {
        StateVector {
            n: 0,
            amps: vec![C::new(1.0, 0.0)],
        }
    }
}

impl StateVector {
    /// Computational basis state `|index>` over `n` wires.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        amps[index] = C::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Adds a wire in `|0>` and returns its index.
    pub fn alloc(&mut self) -> usize {
        self.amps.resize(self.amps.len() * 2, C::new(0.0, 0.0));
        self.n += 1;
        self.n - 1
    }

    /// Probability mass with wire `w` equal to 1.
    pub fn mass_one(&self, w: usize) -> f64 {
        let bit = 1 << w;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Removes the top wire, keeping the slice where it equals `value`.
    pub fn drop_top(&mut self, value: bool) {
        let half = self.amps.len() / 2;
        if value {
            self.amps.drain(..half);
        } else {
            self.amps.truncate(half);
        }
        self.n -= 1;
    }

    pub fn apply1(&mut self, w: usize, g: &Gate1) {
        let bit = 1 << w;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = g[0][0] * a0 + g[0][1] * a1;
                self.amps[i | bit] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
    }

    /// X on `target` conditioned on every wire in `controls` being 1.
    pub fn apply_mcx(&mut self, controls: &[usize], target: usize) {
        let mask: usize = controls.iter().map(|c| 1 << c).sum();
        let bit = 1 << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && i & mask == mask {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// Projects wire `w` onto `outcome`; renormalizes when `renorm`.
    pub fn collapse(&mut self, w: usize, outcome: bool, renorm: bool) {
        let bit = 1 << w;
        let mut mass = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) != outcome {
                *a = C::new(0.0, 0.0);
            } else {
                mass += a.norm_sqr();
            }
        }
        if renorm && mass > 0.0 {
            let k = 1.0 / mass.sqrt();
            for a in &mut self.amps {
                *a *= k;
            }
        }
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Matrix {
    pub fn from_columns(cols: &[Vec<C>]) -> Matrix {
        let dim = cols.len();
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[r * dim + c] = *v;
            }
        }
        Matrix { dim, data }
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    /// `tr(self† other)`.
    pub fn inner(&self, other: &Matrix) -> C {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Equality up to a global phase: `|tr(A†B)| / dim >= 1 - tol`.
    pub fn equal_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.inner(other).norm() / self.dim as f64 >= 1.0 - tol
    }

    /// `max |(A†A - I)_{rc}|`.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = C::new(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.get(k, r).conj() * self.get(k, c);
                }
                if r == c {
                    acc -= C::new(1.0, 0.0);
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}
