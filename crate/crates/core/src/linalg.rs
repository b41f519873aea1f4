//! Banded LU with partial pivoting, smallest singular value by inverse
//! iteration, and shift-invert Arnoldi for eigenvalues near a shift.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku + kl`; the extra `kl`
    /// columns absorb pivoting fill.
    rows: Vec<C>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, rows: vec![ZERO; n * (2 * kl + ku + 1)] }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width() + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return ZERO;
        }
        self.rows[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.rows[k] = v;
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in i.saturating_sub(self.kl)..=(i + self.ku).min(self.n - 1) {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    /// In-place LU factorization with row pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let mut piv = vec![0usize; n];
        for i in 0..n {
            let last = (i + self.kl).min(n - 1);
            let mut p = i;
            let mut best = self.get(i, i).norm();
            for r in i + 1..=last {
                let v = self.get(r, i).norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Resolvent(format!("singular band matrix at column {i}")));
            }
            piv[i] = p;
            let right = (i + self.ku + self.kl).min(n - 1);
            if p != i {
                for j in i..=right {
                    let (a, b) = (self.idx(i, j), self.idx(p, j));
                    self.rows.swap(a, b);
                }
            }
            let d = self.get(i, i);
            for r in i + 1..=last {
                let k = self.idx(r, i);
                let l = self.rows[k] / d;
                self.rows[k] = l;
                if l == ZERO {
                    continue;
                }
                for j in i + 1..=right {
                    let u = self.get(i, j);
                    let k = self.idx(r, j);
                    self.rows[k] -= l * u;
                }
            }
        }
        Ok(BandLu { a: self, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    a: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [C]) {
        let a = &self.a;
        let n = a.n;
        for i in 0..n {
            b.swap(i, self.piv[i]);
            let bi = b[i];
            for r in i + 1..=(i + a.kl).min(n - 1) {
                b[r] -= a.get(r, i) * bi;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + a.ku + a.kl).min(n - 1) {
                s -= a.get(i, j) * b[j];
            }
            b[i] = s / a.get(i, i);
        }
    }
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A fixed, nondegenerate start vector.
pub fn start_vector(n: usize) -> Vec<C> {
    (0..n)
        .map(|j| {
            let x = j as f64;
            C::new(1.0 + 0.3 * (0.7 * x).cos(), 0.2 * (1.3 * x).sin())
        })
        .collect()
}

/// `‖B⁻¹‖₂ = 1/σ_min(B)` by inverse iteration on `BᴴB`.
pub fn inverse_norm(b: &BandMatrix, max_iter: usize, rtol: f64) -> Result<f64> {
    let lu = b.clone().factor()?;
    let luh = b.conj_transpose().factor()?;
    let mut v = start_vector(b.n);
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut est = 0.0;
    for _ in 0..max_iter {
        let mut w = v.clone();
        luh.solve_in_place(&mut w);
        lu.solve_in_place(&mut w);
        // v unit: vᴴ(BᴴB)⁻¹v ≤ ‖B⁻¹‖², approached from below.
        let ray = dot(&v, &w).re.max(0.0);
        let next = ray.sqrt();
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return Err(Error::Resolvent("inverse iteration broke down".into()));
        }
        v = w.into_iter().map(|x| x / nw).collect();
        if (next - est).abs() <= rtol * next {
            return Ok(next);
        }
        est = next;
    }
    Ok(est)
}

/// Eigenvalues of the matrix applied by `apply` closest to `shift`, where
/// `solve` applies `(A - shift)⁻¹`. Returns up to `k` values sorted by
/// distance to the shift.
pub fn shift_invert_eigenvalues(
    n: usize,
    shift: C,
    krylov_dim: usize,
    k: usize,
    solve: &dyn Fn(&mut [C]),
) -> Result<Vec<C>> {
    let m = krylov_dim.min(n);
    let mut basis: Vec<Vec<C>> = Vec::with_capacity(m + 1);
    let mut h = DMatrix::<C>::zeros(m + 1, m);
    let mut v = start_vector(n);
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    basis.push(v);
    let mut dim = m;
    for j in 0..m {
        let mut w = basis[j].clone();
        solve(&mut w);
        // Two passes of classical Gram–Schmidt.
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = dot(b, &w);
                h[(i, j)] += c;
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nw = norm(&w);
        h[(j + 1, j)] = C::new(nw, 0.0);
        if nw <= 1e-14 * h.column(j).norm() {
            dim = j + 1;
            break;
        }
        basis.push(w.into_iter().map(|x| x / nw).collect());
    }
    let hm = h.view((0, 0), (dim, dim)).into_owned();
    let mu = Schur::new(hm)
        .eigenvalues()
        .ok_or_else(|| Error::Resolvent("Hessenberg eigensolve failed".into()))?;
    let mut lam: Vec<C> = mu.iter().filter(|m| m.norm() > 0.0).map(|m| shift + m.inv()).collect();
    lam.sort_by(|a, b| (a - shift).norm().total_cmp(&(b - shift).norm()));
    lam.truncate(k);
    Ok(lam)
}
