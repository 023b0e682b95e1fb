//! Dense exact matrices over Q, sized for companion-matrix transforms.

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::rat_int;
use crate::poly::QPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub n: usize,
    pub rows: Vec<Vec<BigRational>>,
}

impl QMat {
    pub fn zero(n: usize) -> Self {
        QMat {
            n,
            rows: vec![vec![rat_int(0); n]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n);
        for i in 0..n {
            m.rows[i][i] = rat_int(1);
        }
        m
    }

    /// Companion matrix of a monic polynomial of degree >= 1.
    pub fn companion(f: &QPoly) -> Self {
        assert!(f.is_monic() && f.deg() >= 1);
        let n = f.deg();
        let mut m = QMat::zero(n);
        for i in 1..n {
            m.rows[i][i - 1] = rat_int(1);
        }
        for i in 0..n {
            m.rows[i][n - 1] = -f.coeff(i);
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = QMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                if self.rows[i][k].is_zero() {
                    continue;
                }
                let a = &self.rows[i][k];
                for j in 0..n {
                    if other.rows[k][j].is_zero() {
                        continue;
                    }
                    let t = a * &other.rows[k][j];
                    out.rows[i][j] += t;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.rows[i][j] += &other.rows[i][j];
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> QMat {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in row {
                *v *= c;
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> QMat {
        let mut base = self.clone();
        let mut acc = QMat::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut inv = QMat::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let pinv = a[col][col].clone().recip();
            for j in 0..n {
                a[col][j] *= &pinv;
                inv[col][j] *= &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &a[col][j] * &factor;
                    a[r][j] -= t;
                    let t = &inv[col][j] * &factor;
                    inv[r][j] -= t;
                }
            }
        }
        Some(QMat { n, rows: inv })
    }

    pub fn trace(&self) -> BigRational {
        let mut t = rat_int(0);
        for i in 0..self.n {
            t += &self.rows[i][i];
        }
        t
    }

    pub fn kronecker(&self, other: &QMat) -> QMat {
        let n = self.n * other.n;
        let mut out = QMat::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.rows[i][j].is_zero() {
                    continue;
                }
                for k in 0..other.n {
                    for l in 0..other.n {
                        if other.rows[k][l].is_zero() {
                            continue;
                        }
                        out.rows[i * other.n + k][j * other.n + l] =
                            &self.rows[i][j] * &other.rows[k][l];
                    }
                }
            }
        }
        out
    }

    /// Monic characteristic polynomial det(xI - M) by the Faddeev-LeVerrier
    /// recurrence: M_1 = A, c_{n-1} = -tr(M_1), then
    /// M_k = A(M_{k-1} + c_{n-k+1} I) and c_{n-k} = -tr(M_k)/k.
    pub fn charpoly(&self) -> QPoly {
        let n = self.n;
        let mut coeffs = vec![rat_int(0); n + 1];
        coeffs[n] = rat_int(1);
        let mut mk = self.clone();
        for k in 1..=n {
            if k > 1 {
                let mut prev = mk;
                let c = coeffs[n - k + 1].clone();
                for i in 0..n {
                    prev.rows[i][i] += &c;
                }
                mk = self.mul(&prev);
            }
            let ck = -mk.trace() / BigRational::from_integer(num_bigint::BigInt::from(k as u64));
            coeffs[n - k] = ck;
        }
        QPoly::from_coeffs(coeffs)
    }
}

/// Polynomial with roots {r*s : f(r)=0, g(s)=0} (with multiplicity), monic.
pub fn composed_product(f: &QPoly, g: &QPoly) -> QPoly {
    let a = QMat::companion(&f.monic());
    let b = QMat::companion(&g.monic());
    a.kronecker(&b).charpoly()
}
