//! Square matrices over a [`Ring`], plus the Gaussian-integer pair form.

use crate::ring::Ring;

/// Side above which [`matmul`] switches to Strassen's scheme.
pub const DEFAULT_STRASSEN_THRESHOLD: usize = 128;

/// Dense square matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    side: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn zeros<R: Ring<Elem = T>>(ring: &R, side: usize) -> Matrix<T> {
        Matrix {
            side,
            data: ring.zeros(side * side),
        }
    }

    pub fn identity<R: Ring<Elem = T>>(ring: &R, side: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(ring, side);
        for i in 0..side {
            m.data[i * side + i] = ring.one();
        }
        m
    }

    pub fn from_vec(side: usize, data: Vec<T>) -> Matrix<T> {
        assert_eq!(data.len(), side * side, "matrix data has wrong length");
        Matrix { side, data }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.side + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.side + c] = v;
    }

    /// Copy of the `(bi, bj)` quadrant.
    pub fn quadrant(&self, bi: usize, bj: usize) -> Matrix<T> {
        let h = self.side / 2;
        let mut data = Vec::with_capacity(h * h);
        for r in 0..h {
            let start = (bi * h + r) * self.side + bj * h;
            data.extend_from_slice(&self.data[start..start + h]);
        }
        Matrix { side: h, data }
    }

    /// Assemble from four quadrants `[[a, b], [c, d]]`.
    pub fn from_quadrants(a: Matrix<T>, b: Matrix<T>, c: Matrix<T>, d: Matrix<T>) -> Matrix<T> {
        let h = a.side;
        let side = 2 * h;
        let mut data = Vec::with_capacity(side * side);
        for r in 0..h {
            data.extend_from_slice(&a.data[r * h..(r + 1) * h]);
            data.extend_from_slice(&b.data[r * h..(r + 1) * h]);
        }
        for r in 0..h {
            data.extend_from_slice(&c.data[r * h..(r + 1) * h]);
            data.extend_from_slice(&d.data[r * h..(r + 1) * h]);
        }
        Matrix { side, data }
    }
}

pub fn add<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix {
        side: a.side,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.add(x, y)).collect(),
    }
}

pub fn sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix {
        side: a.side,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.sub(x, y)).collect(),
    }
}

pub fn add_assign<R: Ring>(ring: &R, a: &mut Matrix<R::Elem>, b: &Matrix<R::Elem>) {
    for (x, y) in a.data.iter_mut().zip(&b.data) {
        ring.add_assign(x, y);
    }
}

pub fn sub_assign<R: Ring>(ring: &R, a: &mut Matrix<R::Elem>, b: &Matrix<R::Elem>) {
    for (x, y) in a.data.iter_mut().zip(&b.data) {
        ring.sub_assign(x, y);
    }
}

pub fn neg<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix {
        side: a.side,
        data: a.data.iter().map(|x| ring.neg(x)).collect(),
    }
}

/// Classical product, `ikj` order, skipping zero left entries.
pub fn matmul_classical<R: Ring>(
    ring: &R,
    a: &Matrix<R::Elem>,
    b: &Matrix<R::Elem>,
) -> Matrix<R::Elem> {
    let n = a.side;
    if let Some(data) = ring.matmul_kernel(&a.data, &b.data, n) {
        return Matrix { side: n, data };
    }
    let mut out = Matrix::zeros(ring, n);
    for i in 0..n {
        let row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = &a.data[i * n + k];
            if ring.is_zero(aik) {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            for (o, bkj) in row.iter_mut().zip(brow) {
                ring.mul_add_assign(o, aik, bkj);
            }
        }
    }
    out
}

/// Product with Strassen recursion above `threshold` (sides must be powers of two).
pub fn matmul_with<R: Ring>(
    ring: &R,
    a: &Matrix<R::Elem>,
    b: &Matrix<R::Elem>,
    threshold: usize,
) -> Matrix<R::Elem> {
    assert_eq!(a.side, b.side, "matrix sides differ");
    let n = a.side;
    if n <= threshold.max(1) || n % 2 == 1 {
        return matmul_classical(ring, a, b);
    }
    let (a11, a12, a21, a22) = (a.quadrant(0, 0), a.quadrant(0, 1), a.quadrant(1, 0), a.quadrant(1, 1));
    let (b11, b12, b21, b22) = (b.quadrant(0, 0), b.quadrant(0, 1), b.quadrant(1, 0), b.quadrant(1, 1));
    let m = |x: &Matrix<R::Elem>, y: &Matrix<R::Elem>| matmul_with(ring, x, y, threshold);
    let m1 = m(&add(ring, &a11, &a22), &add(ring, &b11, &b22));
    let m2 = m(&add(ring, &a21, &a22), &b11);
    let m3 = m(&a11, &sub(ring, &b12, &b22));
    let m4 = m(&a22, &sub(ring, &b21, &b11));
    let m5 = m(&add(ring, &a11, &a12), &b22);
    let m6 = m(&sub(ring, &a21, &a11), &add(ring, &b11, &b12));
    let m7 = m(&sub(ring, &a12, &a22), &add(ring, &b21, &b22));

    let mut c11 = add(ring, &m1, &m4);
    sub_assign(ring, &mut c11, &m5);
    add_assign(ring, &mut c11, &m7);
    let c12 = add(ring, &m3, &m5);
    let c21 = add(ring, &m2, &m4);
    let mut c22 = sub(ring, &m1, &m2);
    add_assign(ring, &mut c22, &m3);
    add_assign(ring, &mut c22, &m6);
    Matrix::from_quadrants(c11, c12, c21, c22)
}

/// Product with the default Strassen threshold.
pub fn matmul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    matmul_with(ring, a, b, DEFAULT_STRASSEN_THRESHOLD)
}

/// `re + i im` with entries in a ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianInt<T> {
    pub re: T,
    pub im: T,
}

impl<T: Clone> GaussianInt<T> {
    /// Multiply by `i^k`.
    pub fn times_i_pow<R: Ring<Elem = T>>(&self, ring: &R, k: u32) -> GaussianInt<T> {
        match k % 4 {
            0 => self.clone(),
            1 => GaussianInt {
                re: ring.neg(&self.im),
                im: self.re.clone(),
            },
            2 => GaussianInt {
                re: ring.neg(&self.re),
                im: ring.neg(&self.im),
            },
            _ => GaussianInt {
                re: self.im.clone(),
                im: ring.neg(&self.re),
            },
        }
    }
}

/// Square matrix over Gaussian integers, stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    pub t: usize,
    pub re: Matrix<T>,
    pub im: Matrix<T>,
}

impl<T: Clone> ComplexMatrix<T> {
    pub fn zeros<R: Ring<Elem = T>>(ring: &R, t: usize) -> ComplexMatrix<T> {
        ComplexMatrix {
            t,
            re: Matrix::zeros(ring, 1 << t),
            im: Matrix::zeros(ring, 1 << t),
        }
    }

    pub fn identity<R: Ring<Elem = T>>(ring: &R, t: usize) -> ComplexMatrix<T> {
        ComplexMatrix {
            t,
            re: Matrix::identity(ring, 1 << t),
            im: Matrix::zeros(ring, 1 << t),
        }
    }

    pub fn side(&self) -> usize {
        self.re.side
    }

    pub fn get(&self, r: usize, c: usize) -> GaussianInt<T> {
        GaussianInt {
            re: self.re.get(r, c).clone(),
            im: self.im.get(r, c).clone(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianInt<T>) {
        self.re.set(r, c, v.re);
        self.im.set(r, c, v.im);
    }
}

pub fn complex_add<R: Ring>(
    ring: &R,
    a: &ComplexMatrix<R::Elem>,
    b: &ComplexMatrix<R::Elem>,
) -> ComplexMatrix<R::Elem> {
    ComplexMatrix {
        t: a.t,
        re: add(ring, &a.re, &b.re),
        im: add(ring, &a.im, &b.im),
    }
}

/// Complex product with three real products.
pub fn complex_matmul<R: Ring>(
    ring: &R,
    a: &ComplexMatrix<R::Elem>,
    b: &ComplexMatrix<R::Elem>,
    threshold: usize,
) -> ComplexMatrix<R::Elem> {
    let ac = matmul_with(ring, &a.re, &b.re, threshold);
    let bd = matmul_with(ring, &a.im, &b.im, threshold);
    let mut mixed = matmul_with(
        ring,
        &add(ring, &a.re, &a.im),
        &add(ring, &b.re, &b.im),
        threshold,
    );
    sub_assign(ring, &mut mixed, &ac);
    sub_assign(ring, &mut mixed, &bd);
    ComplexMatrix {
        t: a.t,
        re: sub(ring, &ac, &bd),
        im: mixed,
    }
}
