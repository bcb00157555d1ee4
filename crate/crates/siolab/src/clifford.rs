//! The real Clifford algebra Cl_n, n <= 8: blade-indexed multivectors,
//! geometric product, conjugation, Euclidean norm, vector embedding.
//!
//! A blade is indexed by a bitmask over the generators e_1..e_n; bit j-1 set
//! means e_j participates, with factors ordered by increasing index. The
//! generators anticommute and square to -1, so vectors satisfy
//! x (.) x = -|x|^2 and unit normals are their own inverses up to sign.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Dense multivector over the blade basis of Cl_n.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    n: u32,
    coeffs: Vec<f64>,
}

/// Product of basis blades: e_A (.) e_B = sign * e_{A xor B}.
///
/// The sign counts the transpositions needed to interleave the two sorted
/// index lists (inversion pairs i in A, j in B with i > j) plus one factor
/// -1 per common index from e_j (.) e_j = -1.
pub fn blade_product(a: u32, b: u32) -> (f64, u32) {
    let mut swaps = 0u32;
    let mut sh = a >> 1;
    while sh != 0 {
        swaps += (sh & b).count_ones();
        sh >>= 1;
    }
    let contractions = (a & b).count_ones();
    let sign = if (swaps + contractions) % 2 == 0 { 1.0 } else { -1.0 };
    (sign, a ^ b)
}

/// Conjugation sign on a blade of grade l: (-1)^{l(l+1)/2}.
fn conjugation_sign(grade: u32) -> f64 {
    if grade % 4 == 1 || grade % 4 == 2 {
        -1.0
    } else {
        1.0
    }
}

impl Multivector {
    fn check_dim(n: u32) {
        assert!((1..=8).contains(&n), "Cl_n supports n in 1..=8, got {n}");
    }

    /// The zero element of Cl_n.
    pub fn zero(n: u32) -> Self {
        Self::check_dim(n);
        Multivector { n, coeffs: vec![0.0; 1 << n] }
    }

    /// A scalar (grade-0) element.
    pub fn scalar(n: u32, value: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = value;
        m
    }

    /// The generator e_j, j in 1..=n.
    pub fn basis_vector(n: u32, j: u32) -> Self {
        Self::check_dim(n);
        assert!((1..=n).contains(&j), "basis index {j} outside 1..={n}");
        Self::from_blade(n, 1 << (j - 1), 1.0)
    }

    /// A single blade given by its bitmask.
    pub fn from_blade(n: u32, mask: u32, coeff: f64) -> Self {
        Self::check_dim(n);
        assert!(mask < (1u32 << n), "blade mask {mask:#b} outside Cl_{n}");
        let mut m = Self::zero(n);
        m.coeffs[mask as usize] = coeff;
        m
    }

    /// Embeds x in R^n onto the single-bit blades.
    pub fn embed(x: &[f64]) -> Self {
        let n = x.len() as u32;
        Self::check_dim(n);
        let mut m = Self::zero(n);
        for (j, &xj) in x.iter().enumerate() {
            m.coeffs[1 << j] = xj;
        }
        m
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of the blade with the given mask.
    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// The n coefficients on the single-bit blades.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coeffs[1 << j]).collect()
    }

    /// Projection onto grade k.
    pub fn grade_part(&self, k: u32) -> Multivector {
        let mut m = Multivector::zero(self.n);
        for (b, &c) in self.coeffs.iter().enumerate() {
            if (b as u32).count_ones() == k {
                m.coeffs[b] = c;
            }
        }
        m
    }

    /// Geometric product.
    ///
    /// # Panics
    ///
    /// Panics on dimension mismatch.
    pub fn gproduct(&self, other: &Multivector) -> Multivector {
        assert_eq!(self.n, other.n, "dimension mismatch: Cl_{} vs Cl_{}", self.n, other.n);
        let mut out = Multivector::zero(self.n);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                let (sign, mask) = blade_product(a as u32, b as u32);
                out.coeffs[mask as usize] += sign * ca * cb;
            }
        }
        out
    }

    /// Clifford conjugation: on a grade-l blade the sign is (-1)^{l(l+1)/2},
    /// i.e. the reversal of the factor list times (-1)^l.
    pub fn conjugate(&self) -> Multivector {
        let mut m = self.clone();
        for (b, c) in m.coeffs.iter_mut().enumerate() {
            *c *= conjugation_sign((b as u32).count_ones());
        }
        m
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Multivector {
        let mut m = self.clone();
        for x in &mut m.coeffs {
            *x *= c;
        }
        m
    }

    /// In-place self += c * other, for quadrature accumulation.
    pub fn accumulate(&mut self, c: f64, other: &Multivector) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += c * y;
        }
    }

    /// Largest absolute coefficient; a convenient residual norm.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        self.accumulate(1.0, rhs);
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out.accumulate(-1.0, rhs);
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, c: f64) -> Multivector {
        self.scale(c)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if b == 0 {
                write!(f, "{mag}")?;
            } else {
                if (mag - 1.0).abs() > 1e-300 {
                    write!(f, "{mag} ")?;
                }
                let blades: Vec<String> =
                    (0..self.n).filter(|j| b & (1 << j) != 0).map(|j| format!("e{}", j + 1)).collect();
                write!(f, "{}", blades.join("^"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Brute-force product oracle: expand both blades into generator lists,
    /// concatenate, bubble-sort with a sign per swap, cancel equal adjacent
    /// generators with a -1 each.
    fn oracle_blade_product(a: u32, b: u32) -> (f64, u32) {
        let mut list: Vec<u32> = Vec::new();
        for j in 0..8 {
            if a & (1 << j) != 0 {
                list.push(j);
            }
        }
        for j in 0..8 {
            if b & (1 << j) != 0 {
                list.push(j);
            }
        }
        let mut sign = 1.0;
        loop {
            let mut acted = false;
            let mut i = 0;
            while i + 1 < list.len() {
                if list[i] == list[i + 1] {
                    list.drain(i..=i + 1);
                    sign = -sign;
                    acted = true;
                } else if list[i] > list[i + 1] {
                    list.swap(i, i + 1);
                    sign = -sign;
                    acted = true;
                } else {
                    i += 1;
                }
            }
            if !acted {
                break;
            }
        }
        let mut mask = 0u32;
        for j in list {
            mask |= 1 << j;
        }
        (sign, mask)
    }

    fn random_mv(rng: &mut StdRng, n: u32) -> Multivector {
        let mut m = Multivector::zero(n);
        for b in 0..(1usize << n) {
            m.coeffs[b] = rng.random_range(-1.0..1.0);
        }
        m
    }

    #[test]
    fn blade_product_matches_oracle_exhaustively() {
        for n in 1..=6u32 {
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    assert_eq!(
                        blade_product(a, b),
                        oracle_blade_product(a, b),
                        "n={n} a={a:#b} b={b:#b}"
                    );
                }
            }
        }
    }

    #[test]
    fn generator_relations() {
        for n in 2..=5u32 {
            for j in 1..=n {
                let ej = Multivector::basis_vector(n, j);
                assert_eq!(ej.gproduct(&ej), Multivector::scalar(n, -1.0));
                for k in 1..=n {
                    if j != k {
                        let ek = Multivector::basis_vector(n, k);
                        let jk = ej.gproduct(&ek);
                        let kj = ek.gproduct(&ej);
                        assert_eq!(jk, (&kj).neg());
                    }
                }
            }
        }
    }

    #[test]
    fn stepwise_product_example() {
        // e1 (.) e2 (.) e2 (.) e1 = 1.
        let n = 2;
        let e1 = Multivector::basis_vector(n, 1);
        let e2 = Multivector::basis_vector(n, 2);
        let p = e1.gproduct(&e2).gproduct(&e2).gproduct(&e1);
        assert_eq!(p, Multivector::scalar(n, 1.0));
        // (e1+e2) (.) (e1+e2) = -2.
        let v = Multivector::embed(&[1.0, 1.0]);
        assert_eq!(v.gproduct(&v), Multivector::scalar(n, -2.0));
        assert_eq!(
            Multivector::embed(&[1.0, 0.0]).gproduct(&Multivector::embed(&[0.0, 1.0])),
            Multivector::from_blade(n, 0b11, 1.0)
        );
    }

    #[test]
    fn vectors_square_to_minus_norm() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in 2..=5u32 {
            for _ in 0..200 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let m = Multivector::embed(&x);
                let sq = m.gproduct(&m);
                let norm2: f64 = x.iter().map(|v| v * v).sum();
                let diff = &sq - &Multivector::scalar(n, -norm2);
                assert!(diff.max_abs() < 1e-12, "n={n}: {sq}");
            }
        }
    }

    #[test]
    fn conjugation_signs_and_involution() {
        // Oracle: conjugate of e_I is (-1)^l times the reversed product.
        for n in 1..=6u32 {
            for mask in 0..(1u32 << n) {
                let blade = Multivector::from_blade(n, mask, 1.0);
                let conj = blade.conjugate();
                let mut rev = Multivector::scalar(n, 1.0);
                for j in (0..n).rev() {
                    if mask & (1 << j) != 0 {
                        rev = rev.gproduct(&Multivector::basis_vector(n, j + 1));
                    }
                }
                let l = mask.count_ones();
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let want = rev.scale(sign);
                assert_eq!(conj, want, "n={n} mask={mask:#b}");
            }
        }
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let u = random_mv(&mut rng, 5);
            assert!((u.conjugate().norm() - u.norm()).abs() < 1e-13);
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = Multivector::embed(&x);
            assert_eq!(v.conjugate(), (&v).neg());
        }
    }

    #[test]
    fn conjugation_reverses_products() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..50 {
            let u = random_mv(&mut rng, 4);
            let v = random_mv(&mut rng, 4);
            let lhs = u.gproduct(&v).conjugate();
            let rhs = v.conjugate().gproduct(&u.conjugate());
            assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = StdRng::seed_from_u64(17);
        for n in 2..=5u32 {
            for _ in 0..40 {
                let u = random_mv(&mut rng, n);
                let v = random_mv(&mut rng, n);
                let w = random_mv(&mut rng, n);
                let l = u.gproduct(&v).gproduct(&w);
                let r = u.gproduct(&v.gproduct(&w));
                assert!((&l - &r).max_abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn norm_identities() {
        let m = &Multivector::scalar(2, 3.0) + &Multivector::from_blade(2, 0b11, 4.0);
        assert_eq!(m.norm(), 5.0);
        let mut rng = StdRng::seed_from_u64(23);
        for n in 2..=5u32 {
            for _ in 0..200 {
                // Vector factor: the norm is exactly multiplicative.
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let xv = Multivector::embed(&x);
                let u = random_mv(&mut rng, n);
                let prod = xv.gproduct(&u);
                assert!(
                    (prod.norm() - xv.norm() * u.norm()).abs() < 1e-12 * (1.0 + u.norm()),
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn norm_submultiplicative_with_dimension_factor() {
        let mut rng = StdRng::seed_from_u64(29);
        for n in 2..=5u32 {
            let bound = 2f64.powf(n as f64 / 2.0);
            for _ in 0..10_000 {
                let u = random_mv(&mut rng, n);
                let v = random_mv(&mut rng, n);
                let p = u.gproduct(&v);
                assert!(
                    p.norm() <= bound * u.norm() * v.norm() * (1.0 + 1e-12),
                    "n={n}: |uv|={} |u||v|={}",
                    p.norm(),
                    u.norm() * v.norm()
                );
            }
        }
    }

    #[test]
    fn unit_vectors_are_involutive() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..100 {
            let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            for v in &mut x {
                *v /= norm;
            }
            let nu = Multivector::embed(&x);
            let sq = nu.gproduct(&nu);
            assert!((&sq - &Multivector::scalar(3, -1.0)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn display_renders_blades() {
        let m = &Multivector::scalar(2, 0.5) + &Multivector::from_blade(2, 0b11, -1.0);
        assert_eq!(format!("{m}"), "0.5 - e1^e2");
        assert_eq!(format!("{}", Multivector::zero(2)), "0");
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dimension_mismatch_panics() {
        let a = Multivector::scalar(2, 1.0);
        let b = Multivector::scalar(3, 1.0);
        let _ = a.gproduct(&b);
    }
}
