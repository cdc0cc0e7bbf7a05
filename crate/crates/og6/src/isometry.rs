//! Gram-preserving integer maps: Eichler transvections, reflections,
//! subgroup-membership predicates (det, positive-cone orientation,
//! discriminant action) and the gluing constructions used to extend isometries
//! across orthogonal decompositions.

use std::sync::Arc;

use num::rational::BigRational;
use num::{BigInt, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, RationalVector, Vector};
use crate::matrix::{IMat, QMat};

/// Invertible integer matrix preserving the Gram form, acting on column
/// coordinate vectors.
#[derive(Debug, Clone)]
pub struct Isometry {
    matrix: IMat,
    lattice: Arc<Lattice>,
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && *self.lattice == *other.lattice
    }
}
impl Eq for Isometry {}

impl Isometry {
    pub fn new(lattice: &Arc<Lattice>, matrix: IMat) -> Result<Isometry> {
        if matrix.rows != lattice.rank() || matrix.cols != lattice.rank() {
            return Err(Error::NotAnIsometry);
        }
        let g = lattice.gram();
        if matrix.transpose().mul(&g.mul(&matrix)) != *g {
            return Err(Error::NotAnIsometry);
        }
        if matrix.det().abs() != 1 {
            return Err(Error::NotAnIsometry);
        }
        Ok(Isometry { matrix, lattice: Arc::clone(lattice) })
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Isometry {
        Isometry { matrix: IMat::identity(lattice.rank()), lattice: Arc::clone(lattice) }
    }

    pub fn matrix(&self) -> &IMat {
        &self.matrix
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn det(&self) -> i64 {
        self.matrix.det()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == IMat::identity(self.lattice.rank())
    }

    /// g after h: (g.compose(h))(v) = g(h(v)).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if *self.lattice != *other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(Isometry {
            matrix: self.matrix.mul(&other.matrix),
            lattice: Arc::clone(&self.lattice),
        })
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self
            .matrix
            .to_rational()
            .inverse()
            .to_integer()
            .expect("isometry inverse must be integral");
        Isometry { matrix: inv, lattice: Arc::clone(&self.lattice) }
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        if *v.lattice() != self.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(self.lattice.vector(self.matrix.mul_vec(v.coords())))
    }

    pub fn apply_rational(&self, v: &RationalVector) -> RationalVector {
        assert_eq!(**v.lattice(), *self.lattice);
        let coords = self.matrix.to_rational().mul_vec(v.coords());
        self.lattice.rational_vector(coords)
    }

    /// Membership in O+: whether g preserves the orientation of the positive
    /// cone. Decided exactly: pick a rational orthogonal basis w_1..w_p of a
    /// maximal positive-definite subspace and take the sign of
    /// det[(g w_i, w_j)].
    pub fn preserves_positive_cone_orientation(&self) -> Result<bool> {
        let order: Vec<usize> = (0..self.lattice.rank()).collect();
        self.orientation_with_pivot_order(&order)
    }

    /// Same test with a caller-chosen processing order for the
    /// diagonalization; the answer is basis-independent.
    pub fn orientation_with_pivot_order(&self, order: &[usize]) -> Result<bool> {
        let basis = orthogonal_rational_basis(&self.lattice, order);
        let pos: Vec<&RationalVector> =
            basis.iter().filter(|w| w.norm().is_positive()).collect();
        if pos.is_empty() {
            return Err(Error::NegativeDefinite);
        }
        let p = pos.len();
        let mut m = QMat::zeros(p, p);
        for (i, wi) in pos.iter().enumerate() {
            let gwi = self.apply_rational(wi);
            for (j, wj) in pos.iter().enumerate() {
                m[(i, j)] = gwi.pair(wj);
            }
        }
        Ok(m.det().is_positive())
    }

    /// Membership in the subgroup acting trivially on the discriminant
    /// group: g(l) - l must be integral for every generator lift l.
    pub fn acts_trivially_on_discriminant(&self) -> bool {
        let a = crate::lattice::discriminant_group(&self.lattice);
        a.lifts().iter().all(|l| {
            let img = self.apply_rational(l);
            img.coords()
                .iter()
                .zip(l.coords())
                .all(|(x, y)| (x - y).is_integer())
        })
    }

    pub fn membership(&self) -> Result<Membership> {
        let det = self.det();
        let in_o_plus = self.preserves_positive_cone_orientation()?;
        let in_otilde = self.acts_trivially_on_discriminant();
        Ok(Membership {
            in_o_plus,
            in_so: det == 1,
            in_so_plus: det == 1 && in_o_plus,
            in_otilde,
            in_sotilde_plus: det == 1 && in_o_plus && in_otilde,
        })
    }
}

/// Subgroup membership flags for one isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    pub in_o_plus: bool,
    pub in_so: bool,
    pub in_so_plus: bool,
    pub in_otilde: bool,
    pub in_sotilde_plus: bool,
}

/// Eichler transvection t(e,a): v -> v - (a,v)e + (e,v)a - (a,a)/2 (e,v)e,
/// for isotropic e and a orthogonal to e.
pub fn transvection(e: &Vector, a: &Vector) -> Result<Isometry> {
    if *e.lattice() != *a.lattice() {
        return Err(Error::LatticeMismatch);
    }
    if e.norm() != 0 {
        return Err(Error::NotIsotropic(format!("norm {} != 0", e.norm())));
    }
    if e.pair(a)? != 0 {
        return Err(Error::NotOrthogonal(
            format!("{:?}", e.coords()),
            format!("{:?}", a.coords()),
        ));
    }
    let lat = e.lattice();
    let n = lat.rank();
    let half_aa = a.norm() / 2;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let b = lat.basis_vector(j);
        let av = a.pair(&b)?;
        let ev = e.pair(&b)?;
        let img = b
            .sub(&e.scale(av))
            .add(&a.scale(ev))
            .sub(&e.scale(half_aa * ev));
        cols.push(img.coords().to_vec());
    }
    Isometry::new(lat, IMat::from_cols(&cols))
}

/// Reflection in a nonzero-norm vector D: v -> v - 2 (D,v)/(D,D) D.
/// Integral exactly when (D,D) divides 2 (D,b) for every basis vector b.
pub fn reflection_in(d: &Vector) -> Result<Isometry> {
    let nd = d.norm();
    if nd == 0 {
        return Err(Error::ZeroNorm);
    }
    let lat = d.lattice();
    let n = lat.rank();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let b = lat.basis_vector(j);
        let num = 2 * d.pair(&b)?;
        if num % nd != 0 {
            return Err(Error::NotIntegral);
        }
        cols.push(b.sub(&d.scale(num / nd)).coords().to_vec());
    }
    Isometry::new(lat, IMat::from_cols(&cols))
}

/// Rational orthogonal basis in the default processing order.
pub fn orthogonal_rational_basis_default(lattice: &Arc<Lattice>) -> Vec<RationalVector> {
    let order: Vec<usize> = (0..lattice.rank()).collect();
    orthogonal_rational_basis(lattice, &order)
}

/// Rational orthogonal basis of the span, by symmetric Gram-Schmidt with a
/// caller-fixed processing order; isotropic directions are repaired by
/// adding a later vector (deterministically the first that pairs
/// nontrivially).
fn orthogonal_rational_basis(lattice: &Arc<Lattice>, order: &[usize]) -> Vec<RationalVector> {
    let n = lattice.rank();
    assert_eq!(order.len(), n);
    // start from the permuted standard basis, projected progressively
    let mut pending: Vec<RationalVector> = order
        .iter()
        .map(|&i| {
            let mut c = vec![BigRational::zero(); n];
            c[i] = BigRational::from_integer(BigInt::from(1));
            lattice.rational_vector(c)
        })
        .collect();
    let mut out: Vec<RationalVector> = Vec::new();
    while !pending.is_empty() {
        // project all pending vectors orthogonally to what we have
        // (done incrementally below), then pick the first anisotropic one
        let pick = pending.iter().position(|v| !v.norm().is_zero());
        let w = match pick {
            Some(i) => pending.remove(i),
            None => {
                // all isotropic: some pair must pair nontrivially since the
                // restriction of the form to the remaining span is nonzero
                // unless that span is in the radical
                let mut found = None;
                'search: for i in 0..pending.len() {
                    for j in i + 1..pending.len() {
                        if !pending[i].pair(&pending[j]).is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                match found {
                    Some((i, j)) => {
                        let sum = add_rv(&pending[i], &pending[j]);
                        pending.remove(i);
                        sum
                    }
                    None => break, // remaining span is in the radical
                }
            }
        };
        // subtract the w-component from everything still pending
        let ww = w.norm();
        pending = pending
            .iter()
            .map(|v| {
                let c = v.pair(&w) / &ww;
                sub_scaled(v, &w, &c)
            })
            .collect();
        out.push(w);
    }
    out
}

fn add_rv(a: &RationalVector, b: &RationalVector) -> RationalVector {
    let coords = a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect();
    a.lattice().rational_vector(coords)
}

fn sub_scaled(a: &RationalVector, b: &RationalVector, c: &BigRational) -> RationalVector {
    let coords = a.coords().iter().zip(b.coords()).map(|(x, y)| x - c * y).collect();
    a.lattice().rational_vector(coords)
}

/// Extend f on L to the overlattice N of L + M, acting as the identity on
/// M. The bases of L and M are given as integer columns in N-coordinates;
/// together they span a finite-index sublattice of N. Requires f to act
/// trivially on the discriminant group of L, which guarantees integrality.
pub fn extend_isometry(
    f: &Isometry,
    n: &Arc<Lattice>,
    emb_l: &IMat,
    emb_m: &IMat,
) -> Result<Isometry> {
    if !f.acts_trivially_on_discriminant() {
        return Err(Error::NotInOtilde);
    }
    let rank = n.rank();
    let rl = emb_l.cols;
    let rm = emb_m.cols;
    if emb_l.rows != rank || emb_m.rows != rank || rl + rm != rank {
        return Err(Error::NonIntegralResult);
    }
    // B = [emb_l | emb_m]; F_N = B diag(f, id) B^-1
    let mut b = IMat::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rl {
            b[(i, j)] = emb_l[(i, j)];
        }
        for j in 0..rm {
            b[(i, rl + j)] = emb_m[(i, j)];
        }
    }
    let mut block = IMat::identity(rank);
    for i in 0..rl {
        for j in 0..rl {
            block[(i, j)] = f.matrix()[(i, j)];
        }
    }
    let bq = b.to_rational();
    let fq = bq.mul(&block.to_rational()).mul(&bq.inverse());
    let fi = fq.to_integer().ok_or(Error::NonIntegralResult)?;
    Isometry::new(n, fi).map_err(|_| Error::NonIntegralResult)
}

/// Unique extension of an isometry of w^perp to the ambient lattice fixing
/// a vector w of square two. The complement is given by its embedding
/// columns as produced by `orthogonal_complement`.
pub fn extend_fixing_square2(
    gamma: &Isometry,
    ambient: &Arc<Lattice>,
    w: &Vector,
    emb: &IMat,
) -> Result<Isometry> {
    if w.norm() != 2 {
        return Err(Error::NormNotTwo);
    }
    if **w.lattice() != **ambient {
        return Err(Error::LatticeMismatch);
    }
    let n = ambient.rank();
    let r = emb.cols;
    if emb.rows != n || gamma.lattice().rank() != r {
        return Err(Error::NotIsometryOfComplement);
    }
    // gram of the complement in the embedded basis must match gamma's lattice
    let gram_c = emb.transpose().mul(&ambient.gram().mul(emb));
    if gram_c != *gamma.lattice().gram() {
        return Err(Error::NotIsometryOfComplement);
    }
    let gram_c_inv = gram_c.to_rational().inverse();
    let gq = ambient.gram().to_rational();
    let embq = emb.to_rational();
    let wq = w.to_rational();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for j in 0..n {
        let bj = ambient.basis_vector(j).to_rational();
        // b = ((b,w)/2) w + c-part; c-part coords solve Gram_C c = emb^T G b
        let bw = bj.pair(&wq) / &two;
        let rhs = embq.transpose().mul(&gq).mul_vec(bj.coords());
        let c = gram_c_inv.mul_vec(&rhs);
        let gc = gamma.matrix().to_rational().mul_vec(&c);
        let back = embq.mul_vec(&gc);
        let col: Vec<BigRational> = (0..n)
            .map(|i| &bw * &wq.coords()[i] + &back[i])
            .collect();
        cols.push(col);
    }
    let mut fq = QMat::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            fq[(i, j)] = col[i].clone();
        }
    }
    let fi = fq.to_integer().ok_or(Error::NonIntegralResult)?;
    Isometry::new(ambient, fi).map_err(|_| Error::NonIntegralResult)
}

/// One multiplicand of an isometry word.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Transvection { e: Vector, a: Vector },
    Reflection { d: Vector },
    Opaque { g: Isometry, label: String },
}

impl Atom {
    pub fn to_isometry(&self) -> Result<Isometry> {
        match self {
            Atom::Transvection { e, a } => transvection(e, a),
            Atom::Reflection { d } => reflection_in(d),
            Atom::Opaque { g, .. } => Ok(g.clone()),
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        match self {
            Atom::Transvection { e, .. } => e.lattice(),
            Atom::Reflection { d } => d.lattice(),
            Atom::Opaque { g, .. } => g.lattice(),
        }
    }
}

/// Ordered product of atoms; written left to right in composition order,
/// so evaluation applies the rightmost atom first.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryWord {
    pub atoms: Vec<Atom>,
    lattice: Arc<Lattice>,
}

impl IsometryWord {
    pub fn empty(lattice: &Arc<Lattice>) -> IsometryWord {
        IsometryWord { atoms: Vec::new(), lattice: Arc::clone(lattice) }
    }

    pub fn new(lattice: &Arc<Lattice>, atoms: Vec<Atom>) -> Result<IsometryWord> {
        for atom in &atoms {
            if **atom.lattice() != **lattice {
                return Err(Error::LatticeMismatch);
            }
            atom.to_isometry()?;
        }
        Ok(IsometryWord { atoms, lattice: Arc::clone(lattice) })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn push_left(&mut self, atom: Atom) {
        self.atoms.insert(0, atom);
    }

    pub fn push_right(&mut self, atom: Atom) {
        self.atoms.push(atom);
    }

    pub fn concat(&self, right: &IsometryWord) -> IsometryWord {
        let mut atoms = self.atoms.clone();
        atoms.extend(right.atoms.iter().cloned());
        IsometryWord { atoms, lattice: Arc::clone(&self.lattice) }
    }

    pub fn evaluate(&self) -> Result<Isometry> {
        let mut g = Isometry::identity(&self.lattice);
        for atom in &self.atoms {
            g = g.compose(&atom.to_isometry()?)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::discriminant_group;

    fn u2() -> Arc<Lattice> {
        Lattice::standard(2, 0)
    }

    fn og6() -> Arc<Lattice> {
        Lattice::standard(3, 2)
    }

    // basis order in U^2: e1, f1, e2, f2
    fn t_of(l: &Arc<Lattice>, e: usize, a: usize) -> Isometry {
        transvection(&l.basis_vector(e), &l.basis_vector(a)).unwrap()
    }

    #[test]
    fn transvection_basic_images() {
        let l = u2();
        let t = t_of(&l, 2, 1); // t(e2, f1)
        assert_eq!(t.apply(&l.basis_vector(0)).unwrap().coords(), &[1, 0, -1, 0]);
        // t(e,a)(e) = e
        assert_eq!(t.apply(&l.basis_vector(2)).unwrap(), l.basis_vector(2));
        // t(e, 0) = id
        let id = transvection(&l.basis_vector(2), &l.zero_vector()).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn transvection_preconditions() {
        let l = u2();
        let anisotropic = l.basis_vector(0).add(&l.basis_vector(1));
        assert!(matches!(
            transvection(&anisotropic, &l.basis_vector(2)),
            Err(Error::NotIsotropic(_))
        ));
        assert!(matches!(
            transvection(&l.basis_vector(0), &l.basis_vector(1)),
            Err(Error::NotOrthogonal(_, _))
        ));
    }

    #[test]
    fn transvection_group_laws() {
        // inverse and additivity in a, on a handful of pairs in U^2 and OG6
        let l = og6();
        let e = l.basis_vector(0);
        let cases = [
            l.vector(vec![0, 0, 1, -2, 0, 0, 0, 0]),
            l.vector(vec![0, 0, 0, 0, 3, 1, 1, 0]),
            l.vector(vec![0, 0, 2, 0, 0, 1, 1, 1]),
        ];
        for a in &cases {
            let t = transvection(&e, a).unwrap();
            assert!(t.compose(&transvection(&e, &a.neg()).unwrap()).unwrap().is_identity());
            assert_eq!(t.det(), 1);
            for b in &cases {
                let lhs = transvection(&e, a)
                    .unwrap()
                    .compose(&transvection(&e, b).unwrap())
                    .unwrap();
                let rhs = transvection(&e, &a.add(b)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn transvection_conjugation() {
        // g t(e,a) g^-1 = t(g e, g a), expansion-consistent direction
        let l = u2();
        let g = t_of(&l, 0, 3).compose(&t_of(&l, 3, 1)).unwrap();
        let e = l.basis_vector(2);
        let a = l.vector(vec![1, -1, 0, 0]);
        let lhs = g
            .compose(&transvection(&e, &a).unwrap())
            .unwrap()
            .compose(&g.inverse())
            .unwrap();
        let rhs = transvection(&g.apply(&e).unwrap(), &g.apply(&a).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reflection_examples() {
        let l = og6();
        let zeta = l.basis_vector(6);
        let eps = l.basis_vector(7);
        let r = reflection_in(&zeta.add(&eps)).unwrap();
        assert_eq!(r.apply(&zeta).unwrap(), eps.neg());
        assert_eq!(r.apply(&eps).unwrap(), zeta.neg());
        assert_eq!(r.det(), -1);
        assert!(r.compose(&r).unwrap().is_identity());
        // R_D(D) = -D
        let d = zeta.add(&eps);
        assert_eq!(r.apply(&d).unwrap(), d.neg());
        // in U: R_{e-f}(e) = f
        let u = Lattice::standard(1, 0);
        let emf = u.vector(vec![1, -1]);
        let r = reflection_in(&emf).unwrap();
        assert_eq!(r.apply(&u.basis_vector(0)).unwrap(), u.basis_vector(1));
        assert!(reflection_in(&u.basis_vector(0)).is_err());
        // norm 4 vector in U with a unit pairing: not integral
        let v = u.vector(vec![1, 2]);
        assert_eq!(v.norm(), 4);
        assert_eq!(reflection_in(&v), Err(Error::NotIntegral));
    }

    #[test]
    fn transvection_pullback_identities() {
        // t(e2, e1 - d f1) t(e2, e1 - (d+1) f1)^-1 = t(e2, f1), and the f2
        // analogue; each factor fixes e1 + d f1 resp. e1 + (d+1) f1
        let l = Lattice::standard(3, 0);
        for d in 1i64..=10 {
            for iso in [2usize, 3] {
                let e1 = l.basis_vector(0);
                let f1 = l.basis_vector(1);
                let a1 = e1.sub(&f1.scale(d));
                let a2 = e1.sub(&f1.scale(d + 1));
                let t1 = transvection(&l.basis_vector(iso), &a1).unwrap();
                let t2 = transvection(&l.basis_vector(iso), &a2).unwrap();
                let lhs = t1.compose(&t2.inverse()).unwrap();
                let rhs = transvection(&l.basis_vector(iso), &f1).unwrap();
                assert_eq!(lhs, rhs);
                let fix1 = e1.add(&f1.scale(d));
                let fix2 = e1.add(&f1.scale(d + 1));
                assert_eq!(t1.apply(&fix1).unwrap(), fix1);
                assert_eq!(t2.apply(&fix2).unwrap(), fix2);
                assert!(t1.membership().unwrap().in_sotilde_plus);
            }
        }
    }

    #[test]
    fn orientation_predicate() {
        let l = og6();
        assert!(Isometry::identity(&l).preserves_positive_cone_orientation().unwrap());
        let mut neg = IMat::identity(8);
        for i in 0..8 {
            neg[(i, i)] = -1;
        }
        let minus = Isometry::new(&l, neg).unwrap();
        assert!(!minus.preserves_positive_cone_orientation().unwrap());
        // swap e1 <-> f1 on U^2: in O+, det -1
        let u = u2();
        let mut m = IMat::zeros(4, 4);
        m[(0, 1)] = 1;
        m[(1, 0)] = 1;
        m[(2, 2)] = 1;
        m[(3, 3)] = 1;
        let swap = Isometry::new(&u, m).unwrap();
        assert_eq!(swap.det(), -1);
        assert!(swap.preserves_positive_cone_orientation().unwrap());
        // negative definite lattice: no positive part
        let nd = Lattice::standard(0, 2);
        assert_eq!(
            Isometry::identity(&nd).preserves_positive_cone_orientation(),
            Err(Error::NegativeDefinite)
        );
    }

    #[test]
    fn orientation_is_basis_independent() {
        let l = og6();
        let words = [
            vec![(0usize, vec![0, 0, 1, 0, 0, -1, 1, 0]), (2, vec![1, 2, 0, 0, 0, 0, 0, 1])],
            vec![(4, vec![0, 1, -1, 0, 0, 0, 1, 1]), (1, vec![0, 0, 0, 2, 1, 0, 0, 1])],
        ];
        let orders: Vec<Vec<usize>> = vec![
            (0..8).collect(),
            (0..8).rev().collect(),
            vec![3, 1, 4, 0, 6, 2, 7, 5],
        ];
        for w in &words {
            let mut g = Isometry::identity(&l);
            for (e, a) in w {
                g = g
                    .compose(&transvection(&l.basis_vector(*e), &l.vector(a.clone())).unwrap())
                    .unwrap();
            }
            let answers: Vec<bool> = orders
                .iter()
                .map(|o| g.orientation_with_pivot_order(o).unwrap())
                .collect();
            assert!(answers.iter().all(|&x| x == answers[0]));
        }
    }

    #[test]
    fn discriminant_action() {
        let l = og6();
        assert!(Isometry::identity(&l).acts_trivially_on_discriminant());
        // transvections act trivially
        let t = transvection(&l.basis_vector(0), &l.vector(vec![0, 0, 1, 1, 0, 0, 1, 1]))
            .unwrap();
        assert!(t.acts_trivially_on_discriminant());
        // swapping the two (-2) summands exchanges the generator classes
        let mut m = IMat::identity(8);
        m[(6, 6)] = 0;
        m[(7, 7)] = 0;
        m[(6, 7)] = 1;
        m[(7, 6)] = 1;
        let swap = Isometry::new(&l, m).unwrap();
        assert!(!swap.acts_trivially_on_discriminant());
        let mem = swap.membership().unwrap();
        assert!(mem.in_o_plus && !mem.in_otilde && !mem.in_so);
    }

    #[test]
    fn extension_block_diagonal() {
        // L = U, M = <-2>, N = direct sum (index 1): block extension
        let n = Lattice::standard(1, 1);
        let u = Lattice::standard(1, 0);
        let mut m = IMat::zeros(2, 2);
        m[(0, 1)] = 1;
        m[(1, 0)] = 1;
        let f = Isometry::new(&u, m).unwrap();
        let emb_l = IMat::from_cols(&[vec![1, 0, 0], vec![0, 1, 0]]);
        let emb_m = IMat::from_cols(&[vec![0, 0, 1]]);
        let ext = extend_isometry(&f, &n, &emb_l, &emb_m).unwrap();
        assert_eq!(ext.apply(&n.basis_vector(0)).unwrap(), n.basis_vector(1));
        assert_eq!(ext.apply(&n.basis_vector(2)).unwrap(), n.basis_vector(2));
        let id = extend_isometry(&Isometry::identity(&u), &n, &emb_l, &emb_m).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn extension_through_index_two_glue() {
        // <2> + <-2> inside U via x = e+f, y = e-f; f = -1 on <2> acts
        // trivially on A = Z/2 and extends to e <-> -f on U
        let two = Lattice::new(IMat::from_rows(&[vec![2]])).unwrap();
        let a = discriminant_group(&two);
        assert_eq!(a.orders(), &[2]);
        let neg = Isometry::new(&two, IMat::from_rows(&[vec![-1]])).unwrap();
        assert!(neg.acts_trivially_on_discriminant());
        let u = Lattice::standard(1, 0);
        let emb_l = IMat::from_cols(&[vec![1, 1]]);
        let emb_m = IMat::from_cols(&[vec![1, -1]]);
        let ext = extend_isometry(&neg, &u, &emb_l, &emb_m).unwrap();
        assert_eq!(ext.apply(&u.basis_vector(0)).unwrap(), u.basis_vector(1).neg());
        assert_eq!(ext.apply(&u.basis_vector(1)).unwrap(), u.basis_vector(0).neg());
    }

    #[test]
    fn extension_fixing_square_two() {
        // ambient U, w = e+f, complement <e-f>; gamma = -1 extends to the
        // swap e <-> f
        let u = Lattice::standard(1, 0);
        let w = u.vector(vec![1, 1]);
        let (c, emb) = crate::lattice::orthogonal_complement(&u, std::slice::from_ref(&w)).unwrap();
        let gamma = Isometry::new(&c, IMat::from_rows(&[vec![-1]])).unwrap();
        let ext = extend_fixing_square2(&gamma, &u, &w, &emb).unwrap();
        assert_eq!(ext.apply(&w).unwrap(), w);
        assert_eq!(ext.apply(&u.basis_vector(0)).unwrap(), u.basis_vector(1));
        let id = extend_fixing_square2(&Isometry::identity(&c), &u, &w, &emb).unwrap();
        assert!(id.is_identity());
        // wrong norm
        let bad = u.vector(vec![1, 2]);
        assert!(matches!(
            extend_fixing_square2(&gamma, &u, &bad, &emb),
            Err(Error::NormNotTwo)
        ));
    }

    #[test]
    fn word_evaluation() {
        let l = u2();
        let t1 = Atom::Transvection { e: l.basis_vector(2), a: l.basis_vector(1) };
        let t2 = Atom::Transvection { e: l.basis_vector(3), a: l.basis_vector(0) };
        let word = IsometryWord::new(&l, vec![t1.clone(), t2.clone()]).unwrap();
        let g = word.evaluate().unwrap();
        let expect = t1.to_isometry().unwrap().compose(&t2.to_isometry().unwrap()).unwrap();
        assert_eq!(g, expect);
        assert!(IsometryWord::empty(&l).evaluate().unwrap().is_identity());
    }

    #[test]
    fn bad_matrix_rejected() {
        let u = Lattice::standard(1, 0);
        assert!(Isometry::new(&u, IMat::from_rows(&[vec![1, 1], vec![0, 1]])).is_err());
        assert!(Isometry::new(&u, IMat::identity(3)).is_err());
    }
}
