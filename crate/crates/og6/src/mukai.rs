//! The concrete lattices of OG6 geometry: the U^4-model Mukai lattice of an
//! abelian surface, Mukai vectors and their pairing, the complement w^perp,
//! the OG6 lattice w^perp + <-2>, the phi and varrho isometries, and the
//! factorization of O+(U^3 + (-2)^2) into ε-fixing isometries and the
//! reflection in ζ+ε.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::isometry::{
    extend_fixing_square2, orthogonal_rational_basis_default, reflection_in, transvection, Atom,
    Isometry, IsometryWord,
};
use crate::lattice::{Lattice, Summand, Vector};
use crate::matrix::IMat;
use crate::orbits::transport;

use num::Signed;

/// The U^3 model of H^2 of an abelian surface, basis (e1,f1,e2,f2,e3,f3).
pub fn u3_model() -> Arc<Lattice> {
    Lattice::standard(3, 0)
}

/// The OG6 Beauville-Bogomolov lattice U^3 + (-2)^2 with named basis
/// (e1,f1,e2,f2,e3,f3, zeta, eps).
pub fn og6_lattice() -> Arc<Lattice> {
    Lattice::standard(3, 2)
}

pub const ZETA: usize = 6;
pub const EPS: usize = 7;

/// The Mukai lattice H^0 + H^2 + H^4 in coordinates (r; c_1..c_6; s):
/// U^3 in the middle and the hyperbolic pairing -r_x s_y - s_x r_y between
/// the rank and degree components.
pub fn mukai_lattice() -> Arc<Lattice> {
    let mut gram = IMat::zeros(8, 8);
    for i in 0..3 {
        gram[(1 + 2 * i, 2 + 2 * i)] = 1;
        gram[(2 + 2 * i, 1 + 2 * i)] = 1;
    }
    gram[(0, 7)] = -1;
    gram[(7, 0)] = -1;
    let tag = vec![Summand::U; 4];
    Lattice::with_tag(gram, tag).expect("mukai gram is valid")
}

/// Mukai vector (r, c, s) with c in the U^3 model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: i64,
    pub c: Vector,
    pub s: i64,
}

impl MukaiVector {
    pub fn new(r: i64, c: Vector, s: i64) -> MukaiVector {
        assert_eq!(**c.lattice(), *u3_model(), "c must live in the U^3 model");
        MukaiVector { r, c, s }
    }

    pub fn from_coords(r: i64, c: [i64; 6], s: i64) -> MukaiVector {
        MukaiVector::new(r, u3_model().vector(c.to_vec()), s)
    }

    /// (x, y) = c_x . c_y - r_x s_y - s_x r_y.
    pub fn pairing(&self, other: &MukaiVector) -> i64 {
        self.c.pair(&other.c).expect("same model") - self.r * other.s - self.s * other.r
    }

    pub fn square(&self) -> i64 {
        self.pairing(self)
    }

    pub fn to_ambient(&self) -> Vector {
        let mut coords = Vec::with_capacity(8);
        coords.push(self.r);
        coords.extend_from_slice(self.c.coords());
        coords.push(self.s);
        mukai_lattice().vector(coords)
    }

    pub fn from_ambient(v: &Vector) -> MukaiVector {
        assert_eq!(**v.lattice(), *mukai_lattice());
        let c = v.coords()[1..7].to_vec();
        MukaiVector::new(v.coords()[0], u3_model().vector(c), v.coords()[7])
    }

    pub fn is_primitive(&self) -> Result<bool> {
        self.to_ambient().is_primitive()
    }
}

/// The distinguished Mukai vector w = (1, 0, -1) of square 2.
pub fn w_standard() -> MukaiVector {
    MukaiVector::from_coords(1, [0; 6], -1)
}

/// The vector zeta = (1, 0, 1) spanning the (-2) part of w^perp.
pub fn zeta_mukai() -> MukaiVector {
    MukaiVector::from_coords(1, [0; 6], 1)
}

/// Embedding columns of w^perp = U^3 + Z zeta into the Mukai lattice, for
/// w = (1, 0, -1): the U^3 block plus zeta = (1, 0, 1).
fn standard_wperp_embedding() -> IMat {
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for i in 1..=6 {
        let mut c = vec![0i64; 8];
        c[i] = 1;
        cols.push(c);
    }
    let mut z = vec![0i64; 8];
    z[0] = 1;
    z[7] = 1;
    cols.push(z);
    IMat::from_cols(&cols)
}

/// Orthogonal complement of a primitive Mukai vector in the Mukai lattice,
/// returned with the embedding of its basis. For w = (1, 0, -1) the basis
/// is the named one: U^3 followed by zeta = (1, 0, 1).
pub fn w_perp(w: &MukaiVector) -> Result<(Arc<Lattice>, IMat)> {
    if !w.is_primitive()? {
        return Err(Error::NotPrimitive);
    }
    if *w == w_standard() {
        let emb = standard_wperp_embedding();
        let wperp = Lattice::standard(3, 1);
        debug_assert_eq!(
            emb.transpose().mul(&mukai_lattice().gram().mul(&emb)),
            *wperp.gram()
        );
        return Ok((wperp, emb));
    }
    crate::lattice::orthogonal_complement(&mukai_lattice(), &[w.to_ambient()])
}

/// The OG6 lattice attached to a square-2 Mukai vector: w^perp plus an
/// orthogonal fresh (-2) generator eps, with the bookkeeping embedding of
/// the w^perp part into the Mukai lattice.
pub struct OG6Model {
    pub lattice: Arc<Lattice>,
    pub wperp: Arc<Lattice>,
    pub wperp_embedding: IMat,
}

pub fn og6_from_w(w: &MukaiVector) -> Result<OG6Model> {
    if w.square() != 2 {
        return Err(Error::SquareNotTwo);
    }
    let (wperp, emb) = w_perp(w)?;
    let r = wperp.rank();
    let mut gram = IMat::zeros(r + 1, r + 1);
    for i in 0..r {
        for j in 0..r {
            gram[(i, j)] = wperp.gram()[(i, j)];
        }
    }
    gram[(r, r)] = -2;
    let lattice = if *w == w_standard() {
        og6_lattice()
    } else {
        Lattice::new(gram)?
    };
    Ok(OG6Model { lattice, wperp, wperp_embedding: emb })
}

/// The isometry phi: (1,0,-1)^perp -> (0,e+f,1)^perp of the Mukai lattice,
/// phi((r, ae+bf+alpha, s)) = (-a, re-(s+a)f+alpha, r+b), where e, f are
/// the first hyperbolic pair of the U^3 model. Defined for r = s, which is
/// exactly orthogonality to (1, 0, -1).
pub fn phi(x: &MukaiVector) -> Result<MukaiVector> {
    if x.pairing(&w_standard()) != 0 {
        return Err(Error::NotInDomain);
    }
    let a = x.c.coords()[0];
    let b = x.c.coords()[1];
    let mut c = x.c.coords().to_vec();
    c[0] = x.r;
    c[1] = -(x.s + a);
    Ok(MukaiVector::new(-a, u3_model().vector(c), x.r + b))
}

/// The target vector (0, e+f, 1) of phi.
pub fn phi_target() -> MukaiVector {
    MukaiVector::from_coords(0, [1, 1, 0, 0, 0, 0], 1)
}

/// varrho((r, alpha, s)) = (-s, PD(alpha), -r) for an isometry PD of the
/// U^3 model; preserves the Mukai pairing for every such PD.
pub fn varrho(x: &MukaiVector, pd: &Isometry) -> Result<MukaiVector> {
    if **pd.lattice() != *u3_model() {
        return Err(Error::PDNotIsometry);
    }
    Ok(MukaiVector::new(-x.s, pd.apply(&x.c)?, -x.r))
}

/// The determinant -1 isometry of w^perp = U^3 + <zeta>: identity on U^3,
/// negation on zeta. It acts trivially on the discriminant group, so it
/// extends to overlattices.
pub fn det_minus_one_witness() -> Isometry {
    let wperp = Lattice::standard(3, 1);
    let mut m = IMat::identity(7);
    m[(6, 6)] = -1;
    Isometry::new(&wperp, m).expect("zeta negation is an isometry")
}

/// Extension of an isometry of w^perp to the Mukai lattice fixing
/// w = (1, 0, -1), by gluing along the discriminant group of the square-two complement.
pub fn extend_fixing_w(gamma: &Isometry) -> Result<Isometry> {
    let mukai = mukai_lattice();
    let w = w_standard().to_ambient();
    extend_fixing_square2(gamma, &mukai, &w, &standard_wperp_embedding())
}

/// The arithmetic of the extension applied to zeta = (1, 0, 1): the image
/// is (2m+1, 2 alpha, 2m+1); returns (m, alpha) in the U^3 model.
pub fn extension_zeta_image(gamma: &Isometry) -> Result<(i64, Vector)> {
    let ext = extend_fixing_w(gamma)?;
    let img = ext.apply(&zeta_mukai().to_ambient())?;
    let r = img.coords()[0];
    let s = img.coords()[7];
    if r != s || r % 2 == 0 {
        return Err(Error::InternalCaseFailure(format!(
            "zeta image has components r = {}, s = {}",
            r, s
        )));
    }
    let m = (r - 1) / 2;
    let c = img.coords()[1..7].to_vec();
    if c.iter().any(|x| x % 2 != 0) {
        return Err(Error::InternalCaseFailure("zeta image has odd middle part".into()));
    }
    let alpha = u3_model().vector(c.iter().map(|x| x / 2).collect());
    Ok((m, alpha))
}

/// True exactly when g lies in O+ of the OG6 lattice; by the monodromy
/// maximality this is the monodromy predicate.
pub fn is_monodromy(g: &Isometry) -> Result<bool> {
    if **g.lattice() != *og6_lattice() {
        return Err(Error::WrongLattice);
    }
    g.preserves_positive_cone_orientation()
}

/// The reflection in zeta + eps on the OG6 lattice.
pub fn r_zeta_eps() -> Isometry {
    let l = og6_lattice();
    let d = l.basis_vector(ZETA).add(&l.basis_vector(EPS));
    reflection_in(&d).expect("zeta+eps reflection is integral")
}

/// Factor g in O+(U^3 + (-2)^2) into eps-fixing isometries (emitted as
/// opaque atoms, each verified) and reflections in zeta + eps, following
/// the four-case reduction on the shape of g(eps) = 2u + a zeta + b eps.
pub fn decompose_monodromy(g: &Isometry) -> Result<IsometryWord> {
    let l = og6_lattice();
    if **g.lattice() != *l {
        return Err(Error::WrongLattice);
    }
    if !g.preserves_positive_cone_orientation()? {
        return Err(Error::NotInOPlus);
    }
    let eps = l.basis_vector(EPS);
    let refl = r_zeta_eps();
    let wperp = Lattice::standard(3, 1);

    let mut prefix: Vec<Atom> = Vec::new();
    let mut current = g.clone();
    let fail = |msg: &str| Error::InternalCaseFailure(msg.into());

    // push "current = R o current'" factorizations: current' = R o current,
    // with R prepended to the collected prefix
    for _round in 0..8 {
        let img = current.apply(&eps)?;
        if img == eps {
            // terminal: current fixes eps
            let mut atoms = prefix;
            if !current.is_identity() {
                atoms.push(Atom::Opaque { g: current, label: "fixes-eps".into() });
            }
            return finish(&l, atoms, g);
        }
        let coords = img.coords();
        if coords[..6].iter().any(|x| x % 2 != 0) {
            return Err(fail("U^3 part of g(eps) must be even"));
        }
        let a = coords[ZETA];
        let b = coords[EPS];
        let u: Vec<i64> = coords[..6].iter().map(|x| x / 2).collect();

        if b == 0 {
            // transport 2u + a zeta to -zeta inside U^3 + <zeta>
            let v = wperp.vector(coords[..7].to_vec());
            let mut target = vec![0i64; 7];
            target[6] = -1;
            let word = transport(&v, &wperp.vector(target))?;
            let g2 = lift_word_to_og6(&l, &word)?;
            let h = refl.compose(&g2)?.compose(&current)?;
            if h.apply(&eps)? != eps {
                return Err(fail("residual factor must fix eps"));
            }
            let mut atoms = prefix;
            let g2_inv = g2.inverse();
            if !g2_inv.is_identity() {
                atoms.push(Atom::Opaque { g: g2_inv, label: "fixes-eps".into() });
            }
            atoms.push(Atom::Reflection {
                d: l.basis_vector(ZETA).add(&l.basis_vector(EPS)),
            });
            if !h.is_identity() {
                atoms.push(Atom::Opaque { g: h, label: "fixes-eps".into() });
            }
            return finish(&l, atoms, g);
        }
        if a == 0 {
            // compose with the reflection to move the eps component to zeta
            prefix.push(Atom::Reflection {
                d: l.basis_vector(ZETA).add(&l.basis_vector(EPS)),
            });
            current = refl.compose(&current)?;
            continue;
        }
        // a, b both nonzero; exactly one of them is odd
        if (a % 2 != 0) == (b % 2 != 0) {
            return Err(fail("exactly one of a, b must be odd"));
        }
        let u_odd = u.iter().any(|x| x % 2 != 0);
        if u_odd {
            // want a even; flip with the reflection if needed
            if a % 2 != 0 {
                prefix.push(Atom::Reflection {
                    d: l.basis_vector(ZETA).add(&l.basis_vector(EPS)),
                });
                current = refl.compose(&current)?;
                continue;
            }
            // transport the primitive part of u + (a/2) zeta into U^3
            let c = a / 2;
            let mut vc = u.clone();
            vc.push(c);
            let v = wperp.vector(vc);
            let s = v.primitive_part()?;
            let canonical = crate::orbits::canonical_representative(&s)?;
            if canonical.coords()[6] != 0 {
                return Err(fail("primitive part must have trivial zeta class"));
            }
            let word = transport(&s, &canonical)?;
            let g2 = lift_word_to_og6(&l, &word)?;
            prefix.push(Atom::Opaque { g: g2.inverse(), label: "fixes-eps".into() });
            current = g2.compose(&current)?;
            continue;
        }
        // 2 | u: want b even and a odd
        if b % 2 != 0 {
            prefix.push(Atom::Reflection {
                d: l.basis_vector(ZETA).add(&l.basis_vector(EPS)),
            });
            current = refl.compose(&current)?;
            continue;
        }
        // a odd; move the primitive submultiple 2u' + a' zeta to a
        // representative whose U^3 part is not divisible by 2
        let mut vc: Vec<i64> = u.iter().map(|x| 2 * x).collect();
        vc.push(a);
        let v = wperp.vector(vc);
        let s = v.primitive_part()?;
        let canonical = crate::orbits::canonical_representative(&s)?;
        if canonical.coords()[6] != 1 {
            return Err(fail("submultiple must carry the zeta/2 class"));
        }
        let word = transport(&s, &canonical)?;
        let g2 = lift_word_to_og6(&l, &word)?;
        prefix.push(Atom::Opaque { g: g2.inverse(), label: "fixes-eps".into() });
        current = g2.compose(&current)?;
    }
    Err(fail("case reduction did not terminate"))
}

/// Evaluate a transvection word of U^3 + <zeta> inside the OG6 lattice,
/// acting as the identity on eps (the sublattices are complementary, so the
/// block extension is immediate).
fn lift_word_to_og6(l: &Arc<Lattice>, word: &IsometryWord) -> Result<Isometry> {
    let mut g = Isometry::identity(l);
    for atom in &word.atoms {
        let lifted = match atom {
            Atom::Transvection { e, a } => {
                let le = lift_vector(l, e);
                let la = lift_vector(l, a);
                crate::isometry::transvection(&le, &la)?
            }
            _ => return Err(Error::InternalCaseFailure("expected a transvection word".into())),
        };
        g = g.compose(&lifted)?;
    }
    Ok(g)
}

fn lift_vector(l: &Arc<Lattice>, v: &Vector) -> Vector {
    let mut coords = v.coords().to_vec();
    coords.push(0);
    l.vector(coords)
}

/// Final verification shared by all decomposition exits: every opaque atom
/// fixes eps and is in O+, and the word multiplies back to g.
fn finish(l: &Arc<Lattice>, atoms: Vec<Atom>, g: &Isometry) -> Result<IsometryWord> {
    let eps = l.basis_vector(EPS);
    for atom in &atoms {
        if let Atom::Opaque { g: f, .. } = atom {
            if f.apply(&eps)? != eps || !f.preserves_positive_cone_orientation()? {
                return Err(Error::InternalCaseFailure(
                    "opaque factor must fix eps and lie in O+".into(),
                ));
            }
        }
    }
    let word = IsometryWord::new(l, atoms)?;
    if word.evaluate()? != *g {
        return Err(Error::InternalCaseFailure("recomposition mismatch".into()));
    }
    Ok(word)
}

/// Signature (positive, negative) of a nondegenerate lattice, by exact
/// rational diagonalization.
/// A fixed pool of O+(U^3 + (-2)^2) generators used by seeded test
/// batteries: mixed-summand transvections, the swap of the two (-2)
/// summands, the reflection in zeta + eps, and zeta negation. Every member
/// is in O+ by construction.
pub fn o_plus_generator_pool(l: &Arc<Lattice>) -> Vec<Isometry> {
    let mut pool = Vec::new();
    for (e, a) in [
        (0usize, vec![0, 0, 1, 0, 0, 0, 0, 0]),
        (1, vec![0, 0, 0, 1, 0, 0, 0, 0]),
        (2, vec![1, 0, 0, 0, 0, 1, 0, 0]),
        (3, vec![0, 1, 0, 0, 1, 0, 0, 0]),
        (0, vec![0, 0, 0, 1, 0, 0, 1, 0]),
        (2, vec![0, 1, 0, 0, 0, 0, 0, 1]),
        (4, vec![0, 0, 1, -1, 0, 0, 1, 1]),
    ] {
        pool.push(transvection(&l.basis_vector(e), &l.vector(a)).unwrap());
    }
    let mut swap = IMat::identity(8);
    swap[(6, 6)] = 0;
    swap[(7, 7)] = 0;
    swap[(6, 7)] = 1;
    swap[(7, 6)] = 1;
    pool.push(Isometry::new(l, swap).unwrap());
    pool.push(r_zeta_eps());
    let mut zneg = IMat::identity(8);
    zneg[(6, 6)] = -1;
    pool.push(Isometry::new(l, zneg).unwrap());
    pool
}

pub fn signature(lattice: &Arc<Lattice>) -> (usize, usize) {
    let basis = orthogonal_rational_basis_default(lattice);
    let pos = basis.iter().filter(|w| w.norm().is_positive()).count();
    let neg = basis.iter().filter(|w| w.norm().is_negative()).count();
    (pos, neg)
}
