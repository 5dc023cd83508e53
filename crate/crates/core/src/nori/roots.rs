//! Cartan subalgebra, root decomposition and type identification.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ff::{
    ext_field, matrix, poly, ExtElem, ExtField, Field, FieldDescriptor, FiniteField, Matrix,
    PrimeField,
};
use crate::lierank::{LieFactorDescriptor, SimpleType};

use super::catalog::identify_components;
use super::lie::LieSubalgebra;
use super::weights::joint_eigenspaces;
use super::{NoriError, Thresholds};

/// One simple factor over `GF(ℓ)`: a Frobenius orbit of `f` simple
/// components over the closure, with the twist induced on their diagram.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactorInfo {
    #[serde(rename = "type")]
    pub ty: SimpleType,
    pub twist: u8,
    pub f: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemisimpleTypeData {
    pub dim: usize,
    pub rank: usize,
    /// Simple components over the algebraic closure, sorted.
    pub closure_types: Vec<SimpleType>,
    /// Simple factors over `GF(ℓ)`, sorted.
    pub factors: Vec<FactorInfo>,
    /// `a_ij = ⟨α_i, α_j^∨⟩`, block diagonal in Bourbaki order per factor.
    pub cartan_matrix: Vec<Vec<i64>>,
    pub splitting_degree: u32,
    pub field: FieldDescriptor,
    /// Basis over `GF(ℓ)` of the Cartan subalgebra found.
    pub cartan_basis: Vec<Matrix<u64>>,
    pub seed: u64,
    /// Simple coroots as `N × N` matrices over the splitting field, in the
    /// order of `cartan_matrix`.
    #[serde(skip)]
    pub coroots: Vec<Matrix<ExtElem>>,
}

impl SemisimpleTypeData {
    pub fn descriptors(&self, ell: u64) -> Result<Vec<LieFactorDescriptor>, crate::lierank::LieRankError> {
        self.factors
            .iter()
            .map(|fi| LieFactorDescriptor::new(fi.ty, fi.twist, fi.f, ell))
            .collect()
    }

    pub fn root_count(&self) -> usize {
        self.dim - self.rank
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn combo(f: &PrimeField, mats: &[Matrix<u64>], coeffs: &[u64]) -> Matrix<u64> {
    let mut acc = matrix::zeros(f, mats[0].rows(), mats[0].cols());
    for (m, c) in mats.iter().zip(coeffs) {
        if *c != 0 {
            acc = matrix::add(f, &acc, &matrix::scale(f, m, c));
        }
    }
    acc
}

fn semisimple(f: &PrimeField, a: &Matrix<u64>) -> bool {
    crate::inertia::is_semisimple(f, a)
}

fn splitting_degree(f: &PrimeField, a: &Matrix<u64>) -> u32 {
    let cp = matrix::char_poly(f, a);
    poly::factor_degrees(f, &cp)
        .into_iter()
        .fold(1u32, |acc, d| lcm(acc, d as u32))
}

struct CartanChoice {
    basis: Vec<Vec<u64>>,
    degree: u32,
}

fn find_cartan(
    s: &LieSubalgebra,
    ads: &[Matrix<u64>],
    consts: &[Vec<Vec<u64>>],
    seed: u64,
    draws: usize,
) -> Result<CartanChoice, NoriError> {
    let f = s.field();
    let d = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<CartanChoice> = None;
    for _ in 0..draws {
        let x: Vec<u64> = (0..d).map(|_| rng.gen_range(0..f.p())).collect();
        let adx = combo(&f, ads, &x);
        if !semisimple(&f, &adx) {
            continue;
        }
        let cent = matrix::kernel(&f, &adx);
        let abelian = cent.iter().enumerate().all(|(i, u)| {
            cent[i + 1..].iter().all(|v| bracket_coords(&f, consts, u, v).iter().all(|c| *c == 0))
        });
        if !abelian {
            continue;
        }
        let mut degree = splitting_degree(&f, &adx);
        let mut toral = true;
        for h in &cent {
            let adh = combo(&f, ads, h);
            if !semisimple(&f, &adh) {
                toral = false;
                break;
            }
            degree = lcm(degree, splitting_degree(&f, &adh));
        }
        if !toral {
            continue;
        }
        if best.as_ref().is_none_or(|b| degree < b.degree) {
            best = Some(CartanChoice { basis: cent, degree });
        }
        if degree == 1 {
            break;
        }
    }
    best.ok_or(NoriError::NoRegularElement(draws))
}

fn bracket_coords<F: Field>(f: &F, consts: &[Vec<Vec<F::Elem>>], u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    let d = u.len();
    let mut out = vec![f.zero(); d];
    for i in 0..d {
        if f.is_zero(&u[i]) {
            continue;
        }
        for j in 0..d {
            if f.is_zero(&v[j]) {
                continue;
            }
            let c = f.mul(&u[i], &v[j]);
            for (k, o) in out.iter_mut().enumerate() {
                if !f.is_zero(&consts[i][j][k]) {
                    *o = f.add(o, &f.mul(&c, &consts[i][j][k]));
                }
            }
        }
    }
    out
}

/// Identifies the simple type of a semisimple matrix Lie algebra.
pub fn identify_type(
    s: &LieSubalgebra,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<SemisimpleTypeData, NoriError> {
    identify_type_with_degree(s, seed, thresholds, 1)
}

/// As [`identify_type`], computing over an extension whose degree is also a
/// multiple of `degree_multiple`.
pub(crate) fn identify_type_with_degree(
    s: &LieSubalgebra,
    seed: u64,
    thresholds: &Thresholds,
    degree_multiple: u32,
) -> Result<SemisimpleTypeData, NoriError> {
    let f = s.field();
    let ell = f.p();
    let n = s.ambient_dim;
    let d = s.dim();
    if ell < thresholds.ell_min(n) {
        return Err(NoriError::BelowEllMin {
            ell,
            min: thresholds.ell_min(n),
        });
    }
    if d == 0 {
        let k = degree_multiple.max(1);
        return Ok(SemisimpleTypeData {
            dim: 0,
            rank: 0,
            closure_types: Vec::new(),
            factors: Vec::new(),
            cartan_matrix: Vec::new(),
            splitting_degree: k,
            field: ext_field(ell, k)?,
            cartan_basis: Vec::new(),
            seed,
            coroots: Vec::new(),
        });
    }
    let ads = s.ad_matrices();
    let consts = s.structure_constants();
    if f.is_zero(&matrix::determinant(&f, &s.killing_form())) {
        return Err(NoriError::NotSemisimple);
    }
    let choice = find_cartan(s, &ads, &consts, seed, thresholds.cartan_draws)?;
    let k = lcm(choice.degree, degree_multiple.max(1));
    let desc = ext_field(ell, k)?;
    let e = ExtField::new(desc.clone());
    let r = choice.basis.len();

    let emb = |m: &Matrix<u64>| m.map(|x| e.embed(*x));
    let emb_vec = |v: &[u64]| -> Vec<ExtElem> { v.iter().map(|x| e.embed(*x)).collect() };
    let cartan_ads: Vec<Matrix<ExtElem>> = choice.basis.iter().map(|h| emb(&combo(&f, &ads, h))).collect();
    let consts_e: Vec<Vec<Vec<ExtElem>>> = consts
        .iter()
        .map(|row| row.iter().map(|v| emb_vec(v)).collect())
        .collect();

    let spaces = joint_eigenspaces(&e, &cartan_ads, d)?;
    let mut roots: Vec<(Vec<ExtElem>, Vec<ExtElem>)> = Vec::new();
    let mut zero_dim = 0;
    for (vals, basis) in spaces {
        if vals.iter().all(|v| e.is_zero(v)) {
            zero_dim += basis.cols();
            continue;
        }
        if basis.cols() != 1 {
            return Err(NoriError::RootSystem("root space of dimension above one".into()));
        }
        roots.push((vals, basis.column(0)));
    }
    if zero_dim != r || roots.len() != d - r {
        return Err(NoriError::RootSystem(format!(
            "zero weight space of dim {zero_dim} for Cartan of dim {r}"
        )));
    }
    roots.sort_by(|a, b| {
        let ka: Vec<u128> = a.0.iter().map(|x| e.index_of(x)).collect();
        let kb: Vec<u128> = b.0.iter().map(|x| e.index_of(x)).collect();
        ka.cmp(&kb)
    });
    let lookup: HashMap<Vec<ExtElem>, usize> =
        roots.iter().enumerate().map(|(i, (v, _))| (v.clone(), i)).collect();
    let m = roots.len();

    // coroots in Cartan coordinates
    let h_cols: Vec<Vec<ExtElem>> = choice.basis.iter().map(|h| emb_vec(h)).collect();
    let h_mat = Matrix::from_columns(d, &h_cols);
    let two = e.from_i64(2);
    let mut coroots: Vec<Vec<ExtElem>> = Vec::with_capacity(m);
    for (vals, vec) in &roots {
        let neg: Vec<ExtElem> = vals.iter().map(|x| e.neg(x)).collect();
        let j = *lookup
            .get(&neg)
            .ok_or_else(|| NoriError::RootSystem("root without a negative".into()))?;
        let t = bracket_coords(&e, &consts_e, vec, &roots[j].1);
        let th = matrix::solve(&e, &h_mat, &Matrix::from_columns(d, &[t]))
            .ok_or_else(|| NoriError::RootSystem("[e_α, e_-α] outside the Cartan".into()))?
            .column(0);
        let at = th
            .iter()
            .zip(vals)
            .fold(e.zero(), |acc, (x, y)| e.add(&acc, &e.mul(x, y)));
        let scale = e
            .div(&two, &at)
            .ok_or_else(|| NoriError::RootSystem("α vanishes on [e_α, e_-α]".into()))?;
        coroots.push(th.iter().map(|x| e.mul(x, &scale)).collect());
    }

    // pairing[b][a] = ⟨β, α^∨⟩
    let mut pairing = vec![vec![0i64; m]; m];
    for (b, (vals, _)) in roots.iter().enumerate() {
        for (a, co) in coroots.iter().enumerate() {
            let v = co
                .iter()
                .zip(vals)
                .fold(e.zero(), |acc, (x, y)| e.add(&acc, &e.mul(x, y)));
            let p = e
                .prime_value(&v)
                .ok_or_else(|| NoriError::RootSystem("pairing outside the prime field".into()))?;
            let z = f.lift_symmetric(p);
            if z.abs() > 3 {
                return Err(NoriError::RootSystem(format!("pairing {z} out of range")));
            }
            pairing[b][a] = z;
        }
    }

    let positive: Vec<bool> = pairing
        .iter()
        .map(|row| row.iter().find(|x| **x != 0).is_some_and(|x| *x > 0))
        .collect();
    let sub = |a: usize, b: usize| -> Option<usize> {
        let v: Vec<ExtElem> = roots[a].0.iter().zip(&roots[b].0).map(|(x, y)| e.sub(x, y)).collect();
        lookup.get(&v).copied()
    };
    let simple: Vec<usize> = (0..m)
        .filter(|&b| {
            positive[b] && !(0..m).any(|g| positive[g] && sub(b, g).is_some_and(|x| positive[x]))
        })
        .collect();
    if simple.len() != r {
        return Err(NoriError::RootSystem(format!(
            "{} simple roots for rank {r}",
            simple.len()
        )));
    }
    let raw_cartan: Vec<Vec<i64>> = simple
        .iter()
        .map(|&i| simple.iter().map(|&j| pairing[i][j]).collect())
        .collect();
    let comps = identify_components(&raw_cartan)?;

    // Frobenius on roots and on components
    let frob = |a: usize, times: u32| -> Result<usize, NoriError> {
        let mut v = roots[a].0.clone();
        for _ in 0..times {
            v = v.iter().map(|x| e.frobenius(x)).collect();
        }
        lookup
            .get(&v)
            .copied()
            .ok_or_else(|| NoriError::RootSystem("Frobenius does not permute the roots".into()))
    };
    let mut comp_of_root = vec![usize::MAX; m];
    for (ci, c) in comps.iter().enumerate() {
        for &idx in &c.order {
            comp_of_root[simple[idx]] = ci;
        }
    }
    // every root is connected through nonzero pairings to a simple root
    // of its component
    let mut changed = true;
    while changed {
        changed = false;
        for b in 0..m {
            if comp_of_root[b] != usize::MAX {
                continue;
            }
            if let Some(a) = (0..m).find(|&a| comp_of_root[a] != usize::MAX && pairing[b][a] != 0) {
                comp_of_root[b] = comp_of_root[a];
                changed = true;
            }
        }
    }
    if comp_of_root.contains(&usize::MAX) {
        return Err(NoriError::RootSystem("root outside every component".into()));
    }
    let reflect = |b: usize, g: usize| -> Option<usize> {
        let c = e.from_i64(pairing[b][g]);
        let v: Vec<ExtElem> = roots[b]
            .0
            .iter()
            .zip(&roots[g].0)
            .map(|(x, y)| e.sub(x, &e.mul(&c, y)))
            .collect();
        lookup.get(&v).copied()
    };

    let mut visited = vec![false; comps.len()];
    let mut factors = Vec::new();
    for ci in 0..comps.len() {
        if visited[ci] {
            continue;
        }
        let mut orbit_len = 0u32;
        let mut cur = ci;
        loop {
            visited[cur] = true;
            orbit_len += 1;
            let img = frob(simple[comps[cur].order[0]], 1)?;
            cur = comp_of_root[img];
            if cur == ci {
                break;
            }
            if orbit_len as usize > comps.len() {
                return Err(NoriError::RootSystem("Frobenius orbit does not close".into()));
            }
        }
        // σ^f maps the base of this component to another base of it;
        // reflect back to the fixed base and read off the diagram
        // automorphism
        let base: Vec<usize> = comps[ci].order.iter().map(|&i| simple[i]).collect();
        let mut imgs: Vec<usize> = base
            .iter()
            .map(|&a| frob(a, orbit_len))
            .collect::<Result<_, _>>()?;
        let mut guard = 0;
        while let Some(&g) = imgs.iter().find(|&&x| !positive[x]) {
            imgs = imgs
                .iter()
                .map(|&b| reflect(b, g).ok_or_else(|| NoriError::RootSystem("reflection left the roots".into())))
                .collect::<Result<_, _>>()?;
            guard += 1;
            if guard > m {
                return Err(NoriError::RootSystem("reflection loop".into()));
            }
        }
        let perm: Vec<usize> = imgs
            .iter()
            .map(|x| base.iter().position(|y| y == x))
            .collect::<Option<_>>()
            .ok_or_else(|| NoriError::RootSystem("twisted base outside its component".into()))?;
        let mut twist = 1u8;
        let mut p: Vec<usize> = perm.clone();
        while p.iter().enumerate().any(|(i, &x)| i != x) {
            p = p.iter().map(|&x| perm[x]).collect();
            twist += 1;
            if twist > 3 {
                return Err(NoriError::RootSystem("diagram automorphism of order above 3".into()));
            }
        }
        factors.push(FactorInfo {
            ty: comps[ci].ty,
            twist,
            f: orbit_len,
        });
    }
    factors.sort();

    // reorder simple roots by component, Bourbaki order within
    let order: Vec<usize> = comps.iter().flat_map(|c| c.order.iter().map(|&i| simple[i])).collect();
    let cartan_matrix: Vec<Vec<i64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| pairing[i][j]).collect())
        .collect();
    let mut closure_types: Vec<SimpleType> = comps.iter().map(|c| c.ty).collect();
    closure_types.sort();

    let basis_e: Vec<Matrix<ExtElem>> = s.basis.iter().map(emb).collect();
    let coroot_mats: Vec<Matrix<ExtElem>> = order
        .iter()
        .map(|&a| {
            // Cartan coordinates → algebra coordinates → matrix
            let mut acc = matrix::zeros(&e, n, n);
            for (c, h) in coroots[a].iter().zip(&choice.basis) {
                for (hc, b) in h.iter().zip(&basis_e) {
                    if *hc == 0 || e.is_zero(c) {
                        continue;
                    }
                    let coef = e.mul(c, &e.embed(*hc));
                    acc = matrix::add(&e, &acc, &matrix::scale(&e, b, &coef));
                }
            }
            acc
        })
        .collect();

    Ok(SemisimpleTypeData {
        dim: d,
        rank: r,
        closure_types,
        factors,
        cartan_matrix,
        splitting_degree: k,
        field: desc,
        cartan_basis: choice.basis.iter().map(|h| s.element(h)).collect(),
        seed,
        coroots: coroot_mats,
    })
}
