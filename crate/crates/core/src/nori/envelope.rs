//! End-to-end envelope computation and the checks built on it.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ff::{
    factorize, matrix, poly, primitive_element, DlogTable, ExtElem, ExtField, Field, FiniteField, Matrix,
    PrimeField,
};
use crate::formchar::{annihilator_lattice, FormalCharacter};
use crate::lierank::{closure_rank, total_rank, LieFactorDescriptor, RankReport, SimpleType};

use super::explog::trunc_log;
use super::group::{bfs_enumerate, order_ell_elements, semisimple_killer, EnumeratedGroup, ScanMode, UnipotentSet};
use super::lie::{lie_closure, LieSubalgebra};
use super::roots::{identify_type_with_degree, FactorInfo, SemisimpleTypeData};
use super::weights::{joint_eigenspaces, lift_eigenvalue, weights_on_ambient, WeightData};
use super::{MatrixGroup, NoriError, Thresholds};

const CROSS_CHECK_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
/// Largest number of candidate generators of a central character tried.
const UNIT_SEARCH_CAP: u128 = 1 << 20;
/// Largest number of torus points enumerated by [`quotient_check`].
const TORUS_BUDGET: u128 = 4_000_000;

/// Envelope of a finite matrix group, realized through its Lie algebra.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub label: String,
    pub n: usize,
    pub ell: u64,
    pub seed: u64,
    pub mode: ScanMode,
    pub unipotent: UnipotentSet,
    pub lie: LieSubalgebra,
    pub types: SemisimpleTypeData,
    pub weights: WeightData,
    /// Central elements adjoined by [`assemble_envelope`]; their rows follow
    /// the coroot rows of `weights`.
    pub central: Vec<Matrix<u64>>,
    pub formal_character: FormalCharacter,
    pub descriptors: Vec<LieFactorDescriptor>,
    pub rank_report: RankReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub label: String,
    pub n: usize,
    pub ell: u64,
    pub seed: u64,
    pub realization: String,
    pub mode: ScanMode,
    pub complete: bool,
    pub unipotent_count: usize,
    pub dim: usize,
    pub rank: usize,
    pub closure_types: Vec<SimpleType>,
    pub factors: Vec<FactorInfo>,
    pub factor_names: Vec<String>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub splitting_degree: u32,
    pub weight_matrix: Vec<Vec<i64>>,
    pub formal_character: FormalCharacter,
    pub rank_report: RankReport,
    pub closure_rank: u64,
}

impl Envelope {
    pub fn report(&self) -> EnvelopeReport {
        EnvelopeReport {
            label: self.label.clone(),
            n: self.n,
            ell: self.ell,
            seed: self.seed,
            realization: "lie-algebra".to_string(),
            mode: self.mode,
            complete: self.unipotent.complete,
            unipotent_count: self.unipotent.elements.len(),
            dim: self.lie.dim(),
            rank: self.types.rank,
            closure_types: self.types.closure_types.clone(),
            factors: self.types.factors.clone(),
            factor_names: self.descriptors.iter().map(|d| d.factor_name()).collect(),
            cartan_matrix: self.types.cartan_matrix.clone(),
            splitting_degree: self.types.splitting_degree,
            weight_matrix: self.weights.weights.clone(),
            formal_character: self.formal_character.clone(),
            rank_report: self.rank_report.clone(),
            closure_rank: closure_rank(1, &self.types.closure_types),
        }
    }

    /// Group order predicted from the identified type when the envelope is
    /// a single split simply connected factor, i.e. `|G(F_ℓ)|`.
    pub fn predicted_order(&self) -> Option<u128> {
        match self.types.factors.as_slice() {
            [FactorInfo { ty, twist: 1, f: 1 }] => crate::lierank::chevalley_order(*ty, self.ell as u128).ok(),
            _ => None,
        }
    }
}

fn weights_for(
    lie: &LieSubalgebra,
    types: &SemisimpleTypeData,
    thresholds: &Thresholds,
) -> Result<WeightData, NoriError> {
    let e = ExtField::new(types.field.clone());
    weights_on_ambient(&e, &types.coroots, lie.ambient_dim, thresholds.weight_bound(lie.ambient_dim))
}

/// Runs the pipeline: order-`ℓ` elements, logarithms, Lie closure, type,
/// weights (checked against a second Cartan draw), formal character and
/// ranks.
pub fn analyze_group(
    g: &MatrixGroup,
    mode: ScanMode,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<Envelope, NoriError> {
    let min = thresholds.ell_min(g.n);
    if g.ell < min {
        return Err(NoriError::BelowEllMin { ell: g.ell, min });
    }
    let f = g.field();
    let unipotent = order_ell_elements(g, mode, thresholds)?;
    let logs: Vec<Matrix<u64>> = unipotent
        .elements
        .iter()
        .map(|x| trunc_log(&f, x))
        .collect::<Result<_, _>>()?;
    let lie = lie_closure(&f, g.n, &logs);
    let types = identify_type_with_degree(&lie, seed, thresholds, 1)?;
    let weights = weights_for(&lie, &types, thresholds)?;
    let formal_character = FormalCharacter::from_weights(&weights.weights, g.n)?;

    let other_types = identify_type_with_degree(&lie, seed ^ CROSS_CHECK_SALT, thresholds, 1)?;
    let other = weights_for(&lie, &other_types, thresholds)?;
    if other_types.factors != types.factors
        || other_types.cartan_matrix != types.cartan_matrix
        || FormalCharacter::from_weights(&other.weights, g.n)? != formal_character
    {
        return Err(NoriError::LiftMismatch);
    }

    let descriptors = types.descriptors(g.ell)?;
    let rank_report = total_rank(&descriptors);
    Ok(Envelope {
        label: g.label.clone(),
        n: g.n,
        ell: g.ell,
        seed,
        mode,
        unipotent,
        lie,
        types,
        weights,
        central: Vec::new(),
        formal_character,
        descriptors,
        rank_report,
    })
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

fn gcd128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd128(b, a % b)
    }
}

/// Multiplicative order of a semisimple matrix; `None` when it is not
/// semisimple.
fn semisimple_order(f: &PrimeField, z: &Matrix<u64>) -> Option<u128> {
    let m = semisimple_killer(f.p(), z.rows());
    if !matrix::is_identity(f, &matrix::pow(f, z, m)) {
        return None;
    }
    let mut o = m;
    for (p, _) in factorize(m) {
        while o % p == 0 && matrix::is_identity(f, &matrix::pow(f, z, o / p)) {
            o /= p;
        }
    }
    Some(o)
}

fn symmetric(x: u128, o: u128) -> i64 {
    if x > o / 2 {
        -((o - x) as i64)
    } else {
        x as i64
    }
}

/// Adjoins central semisimple elements: each contributes a row of discrete
/// logarithms of its eigenvalues, lifted to symmetric residues modulo its
/// order. The generator of the eigenvalue group is the one that minimizes
/// the largest entry of the row (ties: the least exponent relative to the
/// canonical primitive element).
pub fn assemble_envelope(
    env: &Envelope,
    central: &[Matrix<u64>],
    thresholds: &Thresholds,
) -> Result<Envelope, NoriError> {
    if central.is_empty() {
        return Ok(env.clone());
    }
    let f = env.lie.field();
    let n = env.n;
    let bound = thresholds.weight_bound(n);
    let mut orders = Vec::with_capacity(central.len());
    let mut degree = env.types.splitting_degree;
    for z in central {
        if z.rows() != n || z.cols() != n {
            return Err(NoriError::InvalidGroup("central element has the wrong size".into()));
        }
        if env.lie.basis.iter().any(|b| !matrix::is_zero(&f, &matrix::bracket(&f, b, z))) {
            return Err(NoriError::NonCommuting);
        }
        let o = semisimple_order(&f, z).ok_or(NoriError::NotDiagonalizable)?;
        if o <= 2 * bound as u128 {
            return Err(NoriError::CentralOrder { order: o, bound });
        }
        orders.push(o);
        let cp = matrix::char_poly(&f, z);
        for d in poly::factor_degrees(&f, &cp) {
            degree = lcm(degree, d as u32);
        }
    }
    let types = if degree == env.types.splitting_degree {
        env.types.clone()
    } else {
        identify_type_with_degree(&env.lie, env.seed, thresholds, degree)?
    };
    let e = ExtField::new(types.field.clone());
    let q = e.order();
    let g = primitive_element(&e);
    let table = DlogTable::new(&e, &g, thresholds.field_cap)?;

    let mut ops: Vec<Matrix<ExtElem>> = types.coroots.clone();
    ops.extend(central.iter().map(|z| z.map(|x| e.embed(*x))));
    let r = types.coroots.len();
    let spaces = joint_eigenspaces(&e, &ops, n)?;
    // per column: coroot weights and raw logs relative to g^{(q-1)/o}
    let mut cols: Vec<(Vec<i64>, Vec<u128>)> = Vec::with_capacity(n);
    for (vals, basis) in &spaces {
        let w: Vec<i64> = vals[..r]
            .iter()
            .map(|v| lift_eigenvalue(&e, v, bound))
            .collect::<Result<_, _>>()?;
        let logs: Vec<u128> = vals[r..]
            .iter()
            .zip(&orders)
            .map(|(v, &o)| table.log(v).map(|a| (a / ((q - 1) / o)) % o))
            .collect::<Result<_, _>>()?;
        for _ in 0..basis.cols() {
            cols.push((w.clone(), logs.clone()));
        }
    }
    let mut rows: Vec<Vec<i64>> = (0..r).map(|i| cols.iter().map(|c| c.0[i]).collect()).collect();
    for (k, &o) in orders.iter().enumerate() {
        let raw: Vec<u128> = cols.iter().map(|c| c.1[k]).collect();
        let mut best: Option<(i64, Vec<i64>)> = None;
        let mut u = 1u128;
        while u < o.max(2) && u <= UNIT_SEARCH_CAP {
            if gcd128(u, o) == 1 {
                let row: Vec<i64> = raw.iter().map(|&b| symmetric((b * u) % o, o)).collect();
                let m = row.iter().map(|x| x.abs()).max().unwrap_or(0);
                if best.as_ref().is_none_or(|(bm, _)| m < *bm) {
                    best = Some((m, row));
                }
            }
            u += 1;
        }
        rows.push(best.map(|(_, row)| row).unwrap_or_else(|| vec![0; cols.len()]));
    }
    // columns in descending lexicographic order
    let mut order: Vec<usize> = (0..cols.len()).collect();
    let column = |j: usize| -> Vec<i64> { rows.iter().map(|row| row[j]).collect() };
    order.sort_by_key(|&j| std::cmp::Reverse(column(j)));
    let rows: Vec<Vec<i64>> = rows.iter().map(|row| order.iter().map(|&j| row[j]).collect()).collect();

    let formal_character = FormalCharacter::from_weights(&rows, n)?;
    let mut out = env.clone();
    out.types = types;
    out.weights = WeightData {
        n,
        weights: rows,
        eigenbasis: None,
    };
    out.central = central.to_vec();
    out.formal_character = formal_character;
    Ok(out)
}

/// Outcome of comparing the `F_ℓ`-points of the envelope with the subgroup
/// generated by their order-`ℓ` elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientCheck {
    pub points_order: usize,
    pub plus_order: usize,
    pub index: usize,
    pub abelian: bool,
    pub bound: u64,
    pub torus_points: usize,
    /// Whether the order-`ℓ` elements of the input group were enumerated
    /// exhaustively.
    pub complete: bool,
    pub pass: bool,
}

/// Grows a generating set greedily: a candidate is kept when it lies
/// outside the group generated so far.
fn greedy_closure<'a>(
    f: &PrimeField,
    n: usize,
    gens: &mut Vec<Matrix<u64>>,
    candidates: impl IntoIterator<Item = &'a Matrix<u64>>,
    cap: usize,
) -> Result<EnumeratedGroup, NoriError> {
    let mut group = bfs_enumerate(f, n, gens, cap)?;
    for c in candidates {
        if !group.contains(c) {
            gens.push(c.clone());
            group = bfs_enumerate(f, n, gens, cap)?;
        }
    }
    Ok(group)
}

/// `F_ℓ`-points of the maximal torus: `P diag(t) P^{-1}` for `t` in the
/// diagonal subtorus cut out by the weight annihilator, kept when rational.
fn torus_points(env: &Envelope) -> Result<Vec<Matrix<u64>>, NoriError> {
    let n = env.n;
    let e = ExtField::new(env.types.field.clone());
    let p = match &env.weights.eigenbasis {
        Some(p) => p.clone(),
        None => {
            let w = weights_on_ambient(&e, &env.types.coroots, n, i64::MAX)?;
            w.eigenbasis.expect("set by weights_on_ambient")
        }
    };
    let p_inv = matrix::inverse(&e, &p).ok_or(NoriError::NotDiagonalizable)?;
    let lattice = annihilator_lattice(&env.weights.weights, n)?;
    // cocharacters: the integer orthogonal complement of the lattice
    let cochars = if lattice.is_empty() {
        Vec::new()
    } else {
        annihilator_lattice(&lattice, n)?
    };
    let q1 = e.order() - 1;
    let count = q1
        .checked_pow(cochars.len() as u32)
        .filter(|c| *c <= TORUS_BUDGET)
        .ok_or(NoriError::Budget(usize::MAX))?;
    let g = primitive_element(&e);
    let powers: Vec<ExtElem> = {
        let mut v = Vec::with_capacity(q1 as usize);
        let mut cur = e.one();
        for _ in 0..q1 {
            v.push(cur.clone());
            cur = e.mul(&cur, &g);
        }
        v
    };
    // rank-one pieces P_{:,j} P^{-1}_{j,:}
    let pieces: Vec<Matrix<ExtElem>> = (0..n)
        .map(|j| {
            let col = Matrix::from_columns(n, &[p.column(j)]);
            let row = Matrix::from_rows(vec![p_inv.row(j).to_vec()]);
            matrix::mul(&e, &col, &row)
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut a = vec![0u128; cochars.len()];
    for _ in 0..count {
        let mut acc = matrix::zeros(&e, n, n);
        for (j, piece) in pieces.iter().enumerate() {
            let expo = a
                .iter()
                .zip(&cochars)
                .fold(0i128, |s, (ak, y)| s + *ak as i128 * y[j] as i128)
                .rem_euclid(q1 as i128) as usize;
            acc = matrix::add(&e, &acc, &matrix::scale(&e, piece, &powers[expo]));
        }
        let rational: Option<Vec<u64>> = acc.data().iter().map(|x| e.prime_value(x)).collect();
        if let Some(data) = rational {
            let m = Matrix::from_vec(n, n, data);
            if seen.insert(m.data().to_vec()) {
                out.push(m);
            }
        }
        for ak in a.iter_mut() {
            *ak += 1;
            if *ak < q1 {
                break;
            }
            *ak = 0;
        }
    }
    Ok(out)
}

/// Index and commutativity of `S / S⁺`, where `S` is generated by the
/// order-`ℓ` elements and the `F_ℓ`-points of a maximal torus of the
/// envelope, and `S⁺` by the order-`ℓ` elements of `S`.
pub fn quotient_check(env: &Envelope, thresholds: &Thresholds) -> Result<QuotientCheck, NoriError> {
    let f = env.lie.field();
    let n = env.n;
    let cap = thresholds.bfs_cap;
    let mut h_gens = Vec::new();
    greedy_closure(&f, n, &mut h_gens, &env.unipotent.elements, cap)?;
    let torus = torus_points(env)?;
    let mut s_gens = h_gens.clone();
    let s = greedy_closure(&f, n, &mut s_gens, &torus, cap)?;
    let ell = f.p() as u128;
    let order_ell: Vec<&Matrix<u64>> = s
        .elements
        .iter()
        .filter(|x| !matrix::is_identity(&f, x) && matrix::is_identity(&f, &matrix::pow(&f, x, ell)))
        .collect();
    let mut plus_gens = h_gens;
    let plus = greedy_closure(&f, n, &mut plus_gens, order_ell, cap)?;
    let mut abelian = true;
    'outer: for (i, a) in s_gens.iter().enumerate() {
        for b in &s_gens[i + 1..] {
            let ai = matrix::inverse(&f, a).expect("invertible");
            let bi = matrix::inverse(&f, b).expect("invertible");
            let c = matrix::mul(&f, &matrix::mul(&f, a, b), &matrix::mul(&f, &ai, &bi));
            if !plus.contains(&c) {
                abelian = false;
                break 'outer;
            }
        }
    }
    let divides = s.order() % plus.order() == 0;
    let index = s.order() / plus.order();
    let bound = 1u64 << (n.max(1) - 1);
    Ok(QuotientCheck {
        points_order: s.order(),
        plus_order: plus.order(),
        index,
        abelian,
        bound,
        torus_points: torus.len(),
        complete: env.unipotent.complete,
        pass: divides && abelian && index as u64 <= bound,
    })
}
