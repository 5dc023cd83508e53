use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ff::{matrix, Matrix, PrimeField};

use super::explog::trunc_log;
use super::lie::{saturate, LieSubalgebra, Span};
use super::{MatrixGroup, NoriError, Thresholds};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Generator scan first; exhaustive enumeration when the scan closure
    /// suggests the group fits under the BFS cap.
    #[default]
    Auto,
    Exhaustive,
    Scan,
}

/// Order-`ℓ` elements found in a group. `complete` is set only when the
/// list provably contains every `x ≠ I` with `x^ℓ = I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentSet {
    pub elements: Vec<Matrix<u64>>,
    pub complete: bool,
}

/// All elements of a finite matrix group, in BFS order from the identity.
#[derive(Clone, Debug)]
pub struct EnumeratedGroup {
    pub elements: Vec<Matrix<u64>>,
    index: HashMap<Vec<u64>, usize>,
}

impl EnumeratedGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &Matrix<u64>) -> bool {
        self.index.contains_key(m.data())
    }
}

/// Breadth-first enumeration of `⟨gens⟩`. Right multiplication by the
/// generators suffices because inverses are positive powers in a finite
/// group.
pub fn bfs_enumerate(
    f: &PrimeField,
    n: usize,
    gens: &[Matrix<u64>],
    cap: usize,
) -> Result<EnumeratedGroup, NoriError> {
    let id = matrix::identity(f, n);
    let mut index = HashMap::new();
    let mut elements = vec![id.clone()];
    index.insert(id.data().to_vec(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let h = matrix::mul(f, &elements[i], g);
            if index.contains_key(h.data()) {
                continue;
            }
            if elements.len() >= cap {
                return Err(NoriError::BfsCapExceeded(cap));
            }
            index.insert(h.data().to_vec(), elements.len());
            queue.push_back(elements.len());
            elements.push(h);
        }
    }
    Ok(EnumeratedGroup { elements, index })
}

/// Evaluates a word: index `i ≥ 0` is generator `i`, `-(i + 1)` its inverse.
pub fn eval_word(f: &PrimeField, gens: &[Matrix<u64>], word: &[i64]) -> Result<Matrix<u64>, NoriError> {
    let n = gens.first().map_or(0, |g| g.rows());
    let mut acc = matrix::identity(f, n);
    for &w in word {
        let i = if w >= 0 { w as usize } else { (-w - 1) as usize };
        let g = gens
            .get(i)
            .ok_or_else(|| NoriError::InvalidGroup(format!("word references unknown generator {w}")))?;
        let g = if w >= 0 {
            g.clone()
        } else {
            matrix::inverse(f, g).ok_or_else(|| NoriError::InvalidGroup("singular generator".into()))?
        };
        acc = matrix::mul(f, &acc, &g);
    }
    Ok(acc)
}

fn has_order_ell(f: &PrimeField, x: &Matrix<u64>) -> bool {
    !matrix::is_identity(f, x) && matrix::is_identity(f, &matrix::pow(f, x, f.p() as u128))
}

fn lcm(a: u128, b: u128) -> u128 {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Exponent that kills every semisimple part in `GL_N(GF(ℓ))`:
/// `lcm(ℓ^i − 1, 1 ≤ i ≤ N)`, prime to `ℓ`.
pub(crate) fn semisimple_killer(ell: u64, n: usize) -> u128 {
    (1..=n as u32).fold(1u128, |acc, i| lcm(acc, (ell as u128).pow(i) - 1))
}

/// Generator scan: unipotent parts (via `y^M`) of generators and words of
/// length ≤ 3, closed under conjugation by the generators until the span of
/// their logarithms stabilizes.
fn scan(g: &MatrixGroup) -> Result<(Vec<Matrix<u64>>, Span), NoriError> {
    let f = g.field();
    let n = g.n;
    let mut letters: Vec<Matrix<u64>> = g.generators.clone();
    let mut inverses = Vec::new();
    for x in &g.generators {
        let inv = matrix::inverse(&f, x).ok_or_else(|| NoriError::InvalidGroup("singular generator".into()))?;
        inverses.push(inv.clone());
        letters.push(inv);
    }
    let mut words: Vec<Matrix<u64>> = letters.clone();
    let mut frontier = letters.clone();
    for _ in 1..3 {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                next.push(matrix::mul(&f, w, l));
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let m = semisimple_killer(g.ell, n);
    let mut span = Span::new(f, n * n);
    let mut found: Vec<Matrix<u64>> = Vec::new();
    let mut queue = VecDeque::new();
    let consider = |u: Matrix<u64>, span: &mut Span, found: &mut Vec<Matrix<u64>>, queue: &mut VecDeque<usize>| -> Result<(), NoriError> {
        if !has_order_ell(&f, &u) {
            return Ok(());
        }
        let l = trunc_log(&f, &u)?;
        if span.insert(l.data()) {
            queue.push_back(found.len());
            found.push(u);
        }
        Ok(())
    };
    for w in &words {
        consider(matrix::pow(&f, w, m), &mut span, &mut found, &mut queue)?;
    }
    while let Some(i) = queue.pop_front() {
        for (s, si) in g.generators.iter().zip(&inverses) {
            let c = matrix::mul(&f, &matrix::mul(&f, s, &found[i]), si);
            consider(c, &mut span, &mut found, &mut queue)?;
        }
    }
    Ok((found, span))
}

fn exhaustive(g: &MatrixGroup, cap: usize) -> Result<Vec<Matrix<u64>>, NoriError> {
    let f = g.field();
    let all = bfs_enumerate(&f, g.n, &g.generators, cap)?;
    Ok(all.elements.into_iter().filter(|x| has_order_ell(&f, x)).collect())
}

/// Dimension of the bracket closure of the scanned logarithms.
fn scan_closure_dim(g: &MatrixGroup, span: &Span, found: &[Matrix<u64>]) -> Result<usize, NoriError> {
    let f = g.field();
    let mut span = span.clone();
    let mut basis = Vec::with_capacity(found.len());
    for u in found {
        basis.push(trunc_log(&f, u)?);
    }
    saturate(&f, &mut span, &mut basis);
    Ok(LieSubalgebra::from_span(g.n, &span).dim())
}

/// `Γ[ℓ] \ {I}` or a subset of it, per `mode`.
pub fn order_ell_elements(
    g: &MatrixGroup,
    mode: ScanMode,
    thresholds: &Thresholds,
) -> Result<UnipotentSet, NoriError> {
    match mode {
        ScanMode::Exhaustive => Ok(UnipotentSet {
            elements: exhaustive(g, thresholds.bfs_cap)?,
            complete: true,
        }),
        ScanMode::Scan => Ok(UnipotentSet {
            elements: scan(g)?.0,
            complete: false,
        }),
        ScanMode::Auto => {
            let (found, span) = scan(g)?;
            let d = scan_closure_dim(g, &span, &found)?;
            let estimate = (g.ell as f64).powi(d as i32);
            if estimate <= thresholds.bfs_cap as f64 {
                match exhaustive(g, thresholds.bfs_cap) {
                    Ok(elements) => {
                        return Ok(UnipotentSet {
                            elements,
                            complete: true,
                        })
                    }
                    Err(NoriError::BfsCapExceeded(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(UnipotentSet {
                elements: found,
                complete: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2(ell: u64) -> MatrixGroup {
        MatrixGroup::from_integer_rows(
            2,
            ell,
            &[vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]],
            "sl2",
        )
        .unwrap()
    }

    #[test]
    fn sl2_f7_has_48_order_7_elements() {
        let g = sl2(7);
        let f = g.field();
        assert_eq!(bfs_enumerate(&f, 2, &g.generators, 1000).unwrap().order(), 336);
        let u = order_ell_elements(&g, ScanMode::Exhaustive, &Thresholds::default()).unwrap();
        assert_eq!(u.elements.len(), 48);
        assert!(u.complete);
        let auto = order_ell_elements(&g, ScanMode::Auto, &Thresholds::default()).unwrap();
        assert_eq!(auto, u);
    }

    #[test]
    fn scan_is_flagged_incomplete() {
        let u = order_ell_elements(&sl2(11), ScanMode::Scan, &Thresholds::default()).unwrap();
        assert!(!u.complete);
        assert!(!u.elements.is_empty());
    }

    #[test]
    fn trivial_and_torus_groups() {
        let t = MatrixGroup::new(2, 7, vec![], "trivial").unwrap();
        let u = order_ell_elements(&t, ScanMode::Exhaustive, &Thresholds::default()).unwrap();
        assert!(u.elements.is_empty() && u.complete);
        let d = MatrixGroup::from_integer_rows(2, 7, &[vec![vec![3, 0], vec![0, 5]]], "torus").unwrap();
        let u = order_ell_elements(&d, ScanMode::Auto, &Thresholds::default()).unwrap();
        assert!(u.elements.is_empty() && u.complete);
    }

    #[test]
    fn cap_overflow_is_reported() {
        let g = sl2(13);
        let t = Thresholds {
            bfs_cap: 100,
            ..Thresholds::default()
        };
        assert_eq!(
            order_ell_elements(&g, ScanMode::Exhaustive, &t),
            Err(NoriError::BfsCapExceeded(100))
        );
        // auto mode falls back to the scan
        assert!(!order_ell_elements(&g, ScanMode::Auto, &t).unwrap().complete);
    }

    #[test]
    fn words() {
        let g = sl2(7);
        let f = g.field();
        let w = eval_word(&f, &g.generators, &[0, -1]).unwrap();
        assert!(matrix::is_identity(&f, &w));
        assert!(eval_word(&f, &g.generators, &[5]).is_err());
        assert_eq!(semisimple_killer(7, 2), 48);
    }
}
