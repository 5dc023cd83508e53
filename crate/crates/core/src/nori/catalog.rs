//! Cartan matrices to Dynkin types.
//!
//! Convention: `a_ij = ⟨α_i, α_j^∨⟩ = 2(α_i, α_j) / (α_j, α_j)`, so along a
//! multiple edge `|a_ij| > 1` exactly when `α_j` is the short root. Output
//! orders follow Bourbaki numbering (`B_n`: `α_n` short; `C_n`: `α_n` long;
//! `D_n`: `α_{n-1}, α_n` the fork; `E_n`: `α_2` on the short arm; `F_4`:
//! `α_1, α_2` long; `G_2`: `α_1` short).

use crate::lierank::SimpleType;

use super::NoriError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogComponent {
    pub ty: SimpleType,
    /// Indices into the input matrix in Bourbaki order.
    pub order: Vec<usize>,
}

fn err(msg: impl Into<String>) -> NoriError {
    NoriError::UnknownType(msg.into())
}

/// Splits a Cartan matrix into irreducible components and names each.
/// Components are returned sorted by type, ties by smallest index.
pub fn identify_components(a: &[Vec<i64>]) -> Result<Vec<CatalogComponent>, NoriError> {
    let r = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != r {
            return Err(err("not square"));
        }
        if row[i] != 2 {
            return Err(err("diagonal entry is not 2"));
        }
        for j in 0..r {
            if i == j {
                continue;
            }
            let (x, y) = (a[i][j], a[j][i]);
            if x > 0 || (x == 0) != (y == 0) || !(0..=3).contains(&(x * y)) {
                return Err(err(format!("invalid entries at ({i},{j})")));
            }
        }
    }
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for start in 0..r {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..r {
                if !seen[j] && a[i][j] != 0 {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(name_component(a, &comp)?);
    }
    out.sort_by(|x, y| (x.ty, x.order.iter().min()).cmp(&(y.ty, y.order.iter().min())));
    Ok(out)
}

fn neighbours(a: &[Vec<i64>], nodes: &[usize], i: usize) -> Vec<usize> {
    nodes.iter().copied().filter(|&j| j != i && a[i][j] != 0).collect()
}

/// Walks a path starting at `from` (an end) avoiding `avoid`.
fn walk(a: &[Vec<i64>], nodes: &[usize], from: usize, avoid: Option<usize>) -> Vec<usize> {
    let mut path = vec![from];
    let mut prev = avoid;
    let mut cur = from;
    loop {
        let next: Vec<usize> = neighbours(a, nodes, cur)
            .into_iter()
            .filter(|&j| Some(j) != prev && !path.contains(&j))
            .collect();
        match next.as_slice() {
            [n] => {
                prev = Some(cur);
                cur = *n;
                path.push(cur);
            }
            _ => return path,
        }
    }
}

fn name_component(a: &[Vec<i64>], nodes: &[usize]) -> Result<CatalogComponent, NoriError> {
    let n = nodes.len();
    let mut edges = 0;
    let mut multi: Vec<(usize, usize)> = Vec::new();
    for (x, &i) in nodes.iter().enumerate() {
        for &j in &nodes[x + 1..] {
            if a[i][j] != 0 {
                edges += 1;
                if a[i][j] * a[j][i] > 1 {
                    multi.push((i, j));
                }
            }
        }
    }
    if edges + 1 != n {
        return Err(err("Dynkin diagram is not a tree"));
    }
    if multi.len() > 1 {
        return Err(err("more than one multiple edge"));
    }
    let degree = |i: usize| neighbours(a, nodes, i).len();
    let ends: Vec<usize> = nodes.iter().copied().filter(|&i| degree(i) <= 1).collect();
    let branch: Vec<usize> = nodes.iter().copied().filter(|&i| degree(i) >= 3).collect();

    if let Some(&(i, j)) = multi.first() {
        if !branch.is_empty() {
            return Err(err("multiple edge with a branch node"));
        }
        // short root of the multiple edge
        let (long, short) = if a[i][j].abs() > 1 { (i, j) } else { (j, i) };
        if a[i][j] * a[j][i] == 3 {
            if n != 2 {
                return Err(err("triple edge outside G2"));
            }
            return Ok(CatalogComponent {
                ty: SimpleType::G2,
                order: vec![short, long],
            });
        }
        if n == 2 {
            return Ok(CatalogComponent {
                ty: SimpleType::B(2),
                order: vec![long, short],
            });
        }
        if degree(short) == 1 {
            // long chain ending in a short root
            let order = walk(a, nodes, ends.iter().copied().find(|&e| e != short).unwrap(), None);
            return Ok(CatalogComponent {
                ty: SimpleType::B(n as u32),
                order,
            });
        }
        if degree(long) == 1 {
            let order = walk(a, nodes, ends.iter().copied().find(|&e| e != long).unwrap(), None);
            return Ok(CatalogComponent {
                ty: SimpleType::C(n as u32),
                order,
            });
        }
        if n == 4 {
            // F4: start from the long end
            let path = walk(a, nodes, ends[0], None);
            let pos = |x: usize| path.iter().position(|&y| y == x);
            let order = if pos(long) < pos(short) {
                path
            } else {
                walk(a, nodes, ends[1], None)
            };
            return Ok(CatalogComponent {
                ty: SimpleType::F4,
                order,
            });
        }
        return Err(err("double edge in the middle of a chain other than F4"));
    }

    match branch.as_slice() {
        [] => {
            let start = ends.first().copied().unwrap_or(nodes[0]);
            Ok(CatalogComponent {
                ty: SimpleType::A(n as u32),
                order: walk(a, nodes, start, None),
            })
        }
        [c] => {
            let c = *c;
            let nb = neighbours(a, nodes, c);
            if nb.len() != 3 {
                return Err(err("branch node of degree above 3"));
            }
            let mut arms: Vec<Vec<usize>> = nb.iter().map(|&s| walk(a, nodes, s, Some(c))).collect();
            arms.sort_by_key(|arm| (arm.len(), arm[0]));
            let lens: Vec<usize> = arms.iter().map(|x| x.len()).collect();
            match lens.as_slice() {
                [1, 1, _] => {
                    // α_1 … α_{n-2} along the long arm toward the fork
                    let mut order: Vec<usize> = arms[2].iter().rev().copied().collect();
                    order.push(c);
                    order.push(arms[0][0]);
                    order.push(arms[1][0]);
                    Ok(CatalogComponent {
                        ty: SimpleType::D(n as u32),
                        order,
                    })
                }
                [1, 2, 2..=4] => {
                    let mut order = vec![arms[1][1], arms[0][0], arms[1][0], c];
                    order.extend(arms[2].iter().copied());
                    Ok(CatalogComponent {
                        ty: SimpleType::E(n as u32),
                        order,
                    })
                }
                _ => Err(err(format!("unsupported branch arms {lens:?}"))),
            }
        }
        _ => Err(err("more than one branch node")),
    }
}

/// Bourbaki Cartan matrix of a type (for tests and catalog round trips).
pub fn cartan_matrix_of(ty: SimpleType) -> Vec<Vec<i64>> {
    let n = ty.rank() as usize;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match ty {
        SimpleType::A(_) => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
        SimpleType::B(_) => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -2, -1);
        }
        SimpleType::C(_) => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -1, -2);
        }
        SimpleType::D(_) => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 3, n - 1, -1, -1);
        }
        SimpleType::E(_) => {
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
        }
        SimpleType::F4 => {
            link(0, 1, -1, -1);
            link(1, 2, -2, -1);
            link(2, 3, -1, -1);
        }
        SimpleType::G2 => link(0, 1, -1, -3),
    }
    a
}
