//! Small dense helpers: vector arithmetic, Gaussian elimination and
//! symmetric eigenvalues for the tiny matrices that show up here.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Solves `a x = b` by partial-pivot elimination. `None` if singular.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Orthonormal basis of the tangent space at unit `y`.
pub fn tangent_basis(y: &[f64]) -> Vec<Vec<f64>> {
    let d = y.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        let c = dot(&v, y);
        v.iter_mut().zip(y).for_each(|(a, b)| *a -= c * b);
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(a, bb)| *a -= c * bb);
        }
        let n = norm(&v);
        if n > 1e-8 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
        if basis.len() == d - 1 {
            break;
        }
    }
    basis
}

/// Smallest eigenvalue of a symmetric matrix: closed forms for orders 1
/// and 2, cyclic Jacobi above that.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 0.0,
        1 => m[0][0],
        2 => {
            let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
            let mean = 0.5 * (a + c);
            let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            mean - r
        }
        _ => {
            let scale = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            jacobi_eigenvalues(m, 1e-14 * scale)
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn closed_forms_agree_with_jacobi() {
        let m3 = vec![vec![4.0, 1.0, -2.0], vec![1.0, 2.0, 0.5], vec![-2.0, 0.5, 3.0]];
        let j = jacobi_eigenvalues(&m3, 1e-13);
        let jmin = j.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min_eigenvalue(&m3) - jmin).abs() < 1e-10);

        let m2 = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(min_eigenvalue(&m2).abs() < 1e-15);
        let trace: f64 = jacobi_eigenvalues(&m3, 1e-13).iter().sum();
        assert!((trace - 9.0).abs() < 1e-10);
    }

    #[test]
    fn jacobi_on_four_by_four() {
        let m = vec![
            vec![2.0, -1.0, 0.0, 0.0],
            vec![-1.0, 2.0, -1.0, 0.0],
            vec![0.0, -1.0, 2.0, -1.0],
            vec![0.0, 0.0, -1.0, 2.0],
        ];
        // eigenvalues 2 - 2 cos(k pi / 5)
        let expected = 2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((min_eigenvalue(&m) - expected).abs() < 1e-9);
    }
}
