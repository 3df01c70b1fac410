//! Definition-level reference implementations, written without any of the
//! library's internals (no eigendecompositions, no rank tricks).

#![allow(dead_code)]

/// Gauss–Jordan inverse with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != c {
                let f = row[c];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Mardia `(b₁, b₂)` from the `n × n` matrix of Mahalanobis inner products.
pub fn mardia(rows: &[Vec<f64>]) -> (f64, f64) {
    let n = rows.len();
    let p = rows[0].len();
    let mean: Vec<f64> = (0..p)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let c: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let s: Vec<Vec<f64>> = (0..p)
        .map(|a| {
            (0..p)
                .map(|b| c.iter().map(|r| r[a] * r[b]).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let si = invert(&s);
    let g = |i: usize, j: usize| {
        let mut acc = 0.0;
        for a in 0..p {
            for b in 0..p {
                acc += c[i][a] * si[a][b] * c[j][b];
            }
        }
        acc
    };
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            b1 += g(i, j).powi(3);
        }
        b2 += g(i, i).powi(2);
    }
    (b1 / (n * n) as f64, b2 / n as f64)
}

/// Long-run variance estimates with the Bartlett kernel, computed from the
/// raw (unstandardized) series by explicit loops over lags and sites.
pub fn variance_estimators(values: &[f64], n_x: usize, n_y: usize, b: (usize, usize)) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let z: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    let bart = |t: f64| if t.abs() <= 1.0 { 1.0 - t.abs() } else { 0.0 };
    let (mut s3, mut s4) = (0.0, 0.0);
    for hy in -(b.1 as i64)..=b.1 as i64 {
        for hx in -(b.0 as i64)..=b.0 as i64 {
            let mut c = 0.0;
            for y in 0..n_y as i64 {
                for x in 0..n_x as i64 {
                    let (x2, y2) = (x + hx, y + hy);
                    if x2 >= 0 && y2 >= 0 && x2 < n_x as i64 && y2 < n_y as i64 {
                        c += z[(y * n_x as i64 + x) as usize] * z[(y2 * n_x as i64 + x2) as usize];
                    }
                }
            }
            c /= n;
            let w = bart(hx as f64 / b.0 as f64) * bart(hy as f64 / b.1 as f64);
            s3 += w * c.powi(3);
            s4 += w * c.powi(4);
        }
    }
    (6.0 * s3, 24.0 * s4)
}

/// BH by scanning every candidate threshold: the largest observed value `v`
/// with `v < #{p ≤ v}·α/K`. Returns `(R, rejected indices)`.
pub fn bh(p: &[f64], alpha: f64) -> (usize, Vec<usize>) {
    let k = p.len() as f64;
    let count_le = |v: f64| p.iter().filter(|&&q| q <= v).count();
    let t = p
        .iter()
        .copied()
        .filter(|&v| v < count_le(v) as f64 * alpha / k)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    match t {
        None => (0, Vec::new()),
        Some(t) => (count_le(t), (0..p.len()).filter(|&i| p[i] <= t).collect()),
    }
}

/// Modified band depth by enumerating every pair band.
pub fn band_depth(curves: &[Vec<f64>]) -> Vec<f64> {
    let n = curves.len();
    let m = curves[0].len();
    let mut pairs = 0usize;
    let mut hits = vec![0usize; n];
    for a in 0..n {
        for b in a + 1..n {
            pairs += 1;
            for (i, f) in curves.iter().enumerate() {
                for j in 0..m {
                    let (lo, hi) = (curves[a][j].min(curves[b][j]), curves[a][j].max(curves[b][j]));
                    if lo <= f[j] && f[j] <= hi {
                        hits[i] += 1;
                    }
                }
            }
        }
    }
    hits.iter().map(|&h| h as f64 / (pairs * m) as f64).collect()
}
