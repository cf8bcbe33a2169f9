/// Minimum total cost of a perfect assignment on a square cost matrix
/// (Hungarian method with row/column potentials, O(n^3)).
///
/// `cost` is row-major `n x n`. Returns `0` for `n = 0`.
pub fn min_cost_assignment(n: usize, cost: &[i64]) -> i64 {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return 0;
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based columns; column 0 is the virtual start.
    let mut row_pot = vec![0i64; n + 1];
    let mut col_pot = vec![0i64; n + 1];
    let mut col_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_row[0] = row;
        let mut col0 = 0;
        let mut min_slack = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = col_row[col0];
            let mut delta = INF;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let cur = cost[(r0 - 1) * n + (col - 1)] - row_pot[r0] - col_pot[col];
                if cur < min_slack[col] {
                    min_slack[col] = cur;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    row_pot[col_row[col]] += delta;
                    col_pot[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if col_row[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            col_row[col0] = col_row[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    (1..=n)
        .map(|col| cost[(col_row[col] - 1) * n + (col - 1)])
        .sum()
}
