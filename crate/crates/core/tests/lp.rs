use nalgebra::{DMatrix, DVector};
use ncx_core::lp::solve;
use ncx_core::{LinearProgram, LpStatus};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// Minimum over basic feasible solutions, by enumeration of column subsets.
fn vertex_oracle(c: &[f64], a: &DMatrix<f64>, b: &[f64]) -> Option<f64> {
    let (m, n) = a.shape();
    let b = DVector::from_column_slice(b);
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        let cols: Vec<_> = subset.iter().map(|&j| a.column(j).into_owned()).collect();
        let basis = DMatrix::from_columns(&cols);
        if let Some(xb) = basis.clone().lu().solve(&b) {
            if (&basis * &xb - &b).amax() < 1e-9 && xb.iter().all(|&v| v >= -1e-9) {
                let obj: f64 = subset.iter().zip(xb.iter()).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(obj, |o| o.min(obj)));
            }
        }
        // next combination
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < n - m + i {
                subset[i] += 1;
                for k in i + 1..m {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn problem() -> impl Strategy<Value = (Vec<f64>, DMatrix<f64>, Vec<f64>)> {
    (1usize..=3, 3usize..=6).prop_flat_map(|(m, extra)| {
        let n = m + extra;
        (
            prop::collection::vec(0.1f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, m * n),
            prop::collection::vec(0.0f64..1.5, n),
        )
            .prop_map(move |(c, a, x0)| {
                let a = DMatrix::from_row_slice(m, n, &a);
                let b = (&a * DVector::from_vec(x0)).iter().copied().collect();
                (c, a, b)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimum_matches_vertex_enumeration((c, a, b) in problem()) {
        let lp = LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap();
        let sol = solve(&lp, TOL).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let x = DVector::from_vec(sol.x.clone());
        prop_assert!((&a * &x - DVector::from_vec(b.clone())).amax() <= 1e-8);
        prop_assert!(x.iter().all(|&v| v >= 0.0));
        let oracle = vertex_oracle(&c, &a, &b).expect("feasible by construction");
        prop_assert!((sol.objective_value - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
            "simplex {} vs vertices {}", sol.objective_value, oracle);
    }

    #[test]
    fn positive_rows_cannot_reach_negative_rhs(n in 2usize..6, a in prop::collection::vec(0.1f64..1.0, 6), b in -3.0f64..-0.1) {
        let row = DMatrix::from_row_slice(1, n, &a[..n]);
        let lp = LinearProgram::new(vec![1.0; n], row, vec![b]).unwrap();
        prop_assert_eq!(solve(&lp, TOL).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn bounded_box_optimum(ub in prop::collection::vec(0.1f64..3.0, 3), c in prop::collection::vec(-2.0f64..2.0, 3)) {
        // a single slack-free row that never binds: x0 + x1 + x2 + s = sum(ub) + 1
        let a = DMatrix::from_row_slice(1, 4, &[1.0, 1.0, 1.0, 1.0]);
        let rhs = ub.iter().sum::<f64>() + 1.0;
        let mut obj = c.clone();
        obj.push(0.0);
        let bounds: Vec<Option<f64>> = ub.iter().map(|&u| Some(u)).chain([None]).collect();
        let lp = LinearProgram::new(obj, a, vec![rhs]).unwrap().with_upper_bounds(bounds).unwrap();
        let sol = solve(&lp, TOL).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let expect: f64 = c.iter().zip(&ub).map(|(ci, u)| ci.min(0.0) * u).sum();
        prop_assert!((sol.objective_value - expect).abs() <= 1e-9);
        for (x, u) in sol.x.iter().zip(&ub) {
            prop_assert!(*x >= 0.0 && *x <= *u);
        }
    }
}
