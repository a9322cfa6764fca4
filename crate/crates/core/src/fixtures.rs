//! Small hand-checked instances used by tests, docs and the CLI smoke tests.

use crate::instance::Instance;

fn from_tables(tables: &[&[[f64; 2]]], rent: f64) -> Instance {
    let m = tables.len();
    Instance::from_fn(m, 2, rent, |i, j, r| tables[i][j][r]).expect("fixture is valid")
}

/// Three tenants, two rooms. Greedy picks `{0,1}` in room 1 (16) and then
/// `{2}` in room 0 (6), welfare 22, which is also the optimum.
pub fn three_tenants_two_rooms() -> Instance {
    from_tables(
        &[
            &[[10.0, 5.0], [9.0, 8.0], [2.0, 2.0]],
            &[[6.0, 8.0], [3.0, 14.0], [2.0, 5.0]],
            &[[4.0, 2.0], [5.0, 1.0], [6.0, 6.0]],
        ],
        0.0,
    )
}

/// Four tenants, two rooms. The optimum is `{0,1}` in room 1 plus `{2,3}`
/// in room 0 (14 + 10 = 24); greedy starts with `{1,2}` in room 0 (15) and
/// is forced into `{0,3}` in room 1 (2).
pub fn four_tenants_two_rooms() -> Instance {
    from_tables(
        &[
            &[[10.0, 5.0], [8.0, 8.0], [2.0, 2.0], [1.0, 1.0]],
            &[[6.0, 6.0], [3.0, 8.0], [7.0, 5.0], [7.0, 6.0]],
            &[[4.0, 2.0], [8.0, 1.0], [6.0, 6.0], [6.0, 5.0]],
            &[[1.0, 1.0], [7.0, 6.0], [4.0, 3.0], [8.0, 9.0]],
        ],
        0.0,
    )
}

/// Four tenants, two rooms, room-independent roommate values, zero rent.
/// Welfare is maximized by pairs `{0,3}` and `{1,2}`, and no tenant shares
/// make that assignment envy-free.
pub fn envy_counterexample() -> Instance {
    const V: [[f64; 4]; 4] = [
        [0.0, 12.0, 2.0, 8.0],
        [3.0, 0.0, 6.0, 6.0],
        [2.0, 6.0, 0.0, 11.0],
        [8.0, 8.0, 1.0, 0.0],
    ];
    Instance::from_fn(4, 2, 0.0, |i, j, _| V[i][j]).expect("fixture is valid")
}
