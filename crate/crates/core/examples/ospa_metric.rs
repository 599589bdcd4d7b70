//! The OSPA distance between two small point sets, with the optimal
//! assignment it is built on.

use msmember::metrics::{hungarian, ospa_positions, OspaParams};

fn main() -> msmember::Result<()> {
    let truth: [[f64; 2]; 3] = [[0.0, 0.0], [100.0, 0.0], [0.0, 250.0]];
    let estimate: [[f64; 2]; 2] = [[3.0, -4.0], [96.0, 3.0]];

    let n = truth.len();
    let c = 100.0;
    // square cost matrix, missing estimates padded at the cutoff
    let mut cost = vec![c; n * n];
    for (i, t) in truth.iter().enumerate() {
        for (j, e) in estimate.iter().enumerate() {
            cost[i * n + j] = ((t[0] - e[0]).powi(2) + (t[1] - e[1]).powi(2)).sqrt().min(c);
        }
    }
    for (i, j) in hungarian(&cost, n).into_iter().enumerate() {
        match estimate.get(j) {
            Some(e) => println!("truth {:?} <- estimate {:?} ({:.2} m)", truth[i], e, cost[i * n + j]),
            None => println!("truth {:?} unmatched (penalty {c})", truth[i]),
        }
    }
    for p in [1.0, 2.0] {
        let params = OspaParams::new(c, p)?;
        println!("OSPA c={c} p={p}: {:.3}", ospa_positions(&truth, &estimate, &params));
    }
    Ok(())
}
