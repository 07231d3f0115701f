//! Published voter matrices used as reference fixtures.
//!
//! Values are kept exactly as printed (two decimals), so some rows sum to
//! 0.98..1.02. Use the `*_renormalized` constructors wherever a proper
//! probability model is required, and the raw ones to reproduce figures
//! computed directly from the printed numbers.

use crate::model::{MatrixOptions, TransitionMatrix, VoterPopulation};

/// Worst-performing k-NN voter on a 10-class activity-recognition task.
pub const WORST_CLASSIFIER: [[f64; 10]; 10] = [
    [0.33, 0.03, 0.06, 0.30, 0.18, 0.01, 0.00, 0.00, 0.04, 0.06],
    [0.04, 0.87, 0.00, 0.03, 0.03, 0.00, 0.00, 0.00, 0.00, 0.02],
    [0.07, 0.00, 0.56, 0.18, 0.01, 0.16, 0.00, 0.00, 0.01, 0.00],
    [0.07, 0.00, 0.10, 0.67, 0.04, 0.03, 0.00, 0.00, 0.05, 0.04],
    [0.16, 0.03, 0.07, 0.24, 0.36, 0.01, 0.00, 0.00, 0.08, 0.05],
    [0.02, 0.00, 0.11, 0.03, 0.02, 0.82, 0.00, 0.00, 0.00, 0.00],
    [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.99, 0.01, 0.00, 0.00],
    [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.06, 0.94, 0.00, 0.00],
    [0.03, 0.00, 0.01, 0.05, 0.03, 0.00, 0.00, 0.00, 0.81, 0.05],
    [0.07, 0.00, 0.04, 0.11, 0.02, 0.01, 0.00, 0.00, 0.13, 0.60],
];

/// Four voter groups (2-NN/3-NN, thigh/back sensors), row = true class.
pub const FOUR_GROUPS: [[[f64; 10]; 10]; 4] = [
    [
        [0.44, 0.04, 0.04, 0.16, 0.23, 0.01, 0.00, 0.00, 0.03, 0.05],
        [0.05, 0.80, 0.00, 0.02, 0.09, 0.00, 0.00, 0.00, 0.00, 0.04],
        [0.10, 0.00, 0.41, 0.07, 0.04, 0.22, 0.10, 0.00, 0.04, 0.01],
        [0.15, 0.01, 0.07, 0.41, 0.13, 0.03, 0.02, 0.00, 0.15, 0.05],
        [0.22, 0.06, 0.06, 0.13, 0.46, 0.01, 0.00, 0.00, 0.03, 0.03],
        [0.02, 0.00, 0.15, 0.01, 0.00, 0.48, 0.31, 0.00, 0.01, 0.01],
        [0.01, 0.00, 0.08, 0.01, 0.00, 0.27, 0.59, 0.00, 0.02, 0.01],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.99, 0.00, 0.00],
        [0.05, 0.00, 0.06, 0.16, 0.04, 0.03, 0.03, 0.00, 0.50, 0.13],
        [0.06, 0.02, 0.01, 0.06, 0.05, 0.00, 0.01, 0.00, 0.11, 0.67],
    ],
    [
        [0.24, 0.08, 0.08, 0.15, 0.19, 0.01, 0.00, 0.00, 0.10, 0.15],
        [0.10, 0.61, 0.01, 0.06, 0.10, 0.00, 0.00, 0.00, 0.05, 0.06],
        [0.14, 0.00, 0.38, 0.15, 0.08, 0.17, 0.00, 0.00, 0.03, 0.06],
        [0.13, 0.01, 0.15, 0.30, 0.12, 0.05, 0.00, 0.00, 0.07, 0.17],
        [0.17, 0.06, 0.08, 0.14, 0.26, 0.01, 0.00, 0.00, 0.13, 0.15],
        [0.02, 0.00, 0.19, 0.02, 0.01, 0.75, 0.00, 0.00, 0.01, 0.01],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.01, 0.85, 0.14, 0.00, 0.00],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.14, 0.86, 0.00, 0.00],
        [0.07, 0.02, 0.04, 0.08, 0.10, 0.01, 0.01, 0.00, 0.51, 0.15],
        [0.13, 0.04, 0.06, 0.17, 0.15, 0.01, 0.00, 0.00, 0.12, 0.32],
    ],
    [
        [0.46, 0.04, 0.03, 0.15, 0.23, 0.01, 0.00, 0.00, 0.03, 0.06],
        [0.04, 0.81, 0.00, 0.01, 0.08, 0.00, 0.00, 0.01, 0.00, 0.04],
        [0.08, 0.00, 0.44, 0.06, 0.04, 0.24, 0.10, 0.00, 0.04, 0.01],
        [0.14, 0.01, 0.07, 0.42, 0.13, 0.02, 0.02, 0.00, 0.16, 0.04],
        [0.21, 0.05, 0.05, 0.12, 0.49, 0.01, 0.00, 0.00, 0.03, 0.03],
        [0.01, 0.00, 0.13, 0.01, 0.00, 0.51, 0.31, 0.00, 0.01, 0.00],
        [0.01, 0.00, 0.08, 0.01, 0.00, 0.27, 0.59, 0.00, 0.02, 0.01],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.99, 0.00, 0.00],
        [0.04, 0.00, 0.06, 0.14, 0.03, 0.03, 0.04, 0.00, 0.56, 0.11],
        [0.06, 0.02, 0.01, 0.06, 0.05, 0.00, 0.01, 0.00, 0.12, 0.68],
    ],
    [
        [0.24, 0.07, 0.08, 0.14, 0.19, 0.01, 0.00, 0.00, 0.10, 0.16],
        [0.09, 0.64, 0.01, 0.04, 0.10, 0.00, 0.00, 0.00, 0.05, 0.06],
        [0.12, 0.00, 0.41, 0.13, 0.07, 0.17, 0.00, 0.00, 0.03, 0.06],
        [0.12, 0.01, 0.15, 0.30, 0.11, 0.06, 0.00, 0.00, 0.06, 0.17],
        [0.16, 0.06, 0.07, 0.14, 0.26, 0.01, 0.00, 0.00, 0.13, 0.16],
        [0.01, 0.00, 0.14, 0.01, 0.00, 0.82, 0.00, 0.00, 0.00, 0.01],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.88, 0.12, 0.00, 0.00],
        [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.19, 0.81, 0.00, 0.00],
        [0.06, 0.02, 0.04, 0.08, 0.10, 0.01, 0.01, 0.01, 0.53, 0.15],
        [0.12, 0.04, 0.06, 0.17, 0.14, 0.01, 0.00, 0.00, 0.12, 0.35],
    ],
];

fn rows_of(grid: &[[f64; 10]; 10]) -> Vec<Vec<f64>> {
    grid.iter().map(|r| r.to_vec()).collect()
}

fn as_printed() -> MatrixOptions {
    MatrixOptions {
        renormalize: false,
        tolerance: crate::model::RENORMALIZE_TOLERANCE,
    }
}

pub fn worst_classifier_renormalized() -> TransitionMatrix {
    TransitionMatrix::from_rows(&rows_of(&WORST_CLASSIFIER), &MatrixOptions::renormalizing())
        .expect("fixture rows are within tolerance")
}

pub fn worst_classifier_raw() -> TransitionMatrix {
    TransitionMatrix::from_rows(&rows_of(&WORST_CLASSIFIER), &as_printed())
        .expect("fixture rows are within tolerance")
}

fn four_groups(opts: &MatrixOptions) -> VoterPopulation {
    let specs = FOUR_GROUPS
        .iter()
        .map(|g| {
            let m = TransitionMatrix::from_rows(&rows_of(g), opts)
                .expect("fixture rows are within tolerance");
            (0.25, m)
        })
        .collect();
    VoterPopulation::new(specs).expect("equal proportions sum to one")
}

/// Equal-proportion four-group population with the printed entries.
pub fn four_groups_raw() -> VoterPopulation {
    four_groups(&as_printed())
}

/// Equal-proportion four-group population with every row renormalized.
pub fn four_groups_renormalized() -> VoterPopulation {
    four_groups(&MatrixOptions::renormalizing())
}
