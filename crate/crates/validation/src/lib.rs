//! Published reference values for the 15-vertex CK instance (`r = g = 3`,
//! `w_A = 1`, uniform `J = 2`), frozen as data. The acceptance suite in
//! `tests/acceptance.rs` recomputes them.

/// Minimum gap of the unscaled Hamiltonian as `w_B` varies.
#[derive(Debug, Clone, Copy)]
pub struct GapRow {
    /// `w_B` as an exact decimal string.
    pub w_b: &'static str,
    pub s_star: f64,
    pub g_min: f64,
}

pub const GAP_VS_WEIGHT: [GapRow; 10] = [
    GapRow { w_b: "1.0", s_star: 0.2368, g_min: 5.23e-1 },
    GapRow { w_b: "1.1", s_star: 0.2517, g_min: 4.12e-1 },
    GapRow { w_b: "1.2", s_star: 0.2708, g_min: 2.90e-1 },
    GapRow { w_b: "1.3", s_star: 0.2964, g_min: 1.68e-1 },
    GapRow { w_b: "1.4", s_star: 0.3323, g_min: 7.14e-2 },
    GapRow { w_b: "1.5", s_star: 0.3805, g_min: 2.04e-2 },
    GapRow { w_b: "1.6", s_star: 0.4422, g_min: 3.63e-3 },
    GapRow { w_b: "1.7", s_star: 0.5217, g_min: 3.39e-4 },
    GapRow { w_b: "1.8", s_star: 0.6276, g_min: 1.04e-5 },
    GapRow { w_b: "1.9", s_star: 0.7758, g_min: 4.14e-8 },
];

/// Running-time ingredients of the scaled family `H_k` at `w_B = 1.8`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow {
    pub k: i64,
    pub s_star: f64,
    pub g_min: f64,
    pub mat_at_s_star: f64,
    pub max_mat: f64,
    pub max_norm: f64,
    pub art2: f64,
    pub art1: f64,
    pub s_prime: f64,
    pub g_at_s_prime: f64,
    pub mat_at_s_prime: f64,
    pub ratio_at_s_prime: f64,
    pub art3: f64,
}

macro_rules! row {
    ($k:expr, $ss:expr, $g:expr, $ms:expr, $mm:expr, $nm:expr, $a2:expr, $a1:expr;
     $sp:expr, $gp:expr, $mp:expr, $rp:expr, $a3:expr) => {
        ScalingRow {
            k: $k,
            s_star: $ss,
            g_min: $g,
            mat_at_s_star: $ms,
            max_mat: $mm,
            max_norm: $nm,
            art2: $a2,
            art1: $a1,
            s_prime: $sp,
            g_at_s_prime: $gp,
            mat_at_s_prime: $mp,
            ratio_at_s_prime: $rp,
            art3: $a3,
        }
    };
}

pub const SCALING: [ScalingRow; 10] = [
    row!(1, 0.62763727, 1.04e-5, 4.02, 4.02, 2.26e2, 8.34e12, 8.34e12;
         0.62763727, 1.04e-5, 4.02, 3.70e10, 8.34e12),
    row!(2, 0.54578285, 6.37e-3, 2.04, 1.69, 2.48e2, 1.24e7, 1.03e7;
         0.54578226, 6.37e-3, 2.04, 5.02e4, 1.24e7),
    row!(3, 0.54467568, 3.30e-2, 1.41, 1.01, 2.55e2, 3.32e5, 2.37e5;
         0.54461081, 3.30e-2, 1.41, 1.30e3, 3.32e5),
    row!(4, 0.55610853, 6.83e-2, 1.18, 1.18, 2.59e2, 6.57e4, 6.58e4;
         0.55545411, 6.83e-2, 1.18, 2.54e2, 6.57e4),
    row!(5, 0.57419149, 9.67e-2, 1.06, 1.07, 2.61e2, 2.96e4, 2.99e4;
         0.57223394, 9.68e-2, 1.07, 1.14e2, 2.97e4),
    row!(10, 0.66773072, 1.45e-1, 7.48e-1, 7.92e-1, 2.66e2, 9.45e3, 1.00e4;
         0.65682886, 1.46e-1, 7.75e-1, 3.64e1, 9.66e3),
    row!(20, 0.80170240, 1.30e-1, 4.72e-1, 5.68e-1, 2.68e2, 7.48e3, 9.01e3;
         0.77115481, 1.33e-1, 5.41e-1, 3.08e1, 8.24e3),
    row!(30, 0.99318624, 7.97e-2, 8.95e-9, 4.26e-1, 2.69e2, 3.78e-4, 1.80e4;
         0.83962780, 1.08e-1, 4.43e-1, 3.82e1, 1.02e4),
    row!(40, 0.99642154, 5.99e-2, 4.90e-10, 4.35e-1, 2.69e2, 3.67e-5, 3.26e4;
         0.88050519, 8.82e-2, 3.93e-1, 5.05e1, 1.36e4),
    row!(50, 0.99779592, 4.79e-2, 5.30e-11, 4.41e-1, 2.69e2, 6.20e-6, 5.16e4;
         0.90581875, 7.39e-2, 3.63e-1, 6.64e1, 1.79e4),
];

/// Clause counts `B_i` of the 7-set exact-cover example; its unique exact
/// cover is sets `{1, 5, 7}` (1-based), of total size 5.
pub const EXAMPLE_CLAUSE_COUNTS: [i64; 7] = [3, 3, 3, 2, 1, 2, 1];
pub const EXAMPLE_COVER: [usize; 3] = [0, 4, 6];
pub const EXAMPLE_COVER_WEIGHT: i64 = 5;
