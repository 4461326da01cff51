#![allow(dead_code)]

use opo_cv::linalg::{congruence4, mul4, Mat4};
use opo_cv::CovarianceMatrix;
use opo_cv::{Mode, ModeBasis, PassiveTransform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_passive(rng: &mut impl Rng) -> PassiveTransform {
    let mut angle = || rng.gen_range(0.0..std::f64::consts::TAU);
    PassiveTransform::Composite(vec![
        PassiveTransform::PhaseShift {
            mode: Mode::A,
            angle: angle(),
        },
        PassiveTransform::PolarizationRotation(angle()),
        PassiveTransform::QuarterWave(angle()),
        PassiveTransform::PhaseShift {
            mode: Mode::B,
            angle: angle(),
        },
        PassiveTransform::HalfWave(angle()),
    ])
}

fn local_squeezer(ra: f64, rb: f64) -> Mat4<f64> {
    let mut m = [[0.0; 4]; 4];
    m[0][0] = (-ra).exp();
    m[1][1] = ra.exp();
    m[2][2] = (-rb).exp();
    m[3][3] = rb.exp();
    m
}

fn two_mode_squeezer(r: f64) -> Mat4<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    [
        [c, 0.0, s, 0.0],
        [0.0, c, 0.0, -s],
        [s, 0.0, c, 0.0],
        [0.0, -s, 0.0, c],
    ]
}

/// `S diag(ν₁,ν₁,ν₂,ν₂) Sᵀ` with `S` a product of random passive, local and
/// two-mode squeezing maps; symplectic spectrum `(ν₁, ν₂)` by construction.
pub fn random_physical_state(rng: &mut impl Rng) -> (CovarianceMatrix, (f64, f64)) {
    let n1: f64 = rng.gen_range(1.0..2.5);
    let n2: f64 = rng.gen_range(1.0..2.5);
    let pre = random_passive(rng).symplectic_matrix();
    let sq = local_squeezer(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let tms = two_mode_squeezer(rng.gen_range(-1.2..1.2));
    let post = random_passive(rng).symplectic_matrix();
    let s = mul4(&post, &mul4(&tms, &mul4(&sq, &pre)));
    let d = [
        [n1, 0.0, 0.0, 0.0],
        [0.0, n1, 0.0, 0.0],
        [0.0, 0.0, n2, 0.0],
        [0.0, 0.0, 0.0, n2],
    ];
    let basis = if rng.gen_bool(0.5) {
        ModeBasis::SignalIdler
    } else {
        ModeBasis::PlusMinus
    };
    let g = CovarianceMatrix::new(congruence4(&s, &d), basis).unwrap();
    (g, (n1.min(n2), n1.max(n2)))
}

/// Physical standard-form state `[[a,0,c₁,0],[0,a,0,c₂],[c₁,0,b,0],[0,c₂,0,b]]`
/// (symmetric when `symmetric`), by rejection.
pub fn random_standard_form(rng: &mut impl Rng, symmetric: bool) -> CovarianceMatrix {
    loop {
        let a: f64 = rng.gen_range(1.0..6.0);
        let b: f64 = if symmetric {
            a
        } else {
            rng.gen_range(1.0..6.0)
        };
        let lim = (a * b).sqrt();
        // Half the draws hug the physical boundary, where EPR correlations live.
        let reach = if rng.gen_bool(0.5) {
            1.0
        } else {
            rng.gen_range(0.9..1.0)
        };
        let c1 = rng.gen_range(-lim..lim) * reach;
        let c2 = if reach < 1.0 {
            -c1.signum() * rng.gen_range(0.8..1.0) * lim
        } else {
            rng.gen_range(-lim..lim)
        };
        let g = CovarianceMatrix::new(
            [
                [a, 0.0, c1, 0.0],
                [0.0, a, 0.0, c2],
                [c1, 0.0, b, 0.0],
                [0.0, c2, 0.0, b],
            ],
            ModeBasis::SignalIdler,
        )
        .unwrap();
        if g.is_physical_within(1e-9).physical {
            return g;
        }
    }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Mean and standard error of a statistic evaluated on equal batches.
pub fn batch_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
