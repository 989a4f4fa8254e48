mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomode::analytic::{evolved_state_analytic, mode_rotation, transformed_hamiltonian_check};
use twomode::numeric::{build_block, diagonalize_block, evolve, SpectrumCache};
use twomode::tridiag::eigh_tridiagonal;
use twomode::{coherent_product, CoherentPair, ModelParams, C64};

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(0.0..2.0),
    )
    .unwrap()
}

#[test]
fn block_matches_ladder_operator_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = random_params(&mut rng);
        for n in 0..7 {
            let dense = build_block(&p, n).to_dense();
            let oracle = block_from_operators(&p, n);
            for (r1, r2) in dense.iter().zip(&oracle) {
                for (x, y) in r1.iter().zip(r2) {
                    assert!((x - y).abs() < 1e-12, "n={n}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn tridiagonal_eigenvalues_match_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dim in [1usize, 2, 3, 7, 20, 41] {
        let d: Vec<f64> = (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let e: Vec<f64> = (0..dim.saturating_sub(1)).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut dense = vec![vec![0.0; dim]; dim];
        for k in 0..dim {
            dense[k][k] = d[k];
            if k + 1 < dim {
                dense[k][k + 1] = e[k];
                dense[k + 1][k] = e[k];
            }
        }
        let ours = eigh_tridiagonal(&d, &e).unwrap();
        let oracle = jacobi_eigenvalues(dense);
        for (a, b) in ours.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "dim={dim}: {a} vs {b}");
        }
    }
}

#[test]
fn block_spectrum_matches_jacobi() {
    let p = ModelParams::new(0.3, -0.2, 0.7, 0.4, 0.1, 1.3).unwrap();
    for n in [5usize, 16, 30] {
        let spec = diagonalize_block(&build_block(&p, n)).unwrap();
        let oracle = jacobi_eigenvalues(build_block(&p, n).to_dense());
        let scale = oracle.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in spec.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-11 * scale);
        }
    }
}

#[test]
fn evolution_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let cache = SpectrumCache::new();
    for _ in 0..4 {
        let p = random_params(&mut rng);
        let pair = CoherentPair::new(
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
        .unwrap();
        let s0 = coherent_product(&pair, 1e-10).unwrap();
        let t = rng.gen_range(0.0..3.0);
        let st = evolve(&s0, &p, t, &cache).unwrap();
        for n in 0..=s0.n_max() {
            let oracle = propagate_dense(&build_block(&p, n).to_dense(), s0.block(n), t);
            for (a, b) in st.block(n).iter().zip(&oracle) {
                assert!((a - b).norm() < 1e-11, "block {n}");
            }
        }
    }
}

#[test]
fn closed_form_matches_matrix_exponential() {
    let p = ModelParams::new(0.4, 0.1, 0.6, 0.6, 0.6, 0.9).unwrap();
    let pair = CoherentPair::new(C64::new(1.0, 0.3), C64::new(-0.2, 0.8)).unwrap();
    let s0 = coherent_product(&pair, 1e-13).unwrap();
    for t in [0.2, 1.7, 4.1] {
        let analytic = evolved_state_analytic(&pair, &p, t, 1e-13).unwrap();
        for n in 0..=s0.n_max() {
            let oracle = propagate_dense(&build_block(&p, n).to_dense(), s0.block(n), t);
            for (a, b) in analytic.block(n).iter().zip(&oracle) {
                assert!((a - b).norm() < 1e-11, "t={t} block {n}");
            }
        }
    }
}

#[test]
fn mode_rotation_matches_exponential_of_generator() {
    for n in 0..=8usize {
        let theta = 0.37 + 0.1 * n as f64;
        let dim = n + 1;
        // K = a†b − ab† on the block, |n − k, k⟩ ordering
        let mut k = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for j in 0..n {
            let h = (((n - j) * (j + 1)) as f64).sqrt();
            k[j][j + 1] = C64::new(theta * h, 0.0);
            k[j + 1][j] = C64::new(-theta * h, 0.0);
        }
        let oracle = expm(&k);
        let ours = mode_rotation(n, theta).unwrap();
        for r in 0..dim {
            for c in 0..dim {
                assert!((ours[r * dim + c] - oracle[r][c].re).abs() < 1e-12);
                assert!(oracle[r][c].im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn rotated_hamiltonian_is_diagonal_via_oracle() {
    // conjugation done entirely with the exponential oracle
    let p = ModelParams::new(0.7, 0.2, 0.5, 0.3, 0.4, 1.1).unwrap();
    for n in 0..=8usize {
        let dim = n + 1;
        let w1 = 0.5 * (p.omega_a - p.omega_b + (p.u_aa - p.u_bb) * (n as f64 - 1.0));
        let l1 = p.lambda.hypot(w1);
        let theta = 0.5 * (w1 / l1).acos();
        let mut k = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for j in 0..n {
            let h = (((n - j) * (j + 1)) as f64).sqrt();
            k[j][j + 1] = C64::new(theta * h, 0.0);
            k[j + 1][j] = C64::new(-theta * h, 0.0);
        }
        let v = expm(&k);
        let vt: Dense = (0..dim).map(|r| (0..dim).map(|c| v[c][r]).collect()).collect();
        let h: Dense = build_block(&p, n)
            .to_dense()
            .iter()
            .map(|r| r.iter().map(|x| C64::new(*x, 0.0)).collect())
            .collect();
        let d = matmul(&vt, &matmul(&h, &v));
        let w0 = 0.5 * (p.omega_a + p.omega_b - 2.0 * p.u_ab);
        let nf = n as f64;
        for r in 0..dim {
            for c in 0..dim {
                let target = if r == c { w0 * nf + p.u_ab * nf * nf + l1 * (nf - 2.0 * r as f64) } else { 0.0 };
                assert!((d[r][c] - target).norm() < 1e-10, "n={n} ({r},{c})");
            }
        }
        assert!(transformed_hamiltonian_check(&p, n).unwrap() < 1e-10);
    }
}
