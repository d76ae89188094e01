use diraclab_core::family::{chern_from_frames, chern_number, qwz_chiral_family, qwz_hermitian_family, direct_sum, CMatrix};
use diraclab_core::spectrum::make_flat_torus;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Dirac operator of the square torus truncated to Fourier modes
/// `|kᵢ| ≤ k_max`, as one dense Hermitian matrix on `S⁺ ⊕ S⁻`.
fn fourier_dirac(delta: [f64; 2], k_max: i64) -> (CMatrix, usize) {
    let ks: Vec<(f64, f64)> = (-k_max..=k_max)
        .flat_map(|a| (-k_max..=k_max).map(move |b| (a as f64 + delta[0], b as f64 + delta[1])))
        .collect();
    let n = ks.len();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for (j, &(p1, p2)) in ks.iter().enumerate() {
        h[(n + j, j)] = Complex64::new(p1, p2);
        h[(j, n + j)] = Complex64::new(p1, -p2);
    }
    (h, n)
}

#[test]
fn flat_torus_matches_fourier_diagonalisation() {
    let cutoff = 4.4;
    for delta in [[0.0, 0.0], [0.5, 0.5], [0.5, 0.0]] {
        let spec = make_flat_torus(2.0 * PI, 2.0 * PI, delta, cutoff).unwrap();
        let (h, n) = fourier_dirac(delta, 6);
        let eig = SymmetricEigen::new(h);
        let mut positive: Vec<f64> =
            eig.eigenvalues.iter().copied().filter(|&e| e > 1e-9 && e <= cutoff).collect();
        positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut kp = 0;
        let mut km = 0;
        for (k, e) in eig.eigenvalues.iter().enumerate() {
            if e.abs() <= 1e-9 {
                let v = eig.eigenvectors.column(k);
                let plus: f64 = (0..n).map(|i| v[i].norm_sqr()).sum();
                if plus > 0.5 {
                    kp += 1;
                } else {
                    km += 1;
                }
            }
        }
        assert_eq!((kp, km), (spec.ker_plus(), spec.ker_minus()), "δ = {delta:?}");
        let expanded: Vec<f64> = spec
            .modes()
            .iter()
            .flat_map(|m| std::iter::repeat(m.lambda).take(m.multiplicity as usize))
            .collect();
        assert_eq!(expanded.len(), positive.len(), "δ = {delta:?}");
        for (a, b) in expanded.iter().zip(&positive) {
            assert!((a - b).abs() < 1e-12, "δ = {delta:?}: {a} vs {b}");
        }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng, k: usize) -> CMatrix {
    let m = DMatrix::from_fn(k, k, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

#[test]
fn chern_number_is_gauge_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let chiral = qwz_chiral_family(24, 1.0).unwrap();
    let sum = direct_sum(&chiral, &qwz_hermitian_family(24, 1.0).unwrap()).unwrap();
    for family in [&chiral, &sum] {
        let bundle = family.kernel_bundles().0;
        let reference = chern_number(bundle).unwrap();
        for _ in 0..3 {
            let frames: Vec<CMatrix> = bundle
                .frames()
                .into_iter()
                .map(|f| {
                    let u = random_unitary(&mut rng, f.ncols());
                    f * u
                })
                .collect();
            assert_eq!(chern_from_frames(bundle.grid(), &frames).unwrap(), reference);
        }
    }
}
