use spectral_dynamics::harmonics::{operator_eigs, DEFAULT_SERIES_TOL};
use spectral_dynamics::kernels::{empirical_kernel_matrix, gram_matrices, kernel_value};
use spectral_dynamics::relu_net::init_network;
use spectral_dynamics::spectral::{
    alignment_csv, concentration_check, eigenspace_alignment, spectral_coeffs, sym_eig, tail_energy,
};
use spectral_dynamics::sphere_data::{
    build_dataset, make_polynomial_target, sample_uniform_sphere,
};

#[test]
fn concentration_edge_cases() {
    let f = sample_uniform_sphere(1, 10, 2).unwrap();
    let k = empirical_kernel_matrix(&f, true).unwrap();
    let spec = sym_eig(&k.entries, false).unwrap();
    assert_eq!(spec.eigenvalues, vec![kernel_value(1.0, true).unwrap()]);

    let ops = operator_eigs(10, 0, DEFAULT_SERIES_TOL).unwrap();
    assert!(concentration_check(&spec, &ops, 1, 0.05).is_ok());
    assert!(concentration_check(&spec, &ops, 1, 1.5).is_err());

    let f = sample_uniform_sphere(5, 10, 2).unwrap();
    let spec = sym_eig(&empirical_kernel_matrix(&f, true).unwrap().entries, false).unwrap();
    // Degree 0 alone expands to a single value.
    assert!(concentration_check(&spec, &ops, 5, 0.05).is_err());
}

#[test]
fn gram_spectrum_concentrates_around_kernel_in_width() {
    let (n, d, m, delta) = (100, 10, 1000, 0.05);
    let f = sample_uniform_sphere(n, d, 4).unwrap();
    let k = sym_eig(&empirical_kernel_matrix(&f, false).unwrap().entries, false).unwrap();
    let radius = ((2.0 * (n * n) as f64 / delta).ln() / (2.0 * m as f64)).sqrt();
    for seed in 1..=5 {
        let net = init_network(m, d, 1.0, false, 100 + seed).unwrap();
        let h = sym_eig(&gram_matrices(&net, &net, &f).unwrap().h(), false).unwrap();
        let sup = h
            .eigenvalues
            .iter()
            .zip(&k.eigenvalues)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(sup <= radius, "seed {seed}: {sup} > {radius}");
    }
}

#[test]
fn alignment_and_tail_energy_at_moderate_n() {
    let (n, d, delta) = (500, 10, 0.05);
    let f = sample_uniform_sphere(n, d, 8).unwrap();
    let k = empirical_kernel_matrix(&f, true).unwrap();
    let spec = sym_eig(&k.entries, true).unwrap();
    let ops = operator_eigs(d, 3, DEFAULT_SERIES_TOL).unwrap();

    let rows = eigenspace_alignment(&spec, &f, &ops, 1, delta).unwrap();
    assert!(rows.iter().all(|r| r.alignment >= -1e-8));
    let r1 = &rows[1];
    assert_eq!(r1.m_ell, 11);
    assert!(
        r1.alignment <= r1.ceiling,
        "{} > {}",
        r1.alignment,
        r1.ceiling
    );
    assert_eq!(alignment_csv(&rows).rows.len(), 2);

    let data = build_dataset(&make_polynomial_target(1, d, 8).unwrap(), &f).unwrap();
    let coeffs = spectral_coeffs(&spec, &data.responses).unwrap();
    let tail0 = tail_energy(&coeffs, r1.m_ell, 1.0, 0).unwrap();
    assert!(tail0 <= 0.05, "tail energy {tail0}");
    let mut prev = tail0;
    for t in 1..20 {
        let cur = tail_energy(&coeffs, r1.m_ell, 1.0, t).unwrap();
        assert!(cur <= prev + 1e-15);
        prev = cur;
    }
}

#[test]
fn alignment_single_point_is_zero() {
    let f = sample_uniform_sphere(1, 10, 3).unwrap();
    let spec = sym_eig(&empirical_kernel_matrix(&f, true).unwrap().entries, true).unwrap();
    let ops = operator_eigs(10, 2, DEFAULT_SERIES_TOL).unwrap();
    let rows = eigenspace_alignment(&spec, &f, &ops, 0, 0.05).unwrap();
    assert_eq!(rows[0].alignment, 0.0);
}
