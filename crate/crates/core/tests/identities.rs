use buhmann::kernels::{buhmann_eval, h_convolution, h_quadrature, wendland_eval, wendland_table_form};
use buhmann::operators::{montee, montee_k};
use buhmann::specfn::{beta_fn, gamma_fn};
use buhmann::{BuhmannParams, DiffParams, RadialKernel};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn phi(delta: f64, mu: f64, nu: f64, alpha: f64, x: f64) -> f64 {
    buhmann_eval(&BuhmannParams::new(delta, mu, nu, alpha).unwrap(), x).unwrap()
}

const XS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[test]
fn buhmann_h_chain() {
    // φ_{1,μ+1,ν,2ν} = (μ/2ν) φ_{1,μ,ν+1,2ν+1} = (μ/2ν) h_{μ,ν+1}
    for mu in [0.5, 1.0, 2.5, 4.0] {
        for nu in [0.5, 1.0, 1.7, 3.0, 4.0] {
            for x in XS {
                let a = phi(1.0, mu + 1.0, nu, 2.0 * nu, x);
                let b = mu / (2.0 * nu) * phi(1.0, mu, nu + 1.0, 2.0 * nu + 1.0, x);
                let c = mu / (2.0 * nu) * h_quadrature(mu, nu + 1.0, x).unwrap().value;
                assert!(rel(a, b) < 1e-7, "mu={mu} nu={nu} x={x}: {a} vs {b}");
                assert!(rel(a, c) < 1e-7, "mu={mu} nu={nu} x={x}: {a} vs {c}");
            }
        }
    }
}

#[test]
fn buhmann_chain_ends_at_wendland() {
    // φ_{1,μ+1,ν,2ν} = 2^{ν−1} Γ(ν) ψ_{μ,ν} for integer ν; ψ from the closed
    // forms for ν ≤ 2 and from the iterated Montée of the Askey function above.
    for mu in [0.5, 1.0, 2.5, 4.0] {
        for nu in 1..=4u32 {
            let nf = nu as f64;
            let montee = montee_k(&RadialKernel::askey(mu).unwrap(), nu).unwrap();
            for x in XS {
                let a = phi(1.0, mu + 1.0, nf, 2.0 * nf, x);
                let psi = if nu <= 2 {
                    wendland_eval(mu, nu, x).unwrap()
                } else {
                    montee.eval(x).unwrap()
                };
                let d = 2f64.powi(nu as i32 - 1) * gamma_fn(nf).unwrap() * psi;
                assert!(rel(a, d) < 1e-7, "mu={mu} nu={nu} x={x}: {a} vs {d}");
            }
        }
    }
}

#[test]
fn index_shift_identity() {
    // 2ν φ_{δ,μ+1,ν,2ν} = δμ φ_{δ,μ,ν+1,2ν+δ}
    for delta in [0.5, 1.0, 2.0, 3.0] {
        for mu in [0.7, 1.5, 3.0] {
            for nu in [0.6, 1.0, 2.5] {
                for x in [0.0, 0.15, 0.5, 0.85] {
                    let a = 2.0 * nu * phi(delta, mu + 1.0, nu, 2.0 * nu, x);
                    let b = delta * mu * phi(delta, mu, nu + 1.0, 2.0 * nu + delta, x);
                    assert!(rel(a, b) < 1e-7, "({delta},{mu},{nu}) x={x}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn trigub_wendland_identity() {
    // h_{r+k,r+1} = B(r+k, 2r+1) ψ_{r+k,r}(x)/ψ_{r+k,r}(0)
    for r in 0..=1u32 {
        for k in 1..=2u32 {
            let mu = (r + k) as f64;
            let b = beta_fn(mu, 2.0 * r as f64 + 1.0).unwrap();
            let p0 = wendland_eval(mu, r, 0.0).unwrap();
            for x in [0.0, 0.1, 0.25, 0.5, 0.75, 0.95] {
                let h = h_quadrature(mu, r as f64 + 1.0, x).unwrap().value;
                let w = b * wendland_eval(mu, r, x).unwrap() / p0;
                assert!(rel(h, w) < 1e-7, "r={r} k={k} x={x}: {h} vs {w}");
            }
        }
    }
}

#[test]
fn montee_raises_nu_and_alpha() {
    // 2ν I(φ_{δ,μ,ν,α})(t) = φ_{δ,μ,ν+1,α+2}(t)
    for delta in [1.0, 2.0] {
        for mu in [1.5, 3.0] {
            for nu in [1.0, 2.0] {
                for alpha in [1.0, 3.0] {
                    let k = RadialKernel::buhmann(BuhmannParams::new(delta, mu, nu, alpha).unwrap());
                    for t in [0.0, 0.3, 0.7] {
                        let a = 2.0 * nu * montee(&k, t).unwrap();
                        let b = phi(delta, mu, nu + 1.0, alpha + 2.0, t);
                        assert!(rel(a, b) < 1e-6, "({delta},{mu},{nu},{alpha}) t={t}: {a} vs {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn montee_derivative() {
    let kernels = [
        RadialKernel::askey(3.0).unwrap(),
        RadialKernel::h(2.5, 1.5).unwrap(),
        RadialKernel::wendland(4.0, 1).unwrap(),
    ];
    let h = 1e-5;
    for k in &kernels {
        for x in [0.2, 0.45, 0.7] {
            let d = (montee(k, x + h).unwrap() - montee(k, x - h).unwrap()) / (2.0 * h);
            let want = -x * k.eval(x).unwrap();
            assert!(rel(d, want) < 1e-5, "{:?} x={x}: {d} vs {want}", k.family());
        }
    }
}

#[test]
fn montee_of_askey_matches_tabulated_wendland() {
    let askey = RadialKernel::askey(3.0).unwrap();
    let m1 = montee_k(&askey, 1).unwrap();
    let ratio0 = m1.eval(0.0).unwrap() / wendland_table_form(3.0, 1, 0.0).unwrap();
    for x in [0.1, 0.3, 0.6, 0.9] {
        let r = m1.eval(x).unwrap() / wendland_table_form(3.0, 1, x).unwrap();
        assert!(rel(r, ratio0) < 1e-9, "x={x}");
    }
    let m2 = montee_k(&askey, 2).unwrap();
    let (a0, t0) = (m2.eval(0.0).unwrap(), wendland_table_form(3.0, 2, 0.0).unwrap());
    for x in [0.1, 0.3, 0.6, 0.9] {
        let a = m2.eval(x).unwrap() / a0;
        let t = wendland_table_form(3.0, 2, x).unwrap() / t0;
        assert!(rel(a, t) < 1e-6, "x={x}: {a} vs {t}");
    }
}

#[test]
fn difference_kernel_vanishes_beyond_larger_scale() {
    let d = DiffParams::new(4.5, 1.0, 1.0, 0.75, 1.0).unwrap();
    let k = RadialKernel::difference(d);
    assert_eq!(k.support(), 1.0);
    for x in [1.0, 1.01, 2.0, 100.0] {
        assert_eq!(k.eval(x).unwrap(), 0.0);
    }
    assert!(k.eval(0.99).unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn h_representations_agree(mu in 0.3f64..4.0, nu in 0.6f64..3.0, x in 0.0f64..0.98) {
        let a = h_quadrature(mu, nu, x).unwrap().value;
        let b = h_convolution(mu, nu, x).unwrap().value;
        prop_assert!(rel(a, b) < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn buhmann_value_at_origin(delta in 0.3f64..3.0, mu in 0.3f64..4.0, nu in 0.3f64..3.0, alpha in 0.3f64..4.0) {
        let p = BuhmannParams::new(delta, mu, nu, alpha).unwrap();
        if p.is_continuous() {
            let v = buhmann_eval(&p, 0.0).unwrap();
            prop_assert!(rel(v, p.value_at_zero().unwrap()) < 1e-8);
        }
    }

    #[test]
    fn every_family_is_compactly_supported(mu in 0.5f64..5.0, nu in 0.6f64..3.0, beta in 0.1f64..3.0, f in 1.0f64..10.0) {
        let d = DiffParams::new(mu + 0.5, nu, 2.0 * nu - 1.0, beta, 1.0).unwrap();
        let ks = [
            RadialKernel::buhmann(BuhmannParams::new(1.0, mu, nu, 1.0).unwrap()),
            RadialKernel::h(mu, nu).unwrap(),
            RadialKernel::wendland(mu, 2).unwrap(),
            RadialKernel::askey(mu).unwrap(),
            RadialKernel::difference(d),
            RadialKernel::h(mu, nu).unwrap().scaled(beta).unwrap(),
        ];
        for k in &ks {
            prop_assert_eq!(k.eval(k.support() * f).unwrap(), 0.0);
            prop_assert_eq!(k.eval(-k.support() * f).unwrap(), 0.0);
        }
    }

    #[test]
    fn kernels_are_even(mu in 0.5f64..5.0, nu in 0.6f64..3.0, x in 0.0f64..1.0) {
        let k = RadialKernel::h(mu, nu).unwrap();
        prop_assert_eq!(k.eval(x).unwrap(), k.eval(-x).unwrap());
    }
}
