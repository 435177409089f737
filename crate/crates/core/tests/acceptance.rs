//! Acceptance gate: ten named criteria, one test each, exact tolerances
//! pinned in the assertions. Every test prints a single verdict line;
//! failing tests keep their full detail in the assertion message.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;
use toricq::cli::default_z_floor;
use toricq::cohomology::{build_ring, CohClass, RingPresentation};
use toricq::fan::Fan;
use toricq::ifunction::{
    beta_coefficient, closed_form_j_pn, compose_mirror, identity_mirror_map, invert_mirror_map,
    mirror_map, small_i, vdim_graph, vdim_quasimap, IFunctionRequest, NovCap, Part,
};
use toricq::jsonio::{builtin_fan, builtin_names};
use toricq::linalg::{in_span, rank, rat};
use toricq::picard::{
    degree, enumerate_effective, is_fano, is_nef, weight_matrix, CurveClass, DivisorClass,
    WeightMatrix,
};
use toricq::series::ZSeries;

fn setup(name: &str) -> (Fan, WeightMatrix, RingPresentation) {
    let fan = builtin_fan(name).expect("builtin fan");
    let weights = weight_matrix(&fan, None);
    let ring = build_ring(&fan, &weights);
    (fan, weights, ring)
}

/// The minimal ample class of each shipped fan, so a degree bound
/// enumerates as many classes as possible.
fn ample_polarization(fan: &Fan) -> DivisorClass {
    let coords = match fan.name().expect("shipped fans are named") {
        "p1xp1" => vec![1, 1],
        "f2" => vec![3, 1],
        _ => vec![1],
    };
    DivisorClass { coords }
}

fn request<'a>(
    fan: &'a Fan,
    weights: &'a WeightMatrix,
    ring: &'a RingPresentation,
    polarization: DivisorClass,
    degree_bound: i64,
    t_trunc: u32,
) -> IFunctionRequest<'a> {
    let z_floor = default_z_floor(fan, weights, degree_bound, t_trunc);
    IFunctionRequest {
        fan,
        weights,
        ring,
        polarization,
        degree_bound,
        t_trunc,
        z_floor,
        include_exp_factor: true,
    }
}

#[test]
fn acceptance_01_pn_oracle_equality() {
    let start = Instant::now();
    let (bound, t_trunc) = (3i64, 2u32);
    for n in 1..=4usize {
        let (fan, weights, ring) = setup(&format!("p{n}"));
        let req =
            request(&fan, &weights, &ring, DivisorClass { coords: vec![1] }, bound, t_trunc);
        let got = small_i(&req).expect("pic:1 is ample on projective space");
        let want = closed_form_j_pn(n, bound, t_trunc, req.z_floor);
        assert_eq!(
            got.terms, want.terms,
            "small I and the closed-form J of P^{n} must agree exactly"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "expected < 30 s, took {elapsed:?}");
    println!(
        "criterion 01 PASS: small_I == closed-form J on P^1..P^4, bound 3, t_trunc 2, exact \
         ({elapsed:?})"
    );
}

#[test]
fn acceptance_02_f2_weight_matrix_report() {
    let out = Command::new(env!("CARGO_BIN_EXE_toricq"))
        .args(["info", "--fan", "f2", "--format", "text"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).expect("utf8");
    assert!(text.contains("A = [[1,1,2,0],[0,0,1,1]]"), "missing weight matrix line:\n{text}");
    assert!(text.contains("{rho_2, rho_3}"), "missing basis cone annotation:\n{text}");
    println!("criterion 02 PASS: info on f2 prints A = [[1,1,2,0],[0,0,1,1]] with basis cone {{rho_2, rho_3}}");
}

#[test]
fn acceptance_03_f2_self_intersection() {
    let (fan, weights, ring) = setup("f2");
    let d4 = ring.ray_class(3);
    let ring_path = ring.integrate(&ring.mul(&d4, &d4));

    // Wall path: the curve dual to rho_4 is the wall whose ridge is
    // ray 4; its class pairs with the D_4 divisor class.
    let walls = fan.walls();
    let wall = walls.iter().find(|w| w.face == vec![3]).expect("rho_4 wall");
    let beta = toricq::picard::wall_curve_class(&weights, wall);
    let wall_path = degree(&beta, &weights.ray_divisor_class(3));

    assert_eq!(ring_path, rat(-2), "cohomology path");
    assert_eq!(wall_path, -2, "wall curve path");
    assert_eq!(ring_path, rat(wall_path), "the two paths must agree exactly");
    println!("criterion 03 PASS: int D_4^2 = -2 on f2 via ring and wall paths, exact agreement");
}

#[test]
fn acceptance_04_f2_positivity_verdicts() {
    let (fan, weights, _) = setup("f2");
    assert!(!is_fano(&fan, &weights), "f2 must not be Fano");
    let nef_flags: Vec<bool> = (0..fan.n_rays())
        .map(|rho| is_nef(&fan, &weights, &weights.ray_divisor_class(rho)))
        .collect();
    println!(
        "criterion 04 detail: is_fano=false agrees; computed nef flags per ray divisor = \
         {nef_flags:?} (D_4 pairs to -2 with its own wall curve)"
    );
    assert_eq!(
        nef_flags,
        vec![true; 4],
        "criterion as stated requires all four f2 ray divisors nef; the computed verdicts \
         disagree because D_4 is the -2 curve itself"
    );
    println!("criterion 04 PASS: is_fano=false and all four ray divisors nef");
}

#[test]
fn acceptance_05_virtual_dimension_formulas() {
    let (p2, a2, _) = setup("p2");
    let line = CurveClass { f: vec![1] };
    assert_eq!(vdim_quasimap(&p2, &a2, 0, 3, &line), 5);
    let (p1, a1, _) = setup("p1");
    assert_eq!(vdim_graph(&p1, &a1, 0, &CurveClass { f: vec![1] }), 3);

    // Independent re-implementation: int_beta c1 as the sum of ray
    // degrees rather than the pairing with the anticanonical class.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_acce);
    let names = builtin_names();
    for _ in 0..20 {
        let name = names[rng.gen_range(0..names.len())];
        let (fan, weights, _) = setup(name);
        let g = rng.gen_range(0..=2i64);
        let k = rng.gen_range(0..=5i64);
        let beta =
            CurveClass { f: (0..weights.rank()).map(|_| rng.gen_range(-3..=3i64)).collect() };
        let c1: i64 = weights.ray_degrees(&beta).iter().sum();
        let n = fan.dim() as i64;
        assert_eq!(vdim_quasimap(&fan, &weights, g, k, &beta), (1 - g) * (n - 3) + k + c1);
        assert_eq!(vdim_graph(&fan, &weights, k, &beta), n + k + c1);
    }
    println!(
        "criterion 05 PASS: vdim_quasimap(p2,g=0,k=3,d=1)=5, vdim_graph(p1,k=0,d=1)=3, and 20 \
         randomized cases match an independent formula path exactly"
    );
}

/// Membership of every graded component of `class` in the ideal
/// generated by the given ray divisor classes, checked degree by degree
/// by linear algebra over the basis-monomial coordinates.
fn lies_in_ray_ideal(ring: &RingPresentation, class: &CohClass, rays: &[usize]) -> bool {
    for d in 0..class.coeffs.len() {
        let row = &class.coeffs[d];
        if row.iter().all(num_traits::Zero::is_zero) {
            continue;
        }
        let mut span: Vec<Vec<toricq::linalg::Rat>> = Vec::new();
        if d >= 1 {
            for &rho in rays {
                let gen = ring.ray_class(rho);
                for i in 0..ring.basis_monomials(d - 1).len() {
                    let mut mono = ring.zero();
                    mono.coeffs[d - 1][i] = rat(1);
                    span.push(ring.mul(&gen, &mono).coeffs[d].clone());
                }
            }
        }
        if !in_span(&span, row) {
            return false;
        }
    }
    true
}

#[test]
fn acceptance_06_negative_degree_support() {
    let (fan, weights, ring) = setup("f2");
    let pol = ample_polarization(&fan);
    let req = request(&fan, &weights, &ring, pol.clone(), 3, 0);
    let betas = enumerate_effective(&fan, &weights, &pol, 3).expect("ample");
    let mut checked = 0usize;
    for beta in &betas {
        let degrees = weights.ray_degrees(beta);
        let negative: Vec<usize> =
            (0..fan.n_rays()).filter(|&rho| degrees[rho] < 0).collect();
        if negative.is_empty() {
            continue;
        }
        checked += 1;
        let coeff = beta_coefficient(&req, beta);
        for (_, class) in coeff.terms() {
            assert!(
                lies_in_ray_ideal(&ring, class, &negative),
                "beta {:?}: a coefficient term lies outside the ideal of D_rho, rho in {:?}",
                beta.f,
                negative
            );
        }
    }
    assert!(checked >= 3, "expected several negative-direction classes at bound 3");
    println!(
        "criterion 06 PASS: all {checked} effective f2 classes (bound 3) with some d_rho < 0 \
         have coefficients inside the corresponding divisor ideal, exact linear algebra"
    );
}

/// First term violating div_deg - z_exp == c1, as (z, divisor degree).
fn stated_grading_violation(series: &ZSeries, c1: i64) -> Option<(i64, usize)> {
    for ((z, _), class) in series.terms() {
        for (d, row) in class.coeffs.iter().enumerate() {
            if row.iter().any(|c| !num_traits::Zero::is_zero(c)) && (d as i64) - z != c1 {
                return Some((*z, d));
            }
        }
    }
    None
}

/// Fan name, curve class, its c1 degree, and the violating (z, divisor
/// degree) pair.
type GradingViolation = (String, Vec<i64>, i64, (i64, usize));

/// Every term satisfies div_deg + z_exp == -c1.
fn homogeneous_grading_holds(series: &ZSeries, c1: i64) -> bool {
    series.terms().all(|((z, _), class)| {
        class.coeffs.iter().enumerate().all(|(d, row)| {
            row.iter().all(num_traits::Zero::is_zero) || (d as i64) + z == -c1
        })
    })
}

#[test]
fn acceptance_07_grading_property() {
    let mut violations: Vec<GradingViolation> = Vec::new();
    let mut checked = 0usize;
    for name in builtin_names() {
        let (fan, weights, ring) = setup(name);
        let pol = ample_polarization(&fan);
        let req = request(&fan, &weights, &ring, pol.clone(), 3, 0);
        let c1_class = weights.anticanonical();
        for beta in enumerate_effective(&fan, &weights, &pol, 3).expect("ample") {
            let coeff = beta_coefficient(&req, &beta);
            let c1 = degree(&beta, &c1_class);
            checked += 1;
            assert!(
                homogeneous_grading_holds(&coeff, c1),
                "homogeneity (div_deg + z == -c1) must hold for every term"
            );
            if let Some(v) = stated_grading_violation(&coeff, c1) {
                violations.push((name.to_string(), beta.f.clone(), c1, v));
            }
        }
    }
    println!(
        "criterion 07 detail: {checked} classes checked across all shipped fans; every \
         coefficient is exactly homogeneous with div_deg + z_exp = -int_beta c1; the stated \
         form div_deg - z_exp = +int_beta c1 holds only for leading terms and fails on \
         {} classes (first: fan {} beta {:?} with c1 {} at z {} divisor degree {})",
        violations.len(),
        violations.first().map(|v| v.0.as_str()).unwrap_or("-"),
        violations.first().map(|v| v.1.clone()).unwrap_or_default(),
        violations.first().map(|v| v.2).unwrap_or_default(),
        violations.first().map(|v| v.3 .0).unwrap_or_default(),
        violations.first().map(|v| v.3 .1).unwrap_or_default(),
    );
    assert!(
        violations.is_empty(),
        "criterion as stated requires div_deg - z_exp = int_beta c1 for every term of every \
         coefficient; {} of {checked} enumerated classes have subleading terms violating it \
         (the product formula makes coefficients homogeneous of degree -int_beta c1 instead)",
        violations.len()
    );
    println!("criterion 07 PASS: stated grading identity holds for all enumerated classes");
}

#[test]
fn acceptance_08_ring_sanity_suite() {
    let start = Instant::now();
    for name in ["p1", "p2", "p3", "p1xp1", "f2"] {
        let (fan, _, ring) = setup(name);
        let n = fan.dim();
        let betti = ring.betti();
        assert_eq!(
            betti.iter().sum::<usize>(),
            fan.max_cones().len(),
            "{name}: sum of Betti numbers must equal the number of maximal cones"
        );

        for d in 0..=n {
            assert_eq!(betti[d], betti[n - d], "{name}: Poincare symmetry in degree {d}");
            let rows: Vec<Vec<toricq::linalg::Rat>> = (0..betti[d])
                .map(|i| {
                    let mut a = ring.zero();
                    a.coeffs[d][i] = rat(1);
                    (0..betti[n - d])
                        .map(|j| {
                            let mut b = ring.zero();
                            b.coeffs[n - d][j] = rat(1);
                            ring.pairing(&a, &b)
                        })
                        .collect()
                })
                .collect();
            assert_eq!(
                rank(&rows),
                betti[d],
                "{name}: Poincare pairing degenerate in degree {d}"
            );
        }

        let point_classes: Vec<CohClass> = fan
            .max_cones()
            .iter()
            .map(|cone| {
                let mut c = ring.one();
                for &rho in cone {
                    c = ring.mul(&c, &ring.ray_class(rho));
                }
                c
            })
            .collect();
        for c in &point_classes {
            assert_eq!(c, &point_classes[0], "{name}: point classes differ between cones");
            assert_eq!(ring.integrate(c), rat(1), "{name}: point class must integrate to 1");
        }

        for rho in 0..fan.n_rays() {
            let x = ring.ray_class(rho);
            let mut p = ring.one();
            for _ in 0..=n {
                p = ring.mul(&p, &x);
            }
            assert!(p.is_zero(), "{name}: ray class {} must be nilpotent", rho + 1);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 5, "expected < 5 s, took {elapsed:?}");
    println!(
        "criterion 08 PASS: pairing nondegenerate, point classes consistent, sum Betti = \
         #cones, ray classes nilpotent on p1, p2, p3, p1xp1, f2 ({elapsed:?})"
    );
}

#[test]
fn acceptance_09_mirror_map_identity_and_round_trip() {
    for n in 1..=3usize {
        let (fan, weights, ring) = setup(&format!("p{n}"));
        let req = request(&fan, &weights, &ring, DivisorClass { coords: vec![1] }, 3, 1);
        let series = small_i(&req).expect("ample");
        let tau = mirror_map(&series, &ring).expect("small corrections on projective space");
        assert_eq!(
            tau,
            identity_mirror_map(1, 1),
            "mirror map of P^{n} must be exactly t at bound 3"
        );
    }

    let (fan, weights, ring) = setup("f2");
    let pol = DivisorClass { coords: vec![3, 1] };
    let req = request(&fan, &weights, &ring, pol.clone(), 3, 2);
    let series = small_i(&req).expect("ample");
    let tau = mirror_map(&series, &ring).expect("f2 corrections are small");
    let cap = NovCap { polarization: pol, degree_bound: 3 };
    let inv = invert_mirror_map(&tau, &cap).expect("invertible");
    assert_ne!(tau, identity_mirror_map(2, 2), "f2 mirror map is nontrivial");
    assert_eq!(
        compose_mirror(&inv, &tau, &cap),
        identity_mirror_map(2, 2),
        "round trip invert(mirror_map) after mirror_map must be the identity to order 3"
    );
    println!(
        "criterion 09 PASS: mirror map is exactly t on P^1..P^3 (bound 3); f2 round-trip \
         inversion is the identity through Novikov order 3"
    );
}

#[test]
fn acceptance_10_determinism() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_toricq"))
            .args(["ifun", "--fan", "p2"])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        out.stdout
    };
    let first = run();
    let second = run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "consecutive ifun runs must be byte-identical");
    println!("criterion 10 PASS: two consecutive `toricq ifun --fan p2` runs are byte-identical");
}

#[test]
fn acceptance_suite_uses_part_tags_consistently() {
    // Guard: the two CLI-selectable parts keep their wire names.
    assert_eq!(Part::SmallI.as_str(), "small_I");
    assert_eq!(Part::BigIK0.as_str(), "big_I_k0");
}
