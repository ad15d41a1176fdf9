//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use k3orb::cyclotomic::inverse_cosine_gap_sum;
use k3orb::lattice::{LatticeVector, PicLattice};
use k3orb::mukai::{compare_reduced, HilbertPoly, K3Surface, MukaiVector};
use k3orb::orbifold::{
    cyclic_fixed_data, cyclic_fixed_data_balanced, moduli_dimension, orb_euler,
    orb_mukai_cyclic_character, orb_mukai_free_point, orb_mukai_structure_sheaf, orb_pairing,
    solve_fixed_points, solved_cyclic_counts, validate_identity, GroupFixedData, OrbMukaiVector,
};
use k3orb::scalar::{int, ratio, render_rational};
use k3orb::stability::{
    central_charge, check_charge_params, check_main_theorem, is_stability_value, skyscraper,
    ChargeParams, Conclusion, NonEmptiness,
};
use k3orb::{CycNum, Rational};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const TABLE: [(u64, i64); 7] = [(2, 8), (3, 6), (4, 4), (5, 4), (6, 2), (7, 3), (8, 2)];

fn nikulin_surface() -> K3Surface {
    K3Surface::rank_one(2).unwrap()
}

/// Nikulin data plus uniform and balanced cyclic data built from solved counts.
fn datasets() -> Result<Vec<(String, GroupFixedData)>, String> {
    let mut out = vec![
        ("trivial".to_string(), GroupFixedData::trivial()),
        ("nikulin".to_string(), GroupFixedData::nikulin()),
    ];
    for n in 2..=8 {
        let counts = solved_cyclic_counts(n).map_err(|e| format!("Z/{n}: {e}"))?;
        let uniform = cyclic_fixed_data(n, &counts).map_err(|e| format!("Z/{n}: {e}"))?;
        let balanced = cyclic_fixed_data_balanced(n, &counts).map_err(|e| format!("Z/{n}: {e}"))?;
        out.push((format!("Z/{n}"), uniform));
        out.push((format!("Z/{n} balanced"), balanced));
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut got = Vec::new();
    for (n, f) in TABLE {
        let sol = solve_fixed_points(n).map_err(|e| e.to_string())?;
        ensure!(
            sol.value == int(f),
            "n = {n}: got {}, expected {f}",
            render_rational(&sol.value)
        );
        ensure!(sol.integral, "n = {n}: not flagged integral");
        got.push(render_rational(&sol.value));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("f_2..f_8 = {} in {elapsed:.1?}", got.join(", ")))
}

fn criterion_2() -> Outcome {
    let sets = datasets()?;
    for (name, data) in &sets {
        let v = validate_identity(data).map_err(|e| format!("{name}: {e}"))?;
        ensure!(v.is_one(), "{name}: identity = {}", render_rational(&v));
    }
    Ok(format!("identity = 1 on {} datasets", sets.len()))
}

/// `sum_k 1/(1 - cos(2 pi k/n))` via `1 - cos t = 2 sin^2(t/2)`, accumulated
/// in f64 and rounded to the nearest multiple of 1/6.
fn float_gap_sum_sixths(n: u64) -> i64 {
    let s: f64 = (1..n)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / n as f64;
            1.0 / (2.0 * t.sin().powi(2))
        })
        .sum();
    (6.0 * s).round() as i64
}

fn criterion_3() -> Outcome {
    for n in 2..=12u64 {
        let exact = inverse_cosine_gap_sum::<Rational>(n)
            .to_scalar()
            .map_err(|e| format!("n = {n}: {e}"))?;
        let target = ratio((n * n - 1) as i64, 6);
        ensure!(
            exact == target,
            "n = {n}: {} != {}",
            render_rational(&exact),
            render_rational(&target)
        );
        ensure!(
            int(float_gap_sum_sixths(n)) == target.clone() * int(6),
            "n = {n}: float cross-check disagrees"
        );
    }
    Ok("sum = (n^2-1)/6 for n = 2..12".into())
}

fn criterion_4() -> Outcome {
    let x = nikulin_surface();
    let sets = datasets()?;
    for (name, data) in &sets {
        let o = orb_mukai_structure_sheaf(data, 1);
        let chi = orb_euler(&o, &o, data, &x).map_err(|e| format!("{name}: {e}"))?;
        ensure!(chi == 2, "{name}: chi(O, O) = {chi}");
    }
    Ok(format!("chi(O, O) = 2 on {} datasets", sets.len()))
}

fn criterion_5() -> Outcome {
    let x = nikulin_surface();
    let sets = datasets()?;
    for (name, data) in &sets {
        let p = orb_mukai_free_point(data, 1);
        let dim = moduli_dimension(&p, data, &x).map_err(|e| format!("{name}: {e}"))?;
        ensure!(dim == 2, "{name}: dim = {dim}");
    }
    Ok(format!("dim M(O_p) = 2 on {} datasets", sets.len()))
}

/// chi(O, F(mH)) from Chern data: rank r, c1 + m r h, ch2 + m c1.h + m^2 r h^2/2,
/// plugged into chi = ch2 + 2 r.
fn hrr_oracle(x: &K3Surface, v: &MukaiVector, m: i64) -> Rational {
    let d = x.picard().inner(&v.c1, x.ample()).unwrap();
    let h2 = x.degree_of_polarization();
    let ch2 = int(v.s - v.r);
    let twisted_ch2 = ch2 + int(m * d) + ratio(m * m * v.r * h2, 2);
    twisted_ch2 + int(2 * v.r)
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let surfaces = [
        K3Surface::rank_one(2).unwrap(),
        K3Surface::rank_one(4).unwrap(),
        K3Surface::new(PicLattice::hyperbolic(), LatticeVector(vec![1, 1])).unwrap(),
    ];
    let mut checks = 0;
    for i in 0..200 {
        let x = &surfaces[i % surfaces.len()];
        let c1: Vec<i64> = (0..x.picard_rank())
            .map(|_| rng.gen_range(-10..=10))
            .collect();
        let v = MukaiVector::new(rng.gen_range(-10..=10), c1, rng.gen_range(-10..=10));
        let poly = x.hilbert_polynomial(&v).map_err(|e| e.to_string())?;
        for m in -5..=5 {
            let twisted = x
                .twist(&v, &x.ample().scaled(m))
                .map_err(|e| e.to_string())?;
            let chi = x
                .euler_pairing(&MukaiVector::structure_sheaf(x.picard_rank()), &twisted)
                .map_err(|e| e.to_string())?;
            let p = poly.eval(&int(m));
            ensure!(
                p == int(chi),
                "v = {v}, m = {m}: P = {}, chi = {chi}",
                render_rational(&p)
            );
            ensure!(
                p == hrr_oracle(x, &v, m),
                "v = {v}, m = {m}: oracle disagrees"
            );
            checks += 1;
        }
    }
    Ok(format!("{checks} exact checks over 200 vectors"))
}

fn criterion_7() -> Outcome {
    let x = nikulin_surface();
    let mut pairs = 0;
    for n in 2..=8u64 {
        let counts = solved_cyclic_counts(n).map_err(|e| e.to_string())?;
        let data = cyclic_fixed_data_balanced(n, &counts).map_err(|e| format!("Z/{n}: {e}"))?;
        let mut classes: Vec<(String, OrbMukaiVector)> = (0..n as i64)
            .map(|j| {
                orb_mukai_cyclic_character(&data, 1, n, j)
                    .map(|a| (format!("O(x)rho_{j}"), a))
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        classes.push(("O_p".into(), orb_mukai_free_point(&data, 1)));
        for (na, a) in &classes {
            for (nb, b) in &classes {
                let chi = orb_euler(a, b, &data, &x)
                    .map_err(|e| format!("Z/{n}: chi({na}, {nb}): {e}"))?;
                if na == nb {
                    ensure!(chi % 2 == 0, "Z/{n}: <{na}^2> = {chi} is odd");
                }
                pairs += 1;
            }
        }
    }

    let nik = GroupFixedData::nikulin();
    let o = orb_mukai_structure_sheaf(&nik, 1);
    let sign = orb_mukai_cyclic_character(&nik, 1, 2, 1).map_err(|e| e.to_string())?;
    let chi = orb_euler(&o, &sign, &nik, &x).map_err(|e| e.to_string())?;
    ensure!(chi == 0, "nikulin: chi(O, O(x)sign) = {chi}");
    let self_pair = orb_pairing(&sign, &sign, &nik, &x).map_err(|e| e.to_string())?;
    ensure!(
        self_pair == CycNum::from_int(2),
        "nikulin: <O(x)sign^2> != 2"
    );
    Ok(format!(
        "{pairs} integral pairings on balanced Z/2..Z/8 data; Nikulin chi(O, O(x)sign) = 0, <O(x)sign^2> = 2"
    ))
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=6))
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let surfaces = [
        K3Surface::rank_one(2).unwrap(),
        K3Surface::rank_one(4).unwrap(),
        K3Surface::new(PicLattice::hyperbolic(), LatticeVector(vec![1, 1])).unwrap(),
    ];
    let mut valid = 0;
    while valid < 50 {
        let x = &surfaces[valid % surfaces.len()];
        let rank = x.picard_rank();
        let beta: Vec<Rational> = (0..rank).map(|_| random_rational(rng, 12)).collect();
        let t = ratio(rng.gen_range(7..=40), rng.gen_range(1..=6));
        let omega: Vec<Rational> = x
            .ample()
            .to_scalars::<Rational>()
            .iter()
            .map(|c| c * &t)
            .collect();
        let params = ChargeParams::new(beta, omega, true);
        if !check_charge_params(&params, x) {
            continue;
        }
        valid += 1;
        let z = central_charge(&params, &skyscraper(x, 1), x).map_err(|e| e.to_string())?;
        ensure!(z.re == -Rational::one() && z.im.is_zero(), "Z(O_x) = {z}");
        let mut random_v = || {
            let c1: Vec<i64> = (0..rank).map(|_| rng.gen_range(-8..=8)).collect();
            MukaiVector::new(rng.gen_range(-8..=8), c1, rng.gen_range(-8..=8))
        };
        let (v, w) = (random_v(), random_v());
        let zv = central_charge(&params, &v, x).map_err(|e| e.to_string())?;
        let zw = central_charge(&params, &w, x).map_err(|e| e.to_string())?;
        let zvw = central_charge(&params, &v.add(&w), x).map_err(|e| e.to_string())?;
        ensure!(zvw == zv + zw, "additivity fails for {v}, {w}");
    }
    let minus_one = k3orb::GaussianRational::real(int(-1));
    let plus_one = k3orb::GaussianRational::real(int(1));
    ensure!(is_stability_value(&minus_one), "-1 rejected");
    ensure!(!is_stability_value(&plus_one), "+1 accepted");
    let x = nikulin_surface();
    let deg2 = ChargeParams::along_ample(&x, Rational::zero(), int(1), true);
    let deg8 = ChargeParams::along_ample(&x, Rational::zero(), int(2), true);
    ensure!(!check_charge_params(&deg2, &x), "deg(omega^2) = 2 accepted");
    ensure!(check_charge_params(&deg8, &x), "deg(omega^2) = 8 rejected");
    Ok("50 random valid parameter sets; region and validity checks".into())
}

/// Sign of `p - q` at `z = 1 + (sum |num|)(sum den)` over the difference of
/// the monic reductions; no real root of the difference exceeds this bound.
fn evaluation_order(p: &HilbertPoly, q: &HilbertPoly) -> std::cmp::Ordering {
    let (p, q) = (p.reduced().unwrap(), q.reduced().unwrap());
    let diff = [&p.c2 - &q.c2, &p.c1 - &q.c1, &p.c0 - &q.c0];
    if diff.iter().all(Zero::is_zero) {
        return std::cmp::Ordering::Equal;
    }
    let nums: Rational = diff
        .iter()
        .map(|c| Rational::from(num_traits::Signed::abs(c.numer())))
        .sum();
    let dens: Rational = diff.iter().map(|c| Rational::from(c.denom().clone())).sum();
    let z = Rational::one() + nums * dens;
    ((&diff[0] * &z + &diff[1]) * &z + &diff[2]).cmp(&Rational::zero())
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Outcome {
    let mut ties = 0;
    for i in 0..500 {
        let deg = [2, 2, 1, 1, 0][i % 5];
        let mut poly = || {
            let mut c: Vec<Rational> = (0..3).map(|_| random_rational(rng, 9)).collect();
            for x in c.iter_mut().take(2 - deg) {
                *x = Rational::zero();
            }
            if c[2 - deg].is_zero() {
                c[2 - deg] = int(1);
            }
            HilbertPoly::new(c[0].clone(), c[1].clone(), c[2].clone())
        };
        let (p, q) = (poly(), poly());
        // force some ties among the lower coefficients
        let q = if i % 7 == 0 {
            HilbertPoly::new(&p.c2 * int(3), &p.c1 * int(3), q.c0.clone() * int(3))
        } else {
            q
        };
        let got = compare_reduced(&p, &q).map_err(|e| e.to_string())?;
        let want = evaluation_order(&p, &q);
        ensure!(
            got == want,
            "pair {i}: compare_reduced = {got:?}, evaluation = {want:?}"
        );
        if got.is_eq() {
            ties += 1;
        }
    }
    Ok(format!("500 pairs agree ({ties} equal)"))
}

fn criterion_10() -> Outcome {
    let x = nikulin_surface();
    let nik = GroupFixedData::nikulin();

    let r = check_main_theorem(&orb_mukai_free_point(&nik, 1), &nik, &x, true)
        .map_err(|e| e.to_string())?;
    ensure!(!r.rank_positive, "O_p: rank flagged positive");
    ensure!(
        r.conclusion == Conclusion::ConditionsNotMet,
        "O_p: {:?}",
        r.conclusion
    );
    ensure!(r.nonemptiness == NonEmptiness::Unknown, "O_p: nonemptiness");

    let r = check_main_theorem(&orb_mukai_structure_sheaf(&nik, 1), &nik, &x, true)
        .map_err(|e| e.to_string())?;
    ensure!(
        r.conclusion == Conclusion::MequalsMsIrreducibleSymplectic(0),
        "rank 1: {:?}",
        r.conclusion
    );
    ensure!(
        r.deformation_type.as_deref() == Some("Hilb^0(K3)"),
        "rank 1: label"
    );
    ensure!(
        r.nonemptiness == NonEmptiness::Unknown,
        "rank 1: nonemptiness"
    );

    let a = OrbMukaiVector::new(MukaiVector::new(2, vec![1], 1), vec![CycNum::one(); 8]);
    let chi = orb_euler(&a, &a, &nik, &x).map_err(|e| e.to_string())?;
    ensure!(chi == 2, "rank 2: chi = {chi}");
    let r = check_main_theorem(&a, &nik, &x, true).map_err(|e| e.to_string())?;
    ensure!(
        r.rank_positive && r.primitive && r.degree_positive && !r.gcd_rd_one && r.generic_asserted,
        "rank 2: flags {r:?}"
    );
    ensure!(
        r.conclusion == Conclusion::MequalsMsIrreducibleSymplectic(0) && r.dim == Some(0),
        "rank 2: {:?}",
        r.conclusion
    );
    ensure!(
        r.nonemptiness == NonEmptiness::Unknown,
        "rank 2: nonemptiness"
    );
    Ok("rank-0 rejected; rank-1 dim 0 Hilb^0; rank-2 dim 0 Hilb^0".into())
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_015);
    let results: Vec<(&str, Outcome)> = vec![
        ("fixed-point counts for orders 2..8", criterion_1()),
        ("consistency identity", criterion_2()),
        ("trigonometric identity", criterion_3()),
        ("structure-sheaf pairing", criterion_4()),
        ("free-point moduli dimension", criterion_5()),
        ("HRR cross-check", criterion_6(&mut rng)),
        ("parity and integrality", criterion_7()),
        ("central-charge laws", criterion_8(&mut rng)),
        ("polynomial-comparison oracle", criterion_9(&mut rng)),
        ("hypothesis checker", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
