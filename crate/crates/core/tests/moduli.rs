use cstk::liealg::GroupId;
use cstk::moduli::{find_flat, relator_gradient, relator_gradient_fd, FlatSearchOptions, SurfaceGroupRep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn success_count(genus: usize, seeds: u64) -> (usize, usize) {
    let mut ok = 0;
    let mut max_iters = 0;
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 * genus as u64 + s);
        let seed = SurfaceGroupRep::random(genus, GroupId::SU(2), &mut rng).unwrap();
        if let Ok(r) = find_flat(&seed, &FlatSearchOptions::default()) {
            ok += 1;
            max_iters = max_iters.max(r.iterations);
        }
    }
    (ok, max_iters)
}

#[test]
fn genus_one_search_success_rate() {
    let (ok, it) = success_count(1, 100);
    eprintln!("genus 1: {ok}/100, max iterations {it}");
    assert!(ok >= 95);
}

#[test]
fn genus_two_search_success_rate() {
    let (ok, it) = success_count(2, 100);
    eprintln!("genus 2: {ok}/100, max iterations {it}");
    assert!(ok >= 90);
}

#[test]
fn analytic_gradient_agrees_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..20 {
        let rho = SurfaceGroupRep::random(1 + i % 2, GroupId::SU(2), &mut rng).unwrap();
        let g = relator_gradient(&rho);
        let fd = relator_gradient_fd(&rho, 1e-6).unwrap();
        let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(num / den < 1e-5, "relative error {}", num / den);
    }
}
