use super::{QuboBuilder, QuboMatrix};

/// Converts the Ising energy `E(s) = −Σ w_ij s_i s_j − Σ h_i s_i` into a QUBO
/// over `b = (s + 1) / 2`, so that both energies agree on every configuration.
///
/// `couplings` is summed term by term: pass both `(i, j)` and `(j, i)` to
/// reproduce a double sum over a symmetric matrix. Diagonal entries add the
/// constant `−w_ii` because `s_i² = 1`.
pub fn ising_to_qubo(couplings: &[(usize, usize, f64)], fields: &[f64]) -> QuboMatrix {
    let dimension = couplings
        .iter()
        .map(|&(i, j, _)| i.max(j) + 1)
        .max()
        .unwrap_or(0)
        .max(fields.len());
    let mut q = QuboBuilder::new(dimension);
    for &(i, j, w) in couplings {
        if i == j {
            q.add_constant(-w);
            continue;
        }
        // s_i s_j = 4 b_i b_j − 2 b_i − 2 b_j + 1
        q.add(i, j, -4.0 * w);
        q.add(i, i, 2.0 * w);
        q.add(j, j, 2.0 * w);
        q.add_constant(-w);
    }
    for (i, &h) in fields.iter().enumerate() {
        q.add(i, i, -2.0 * h);
        q.add_constant(h);
    }
    q.finish()
}

/// Ising energy of a spin vector (`true` = +1).
pub fn ising_energy(couplings: &[(usize, usize, f64)], fields: &[f64], spins: &[bool]) -> f64 {
    let s = |i: usize| if spins[i] { 1.0 } else { -1.0 };
    -couplings.iter().map(|&(i, j, w)| w * s(i) * s(j)).sum::<f64>()
        - fields.iter().enumerate().map(|(i, &h)| h * s(i)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Hamiltonian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_model() {
        let q = ising_to_qubo(&[], &[]);
        assert_eq!(q.term_count(), 0);
        assert_eq!(q.constant(), 0.0);
    }

    #[test]
    fn single_field() {
        let q = ising_to_qubo(&[], &[1.0]);
        assert_eq!(q.terms(), &[(0, 0, -2.0)]);
        assert_eq!(q.constant(), 1.0);
        assert_eq!(q.energy(&[true]), -1.0);
        assert_eq!(q.energy(&[false]), 1.0);
    }

    #[test]
    fn two_spin_coupling_all_states() {
        let j = [(0, 1, 1.0)];
        let q = ising_to_qubo(&j, &[]);
        // E = −s0 s1: aligned −1, anti-aligned +1.
        for (spins, want) in [
            ([false, false], -1.0),
            ([false, true], 1.0),
            ([true, false], 1.0),
            ([true, true], -1.0),
        ] {
            assert_eq!(q.energy(&spins), want);
            assert_eq!(ising_energy(&j, &[], &spins), want);
        }
    }

    #[test]
    fn exhaustive_round_trip_up_to_twelve_spins() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 3, 7, 12] {
            let mut j = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen::<f64>() < 0.5 {
                        let w = rng.gen_range(-2.0..2.0);
                        j.push((a, b, w));
                        j.push((b, a, w));
                    }
                }
            }
            let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = ising_to_qubo(&j, &h);
            for mask in 0u32..(1 << n) {
                let spins: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let diff = q.energy(&spins) - ising_energy(&j, &h, &spins);
                assert!(diff.abs() < 1e-12, "n={n} mask={mask} diff={diff}");
            }
        }
    }
}
