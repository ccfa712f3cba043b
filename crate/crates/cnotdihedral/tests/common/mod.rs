//! Seeded random circuit generation shared by the integration tests.

use cnotdihedral::{Circuit, Gate, Mode};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn distinct_qubits<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut wires: Vec<usize> = (0..n).collect();
    wires.shuffle(rng);
    wires.truncate(k);
    wires
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize, mode: Mode) -> Gate {
    let mut kinds: Vec<u8> = vec![2]; // T always fits (n >= 1)
    if mode == Mode::Dihedral {
        kinds.push(0); // omega
        kinds.push(1); // X
    }
    if n >= 2 {
        kinds.extend([3, 4, 5]); // CNOT, SWAP, U
    }
    if n >= 3 {
        kinds.push(6); // V
    }
    match *kinds.choose(rng).unwrap() {
        0 => Gate::omega(rng.gen_range(1..8)),
        1 => Gate::X(rng.gen_range(0..n)),
        2 => Gate::T(rng.gen_range(0..n)),
        3 => {
            let q = distinct_qubits(rng, n, 2);
            Gate::cnot(q[0], q[1])
        }
        4 => {
            let q = distinct_qubits(rng, n, 2);
            Gate::swap(q[0], q[1])
        }
        5 => {
            let q = distinct_qubits(rng, n, 2);
            Gate::u(q[0], q[1])
        }
        _ => {
            let q = distinct_qubits(rng, n, 3);
            Gate::v(q[0], q[1], q[2])
        }
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize, mode: Mode) -> Circuit {
    let gates = (0..len).map(|_| random_gate(rng, n, mode)).collect();
    Circuit::new(n, gates)
}
