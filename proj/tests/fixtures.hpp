#pragma once

#include <random>

#include "schottky/variational.hpp"

namespace fixtures {

using schottky::Complex;

// Fixed points +1 (attracting) and -1, disks of the Apollonian family.
inline schottky::SchottkyGroup genus1(double mu = 0.04) {
    const schottky::FixedPointForm f{1.0, -1.0, mu};
    return {{f}, {schottky::apollonian_disks(f.attracting, f.repelling, f.multiplier)}};
}

// Real-centred genus-2 group.
inline schottky::SchottkyGroup genus2() {
    const schottky::FixedPointForm f1{1.0, -1.0, 0.02};
    const schottky::FixedPointForm f2{6.0, 4.0, 0.03};
    return {{f1, f2},
            {schottky::apollonian_disks(f1.attracting, f1.repelling, f1.multiplier),
             schottky::apollonian_disks(f2.attracting, f2.repelling, f2.multiplier)}};
}

inline Complex random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return {n(rng), n(rng)};
}

inline schottky::Matrix2 random_matrix(std::mt19937_64& rng) {
    return {random_complex(rng), random_complex(rng), random_complex(rng), random_complex(rng)};
}

// dS_l = X_l S_l with Gaussian X_l: a random tangent direction measured
// relative to the group.
inline schottky::PerturbationDirection random_direction(const schottky::SchottkyGroup& g, std::mt19937_64& rng) {
    schottky::PerturbationDirection d;
    for (int l = 0; l < g.genus(); ++l) d.deltas.push_back(random_matrix(rng) * g.generator(l).matrix());
    return d;
}

}  // namespace fixtures
