#pragma once

#include "cmms/dataset.hpp"

#include <cstdint>

namespace cmms::synthetic {

struct DomainPair {
    Dataset source;
    Dataset target;
};

/// Gaussian classes on a regular polygon in a low-dimensional latent plane,
/// embedded into ambient_dim dimensions by a random orthonormal map with
/// small isotropic noise. The target is drawn from the same classes and
/// translated by `shift` (in units of the class spread) along a fixed random
/// latent direction.
struct GaussianTask {
    int classes = 3;
    int source_per_class = 60;
    int target_per_class = 60;
    int latent_dim = 2;
    int ambient_dim = 30;
    double class_radius = 4.0;
    double spread = 1.0;
    double shift = 1.0;
    double noise = 0.05;
};

DomainPair shifted_gaussians(std::uint64_t seed, const GaussianTask& task = {});

/// Two interleaved half-moons embedded in ambient_dim dimensions; the target
/// is translated and slightly rotated in the latent plane.
struct MoonsTask {
    int source_per_class = 100;
    int target_per_class = 100;
    int ambient_dim = 10;
    double latent_noise = 0.1;
    double ambient_noise = 0.05;
    double shift = 0.5;
    double rotation = 0.3;  // radians
};

DomainPair half_moons(std::uint64_t seed, const MoonsTask& task = {});

/// Randomly sized problem for invariant sweeps: n_s, n_t in [30, 120],
/// m in [10, 60], C in [2, 5], with a random class layout and target shift.
DomainPair random_instance(std::uint64_t seed);

/// Same latent classes observed through different feature maps: source with
/// source_dim features, target with target_dim features.
DomainPair heterogeneous_gaussians(std::uint64_t seed, int source_dim = 20, int target_dim = 35,
                                   int classes = 3, int per_class = 40);

}  // namespace cmms::synthetic
