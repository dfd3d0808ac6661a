#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "msglass/model.hpp"

namespace msglass {

/// SplitMix64 finalizer. Constants are part of the reproducibility contract
/// (documented in the README) so other implementations can match streams.
std::uint64_t mix64(std::uint64_t x);

/// Seed for replica stream `index` under a master seed. Index 0 is reserved
/// by the drivers below for auxiliary draws (configurations, the shared
/// Hamiltonian); trial/restart replicas count from 1.
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index);

/// Point on the product of spheres: block s has length N_s and norm √N_s.
struct Configuration {
    std::vector<std::vector<double>> block;
};

/// Rescale every block to its sphere radius. Throws if a block is zero.
void retract(Configuration& sigma);

/// Uniform draw: per-block standard normals, then retraction.
Configuration random_configuration(const std::vector<int>& n_per_species, std::mt19937_64& rng);

/// One realization of the Gaussian Hamiltonian: i.i.d. standard normal
/// coefficients over the full ordered index set, stored as n_patterns
/// species-sorted blocks (one block per arrangement of species among the
/// |p| axis slots), plus their entrywise sum which is what contractions
/// actually consume.
struct HamiltonianSample {
    ModelSpec model;
    std::vector<int> n_per_species;
    std::uint64_t seed;
    double normalization;               ///< C with C² = (N/Π N_s^{p(s)})·Π p(s)!/|p|!
    std::size_t n_patterns;             ///< |p|!/Π p(s)!
    std::size_t block_size;             ///< Π N_s^{p(s)}
    std::vector<int> axis_species;      ///< species of each sorted axis, size |p|
    std::vector<int> axis_size;         ///< N of each sorted axis
    std::vector<double> coefficients;   ///< n_patterns·block_size normals, pattern-major
    std::vector<double> contracted;     ///< per-entry sum of the pattern blocks
};

/// Draws a Hamiltonian realization. Deterministic in (model, sizes, seed);
/// rejects realizations above the 1e8 stored-entry memory guard.
HamiltonianSample sample_hamiltonian(const ModelSpec& model,
                                     const std::vector<int>& n_per_species, std::uint64_t seed);

/// Redraws coefficients in place with a new seed (no reallocation).
void resample(HamiltonianSample& h, std::uint64_t seed);

/// H(σ) = C·Σ over ordered tuples, evaluated by sequential axis contractions.
double eval_hamiltonian(const HamiltonianSample& h, const Configuration& sigma);

/// Per-species Euclidean gradient of H at σ (C factor included).
std::vector<std::vector<double>> hamiltonian_gradient(const HamiltonianSample& h,
                                                      const Configuration& sigma);

/// R_s = (1/N_s)·⟨block_s, block'_s⟩.
OverlapVector overlap(const Configuration& a, const Configuration& b);

struct CovariancePair {
    OverlapVector r;
    double target;      ///< N·ξ(R)
    double mean;        ///< empirical mean of H(σ)H(σ′) over trials
    double std_error;
    double deviation;   ///< studentized (mean − target)/std_error
};

struct CovarianceReport {
    std::vector<CovariancePair> pairs;
    double max_abs_deviation;
    int trials;
};

/// Covariance identity check on caller-supplied configuration pairs:
/// across `trials` independent Hamiltonian draws, E[H(σ)H(σ′)] = N·ξ(R).
CovarianceReport covariance_check_pairs(
    const ModelSpec& model, const std::vector<int>& n_per_species,
    const std::vector<std::pair<Configuration, Configuration>>& pairs, int trials,
    std::uint64_t seed);

/// Same, with `pairs` independent uniform configuration pairs.
CovarianceReport covariance_check(const ModelSpec& model, const std::vector<int>& n_per_species,
                                  int trials, int pairs, std::uint64_t seed);

/// √(ν_max(MᵀM)/n) for M of shape ⌊λ_s n⌋×(n−⌊λ_s n⌋) with i.i.d. standard
/// normal entries, by power iteration to relative eigenvalue tolerance 1e-10.
double wishart_ground_state(int n_total, double lambda_s, std::uint64_t seed);

/// Best of `restarts` projected-gradient ascents of H/N over the product of
/// spheres, all on one Hamiltonian draw. Backtracking line search halving
/// from step 0.1; a restart stops when the relative energy gain drops below
/// 1e-10 or after 10^4 iterations. Heuristic lower bound for the finite-N
/// ground state.
double gradient_ascent_ground_state(const ModelSpec& model,
                                    const std::vector<int>& n_per_species, int restarts,
                                    std::uint64_t seed);

struct SmallBetaEstimate {
    double value;
    double std_error;  ///< delta-method error of value from the sample mean
};

/// (1/N)·log of the sample mean of exp(βH(σ_i)) over uniform σ_i, one
/// Hamiltonian draw. Sensible only deep inside the sub-critical phase
/// (β well below β_c), where it smoke-tests F(β) = ½β²ξ(1).
SmallBetaEstimate small_beta_free_energy(const ModelSpec& model,
                                         const std::vector<int>& n_per_species, double beta,
                                         std::int64_t samples, std::uint64_t seed);

/// Split a total size N into per-species blocks: ⌊λ_s N⌋ plus one leftover
/// unit to each of the first (N − Σ⌊λ_s N⌋) species.
std::vector<int> species_sizes(const ModelSpec& model, int n_total);

} // namespace msglass
