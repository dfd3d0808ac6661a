#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "msglass/mcverify.hpp"
#include "msglass/model.hpp"

using namespace msglass;

namespace {

const ModelSpec bip({0.5, 0.5}, {1, 1});

double brute_force_eval(const HamiltonianSample& h, const Configuration& sigma) {
    const std::size_t axes = h.axis_size.size();
    double total = 0.0;
    std::vector<int> idx(axes, 0);
    for (std::size_t flat = 0; flat < h.block_size; ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = axes; a-- > 0;) {
            idx[a] = static_cast<int>(rem % static_cast<std::size_t>(h.axis_size[a]));
            rem /= static_cast<std::size_t>(h.axis_size[a]);
        }
        double prod = h.contracted[flat];
        for (std::size_t a = 0; a < axes; ++a) {
            prod *= sigma.block[static_cast<std::size_t>(h.axis_species[a])]
                               [static_cast<std::size_t>(idx[a])];
        }
        total += prod;
    }
    return h.normalization * total;
}

} // namespace

TEST_CASE("seed mixing is the documented finalizer") {
    CHECK(mix64(0) == 16294208416658607535ULL);
    CHECK(mix64(1) == 10451216379200822465ULL);
    CHECK(mix64(42) == 13679457532755275413ULL);

    CHECK(replica_seed(42, 0) == 5592132763777985307ULL);
    CHECK(replica_seed(42, 1) == 9129838320742759465ULL);
    CHECK(replica_seed(1, 2) == 16171810823986729605ULL);

    // distinct indices give distinct streams under one master seed
    std::vector<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) seen.push_back(replica_seed(7, i));
    for (std::size_t a = 0; a < seen.size(); ++a) {
        for (std::size_t b = a + 1; b < seen.size(); ++b) CHECK(seen[a] != seen[b]);
    }
}

TEST_CASE("retraction puts every block on its sphere") {
    Configuration sigma;
    sigma.block = {{1.0, 2.0, 2.0}, {0.5, -0.5, 0.5, -0.5}};
    retract(sigma);

    double n0 = 0.0, n1 = 0.0;
    for (double x : sigma.block[0]) n0 += x * x;
    for (double x : sigma.block[1]) n1 += x * x;
    CHECK(n0 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(n1 == doctest::Approx(4.0).epsilon(1e-14));

    Configuration zero;
    zero.block = {{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(retract(zero), std::invalid_argument);

    std::mt19937_64 rng(3);
    Configuration rnd = random_configuration({5, 7}, rng);
    CHECK(rnd.block[0].size() == 5);
    CHECK(rnd.block[1].size() == 7);
    OverlapVector self = overlap(rnd, rnd);
    CHECK(self[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(self[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian realization has the advertised shape") {
    ModelSpec m({0.5, 0.5}, {2, 1});
    HamiltonianSample h = sample_hamiltonian(m, {4, 3}, 99);

    CHECK(h.n_patterns == 3);   // 3!/2!
    CHECK(h.block_size == 48);  // 4*4*3
    CHECK(h.axis_species == std::vector<int>{0, 0, 1});
    CHECK(h.axis_size == std::vector<int>{4, 4, 3});
    CHECK(h.normalization == doctest::Approx(std::sqrt(7.0 / 144.0)).epsilon(1e-15));
    CHECK(h.coefficients.size() == 144);
    CHECK(h.contracted.size() == 48);

    for (std::size_t i = 0; i < h.block_size; ++i) {
        double sum = 0.0;
        for (std::size_t pat = 0; pat < h.n_patterns; ++pat) {
            sum += h.coefficients[pat * h.block_size + i];
        }
        CHECK(h.contracted[i] == doctest::Approx(sum).epsilon(1e-15));
    }

    // deterministic in the seed, resample replaces the draw
    HamiltonianSample h2 = sample_hamiltonian(m, {4, 3}, 99);
    CHECK(h.coefficients == h2.coefficients);
    resample(h2, 100);
    CHECK(h.coefficients != h2.coefficients);
    resample(h2, 99);
    CHECK(h.coefficients == h2.coefficients);
}

TEST_CASE("oversized realizations are rejected up front") {
    ModelSpec heavy({0.5, 0.5}, {4, 4});
    CHECK_THROWS_AS(sample_hamiltonian(heavy, {60, 60}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_hamiltonian(heavy, {10, 10}, 1), std::invalid_argument);

    ModelSpec light({0.5, 0.5}, {2, 1});
    CHECK_NOTHROW(sample_hamiltonian(light, {100, 100}, 1));
}

TEST_CASE("contraction agrees with the brute-force sum") {
    std::mt19937_64 rng(17);

    ModelSpec m1({0.5, 0.5}, {2, 1});
    HamiltonianSample h1 = sample_hamiltonian(m1, {4, 3}, 5);
    for (int rep = 0; rep < 5; ++rep) {
        Configuration sigma = random_configuration({4, 3}, rng);
        double fast = eval_hamiltonian(h1, sigma);
        double slow = brute_force_eval(h1, sigma);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }

    ModelSpec m2({0.2, 0.3, 0.5}, {1, 2, 1});
    HamiltonianSample h2 = sample_hamiltonian(m2, {3, 4, 5}, 6);
    CHECK(h2.n_patterns == 12);  // 4!/2!
    for (int rep = 0; rep < 5; ++rep) {
        Configuration sigma = random_configuration({3, 4, 5}, rng);
        CHECK(eval_hamiltonian(h2, sigma) ==
              doctest::Approx(brute_force_eval(h2, sigma)).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches finite differences and the scaling identity") {
    ModelSpec m({0.5, 0.5}, {2, 1});
    HamiltonianSample h = sample_hamiltonian(m, {4, 3}, 21);
    std::mt19937_64 rng(22);
    Configuration sigma = random_configuration({4, 3}, rng);

    std::vector<std::vector<double>> grad = hamiltonian_gradient(h, sigma);
    const double step = 1e-6;
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t i = 0; i < sigma.block[s].size(); ++i) {
            Configuration up = sigma, dn = sigma;
            up.block[s][i] += step;
            dn.block[s][i] -= step;
            double fd = (eval_hamiltonian(h, up) - eval_hamiltonian(h, dn)) / (2 * step);
            CHECK(grad[s][i] == doctest::Approx(fd).epsilon(1e-7));
        }
    }

    // H is homogeneous of degree p(s) in block s, so <grad_s, sigma_s> = p(s) H
    double e = eval_hamiltonian(h, sigma);
    for (std::size_t s = 0; s < 2; ++s) {
        double dot = 0.0;
        for (std::size_t i = 0; i < sigma.block[s].size(); ++i) {
            dot += grad[s][i] * sigma.block[s][i];
        }
        CHECK(dot == doctest::Approx(m.degree(s) * e).epsilon(1e-11));
    }
}

TEST_CASE("covariance identity on hand-picked configuration pairs") {
    std::vector<int> sizes{10, 10};
    std::mt19937_64 rng(31);
    Configuration a = random_configuration(sizes, rng);

    // identical replicas: R = (1,1), so E[H^2] = N
    std::vector<std::pair<Configuration, Configuration>> pairs{{a, a}};
    CovarianceReport rep = covariance_check_pairs(bip, sizes, pairs, 400, 11);
    CHECK(rep.trials == 400);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].r[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.pairs[0].target == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(rep.pairs[0].std_error > 0.0);
    CHECK(std::abs(rep.pairs[0].deviation) <= 5.0);

    CHECK_THROWS_AS(covariance_check_pairs(bip, sizes, pairs, 50, 11), std::invalid_argument);
    CHECK_THROWS_AS(covariance_check_pairs(bip, sizes, {}, 400, 11), std::invalid_argument);
}

TEST_CASE("covariance identity on random pairs across model shapes") {
    CovarianceReport r1 = covariance_check(bip, {10, 10}, 300, 3, 11);
    CHECK(r1.pairs.size() == 3);
    for (const auto& p : r1.pairs) {
        CHECK(p.target == doctest::Approx(20.0 * xi_eval(bip, p.r)).epsilon(1e-12));
        CHECK(std::abs(p.deviation) <= 5.0);
    }
    CHECK(r1.max_abs_deviation <= 5.0);

    // deterministic end to end
    CovarianceReport r2 = covariance_check(bip, {10, 10}, 300, 3, 11);
    CHECK(r1.max_abs_deviation == r2.max_abs_deviation);
    for (std::size_t k = 0; k < r1.pairs.size(); ++k) {
        CHECK(r1.pairs[k].mean == r2.pairs[k].mean);
    }

    ModelSpec m3({0.2, 0.3, 0.5}, {1, 2, 1});
    CovarianceReport r3 = covariance_check(m3, {6, 5, 4}, 200, 3, 12);
    CHECK(r3.max_abs_deviation <= 5.0);

    CHECK_THROWS_AS(covariance_check(bip, {10, 10}, 300, 0, 11), std::invalid_argument);
}

TEST_CASE("wishart edge estimate sits near its limit and is reproducible") {
    const double limit = std::sqrt(2.0);  // lambda = 1/2
    double v1 = wishart_ground_state(200, 0.5, 7);
    CHECK(v1 > 0.93 * limit);
    CHECK(v1 < 1.01 * limit);
    CHECK(wishart_ground_state(200, 0.5, 7) == v1);
    CHECK(wishart_ground_state(200, 0.5, 8) != v1);

    double skew_limit = std::sqrt(0.25) + std::sqrt(0.75);
    double v2 = wishart_ground_state(200, 0.25, 7);
    CHECK(v2 > 0.93 * skew_limit);
    CHECK(v2 < 1.01 * skew_limit);

    CHECK_THROWS_AS(wishart_ground_state(49, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(wishart_ground_state(200, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(wishart_ground_state(200, 1.0, 1), std::invalid_argument);
}

TEST_CASE("ascent on a bilinear landscape reaches the top singular value") {
    std::vector<int> sizes{20, 15};
    const std::uint64_t seed = 13;

    // same realization the driver builds internally
    HamiltonianSample h = sample_hamiltonian(bip, sizes, replica_seed(seed, 0));
    Eigen::MatrixXd a(20, 15);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 15; ++j) a(i, j) = h.contracted[static_cast<std::size_t>(i) * 15 + j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    double exact = h.normalization * std::sqrt(20.0 * 15.0) * svd.singularValues()(0) / 35.0;

    double found = gradient_ascent_ground_state(bip, sizes, 6, seed);
    CHECK(found <= exact + 1e-9);
    CHECK(found == doctest::Approx(exact).epsilon(1e-5));

    // best-of-restarts is monotone in the number of restarts by construction
    double r1 = gradient_ascent_ground_state(bip, sizes, 1, seed);
    double r3 = gradient_ascent_ground_state(bip, sizes, 3, seed);
    double r6 = gradient_ascent_ground_state(bip, sizes, 6, seed);
    CHECK(r1 <= r3 + 1e-15);
    CHECK(r3 <= r6 + 1e-15);

    CHECK_THROWS_AS(gradient_ascent_ground_state(bip, sizes, 0, seed), std::invalid_argument);
}

TEST_CASE("small-beta estimator: exact at beta zero, near the annealed value") {
    SmallBetaEstimate zero = small_beta_free_energy(bip, {10, 10}, 0.0, 100, 3);
    CHECK(zero.value == 0.0);
    CHECK(zero.std_error == 0.0);

    SmallBetaEstimate est = small_beta_free_energy(bip, {40, 40}, 0.1, 30000, 5);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - 0.005) <= 0.003);

    // same seed: deterministic
    SmallBetaEstimate again = small_beta_free_energy(bip, {40, 40}, 0.1, 30000, 5);
    CHECK(est.value == again.value);

    CHECK_THROWS_AS(small_beta_free_energy(bip, {10, 10}, -0.1, 100, 3), std::invalid_argument);
    CHECK_THROWS_AS(small_beta_free_energy(bip, {10, 10}, 0.1, 1, 3), std::invalid_argument);
}

TEST_CASE("species sizes split a total in proportion") {
    CHECK(species_sizes(bip, 20) == std::vector<int>{10, 10});
    CHECK(species_sizes(bip, 21) == std::vector<int>{11, 10});

    ModelSpec m3({0.2, 0.3, 0.5}, {1, 1, 1});
    CHECK(species_sizes(m3, 10) == std::vector<int>{2, 3, 5});

    ModelSpec sym3({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {1, 1, 1});
    CHECK(species_sizes(sym3, 14) == std::vector<int>{5, 5, 4});

    CHECK_THROWS_AS(species_sizes(m3, 5), std::invalid_argument);
}
