#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "msglass/critical.hpp"
#include "msglass/errors.hpp"
#include "msglass/model.hpp"
#include "msglass/rootfind.hpp"

using namespace msglass;

namespace {

ModelSpec random_cubic_plus_model(std::mt19937& rng) {
    std::uniform_int_distribution<int> nsp(2, 4);
    std::uniform_int_distribution<int> deg(1, 4);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    for (;;) {
        int s = nsp(rng);
        std::vector<double> lam(s);
        std::vector<int> p(s);
        double tot = 0.0;
        int ptot = 0;
        for (int i = 0; i < s; ++i) {
            lam[i] = unif(rng);
            tot += lam[i];
            p[i] = deg(rng);
            ptot += p[i];
        }
        if (ptot < 3 || ptot > 8) continue;
        for (double& l : lam) l /= tot;
        return ModelSpec(lam, p);
    }
}

} // namespace

TEST_CASE("bracketed root finders converge to machine accuracy") {
    auto f = [](double x) { return x * x - 2.0; };
    auto rb = detail::brent_root(f, 1.0, 2.0, f(1.0), f(2.0));
    CHECK(rb.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    auto rc = detail::bisect_root(f, 1.0, 2.0, f(1.0), f(2.0));
    CHECK(rc.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(detail::brent_root(f, 2.0, 3.0, f(2.0), f(3.0)), NumericalError);
    CHECK_THROWS_AS(detail::bisect_root(f, 2.0, 3.0, f(2.0), f(3.0)), NumericalError);
}

TEST_CASE("species map and its closed-form inverse agree") {
    ModelSpec m({1.0 / 3.0, 2.0 / 3.0}, {3, 1});

    // lambda=1/3, p=3, z=1 lands at x with x^2/(1-x) = 9
    double x = f_species_inverse(m, 0, 1.0);
    CHECK(x == doctest::Approx(0.9083269131959839).epsilon(1e-15));
    CHECK(f_species(m, 0, x) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(f_species_inverse(m, 0, 0.0) == 0.0);
    CHECK(f_species(m, 0, 0.0) == 0.0);
    CHECK_THROWS_AS(f_species_inverse(m, 0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(f_species(m, 0, 1.0), std::invalid_argument);

    std::mt19937 rng(8201);
    std::uniform_real_distribution<double> unif(1e-8, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        double z = unif(rng);
        for (std::size_t s = 0; s < 2; ++s) {
            double q = f_species_inverse(m, s, z);
            CHECK(q > 0.0);
            CHECK(q < 1.0);
            CHECK(f_species(m, s, q) == doctest::Approx(z).epsilon(1e-13));
        }
    }

    // monotone in z
    double prev = 0.0;
    for (double z = 0.1; z < 10.0; z += 0.1) {
        double q = f_species_inverse(m, 1, z);
        CHECK(q > prev);
        prev = q;
    }
}

TEST_CASE("scalar reduction g at a hand-checked point") {
    ModelSpec m({0.5, 0.5}, {2, 1});
    GDerivative gd = g_and_derivative(m, 0.3);
    CHECK(gd.value == doctest::Approx(-0.011869419944330436).epsilon(1e-13));
    CHECK(gd.derivative == doctest::Approx(0.1609632410439152).epsilon(1e-13));

    GDerivative g0 = g_and_derivative(m, 0.0);
    CHECK(g0.value == 0.0);
    // right derivative at zero is 1 - |p|/2
    GDerivative geps = g_and_derivative(m, 1e-14);
    CHECK(geps.derivative == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("g is convex: derivative nondecreasing along a log grid") {
    std::mt19937 rng(8202);
    for (int trial = 0; trial < 20; ++trial) {
        ModelSpec m = random_cubic_plus_model(rng);
        double prev = -1e300;
        for (double z = 1e-6; z < 1e3; z *= 1.5) {
            GDerivative gd = g_and_derivative(m, z);
            CHECK(gd.derivative >= prev - 1e-12);
            prev = gd.derivative;
        }
    }
}

TEST_CASE("critical point of a two-species model with distinct overlaps") {
    ModelSpec m({0.5, 0.5}, {2, 1});
    CriticalPoint cp = solve_critical(m);

    CHECK(cp.z_root == doctest::Approx(0.3633666942045311).epsilon(1e-12));
    CHECK(cp.phi_qc == doctest::Approx(0.3633666942045311).epsilon(1e-12));
    CHECK(cp.q_c[0] == doctest::Approx(0.680962670634452).epsilon(1e-12));
    CHECK(cp.q_c[1] == doctest::Approx(0.5633310682111291).epsilon(1e-12));
    CHECK(cp.beta_c == doctest::Approx(1.1794170503957238).epsilon(1e-12));
    CHECK(cp.e_star == doctest::Approx(1.6348956825219327).epsilon(1e-12));

    CHECK(critical_residuals(m, cp.beta_c, cp.q_c, cp.e_star).max() <= 1e-9);
}

TEST_CASE("critical point of a model whose species share one overlap") {
    ModelSpec m({2.0 / 3.0, 1.0 / 3.0}, {2, 1});
    CriticalPoint cp = solve_critical(m);

    CHECK(cp.z_root == doctest::Approx(0.3906510280673088).epsilon(1e-12));
    CHECK(cp.q_c[0] == doctest::Approx(0.6450074513345844).epsilon(1e-12));
    CHECK(cp.q_c[1] == doctest::Approx(0.6450074513345844).epsilon(1e-12));
    CHECK(cp.beta_c == doctest::Approx(1.2065557345680353).epsilon(1e-12));
    CHECK(cp.e_star == doctest::Approx(1.6569983635274732).epsilon(1e-12));
}

TEST_CASE("critical point of a three-species model") {
    ModelSpec m({0.2, 0.3, 0.5}, {1, 1, 1});
    CriticalPoint cp = solve_critical(m);

    CHECK(cp.z_root == doctest::Approx(0.3568029510637835).epsilon(1e-12));
    CHECK(cp.q_c[0] == doctest::Approx(0.714134557886034).epsilon(1e-12));
    CHECK(cp.q_c[1] == doctest::Approx(0.6474948547661687).epsilon(1e-12));
    CHECK(cp.q_c[2] == doctest::Approx(0.5602108154715896).epsilon(1e-12));
    CHECK(cp.beta_c == doctest::Approx(1.1736275309443358).epsilon(1e-12));
    CHECK(cp.e_star == doctest::Approx(1.6305626195420095).epsilon(1e-12));
}

TEST_CASE("critical point of a symmetric three-species model") {
    ModelSpec m({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {1, 1, 1});
    CriticalPoint cp = solve_critical(m);
    CHECK(cp.z_root == doctest::Approx(0.3906510280673088).epsilon(1e-12));
    for (double q : cp.q_c) CHECK(q == doctest::Approx(0.6450074513345844).epsilon(1e-12));
    CHECK(cp.beta_c == doctest::Approx(1.2065557345680353).epsilon(1e-12));
    CHECK(cp.e_star == doctest::Approx(1.6569983635274732).epsilon(1e-12));
}

TEST_CASE("total degree two is routed away from the general solver") {
    ModelSpec m({0.5, 0.5}, {1, 1});
    CHECK_THROWS_AS(solve_critical(m), UnsupportedModel);
}

TEST_CASE("random models solve with certified residuals") {
    std::mt19937 rng(8203);
    for (int trial = 0; trial < 30; ++trial) {
        ModelSpec m = random_cubic_plus_model(rng);
        CriticalPoint cp = solve_critical(m);

        CHECK(cp.beta_c > 0.0);
        CHECK(cp.e_star > 0.0);
        for (double q : cp.q_c) {
            CHECK(q > 0.0);
            CHECK(q < 1.0);
        }
        // at the root of g, z coincides with Phi(q_z)
        CHECK(cp.phi_qc == doctest::Approx(cp.z_root).epsilon(1e-11));

        CriticalResiduals res = critical_residuals(m, cp.beta_c, cp.q_c, cp.e_star);
        CHECK(res.max() <= 1e-9);
        for (double r : qc_system_residuals(m, cp.q_c)) CHECK(r <= 1e-9);

        // beta_c^2 xi U = V, V = beta_c E sqrt(xi)
        Potentials pot = potentials(m, cp.q_c);
        double xiq = xi_eval(m, cp.q_c);
        CHECK(cp.beta_c * cp.beta_c * xiq * pot.u == doctest::Approx(pot.v).epsilon(1e-11));
        CHECK(cp.beta_c * cp.e_star * std::sqrt(xiq) == doctest::Approx(pot.v).epsilon(1e-11));
    }
}

TEST_CASE("residuals detect a perturbed solution") {
    ModelSpec m({0.5, 0.5}, {2, 1});
    CriticalPoint cp = solve_critical(m);

    OverlapVector q = cp.q_c;
    q[0] *= 1.001;
    CriticalResiduals res = critical_residuals(m, cp.beta_c, q, cp.e_star);
    CHECK(res.max() > 1e-6);

    std::vector<double> sys = qc_system_residuals(m, q);
    bool any = false;
    for (double r : sys) any = any || r > 1e-6;
    CHECK(any);
}
