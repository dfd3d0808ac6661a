#include "msglass/supercritical.hpp"

#include <cmath>
#include <string>

#include "msglass/errors.hpp"
#include "msglass/format.hpp"
#include "msglass/rootfind.hpp"

namespace msglass {

namespace {

void check_gamma(const ModelSpec& model, const std::vector<double>& gamma, const char* what) {
    if (gamma.size() != model.n_species()) {
        throw std::invalid_argument(std::string(what) + ": gamma has " +
                                    std::to_string(gamma.size()) + " entries, model has " +
                                    std::to_string(model.n_species()) + " species");
    }
}

} // namespace

std::vector<double> gamma_vector(const ModelSpec& model, double phi_qc) {
    if (phi_qc < 0.0) {
        throw std::invalid_argument("gamma_vector: phi must be nonnegative, got " +
                                    format_g(phi_qc, 12));
    }
    const double sp = std::sqrt(phi_qc);
    std::vector<double> gamma(model.n_species());
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        const double a = model.lambda(s) / static_cast<double>(model.degree(s));
        // (−√φ + √(φ+4a))/2 without the subtraction.
        gamma[s] = 2.0 * a / (sp + std::sqrt(phi_qc + 4.0 * a));
    }
    return gamma;
}

ThetaValue theta(const ModelSpec& model, double y) {
    ThetaValue th{y, 1.0, 0.0};
    for (std::size_t t = 0; t < model.n_species(); ++t) {
        const double p = static_cast<double>(model.degree(t));
        const double b = 4.0 * model.lambda(t) / p;
        const double r = std::sqrt(y * y + b);
        const double surd = (y > 0.0) ? b / (y + r) : r - y;
        th.value += 0.5 * p * surd;
        th.d1 += 0.5 * p * (y / r - 1.0);
        th.d2 += 2.0 * model.lambda(t) / (r * r * r);
    }
    return th;
}

UpsilonValue upsilon(const ModelSpec& model, const std::vector<double>& gamma, double y) {
    check_gamma(model, gamma, "upsilon");
    if (!(y > 0.0)) {
        throw std::invalid_argument("upsilon: y must be positive, got " + format_g(y, 12));
    }
    // y² Π (Γ/y + 1)^p  =  Π (Γ+y)^p / y^{|p|−2}; the right side avoids
    // 0·inf when y is tiny.
    double prod = 1.0;
    double slope_sum = 0.0;
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        prod *= detail::ipow(gamma[s] + y, model.degree(s));
        slope_sum += static_cast<double>(model.degree(s)) * gamma[s] / (gamma[s] + y);
    }
    const double value = prod / detail::ipow(y, model.total_degree() - 2);
    return {value, value / y * (2.0 - slope_sum)};
}

Y0Result find_y0(const ModelSpec& model, const std::vector<double>& gamma) {
    check_gamma(model, gamma, "find_y0");
    if (model.total_degree() == 2) return {0.0, true};
    const auto h = [&](double y) {
        double sum = 0.0;
        for (std::size_t s = 0; s < model.n_species(); ++s) {
            sum += static_cast<double>(model.degree(s)) * gamma[s] / (gamma[s] + y);
        }
        return sum - 2.0;
    };
    const double flo = static_cast<double>(model.total_degree()) - 2.0; // h(0)
    double hi = 1.0;
    double fhi = h(hi);
    double lo = 0.0, flo_cur = flo;
    while (fhi >= 0.0) {
        lo = hi;
        flo_cur = fhi;
        hi *= 2.0;
        if (hi > 1e18) {
            throw NumericalError("find_y0: no sign change up to y = 1e18");
        }
        fhi = h(hi);
    }
    const detail::RootResult root = detail::bisect_root(h, lo, hi, flo_cur, fhi);
    if (!(std::abs(root.fx) <= 1e-12)) {
        throw NumericalError("find_y0: stationarity residual " + format_g(root.fx, 6) +
                             " exceeds 1e-12 at y = " + format_g17(root.x));
    }
    return {root.x, false};
}

double solve_y_star(const ModelSpec& model, const std::vector<double>& gamma, double beta,
                    double beta_c) {
    check_gamma(model, gamma, "solve_y_star");
    if (!(beta > beta_c)) {
        throw std::invalid_argument("solve_y_star: beta = " + format_g(beta, 12) +
                                    " must exceed beta_c = " + format_g(beta_c, 12));
    }
    const double target = beta * beta;
    const Y0Result y0 = find_y0(model, gamma);

    double lo = y0.y0;
    double flo;
    if (y0.degenerate) {
        double prod = 1.0; // Υ(0⁺) when |p| = 2
        for (std::size_t s = 0; s < model.n_species(); ++s) {
            prod *= detail::ipow(gamma[s], model.degree(s));
        }
        flo = prod - target;
    } else {
        flo = upsilon(model, gamma, lo).value - target;
    }
    if (flo >= 0.0) {
        throw NumericalError("solve_y_star: minimum of the root function is " +
                             format_g(flo, 6) + " >= 0; beta = " + format_g(beta, 12) +
                             " is not above the critical branch");
    }
    const auto f = [&](double y) { return upsilon(model, gamma, y).value - target; };
    double hi = std::max(2.0 * lo, 1.0);
    double fhi = f(hi);
    while (fhi <= 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > 1e18) {
            throw NumericalError("solve_y_star: no upper crossing found below y = 1e18");
        }
        fhi = f(hi);
    }
    const detail::RootResult root = detail::bisect_root(f, lo, hi, flo, fhi);
    if (!(std::abs(root.fx) <= 1e-12 * target)) {
        throw NumericalError("solve_y_star: |residual| = " + format_g(std::abs(root.fx), 6) +
                             " exceeds 1e-12·beta² at y = " + format_g17(root.x));
    }
    return root.x;
}

SupercriticalSolution solve_supercritical(const ModelSpec& model, const CriticalPoint& critical,
                                          double beta) {
    if (!(beta > critical.beta_c)) {
        throw std::invalid_argument("solve_supercritical: beta = " + format_g(beta, 12) +
                                    " must exceed beta_c = " + format_g(critical.beta_c, 12));
    }
    SupercriticalSolution sol;
    sol.beta = beta;
    sol.gamma = gamma_vector(model, critical.phi_qc);
    sol.a_star = critical.e_star - std::sqrt(critical.phi_qc);

    if (beta - critical.beta_c <= 1e-10 * critical.beta_c) {
        // Indistinguishable from β_c at solver resolution: report the
        // critical solution itself.
        sol.q = critical.q_c;
        sol.y_star = beta * std::sqrt(xi_eval(model, critical.q_c));
        sol.free_energy = 0.5 * beta * beta;
        sol.xi_q_one = xi_q_at_one(model, critical.q_c);
        return sol;
    }

    sol.y_star = solve_y_star(model, sol.gamma, beta, critical.beta_c);
    sol.q.resize(model.n_species());
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        sol.q[s] = sol.y_star / (sol.gamma[s] + sol.y_star);
    }
    const double xi = xi_eval(model, sol.q);
    const double y_check = beta * std::sqrt(xi);
    if (!(std::abs(sol.y_star - y_check) <= 1e-10 * sol.y_star)) {
        throw NumericalError("solve_supercritical: y = " + format_g17(sol.y_star) +
                             " fails the consistency identity y = beta*sqrt(xi(q)) = " +
                             format_g17(y_check));
    }
    sol.xi_q_one = xi_q_at_one(model, sol.q);
    double entropy = 0.0;
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        entropy += model.lambda(s) * std::log1p(-sol.q[s]);
    }
    sol.free_energy = beta * std::sqrt(xi) * critical.e_star + 0.5 * entropy +
                      0.5 * beta * beta * sol.xi_q_one;
    return sol;
}

double free_energy_at(const ModelSpec& model, const CriticalPoint& critical, double beta) {
    if (beta < 0.0) {
        throw std::invalid_argument("free_energy_at: beta must be nonnegative, got " +
                                    format_g(beta, 12));
    }
    if (beta <= critical.beta_c * (1.0 + 1e-10)) {
        return 0.5 * beta * beta; // ξ(1) = 1 for a pure mixture
    }
    return solve_supercritical(model, critical, beta).free_energy;
}

} // namespace msglass
