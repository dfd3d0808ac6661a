#include "msglass/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "msglass/errors.hpp"
#include "msglass/format.hpp"
#include "msglass/rootfind.hpp"

namespace msglass {

namespace {

void check_species_index(const ModelSpec& model, std::size_t s, const char* what) {
    if (s >= model.n_species()) {
        throw std::invalid_argument(std::string(what) + ": species index " + std::to_string(s) +
                                    " out of range for " + std::to_string(model.n_species()) +
                                    " species");
    }
}

double safe_ratio(double num, double denom) {
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

} // namespace

double f_species(const ModelSpec& model, std::size_t s, double x) {
    check_species_index(model, s, "f_species");
    if (!(x >= 0.0 && x < 1.0)) {
        throw std::invalid_argument("f_species: x must lie in [0,1), got " + format_g(x, 12));
    }
    return model.lambda(s) / static_cast<double>(model.degree(s)) * x * x / (1.0 - x);
}

double f_species_inverse(const ModelSpec& model, std::size_t s, double z) {
    check_species_index(model, s, "f_species_inverse");
    if (z < 0.0) {
        throw std::invalid_argument("f_species_inverse: z must be nonnegative, got " +
                                    format_g(z, 12));
    }
    if (z == 0.0) return 0.0;
    // Root of x² + cx − c with c = p z/λ, written without subtractive cancellation.
    const double c = static_cast<double>(model.degree(s)) * z / model.lambda(s);
    return 2.0 * c / (c + std::sqrt(c * (c + 4.0)));
}

GDerivative g_and_derivative(const ModelSpec& model, double z) {
    if (z < 0.0) {
        throw std::invalid_argument("g_and_derivative: z must be nonnegative, got " +
                                    format_g(z, 12));
    }
    double value = z;
    double slope = 1.0;
    for (std::size_t t = 0; t < model.n_species(); ++t) {
        const double q = f_species_inverse(model, t, z);
        value += model.lambda(t) * (q + std::log1p(-q));
        slope -= static_cast<double>(model.degree(t)) * (1.0 - q) / (2.0 - q);
    }
    return {value, slope};
}

CriticalPoint solve_critical(const ModelSpec& model, double initial_bracket_hi) {
    if (model.total_degree() <= 2) {
        throw UnsupportedModel("solve_critical: total degree " +
                               std::to_string(model.total_degree()) +
                               " has q_c = 0; use the bipartite solver");
    }
    if (!(initial_bracket_hi > 0.0)) {
        throw std::invalid_argument("solve_critical: initial bracket must be positive");
    }
    const auto g = [&](double z) { return g_and_derivative(model, z).value; };

    double lo = 1e-12;
    double flo = g(lo);
    if (flo >= 0.0) {
        throw NumericalError("solve_critical: g(" + format_g(lo, 6) + ") = " + format_g(flo, 6) +
                             " is not negative; no positive root bracketed");
    }
    double hi = initial_bracket_hi;
    double fhi = g(hi);
    while (fhi <= 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > 1e18) {
            throw NumericalError("solve_critical: bracket expansion passed 1e18 with g(hi) = " +
                                 format_g(fhi, 6) + "; g never became positive");
        }
        fhi = g(hi);
    }
    const detail::RootResult root = detail::brent_root(g, lo, hi, flo, fhi);

    CriticalPoint cp;
    cp.z_root = root.x;
    cp.q_c.resize(model.n_species());
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        cp.q_c[s] = f_species_inverse(model, s, root.x);
    }
    const Potentials pot = potentials(model, cp.q_c);
    cp.phi_qc = pot.phi;
    cp.beta_c = std::sqrt(pot.phi / xi_eval(model, cp.q_c));
    cp.e_star = std::sqrt(pot.omega);

    double worst = critical_residuals(model, cp.beta_c, cp.q_c, cp.e_star).max();
    for (double r : qc_system_residuals(model, cp.q_c)) worst = std::max(worst, r);
    if (!(worst <= 1e-9)) {
        throw NumericalError("solve_critical: residual " + format_g(worst, 6) +
                             " exceeds 1e-9 at z = " + format_g17(root.x) +
                             " (g = " + format_g(root.fx, 6) + ")");
    }
    return cp;
}

CriticalResiduals critical_residuals(const ModelSpec& model, double beta,
                                     const OverlapVector& q, double e) {
    detail::check_dimension(model, q, "critical_residuals");
    const Potentials pot = potentials(model, q);
    const double xi = xi_eval(model, q);
    const double sqrt_xi = std::sqrt(xi);
    const double u_minus_one = pot.u - 1.0;

    CriticalResiduals res;
    res.stationarity.resize(model.n_species());
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        const double ps = static_cast<double>(model.degree(s));
        const double qs = q[s];
        const double lhs = model.lambda(s) / (1.0 - qs) +
                           beta * beta * xi *
                               (-ps * (1.0 - qs) / (qs * qs) + ps / qs * u_minus_one);
        const double rhs = beta * e * sqrt_xi * ps / qs;
        res.stationarity[s] = safe_ratio(std::abs(lhs - rhs), std::abs(lhs));
    }
    const double balance_lhs = beta * beta * xi * pot.u;
    res.balance = safe_ratio(std::abs(balance_lhs - pot.v), std::abs(balance_lhs));
    res.energy = safe_ratio(std::abs(pot.v - beta * e * sqrt_xi), std::abs(pot.v));
    return res;
}

double CriticalResiduals::max() const {
    double m = std::max(balance, energy);
    for (double r : stationarity) m = std::max(m, r);
    return m;
}

std::vector<double> qc_system_residuals(const ModelSpec& model, const OverlapVector& q) {
    detail::check_dimension(model, q, "qc_system_residuals");
    const double phi = potentials(model, q).phi;
    std::vector<double> res(model.n_species());
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        res[s] = std::abs(f_species(model, s, q[s]) - phi) / phi;
    }
    return res;
}

} // namespace msglass
