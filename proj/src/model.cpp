#include "msglass/model.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "msglass/format.hpp"

namespace msglass {

namespace detail {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

void check_dimension(const ModelSpec& model, const OverlapVector& x, const char* what) {
    if (x.size() != model.n_species()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch, expected " +
                                    std::to_string(model.n_species()) + " entries, got " +
                                    std::to_string(x.size()));
    }
}

namespace {

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t s = 0; s < n; ++s) out.push_back("s" + std::to_string(s));
    return out;
}

// C(p, k) as an exact double for the small degrees used here.
double binomial(int p, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(p - k + i) / static_cast<double>(i);
    return r;
}

} // namespace

} // namespace detail

ModelSpec::ModelSpec(std::vector<std::string> labels,
                     std::vector<double> proportions,
                     std::vector<int> degrees)
    : labels_(std::move(labels)), lambda_(std::move(proportions)), degree_(std::move(degrees)) {
    validate();
}

// Members initialize in declaration order, so the labels are generated
// before the proportions vector is moved from.
ModelSpec::ModelSpec(std::vector<double> proportions, std::vector<int> degrees)
    : labels_(detail::default_labels(proportions.size())),
      lambda_(std::move(proportions)),
      degree_(std::move(degrees)) {
    validate();
}

void ModelSpec::validate() {
    if (labels_.size() != lambda_.size() || lambda_.size() != degree_.size()) {
        throw std::invalid_argument("model: labels, lambda and p must have equal lengths");
    }
    if (lambda_.size() < 2) {
        throw std::invalid_argument("model: needs at least 2 species, got " +
                                    std::to_string(lambda_.size()));
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < lambda_.size(); ++s) {
        if (!(lambda_[s] > 0.0 && lambda_[s] < 1.0)) {
            throw std::invalid_argument("model: lambda[" + std::to_string(s) +
                                        "] must lie in (0,1), got " + format_g(lambda_[s], 12));
        }
        sum += lambda_[s];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("model: lambda sums to " + format_g(sum, 12) +
                                    ", expected 1 within 1e-12");
    }
    for (std::size_t s = 0; s < degree_.size(); ++s) {
        if (degree_[s] < 1) {
            throw std::invalid_argument("model: p[" + std::to_string(s) + "] must be >= 1, got " +
                                        std::to_string(degree_[s]));
        }
        total_degree_ += degree_[s];
    }
}

double xi_eval(const ModelSpec& model, const OverlapVector& x) {
    detail::check_dimension(model, x, "xi_eval");
    double r = 1.0;
    for (std::size_t s = 0; s < x.size(); ++s) r *= detail::ipow(x[s], model.degree(s));
    return r;
}

OverlapVector grad_xi(const ModelSpec& model, const OverlapVector& x) {
    detail::check_dimension(model, x, "grad_xi");
    const std::size_t n = x.size();
    OverlapVector g(n);
    for (std::size_t s = 0; s < n; ++s) {
        double v = static_cast<double>(model.degree(s)) * detail::ipow(x[s], model.degree(s) - 1);
        for (std::size_t t = 0; t < n; ++t) {
            if (t != s) v *= detail::ipow(x[t], model.degree(t));
        }
        g[s] = v;
    }
    return g;
}

std::vector<double> hessian_xi(const ModelSpec& model, const OverlapVector& x) {
    detail::check_dimension(model, x, "hessian_xi");
    const std::size_t n = x.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (x[s] <= 0.0) {
            throw std::invalid_argument("hessian_xi: x[" + std::to_string(s) +
                                        "] must be positive, got " + format_g(x[s], 12));
        }
    }
    const double xi = xi_eval(model, x);
    std::vector<double> h(n * n);
    for (std::size_t s = 0; s < n; ++s) {
        const double ps = static_cast<double>(model.degree(s));
        for (std::size_t t = 0; t < n; ++t) {
            const double pt = static_cast<double>(model.degree(t));
            h[s * n + t] = (s == t) ? xi * ps * (ps - 1.0) / (x[s] * x[s])
                                    : xi * ps * pt / (x[s] * x[t]);
        }
    }
    return h;
}

HessianSignature hessian_signature(const ModelSpec& model, const OverlapVector& x) {
    const std::vector<double> h = hessian_xi(model, x);
    const auto n = static_cast<Eigen::Index>(model.n_species());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = h[static_cast<std::size_t>(i * n + j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    const double tiny = 1e-10 * scale;
    HessianSignature sig;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (ev[i] > tiny)
            ++sig.n_positive;
        else if (ev[i] < -tiny)
            ++sig.n_negative;
        else
            ++sig.n_zero;
    }
    return sig;
}

Potentials potentials(const ModelSpec& model, const OverlapVector& q) {
    detail::check_dimension(model, q, "potentials");
    Potentials pot{0.0, 1.0, 0.0, 0.0};
    for (std::size_t s = 0; s < q.size(); ++s) {
        if (!(q[s] > 0.0 && q[s] < 1.0)) {
            throw std::invalid_argument("potentials: q[" + std::to_string(s) +
                                        "] must lie in (0,1), got " + format_g(q[s], 12) +
                                        " (U is undefined at q=0)");
        }
        pot.v -= model.lambda(s) * std::log1p(-q[s]);
        pot.u += (1.0 - q[s]) * static_cast<double>(model.degree(s)) / q[s];
    }
    pot.phi = pot.v / pot.u;
    pot.omega = pot.v * pot.u;
    return pot;
}

double phi_value(const ModelSpec& model, const OverlapVector& q) {
    detail::check_dimension(model, q, "phi_value");
    bool any_zero = false;
    bool all_zero = true;
    for (double qs : q) {
        if (qs == 0.0)
            any_zero = true;
        else
            all_zero = false;
    }
    if (all_zero) return 0.0;
    if (any_zero) {
        throw std::invalid_argument("phi_value: q has some but not all entries zero");
    }
    return potentials(model, q).phi;
}

MixtureQCoefficients xi_q_coefficients(const ModelSpec& model, const OverlapVector& q) {
    detail::check_dimension(model, q, "xi_q_coefficients");
    const std::size_t n = q.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (!(q[s] >= 0.0 && q[s] < 1.0)) {
            throw std::invalid_argument("xi_q_coefficients: q[" + std::to_string(s) +
                                        "] must lie in [0,1), got " + format_g(q[s], 12));
        }
    }
    MixtureQCoefficients out;
    std::vector<int> k(n, 0);
    // Odometer with the last species fastest: emits k in lexicographic order.
    while (true) {
        int total = 0;
        for (int ks : k) total += ks;
        if (total >= 2) {
            double coeff = 1.0;
            for (std::size_t s = 0; s < n; ++s) {
                coeff *= detail::binomial(model.degree(s), k[s]) *
                         detail::ipow(1.0 - q[s], k[s]) * detail::ipow(q[s], model.degree(s) - k[s]);
            }
            if (coeff != 0.0) out.terms.emplace_back(k, coeff);
        }
        std::size_t s = n;
        while (s > 0) {
            --s;
            if (k[s] < model.degree(s)) {
                ++k[s];
                break;
            }
            k[s] = 0;
            if (s == 0) return out;
        }
    }
}

double xi_q_at_one(const ModelSpec& model, const OverlapVector& q) {
    detail::check_dimension(model, q, "xi_q_at_one");
    const double xi_one = 1.0; // ξ(1) for a pure mixture
    const OverlapVector g = grad_xi(model, q);
    double r = xi_one - xi_eval(model, q);
    for (std::size_t s = 0; s < q.size(); ++s) r -= (1.0 - q[s]) * g[s];
    return r;
}

} // namespace msglass
