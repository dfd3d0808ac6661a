#include "msglass/bipartite.hpp"

#include <cmath>
#include <string>

#include "msglass/errors.hpp"
#include "msglass/format.hpp"

namespace msglass {

namespace {

struct Roots {
    double rs;  // √λ_s
    double rt;  // √λ_t
    double sum; // √λ_s + √λ_t = E★
    double d;   // D(β) = √((√λ_s−√λ_t)² + 4β²)
};

Roots roots_at(const BipartiteModel& m, double beta) {
    Roots r;
    r.rs = std::sqrt(m.lambda_s);
    r.rt = std::sqrt(m.lambda_t);
    r.sum = r.rs + r.rt;
    const double diff = r.rs - r.rt;
    r.d = std::sqrt(diff * diff + 4.0 * beta * beta);
    return r;
}

} // namespace

BipartiteModel::BipartiteModel(double ls, double lt) : lambda_s(ls), lambda_t(lt) {
    if (!(ls > 0.0 && ls < 1.0) || !(lt > 0.0 && lt < 1.0)) {
        throw std::invalid_argument("bipartite model: proportions must lie in (0,1), got (" +
                                    format_g(ls, 12) + ", " + format_g(lt, 12) + ")");
    }
    if (std::abs(ls + lt - 1.0) > 1e-12) {
        throw std::invalid_argument("bipartite model: proportions sum to " +
                                    format_g(ls + lt, 12) + ", expected 1 within 1e-12");
    }
}

BipartiteModel bipartite_from(const ModelSpec& model) {
    if (model.n_species() != 2 || model.degree(0) != 1 || model.degree(1) != 1) {
        throw UnsupportedModel("bipartite_from: requires exactly two species with p = (1,1)");
    }
    return {model.lambda(0), model.lambda(1)};
}

BipartiteCritical bipartite_critical(const BipartiteModel& m) {
    BipartiteCritical c;
    c.beta_c = std::pow(m.lambda_s * m.lambda_t, 0.25);
    c.e_star = std::sqrt(m.lambda_s) + std::sqrt(m.lambda_t);
    c.q_c = {0.0, 0.0};
    return c;
}

CriticalPoint bipartite_critical_point(const BipartiteModel& m) {
    const BipartiteCritical c = bipartite_critical(m);
    CriticalPoint cp;
    cp.q_c = c.q_c;
    cp.beta_c = c.beta_c;
    cp.e_star = c.e_star;
    cp.phi_qc = 0.0;
    cp.z_root = 0.0;
    return cp;
}

BipartiteOverlap bipartite_overlap(const BipartiteModel& m, double beta) {
    if (beta < 0.0) {
        throw std::invalid_argument("bipartite_overlap: beta must be nonnegative, got " +
                                    format_g(beta, 12));
    }
    const BipartiteCritical c = bipartite_critical(m);
    if (beta <= c.beta_c) return {0.0, 0.0, true};
    const Roots r = roots_at(m, beta);
    // Numerator D − E★ rewritten as 4(β² − β_c²)/(D + E★): exact cancellation
    // of the constant parts, so precision survives β → β_c⁺.
    const double num = 4.0 * (beta * beta - c.beta_c * c.beta_c) / (r.d + r.sum);
    BipartiteOverlap q;
    q.q_s = num / (r.rs - r.rt + r.d);
    q.q_t = num / (r.rt - r.rs + r.d);
    q.subcritical = false;
    return q;
}

double bipartite_free_energy(const BipartiteModel& m, double beta) {
    if (beta < 0.0) {
        throw std::invalid_argument("bipartite_free_energy: beta must be nonnegative, got " +
                                    format_g(beta, 12));
    }
    const BipartiteCritical c = bipartite_critical(m);
    if (beta <= c.beta_c) return 0.5 * beta * beta;
    const Roots r = roots_at(m, beta);
    const double f = 0.5 * (-1.0 - r.rs * r.rt + r.sum * r.d) -
                     0.25 * (m.lambda_s - m.lambda_t) *
                         std::log((r.rs - r.rt + r.d) / (r.rt - r.rs + r.d)) -
                     0.5 * std::log(beta) + 0.25 * m.lambda_s * std::log(m.lambda_s) +
                     0.25 * m.lambda_t * std::log(m.lambda_t);
    return f;
}

KappaValue kappa(const BipartiteModel& m, double beta) {
    if (beta < 0.0) {
        throw std::invalid_argument("kappa: beta must be nonnegative, got " + format_g(beta, 12));
    }
    const Roots r = roots_at(m, beta);
    KappaValue k;
    k.value = r.sum * r.d - 1.0 - 2.0 * beta * beta;
    k.derivative = (r.d == 0.0) ? 0.0 : 4.0 * beta * (r.sum / r.d - 1.0);
    return k;
}

} // namespace msglass
