#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace msglass {

/// Per-species overlap (or generic per-species real vector).
using OverlapVector = std::vector<double>;

/// A pure multi-species model: species proportions λ(s) and one interaction
/// degree p(s) per species, defining the mixture ξ(x) = Π_s x(s)^p(s).
///
/// Invariants enforced at construction: at least two species, λ(s) ∈ (0,1)
/// with Σλ = 1 within 1e-12, integer p(s) ≥ 1.
class ModelSpec {
public:
    ModelSpec(std::vector<std::string> labels,
              std::vector<double> proportions,
              std::vector<int> degrees);

    /// Convenience constructor with generated labels "s0", "s1", ...
    ModelSpec(std::vector<double> proportions, std::vector<int> degrees);

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& lambda() const { return lambda_; }
    const std::vector<int>& degree() const { return degree_; }

    double lambda(std::size_t s) const { return lambda_[s]; }
    int degree(std::size_t s) const { return degree_[s]; }
    std::size_t n_species() const { return lambda_.size(); }

    /// |p| = Σ_s p(s).
    int total_degree() const { return total_degree_; }

private:
    void validate();

    std::vector<std::string> labels_;
    std::vector<double> lambda_;
    std::vector<int> degree_;
    int total_degree_ = 0;
};

/// ξ(x) = Π_s x(s)^p(s). Throws on dimension mismatch.
double xi_eval(const ModelSpec& model, const OverlapVector& x);

/// ∇ξ(x); component s is p(s)·x(s)^{p(s)-1}·Π_{t≠s} x(t)^{p(t)}.
/// Uses the convention x^0 = 1 (also at x = 0) so that entries with p(s) = 1
/// stay finite when x(s) = 0.
OverlapVector grad_xi(const ModelSpec& model, const OverlapVector& x);

/// Dense Hessian of ξ at x, row-major, size S×S. Requires x(s) > 0.
std::vector<double> hessian_xi(const ModelSpec& model, const OverlapVector& x);

struct HessianSignature {
    int n_positive = 0;
    int n_negative = 0;
    int n_zero = 0;
};

/// Inertia of the Hessian of ξ at x ∈ (0,1]^S. Eigenvalues within 1e-10 of
/// zero relative to the largest magnitude count as zero.
HessianSignature hessian_signature(const ModelSpec& model, const OverlapVector& x);

struct Potentials {
    double v;     ///< V(q) = −Σ λ(t) log(1−q(t))
    double u;     ///< U(q) = 1 + Σ (1−q(t)) p(t)/q(t)
    double phi;   ///< Φ = V/U
    double omega; ///< Ω = V·U
};

/// Scalar potentials of an overlap q ∈ (0,1)^S. Throws if any q(s) ≤ 0
/// (U is undefined at q(s) = 0) or q(s) ≥ 1.
Potentials potentials(const ModelSpec& model, const OverlapVector& q);

/// Φ(q) extended by its limit value 0 at q ≡ 0. Rejects vectors with some
/// but not all entries zero; callers that land there have a bug upstream.
double phi_value(const ModelSpec& model, const OverlapVector& q);

/// Monomial expansion of the recentred mixture
///   ξ_q(x) = ξ((1−q)∘x + q) − ξ(q) − Σ_s (1−q(s)) ∂_s ξ(q) x(s),
/// as exponent-vector/coefficient pairs with |k| ≥ 2, lexicographic in k.
/// Coefficient of k is Π_s C(p(s),k(s)) (1−q(s))^{k(s)} q(s)^{p(s)−k(s)};
/// exact zeros are omitted.
struct MixtureQCoefficients {
    std::vector<std::pair<std::vector<int>, double>> terms;
};

MixtureQCoefficients xi_q_coefficients(const ModelSpec& model, const OverlapVector& q);

/// ξ_q(1) = ξ(1) − ξ(q) − Σ_s (1−q(s)) ∂_s ξ(q), i.e. the recentred mixture
/// evaluated at x ≡ 1 (equals the sum of the coefficients above).
double xi_q_at_one(const ModelSpec& model, const OverlapVector& q);

namespace detail {

/// Integer power with the convention x^0 = 1 for every x, including 0.
double ipow(double x, int k);

void check_dimension(const ModelSpec& model, const OverlapVector& x, const char* what);

} // namespace detail

} // namespace msglass
