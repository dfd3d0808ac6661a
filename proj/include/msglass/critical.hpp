#pragma once

#include <cstddef>
#include <vector>

#include "msglass/model.hpp"

namespace msglass {

/// Output of the critical-temperature solve for |p| ≥ 3 models.
struct CriticalPoint {
    OverlapVector q_c;  ///< critical overlap, one entry per species, in (0,1)
    double beta_c;      ///< √(Φ(q_c)/ξ(q_c))
    double e_star;      ///< ground-state energy √(Ω(q_c))
    double phi_qc;      ///< Φ(q_c), also the value of the scalar root z
    double z_root;      ///< root of g
};

/// f_s(x) = (λ(s)/p(s)) x²/(1−x), strictly increasing from [0,1) onto [0,∞).
double f_species(const ModelSpec& model, std::size_t s, double x);

/// Inverse of f_species in closed form, stable for both small and large z.
double f_species_inverse(const ModelSpec& model, std::size_t s, double z);

struct GDerivative {
    double value;
    double derivative;
};

/// g(z) = z + Σ λ(t) q_z(t) + Σ λ(t) log(1−q_z(t)) with q_z(t) = f_t⁻¹(z),
/// together with g′(z) = 1 − Σ p(t)(1−q_z(t))/(2−q_z(t)). g(0) = 0, g is
/// strictly convex, and for |p| ≥ 3 it has exactly one positive root.
GDerivative g_and_derivative(const ModelSpec& model, double z);

/// Solves g(z) = 0 on z > 0 and assembles the critical point. Requires
/// |p| ≥ 3; the |p| = 2 case has q_c ≡ 0 and closed forms (see bipartite.hpp).
/// The result is certified against the stationarity residuals below; failure
/// to certify raises NumericalError.
CriticalPoint solve_critical(const ModelSpec& model, double initial_bracket_hi = 1.0);

/// Relative residuals of the defining equations at (β, q, E): one
/// stationarity equation per species plus the two scalar equalities
/// β²ξ(q)U(q) = V(q) and V(q) = βE√ξ(q). Each residual is normalized by the
/// corresponding left-hand side.
struct CriticalResiduals {
    std::vector<double> stationarity;
    double balance;
    double energy;

    double max() const;
};

CriticalResiduals critical_residuals(const ModelSpec& model, double beta,
                                     const OverlapVector& q, double e);

/// Residuals |f_s(q(s)) − Φ(q)| / Φ(q) of the fixed-point system that
/// defines q_c, one per species.
std::vector<double> qc_system_residuals(const ModelSpec& model, const OverlapVector& q);

} // namespace msglass
