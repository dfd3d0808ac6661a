#pragma once

#include <vector>

#include "msglass/critical.hpp"
#include "msglass/model.hpp"

namespace msglass {

/// Low-temperature (β > β_c) solution of the free-energy formula.
struct SupercriticalSolution {
    double beta;
    std::vector<double> gamma;  ///< Γ(s), β-independent
    double y_star;              ///< larger root of Υ(y) = β²
    OverlapVector q;            ///< q(s) = y★/(Γ(s)+y★)
    double free_energy;
    double xi_q_one;            ///< ξ_q(1) at the solution overlap
    double a_star;              ///< E★ − √Φ(q_c), β-independent
};

/// Γ(s) = (−√φ + √(φ + 4λ(s)/p(s)))/2, computed in a cancellation-free form.
std::vector<double> gamma_vector(const ModelSpec& model, double phi_qc);

struct ThetaValue {
    double value;
    double d1;
    double d2;
};

/// Θ(y) = y + Σ (p(t)/2)(−y + √(y² + 4λ(t)/p(t))) with first and second
/// derivatives; Θ is strictly convex.
ThetaValue theta(const ModelSpec& model, double y);

struct UpsilonValue {
    double value;
    double d1;
};

/// Υ(y) = y² Π (Γ(s)/y + 1)^{p(s)} on y > 0, with
/// Υ′(y) = (Υ(y)/y)(2 − Σ p(s)Γ(s)/(Γ(s)+y)).
UpsilonValue upsilon(const ModelSpec& model, const std::vector<double>& gamma, double y);

struct Y0Result {
    double y0;
    bool degenerate;  ///< true when |p| = 2: the minimizer sits at y = 0
};

/// Minimizer of Υ: the unique y0 > 0 with Σ p(s)Γ(s)/(Γ(s)+y0) = 2 when
/// |p| ≥ 3, degenerate y0 = 0 when |p| = 2.
Y0Result find_y0(const ModelSpec& model, const std::vector<double>& gamma);

/// Larger root of Υ(y) = β², bracketed on [y0, ∞). Requires β > β_c.
double solve_y_star(const ModelSpec& model, const std::vector<double>& gamma, double beta,
                    double beta_c);

/// Full solution at β > β_c. β within relative 1e-10 of β_c is treated as
/// critical and reported with q = q_c on the matching branch.
SupercriticalSolution solve_supercritical(const ModelSpec& model, const CriticalPoint& critical,
                                          double beta);

/// F(β) on both branches: ½β²ξ(1) for β ≤ β_c, assembled low-temperature
/// formula above β_c.
double free_energy_at(const ModelSpec& model, const CriticalPoint& critical, double beta);

} // namespace msglass
