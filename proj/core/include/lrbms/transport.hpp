#pragma once

#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/problem.hpp"
#include "lrbms/velocity.hpp"

namespace lrbms {

/// f(s) = (s/mu_w) / (s/mu_w + (1-s)/mu_n) with s clamped to [0, 1].
double fractional_flow(double s, double mu_w, double mu_n);

/// Explicit upwind-DG update of the saturation for one time step.
class SaturationStepper {
public:
    explicit SaturationStepper(const FlowProblem& problem);

    /// Candidate s^{n+1} (before limiting).
    DgField step(const DgField& s, const FaceFluxField& u, double dt) const;

    /// Boundary and source contributions of one step:
    /// sum_T int phi s^{n+1} - sum_T int phi s^n = dt * mass_change(s, u).
    double mass_change(const DgField& s, const FaceFluxField& u) const;

private:
    double face_upwind_integral(const DgField& s, const FaceFluxField& u, int face, int side,
                                int basis_index) const;

    const FlowProblem* problem_;
    std::vector<double> sigma_;
    std::vector<double> source_moments_;  // int q2 phi_i per cell and basis function
};

DgField saturation_step(const FlowProblem& problem, const DgField& s, const FaceFluxField& u,
                        double dt);

/// Shock detector D(T) = sum over upstream faces of |int_F [s]| / (0.08 d sqrt(h_T) |T|), d = 2.
std::vector<double> shock_detector(const FlowProblem& problem, const DgField& s,
                                   const FaceFluxField& u);

struct LimiterStats {
    int flagged = 0;
    int limited = 0;  ///< flagged cells whose slope actually changed
    double min_scale = 1.0;
};

/// Slope limiter on P1 saturations. Flagged cells (D > 1 or a corner value
/// outside [0, 1]) keep their mean and get their gradient scaled by min_i m_i.
DgField limit(const FlowProblem& problem, const DgField& s, const FaceFluxField& u,
              LimiterStats* stats = nullptr);

/// Smallest and largest corner value of a DG field.
std::pair<double, double> corner_range(const DgField& s);

}  // namespace lrbms
