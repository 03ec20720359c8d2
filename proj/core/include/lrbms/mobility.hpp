#pragma once

#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/linalg.hpp"

namespace lrbms {

struct Mobilities {
    DgField w;
    DgField n;
    DgField t;
};

/// Saturation moved into [0, 1] cellwise: mean clamped, slopes scaled so the
/// cell corners stay within [0, 1].
DgField clamp_saturation(const DgField& s);

/// lambda_w = s/mu_w, lambda_n = (1-s)/mu_n of the clamped saturation.
Mobilities linear_mobilities(const DgField& s, double mu_w, double mu_n);

/// M saturation-independent mobility profiles with the Gram matrix of the
/// total-mobility profiles in L2(Omega).
class MobilityBasis {
public:
    MobilityBasis() = default;
    MobilityBasis(const FineGrid& grid, std::vector<DgField> wetting,
                  std::vector<DgField> nonwetting);

    int size() const { return static_cast<int>(w_.size()); }
    const DgField& wetting(int q) const { return w_[q]; }
    const DgField& nonwetting(int q) const { return n_[q]; }
    const DgField& total(int q) const { return t_[q]; }
    const DenseMatrix& gram() const { return gram_; }
    /// Mass weights used by the fit norm.
    const Vector& weights() const { return weights_; }
    /// True when the total-mobility profiles are linearly dependent (for linear
    /// relative permeabilities lambda_t(0) and lambda_t(1) are both constant); the
    /// fit then returns the minimal-norm coefficients.
    bool rank_deficient() const { return rank_deficient_; }

private:
    std::vector<DgField> w_;
    std::vector<DgField> n_;
    std::vector<DgField> t_;
    DenseMatrix gram_;
    Vector weights_;
    bool rank_deficient_ = false;
};

/// Profiles from a time-of-flight field (cell means at barycenters). Profile 1
/// is lambda(0), profile M is lambda(1), and profile q in between is lambda(0)
/// where tau > (q-1) T/(M-2) and lambda(1) elsewhere.
MobilityBasis profiles_from_tof(const FineGrid& grid, const DgField& tof, int m, double end_time,
                                double mu_w, double mu_n, int order);

/// Profiles lambda(s_q) from saturation fields.
MobilityBasis profiles_from_snapshots(const FineGrid& grid, const std::vector<DgField>& saturations,
                                      double mu_w, double mu_n);

struct FitResult {
    Vector theta;
    bool rank_deficient = false;
    /// || lambda_t - sum theta_q lambda_t,q ||_L2.
    double residual = 0.0;
};

/// argmin_theta || lambda_t - sum theta_q lambda_t,q ||_L2(Omega).
FitResult fit_theta(const DgField& lambda_t, const MobilityBasis& basis);
/// Fit of the total mobility of the saturation s.
FitResult fit_theta(const DgField& s, const MobilityBasis& basis, double mu_w, double mu_n);

/// sum theta_q lambda_q for wetting, non-wetting and total profiles.
Mobilities parametrized_mobilities(const Vector& theta, const MobilityBasis& basis);

}  // namespace lrbms
