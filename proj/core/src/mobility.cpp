#include "lrbms/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrbms/error.hpp"

namespace lrbms {

DgField clamp_saturation(const DgField& s) {
    DgField out = s;
    for (int c = 0; c < s.num_cells(); ++c) {
        auto blk = out.block(c);
        const double mean = std::clamp(blk[0], 0.0, 1.0);
        blk[0] = mean;
        if (s.order() == 0) continue;
        const double deviation = 0.5 * (std::abs(blk[1]) + std::abs(blk[2]));
        const double room = std::min(mean, 1.0 - mean);
        if (deviation > room) {
            const double scale = deviation > 0.0 ? room / deviation : 0.0;
            blk[1] *= scale;
            blk[2] *= scale;
        }
    }
    return out;
}

Mobilities linear_mobilities(const DgField& s, double mu_w, double mu_n) {
    const DgField c = clamp_saturation(s);
    Mobilities m{c, c, c};
    m.w.coefficients() = c.coefficients() / mu_w;
    m.n.coefficients() = -c.coefficients() / mu_n;
    const int bs = c.block_size();
    for (int cell = 0; cell < c.num_cells(); ++cell) m.n.coefficients()[cell * bs] += 1.0 / mu_n;
    m.t.coefficients() = m.w.coefficients() + m.n.coefficients();
    return m;
}

MobilityBasis::MobilityBasis(const FineGrid& grid, std::vector<DgField> wetting,
                             std::vector<DgField> nonwetting)
    : w_(std::move(wetting)), n_(std::move(nonwetting)) {
    if (w_.empty() || w_.size() != n_.size()) {
        throw ConfigError("mobility basis needs the same positive number of wetting and "
                          "non-wetting profiles");
    }
    const int order = w_.front().order();
    weights_ = mass_diagonal(grid, order);
    for (std::size_t q = 0; q < w_.size(); ++q) {
        if (w_[q].order() != order || n_[q].order() != order ||
            w_[q].num_dofs() != weights_.size() || n_[q].num_dofs() != weights_.size()) {
            throw ConfigError("mobility profile " + std::to_string(q + 1) +
                              " does not match the grid or degree");
        }
        DgField t = w_[q];
        t.coefficients() += n_[q].coefficients();
        t_.push_back(std::move(t));
    }
    const int m = size();
    gram_.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double g = (t_[i].coefficients().array() * weights_.array() *
                              t_[j].coefficients().array())
                                 .sum();
            gram_(i, j) = g;
            gram_(j, i) = g;
        }
    }
    rank_deficient_ = solve_normal_equations(gram_, Vector::Zero(m)).rank_deficient;
}

MobilityBasis profiles_from_tof(const FineGrid& grid, const DgField& tof, int m, double end_time,
                                double mu_w, double mu_n, int order) {
    if (m < 2) throw ConfigError("number of mobility profiles M must be at least 2");
    if (!(end_time > 0.0)) throw ConfigError("end time T must be positive");
    const int cells = grid.num_cells();
    const DgField dry = DgField::constant(cells, order, 0.0);
    const DgField wet = DgField::constant(cells, order, 1.0);
    const Mobilities lam0 = linear_mobilities(dry, mu_w, mu_n);
    const Mobilities lam1 = linear_mobilities(wet, mu_w, mu_n);
    const int bs = block_size_for(order);

    std::vector<DgField> w;
    std::vector<DgField> n;
    w.push_back(lam0.w);
    n.push_back(lam0.n);
    for (int q = 2; q <= m - 1; ++q) {
        const double threshold = (q - 1) * end_time / (m - 2);
        DgField wq(cells, order);
        DgField nq(cells, order);
        for (int c = 0; c < cells; ++c) {
            const bool dry_cell = tof.mean(c) > threshold;
            wq.coefficients()[c * bs] = dry_cell ? lam0.w.mean(c) : lam1.w.mean(c);
            nq.coefficients()[c * bs] = dry_cell ? lam0.n.mean(c) : lam1.n.mean(c);
        }
        w.push_back(std::move(wq));
        n.push_back(std::move(nq));
    }
    w.push_back(lam1.w);
    n.push_back(lam1.n);
    return MobilityBasis(grid, std::move(w), std::move(n));
}

MobilityBasis profiles_from_snapshots(const FineGrid& grid, const std::vector<DgField>& saturations,
                                      double mu_w, double mu_n) {
    if (saturations.empty()) throw ConfigError("no saturation snapshots for mobility profiles");
    std::vector<DgField> w;
    std::vector<DgField> n;
    for (const DgField& s : saturations) {
        Mobilities m = linear_mobilities(s, mu_w, mu_n);
        w.push_back(std::move(m.w));
        n.push_back(std::move(m.n));
    }
    return MobilityBasis(grid, std::move(w), std::move(n));
}

FitResult fit_theta(const DgField& lambda_t, const MobilityBasis& basis) {
    const int m = basis.size();
    const Vector weighted = lambda_t.coefficients().cwiseProduct(basis.weights());
    Vector rhs(m);
    for (int q = 0; q < m; ++q) rhs[q] = weighted.dot(basis.total(q).coefficients());
    const LeastSquaresResult ls = solve_normal_equations(basis.gram(), rhs);
    Vector r = lambda_t.coefficients();
    for (int q = 0; q < m; ++q) r -= ls.x[q] * basis.total(q).coefficients();
    FitResult out;
    out.theta = ls.x;
    out.rank_deficient = ls.rank_deficient;
    out.residual = std::sqrt(std::max(0.0, r.dot(r.cwiseProduct(basis.weights()))));
    return out;
}

FitResult fit_theta(const DgField& s, const MobilityBasis& basis, double mu_w, double mu_n) {
    return fit_theta(linear_mobilities(s, mu_w, mu_n).t, basis);
}

Mobilities parametrized_mobilities(const Vector& theta, const MobilityBasis& basis) {
    if (theta.size() != basis.size()) {
        throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, basis has " +
                          std::to_string(basis.size()) + " profiles");
    }
    const int cells = basis.wetting(0).num_cells();
    const int order = basis.wetting(0).order();
    Mobilities m{DgField(cells, order), DgField(cells, order), DgField(cells, order)};
    m.w.coefficients().setZero();
    m.n.coefficients().setZero();
    for (int q = 0; q < basis.size(); ++q) {
        m.w.coefficients() += theta[q] * basis.wetting(q).coefficients();
        m.n.coefficients() += theta[q] * basis.nonwetting(q).coefficients();
    }
    m.t.coefficients() = m.w.coefficients() + m.n.coefficients();
    return m;
}

}  // namespace lrbms
