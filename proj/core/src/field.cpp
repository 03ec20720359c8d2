#include "lrbms/field.hpp"

#include <cmath>
#include <string>

#include "lrbms/error.hpp"

namespace lrbms {

namespace {

GaussRule make_rule(std::vector<double> nodes, std::vector<double> weights) {
    GaussRule r;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        r.points.push_back(0.5 * nodes[i]);
        r.weights.push_back(0.5 * weights[i]);
    }
    return r;
}

}  // namespace

const GaussRule& GaussRule::get(int num_points) {
    static const std::array<GaussRule, 5> rules = {
        make_rule({0.0}, {2.0}),
        make_rule({-0.5773502691896257645, 0.5773502691896257645}, {1.0, 1.0}),
        make_rule({-0.7745966692414833770, 0.0, 0.7745966692414833770},
                  {0.5555555555555555556, 0.8888888888888888889, 0.5555555555555555556}),
        make_rule({-0.8611363115940525752, -0.3399810435848562648, 0.3399810435848562648,
                   0.8611363115940525752},
                  {0.3478548451374538574, 0.6521451548625461426, 0.6521451548625461426,
                   0.3478548451374538574}),
        make_rule({-0.9061798459386639928, -0.5384693101056830910, 0.0, 0.5384693101056830910,
                   0.9061798459386639928},
                  {0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
                   0.4786286704993664680, 0.2369268850561890875}),
    };
    if (num_points < 1 || num_points > 5) {
        throw ConfigError("Gauss rule with " + std::to_string(num_points) +
                          " points is not available (1..5)");
    }
    return rules[num_points - 1];
}

DgField::DgField(int num_cells, int order)
    : order_(order), num_cells_(num_cells) {
    if (order != 0 && order != 1) {
        throw ConfigError("DG polynomial degree must be 0 or 1, got " + std::to_string(order));
    }
    coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_cells) * block_size());
}

DgField DgField::constant(int num_cells, int order, double value) {
    DgField f(num_cells, order);
    for (int c = 0; c < num_cells; ++c) f.coeffs_[c * f.block_size()] = value;
    return f;
}

DgField DgField::with_order(int order) const {
    if (order == order_) return *this;
    DgField out(num_cells_, order);
    for (int c = 0; c < num_cells_; ++c) {
        out.coeffs_[c * out.block_size()] = mean(c);
    }
    return out;
}

void validate_permeability(const CellScalarField& k, int num_cells) {
    if (k.size() != num_cells) {
        throw ConfigError("permeability has " + std::to_string(k.size()) + " values, expected " +
                          std::to_string(num_cells));
    }
    for (int c = 0; c < num_cells; ++c) {
        if (!std::isfinite(k[c]) || !(k[c] > 0.0)) {
            throw ConfigError("permeability must be positive, cell " + std::to_string(c));
        }
    }
}

void validate_porosity(const CellScalarField& phi, int num_cells) {
    if (phi.size() != num_cells) {
        throw ConfigError("porosity has " + std::to_string(phi.size()) + " values, expected " +
                          std::to_string(num_cells));
    }
    for (int c = 0; c < num_cells; ++c) {
        if (!std::isfinite(phi[c]) || !(phi[c] > 0.0) || phi[c] > 1.0) {
            throw ConfigError("porosity must lie in (0, 1], cell " + std::to_string(c));
        }
    }
}

FaceWeights face_weights(const FineGrid& grid, const CellScalarField& k, int face,
                         MeanWeighting weighting) {
    const Face& f = grid.face(face);
    FaceWeights w;
    if (f.boundary) {
        w.a1 = w.a2 = k[f.cells[0]];
        w.tau1 = 1.0;
        w.tau2 = 0.0;
        return w;
    }
    w.a1 = k[f.cells[0]];
    w.a2 = k[f.cells[1]];
    const double own1 = weighting == MeanWeighting::kDiffusivity ? w.a1 : w.a2;
    w.tau1 = own1 / (w.a1 + w.a2);
    w.tau2 = 1.0 - w.tau1;
    return w;
}

FaceQuadrature face_quadrature(const FineGrid& grid, int face, int num_points) {
    const Face& f = grid.face(face);
    const GaussRule& rule = GaussRule::get(num_points);
    const Point t = f.tangent();
    FaceQuadrature q;
    q.points.reserve(rule.points.size());
    q.weights.reserve(rule.points.size());
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
        q.points.push_back(f.center + (rule.points[i] * f.length) * t);
        q.weights.push_back(rule.weights[i] * f.length);
    }
    return q;
}

double evaluate(const FineGrid& grid, const DgField& f, int cell, Point p) {
    if (!grid.contains(cell, p)) {
        throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") lies outside cell " + std::to_string(cell));
    }
    const auto [xi, eta] = local_coordinates(grid, cell, p);
    return f.local_value(cell, xi, eta);
}

double trace(const FineGrid& grid, const DgField& f, int face, int side, Point p) {
    const int cell = grid.face(face).cells[side];
    const auto [xi, eta] = local_coordinates(grid, cell, p);
    return f.local_value(cell, xi, eta);
}

JumpMean jump_and_mean(const FineGrid& grid, const DgField& f, int face, const FaceWeights& w,
                       Point p) {
    if (grid.face(face).boundary) {
        throw DomainError("jump_and_mean needs an interior face, face " + std::to_string(face) +
                          " is on the boundary");
    }
    const double t1 = trace(grid, f, face, 0, p);
    const double t2 = trace(grid, f, face, 1, p);
    return {t1 - t2, w.tau1 * t1 + w.tau2 * t2};
}

DgField l2_project(const FineGrid& grid, const ScalarFunction& g, int order, int quad_points) {
    DgField out(grid.num_cells(), order);
    const GaussRule& rule = GaussRule::get(quad_points);
    const int n = static_cast<int>(rule.points.size());
    for (int c = 0; c < grid.num_cells(); ++c) {
        const Point b = grid.barycenter(c);
        std::array<double, 3> moments{0.0, 0.0, 0.0};
        for (int a = 0; a < n; ++a) {
            for (int q = 0; q < n; ++q) {
                const double xi = rule.points[a];
                const double eta = rule.points[q];
                const double w = rule.weights[a] * rule.weights[q];
                const double v = g({b.x + xi * grid.hx(), b.y + eta * grid.hy()});
                moments[0] += w * v;
                moments[1] += w * v * xi;
                moments[2] += w * v * eta;
            }
        }
        // The scaled monomials are orthogonal with norms 1, 1/12, 1/12 (per unit area).
        auto blk = out.block(c);
        blk[0] = moments[0];
        if (order == 1) {
            blk[1] = 12.0 * moments[1];
            blk[2] = 12.0 * moments[2];
        }
    }
    return out;
}

BrokenNorms broken_norms(const FineGrid& grid, const DgField& f) {
    const double area = grid.cell_area();
    double l2 = 0.0;
    double grad = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c) {
        const double m = f.mean(c);
        const double sx = f.slope_x(c);
        const double sy = f.slope_y(c);
        l2 += area * (m * m + (sx * sx + sy * sy) / 12.0);
        grad += area * (sx * sx / (grid.hx() * grid.hx()) + sy * sy / (grid.hy() * grid.hy()));
    }
    return {std::sqrt(l2), std::sqrt(l2 + grad)};
}

Eigen::VectorXd mass_diagonal(const FineGrid& grid, int order) {
    const int bs = block_size_for(order);
    Eigen::VectorXd m(static_cast<Eigen::Index>(grid.num_cells()) * bs);
    const double area = grid.cell_area();
    for (int c = 0; c < grid.num_cells(); ++c) {
        m[c * bs] = area;
        if (bs == 3) {
            m[c * bs + 1] = area / 12.0;
            m[c * bs + 2] = area / 12.0;
        }
    }
    return m;
}

double l2_inner(const FineGrid& grid, const DgField& f, const DgField& g) {
    if (f.order() != g.order() || f.num_cells() != g.num_cells()) {
        throw ConfigError("l2_inner: fields differ in degree or size");
    }
    const Eigen::VectorXd m = mass_diagonal(grid, f.order());
    return (f.coefficients().array() * g.coefficients().array() * m.array()).sum();
}

ErrorNorms error_norms(const FineGrid& grid, const DgField& f, const ScalarFunction& exact,
                       const std::function<Point(Point)>& exact_gradient, int quad_points) {
    const GaussRule& rule = GaussRule::get(quad_points);
    const int n = static_cast<int>(rule.points.size());
    const double area = grid.cell_area();
    double l2 = 0.0;
    double h1 = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c) {
        const Point b = grid.barycenter(c);
        const Point grad_f{f.slope_x(c) / grid.hx(), f.slope_y(c) / grid.hy()};
        for (int a = 0; a < n; ++a) {
            for (int q = 0; q < n; ++q) {
                const double xi = rule.points[a];
                const double eta = rule.points[q];
                const double w = area * rule.weights[a] * rule.weights[q];
                const Point p{b.x + xi * grid.hx(), b.y + eta * grid.hy()};
                const double e = f.local_value(c, xi, eta) - exact(p);
                l2 += w * e * e;
                if (exact_gradient) {
                    const Point d = grad_f - exact_gradient(p);
                    h1 += w * dot(d, d);
                }
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace lrbms
