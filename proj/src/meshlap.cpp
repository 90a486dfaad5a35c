#include "lcmflow/meshlap.hpp"

#include "lcmflow/error.hpp"
#include "parallel_for.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace lcmflow {

namespace {

// Counter-clockwise in image coordinates (y down): E, NE, N, W, SW, S.
constexpr std::array<GridOffset, kRingSize> kUnitRing{
    {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

// Cotangent of the angle at `apex` in triangle (apex, a, b).
double cot_at(Vec2 apex, Vec2 a, Vec2 b, double cot_max) {
    const Vec2 e1 = a - apex;
    const Vec2 e2 = b - apex;
    const double dot = e1.dot(e2);
    const double cross = std::abs(e1.cross(e2));
    if (cross * cot_max <= std::abs(dot)) return dot >= 0.0 ? cot_max : -cot_max;
    return dot / cross;
}

} // namespace

TriGridStencil build_stencil(int width, int height, int density) {
    if (width < 1 || height < 1) throw DimensionError("stencil needs positive dimensions");
    if (density < 1) throw ConfigError("mesh density must be at least 1");
    if (2 * density >= std::min(width, height))
        throw ConfigError("mesh density " + std::to_string(density) + " too large for " +
                          std::to_string(width) + "x" + std::to_string(height) + " image");
    TriGridStencil s;
    s.width = width;
    s.height = height;
    s.density = density;
    for (int k = 0; k < kRingSize; ++k)
        s.offsets[k] = {kUnitRing[k].dx * density, kUnitRing[k].dy * density};
    return s;
}

int level_density(int density, double factor, int level, int width, int height) {
    int d = static_cast<int>(std::lround(density * std::pow(factor, level)));
    d = std::min(d, (std::min(width, height) - 1) / 2);
    return std::max(1, d);
}

RingGeometry ring_geometry_at(const TriGridStencil& stencil, const FlowField& w, int x, int y,
                              AreaMode mode, const MeshLapLimits& limits) {
    RingGeometry g;
    const Vec2 wi = w.at(x, y);
    const Vec2 pi{x + wi.x, y + wi.y};
    std::array<Vec2, kRingSize> p{};
    std::array<Vec2, kRingSize> wj{};
    for (int k = 0; k < kRingSize; ++k) {
        g.present[k] = stencil.neighbor_in_bounds(x, y, k);
        if (!g.present[k]) continue;
        const int nx = x + stencil.offsets[k].dx;
        const int ny = y + stencil.offsets[k].dy;
        wj[k] = w.at(nx, ny);
        p[k] = {nx + wj[k].x, ny + wj[k].y};
        g.edge[k] = pi - p[k];
    }

    // Triangle (i, k, k+1): its angle at k+1 is opposite edge (i,k) and its
    // angle at k is opposite edge (i,k+1).
    for (int k = 0; k < kRingSize; ++k) {
        const int n = (k + 1) % kRingSize;
        if (!g.present[k] || !g.present[n]) continue;
        g.cot_sum[k] += cot_at(p[n], pi, p[k], limits.cot_max);
        g.cot_sum[n] += cot_at(p[k], pi, p[n], limits.cot_max);
    }

    double area = 0.0;
    for (int k = 0; k < kRingSize; ++k) {
        if (!g.present[k]) continue;
        g.cot_sum[k] = std::clamp(g.cot_sum[k], -limits.cot_max, limits.cot_max);
        const double len2 = mode == AreaMode::endpoint_distance ? g.edge[k].norm2()
                                                                : (wi - wj[k]).norm2();
        area += g.cot_sum[k] * len2;
    }
    const double floor = limits.area_floor_factor * stencil.density * stencil.density;
    g.voronoi_area = std::max(area / 8.0, floor);
    return g;
}

std::vector<RingGeometry> ring_geometry(const TriGridStencil& stencil, const FlowField& w,
                                        AreaMode mode, const MeshLapLimits& limits) {
    if (w.width() != stencil.width || w.height() != stencil.height)
        throw DimensionError("flow field does not match stencil dimensions");
    std::vector<RingGeometry> out(w.size());
    parallel_for_rows(w.height(), [&](int y) {
        for (int x = 0; x < w.width(); ++x)
            out[static_cast<std::size_t>(y) * w.width() + x] =
                ring_geometry_at(stencil, w, x, y, mode, limits);
    });
    return out;
}

void write_ring_geometry_csv(std::ostream& os, const TriGridStencil& stencil,
                             const std::vector<RingGeometry>& geometry) {
    os << "pixel,neighbor,cot_sum,voronoi_area\n";
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < geometry.size(); ++i) {
        const int x = static_cast<int>(i % stencil.width);
        const int y = static_cast<int>(i / stencil.width);
        for (int k = 0; k < kRingSize; ++k) {
            if (!geometry[i].present[k]) continue;
            const long nbr = static_cast<long>(y + stencil.offsets[k].dy) * stencil.width + x +
                             stencil.offsets[k].dx;
            os << i << ',' << nbr << ',' << geometry[i].cot_sum[k] << ','
               << geometry[i].voronoi_area << '\n';
        }
    }
    os.precision(old_precision);
}

DeltaField delta_field(const TriGridStencil& stencil, const FlowField& w, AreaMode mode,
                       const MeshLapLimits& limits) {
    return LcmOperator(stencil, w, mode, limits).delta(w);
}

LcmOperator::LcmOperator(const TriGridStencil& stencil, const FlowField& w, AreaMode mode,
                         const MeshLapLimits& limits)
    : stencil_(stencil) {
    if (w.width() != stencil.width || w.height() != stencil.height)
        throw DimensionError("flow field does not match stencil dimensions");
    const std::size_t n = w.size();
    coef_.assign(n * kRingSize, 0.0);
    diag_.assign(n, 0.0);
    t_.assign(n * kRingSize, 0.0);
    nbr_.assign(n * kRingSize, -1);
    t_sum_.assign(n, 0.0);

    const int width = w.width();
    parallel_for_rows(w.height(), [&](int y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const RingGeometry g = ring_geometry_at(stencil, w, x, y, mode, limits);
            double diag = 0.0;
            double inv_sum = 0.0;
            for (int k = 0; k < kRingSize; ++k) {
                if (!g.present[k]) continue;
                nbr_[i * kRingSize + k] =
                    (y + stencil.offsets[k].dy) * width + x + stencil.offsets[k].dx;
                const double c = g.cot_sum[k] / (2.0 * g.voronoi_area);
                coef_[i * kRingSize + k] = c;
                diag += c;
                const double inv = 1.0 / std::max(g.edge[k].norm(), limits.min_distance);
                t_[i * kRingSize + k] = inv;
                inv_sum += inv;
            }
            diag_[i] = diag;
            if (inv_sum > 0.0) {
                double t_sum = 0.0;
                for (int k = 0; k < kRingSize; ++k) {
                    t_[i * kRingSize + k] /= inv_sum;
                    t_sum += t_[i * kRingSize + k];
                }
                t_sum_[i] = t_sum;
            }
        }
    });
    gl_ = gradient_matrix() * laplace_matrix();
}

LcmOperator::SparseMatrix LcmOperator::laplace_matrix() const {
    const std::size_t n = diag_.size();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (kRingSize + 1));
    for (std::size_t i = 0; i < n; ++i) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag_[i]);
        for (int k = 0; k < kRingSize; ++k) {
            const int j = nbr_[i * kRingSize + k];
            if (j >= 0) triplets.emplace_back(static_cast<int>(i), j, -coef_[i * kRingSize + k]);
        }
    }
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

LcmOperator::SparseMatrix LcmOperator::gradient_matrix() const {
    const std::size_t n = diag_.size();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (kRingSize + 1));
    for (std::size_t i = 0; i < n; ++i) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), -t_sum_[i]);
        for (int k = 0; k < kRingSize; ++k) {
            const int j = nbr_[i * kRingSize + k];
            if (j >= 0) triplets.emplace_back(static_cast<int>(i), j, t_[i * kRingSize + k]);
        }
    }
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

Image LcmOperator::laplace(const Image& f) const {
    Image out(width(), height());
    parallel_for_rows(height(), [&](int y) {
        for (int x = 0; x < width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width() + x;
            double acc = 0.0;
            for (int k = 0; k < kRingSize; ++k) {
                const int j = nbr_[i * kRingSize + k];
                if (j >= 0) acc += coef_[i * kRingSize + k] * (f[i] - f[j]);
            }
            out[i] = acc;
        }
    });
    return out;
}

// Transposes gather from neighbors: pixel j = i + offset_k lists i as its
// neighbor opposite(k), so column i of row j is coef_[j][opposite(k)].
Image LcmOperator::laplace_transpose(const Image& g) const {
    Image out(width(), height());
    parallel_for_rows(height(), [&](int y) {
        for (int x = 0; x < width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width() + x;
            double acc = diag_[i] * g[i];
            for (int k = 0; k < kRingSize; ++k) {
                const int j = nbr_[i * kRingSize + k];
                if (j >= 0)
                    acc -= coef_[static_cast<std::size_t>(j) * kRingSize + TriGridStencil::opposite(k)] *
                           g[j];
            }
            out[i] = acc;
        }
    });
    return out;
}

Image LcmOperator::gradient(const Image& f) const {
    Image out(width(), height());
    parallel_for_rows(height(), [&](int y) {
        for (int x = 0; x < width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width() + x;
            double acc = 0.0;
            for (int k = 0; k < kRingSize; ++k) {
                const int j = nbr_[i * kRingSize + k];
                if (j >= 0) acc += t_[i * kRingSize + k] * (f[j] - f[i]);
            }
            out[i] = acc;
        }
    });
    return out;
}

Image LcmOperator::gradient_transpose(const Image& g) const {
    Image out(width(), height());
    parallel_for_rows(height(), [&](int y) {
        for (int x = 0; x < width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width() + x;
            double acc = -t_sum_[i] * g[i];
            for (int k = 0; k < kRingSize; ++k) {
                const int j = nbr_[i * kRingSize + k];
                if (j >= 0)
                    acc += t_[static_cast<std::size_t>(j) * kRingSize + TriGridStencil::opposite(k)] * g[j];
            }
            out[i] = acc;
        }
    });
    return out;
}

Image LcmOperator::weighted_divergence(const Image& f, const Image& weight) const {
    Image g = gradient(f);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= weight[i];
    return gradient_transpose(g);
}

Image LcmOperator::apply_normal(const Image& f, const Image& weight) const {
    return laplace_transpose(weighted_divergence(laplace(f), weight));
}

DeltaField LcmOperator::delta(const FlowField& w) const {
    return {laplace(w.u), laplace(w.v)};
}

DeltaField delta_divergence(const LcmOperator& op, const DeltaField& delta, const Image& weight) {
    if (!delta.delta_u.same_shape(weight) || !delta.delta_v.same_shape(weight) ||
        weight.width() != op.width() || weight.height() != op.height())
        throw DimensionError("delta_divergence inputs differ in size");
    return {op.weighted_divergence(delta.delta_u, weight),
            op.weighted_divergence(delta.delta_v, weight)};
}

} // namespace lcmflow
