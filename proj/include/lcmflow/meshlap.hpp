#pragma once

#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>
#include <vector>

namespace lcmflow {

/// Integer pixel offset of a ring neighbor.
struct GridOffset {
    int dx = 0;
    int dy = 0;
    bool operator==(const GridOffset&) const = default;
};

inline constexpr int kRingSize = 6;

/// Regular grid triangulation with vertices every `density` pixels and
/// north-east diagonals. Every pixel carries a virtual 1-ring with the same
/// offset pattern, listed counter-clockwise so that consecutive offsets
/// (k, k+1 mod 6) span one triangle of the ring. offsets[(k+3) % 6] is the
/// negation of offsets[k].
struct TriGridStencil {
    int width = 0;
    int height = 0;
    int density = 1;
    std::array<GridOffset, kRingSize> offsets{};

    static constexpr int opposite(int k) { return (k + 3) % kRingSize; }

    bool neighbor_in_bounds(int x, int y, int k) const {
        const int nx = x + offsets[k].dx;
        const int ny = y + offsets[k].dy;
        return nx >= 0 && ny >= 0 && nx < width && ny < height;
    }
};

/// Throws ConfigError unless 1 <= density < min(width, height) / 2.
TriGridStencil build_stencil(int width, int height, int density);

/// Density used at pyramid level k (0 = finest): max(1, round(d * factor^k)),
/// capped so that the stencil stays valid on a width x height level.
int level_density(int density, double factor, int level, int width, int height);

/// How the Voronoi area measures edge lengths. endpoint_distance uses
/// |p_i - p_j| with p = X + w; flow_difference uses |w_i - w_j| literally.
enum class AreaMode { endpoint_distance, flow_difference };

struct MeshLapLimits {
    double cot_max = 1e4;
    double area_floor_factor = 1e-4; // floor = factor * density^2
    double min_distance = 1e-6;      // t-weight distance floor
};

/// Deformed 1-ring geometry of one pixel. Entries for out-of-bounds
/// neighbors have present == false and contribute nothing.
struct RingGeometry {
    std::array<bool, kRingSize> present{};
    std::array<double, kRingSize> cot_sum{};
    /// p_i - p_j at endpoint positions.
    std::array<Vec2, kRingSize> edge{};
    double voronoi_area = 0.0;
};

RingGeometry ring_geometry_at(const TriGridStencil& stencil, const FlowField& w, int x, int y,
                              AreaMode mode = AreaMode::endpoint_distance,
                              const MeshLapLimits& limits = {});

/// Row-major per-pixel ring geometry at endpoint positions X + w.
std::vector<RingGeometry> ring_geometry(const TriGridStencil& stencil, const FlowField& w,
                                        AreaMode mode = AreaMode::endpoint_distance,
                                        const MeshLapLimits& limits = {});

/// Debug dump: one line per (pixel, present neighbor) with linear indices.
void write_ring_geometry_csv(std::ostream& os, const TriGridStencil& stencil,
                             const std::vector<RingGeometry>& geometry);

/// Area-normalized cotangent Laplacian coordinates of a flow field.
struct DeltaField {
    Image delta_u;
    Image delta_v;
};

DeltaField delta_field(const TriGridStencil& stencil, const FlowField& w,
                       AreaMode mode = AreaMode::endpoint_distance,
                       const MeshLapLimits& limits = {});

/// Linear operators of the mesh smoothness term with the ring geometry frozen
/// at one flow estimate:
///   laplace:  (L f)_i = sum_j c_ij (f_i - f_j) / (2 A_i)
///   gradient: (G f)_i = sum_j t_ij (f_j - f_i), t_ij ~ 1/|p_i - p_j| normalized
/// For that frozen flow w, laplace(w.u), laplace(w.v) equal delta_field(w).
class LcmOperator {
public:
    LcmOperator() = default;
    LcmOperator(const TriGridStencil& stencil, const FlowField& w,
                AreaMode mode = AreaMode::endpoint_distance, const MeshLapLimits& limits = {});

    const TriGridStencil& stencil() const { return stencil_; }
    int width() const { return stencil_.width; }
    int height() const { return stencil_.height; }

    Image laplace(const Image& f) const;
    Image laplace_transpose(const Image& g) const;
    Image gradient(const Image& f) const;
    Image gradient_transpose(const Image& g) const;

    /// G^T diag(weight) G applied to f: the negative weighted divergence of
    /// the ring gradient.
    Image weighted_divergence(const Image& f, const Image& weight) const;

    /// L^T G^T diag(weight) G L applied to f; the mesh term's contribution to
    /// the linear system for one flow component.
    Image apply_normal(const Image& f, const Image& weight) const;

    DeltaField delta(const FlowField& w) const;

    /// Per-pixel coefficient of neighbor k in laplace() (present neighbors
    /// only, zero otherwise) and the matching diagonal.
    double laplace_coefficient(std::size_t pixel, int k) const { return coef_[pixel * kRingSize + k]; }
    double laplace_diagonal(std::size_t pixel) const { return diag_[pixel]; }
    double gradient_weight(std::size_t pixel, int k) const { return t_[pixel * kRingSize + k]; }
    double gradient_row_sum(std::size_t pixel) const { return t_sum_[pixel]; }
    /// Linear index of neighbor k, or -1 when out of bounds.
    int neighbor_index(std::size_t pixel, int k) const { return nbr_[pixel * kRingSize + k]; }

    using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseMatrix laplace_matrix() const;
    SparseMatrix gradient_matrix() const;
    /// G * L, built once at construction.
    const SparseMatrix& gradient_laplace() const { return gl_; }

private:
    TriGridStencil stencil_;
    std::vector<double> coef_;
    std::vector<double> diag_;
    std::vector<double> t_;
    std::vector<double> t_sum_;
    std::vector<int> nbr_;
    SparseMatrix gl_;
};

/// Weighted ring divergence of a delta field: returns
/// (G^T(weight * G delta_u), G^T(weight * G delta_v)). With
/// weight = xi * psi'_lap this is the mesh term's row contribution in delta
/// space.
DeltaField delta_divergence(const LcmOperator& op, const DeltaField& delta, const Image& weight);

} // namespace lcmflow
