#pragma once

#include "lcmflow/derivatives.hpp"
#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"
#include "lcmflow/meshlap.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <string>

namespace lcmflow {

enum class LinearSolver { cg, sor };

std::string to_string(LinearSolver s);
LinearSolver linear_solver_from_string(const std::string& name);

struct SolverParams {
    double epsilon = 0.001;   // robust penalty offset
    double theta = 0.5;       // gradient-constancy weight
    double lambda = 0.85;     // global smoothness weight
    double xi = 0.6;          // mesh (LCM) smoothness weight
    int mesh_density = 25;    // pixels between mesh vertices at the finest level
    double pyramid_factor = 0.75;
    int min_dim = 16;
    int outer_iters = 30;
    int inner_iters = 5;
    LinearSolver linear_solver = LinearSolver::cg;
    int cg_iters = 45;        // iteration count for either linear solver
    double sor_omega = 1.9;
    double presmooth_sigma = 0.0;
    AreaMode area_mode = AreaMode::endpoint_distance;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Robust penalty psi(s^2) = sqrt(s^2 + eps^2) and its derivative with
/// respect to s^2.
double psi(double s2, double epsilon);
double psi_prime(double s2, double epsilon);

struct FlowIncrement {
    Image du;
    Image dv;

    FlowIncrement() = default;
    FlowIncrement(int width, int height) : du(width, height), dv(width, height) {}
    FlowIncrement(Image du_, Image dv_) : du(std::move(du_)), dv(std::move(dv_)) {}
};

struct DiffusivityFields {
    Image psi_data;
    Image psi_global;
    Image psi_lap;
};

/// Squared forward-difference gradient magnitude |grad u|^2 + |grad v|^2 of a
/// flow field, zero across the last row and column.
Image flow_gradient_magnitude2(const Image& u, const Image& v);

/// Diffusivities at (w + dw). `lcm` may be null (mesh term disabled), in
/// which case psi_lap is filled with psi'(0).
DiffusivityFields diffusivities(const DerivativeSet& deriv, const FlowField& w,
                                const FlowIncrement& dw, const LcmOperator* lcm,
                                const SolverParams& params);

/// Linearized normal equations for the flow increment. Unknowns are the
/// per-pixel pairs (du, dv). The matrix is
///   blockdiag(data_i) + S (x) I_2,
///   S = lambda * Dx^T Pg Dx + lambda * Dy^T Pg Dy + xi * L^T G^T Pl G L
/// with forward differences Dx, Dy, the frozen mesh operators L, G and the
/// diffusivities Pg, Pl on the diagonal. S is symmetric by construction.
struct LinearSystem {
    int width = 0;
    int height = 0;
    Image a11, a12, a22;        // data blocks
    Image edge_x, edge_y;       // lambda * psi_global per forward edge
    std::shared_ptr<const LcmOperator> lcm;
    Image lap_weight;           // xi * psi_lap
    Image bu, bv;

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }

    /// Scalar smoothness operator S applied to one component.
    Image apply_smoothness(const Image& f) const;
    FlowIncrement apply(const FlowIncrement& x) const;
    /// Diagonal of S.
    Image smoothness_diagonal() const;

    /// S as a sparse matrix (pixels x pixels).
    Eigen::SparseMatrix<double, Eigen::RowMajor> smoothness_matrix() const;
    /// Full matrix with unknowns interleaved as (du_0, dv_0, du_1, dv_1, ...).
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix() const;
    Eigen::VectorXd rhs() const;
};

/// Assembles the system at the current flow w. With params.xi == 0 or a
/// null `lcm` the mesh term is skipped. Throws NumericalError naming the first
/// pixel with a non-finite entry.
LinearSystem assemble_system(const DerivativeSet& deriv, const FlowField& w,
                             const DiffusivityFields& diff, std::shared_ptr<const LcmOperator> lcm,
                             const SolverParams& params);

struct LinearSolveResult {
    FlowIncrement increment;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Fixed-count iterative solve from a zero initial guess. CG is
/// preconditioned with an incomplete Cholesky factor of the smoothness
/// operator plus the mean data diagonal; SOR sweeps the 2x2 pixel blocks in
/// raster order. Stops early only when ||r||_2 < 1e-12.
LinearSolveResult solve_linear(const LinearSystem& system, LinearSolver method, int iters,
                               double sor_omega = 1.9);

/// CG preconditioner built from one assembled system. It stays valid (SPD)
/// for any later system of the same size, which lets the flow solver factor
/// once per warp and reuse the factor across the inner iterations.
class CgPreconditioner {
public:
    explicit CgPreconditioner(const LinearSystem& system);
    FlowIncrement apply(const FlowIncrement& r) const;

private:
    struct Factor;
    std::shared_ptr<const Factor> factor_;
};

LinearSolveResult solve_linear(const LinearSystem& system, const CgPreconditioner& precond, int iters);

struct EnergyTerms {
    double data = 0.0;
    double global = 0.0;
    double lap = 0.0;
    double total = 0.0;
};

/// Nonlinear energy of w on one image pair, evaluated directly from the
/// images (bicubic warp, robust penalties, mesh term at ring geometry of w).
/// `density` is the mesh density to use; ignored when xi == 0.
EnergyTerms evaluate_energy(const Image& first, const Image& second, const FlowField& w,
                            const SolverParams& params, int density);

struct IterationInfo {
    int level = 0;          // pyramid level, 0 = finest
    int level_count = 0;
    int outer = 0;          // outer (warping) iteration within the level
    int mesh_density = 0;   // 0 when the mesh term is disabled
    const FlowField* flow = nullptr;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// Coarse-to-fine estimator. Immutable after construction; compute() may be
/// called concurrently on different inputs.
class FlowSolver {
public:
    explicit FlowSolver(SolverParams params);

    const SolverParams& params() const { return params_; }

    FlowField compute(const Image& first, const Image& second,
                      const IterationObserver& observer = {}) const;

private:
    SolverParams params_;
};

FlowField compute_flow(const Image& first, const Image& second, const SolverParams& params);

} // namespace lcmflow
