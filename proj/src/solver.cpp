#include "lcmflow/solver.hpp"

#include "lcmflow/error.hpp"
#include "lcmflow/pyramid.hpp"
#include "parallel_for.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace lcmflow {

std::string to_string(LinearSolver s) { return s == LinearSolver::cg ? "cg" : "sor"; }

LinearSolver linear_solver_from_string(const std::string& name) {
    if (name == "cg") return LinearSolver::cg;
    if (name == "sor") return LinearSolver::sor;
    throw ConfigError("unknown linear solver '" + name + "' (expected cg or sor)");
}

void SolverParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (!(theta >= 0.0 && theta <= 1.0)) fail("theta must lie in [0,1]");
    if (!(lambda >= 0.0)) fail("lambda must be non-negative");
    if (!(xi >= 0.0)) fail("xi must be non-negative");
    if (mesh_density < 1) fail("mesh density must be at least 1");
    if (!(pyramid_factor > 0.0 && pyramid_factor < 1.0)) fail("pyramid factor must lie in (0,1)");
    if (min_dim < 8) fail("min_dim must be at least 8");
    if (outer_iters < 1 || inner_iters < 1 || cg_iters < 1) fail("iteration counts must be >= 1");
    if (!(sor_omega > 0.0 && sor_omega < 2.0)) fail("SOR omega must lie in (0,2)");
    if (!(presmooth_sigma >= 0.0)) fail("presmooth sigma must be non-negative");
}

double psi(double s2, double epsilon) { return std::sqrt(s2 + epsilon * epsilon); }

double psi_prime(double s2, double epsilon) { return 0.5 / std::sqrt(s2 + epsilon * epsilon); }

Image flow_gradient_magnitude2(const Image& u, const Image& v) {
    const int w = u.width();
    const int h = u.height();
    Image out(w, h);
    parallel_for_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            if (x + 1 < w) {
                const double ux = u(x + 1, y) - u(x, y);
                const double vx = v(x + 1, y) - v(x, y);
                s += ux * ux + vx * vx;
            }
            if (y + 1 < h) {
                const double uy = u(x, y + 1) - u(x, y);
                const double vy = v(x, y + 1) - v(x, y);
                s += uy * uy + vy * vy;
            }
            out(x, y) = s;
        }
    });
    return out;
}

namespace {

Image add(const Image& a, const Image& b) {
    Image out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

void check_same_shape(const DerivativeSet& deriv, const FlowField& w) {
    if (deriv.width() != w.width() || deriv.height() != w.height())
        throw DimensionError("derivative fields and flow differ in size");
}

} // namespace

DiffusivityFields diffusivities(const DerivativeSet& deriv, const FlowField& w,
                                const FlowIncrement& dw, const LcmOperator* lcm,
                                const SolverParams& params) {
    check_same_shape(deriv, w);
    if (!dw.du.same_shape(w.u) || !dw.dv.same_shape(w.u))
        throw DimensionError("flow increment and flow differ in size");
    const int width = w.width();
    const int height = w.height();
    const double eps = params.epsilon;
    const double theta = params.theta;

    DiffusivityFields out{Image(width, height), Image(width, height), Image(width, height)};
    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double du = dw.du(x, y);
            const double dv = dw.dv(x, y);
            const double r0 = deriv.Iz(x, y) + deriv.Ix(x, y) * du + deriv.Iy(x, y) * dv;
            const double rx = deriv.Ixz(x, y) + deriv.Ixx(x, y) * du + deriv.Ixy(x, y) * dv;
            const double ry = deriv.Iyz(x, y) + deriv.Ixy(x, y) * du + deriv.Iyy(x, y) * dv;
            out.psi_data(x, y) = psi_prime(r0 * r0 + theta * (rx * rx + ry * ry), eps);
        }
    });

    const Image u1 = add(w.u, dw.du);
    const Image v1 = add(w.v, dw.dv);
    const Image grad2 = flow_gradient_magnitude2(u1, v1);
    for (std::size_t i = 0; i < grad2.size(); ++i) out.psi_global[i] = psi_prime(grad2[i], eps);

    if (lcm != nullptr) {
        const Image gu = lcm->gradient(lcm->laplace(u1));
        const Image gv = lcm->gradient(lcm->laplace(v1));
        for (std::size_t i = 0; i < gu.size(); ++i)
            out.psi_lap[i] = psi_prime(gu[i] * gu[i] + gv[i] * gv[i], eps);
    } else {
        for (double& p : out.psi_lap.values()) p = psi_prime(0.0, eps);
    }
    return out;
}

Image LinearSystem::apply_smoothness(const Image& f) const {
    Image out(width, height);
    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double c = f(x, y);
            double acc = 0.0;
            if (x + 1 < width) acc += edge_x(x, y) * (c - f(x + 1, y));
            if (x > 0) acc += edge_x(x - 1, y) * (c - f(x - 1, y));
            if (y + 1 < height) acc += edge_y(x, y) * (c - f(x, y + 1));
            if (y > 0) acc += edge_y(x, y - 1) * (c - f(x, y - 1));
            out(x, y) = acc;
        }
    });
    if (lcm) {
        const Image lap = lcm->apply_normal(f, lap_weight);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += lap[i];
    }
    return out;
}

FlowIncrement LinearSystem::apply(const FlowIncrement& x) const {
    FlowIncrement out(apply_smoothness(x.du), apply_smoothness(x.dv));
    for (std::size_t i = 0; i < pixels(); ++i) {
        out.du[i] += a11[i] * x.du[i] + a12[i] * x.dv[i];
        out.dv[i] += a12[i] * x.du[i] + a22[i] * x.dv[i];
    }
    return out;
}

Image LinearSystem::smoothness_diagonal() const {
    Image diag(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double d = 0.0;
            if (x + 1 < width) d += edge_x(x, y);
            if (x > 0) d += edge_x(x - 1, y);
            if (y + 1 < height) d += edge_y(x, y);
            if (y > 0) d += edge_y(x, y - 1);
            diag(x, y) = d;
        }
    }
    if (lcm) {
        const auto& gl = lcm->gradient_laplace();
        for (int row = 0; row < gl.outerSize(); ++row) {
            const double wgt = lap_weight[row];
            for (LcmOperator::SparseMatrix::InnerIterator it(gl, row); it; ++it)
                diag[it.col()] += wgt * it.value() * it.value();
        }
    }
    return diag;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> LinearSystem::smoothness_matrix() const {
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
    const int n = static_cast<int>(pixels());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 8);
    auto add_edge = [&](int i, int j, double wgt) {
        if (wgt == 0.0) return;
        triplets.emplace_back(i, i, wgt);
        triplets.emplace_back(j, j, wgt);
        triplets.emplace_back(i, j, -wgt);
        triplets.emplace_back(j, i, -wgt);
    };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int i = y * width + x;
            if (x + 1 < width) add_edge(i, i + 1, edge_x(x, y));
            if (y + 1 < height) add_edge(i, i + width, edge_y(x, y));
        }
    }
    Sparse s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    if (lcm) {
        const auto& gl = lcm->gradient_laplace();
        Eigen::VectorXd wgt(n);
        for (int i = 0; i < n; ++i) wgt[i] = lap_weight[i];
        const Sparse weighted = wgt.asDiagonal() * gl;
        const Sparse normal = Sparse(gl.transpose()) * weighted;
        s += normal;
    }
    return s;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> LinearSystem::matrix() const {
    const auto s = smoothness_matrix();
    const int n = static_cast<int>(pixels());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(s.nonZeros()) * 2 + static_cast<std::size_t>(n) * 4);
    for (int row = 0; row < s.outerSize(); ++row)
        for (decltype(s)::InnerIterator it(s, row); it; ++it) {
            const int col = static_cast<int>(it.col());
            triplets.emplace_back(2 * row, 2 * col, it.value());
            triplets.emplace_back(2 * row + 1, 2 * col + 1, it.value());
        }
    for (int i = 0; i < n; ++i) {
        triplets.emplace_back(2 * i, 2 * i, a11[i]);
        triplets.emplace_back(2 * i, 2 * i + 1, a12[i]);
        triplets.emplace_back(2 * i + 1, 2 * i, a12[i]);
        triplets.emplace_back(2 * i + 1, 2 * i + 1, a22[i]);
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(2 * n, 2 * n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

Eigen::VectorXd LinearSystem::rhs() const {
    Eigen::VectorXd b(2 * static_cast<Eigen::Index>(pixels()));
    for (std::size_t i = 0; i < pixels(); ++i) {
        b[2 * static_cast<Eigen::Index>(i)] = bu[i];
        b[2 * static_cast<Eigen::Index>(i) + 1] = bv[i];
    }
    return b;
}

LinearSystem assemble_system(const DerivativeSet& deriv, const FlowField& w,
                             const DiffusivityFields& diff, std::shared_ptr<const LcmOperator> lcm,
                             const SolverParams& params) {
    check_same_shape(deriv, w);
    if (!diff.psi_data.same_shape(w.u) || !diff.psi_global.same_shape(w.u) ||
        !diff.psi_lap.same_shape(w.u))
        throw DimensionError("diffusivity fields and flow differ in size");
    if (lcm && (lcm->width() != w.width() || lcm->height() != w.height()))
        throw DimensionError("mesh operator and flow differ in size");

    const int width = w.width();
    const int height = w.height();
    const double theta = params.theta;
    LinearSystem sys;
    sys.width = width;
    sys.height = height;
    sys.a11 = Image(width, height);
    sys.a12 = Image(width, height);
    sys.a22 = Image(width, height);
    sys.bu = Image(width, height);
    sys.bv = Image(width, height);
    sys.edge_x = Image(width, height);
    sys.edge_y = Image(width, height);

    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double p = diff.psi_data(x, y);
            const double ix = deriv.Ix(x, y), iy = deriv.Iy(x, y), iz = deriv.Iz(x, y);
            const double ixx = deriv.Ixx(x, y), ixy = deriv.Ixy(x, y), iyy = deriv.Iyy(x, y);
            const double ixz = deriv.Ixz(x, y), iyz = deriv.Iyz(x, y);
            sys.a11(x, y) = p * (ix * ix + theta * (ixx * ixx + ixy * ixy));
            sys.a12(x, y) = p * (ix * iy + theta * (ixx * ixy + ixy * iyy));
            sys.a22(x, y) = p * (iy * iy + theta * (ixy * ixy + iyy * iyy));
            sys.bu(x, y) = -p * (ix * iz + theta * (ixx * ixz + ixy * iyz));
            sys.bv(x, y) = -p * (iy * iz + theta * (ixy * ixz + iyy * iyz));
            // Forward-difference gradient at (x,y) carries psi_global(x,y).
            const double g = params.lambda * diff.psi_global(x, y);
            sys.edge_x(x, y) = x + 1 < width ? g : 0.0;
            sys.edge_y(x, y) = y + 1 < height ? g : 0.0;
        }
    });

    if (lcm && params.xi > 0.0) {
        sys.lcm = std::move(lcm);
        sys.lap_weight = Image(width, height);
        for (std::size_t i = 0; i < sys.lap_weight.size(); ++i)
            sys.lap_weight[i] = params.xi * diff.psi_lap[i];
    }

    // Smoothness acts on w + dw, so S w moves to the right-hand side.
    const Image su = sys.apply_smoothness(w.u);
    const Image sv = sys.apply_smoothness(w.v);
    for (std::size_t i = 0; i < sys.pixels(); ++i) {
        sys.bu[i] -= su[i];
        sys.bv[i] -= sv[i];
    }

    for (std::size_t i = 0; i < sys.pixels(); ++i) {
        const bool ok = std::isfinite(sys.a11[i]) && std::isfinite(sys.a12[i]) &&
                        std::isfinite(sys.a22[i]) && std::isfinite(sys.bu[i]) &&
                        std::isfinite(sys.bv[i]) && std::isfinite(sys.edge_x[i]) &&
                        std::isfinite(sys.edge_y[i]) &&
                        (!sys.lcm || std::isfinite(sys.lap_weight[i]));
        if (!ok)
            throw NumericalError("non-finite system entry at pixel (" +
                                 std::to_string(i % width) + ", " + std::to_string(i / width) + ")");
    }
    return sys;
}

namespace {

constexpr double kResidualStop = 1e-12;

void check_finite(const FlowIncrement& x, int iteration) {
    if (!x.du.all_finite() || !x.dv.all_finite())
        throw NumericalError("linear solver diverged at iteration " + std::to_string(iteration));
}

double dot(const FlowIncrement& a, const FlowIncrement& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.du.size(); ++i) s += a.du[i] * b.du[i] + a.dv[i] * b.dv[i];
    return s;
}

LinearSolveResult solve_cg(const LinearSystem& sys, const CgPreconditioner* shared, int iters) {
    LinearSolveResult res;
    res.increment = FlowIncrement(sys.width, sys.height);
    FlowIncrement& x = res.increment;
    FlowIncrement r(sys.bu, sys.bv);
    res.residual_norm = std::sqrt(dot(r, r));
    if (res.residual_norm < kResidualStop) return res;

    std::optional<CgPreconditioner> own;
    if (!shared) own.emplace(sys);
    const CgPreconditioner& precond = shared ? *shared : *own;
    FlowIncrement z = precond.apply(r);
    FlowIncrement p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= iters; ++it) {
        const FlowIncrement ap = sys.apply(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < sys.pixels(); ++i) {
            x.du[i] += alpha * p.du[i];
            x.dv[i] += alpha * p.dv[i];
            r.du[i] -= alpha * ap.du[i];
            r.dv[i] -= alpha * ap.dv[i];
        }
        check_finite(x, it);
        res.iterations = it;
        res.residual_norm = std::sqrt(dot(r, r));
        if (res.residual_norm < kResidualStop) break;
        z = precond.apply(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < sys.pixels(); ++i) {
            p.du[i] = z.du[i] + beta * p.du[i];
            p.dv[i] = z.dv[i] + beta * p.dv[i];
        }
    }
    return res;
}

LinearSolveResult solve_sor(const LinearSystem& sys, int iters, double omega) {
    const int w = sys.width;
    const int h = sys.height;
    LinearSolveResult res;
    res.increment = FlowIncrement(w, h);
    FlowIncrement& x = res.increment;
    {
        const FlowIncrement b(sys.bu, sys.bv);
        res.residual_norm = std::sqrt(dot(b, b));
        if (res.residual_norm < kResidualStop) return res;
    }
    const auto s = sys.smoothness_matrix();
    const std::size_t n = sys.pixels();
    for (int it = 1; it <= iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double off_u = 0.0;
            double off_v = 0.0;
            double sii = 0.0;
            for (decltype(s)::InnerIterator e(s, static_cast<Eigen::Index>(i)); e; ++e) {
                const auto j = static_cast<std::size_t>(e.col());
                if (j == i) {
                    sii = e.value();
                    continue;
                }
                off_u += e.value() * x.du[j];
                off_v += e.value() * x.dv[j];
            }
            const double a = sys.a11[i] + sii;
            const double b = sys.a12[i];
            const double d = sys.a22[i] + sii;
            const double ru = sys.bu[i] - off_u;
            const double rv = sys.bv[i] - off_v;
            const double det = a * d - b * b;
            double gu, gv;
            if (det > 0.0) {
                gu = (d * ru - b * rv) / det;
                gv = (a * rv - b * ru) / det;
            } else {
                gu = a > 0.0 ? ru / a : x.du[i];
                gv = d > 0.0 ? rv / d : x.dv[i];
            }
            x.du[i] += omega * (gu - x.du[i]);
            x.dv[i] += omega * (gv - x.dv[i]);
        }
        check_finite(x, it);
        res.iterations = it;
        const FlowIncrement ax = sys.apply(x);
        double rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eu = sys.bu[i] - ax.du[i];
            const double ev = sys.bv[i] - ax.dv[i];
            rr += eu * eu + ev * ev;
        }
        res.residual_norm = std::sqrt(rr);
        if (res.residual_norm < kResidualStop) break;
    }
    return res;
}

} // namespace

struct CgPreconditioner::Factor {
    Eigen::Index n = 0;
    Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::NaturalOrdering<int>> ic;
    bool factored = false;
    Eigen::VectorXd inv_diag;

    Image solve(const Image& r) const {
        const Eigen::Map<const Eigen::VectorXd> rv(r.values().data(), n);
        const Eigen::VectorXd z = factored ? Eigen::VectorXd(ic.solve(rv)) : Eigen::VectorXd(inv_diag.cwiseProduct(rv));
        return Image(r.width(), r.height(), std::vector<double>(z.data(), z.data() + n));
    }
};

CgPreconditioner::CgPreconditioner(const LinearSystem& sys) {
    auto factor = std::make_shared<Factor>();
    Factor& f = *factor;
    f.n = static_cast<Eigen::Index>(sys.pixels());
    Eigen::SparseMatrix<double> m = sys.smoothness_matrix();
    Eigen::VectorXd diag(f.n);
    for (Eigen::Index i = 0; i < f.n; ++i) diag[i] = 0.5 * (sys.a11[i] + sys.a22[i]);
    m += Eigen::SparseMatrix<double>(diag.asDiagonal());
    f.ic.compute(m);
    f.factored = f.ic.info() == Eigen::Success;
    if (!f.factored) {
        f.inv_diag = m.diagonal();
        for (Eigen::Index i = 0; i < f.n; ++i) f.inv_diag[i] = f.inv_diag[i] > 0.0 ? 1.0 / f.inv_diag[i] : 0.0;
    }
    factor_ = std::move(factor);
}

FlowIncrement CgPreconditioner::apply(const FlowIncrement& r) const {
    return {factor_->solve(r.du), factor_->solve(r.dv)};
}

LinearSolveResult solve_linear(const LinearSystem& system, LinearSolver method, int iters,
                               double sor_omega) {
    if (iters < 1) throw ConfigError("linear solver needs at least one iteration");
    return method == LinearSolver::cg ? solve_cg(system, nullptr, iters)
                                      : solve_sor(system, iters, sor_omega);
}

LinearSolveResult solve_linear(const LinearSystem& system, const CgPreconditioner& precond, int iters) {
    if (iters < 1) throw ConfigError("linear solver needs at least one iteration");
    return solve_cg(system, &precond, iters);
}

EnergyTerms evaluate_energy(const Image& first, const Image& second, const FlowField& w,
                            const SolverParams& params, int density) {
    if (!first.same_shape(second) || !w.same_shape(first))
        throw DimensionError("energy inputs differ in size");
    const double eps = params.epsilon;
    const SpatialDerivatives d1 = spatial_derivatives(first);
    const SpatialDerivatives d2 = spatial_derivatives(second);
    EnergyTerms e;
    for (int y = 0; y < first.height(); ++y) {
        for (int x = 0; x < first.width(); ++x) {
            const double px = x + w.u(x, y);
            const double py = y + w.v(x, y);
            const double r0 = sample_bicubic(second, px, py) - first(x, y);
            const double rx = sample_bicubic(d2.dx, px, py) - d1.dx(x, y);
            const double ry = sample_bicubic(d2.dy, px, py) - d1.dy(x, y);
            e.data += psi(r0 * r0 + params.theta * (rx * rx + ry * ry), eps);
        }
    }
    const Image g2 = flow_gradient_magnitude2(w.u, w.v);
    for (std::size_t i = 0; i < g2.size(); ++i) e.global += psi(g2[i], eps);
    if (params.xi > 0.0) {
        const LcmOperator op(build_stencil(w.width(), w.height(), density), w, params.area_mode);
        const DeltaField delta = op.delta(w);
        const Image gu = op.gradient(delta.delta_u);
        const Image gv = op.gradient(delta.delta_v);
        for (std::size_t i = 0; i < gu.size(); ++i) e.lap += psi(gu[i] * gu[i] + gv[i] * gv[i], eps);
    }
    e.total = e.data + params.lambda * e.global + params.xi * e.lap;
    return e;
}

FlowSolver::FlowSolver(SolverParams params) : params_(params) { params_.validate(); }

FlowField FlowSolver::compute(const Image& first, const Image& second,
                              const IterationObserver& observer) const {
    const SolverParams& p = params_;
    if (!first.same_shape(second)) throw DimensionError("input images differ in size");
    if (first.width() < p.min_dim || first.height() < p.min_dim)
        throw DimensionError("input images are smaller than min_dim = " + std::to_string(p.min_dim));
    if (!first.all_finite() || !second.all_finite())
        throw NumericalError("input images contain non-finite values");
    const bool use_mesh = p.xi > 0.0;
    if (use_mesh) build_stencil(first.width(), first.height(), p.mesh_density);

    const Image i1 = gaussian_blur(first, p.presmooth_sigma);
    const Image i2 = gaussian_blur(second, p.presmooth_sigma);
    const ImagePyramid pyr1 = build_pyramid(i1, p.pyramid_factor, p.min_dim);
    const ImagePyramid pyr2 = build_pyramid(i2, p.pyramid_factor, p.min_dim);
    const int levels = pyr1.level_count();

    FlowField w;
    for (int level = levels - 1; level >= 0; --level) {
        const Image& l1 = pyr1.levels[level];
        const Image& l2 = pyr2.levels[level];
        w = level == levels - 1 ? FlowField(l1.width(), l1.height())
                                : resize_flow(w, l1.width(), l1.height());
        const FramePair pair(l1, l2);

        TriGridStencil stencil;
        int density = 0;
        if (use_mesh) {
            density = level == 0 ? p.mesh_density
                                 : level_density(p.mesh_density, p.pyramid_factor, level,
                                                 l1.width(), l1.height());
            stencil = build_stencil(l1.width(), l1.height(), density);
        }

        for (int k = 0; k < p.outer_iters; ++k) {
            const DerivativeSet deriv = warped_derivatives(pair, w);
            std::shared_ptr<const LcmOperator> lcm;
            if (use_mesh) lcm = std::make_shared<const LcmOperator>(stencil, w, p.area_mode);

            FlowIncrement dw(l1.width(), l1.height());
            std::optional<CgPreconditioner> precond;
            for (int l = 0; l < p.inner_iters; ++l) {
                const DiffusivityFields diff = diffusivities(deriv, w, dw, lcm.get(), p);
                const LinearSystem sys = assemble_system(deriv, w, diff, lcm, p);
                if (p.linear_solver == LinearSolver::sor) {
                    dw = solve_linear(sys, LinearSolver::sor, p.cg_iters, p.sor_omega).increment;
                    continue;
                }
                // Factor lazily: systems with a zero right-hand side (identical
                // frames, converged warps) need no solve at all.
                if (!precond) {
                    const FlowIncrement b(sys.bu, sys.bv);
                    if (std::sqrt(dot(b, b)) < kResidualStop) {
                        dw = FlowIncrement(l1.width(), l1.height());
                        continue;
                    }
                    precond.emplace(sys);
                }
                dw = solve_linear(sys, *precond, p.cg_iters).increment;
            }
            for (std::size_t i = 0; i < w.size(); ++i) {
                w.u[i] += dw.du[i];
                w.v[i] += dw.dv[i];
            }
            if (!w.all_finite()) throw NumericalError("flow became non-finite");
            if (observer) observer({level, levels, k, density, &w});
        }
    }
    return w;
}

FlowField compute_flow(const Image& first, const Image& second, const SolverParams& params) {
    return FlowSolver(params).compute(first, second);
}

} // namespace lcmflow
