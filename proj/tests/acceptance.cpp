// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// Optional dataset variant of criterion 3:
//   acceptance --dataset-flow est.flo --dataset-gt gt.flo

#include "oracles.hpp"

#include "lcmflow/benchmark.hpp"
#include "lcmflow/flo_io.hpp"
#include "lcmflow/image_io.hpp"
#include "lcmflow/meshlap.hpp"
#include "lcmflow/metrics.hpp"
#include "lcmflow/parallel.hpp"
#include "lcmflow/solver.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace lcmflow;
using namespace lcmtest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, const Outcome& o) {
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " | " << o.detail
              << std::endl;
}

Outcome guarded(const std::function<Outcome()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + LCMFLOW_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome identity_pair() {
    double worst = 0.0, slowest = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Image img = band_limited_noise(128, 128, seed);
        const auto t0 = std::chrono::steady_clock::now();
        const FlowField w = compute_flow(img, img, SolverParams{});
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, w.max_magnitude());
    }
    return {worst <= 1e-6 && slowest < 5.0,
            "max|w| = " + fmt("%.3g", worst) + " (<= 1e-6), slowest run " + fmt("%.2f", slowest) +
                " s at 128x128 (< 5 s)"};
}

Outcome translation() {
    const Image first = band_limited_noise(128, 128, 42);
    const Image second = circular_shift(first, 3, 2);
    const auto t0 = std::chrono::steady_clock::now();
    const FlowField w = compute_flow(first, second, SolverParams{});
    const double elapsed = seconds_since(t0);
    PixelMask mask(w.size(), 0);
    for (int y = 10; y < 118; ++y)
        for (int x = 10; x < 118; ++x) mask[static_cast<std::size_t>(y) * 128 + x] = 1;
    const ErrorReport r = endpoint_error(w, FlowField::constant(128, 128, 3.0, 2.0), mask);
    return {r.mean_epe < 0.2, "interior mean EPE " + fmt("%.4g", r.mean_epe) + " px (< 0.2), " +
                                  fmt("%.1f", elapsed) + " s"};
}

Outcome lcm_benefit() {
    const SyntheticSequence seq = synth_sequence(256, 256, 6.0, 2, 42);
    SolverParams base;
    base.xi = 0.0;
    SolverParams mesh;
    mesh.xi = 0.8;
    mesh.mesh_density = 5;
    const auto t0 = std::chrono::steady_clock::now();
    const double rms0 = endpoint_error(compute_flow(seq.frames[0], seq.frames[1], base), seq.ground_truth[0]).rms_epe;
    const double rms8 = endpoint_error(compute_flow(seq.frames[0], seq.frames[1], mesh), seq.ground_truth[0]).rms_epe;
    return {rms8 <= rms0, "RMS EPE xi=0.8,d=5: " + fmt("%.4f", rms8) + " <= xi=0: " + fmt("%.4f", rms0) + " (" +
                              fmt("%.0f", seconds_since(t0)) + " s)"};
}

Outcome dataset_variant(const fs::path& est, const fs::path& gt) {
    const FloData e = read_flo(est);
    const FloData g = read_flo(gt);
    PixelMask mask(g.known.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = g.known[i] && e.known[i];
    const double rms = endpoint_error(e.flow, g.flow, mask).rms_epe;
    return {std::abs(rms - 1.03) <= 0.2, "RMS EPE " + fmt("%.4f", rms) + " (target 1.03 +- 0.2)"};
}

Outcome cotangent_oracle() {
    Rng rng(2024);
    double err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int w = uniform_int(rng, 3, 8), h = uniform_int(rng, 3, 8);
        const int d = uniform_int(rng, 1, (std::min(w, h) - 1) / 2);
        const FlowField f = random_flow(rng, w, h, 0.2 * d);
        const auto geometry = ring_geometry(build_stencil(w, h, d), f);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const RingGeometry& g = geometry[static_cast<std::size_t>(y) * w + x];
                const OracleRing r = oracle_ring(f, x, y, d);
                for (int k = 0; k < 6; ++k) {
                    if (g.present[k] != r.present[k]) return {false, "ring membership differs from the oracle"};
                    err = std::max(err, std::abs(g.cot_sum[k] - r.cot_sum[k]));
                }
                err = std::max(err, std::abs(g.voronoi_area - r.area));
            }
    }
    double closed = 0.0;
    for (double L : {1.0, 1.7, 0.6}) {
        const double s3 = std::sqrt(3.0);
        const FlowField f = affine_flow(7, 7, L - 1.0, 0.5 * L, 0.0, 0.5 * s3 * L - 1.0, 0.0, 0.0);
        const RingGeometry g = ring_geometry_at(build_stencil(7, 7, 1), f, 3, 3);
        for (int k = 0; k < kRingSize; ++k) closed = std::max(closed, std::abs(g.cot_sum[k] - 2.0 / s3));
        closed = std::max(closed, std::abs(g.voronoi_area - 0.5 * s3 * L * L));
    }
    return {err <= 1e-12 && closed <= 1e-12, "max oracle deviation " + fmt("%.3g", err) +
                                                 ", equilateral closed-form deviation " + fmt("%.3g", closed) +
                                                 " (<= 1e-12)"};
}

Outcome delta_annihilation() {
    double constant = 0.0;
    for (int d : {1, 2, 3, 5}) {
        const DeltaField df = delta_field(build_stencil(17, 13, d), FlowField::constant(17, 13, 3.25, -1.5));
        constant = std::max({constant, lcmtest::max_abs(df.delta_u), lcmtest::max_abs(df.delta_v)});
    }
    Rng rng(77);
    double affine = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = uniform_int(rng, 1, 3);
        const int n = 8 * d + 1;
        const FlowField f = affine_flow(n, n, uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3),
                                        uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), uniform(rng, -5, 5),
                                        uniform(rng, -5, 5));
        const DeltaField df = delta_field(build_stencil(n, n, d), f);
        affine = std::max(affine, interior_max(n, n, d, [&](int x, int y) {
                              return std::max(std::abs(df.delta_u(x, y)), std::abs(df.delta_v(x, y)));
                          }));
    }
    return {constant == 0.0 && affine <= 1e-10,
            "constant flows max|delta| = " + fmt("%.3g", constant) + " (exactly 0), affine interior max " +
                fmt("%.3g", affine) + " (<= 1e-10)"};
}

Outcome baseline_degeneration() {
    Rng rng(5);
    const auto [a, b] = smooth_pair(rng, 48, 40);
    SolverParams p;
    p.xi = 0.0;
    p.outer_iters = 5;
    set_thread_count(1);
    FlowField reference;
    bool identical = true;
    for (int d : {1, 5, 25, 1000}) {
        p.mesh_density = d;
        const FlowField w = compute_flow(a, b, p);
        if (reference.size() == 0)
            reference = w;
        else
            identical = identical && w == reference;
    }

    double sys_err = 0.0, sol_err = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Assembled s = assemble_random(rng, 8, p, 1);
        const auto [A, rhs] = dense_baseline_system(s, p);
        const Eigen::MatrixXd M(s.sys.matrix());
        sys_err = std::max({sys_err, (M - A).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff(),
                            (s.sys.rhs() - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff())});
        const Eigen::VectorXd exact = A.ldlt().solve(rhs);
        const LinearSolveResult r = solve_linear(s.sys, LinearSolver::cg, 400);
        sol_err = std::max(sol_err, (interleave(r.increment) - exact).cwiseAbs().maxCoeff() /
                                        std::max(1.0, exact.cwiseAbs().maxCoeff()));
    }
    return {identical && sys_err <= 1e-9 && sol_err <= 1e-9,
            std::string("mesh_density 1/5/25/1000 ") + (identical ? "bitwise identical" : "DIFFER") +
                ", system deviation " + fmt("%.3g", sys_err) + ", solve deviation " + fmt("%.3g", sol_err) +
                " (<= 1e-9)"};
}

Outcome linear_solver_oracle() {
    Rng rng(77);
    double cg_err = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        SolverParams p;
        p.xi = trial % 2 ? 0.6 : 0.0;
        const Assembled s = assemble_random(rng, 8, p, 1 + trial % 3);
        const Eigen::VectorXd exact = Eigen::MatrixXd(s.sys.matrix()).ldlt().solve(s.sys.rhs());
        const LinearSolveResult r = solve_linear(s.sys, LinearSolver::cg, 45);
        cg_err = std::max(cg_err, (interleave(r.increment) - exact).cwiseAbs().maxCoeff());
    }
    double agree = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        SolverParams p;
        p.xi = 0.0;
        const Assembled s = assemble_random(rng, 8, p, 1);
        const LinearSolveResult cg = solve_linear(s.sys, LinearSolver::cg, 45);
        const LinearSolveResult sor = solve_linear(s.sys, LinearSolver::sor, 200, 1.9);
        agree = std::max({agree, max_abs_diff(cg.increment.du, sor.increment.du),
                          max_abs_diff(cg.increment.dv, sor.increment.dv)});
    }
    return {cg_err <= 1e-6 && agree <= 1e-4, "45-iteration CG vs dense " + fmt("%.3g", cg_err) +
                                                 " (<= 1e-6), CG vs SOR(200 sweeps) " + fmt("%.3g", agree) +
                                                 " (<= 1e-4)"};
}

Outcome flo_round_trip() {
    Rng rng(8);
    bool exact = true;
    for (int trial = 0; trial < 20; ++trial) {
        FlowField f = random_flow(rng, uniform_int(rng, 1, 50), uniform_int(rng, 1, 50), 100.0);
        for (double& v : f.u.values()) v = static_cast<float>(v);
        for (double& v : f.v.values()) v = static_cast<float>(v);
        const std::string bytes = encode_flo(f);
        exact = exact && decode_flo(bytes).flow == f && encode_flo(decode_flo(bytes).flow) == bytes;
    }
    const std::string fixture("PIEH\x01\0\0\0\x01\0\0\0\0\0\x60\x40\0\0\0\xc0", 20);
    const FloData d = decode_flo(fixture);
    const bool fixture_ok = d.flow.width() == 1 && d.flow.height() == 1 && d.flow.u(0, 0) == 3.5 &&
                            d.flow.v(0, 0) == -2.0;
    return {exact && fixture_ok, std::string("round trip ") + (exact ? "bitwise exact" : "MISMATCH") +
                                     ", 20-byte fixture " + (fixture_ok ? "= (3.5, -2)" : "WRONG")};
}

Outcome metrics_fixtures() {
    FlowField w(16, 16);
    for (int y = 8; y < 16; ++y)
        for (int x = 0; x < 16; ++x) w.u(x, y) = 2.0;
    const ErrorReport r = endpoint_error(w, FlowField(16, 16));
    const double ae = angular_error(FlowField(4, 4), FlowField::constant(4, 4, 1.0, 0.0));
    const bool ok = r.mean_epe == 1.0 && r.rms_epe == std::sqrt(2.0) && r.percentile_99_epe == 2.0 &&
                    std::abs(ae - 45.0) <= 1e-9;
    return {ok, "mean " + fmt("%.17g", r.mean_epe) + ", RMS " + fmt("%.17g", r.rms_epe) + ", p99 " +
                    fmt("%.17g", r.percentile_99_epe) + ", angular " + fmt("%.12f", ae) + " deg"};
}

Outcome degradation_determinism() {
    const fs::path dir = fs::temp_directory_path() / "lcmflow_acceptance_degrade";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const int w = 160, h = 120;
    write_png(dir / "f0.png", band_limited_noise(w, h, 1));
    write_png(dir / "f1.png", band_limited_noise(w, h, 2));
    const std::string frames = "\"" + (dir / "f0.png").string() + "\" \"" + (dir / "f1.png").string() + "\"";

    bool same = true;
    for (const std::string kind : {"occlusion", "gaussian", "saltpepper"}) {
        for (const char* out : {"a", "b"})
            if (run_cli("--seed 42 --out \"" + (dir / out).string() + "\" degrade --kind " + kind + " " + frames) != 0)
                return {false, "degrade command failed for " + kind};
        for (const std::string stem : {"f0", "f1"}) {
            const std::string name = stem + "_" + kind + ".png";
            const std::string bytes = slurp(dir / "a" / name);
            same = same && !bytes.empty() && bytes == slurp(dir / "b" / name);
        }
    }

    const Image orig = read_image(dir / "f0.png");
    const Image sp = read_image(dir / "a" / "f0_saltpepper.png");
    std::size_t changed = 0;
    for (std::size_t i = 0; i < sp.size(); ++i) changed += sp[i] != orig[i];
    const double fraction = static_cast<double>(changed) / sp.size();

    // Occlusion: zero pixels are exactly the lattice points within 20 px of
    // the two disc centers.
    const Image occ = read_image(dir / "a" / "f0_occlusion.png");
    const auto [c1, c2] = occluder_centers(w, h, 0, 2);
    bool discs = true;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
            const bool inside = (p - c1).norm() <= 20.0 || (p - c2).norm() <= 20.0;
            discs = discs && (inside ? occ(x, y) == 0.0 : occ(x, y) == orig(x, y));
        }
    return {same && std::abs(fraction - 0.1) <= 0.01 && discs,
            std::string("seed 42 twice: ") + (same ? "identical bytes" : "BYTES DIFFER") + ", salt & pepper changed " +
                fmt("%.4f", fraction) + " of pixels (0.10 +- 0.01), occlusion " +
                (discs ? "= two radius-20 zero discs" : "WRONG")};
}

} // namespace

int main(int argc, char** argv) {
    fs::path dataset_flow, dataset_gt;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--dataset-flow") dataset_flow = argv[i + 1];
        else if (key == "--dataset-gt") dataset_gt = argv[i + 1];
    }
    set_thread_count(1);

    report("1", "identity pair", guarded(identity_pair));
    report("2", "translation recovery", guarded(translation));
    report("3", "LCM benefit trend (synthetic sinusoidal pair)", guarded(lcm_benefit));
    if (!dataset_flow.empty() && !dataset_gt.empty())
        report("3 (dataset)", "absolute RMS on the supplied sequence",
               guarded([&] { return dataset_variant(dataset_flow, dataset_gt); }));
    else
        std::cout << "SKIP  criterion 3 (dataset): absolute RMS on an external benchmark sequence | "
                     "dataset not supplied (pass --dataset-flow and --dataset-gt)"
                  << std::endl;
    report("4", "cotangent/Voronoi oracle", guarded(cotangent_oracle));
    report("5", "delta annihilation", guarded(delta_annihilation));
    report("6", "baseline degeneration", guarded(baseline_degeneration));
    report("7", "linear-solver oracle", guarded(linear_solver_oracle));
    const bool substitutes_pass = failures == 0;
    report("8", ".flo round trip", guarded(flo_round_trip));
    report("9", "metrics fixtures", guarded(metrics_fixtures));
    report("10", "degradation determinism", guarded(degradation_determinism));

    std::cout << "N/A   criterion 11: public leaderboard ranks | NOT REPRODUCIBLE (external evaluation service); "
                 "substituted by criteria 1-7, which "
              << (substitutes_pass ? "all pass" : "do not all pass") << std::endl;

    std::cout << (failures == 0 ? "ALL PRIMARY CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
