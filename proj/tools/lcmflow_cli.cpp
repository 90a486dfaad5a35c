// lcmflow command-line front end: flow estimation, evaluation, interpolation,
// visualization and synthetic benchmark generation.
//
// Exit status: 0 success, 1 numerical failure, 2 usage or I/O error.

#include "lcmflow/benchmark.hpp"
#include "lcmflow/error.hpp"
#include "lcmflow/flo_io.hpp"
#include "lcmflow/image_io.hpp"
#include "lcmflow/metrics.hpp"
#include "lcmflow/parallel.hpp"
#include "lcmflow/solver.hpp"
#include "lcmflow/warp.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lcmflow;

namespace {

struct RunConfig {
    SolverParams params;
    std::string solver_name = "cg";
    std::uint64_t seed = 42;
    int threads = 1;
    fs::path out = "lcmflow_out";

    // per-command inputs
    std::vector<std::string> inputs;
    std::string mask;
    std::string kind;
    int width = 256;
    int height = 256;
    double amplitude = 6.0;
    int frames = 2;
    double t = 0.5;
    double max_rad = 0.0;
    int bit_depth = 8;
};

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

nlohmann::json params_json(const RunConfig& cfg) {
    const SolverParams& p = cfg.params;
    return {{"epsilon", p.epsilon},           {"theta", p.theta},
            {"lambda", p.lambda},             {"xi", p.xi},
            {"mesh-density", p.mesh_density}, {"pyramid-factor", p.pyramid_factor},
            {"min-dim", p.min_dim},           {"outer-iters", p.outer_iters},
            {"inner-iters", p.inner_iters},   {"solver", to_string(p.linear_solver)},
            {"cg-iters", p.cg_iters},         {"sor-omega", p.sor_omega},
            {"presmooth", p.presmooth_sigma}, {"seed", cfg.seed},
            {"threads", cfg.threads}};
}

// key=value file accepted back through --config.
void write_run_config(const RunConfig& cfg, const fs::path& path) {
    const SolverParams& p = cfg.params;
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "epsilon=" << format_double(p.epsilon) << '\n'
       << "theta=" << format_double(p.theta) << '\n'
       << "lambda=" << format_double(p.lambda) << '\n'
       << "xi=" << format_double(p.xi) << '\n'
       << "mesh-density=" << p.mesh_density << '\n'
       << "pyramid-factor=" << format_double(p.pyramid_factor) << '\n'
       << "min-dim=" << p.min_dim << '\n'
       << "outer-iters=" << p.outer_iters << '\n'
       << "inner-iters=" << p.inner_iters << '\n'
       << "solver=" << to_string(p.linear_solver) << '\n'
       << "cg-iters=" << p.cg_iters << '\n'
       << "sor-omega=" << format_double(p.sor_omega) << '\n'
       << "presmooth=" << format_double(p.presmooth_sigma) << '\n'
       << "seed=" << cfg.seed << '\n'
       << "threads=" << cfg.threads << '\n';
}

void write_run_log(const RunConfig& cfg, const std::string& command) {
    nlohmann::json log{{"command", command}, {"inputs", cfg.inputs}, {"parameters", params_json(cfg)}};
    std::ofstream os(cfg.out / "run.json");
    if (!os) throw IoError("cannot write " + (cfg.out / "run.json").string());
    os << log.dump(2) << '\n';
    write_run_config(cfg, cfg.out / "run.cfg");
}

void prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out.string() + ": " + ec.message());
}

FlowField estimate(const RunConfig& cfg, const Image& a, const Image& b) {
    return FlowSolver(cfg.params).compute(a, b);
}

std::pair<Image, Image> read_pair(const RunConfig& cfg) {
    Image a = read_image(cfg.inputs.at(0));
    Image b = read_image(cfg.inputs.at(1));
    if (!a.same_shape(b))
        throw DimensionError("input images differ in size: " + cfg.inputs[0] + " vs " + cfg.inputs[1]);
    return {std::move(a), std::move(b)};
}

int cmd_flow(const RunConfig& cfg) {
    const auto [a, b] = read_pair(cfg);
    prepare_out(cfg);
    write_run_log(cfg, "flow");
    const FlowField w = estimate(cfg, a, b);
    write_flo(w, cfg.out / "flow.flo");
    write_png(cfg.out / "flow.png", flow_to_color(w));
    std::cout << "wrote " << (cfg.out / "flow.flo").string() << '\n';
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    const FloData est = read_flo(cfg.inputs.at(0));
    const FloData gt = read_flo(cfg.inputs.at(1));
    if (!est.flow.same_shape(gt.flow)) throw DimensionError("flow and ground truth differ in size");
    PixelMask mask(gt.known.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = gt.known[i] && est.known[i];
    if (!cfg.mask.empty()) {
        const Image m = read_image(cfg.mask);
        if (!m.same_shape(gt.flow.u)) throw DimensionError("mask differs in size from the flow");
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] && m[i] > 0.0;
    }
    const ErrorReport report = evaluate_flow(est.flow, gt.flow, mask);
    std::cout << report_to_text(report);
    prepare_out(cfg);
    std::ofstream os(cfg.out / "report.json");
    if (!os) throw IoError("cannot write " + (cfg.out / "report.json").string());
    os << report_to_json(report) << '\n';
    return 0;
}

int cmd_degrade(const RunConfig& cfg) {
    const Degradation kind = degradation_from_string(cfg.kind);
    std::vector<Image> frames;
    for (const auto& path : cfg.inputs) frames.push_back(read_image(path));
    for (const auto& f : frames)
        if (!f.same_shape(frames.front())) throw DimensionError("sequence frames differ in size");
    const auto degraded = degrade_sequence(frames, kind, cfg.seed);
    prepare_out(cfg);
    write_run_log(cfg, "degrade");
    for (std::size_t i = 0; i < degraded.size(); ++i) {
        const fs::path name = fs::path(cfg.inputs[i]).stem().string() + "_" + cfg.kind + ".png";
        write_png(cfg.out / name, degraded[i], cfg.bit_depth);
        if (kind == Degradation::occlusion) {
            // Non-occluded pixels, usable as `evaluate --mask`.
            const Image visible = add_occlusion(Image(frames[i].width(), frames[i].height(), 1.0),
                                                static_cast<int>(i), static_cast<int>(frames.size()));
            write_png(cfg.out / (fs::path(cfg.inputs[i]).stem().string() + "_visible.png"), visible);
        }
    }
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    const SyntheticSequence seq = synth_sequence(cfg.width, cfg.height, cfg.amplitude, cfg.frames, cfg.seed);
    prepare_out(cfg);
    write_run_log(cfg, "synth");
    char name[64];
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        std::snprintf(name, sizeof name, "frame_%03zu.png", k);
        write_png(cfg.out / name, seq.frames[k], 16);
    }
    for (std::size_t k = 0; k < seq.ground_truth.size(); ++k) {
        std::snprintf(name, sizeof name, "gt_%03zu.flo", k);
        write_flo(seq.ground_truth[k], cfg.out / name);
    }
    return 0;
}

int cmd_interpolate(const RunConfig& cfg) {
    if (!(cfg.t >= 0.0 && cfg.t <= 1.0)) throw ConfigError("--t must lie in [0,1]");
    const auto [a, b] = read_pair(cfg);
    prepare_out(cfg);
    write_run_log(cfg, "interpolate");
    const FlowField w = estimate(cfg, a, b);
    write_flo(w, cfg.out / "flow.flo");
    const InterpolatedFrame frame = interpolate_middle_frame(a, b, w, cfg.t);
    write_png(cfg.out / "interpolated.png", frame.image, cfg.bit_depth);
    return 0;
}

int cmd_warp(const RunConfig& cfg) {
    const Image src = read_image(cfg.inputs.at(0));
    const FloData flow = read_flo(cfg.inputs.at(1));
    if (!flow.flow.same_shape(src)) throw DimensionError("flow differs in size from the image");
    prepare_out(cfg);
    const WarpResult warped = inverse_warp(src, flow.flow);
    write_png(cfg.out / "warped.png", warped.image, cfg.bit_depth);
    Image oob(src.width(), src.height());
    for (std::size_t i = 0; i < oob.size(); ++i) oob[i] = warped.oob_mask[i];
    write_png(cfg.out / "oob_mask.png", oob);
    return 0;
}

int cmd_visualize(const RunConfig& cfg) {
    const FloData flow = read_flo(cfg.inputs.at(0));
    prepare_out(cfg);
    write_png(cfg.out / "flow.png", flow_to_color(flow.flow, cfg.max_rad));
    return 0;
}

void add_solver_options(CLI::App& app, RunConfig& cfg) {
    SolverParams& p = cfg.params;
    app.add_option("--epsilon", p.epsilon, "Robust penalty offset")->capture_default_str();
    app.add_option("--theta", p.theta, "Gradient constancy weight")->capture_default_str();
    app.add_option("--lambda", p.lambda, "Global smoothness weight")->capture_default_str();
    app.add_option("--xi", p.xi, "Mesh smoothness weight (0 disables the mesh term)")->capture_default_str();
    app.add_option("--mesh-density", p.mesh_density, "Pixels between mesh vertices")->capture_default_str();
    app.add_option("--pyramid-factor", p.pyramid_factor, "Per-level downsampling factor")->capture_default_str();
    app.add_option("--min-dim", p.min_dim, "Smallest pyramid level dimension")->capture_default_str();
    app.add_option("--outer-iters", p.outer_iters, "Warping iterations per level")->capture_default_str();
    app.add_option("--inner-iters", p.inner_iters, "Diffusivity iterations per warp")->capture_default_str();
    app.add_option("--solver", cfg.solver_name, "Linear solver")
        ->check(CLI::IsMember({"cg", "sor"}))
        ->capture_default_str();
    app.add_option("--cg-iters", p.cg_iters, "Linear solver iterations")->capture_default_str();
    app.add_option("--sor-omega", p.sor_omega, "SOR relaxation factor")->capture_default_str();
    app.add_option("--presmooth", p.presmooth_sigma, "Input Gaussian pre-smoothing sigma")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (1 = bitwise reproducible)")->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational optical flow with Laplacian cotangent mesh smoothness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; flags override it");
    RunConfig cfg;
    add_solver_options(app, cfg);

    auto* flow = app.add_subcommand("flow", "Estimate flow between two images");
    flow->add_option("images", cfg.inputs, "First and second image")->required()->expected(2)
        ->check(CLI::ExistingFile);

    auto* evaluate = app.add_subcommand("evaluate", "Compare a .flo file with ground truth");
    evaluate->add_option("flows", cfg.inputs, "Estimated and ground-truth .flo")->required()->expected(2)
        ->check(CLI::ExistingFile);
    evaluate->add_option("--mask", cfg.mask, "Image whose non-zero pixels are evaluated")
        ->check(CLI::ExistingFile);

    auto* degrade = app.add_subcommand("degrade", "Apply a seeded degradation to a sequence");
    degrade->add_option("--kind", cfg.kind, "occlusion | gaussian | saltpepper")->required();
    degrade->add_option("frames", cfg.inputs, "Sequence frames in order")->required()
        ->check(CLI::ExistingFile);
    degrade->add_option("--bit-depth", cfg.bit_depth, "Output PNG bit depth")
        ->check(CLI::IsMember({8, 16}))->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic deforming sequence with ground truth");
    synth->add_option("--width", cfg.width)->capture_default_str();
    synth->add_option("--height", cfg.height)->capture_default_str();
    synth->add_option("--amplitude", cfg.amplitude, "Warp magnitude in pixels")->capture_default_str();
    synth->add_option("--frames", cfg.frames)->capture_default_str();

    auto* interpolate = app.add_subcommand("interpolate", "Synthesize the frame at time t");
    interpolate->add_option("images", cfg.inputs, "First and second image")->required()->expected(2)
        ->check(CLI::ExistingFile);
    interpolate->add_option("--t", cfg.t, "Time in [0,1]")->capture_default_str();
    interpolate->add_option("--bit-depth", cfg.bit_depth)->check(CLI::IsMember({8, 16}))->capture_default_str();

    auto* warp = app.add_subcommand("warp", "Inverse-warp an image with a .flo field");
    warp->add_option("inputs", cfg.inputs, "Image and .flo file")->required()->expected(2)
        ->check(CLI::ExistingFile);
    warp->add_option("--bit-depth", cfg.bit_depth)->check(CLI::IsMember({8, 16}))->capture_default_str();

    auto* visualize = app.add_subcommand("visualize", "Color-code a .flo file");
    visualize->add_option("flow", cfg.inputs, ".flo file")->required()->expected(1)->check(CLI::ExistingFile);
    visualize->add_option("--max-rad", cfg.max_rad, "Saturation radius (0 = automatic)")->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        cfg.params.linear_solver = linear_solver_from_string(cfg.solver_name);
        cfg.params.validate();
        set_thread_count(cfg.threads);
        if (*flow) return cmd_flow(cfg);
        if (*evaluate) return cmd_evaluate(cfg);
        if (*degrade) return cmd_degrade(cfg);
        if (*synth) return cmd_synth(cfg);
        if (*interpolate) return cmd_interpolate(cfg);
        if (*warp) return cmd_warp(cfg);
        if (*visualize) return cmd_visualize(cfg);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
