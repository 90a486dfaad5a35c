#include "lcmflow/benchmark.hpp"
#include "lcmflow/error.hpp"
#include "lcmflow/flo_io.hpp"
#include "lcmflow/image_io.hpp"
#include "lcmflow/meshlap.hpp"
#include "lcmflow/metrics.hpp"
#include "lcmflow/parallel.hpp"
#include "lcmflow/solver.hpp"
#include "lcmflow/warp.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace lcmflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Mask = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array (height, width)");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return Image(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_image(const Image& img) {
    Array out({img.height(), img.width()});
    std::memcpy(out.mutable_data(), img.values().data(), img.size() * sizeof(double));
    return out;
}

FlowField to_flow(const Array& a) {
    if (a.ndim() != 3 || a.shape(2) != 2) throw py::value_error("expected a flow array of shape (height, width, 2)");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    FlowField f(w, h);
    const double* p = a.data();
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.u[i] = p[2 * i];
        f.v[i] = p[2 * i + 1];
    }
    return f;
}

Array from_flow(const FlowField& f) {
    Array out({f.height(), f.width(), 2});
    double* p = out.mutable_data();
    for (std::size_t i = 0; i < f.size(); ++i) {
        p[2 * i] = f.u[i];
        p[2 * i + 1] = f.v[i];
    }
    return out;
}

std::vector<std::uint8_t> to_mask(const std::optional<Mask>& m, std::size_t expected) {
    if (!m) return {};
    if (static_cast<std::size_t>(m->size()) != expected) throw py::value_error("mask size does not match the flow");
    return {m->data(), m->data() + m->size()};
}

py::array_t<bool> mask_array(const std::vector<std::uint8_t>& m, int width, int height) {
    py::array_t<bool> out({height, width});
    bool* p = out.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] != 0;
    return out;
}

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["mean_epe"] = r.mean_epe;
    d["rms_epe"] = r.rms_epe;
    d["median_epe"] = r.median_epe;
    d["percentile_99_epe"] = r.percentile_99_epe;
    d["mean_angular_error_deg"] = r.mean_angular_error_deg;
    d["valid_pixel_count"] = r.valid_pixel_count;
    return d;
}

} // namespace

PYBIND11_MODULE(_lcmflow, m) {
    m.doc() = "Variational optical flow with a Laplacian cotangent mesh smoothness term";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<SolverParams>(m, "SolverParams")
        .def(py::init<>())
        .def_readwrite("epsilon", &SolverParams::epsilon)
        .def_readwrite("theta", &SolverParams::theta)
        .def_readwrite("lambda_", &SolverParams::lambda)
        .def_readwrite("xi", &SolverParams::xi)
        .def_readwrite("mesh_density", &SolverParams::mesh_density)
        .def_readwrite("pyramid_factor", &SolverParams::pyramid_factor)
        .def_readwrite("min_dim", &SolverParams::min_dim)
        .def_readwrite("outer_iters", &SolverParams::outer_iters)
        .def_readwrite("inner_iters", &SolverParams::inner_iters)
        .def_readwrite("cg_iters", &SolverParams::cg_iters)
        .def_readwrite("sor_omega", &SolverParams::sor_omega)
        .def_readwrite("presmooth_sigma", &SolverParams::presmooth_sigma)
        .def_property(
            "linear_solver", [](const SolverParams& p) { return to_string(p.linear_solver); },
            [](SolverParams& p, const std::string& s) { p.linear_solver = linear_solver_from_string(s); })
        .def("validate", &SolverParams::validate)
        .def("__repr__", [](const SolverParams& p) {
            return "SolverParams(lambda=" + std::to_string(p.lambda) + ", xi=" + std::to_string(p.xi) +
                   ", mesh_density=" + std::to_string(p.mesh_density) + ")";
        });

    m.def("set_thread_count", &set_thread_count, py::arg("threads"));

    m.def(
        "compute_flow",
        [](const Array& first, const Array& second, std::optional<SolverParams> params) {
            const Image a = to_image(first), b = to_image(second);
            const SolverParams p = params.value_or(SolverParams{});
            p.validate();
            FlowField w;
            {
                py::gil_scoped_release release;
                w = compute_flow(a, b, p);
            }
            return from_flow(w);
        },
        py::arg("first"), py::arg("second"), py::arg("params") = py::none(),
        "Flow from first to second as a (height, width, 2) array: first(X) ~ second(X + w(X)).");

    m.def(
        "delta_field",
        [](const Array& flow, int mesh_density) {
            const FlowField w = to_flow(flow);
            const DeltaField d = delta_field(build_stencil(w.width(), w.height(), mesh_density), w);
            return from_flow(FlowField(d.delta_u, d.delta_v));
        },
        py::arg("flow"), py::arg("mesh_density"));

    m.def(
        "evaluate_flow",
        [](const Array& flow, const Array& gt, std::optional<Mask> mask) {
            const FlowField w = to_flow(flow), g = to_flow(gt);
            return report_dict(evaluate_flow(w, g, to_mask(mask, w.size())));
        },
        py::arg("flow"), py::arg("gt"), py::arg("mask") = py::none());

    m.def(
        "angular_error",
        [](const Array& flow, const Array& gt, std::optional<Mask> mask) {
            const FlowField w = to_flow(flow);
            return angular_error(w, to_flow(gt), to_mask(mask, w.size()));
        },
        py::arg("flow"), py::arg("gt"), py::arg("mask") = py::none());

    m.def(
        "interpolation_error",
        [](const Array& predicted, const Array& truth, bool normalized) {
            return interpolation_error(to_image(predicted), to_image(truth), normalized);
        },
        py::arg("predicted"), py::arg("truth"), py::arg("gradient_normalized") = false);

    m.def(
        "read_flo",
        [](const std::filesystem::path& path) {
            const FloData d = read_flo(path);
            return py::make_tuple(from_flow(d.flow), mask_array(d.known, d.flow.width(), d.flow.height()));
        },
        py::arg("path"), "Returns (flow, known) where known is a boolean (height, width) array.");

    m.def(
        "write_flo",
        [](const std::filesystem::path& path, const Array& flow, std::optional<Mask> known) {
            const FlowField w = to_flow(flow);
            write_flo(w, path, to_mask(known, w.size()));
        },
        py::arg("path"), py::arg("flow"), py::arg("known") = py::none());

    m.def(
        "read_image", [](const std::filesystem::path& path) { return from_image(read_image(path)); },
        py::arg("path"));
    m.def(
        "write_png",
        [](const std::filesystem::path& path, const Array& img, int bit_depth) {
            write_png(path, to_image(img), bit_depth);
        },
        py::arg("path"), py::arg("image"), py::arg("bit_depth") = 8);

    m.def(
        "synth_sequence",
        [](int width, int height, double amplitude, int frames, std::uint64_t seed) {
            const SyntheticSequence s = synth_sequence(width, height, amplitude, frames, seed);
            py::list f, g;
            for (const Image& img : s.frames) f.append(from_image(img));
            for (const FlowField& gt : s.ground_truth) g.append(from_flow(gt));
            return py::make_tuple(f, g);
        },
        py::arg("width"), py::arg("height"), py::arg("amplitude"), py::arg("frames") = 2, py::arg("seed") = 42);

    m.def(
        "degrade",
        [](const std::vector<Array>& frames, const std::string& kind, std::uint64_t seed) {
            std::vector<Image> in;
            for (const Array& a : frames) in.push_back(to_image(a));
            py::list out;
            for (const Image& img : degrade_sequence(in, degradation_from_string(kind), seed))
                out.append(from_image(img));
            return out;
        },
        py::arg("frames"), py::arg("kind"), py::arg("seed") = 42,
        "kind is one of 'occlusion', 'gaussian', 'saltpepper'.");

    m.def(
        "band_limited_noise",
        [](int width, int height, std::uint64_t seed, double sigma) {
            return from_image(band_limited_noise(width, height, seed, sigma));
        },
        py::arg("width"), py::arg("height"), py::arg("seed"), py::arg("sigma") = 2.0);

    m.def(
        "circular_shift", [](const Array& img, int dx, int dy) { return from_image(circular_shift(to_image(img), dx, dy)); },
        py::arg("image"), py::arg("dx"), py::arg("dy"));

    m.def(
        "flow_to_color",
        [](const Array& flow, double max_rad) {
            const RgbImage rgb = flow_to_color(to_flow(flow), max_rad);
            py::array_t<std::uint8_t> out({rgb.height, rgb.width, 3});
            std::memcpy(out.mutable_data(), rgb.data.data(), rgb.data.size());
            return out;
        },
        py::arg("flow"), py::arg("max_rad") = 0.0);

    m.def(
        "inverse_warp",
        [](const Array& img, const Array& flow) {
            const Image src = to_image(img);
            const WarpResult r = inverse_warp(src, to_flow(flow));
            return py::make_tuple(from_image(r.image), mask_array(r.oob_mask, src.width(), src.height()));
        },
        py::arg("image"), py::arg("flow"), "Returns (warped, out_of_bounds).");

    m.def(
        "interpolate_middle_frame",
        [](const Array& first, const Array& second, const Array& flow, double t) {
            const Image a = to_image(first);
            const InterpolatedFrame f = interpolate_middle_frame(a, to_image(second), to_flow(flow), t);
            return py::make_tuple(from_image(f.image), mask_array(f.hole_mask, a.width(), a.height()));
        },
        py::arg("first"), py::arg("second"), py::arg("flow"), py::arg("t") = 0.5,
        "Returns (frame, holes).");
}
