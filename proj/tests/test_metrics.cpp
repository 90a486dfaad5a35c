#include "support.hpp"

#include "lcmflow/error.hpp"
#include "lcmflow/metrics.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

using namespace lcmflow;
using namespace lcmtest;

namespace {

// Sort-based nearest rank: the ceil(p/100 * n)-th smallest value.
double oracle_percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    std::size_t rank = 1;
    while (static_cast<double>(rank) < p / 100.0 * v.size()) ++rank;
    return v[rank - 1];
}

} // namespace

TEST_CASE("endpoint error fixtures") {
    SUBCASE("identical fields") {
        Rng rng(1);
        const FlowField w = random_flow(rng, 10, 7, 4.0);
        const ErrorReport r = endpoint_error(w, w);
        CHECK(r.mean_epe == 0.0);
        CHECK(r.rms_epe == 0.0);
        CHECK(r.percentile_99_epe == 0.0);
        CHECK(r.valid_pixel_count == 70);
    }
    SUBCASE("constant unit offset") {
        Rng rng(2);
        const FlowField gt = random_flow(rng, 9, 9, 2.0);
        FlowField w = gt;
        for (double& u : w.u.values()) u += 1.0;
        const ErrorReport r = endpoint_error(w, gt);
        CHECK(r.mean_epe == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.rms_epe == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.percentile_99_epe == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("half zero, half two") {
        FlowField w(8, 6);
        for (int y = 3; y < 6; ++y)
            for (int x = 0; x < 8; ++x) w.v(x, y) = 2.0;
        const ErrorReport r = endpoint_error(w, FlowField(8, 6));
        CHECK(r.mean_epe == 1.0);
        CHECK(r.rms_epe == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(r.percentile_99_epe == 2.0);
        CHECK(r.median_epe == 0.0);
    }
    SUBCASE("mask restricts the sample") {
        FlowField w(4, 1);
        w.u(3, 0) = 5.0;
        const PixelMask mask{1, 1, 1, 0};
        CHECK(endpoint_error(w, FlowField(4, 1), mask).mean_epe == 0.0);
        CHECK(endpoint_error(w, FlowField(4, 1), mask).valid_pixel_count == 3);
        CHECK_THROWS_AS(endpoint_error(w, FlowField(4, 1), PixelMask{0, 0, 0, 0}), ConfigError);
        CHECK_THROWS_AS(endpoint_error(w, FlowField(4, 1), PixelMask{1, 1}), DimensionError);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(endpoint_error(FlowField(3, 3), FlowField(3, 4)), DimensionError);
    }
}

TEST_CASE("endpoint error properties") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = uniform_int(rng, 1, 30), h = uniform_int(rng, 1, 30);
        const FlowField a = random_flow(rng, w, h, 5.0);
        const FlowField b = random_flow(rng, w, h, 5.0);
        PixelMask mask(a.size());
        for (auto& m : mask) m = rng.uniform() < 0.7 ? 1 : 0;
        mask[0] = 1;

        const ErrorReport ab = evaluate_flow(a, b, mask);
        const ErrorReport ba = evaluate_flow(b, a, mask);
        CHECK(ab.mean_epe == doctest::Approx(ba.mean_epe).epsilon(1e-14));
        CHECK(ab.rms_epe == doctest::Approx(ba.rms_epe).epsilon(1e-14));
        CHECK(ab.percentile_99_epe == ba.percentile_99_epe);
        CHECK(ab.mean_angular_error_deg == doctest::Approx(ba.mean_angular_error_deg).epsilon(1e-12));

        std::vector<double> direct;
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!mask[i]) continue;
            const double du = a.u[i] - b.u[i], dv = a.v[i] - b.v[i];
            direct.push_back(std::sqrt(du * du + dv * dv));
            sum += direct.back();
        }
        CHECK(ab.valid_pixel_count == direct.size());
        CHECK(ab.mean_epe == doctest::Approx(sum / direct.size()).epsilon(1e-12));
        CHECK(ab.percentile_99_epe == doctest::Approx(oracle_percentile(direct, 99.0)).epsilon(1e-15));
        CHECK(ab.median_epe == doctest::Approx(oracle_percentile(direct, 50.0)).epsilon(1e-15));
        CHECK(ab.percentile_99_epe >= ab.median_epe);
        CHECK(ab.mean_epe > 0.0);
        CHECK(ab.rms_epe >= ab.mean_epe);
    }
}

TEST_CASE("nearest-rank percentile") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = uniform_int(rng, 1, 300);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v) x = uniform(rng, -10, 10);
        if (trial % 3 == 0)
            for (double& x : v) x = std::round(x); // ties
        const double p = trial % 5 == 0 ? 100.0 : uniform(rng, 0.01, 100.0);
        CHECK(percentile_nearest_rank(v, p) == oracle_percentile(v, p));
    }
    CHECK(percentile_nearest_rank({3.0, 1.0, 2.0, 4.0}, 50.0) == 2.0);
    CHECK(percentile_nearest_rank({3.0, 1.0, 2.0, 4.0}, 99.0) == 4.0);
    CHECK_THROWS_AS(percentile_nearest_rank({}, 50.0), ConfigError);
    CHECK_THROWS_AS(percentile_nearest_rank({1.0}, 0.0), ConfigError);
    CHECK_THROWS_AS(percentile_nearest_rank({1.0}, 101.0), ConfigError);
}

TEST_CASE("angular error") {
    SUBCASE("identical fields") {
        Rng rng(5);
        const FlowField w = random_flow(rng, 6, 6, 3.0);
        CHECK(angular_error(w, w) < 1e-5);
    }
    SUBCASE("zero against unit flow is 45 degrees") {
        CHECK(std::abs(angular_error(FlowField(5, 5), FlowField::constant(5, 5, 1.0, 0.0)) - 45.0) < 1e-9);
        CHECK(std::abs(angular_error(FlowField::constant(5, 5, 0.0, -1.0), FlowField(5, 5)) - 45.0) < 1e-9);
    }
    SUBCASE("antiparallel flows approach 180 degrees") {
        double previous = 0.0;
        for (double m : {1.0, 10.0, 100.0, 1e4}) {
            const double ae = angular_error(FlowField::constant(2, 2, m, 0.0), FlowField::constant(2, 2, -m, 0.0));
            CHECK(ae > previous);
            CHECK(ae <= 180.0);
            previous = ae;
        }
        CHECK(previous > 179.9);
    }
    SUBCASE("matches the closed form on random fields") {
        Rng rng(6);
        const FlowField a = random_flow(rng, 7, 5, 3.0);
        const FlowField b = random_flow(rng, 7, 5, 3.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double c = (a.u[i] * b.u[i] + a.v[i] * b.v[i] + 1.0) /
                             std::sqrt((a.u[i] * a.u[i] + a.v[i] * a.v[i] + 1.0) *
                                       (b.u[i] * b.u[i] + b.v[i] * b.v[i] + 1.0));
            sum += std::acos(c);
        }
        CHECK(angular_error(a, b) == doctest::Approx(sum / a.size() * 180.0 / std::numbers::pi).epsilon(1e-12));
    }
    SUBCASE("empty mask") {
        CHECK_THROWS_AS(angular_error(FlowField(2, 2), FlowField(2, 2), PixelMask(4, 0)), ConfigError);
    }
}

TEST_CASE("interpolation error") {
    Rng rng(7);
    const Image a = random_image(rng, 16, 12);
    CHECK(interpolation_error(a, a, false) == 0.0);
    CHECK(interpolation_error(a, a, true) == 0.0);

    Image b = a;
    for (double& v : b.values()) v += 0.1;
    CHECK(interpolation_error(b, a, false) == doctest::Approx(0.1).epsilon(1e-12));

    // A constant truth has zero gradient, so both variants agree.
    const Image flat(8, 8, 0.5);
    const Image shifted(8, 8, 0.75);
    CHECK(interpolation_error(shifted, flat, true) == doctest::Approx(0.25).epsilon(1e-12));

    // Ramp of slope s along x: interior gradient s, border gradient s/2.
    Image ramp(6, 1);
    for (int x = 0; x < 6; ++x) ramp(x, 0) = 0.5 * x;
    Image off = ramp;
    for (double& v : off.values()) v += 1.0;
    const double interior = 1.0 / (0.25 + 1.0), border = 1.0 / (0.0625 + 1.0);
    CHECK(interpolation_error(off, ramp, true) ==
          doctest::Approx(std::sqrt((4 * interior + 2 * border) / 6.0)).epsilon(1e-12));

    for (int trial = 0; trial < 50; ++trial) {
        const Image p = random_image(rng, 10, 10);
        const Image q = random_image(rng, 10, 10);
        CHECK(interpolation_error(p, q, true) <= interpolation_error(p, q, false));
        CHECK(interpolation_error(p, q, false) > 0.0);
    }
    CHECK_THROWS_AS(interpolation_error(Image(3, 3), Image(3, 4), false), DimensionError);
}

TEST_CASE("report serialization") {
    ErrorReport r;
    r.valid_pixel_count = 12;
    r.mean_epe = 0.125;
    r.rms_epe = 0.5;
    r.median_epe = 0.0625;
    r.percentile_99_epe = 2.0;
    r.mean_angular_error_deg = 45.0;

    const std::string text = report_to_text(r);
    CHECK(text.find("valid_pixel_count 12\n") != std::string::npos);
    CHECK(text.find("mean_epe 0.125\n") != std::string::npos);
    CHECK(text.find("percentile_99_epe 2\n") != std::string::npos);
    CHECK(text.find("interp_error_rms") == std::string::npos);

    auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["valid_pixel_count"] == 12);
    CHECK(j["rms_epe"] == 0.5);
    CHECK(j["mean_angular_error_deg"] == 45.0);
    CHECK_FALSE(j.contains("normalized_interp_error"));

    r.interp_error_rms = 0.01;
    r.normalized_interp_error = 0.0078125;
    j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["interp_error_rms"] == 0.01);
    CHECK(j["normalized_interp_error"] == 0.0078125);
    CHECK(report_to_text(r).find("normalized_interp_error 0.0078125\n") != std::string::npos);

    // Full precision survives the text round trip.
    Rng rng(8);
    r.rms_epe = rng.uniform();
    const std::string t = report_to_text(r);
    const auto pos = t.find("rms_epe ") + 8;
    CHECK(std::stod(t.substr(pos, t.find('\n', pos) - pos)) == r.rms_epe);
}
