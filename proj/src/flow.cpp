#include "lcmflow/flow.hpp"

#include "lcmflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace lcmflow {

FlowField::FlowField(Image u_, Image v_) : u(std::move(u_)), v(std::move(v_)) {
    if (!u.same_shape(v)) throw DimensionError("flow components differ in size");
}

FlowField FlowField::constant(int width, int height, double du, double dv) {
    return FlowField(Image(width, height, du), Image(width, height, dv));
}

double FlowField::max_magnitude() const {
    double best = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) best = std::max(best, std::hypot(u[i], v[i]));
    return best;
}

FlowField resize_flow(const FlowField& w, int new_width, int new_height) {
    FlowField out(resize_bicubic(w.u, new_width, new_height),
                  resize_bicubic(w.v, new_width, new_height));
    const double sx = static_cast<double>(new_width) / w.width();
    const double sy = static_cast<double>(new_height) / w.height();
    for (double& x : out.u.values()) x *= sx;
    for (double& y : out.v.values()) y *= sy;
    return out;
}

} // namespace lcmflow
