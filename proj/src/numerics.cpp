#include "schottky/numerics.hpp"

#include <atomic>

#include "schottky/error.hpp"

namespace schottky {

namespace {
std::atomic<Orientation> g_orientation{Orientation::Clockwise};
}

Orientation contour_orientation() { return g_orientation.load(std::memory_order_relaxed); }

void detail::set_contour_orientation_for_testing(Orientation o) {
    g_orientation.store(o, std::memory_order_relaxed);
}

CircleNodes circle_nodes(const Circle& c, int n) {
    if (n < 4) fail(ErrorCode::InvalidArgument, "circle quadrature needs at least 4 nodes");
    const double dir = contour_orientation() == Orientation::Clockwise ? -1.0 : 1.0;
    const double h = 2.0 * std::numbers::pi / n;
    CircleNodes out;
    out.points.resize(static_cast<std::size_t>(n));
    out.weights.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Complex e = std::polar(1.0, dir * h * j);
        out.points[static_cast<std::size_t>(j)] = c.center + c.radius * e;
        out.weights[static_cast<std::size_t>(j)] = Complex(0.0, dir) * c.radius * e * h;
    }
    return out;
}

}  // namespace schottky
