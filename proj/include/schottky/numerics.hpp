#pragma once

// Shared numerical building blocks: compensated summation, the global
// contour orientation and trapezoidal quadrature on circles.

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "schottky/moebius.hpp"

namespace schottky {

/// Neumaier-compensated accumulation of complex values.
class CompensatedSum {
public:
    void add(Complex x) {
        add_part(sum_re_, comp_re_, x.real());
        add_part(sum_im_, comp_im_, x.imag());
    }
    Complex value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

private:
    static void add_part(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double sum_re_ = 0.0, comp_re_ = 0.0;
    double sum_im_ = 0.0, comp_im_ = 0.0;
};

inline constexpr Complex kTwoPiI{0.0, 2.0 * std::numbers::pi};

enum class Orientation { Clockwise, Counterclockwise };

/// Direction of every boundary-circle integral in the library. Clockwise.
Orientation contour_orientation();

namespace detail {
/// Test hook: flips the global orientation. Not thread-safe with concurrent
/// computations; restore the previous value when done.
void set_contour_orientation_for_testing(Orientation o);
}  // namespace detail

/// Trapezoid nodes on a circle in the global orientation:
/// u_j = c + r exp(-+ 2 pi i j / N), with weights du_j = u'(theta_j) * 2 pi / N.
struct CircleNodes {
    std::vector<Complex> points;
    std::vector<Complex> weights;
};

CircleNodes circle_nodes(const Circle& c, int n);

struct QuadratureOptions {
    int nodes = 256;
    bool auto_double = true;
    double relative_tolerance = 1e-10;
    int max_nodes = 4096;
    int threads = 1;
};

}  // namespace schottky
