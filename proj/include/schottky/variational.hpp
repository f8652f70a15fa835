#pragma once

// First-order variations of Abelian integrals and periods under a
// perturbation S_l -> S_l + dS_l of the generators, computed from contour
// integrals over the boundary circles dD_l of
//     dEta(u) dEta_zz'(u) tr[M(u) dS_l S_l^-1] / du,   M(u) = ((-u, u^2), (-1, u)).
//
// With the library's clockwise contours and residue-normalized dEta_zz', the
// first-order change is
//     delta int_z^z' dEta = kVariationSign (2 pi i)^-1 sum_l oint_{dD_l} (...),
// where kVariationSign = -1 was fixed once against finite differences. The
// sign belongs to the clockwise convention; variation_sign() follows the
// global orientation.

#include <deque>
#include <mutex>
#include <span>
#include <vector>

#include "schottky/integrals.hpp"

namespace schottky {

inline constexpr double kVariationSign = -1.0;

inline double variation_sign() {
    return contour_orientation() == Orientation::Clockwise ? kVariationSign : -kVariationSign;
}

/// Trace-free, determinant-free matrix ((-u, u^2), (-1, u)).
Matrix2 hejhal_matrix(Complex u);

/// tr[M(u) X] = -(x12 + (x11 - x22) u - x21 u^2): minus the first-order
/// vector field of the Moebius map I + X.
Complex hejhal_trace(Complex u, const Matrix2& x);

/// dS_l S_l^-1 with the true inverse, so the scale matches the stored S_l.
std::vector<Matrix2> relative_deltas(const SchottkyGroup& group, const PerturbationDirection& dir);

struct VariationResult {
    Complex value{0.0};
    std::vector<Complex> per_circle;  // sums to value
    int nodes = 0;
    double last_change = 0.0;
    double max_integrand = 0.0;       // max |integrand| over final nodes
};

/// delta int_z^z' dEta. dEta must be normalized (third-kind, or a-normalized
/// holomorphic); the dEta_zz' series is built with dEta's word length.
VariationResult vary_integral(const Differential& d_eta, const Point& z, const Point& zp,
                              const PerturbationDirection& dir, const QuadratureOptions& opts = {});

/// Same, with an already built slot differential (third kind or orbit form).
VariationResult vary_integral(const Differential& d_eta, const Differential& slot, const PerturbationDirection& dir,
                              const QuadratureOptions& opts = {});

struct PeriodVariation {
    int genus = 0;
    std::vector<Complex> entries;  // row-major delta b_{js}
    int nodes = 0;
    double last_change = 0.0;
    double max_integrand = 0.0;

    Complex operator()(int j, int s) const { return entries[static_cast<std::size_t>(j * genus + s)]; }
    double max_abs() const;
    double symmetry_residual() const;
};

/// Boundary values of a holomorphic basis on every dD_l, refined by doubling.
/// Lets many directions share one set of series evaluations.
class BoundaryTable {
public:
    BoundaryTable(std::span<const Differential> basis, const QuadratureOptions& opts);

    /// delta b_{js} = kVariationSign (2 pi i)^-1 sum_l oint dzeta_j dEta_{z, S_s z} tr[..] du,
    /// where dEta_{z, S_s z} = -dzeta_s / c_s is the orbit differential of
    /// dzeta_s (2 pi i dzeta_s for clockwise contours). Safe to call from
    /// several threads.
    PeriodVariation vary(const PerturbationDirection& dir);

private:
    struct Level {
        int nodes = 0;
        std::vector<CircleNodes> circles;                          // per l
        std::vector<std::vector<std::vector<Complex>>> values;     // [l][k][node]
    };
    const Level& level(std::size_t i);
    PeriodVariation evaluate(const Level& lv, const std::vector<Matrix2>& rel) const;

    std::span<const Differential> basis_;
    QuadratureOptions opts_;
    std::mutex mutex_;
    std::deque<Level> levels_;
};

PeriodVariation vary_period_matrix(std::span<const Differential> basis, const PerturbationDirection& dir,
                                   const QuadratureOptions& opts = {});

/// dS_l = X S_l - S_l X: first-order effect of conjugating the whole group by I + eps X.
PerturbationDirection gauge_conjugation_direction(const SchottkyGroup& group, const Matrix2& x);

/// dS_l = eps S_l for one generator, zero elsewhere.
PerturbationDirection scaling_direction(const SchottkyGroup& group, int l, Complex eps);

/// Coordinates a generator can be moved along.
enum class Coordinate { Attracting, Repelling, Multiplier, C11, C12, C21, C22 };

const char* to_string(Coordinate c);

/// Chain-rule adapter: derivative of the stored generator matrix with
/// respect to one complex coordinate. Fixed-point coordinates need a
/// generator authored in fixed-point form with finite fixed points.
Matrix2 generator_derivative(const GeneratorSpec& spec, Coordinate c);

/// Direction moving coordinate `c` of generator `l` by `delta`.
PerturbationDirection parameter_direction(const SchottkyGroup& group, int l, Coordinate c, Complex delta);

/// Coordinate value of generator `l`'s spec (matrix entries read from the
/// stored matrix when the spec is in fixed-point form).
Complex coordinate_value(const SchottkyGroup& group, int l, Coordinate c);

Complex coordinate_value(const GeneratorSpec& spec, Coordinate c);

/// Spec with one coordinate replaced. Setting a matrix entry of a
/// fixed-point-form generator converts it to a raw matrix.
GeneratorSpec with_coordinate(const SchottkyGroup& group, int l, Coordinate c, Complex value);
GeneratorSpec with_coordinate(const GeneratorSpec& spec, Coordinate c, Complex value);

}  // namespace schottky
