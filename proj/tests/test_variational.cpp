#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "schottky/fd_oracle.hpp"
#include "schottky/variational.hpp"

using namespace schottky;

namespace {

QuadratureOptions fixed_nodes(int n) {
    QuadratureOptions q;
    q.nodes = n;
    q.auto_double = false;
    return q;
}

double max_rel(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return worst;
}

std::vector<Complex> period_entries(const SchottkyGroup& g) {
    return period_matrix(g, holomorphic_basis(g, Truncation::fixed(8))).entries;
}

}  // namespace

TEST_CASE("Hejhal matrix") {
    const Matrix2 m0 = hejhal_matrix(0.0);
    CHECK(m0 == Matrix2{0.0, 0.0, -1.0, 0.0});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const Complex u = fixtures::random_complex(rng);
        const Matrix2 m = hejhal_matrix(u);
        CHECK(std::abs(m.trace()) < 1e-15);
        CHECK(std::abs(m.det()) < 1e-14 * (1 + std::norm(u) * std::norm(u)));
        const Matrix2 x = fixtures::random_matrix(rng);
        CHECK(std::abs(hejhal_trace(u, x) - (m * x).trace()) < 1e-13 * (1 + std::norm(u)));
    }
}

TEST_CASE("zero and scaling directions vanish") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    CHECK(vary_period_matrix(basis, PerturbationDirection::zero(2)).max_abs() == 0.0);
    for (int l = 0; l < 2; ++l) {
        const PeriodVariation v = vary_period_matrix(basis, scaling_direction(g, l, Complex(0.3, -0.2)));
        CHECK(v.max_integrand < 1e-13);
        CHECK(v.max_abs() < 1e-13);
        const VariationResult r = vary_integral(basis[0], Point(Complex(0.0, 2.0)), Point(Complex(3.0, -2.0)),
                                                scaling_direction(g, l, 0.5));
        CHECK(r.max_integrand < 1e-13);
    }
}

TEST_CASE("conjugation directions vanish") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    CHECK(gauge_conjugation_direction(g, Matrix2::identity()).is_zero());
    CHECK(vary_period_matrix(basis, gauge_conjugation_direction(g, Matrix2{0.0, 1.0, 0.0, 0.0})).max_abs() < 1e-7);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 3; ++i) {
        const PerturbationDirection d = gauge_conjugation_direction(g, fixtures::random_matrix(rng));
        CHECK(vary_period_matrix(basis, d).max_abs() < 1e-7 * d.frobenius_norm());
    }
}

TEST_CASE("genus-1 multiplier variation matches the closed form") {
    for (double mu : {0.04, 0.09}) {
        const SchottkyGroup g = fixtures::genus1(mu);
        const auto basis = holomorphic_basis(g, Truncation::fixed(8));
        const Complex dmu(1e-3, 2e-3);
        const PeriodVariation v = vary_period_matrix(basis, parameter_direction(g, 0, Coordinate::Multiplier, dmu));
        const Complex expect = -dmu / (kTwoPiI * mu);
        CHECK(std::abs(v(0, 0) - expect) < 1e-6 * std::abs(expect));
    }
}

TEST_CASE("period variation agrees with finite differences") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    std::mt19937_64 rng(23);
    BoundaryTable table(basis, {});
    for (int i = 0; i < 3; ++i) {
        const PerturbationDirection d = fixtures::random_direction(g, rng);
        const PeriodVariation v = table.vary(d);
        const FDResult fd = fd_directional(period_entries, g, d);
        CHECK(max_rel(v.entries, fd.value) < 1e-6);
        CHECK(v.symmetry_residual() < 1e-7 * v.max_abs());
        const PeriodVariation direct = vary_period_matrix(basis, d);
        CHECK(max_rel(direct.entries, v.entries) < 1e-12);
    }
}

TEST_CASE("integral variation agrees with finite differences") {
    const SchottkyGroup g = fixtures::genus2();
    const Complex z(0.2, 3.0), zp(3.0, -2.5);
    std::mt19937_64 rng(29);
    const PerturbationDirection d = fixtures::random_direction(g, rng);
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    const VariationResult v = vary_integral(basis[1], Point(z), Point(zp), d);
    Complex sum = 0.0;
    for (Complex c : v.per_circle) sum += c;
    CHECK(std::abs(sum - v.value) < 1e-14 * std::abs(v.value));
    const ScalarGroupFunction f = [&](const SchottkyGroup& h) {
        return integrate(Differential::holomorphic(h, 1, Truncation::fixed(8)), plan_path(h, z, zp));
    };
    const FDResult fd = fd_directional(f, g, d);
    CHECK(std::abs(v.value - fd.scalar()) < 1e-6 * std::abs(fd.scalar()));

    const VariationResult t = vary_integral(
        Differential::third_kind(g, Point(Complex(-2.0, 2.0)), Point(Complex(7.0, 1.0)), Truncation::fixed(8)),
        Point(z), Point(zp), d);
    const ScalarGroupFunction ft = [&](const SchottkyGroup& h) {
        const Differential e =
            Differential::third_kind(h, Point(Complex(-2.0, 2.0)), Point(Complex(7.0, 1.0)), Truncation::fixed(8));
        return integrate(e, plan_path(h, z, zp));
    };
    const FDResult fdt = fd_directional(ft, g, d);
    CHECK(std::abs(t.value - fdt.scalar()) < 1e-6 * std::abs(fdt.scalar()));
}

TEST_CASE("variation is complex-linear in the direction") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(6));
    std::mt19937_64 rng(31);
    const PerturbationDirection d1 = fixtures::random_direction(g, rng), d2 = fixtures::random_direction(g, rng);
    const Complex a(0.7, -1.2), b(-0.4, 0.3);
    PerturbationDirection combo = a * d1;
    combo += b * d2;
    const auto q = fixed_nodes(256);
    const PeriodVariation v1 = vary_period_matrix(basis, d1, q), v2 = vary_period_matrix(basis, d2, q);
    const PeriodVariation vc = vary_period_matrix(basis, combo, q);
    for (std::size_t i = 0; i < vc.entries.size(); ++i)
        CHECK(std::abs(vc.entries[i] - (a * v1.entries[i] + b * v2.entries[i])) < 1e-12 * vc.max_abs());
}

TEST_CASE("flipping the orientation flips every variation") {
    const SchottkyGroup g = fixtures::genus2();
    std::mt19937_64 rng(37);
    const PerturbationDirection d = fixtures::random_direction(g, rng);
    const auto q = fixed_nodes(256);
    const PeriodVariation ref = vary_period_matrix(holomorphic_basis(g, Truncation::fixed(6)), d, q);
    detail::set_contour_orientation_for_testing(Orientation::Counterclockwise);
    const PeriodVariation flipped = vary_period_matrix(holomorphic_basis(g, Truncation::fixed(6)), d, q);
    detail::set_contour_orientation_for_testing(Orientation::Clockwise);
    for (std::size_t i = 0; i < ref.entries.size(); ++i)
        CHECK(std::abs(flipped.entries[i] + ref.entries[i]) < 1e-10 * ref.max_abs());
    CHECK(contour_orientation() == Orientation::Clockwise);
}

TEST_CASE("parameter directions follow the fixed-point chain rule") {
    const SchottkyGroup g = fixtures::genus2();
    const double h = 1e-6;
    for (Coordinate c : {Coordinate::Attracting, Coordinate::Repelling, Coordinate::Multiplier}) {
        const Matrix2 d = generator_derivative(g.spec(1), c);
        const Complex v = coordinate_value(g, 1, c);
        const SchottkyGroup gp = g.with_generators({g.spec(0), with_coordinate(g, 1, c, v + h)});
        const SchottkyGroup gm = g.with_generators({g.spec(0), with_coordinate(g, 1, c, v - h)});
        const Matrix2 fd = (1.0 / (2 * h)) * (gp.generator(1).matrix() - gm.generator(1).matrix());
        CHECK((fd - d).frobenius_norm() < 1e-7 * d.frobenius_norm());
    }
    CHECK(coordinate_value(g, 1, Coordinate::C21) == Complex(1.0 - 0.03));
    const GeneratorSpec raw = with_coordinate(g, 0, Coordinate::C12, 0.5);
    CHECK(std::holds_alternative<Matrix2>(raw));
}
