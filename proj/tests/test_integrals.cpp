#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "schottky/error.hpp"
#include "schottky/integrals.hpp"

using namespace schottky;

namespace {

Complex closed_form(double mu) { return -std::log(mu) / kTwoPiI; }

}  // namespace

TEST_CASE("genus-1 period matches the closed form") {
    for (double mu : {0.04, 0.05, 0.09}) {
        const SchottkyGroup g = fixtures::genus1(mu);
        const auto basis = holomorphic_basis(g, Truncation::fixed(8));
        const PeriodMatrix pm = period_matrix(g, basis);
        CHECK(std::abs(pm(0, 0) - closed_form(mu)) < 1e-8);
        CHECK(std::abs(b_period(basis[0], 0, Complex(0.2, -1.7)) - closed_form(mu)) < 1e-8);
    }
    CHECK(std::abs(closed_form(0.04)) == doctest::Approx(0.51230).epsilon(1e-5));
}

TEST_CASE("paths") {
    const SchottkyGroup g = fixtures::genus2();
    const Differential d = Differential::holomorphic(g, 0, Truncation::fixed(6));
    const Complex z(0.0, 2.0);
    CHECK(std::abs(integrate(d, IntegrationPath(g, {z, z}))) < 1e-15);
    const IntegrationPath p = plan_path(g, Complex(-3.0, 0.0), Complex(8.0, 0.1));
    for (std::size_t i = 0; i + 1 < p.waypoints().size(); ++i)
        CHECK(segment_clearance(g, p.waypoints()[i], p.waypoints()[i + 1]) >= 0.0);
    const Complex v = integrate(d, p);
    CHECK(std::abs(integrate(d, p.reversed()) + v) < 1e-14);
    CHECK_THROWS_AS(IntegrationPath(g, {Complex(-3.0, 0.0), Complex(8.0, 0.0)}), Error);
    CHECK_THROWS_AS(plan_path(g, g.disk(0).d.center, z), Error);
}

TEST_CASE("closed polygon around a disk equals the a-period") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    for (int k = 0; k < 2; ++k) {
        const Circle c = g.disk(k).d;
        std::vector<Complex> pts;
        const int n = 48;
        for (int j = 0; j <= n; ++j)  // clockwise
            pts.push_back(c.center + 1.3 * c.radius * std::polar(1.0, -2.0 * std::numbers::pi * j / n));
        const IntegrationPath loop(g, pts);
        for (int j = 0; j < 2; ++j) {
            const APeriods a = a_periods(basis[static_cast<std::size_t>(j)]);
            CHECK(std::abs(integrate(basis[static_cast<std::size_t>(j)], loop) - a.values[static_cast<std::size_t>(k)]) <
                  1e-8);
        }
    }
}

TEST_CASE("a-periods") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    QuadratureOptions fixed;
    fixed.auto_double = false;
    for (int j = 0; j < 2; ++j) {
        fixed.nodes = 256;
        const APeriods a256 = a_periods(basis[static_cast<std::size_t>(j)], fixed);
        fixed.nodes = 512;
        const APeriods a512 = a_periods(basis[static_cast<std::size_t>(j)], fixed);
        for (int s = 0; s < 2; ++s) {
            CHECK(std::abs(a256.values[static_cast<std::size_t>(s)] - (j == s ? 1.0 : 0.0)) < 1e-8);
            CHECK(std::abs(a512.values[static_cast<std::size_t>(s)] - a256.values[static_cast<std::size_t>(s)]) < 1e-12);
        }
    }
    const Differential t = Differential::third_kind(g, Point(Complex(2.5, 1.0)), Point(Complex(-3.0, 2.0)),
                                                    Truncation::fixed(6));
    const APeriods at = a_periods(t);
    CHECK(at.converged);
    CHECK(at.values.size() == 2);
}

TEST_CASE("trapezoid error decays exponentially") {
    const SchottkyGroup g = fixtures::genus1(0.04);
    const Differential d = Differential::holomorphic(g, 0, Truncation::fixed(4), 2048);
    QuadratureOptions q;
    q.auto_double = false;
    std::vector<double> err;
    for (int n = 4; n <= 64; n *= 2) {
        q.nodes = n;
        err.push_back(std::abs(a_periods(d, q).values[0] - 1.0));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i)
        if (err[i] < 1e-3 && err[i + 1] > 1e-14) CHECK(err[i + 1] < std::pow(err[i], 1.5));
}

TEST_CASE("period matrix is symmetric and base-point independent") {
    const SchottkyGroup g = fixtures::genus2();
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    const PeriodMatrix a = period_matrix(g, basis);
    const PeriodMatrix b = period_matrix(g, basis, Complex(3.0, -2.5));
    CHECK(a.symmetry_residual() < 1e-7);
    for (int j = 0; j < 2; ++j)
        for (int s = 0; s < 2; ++s) CHECK(std::abs(a(j, s) - b(j, s)) < 1e-8);
    CHECK(std::abs(a(0, 0) - Complex(0.0, -0.622299298244)) < 1e-11);
    CHECK(std::abs(a(0, 1) - Complex(0.0, 0.027751576334)) < 1e-11);
    CHECK(std::abs(a(1, 1) - Complex(0.0, -0.557879960772)) < 1e-11);
    // Imaginary part of the period matrix is negative definite in this convention.
    CHECK(a(0, 0).imag() * a(1, 1).imag() - a(0, 1).imag() * a(0, 1).imag() > 0.0);
}

TEST_CASE("threads do not change results") {
    const SchottkyGroup g = fixtures::genus2();
    const auto b1 = holomorphic_basis(g, Truncation::fixed(6), 256, 1);
    const auto b3 = holomorphic_basis(g, Truncation::fixed(6), 256, 3);
    const PeriodMatrix p1 = period_matrix(g, b1, std::nullopt, 1);
    const PeriodMatrix p3 = period_matrix(g, b3, std::nullopt, 3);
    CHECK(p1.entries == p3.entries);
}
