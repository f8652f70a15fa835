#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "schottky/moduli_solver.hpp"

using namespace schottky;

namespace {

std::vector<Parameter> complex_params(std::initializer_list<std::pair<int, Coordinate>> coords) {
    std::vector<Parameter> out;
    for (auto [l, c] : coords)
        for (Part p : {Part::Real, Part::Imag}) out.push_back({l, c, p});
    return out;
}

std::vector<PeriodTarget> fixture_targets(const SchottkyGroup& g) {
    const PeriodMatrix pm = period_matrix(g, holomorphic_basis(g, Truncation::fixed(8)));
    return {{0, 0, pm(0, 0)}, {0, 1, pm(0, 1)}, {1, 1, pm(1, 1)}};
}

ModuliProblem round_trip_problem(const SchottkyGroup& g) {
    return ModuliProblem(complex_params({{0, Coordinate::Multiplier}, {1, Coordinate::Multiplier},
                                         {1, Coordinate::Repelling}}),
                         fixture_targets(g), {});
}

SchottkyGroup perturbed_start(const ModuliProblem& p, const SchottkyGroup& g) {
    std::vector<double> x = p.values(g);
    for (std::size_t i = 0; i < x.size(); i += 2) {
        x[i + 1] = 0.01 * x[i];
        x[i] *= 1.01;
    }
    return p.with_values(g, x);
}

}  // namespace

TEST_CASE("starting at the solution takes no steps") {
    const SchottkyGroup g = fixtures::genus2();
    const SolveResult r = newton_solve(round_trip_problem(g), g);
    CHECK(r.trace.converged);
    CHECK(r.trace.steps() == 0);
}

TEST_CASE("genus-1 inversion of the closed form") {
    const SchottkyGroup g = fixtures::genus1(0.05);
    const Complex target = -std::log(0.04) / kTwoPiI;
    const ModuliProblem p({{0, Coordinate::Multiplier, Part::Real}}, {{0, 0, target, TargetParts::Imag}}, {});
    const SolveResult r = newton_solve(p, g);
    CHECK(r.trace.converged);
    CHECK(p.values(r.group)[0] == doctest::Approx(0.04).epsilon(1e-10));
}

TEST_CASE("genus-2 round trip") {
    const SchottkyGroup g = fixtures::genus2();
    const ModuliProblem p = round_trip_problem(g);
    const SchottkyGroup start = perturbed_start(p, g);
    const SolveResult r = newton_solve(p, start);
    CHECK(r.trace.converged);
    CHECK(r.trace.iterations.back().residual_norm < 1e-8);
    CHECK(r.trace.steps() >= 1);
    CHECK(r.trace.steps() <= 5);
    const std::vector<double> x = p.values(r.group), x0 = p.values(g);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - x0[i]) < 1e-7);
    CHECK(convergence_exponent(r.trace) >= 1.8);
}

TEST_CASE("Jacobian is the negated realified variation") {
    const SchottkyGroup g = fixtures::genus2();
    const ModuliProblem p = round_trip_problem(g);
    const RealMatrix j = p.jacobian(g);
    CHECK(j.rows == 6);
    CHECK(j.cols == 6);
    const auto basis = holomorphic_basis(g, Truncation::fixed(8));
    const PeriodVariation v = vary_period_matrix(basis, parameter_direction(g, 1, Coordinate::Repelling, 1.0));
    // column 4 = Re(B_2): residual rows (Re b00, Im b00, Re b01, ...)
    CHECK(j(0, 4) == doctest::Approx(-v(0, 0).real()));
    CHECK(j(1, 4) == doctest::Approx(-v(0, 0).imag()));
    CHECK(j(5, 4) == doctest::Approx(-v(1, 1).imag()));
}

TEST_CASE("Jacobian cross-check with integral targets") {
    const SchottkyGroup g = fixtures::genus2();
    ModuliProblem p(complex_params({{0, Coordinate::Multiplier}, {1, Coordinate::Repelling}}), fixture_targets(g),
                    {{0, Complex(0.2, 3.0), Complex(3.0, -2.5), 0.0}});
    FDConfig cfg;
    cfg.base_step = 1e-3;
    CHECK(p.jacobian_check(g, cfg).max_relative_discrepancy < 1e-5);
}

TEST_CASE("duplicate parameters give identical columns") {
    const SchottkyGroup g = fixtures::genus2();
    const ModuliProblem p({{0, Coordinate::Multiplier, Part::Real}, {0, Coordinate::Multiplier, Part::Real}},
                          fixture_targets(g), {});
    const RealMatrix j = p.jacobian(g);
    for (int r = 0; r < j.rows; ++r) CHECK(j(r, 0) == j(r, 1));
}

TEST_CASE("gauge orbits are reported as rank deficient") {
    const SchottkyGroup g = fixtures::genus2();
    const ModuliProblem p(complex_params({{0, Coordinate::Attracting}, {0, Coordinate::Repelling},
                                          {1, Coordinate::Attracting}, {1, Coordinate::Repelling}}),
                          fixture_targets(g), {});
    std::vector<double> x = p.values(g);
    x[0] += 1e-3;
    const SchottkyGroup start = p.with_values(g, x);
    try {
        newton_solve(p, start);
        FAIL("expected a rank-deficiency error");
    } catch (const SolveError& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
        CHECK(e.trace().iterations.size() == 1);
    }
}

TEST_CASE("problem checks") {
    const SchottkyGroup g = fixtures::genus2();
    CHECK_THROWS_AS(ModuliProblem({{5, Coordinate::Multiplier, Part::Real}}, fixture_targets(g), {}).check(g), Error);
    CHECK_THROWS_AS(ModuliProblem({{0, Coordinate::Multiplier, Part::Real}}, {{0, 3, 0.0}}, {}).check(g), Error);
}

TEST_CASE("convergence exponent") {
    SolveTrace t;
    for (double r : {5e-2, 2.5e-3, 6.25e-6, 3.90625e-11}) t.iterations.push_back({{}, r, 0.0, 0.0, 0});
    CHECK(convergence_exponent(t) == doctest::Approx(2.0));
    SolveTrace one;
    for (double r : {1e-1, 1e-3, 1e-6, 1e-12}) one.iterations.push_back({{}, r, 0.0, 0.0, 0});
    CHECK(convergence_exponent(one) == doctest::Approx(1.5));
    SolveTrace s;
    for (double r : {1e-1, 1e-2}) s.iterations.push_back({{}, r, 0.0, 0.0, 0});
    CHECK(std::isnan(convergence_exponent(s)));
}
