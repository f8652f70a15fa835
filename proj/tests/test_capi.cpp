#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <string>
#include <vector>

#include "schottky.h"

namespace {

sk_generator fixed_point_generator(double a, double b, double mu) {
    sk_generator g{};
    g.kind = SK_GENERATOR_FIXED_POINTS;
    g.attracting = {a, 0.0};
    g.repelling = {b, 0.0};
    g.multiplier = {mu, 0.0};
    return g;
}

sk_disk_pair apollonian(double a, double b, double mu) {
    const double k = std::sqrt(mu), r = k * std::abs(a - b) / (1.0 - mu);
    return {{(a - mu * b) / (1.0 - mu), 0.0}, r, {(b - mu * a) / (1.0 - mu), 0.0}, r};
}

struct Genus2 {
    sk_group* group = nullptr;
    Genus2() {
        const sk_generator gens[2] = {fixed_point_generator(1, -1, 0.02), fixed_point_generator(6, 4, 0.03)};
        const sk_disk_pair disks[2] = {apollonian(1, -1, 0.02), apollonian(6, 4, 0.03)};
        REQUIRE(sk_group_create(2, gens, disks, &group) == SK_OK);
    }
    ~Genus2() { sk_group_destroy(group); }
};

std::complex<double> cx(sk_complex z) { return {z.re, z.im}; }

}  // namespace

TEST_CASE("status names and version") {
    CHECK(std::string(sk_version()) == "1.0.0");
    CHECK(std::string(sk_status_name(SK_OK)) == "ok");
    CHECK(std::string(sk_status_name(SK_RANK_DEFICIENT)) == "rank_deficient");
}

TEST_CASE("invalid arguments set the last error") {
    CHECK(sk_group_create(1, nullptr, nullptr, nullptr) == SK_INVALID_ARGUMENT);
    CHECK(std::strlen(sk_last_error_message()) > 0);
    sk_settings s;
    sk_settings_default(&s);
    CHECK(sk_period_matrix(nullptr, &s, nullptr, nullptr) == SK_INVALID_ARGUMENT);
    CHECK(sk_version() != nullptr);
}

TEST_CASE("unusable groups are returned but refuse computations") {
    sk_generator g = fixed_point_generator(1, -1, 0.04);
    sk_disk_pair d = apollonian(1, -1, 0.04);
    d.radius_d = 1.8;
    sk_group* group = nullptr;
    REQUIRE(sk_group_create(1, &g, &d, &group) == SK_OK);
    CHECK(sk_group_usable(group) == 0);
    sk_validation_summary sum{};
    REQUIRE(sk_group_validation(group, &sum) == SK_OK);
    CHECK(sum.usable == 0);
    bool named = false;
    for (int i = 0; i < sum.check_count; ++i) {
        sk_validation_check c{};
        REQUIRE(sk_group_check(group, i, &c) == SK_OK);
        if (!c.passed && std::string(c.name) == "disjoint D1,D'1") named = true;
    }
    CHECK(named);
    sk_complex b{};
    CHECK(sk_period_matrix(group, nullptr, &b, nullptr) == SK_VALIDATION);
    CHECK(std::string(sk_last_error_message()).find("D1") != std::string::npos);
    sk_group_destroy(group);
}

TEST_CASE("periods through the C interface") {
    Genus2 g;
    sk_settings s;
    sk_settings_default(&s);
    sk_complex b[4];
    sk_period_info info{};
    REQUIRE(sk_period_matrix(g.group, &s, b, &info) == SK_OK);
    CHECK(std::abs(cx(b[0]) - std::complex<double>(0, -0.622299298244)) < 1e-11);
    CHECK(std::abs(cx(b[1]) - cx(b[2])) < 1e-7);
    CHECK(info.symmetry_residual < 1e-7);
    CHECK(info.max_word_len == s.max_word_len);

    sk_complex a[4];
    sk_quadrature_info q{};
    REQUIRE(sk_a_period_matrix(g.group, &s, a, &q) == SK_OK);
    CHECK(std::abs(cx(a[0]) - 1.0) < 1e-8);
    CHECK(std::abs(cx(a[1])) < 1e-8);
    CHECK(q.converged == 1);
    CHECK(q.history_len >= 1);

    double norms[32];
    int count = 0;
    double tail = 0.0;
    const sk_differential d{SK_HOLOMORPHIC, 0, {0, 0}, {0, 0}};
    REQUIRE(sk_layer_norms(g.group, &s, &d, norms, 32, &count, &tail) == SK_OK);
    CHECK(count == s.max_word_len + 1);
    CHECK(sk_layer_norms(g.group, &s, &d, norms, 2, &count, &tail) == SK_INVALID_ARGUMENT);
    CHECK(count == s.max_word_len + 1);

    sk_complex v{};
    REQUIRE(sk_integrate(g.group, &s, &d, {0, 2}, {0, 2}, &v) == SK_OK);
    CHECK(std::abs(cx(v)) < 1e-15);
    double r = 0.0;
    REQUIRE(sk_automorphy_residual(g.group, &s, &d, 1, 32, &r) == SK_OK);
    CHECK(r < 1e-9);
}

TEST_CASE("generator accessors") {
    Genus2 g;
    sk_complex m[4];
    REQUIRE(sk_group_generator_matrix(g.group, 1, m) == SK_OK);
    CHECK(std::abs(cx(m[2]) - 0.97) < 1e-15);  // c21 = 1 - mu
    sk_generator spec{};
    REQUIRE(sk_group_generator_spec(g.group, 0, &spec) == SK_OK);
    CHECK(spec.kind == SK_GENERATOR_FIXED_POINTS);
    CHECK(spec.multiplier.re == 0.02);
    CHECK(sk_group_generator_matrix(g.group, 2, m) == SK_INVALID_ARGUMENT);
}

TEST_CASE("variations and finite differences") {
    Genus2 g;
    sk_settings s;
    sk_settings_default(&s);
    std::vector<sk_complex> dir(8);
    REQUIRE(sk_parameter_direction(g.group, 1, SK_COORD_REPELLING, {0.01, 0.0}, dir.data()) == SK_OK);
    sk_complex v[4], f[4];
    sk_variation_info vi{};
    REQUIRE(sk_vary_period_matrix(g.group, &s, dir.data(), v, &vi) == SK_OK);
    sk_fd_settings fd;
    sk_fd_settings_default(&fd);
    sk_fd_info fi{};
    REQUIRE(sk_fd_period_matrix(g.group, &s, dir.data(), &fd, f, &fi) == SK_OK);
    double scale = 0.0;
    for (const auto& e : f) scale = std::max(scale, std::abs(cx(e)));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(cx(v[i]) - cx(f[i])) < 1e-4 * scale);

    REQUIRE(sk_scaling_direction(g.group, 0, {0.2, 0.1}, dir.data()) == SK_OK);
    REQUIRE(sk_vary_period_matrix(g.group, &s, dir.data(), v, &vi) == SK_OK);
    CHECK(vi.max_integrand < 1e-13);

    const sk_complex x[4] = {{0.1, 0}, {0.3, 0.2}, {-0.1, 0}, {0.05, 0}};
    REQUIRE(sk_gauge_conjugation_direction(g.group, x, dir.data()) == SK_OK);
    REQUIRE(sk_vary_period_matrix(g.group, &s, dir.data(), v, &vi) == SK_OK);
    for (auto& e : v) CHECK(std::abs(cx(e)) < 1e-7);

    const sk_differential d{SK_HOLOMORPHIC, 1, {0, 0}, {0, 0}};
    REQUIRE(sk_parameter_direction(g.group, 0, SK_COORD_MULTIPLIER, {1e-3, 0.0}, dir.data()) == SK_OK);
    sk_complex iv{}, ifd{}, per[2];
    REQUIRE(sk_vary_integral(g.group, &s, &d, {0.2, 3.0}, {3.0, -2.5}, dir.data(), &iv, per, nullptr) == SK_OK);
    REQUIRE(sk_fd_integral(g.group, &s, &d, {0.2, 3.0}, {3.0, -2.5}, dir.data(), &fd, &ifd, nullptr) == SK_OK);
    CHECK(std::abs(cx(iv) - cx(ifd)) < 1e-6 * std::abs(cx(ifd)));
    CHECK(std::abs(cx(per[0]) + cx(per[1]) - cx(iv)) < 1e-14);
}

TEST_CASE("solve through the C interface") {
    const sk_generator start = fixed_point_generator(1, -1, 0.05);
    const sk_disk_pair disks = apollonian(1, -1, 0.05);
    sk_group* g = nullptr;
    REQUIRE(sk_group_create(1, &start, &disks, &g) == SK_OK);
    sk_problem* p = nullptr;
    REQUIRE(sk_problem_create(&p) == SK_OK);
    REQUIRE(sk_problem_add_parameter(p, 0, SK_COORD_MULTIPLIER, SK_PART_REAL) == SK_OK);
    const double target = std::log(0.04) / (2.0 * M_PI);
    REQUIRE(sk_problem_add_period_target(p, 0, 0, {0.0, target}, SK_TARGET_IMAG) == SK_OK);
    CHECK(sk_problem_add_period_target(p, -1, 0, {0.0, 0.0}, SK_TARGET_IMAG) == SK_INVALID_ARGUMENT);

    double disc = 1.0;
    sk_fd_settings fd;
    sk_fd_settings_default(&fd);
    fd.base_step = 1e-3;
    REQUIRE(sk_problem_jacobian_check(p, g, nullptr, &fd, &disc) == SK_OK);
    CHECK(disc < 1e-5);

    sk_newton_options opt;
    sk_newton_options_default(&opt);
    sk_solve_result* r = nullptr;
    REQUIRE(sk_solve(p, g, nullptr, &opt, &r) == SK_OK);
    CHECK(sk_solve_result_converged(r) == 1);
    CHECK(sk_solve_result_parameter_count(r) == 1);
    const int n = sk_solve_result_iteration_count(r);
    REQUIRE(n >= 2);
    sk_solve_iteration it{};
    double x = 0.0;
    REQUIRE(sk_solve_result_iteration(r, n - 1, &it, &x) == SK_OK);
    CHECK(x == doctest::Approx(0.04).epsilon(1e-10));
    CHECK(it.residual_norm < opt.tol);
    sk_group* out = nullptr;
    REQUIRE(sk_solve_result_group(r, &out) == SK_OK);
    sk_generator spec{};
    REQUIRE(sk_group_generator_spec(out, 0, &spec) == SK_OK);
    CHECK(spec.multiplier.re == doctest::Approx(0.04).epsilon(1e-10));
    CHECK(sk_solve_result_iteration(r, n, &it, nullptr) == SK_INVALID_ARGUMENT);
    sk_group_destroy(out);
    sk_solve_result_destroy(r);
    sk_problem_destroy(p);
    sk_group_destroy(g);
}

TEST_CASE("rank deficiency is reported with a trace") {
    Genus2 g;
    sk_problem* p = nullptr;
    REQUIRE(sk_problem_create(&p) == SK_OK);
    for (int l = 0; l < 2; ++l)
        for (sk_coordinate c : {SK_COORD_ATTRACTING, SK_COORD_REPELLING})
            for (sk_part part : {SK_PART_REAL, SK_PART_IMAG}) REQUIRE(sk_problem_add_parameter(p, l, c, part) == SK_OK);
    sk_complex b[4];
    REQUIRE(sk_period_matrix(g.group, nullptr, b, nullptr) == SK_OK);
    REQUIRE(sk_problem_add_period_target(p, 0, 0, {b[0].re, b[0].im + 1e-3}, SK_TARGET_BOTH) == SK_OK);
    REQUIRE(sk_problem_add_period_target(p, 0, 1, b[1], SK_TARGET_BOTH) == SK_OK);
    REQUIRE(sk_problem_add_period_target(p, 1, 1, b[3], SK_TARGET_BOTH) == SK_OK);
    sk_solve_result* r = nullptr;
    CHECK(sk_solve(p, g.group, nullptr, nullptr, &r) == SK_RANK_DEFICIENT);
    REQUIRE(r != nullptr);
    CHECK(sk_solve_result_converged(r) == 0);
    CHECK(sk_solve_result_iteration_count(r) == 1);
    sk_solve_result_destroy(r);
    sk_problem_destroy(p);
}
