#include "schottky/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "schottky/error.hpp"
#include "schottky/parallel.hpp"

namespace schottky {

void FDConfig::check() const {
    if (!(base_step > 1e-9)) fail(ErrorCode::InvalidArgument, "finite-difference base step must exceed 1e-9");
    if (richardson_levels < 0) fail(ErrorCode::InvalidArgument, "richardson_levels must be nonnegative");
    if (max_shrinks < 0) fail(ErrorCode::InvalidArgument, "max_shrinks must be nonnegative");
}

namespace {

using Vec = std::vector<Complex>;

double max_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Central differences at t0 / 2^i, i = 0..levels; nullopt when a perturbed
// group is not usable.
std::optional<std::vector<Vec>> central_differences(const GroupFunction& f, const SchottkyGroup& group,
                                                    const PerturbationDirection& dir, double t0, int levels,
                                                    int threads) {
    const auto n = static_cast<std::size_t>(levels + 1);
    std::vector<Vec> plus(n), minus(n);
    std::vector<char> ok(2 * n, 1);
    detail::parallel_for(2 * n, threads, [&](std::size_t job) {
        const std::size_t i = job / 2;
        const double t = std::ldexp(t0, -static_cast<int>(i)) * ((job % 2) == 0 ? 1.0 : -1.0);
        const SchottkyGroup g = group.perturbed(dir, t);
        if (!g.usable()) {
            ok[job] = 0;
            return;
        }
        try {
            ((job % 2) == 0 ? plus : minus)[i] = f(g);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Validation) throw;
            ok[job] = 0;
        }
    });
    if (std::find(ok.begin(), ok.end(), 0) != ok.end()) return std::nullopt;

    std::vector<Vec> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (plus[i].size() != minus[i].size() || plus[i].size() != plus[0].size())
            fail(ErrorCode::InvalidArgument, "finite-difference function changed its output length");
        const double t = std::ldexp(t0, -static_cast<int>(i));
        d[i].resize(plus[i].size());
        for (std::size_t c = 0; c < d[i].size(); ++c) d[i][c] = (plus[i][c] - minus[i][c]) / (2.0 * t);
    }
    return d;
}

}  // namespace

FDResult fd_directional(const GroupFunction& f, const SchottkyGroup& group, const PerturbationDirection& dir,
                        const FDConfig& cfg) {
    cfg.check();
    group.require_usable();
    dir.check_finite();
    if (static_cast<int>(dir.deltas.size()) != group.genus())
        fail(ErrorCode::Structure, "direction size does not match genus");
    double rel_norm = 0.0;
    for (int l = 0; l < group.genus(); ++l)
        rel_norm += std::pow((dir.deltas[static_cast<std::size_t>(l)] * group.generator_inverse(l).matrix())
                                 .frobenius_norm(),
                             2);
    rel_norm = std::sqrt(rel_norm);
    if (rel_norm == 0.0) {
        FDResult zero;
        zero.value = f(group);
        std::fill(zero.value.begin(), zero.value.end(), Complex(0.0));
        return zero;
    }
    double t0 = cfg.base_step / rel_norm;

    FDResult res;
    std::optional<std::vector<Vec>> d;
    for (;;) {
        d = central_differences(f, group, dir, t0, cfg.richardson_levels, cfg.threads);
        if (d) break;
        if (res.shrinks == cfg.max_shrinks)
            fail(ErrorCode::Validation, "perturbed group fails validation even at step " + std::to_string(t0));
        ++res.shrinks;
        t0 *= 0.5;
    }
    res.step = t0;

    // Richardson tableau for an even error expansion in t.
    std::vector<Vec> row = *d;
    std::vector<double> changes;
    Vec diag = row[0];
    for (int k = 1; k <= cfg.richardson_levels; ++k) {
        const double w = std::pow(4.0, k);
        std::vector<Vec> next;
        for (std::size_t i = 1; i < row.size(); ++i) {
            Vec v(row[i].size());
            for (std::size_t c = 0; c < v.size(); ++c) v[c] = (w * row[i][c] - row[i - 1][c]) / (w - 1.0);
            next.push_back(std::move(v));
        }
        changes.push_back(max_diff(next.front(), diag));
        diag = next.front();
        row = std::move(next);
    }
    res.value = diag;
    if (!changes.empty()) res.error_estimate = changes.back();
    for (std::size_t i = 1; i < changes.size(); ++i)
        if (changes[i] > changes[i - 1]) res.monotone = false;
    if (!res.monotone) res.warning = "Richardson corrections did not decrease monotonically";
    return res;
}

FDResult fd_directional(const ScalarGroupFunction& f, const SchottkyGroup& group, const PerturbationDirection& dir,
                        const FDConfig& cfg) {
    return fd_directional(GroupFunction([&](const SchottkyGroup& g) { return Vec{f(g)}; }), group, dir, cfg);
}

}  // namespace schottky
