#include "schottky/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "schottky/error.hpp"
#include "schottky/parallel.hpp"

namespace schottky {

namespace {

constexpr int kMaxHalvings = 48;
constexpr int kPolygonSides = 16;
constexpr double kInflation = 1.1;

double clearance_tolerance(const Circle& c) { return 1e-9 * std::max(1.0, c.radius); }

double segment_distance(Complex c, Complex p, Complex q) {
    const Complex d = q - p;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(c - p);
    const double t = std::clamp(std::real((c - p) * std::conj(d)) / len2, 0.0, 1.0);
    return std::abs(c - (p + t * d));
}

template <class F>
void for_each_circle(const SchottkyGroup& group, F&& f) {
    for (const auto& pair : group.disks()) {
        f(pair.d);
        f(pair.d_prime);
    }
}

bool segment_is_clear(const SchottkyGroup& group, Complex p, Complex q) {
    bool ok = true;
    for_each_circle(group, [&](const Circle& c) {
        if (segment_distance(c.center, p, q) - c.radius < -clearance_tolerance(c)) ok = false;
    });
    return ok;
}

// Continuous change of log(x - pole) from x0 to x1 along the straight segment.
Complex log_increment(Complex pole, Complex x0, Complex x1, int depth = 0) {
    const Complex d0 = x0 - pole;
    const Complex d1 = x1 - pole;
    if (std::abs(d0) < kPoleProximity || std::abs(d1) < kPoleProximity)
        fail(ErrorCode::PoleProximity, "integration path passes within 1e-12 of a pole");
    const Complex ratio = d1 / d0;
    if (std::abs(std::arg(ratio)) < 0.5 * std::numbers::pi) return std::log(ratio);
    if (depth >= kMaxHalvings)
        fail(ErrorCode::BranchTracking, "argument change stayed >= pi/2 after maximal segment subdivision");
    const Complex mid = 0.5 * (x0 + x1);
    return log_increment(pole, x0, mid, depth + 1) + log_increment(pole, mid, x1, depth + 1);
}

struct PulledBackPole {
    Complex value;
    bool present = false;  // factor exists in the original term
    bool finite = false;   // pulled-back location is finite
};

Complex term_integral(const PulledBackPole& a, const PulledBackPole& b, const Point& map_pole,
                      std::span<const Complex> pts) {
    Complex total{0.0};
    const bool cancel_pole = a.present && b.present;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Complex x0 = pts[i], x1 = pts[i + 1];
        if (x0 == x1) continue;
        if (a.present && a.finite) total += log_increment(a.value, x0, x1);
        if (b.present && b.finite) total -= log_increment(b.value, x0, x1);
        if (!cancel_pole && map_pole.is_finite()) {
            // m(x) - a = det (x - a*) / ((c21 x + c22)(c21 a* + c22)): the
            // (c21 x + c22) factor survives only when one side is absent.
            const Complex pl = log_increment(map_pole.value(), x0, x1);
            if (a.present) total -= pl;
            if (b.present) total += pl;
        }
    }
    return total;
}

Complex integrate_impl(const Differential& d, const MoebiusMap* m, const IntegrationPath& path) {
    const auto& pts = path.waypoints();
    const std::optional<MoebiusMap> m_inv = m ? std::optional<MoebiusMap>(inverse(*m)) : std::nullopt;
    const Point map_pole = m ? m->pole() : Point::infinity();
    auto pull = [&](Complex pole, bool infinite) {
        PulledBackPole out;
        out.present = !infinite;
        if (!out.present) return out;
        if (!m_inv) {
            out.finite = true;
            out.value = pole;
            return out;
        }
        const Point p = m_inv->apply(Point(pole));
        out.finite = p.is_finite();
        if (out.finite) out.value = p.value();
        return out;
    };
    CompensatedSum sum;
    for (const auto& t : d.terms()) {
        sum.add(term_integral(pull(t.a, t.a_infinite), pull(t.b, t.b_infinite), map_pole, pts));
    }
    return d.scale() * sum.value();
}

std::string geometry_dump(const SchottkyGroup& group, Complex from, Complex to) {
    std::ostringstream os;
    os.precision(10);
    os << "from " << from << " to " << to << "; disks:";
    for_each_circle(group, [&](const Circle& c) { os << " [" << c.center << ", r=" << c.radius << "]"; });
    return os.str();
}

}  // namespace

double segment_clearance(const SchottkyGroup& group, Complex p, Complex q) {
    double best = std::numeric_limits<double>::infinity();
    for_each_circle(group, [&](const Circle& c) { best = std::min(best, segment_distance(c.center, p, q) - c.radius); });
    return best;
}

IntegrationPath::IntegrationPath(const SchottkyGroup& group, std::vector<Complex> waypoints)
    : waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) fail(ErrorCode::InvalidArgument, "integration path needs at least one waypoint");
    if (waypoints_.size() == 1) waypoints_.push_back(waypoints_.front());
    for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
        if (!segment_is_clear(group, waypoints_[i], waypoints_[i + 1]))
            fail(ErrorCode::InvalidArgument, "integration path segment " + std::to_string(i) + " enters a disk");
    }
}

IntegrationPath IntegrationPath::reversed() const {
    IntegrationPath r;
    r.waypoints_.assign(waypoints_.rbegin(), waypoints_.rend());
    return r;
}

IntegrationPath plan_path(const SchottkyGroup& group, Complex from, Complex to) {
    if (segment_is_clear(group, from, to)) return IntegrationPath(group, {from, to});

    std::vector<Complex> nodes{from, to};
    const double stretch = kInflation / std::cos(std::numbers::pi / kPolygonSides);
    for_each_circle(group, [&](const Circle& c) {
        for (int j = 0; j < kPolygonSides; ++j) {
            const Complex v = c.center + std::polar(stretch * c.radius, 2.0 * std::numbers::pi * j / kPolygonSides);
            if (segment_is_clear(group, v, v)) nodes.push_back(v);
        }
    });

    const std::size_t n = nodes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev(n, n);
    std::vector<bool> done(n, false);
    dist[0] = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && dist[i] < std::numeric_limits<double>::infinity() && (u == n || dist[i] < dist[u])) u = i;
        if (u == n || u == 1) break;
        done[u] = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v] || v == u) continue;
            const double w = std::abs(nodes[v] - nodes[u]);
            if (dist[u] + w < dist[v] && segment_is_clear(group, nodes[u], nodes[v])) {
                dist[v] = dist[u] + w;
                prev[v] = u;
            }
        }
    }
    if (prev[1] == n) fail(ErrorCode::PathPlanning, "no disk-avoiding polyline found: " + geometry_dump(group, from, to));

    std::vector<Complex> route;
    for (std::size_t v = 1; v != n; v = prev[v]) {
        route.push_back(nodes[v]);
        if (v == 0) break;
    }
    std::reverse(route.begin(), route.end());
    return IntegrationPath(group, std::move(route));
}

Complex integrate(const Differential& d, const IntegrationPath& path) { return integrate_impl(d, nullptr, path); }

Complex integrate_image(const Differential& d, const MoebiusMap& m, const IntegrationPath& path) {
    return integrate_impl(d, &m, path);
}

APeriods a_periods(const Differential& d, const QuadratureOptions& opts) {
    const SchottkyGroup& group = d.group();
    const int g = group.genus();
    auto compute = [&](int n, double& mass) {
        std::vector<Complex> out(static_cast<std::size_t>(g));
        std::vector<double> masses(static_cast<std::size_t>(g));
        detail::parallel_for(static_cast<std::size_t>(g), opts.threads, [&](std::size_t k) {
            const CircleNodes nodes = circle_nodes(group.disk(static_cast<int>(k)).d, n);
            CompensatedSum s;
            double m = 0.0;
            for (std::size_t j = 0; j < nodes.points.size(); ++j) {
                const Complex v = d.eval_unchecked(nodes.points[j]) * nodes.weights[j];
                s.add(v);
                m += std::abs(v);
            }
            out[k] = s.value();
            masses[k] = m;
        });
        mass = *std::max_element(masses.begin(), masses.end());
        return out;
    };

    APeriods res;
    int n = opts.nodes;
    double mass = 0.0;
    res.values = compute(n, mass);
    res.nodes = n;
    if (!opts.auto_double) return res;
    for (;;) {
        if (2 * n > opts.max_nodes) {
            res.converged = false;
            return res;
        }
        double mass2 = 0.0;
        auto next = compute(2 * n, mass2);
        double change = 0.0, scale = mass2;
        for (std::size_t k = 0; k < next.size(); ++k) {
            change = std::max(change, std::abs(next[k] - res.values[k]));
            scale = std::max(scale, std::abs(next[k]));
        }
        const double rel = scale > 0.0 ? change / scale : 0.0;
        n *= 2;
        res.values = std::move(next);
        res.nodes = n;
        res.last_change = rel;
        res.history.emplace_back(n, rel);
        if (rel <= opts.relative_tolerance) return res;
    }
}

double PeriodMatrix::symmetry_residual() const {
    double worst = 0.0;
    for (int j = 0; j < genus; ++j)
        for (int s = j + 1; s < genus; ++s) worst = std::max(worst, std::abs((*this)(j, s) - (*this)(s, j)));
    return worst;
}

Complex default_base_point(const SchottkyGroup& group) {
    Complex mean{0.0};
    double top = -std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    int count = 0;
    for_each_circle(group, [&](const Circle& c) {
        mean += c.center;
        ++count;
        top = std::max(top, c.center.imag() + c.radius);
        rmax = std::max(rmax, c.radius);
    });
    return {mean.real() / count, top + std::max(1.0, rmax)};
}

std::vector<Differential> holomorphic_basis(const SchottkyGroup& group, const Truncation& trunc,
                                            int normalization_nodes, int threads) {
    group.require_usable();
    const auto g = static_cast<std::size_t>(group.genus());
    std::vector<std::optional<Differential>> slots(g);
    detail::parallel_for(g, threads, [&](std::size_t k) {
        slots[k] = Differential::holomorphic(group, static_cast<int>(k), trunc, normalization_nodes);
    });
    std::vector<Differential> out;
    out.reserve(g);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Complex b_period(const Differential& d, int s, Complex z0) {
    const SchottkyGroup& group = d.group();
    if (s < 0 || s >= group.genus()) fail(ErrorCode::InvalidArgument, "cycle index out of range");
    const auto where = in_fundamental_domain(group, Point(z0));
    if (!where.inside || where.on_boundary)
        fail(ErrorCode::InvalidArgument, "base point must lie in the interior of the fundamental domain");
    const Circle& dp = group.disk(s).d_prime;
    const Complex p = dp.center + dp.radius * (z0 - dp.center) / std::abs(z0 - dp.center);
    const MoebiusMap& gen = group.generator(s);
    const Complex sp = gen.apply(Point(p)).value();

    const IntegrationPath to_circle = plan_path(group, z0, p);
    const IntegrationPath across = plan_path(group, p, sp);
    return integrate(d, to_circle) + integrate(d, across) + integrate_image(d, gen, to_circle.reversed());
}

PeriodMatrix period_matrix(const SchottkyGroup& group, std::span<const Differential> basis,
                           std::optional<Complex> base_point, int threads) {
    group.require_usable();
    const int g = group.genus();
    if (static_cast<int>(basis.size()) != g) fail(ErrorCode::Structure, "basis size does not match genus");
    PeriodMatrix pm;
    pm.genus = g;
    pm.base_point = base_point.value_or(default_base_point(group));
    pm.entries.resize(static_cast<std::size_t>(g * g));
    for (const auto& d : basis) {
        if (d.kind() != DifferentialKind::Holomorphic)
            fail(ErrorCode::InvalidArgument, "period_matrix needs a normalized holomorphic basis");
        pm.max_word_len = std::max(pm.max_word_len, d.max_word_len());
        pm.tail_estimate = std::max(pm.tail_estimate, d.tail_estimate());
    }
    detail::parallel_for(static_cast<std::size_t>(g * g), threads, [&](std::size_t idx) {
        const int j = static_cast<int>(idx) / g, s = static_cast<int>(idx) % g;
        pm.entries[idx] = b_period(basis[static_cast<std::size_t>(j)], s, pm.base_point);
    });
    return pm;
}

}  // namespace schottky
