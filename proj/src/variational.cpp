#include "schottky/variational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "schottky/error.hpp"
#include "schottky/parallel.hpp"

namespace schottky {

namespace {

// Upper bound for |tr[M(u) X]| without cancellation.
double trace_bound(Complex u, const Matrix2& x) {
    const double a = std::abs(u);
    return std::abs(x.c12) + std::abs(x.c11 - x.c22) * a + std::abs(x.c21) * a * a;
}

void check_direction(const SchottkyGroup& group, const PerturbationDirection& dir) {
    if (static_cast<int>(dir.deltas.size()) != group.genus())
        fail(ErrorCode::Structure, "direction has " + std::to_string(dir.deltas.size()) + " matrices for genus " +
                                       std::to_string(group.genus()));
    dir.check_finite();
}

struct Quadrature {
    std::vector<Complex> per_circle;
    double mass = 0.0;
    double max_integrand = 0.0;

    Complex total() const {
        CompensatedSum s;
        for (const auto& v : per_circle) s.add(v);
        return s.value();
    }
};

Quadrature integral_at(const Differential& d_eta, const Differential& slot, const std::vector<Matrix2>& rel, int n,
                       int threads) {
    const SchottkyGroup& group = d_eta.group();
    const auto g = static_cast<std::size_t>(group.genus());
    Quadrature q;
    q.per_circle.resize(g);
    for (std::size_t l = 0; l < g; ++l) {
        const CircleNodes nodes = circle_nodes(group.disk(static_cast<int>(l)).d, n);
        std::vector<Complex> f(nodes.points.size());
        std::vector<double> bound(nodes.points.size());
        detail::parallel_for(nodes.points.size(), threads, [&](std::size_t j) {
            const Complex u = nodes.points[j];
            const Complex prod = d_eta.eval_unchecked(u) * slot.eval_unchecked(u);
            f[j] = prod * hejhal_trace(u, rel[l]);
            bound[j] = std::abs(prod) * trace_bound(u, rel[l]) * std::abs(nodes.weights[j]);
        });
        CompensatedSum s;
        for (std::size_t j = 0; j < f.size(); ++j) {
            s.add(f[j] * nodes.weights[j]);
            q.mass += bound[j];
            q.max_integrand = std::max(q.max_integrand, std::abs(f[j]));
        }
        q.per_circle[l] = s.value() * (variation_sign() / kTwoPiI);
    }
    q.mass /= 2.0 * std::numbers::pi;
    return q;
}

}  // namespace

Matrix2 hejhal_matrix(Complex u) { return {-u, u * u, -1.0, u}; }

Complex hejhal_trace(Complex u, const Matrix2& x) {
    return -(x.c12 + (x.c11 - x.c22) * u - x.c21 * u * u);
}

std::vector<Matrix2> relative_deltas(const SchottkyGroup& group, const PerturbationDirection& dir) {
    check_direction(group, dir);
    std::vector<Matrix2> out;
    // Extended precision keeps a pure scaling direction scalar to the last bit,
    // so its trace-free part (all the integrand sees) stays at rounding level.
    using X = std::complex<long double>;
    const auto ext = [](Complex z) { return X(z.real(), z.imag()); };
    const auto back = [](X z) { return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())); };
    for (int l = 0; l < group.genus(); ++l) {
        const Matrix2& s = group.generator(l).matrix();
        const Matrix2& d = dir.deltas[static_cast<std::size_t>(l)];
        const X a = ext(s.c11), b = ext(s.c12), c = ext(s.c21), e = ext(s.c22);
        const X det = a * e - b * c;
        out.push_back({back((ext(d.c11) * e - ext(d.c12) * c) / det), back((ext(d.c12) * a - ext(d.c11) * b) / det),
                       back((ext(d.c21) * e - ext(d.c22) * c) / det), back((ext(d.c22) * a - ext(d.c21) * b) / det)});
    }
    return out;
}

VariationResult vary_integral(const Differential& d_eta, const Point& z, const Point& zp,
                              const PerturbationDirection& dir, const QuadratureOptions& opts) {
    const Differential slot =
        Differential::third_kind(d_eta.group(), z, zp, Truncation::fixed(d_eta.max_word_len()));
    return vary_integral(d_eta, slot, dir, opts);
}

VariationResult vary_integral(const Differential& d_eta, const Differential& slot, const PerturbationDirection& dir,
                              const QuadratureOptions& opts) {
    if (!d_eta.normalized())
        fail(ErrorCode::Normalization, "vary_integral needs a differential normalized over the cycles dD_k");
    if (slot.kind() == DifferentialKind::Holomorphic)
        fail(ErrorCode::InvalidArgument, "the endpoint slot takes a third-kind or orbit differential");
    if (slot.group().genus() != d_eta.group().genus())
        fail(ErrorCode::Structure, "differentials belong to different groups");
    const auto rel = relative_deltas(d_eta.group(), dir);

    VariationResult res;
    int n = opts.nodes;
    Quadrature q = integral_at(d_eta, slot, rel, n, opts.threads);
    res.nodes = n;
    if (opts.auto_double) {
        for (;;) {
            if (2 * n > opts.max_nodes)
                fail(ErrorCode::Convergence, "variation quadrature did not converge by " +
                                                 std::to_string(opts.max_nodes) + " nodes");
            Quadrature q2 = integral_at(d_eta, slot, rel, 2 * n, opts.threads);
            const double scale = std::max(std::abs(q2.total()), q2.mass);
            const double rel_change = scale > 0.0 ? std::abs(q2.total() - q.total()) / scale : 0.0;
            n *= 2;
            q = std::move(q2);
            res.nodes = n;
            res.last_change = rel_change;
            if (rel_change <= opts.relative_tolerance) break;
        }
    }
    res.per_circle = q.per_circle;
    res.value = q.total();
    res.max_integrand = q.max_integrand;
    return res;
}

double PeriodVariation::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, std::abs(e));
    return m;
}

double PeriodVariation::symmetry_residual() const {
    double worst = 0.0;
    for (int j = 0; j < genus; ++j)
        for (int s = j + 1; s < genus; ++s) worst = std::max(worst, std::abs((*this)(j, s) - (*this)(s, j)));
    return worst;
}

BoundaryTable::BoundaryTable(std::span<const Differential> basis, const QuadratureOptions& opts)
    : basis_(basis), opts_(opts) {
    if (basis.empty()) fail(ErrorCode::InvalidArgument, "empty holomorphic basis");
    const int g = basis.front().group().genus();
    if (static_cast<int>(basis.size()) != g) fail(ErrorCode::Structure, "basis size does not match genus");
    for (const auto& d : basis)
        if (d.kind() != DifferentialKind::Holomorphic)
            fail(ErrorCode::Normalization, "period variations need the a-normalized holomorphic basis");
}

const BoundaryTable::Level& BoundaryTable::level(std::size_t i) {
    std::lock_guard lock(mutex_);
    while (levels_.size() <= i) {
        Level lv;
        lv.nodes = opts_.nodes << levels_.size();
        const SchottkyGroup& group = basis_.front().group();
        const auto g = basis_.size();
        for (std::size_t l = 0; l < g; ++l) {
            lv.circles.push_back(circle_nodes(group.disk(static_cast<int>(l)).d, lv.nodes));
            std::vector<std::vector<Complex>> per_k(g, std::vector<Complex>(static_cast<std::size_t>(lv.nodes)));
            const auto& pts = lv.circles.back().points;
            detail::parallel_for(pts.size(), opts_.threads, [&](std::size_t j) {
                for (std::size_t k = 0; k < g; ++k) per_k[k][j] = basis_[k].eval_unchecked(pts[j]);
            });
            lv.values.push_back(std::move(per_k));
        }
        levels_.push_back(std::move(lv));
    }
    return levels_[i];
}

PeriodVariation BoundaryTable::evaluate(const Level& lv, const std::vector<Matrix2>& rel) const {
    const auto g = basis_.size();
    PeriodVariation pv;
    pv.genus = static_cast<int>(g);
    pv.nodes = lv.nodes;
    pv.entries.assign(g * g, Complex(0.0));
    std::vector<Complex> orbit_scale(g);
    for (std::size_t s = 0; s < g; ++s) orbit_scale[s] = -1.0 / basis_[s].scale();
    for (std::size_t j = 0; j < g; ++j) {
        for (std::size_t s = 0; s < g; ++s) {
            CompensatedSum total;
            for (std::size_t l = 0; l < g; ++l) {
                const auto& nodes = lv.circles[l];
                CompensatedSum acc;
                for (std::size_t n = 0; n < nodes.points.size(); ++n) {
                    const Complex f = lv.values[l][j][n] * lv.values[l][s][n] * orbit_scale[s] *
                                      hejhal_trace(nodes.points[n], rel[l]);
                    pv.max_integrand = std::max(pv.max_integrand, std::abs(f));
                    acc.add(f * nodes.weights[n]);
                }
                total.add(acc.value());
            }
            pv.entries[j * g + s] = total.value() * (variation_sign() / kTwoPiI);
        }
    }
    return pv;
}

PeriodVariation BoundaryTable::vary(const PerturbationDirection& dir) {
    const auto rel = relative_deltas(basis_.front().group(), dir);

    // Scale for the relative-change test: the integrand with the trace
    // replaced by its cancellation-free bound.
    auto bound_scale = [&](const Level& lv) {
        double mass = 0.0;
        for (std::size_t l = 0; l < basis_.size(); ++l)
            for (std::size_t n = 0; n < lv.circles[l].points.size(); ++n) {
                double v = 0.0;
                for (std::size_t k = 0; k < basis_.size(); ++k) v = std::max(v, std::abs(lv.values[l][k][n]));
                mass += v * v * trace_bound(lv.circles[l].points[n], rel[l]) * std::abs(lv.circles[l].weights[n]);
            }
        return mass;  // |orbit scale| / |2 pi i| = 1 for the normalized basis
    };

    std::size_t i = 0;
    PeriodVariation pv = evaluate(level(0), rel);
    if (!opts_.auto_double) return pv;
    for (;;) {
        if ((opts_.nodes << (i + 1)) > opts_.max_nodes)
            fail(ErrorCode::Convergence,
                 "period variation quadrature did not converge by " + std::to_string(opts_.max_nodes) + " nodes");
        ++i;
        PeriodVariation next = evaluate(level(i), rel);
        double change = 0.0;
        for (std::size_t e = 0; e < pv.entries.size(); ++e) change = std::max(change, std::abs(next.entries[e] - pv.entries[e]));
        const double scale = std::max(next.max_abs(), bound_scale(level(i)));
        next.last_change = scale > 0.0 ? change / scale : 0.0;
        pv = std::move(next);
        if (pv.last_change <= opts_.relative_tolerance) return pv;
    }
}

PeriodVariation vary_period_matrix(std::span<const Differential> basis, const PerturbationDirection& dir,
                                   const QuadratureOptions& opts) {
    BoundaryTable table(basis, opts);
    return table.vary(dir);
}

PerturbationDirection gauge_conjugation_direction(const SchottkyGroup& group, const Matrix2& x) {
    PerturbationDirection dir;
    for (int l = 0; l < group.genus(); ++l) {
        const Matrix2& s = group.generator(l).matrix();
        dir.deltas.push_back(x * s - s * x);
    }
    return dir;
}

PerturbationDirection scaling_direction(const SchottkyGroup& group, int l, Complex eps) {
    if (l < 0 || l >= group.genus()) fail(ErrorCode::InvalidArgument, "generator index out of range");
    auto dir = PerturbationDirection::zero(group.genus());
    dir.deltas[static_cast<std::size_t>(l)] = eps * group.generator(l).matrix();
    return dir;
}

const char* to_string(Coordinate c) {
    switch (c) {
        case Coordinate::Attracting: return "attracting";
        case Coordinate::Repelling: return "repelling";
        case Coordinate::Multiplier: return "multiplier";
        case Coordinate::C11: return "c11";
        case Coordinate::C12: return "c12";
        case Coordinate::C21: return "c21";
        case Coordinate::C22: return "c22";
    }
    return "unknown";
}

namespace {

bool is_matrix_coordinate(Coordinate c) {
    return c == Coordinate::C11 || c == Coordinate::C12 || c == Coordinate::C21 || c == Coordinate::C22;
}

Complex& entry(Matrix2& m, Coordinate c) {
    switch (c) {
        case Coordinate::C11: return m.c11;
        case Coordinate::C12: return m.c12;
        case Coordinate::C21: return m.c21;
        default: return m.c22;
    }
}

Matrix2 spec_matrix(const GeneratorSpec& spec) {
    if (const auto* m = std::get_if<Matrix2>(&spec)) return *m;
    const auto& f = std::get<FixedPointForm>(spec);
    return from_fixed_points(f.attracting, f.repelling, f.multiplier).matrix();
}

const FixedPointForm& fixed_point_spec(const GeneratorSpec& spec, Coordinate c) {
    const auto* f = std::get_if<FixedPointForm>(&spec);
    if (f == nullptr)
        fail(ErrorCode::InvalidArgument, std::string("coordinate '") + to_string(c) +
                                             "' needs a generator given by fixed points and multiplier");
    return *f;
}

}  // namespace

Matrix2 generator_derivative(const GeneratorSpec& spec, Coordinate c) {
    if (is_matrix_coordinate(c)) {
        Matrix2 unit = Matrix2::zero();
        entry(unit, c) = 1.0;
        return unit;
    }
    const auto* f = std::get_if<FixedPointForm>(&spec);
    if (f == nullptr)
        fail(ErrorCode::InvalidArgument, std::string("coordinate '") + to_string(c) +
                                             "' needs a generator given by fixed points and multiplier");
    const Complex a = f->attracting, b = f->repelling, mu = f->multiplier;
    switch (c) {
        case Coordinate::Attracting: return {1.0, b * (mu - 1.0), 0.0, mu};
        case Coordinate::Repelling: return {-mu, a * (mu - 1.0), 0.0, -1.0};
        default: return {-b, a * b, -1.0, a};
    }
}

PerturbationDirection parameter_direction(const SchottkyGroup& group, int l, Coordinate c, Complex delta) {
    if (l < 0 || l >= group.genus()) fail(ErrorCode::InvalidArgument, "generator index out of range");
    auto dir = PerturbationDirection::zero(group.genus());
    dir.deltas[static_cast<std::size_t>(l)] = delta * generator_derivative(group.spec(l), c);
    return dir;
}

Complex coordinate_value(const GeneratorSpec& spec, Coordinate c) {
    if (is_matrix_coordinate(c)) {
        Matrix2 m = std::holds_alternative<Matrix2>(spec) ? std::get<Matrix2>(spec) : spec_matrix(spec);
        return entry(m, c);
    }
    const FixedPointForm& f = fixed_point_spec(spec, c);
    switch (c) {
        case Coordinate::Attracting: return f.attracting;
        case Coordinate::Repelling: return f.repelling;
        default: return f.multiplier;
    }
}

Complex coordinate_value(const SchottkyGroup& group, int l, Coordinate c) {
    return coordinate_value(group.spec(l), c);
}

GeneratorSpec with_coordinate(const GeneratorSpec& spec, Coordinate c, Complex value) {
    if (is_matrix_coordinate(c)) {
        Matrix2 m = spec_matrix(spec);
        entry(m, c) = value;
        return m;
    }
    FixedPointForm out = fixed_point_spec(spec, c);
    switch (c) {
        case Coordinate::Attracting: out.attracting = value; break;
        case Coordinate::Repelling: out.repelling = value; break;
        default: out.multiplier = value; break;
    }
    return out;
}

GeneratorSpec with_coordinate(const SchottkyGroup& group, int l, Coordinate c, Complex value) {
    return with_coordinate(group.spec(l), c, value);
}

}  // namespace schottky
