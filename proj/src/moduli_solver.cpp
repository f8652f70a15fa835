#include "schottky/moduli_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "schottky/parallel.hpp"

namespace schottky {

const char* to_string(Part p) { return p == Part::Real ? "re" : "im"; }

const char* to_string(TargetParts p) {
    switch (p) {
        case TargetParts::Both: return "both";
        case TargetParts::Real: return "re";
        case TargetParts::Imag: return "im";
    }
    return "unknown";
}

namespace {

int part_count(TargetParts p) { return p == TargetParts::Both ? 2 : 1; }

void push_parts(std::vector<double>& out, Complex v, TargetParts p) {
    if (p != TargetParts::Imag) out.push_back(v.real());
    if (p != TargetParts::Real) out.push_back(v.imag());
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

ModuliProblem::ModuliProblem(std::vector<Parameter> parameters, std::vector<PeriodTarget> periods,
                             std::vector<IntegralTarget> integrals, SolverSettings settings)
    : params_(std::move(parameters)),
      periods_(std::move(periods)),
      integrals_(std::move(integrals)),
      settings_(std::move(settings)) {
    if (params_.empty()) fail(ErrorCode::InvalidArgument, "problem has no free parameters");
    if (periods_.empty() && integrals_.empty()) fail(ErrorCode::InvalidArgument, "problem has no targets");
}

int ModuliProblem::residual_size() const {
    int n = 0;
    for (const auto& t : periods_) n += part_count(t.parts);
    for (const auto& t : integrals_) n += part_count(t.parts);
    return n;
}

void ModuliProblem::check(const SchottkyGroup& group) const {
    const int g = group.genus();
    for (const auto& p : params_) {
        if (p.generator < 0 || p.generator >= g)
            fail(ErrorCode::Structure, "parameter refers to generator " + std::to_string(p.generator + 1) +
                                           " of a genus-" + std::to_string(g) + " group");
        (void)coordinate_value(group, p.generator, p.coord);
    }
    check_targets(g);
}

void ModuliProblem::check_targets(int g) const {
    for (const auto& t : periods_)
        if (t.j < 0 || t.j >= g || t.s < 0 || t.s >= g)
            fail(ErrorCode::Structure, "period target index out of range");
    for (const auto& t : integrals_)
        if (t.k < 0 || t.k >= g) fail(ErrorCode::Structure, "integral target index out of range");
}

std::vector<double> ModuliProblem::values(const SchottkyGroup& group) const {
    check(group);
    std::vector<double> x;
    for (const auto& p : params_) {
        const Complex v = coordinate_value(group, p.generator, p.coord);
        x.push_back(p.part == Part::Real ? v.real() : v.imag());
    }
    return x;
}

SchottkyGroup ModuliProblem::with_values(const SchottkyGroup& group, const std::vector<double>& x) const {
    if (x.size() != params_.size()) fail(ErrorCode::Structure, "parameter vector has the wrong length");
    std::vector<GeneratorSpec> specs = group.specs();
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        auto& spec = specs[static_cast<std::size_t>(p.generator)];
        Complex v = coordinate_value(spec, p.coord);
        v = p.part == Part::Real ? Complex(x[i], v.imag()) : Complex(v.real(), x[i]);
        spec = with_coordinate(spec, p.coord, v);
    }
    return group.with_generators(std::move(specs));
}

std::vector<Complex> ModuliProblem::quantities(const SchottkyGroup& group) const {
    check_targets(group.genus());
    group.require_usable();
    const auto basis = holomorphic_basis(group, settings_.truncation, settings_.normalization_nodes, settings_.threads);
    std::vector<Complex> q;
    if (!periods_.empty()) {
        const PeriodMatrix pm = period_matrix(group, basis, settings_.base_point, settings_.threads);
        for (const auto& t : periods_) q.push_back(pm(t.j, t.s));
    }
    for (const auto& t : integrals_)
        q.push_back(integrate(basis[static_cast<std::size_t>(t.k)], plan_path(group, t.from, t.to)));
    return q;
}

std::vector<double> ModuliProblem::realify(const std::vector<Complex>& q, bool negate) const {
    std::vector<double> out;
    std::size_t i = 0;
    for (const auto& t : periods_) push_parts(out, negate ? -q[i++] : q[i++], t.parts);
    for (const auto& t : integrals_) push_parts(out, negate ? -q[i++] : q[i++], t.parts);
    return out;
}

std::vector<double> ModuliProblem::residual(const SchottkyGroup& group) const {
    const auto q = quantities(group);
    std::vector<Complex> diff;
    std::size_t i = 0;
    for (const auto& t : periods_) diff.push_back(t.value - q[i++]);
    for (const auto& t : integrals_) diff.push_back(t.value - q[i++]);
    return realify(diff, false);
}

RealMatrix ModuliProblem::jacobian(const SchottkyGroup& group) const {
    check(group);
    group.require_usable();
    const auto basis = holomorphic_basis(group, settings_.truncation, settings_.normalization_nodes, settings_.threads);
    BoundaryTable table(basis, settings_.quadrature);
    std::vector<Differential> slots;
    for (const auto& t : integrals_)
        slots.push_back(Differential::third_kind(group, t.from, t.to, settings_.truncation));

    RealMatrix jac(residual_size(), static_cast<int>(params_.size()));
    QuadratureOptions inner = settings_.quadrature;
    inner.threads = 1;
    detail::parallel_for(params_.size(), settings_.threads, [&](std::size_t c) {
        const auto& p = params_[c];
        const Complex delta = p.part == Part::Real ? Complex(1.0) : Complex(0.0, 1.0);
        const auto dir = parameter_direction(group, p.generator, p.coord, delta);
        std::vector<Complex> dq;
        if (!periods_.empty()) {
            const PeriodVariation pv = table.vary(dir);
            for (const auto& t : periods_) dq.push_back(pv(t.j, t.s));
        }
        for (std::size_t i = 0; i < integrals_.size(); ++i)
            dq.push_back(vary_integral(basis[static_cast<std::size_t>(integrals_[i].k)], slots[i], dir, inner).value);
        const auto col = realify(dq, true);
        for (std::size_t r = 0; r < col.size(); ++r) jac(static_cast<int>(r), static_cast<int>(c)) = col[r];
    });
    return jac;
}

JacobianCheck ModuliProblem::jacobian_check(const SchottkyGroup& group, const FDConfig& cfg) const {
    JacobianCheck out;
    out.analytic = jacobian(group);
    out.finite_difference = RealMatrix(out.analytic.rows, out.analytic.cols);
    for (std::size_t c = 0; c < params_.size(); ++c) {
        const auto& p = params_[c];
        const Complex delta = p.part == Part::Real ? Complex(1.0) : Complex(0.0, 1.0);
        const auto dir = parameter_direction(group, p.generator, p.coord, delta);
        const FDResult fd = fd_directional(
            GroupFunction([this](const SchottkyGroup& h) { return quantities(h); }), group, dir, cfg);
        const auto col = realify(fd.value, true);
        double scale = 0.0, worst = 0.0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            const int ri = static_cast<int>(r), ci = static_cast<int>(c);
            out.finite_difference(ri, ci) = col[r];
            scale = std::max(scale, std::abs(col[r]));
            worst = std::max(worst, std::abs(col[r] - out.analytic(ri, ci)));
        }
        if (scale > 0.0) out.max_relative_discrepancy = std::max(out.max_relative_discrepancy, worst / scale);
        else out.max_relative_discrepancy = std::max(out.max_relative_discrepancy, worst);
    }
    return out;
}

SolveResult newton_solve(const ModuliProblem& problem, const SchottkyGroup& initial, const NewtonOptions& opts) {
    initial.require_usable();
    problem.check(initial);
    const int m = problem.residual_size();
    const int n = static_cast<int>(problem.parameters().size());
    if (n < m)
        fail(ErrorCode::InvalidArgument, std::to_string(n) + " free real parameters cannot meet " + std::to_string(m) +
                                             " real residual components");

    SolveTrace trace;
    SchottkyGroup group = initial;
    std::vector<double> x = problem.values(group);
    std::vector<double> r = problem.residual(group);
    double rnorm = norm2(r);
    trace.iterations.push_back({x, rnorm, 0.0, 0.0, 0});

    for (int it = 0; it < opts.max_iter && !(rnorm < opts.tol); ++it) {
        const RealMatrix jac = problem.jacobian(group);
        Eigen::MatrixXd j(m, n);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b) j(a, b) = jac(a, b);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                     : std::numeric_limits<double>::infinity();
        if (!(cond <= opts.max_condition)) {
            trace.message = "Jacobian condition number " + std::to_string(cond) + " exceeds " +
                            std::to_string(opts.max_condition) + "; parameters are not independent (gauge?)";
            throw SolveError(ErrorCode::RankDeficient, trace.message, trace);
        }
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), m);
        const Eigen::VectorXd dx = -svd.solve(rhs);

        double lambda = 1.0;
        int halvings = 0;
        bool accepted = false;
        bool blocked = false;
        for (; halvings <= opts.max_halvings; ++halvings, lambda *= 0.5) {
            std::vector<double> xt = x;
            for (int b = 0; b < n; ++b) xt[static_cast<std::size_t>(b)] += lambda * dx(b);
            std::vector<double> rt;
            std::optional<SchottkyGroup> gt;
            try {
                gt.emplace(problem.with_values(group, xt));
                if (!gt->usable()) {
                    blocked = true;
                    continue;
                }
                rt = problem.residual(*gt);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::Validation || e.code() == ErrorCode::InvalidArgument ||
                    e.code() == ErrorCode::PathPlanning) {
                    blocked = true;
                    continue;
                }
                throw;
            }
            const double rt_norm = norm2(rt);
            if (rt_norm < rnorm) {
                x = std::move(xt);
                r = std::move(rt);
                rnorm = rt_norm;
                group = std::move(*gt);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            trace.message = blocked ? "every step halving left the valid Schottky configurations"
                                    : "no step halving decreased the residual";
            throw SolveError(blocked ? ErrorCode::Validation : ErrorCode::Convergence, trace.message, trace);
        }
        trace.iterations.push_back({x, rnorm, lambda * dx.norm(), cond, halvings});
    }
    trace.converged = rnorm < opts.tol;
    trace.message = trace.converged ? "converged" : "iteration limit reached";
    return {group, trace};
}

double convergence_exponent(const SolveTrace& trace, double upper, double floor) {
    std::vector<double> r;
    for (const auto& it : trace.iterations) r.push_back(it.residual_norm);
    std::vector<std::pair<double, double>> pairs;
    std::size_t last = 0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        if (r[k] < upper && r[k + 1] > floor && r[k] > 0.0) {
            pairs.emplace_back(std::log(r[k]), std::log(r[k + 1]));
            last = k;
        }
    }
    if (pairs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (const auto& [a, b] : pairs) {
            mx += a;
            my += b;
        }
        mx /= static_cast<double>(pairs.size());
        my /= static_cast<double>(pairs.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto& [a, b] : pairs) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
        }
        return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
    }
    if (pairs.size() == 1 && last >= 1 && r[last - 1] > r[last])
        return std::log(r[last + 1] / r[last]) / std::log(r[last] / r[last - 1]);
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace schottky
