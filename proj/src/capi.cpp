#include "schottky.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <optional>
#include <string>

#include "schottky/fd_oracle.hpp"
#include "schottky/moduli_solver.hpp"

using namespace schottky;

struct sk_group {
    SchottkyGroup group;
};

struct sk_problem {
    std::vector<Parameter> parameters;
    std::vector<PeriodTarget> periods;
    std::vector<IntegralTarget> integrals;
};

struct sk_solve_result {
    std::optional<SchottkyGroup> group;
    SolveTrace trace;
};

namespace {

thread_local std::string g_last_error;

sk_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return SK_INVALID_ARGUMENT;
        case ErrorCode::Structure: return SK_STRUCTURE;
        case ErrorCode::Validation: return SK_VALIDATION;
        case ErrorCode::PoleProximity: return SK_POLE_PROXIMITY;
        case ErrorCode::Convergence: return SK_CONVERGENCE;
        case ErrorCode::PathPlanning: return SK_PATH_PLANNING;
        case ErrorCode::BranchTracking: return SK_BRANCH_TRACKING;
        case ErrorCode::RankDeficient: return SK_RANK_DEFICIENT;
        case ErrorCode::Normalization: return SK_NORMALIZATION;
    }
    return SK_INTERNAL;
}

sk_status set_error(sk_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
sk_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return SK_OK;
    } catch (const Error& e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(SK_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(SK_INTERNAL, e.what());
    } catch (...) {
        return set_error(SK_INTERNAL, "unknown failure");
    }
}

void require(bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidArgument, what);
}

Complex cx(sk_complex z) { return {z.re, z.im}; }
sk_complex sk(Complex z) { return {z.real(), z.imag()}; }

Matrix2 matrix_from(const sk_complex* m) { return {cx(m[0]), cx(m[1]), cx(m[2]), cx(m[3])}; }

void matrix_to(const Matrix2& m, sk_complex* out) {
    out[0] = sk(m.c11);
    out[1] = sk(m.c12);
    out[2] = sk(m.c21);
    out[3] = sk(m.c22);
}

sk_settings resolve(const sk_settings* s) {
    sk_settings out;
    sk_settings_default(&out);
    if (s != nullptr) out = *s;
    return out;
}

Truncation truncation(const sk_settings& s) {
    if (s.tail_tolerance > 0.0) return Truncation::tolerance(s.tail_tolerance, s.hard_cap);
    return Truncation::fixed(s.max_word_len);
}

QuadratureOptions quadrature(const sk_settings& s) {
    QuadratureOptions q;
    q.nodes = s.nodes;
    q.auto_double = s.auto_double != 0;
    q.relative_tolerance = s.relative_tolerance;
    q.max_nodes = s.max_nodes;
    q.threads = s.threads;
    require(q.nodes >= 8 && q.max_nodes >= q.nodes, "quadrature nodes must satisfy 8 <= nodes <= max_nodes");
    return q;
}

std::optional<Complex> base_point(const sk_settings& s) {
    if (s.has_base_point) return cx(s.base_point);
    return std::nullopt;
}

const SchottkyGroup& usable_group(const sk_group* g) {
    require(g != nullptr, "null group handle");
    g->group.require_usable();
    return g->group;
}

Differential make_differential(const SchottkyGroup& group, const sk_settings& s, const sk_differential* d) {
    require(d != nullptr, "null differential descriptor");
    if (d->kind == SK_HOLOMORPHIC) {
        require(d->index >= 0 && d->index < group.genus(), "holomorphic index out of range");
        return Differential::holomorphic(group, d->index, truncation(s), s.normalization_nodes);
    }
    require(d->kind == SK_THIRD_KIND, "unknown differential kind");
    return Differential::third_kind(group, cx(d->z), cx(d->z_prime), truncation(s));
}

PerturbationDirection direction(const SchottkyGroup& group, const sk_complex* deltas) {
    require(deltas != nullptr, "null direction");
    PerturbationDirection dir;
    for (int l = 0; l < group.genus(); ++l) dir.deltas.push_back(matrix_from(deltas + 4 * l));
    dir.check_finite();
    return dir;
}

void direction_to(const PerturbationDirection& dir, sk_complex* out) {
    for (std::size_t l = 0; l < dir.deltas.size(); ++l) matrix_to(dir.deltas[l], out + 4 * l);
}

FDConfig fd_config(const sk_fd_settings* fd, const sk_settings& s) {
    FDConfig cfg;
    if (fd != nullptr) {
        cfg.base_step = fd->base_step;
        cfg.richardson_levels = fd->richardson_levels;
    }
    cfg.threads = s.threads;
    cfg.check();
    return cfg;
}

void fd_info(const FDResult& r, sk_fd_info* info) {
    if (info == nullptr) return;
    info->error_estimate = r.error_estimate;
    info->monotone = r.monotone ? 1 : 0;
    info->step = r.step;
    info->shrinks = r.shrinks;
}

Coordinate coordinate(sk_coordinate c) {
    require(c >= SK_COORD_ATTRACTING && c <= SK_COORD_C22, "unknown coordinate");
    return static_cast<Coordinate>(c);
}

SolverSettings solver_settings(const sk_settings& s) {
    SolverSettings out;
    out.truncation = truncation(s);
    out.normalization_nodes = s.normalization_nodes;
    out.quadrature = quadrature(s);
    out.base_point = base_point(s);
    out.threads = s.threads;
    return out;
}

}  // namespace

extern "C" {

const char* sk_version(void) { return "1.0.0"; }

const char* sk_status_name(sk_status status) {
    switch (status) {
        case SK_OK: return "ok";
        case SK_INVALID_ARGUMENT: return "invalid_argument";
        case SK_STRUCTURE: return "structure";
        case SK_VALIDATION: return "validation";
        case SK_POLE_PROXIMITY: return "pole_proximity";
        case SK_CONVERGENCE: return "convergence";
        case SK_PATH_PLANNING: return "path_planning";
        case SK_BRANCH_TRACKING: return "branch_tracking";
        case SK_RANK_DEFICIENT: return "rank_deficient";
        case SK_NORMALIZATION: return "normalization";
        case SK_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* sk_last_error_message(void) { return g_last_error.c_str(); }

void sk_settings_default(sk_settings* out) {
    if (out == nullptr) return;
    const QuadratureOptions q;
    out->max_word_len = 8;
    out->tail_tolerance = 0.0;
    out->hard_cap = 16;
    out->nodes = q.nodes;
    out->auto_double = q.auto_double ? 1 : 0;
    out->relative_tolerance = q.relative_tolerance;
    out->max_nodes = q.max_nodes;
    out->normalization_nodes = 256;
    out->threads = 1;
    out->has_base_point = 0;
    out->base_point = {0.0, 0.0};
}

sk_status sk_group_create(int genus, const sk_generator* generators, const sk_disk_pair* disks, sk_group** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = nullptr;
        require(genus >= 1, "genus must be at least 1");
        require(generators != nullptr && disks != nullptr, "null generator or disk array");
        std::vector<GeneratorSpec> specs;
        std::vector<DiskPair> pairs;
        for (int k = 0; k < genus; ++k) {
            const sk_generator& g = generators[k];
            if (g.kind == SK_GENERATOR_MATRIX) {
                specs.emplace_back(matrix_from(g.matrix));
            } else {
                require(g.kind == SK_GENERATOR_FIXED_POINTS, "unknown generator kind");
                specs.emplace_back(FixedPointForm{cx(g.attracting), cx(g.repelling), cx(g.multiplier)});
            }
            pairs.push_back({Circle{cx(disks[k].center_d), disks[k].radius_d},
                             Circle{cx(disks[k].center_d_prime), disks[k].radius_d_prime}});
        }
        *out = new sk_group{SchottkyGroup(std::move(specs), std::move(pairs))};
    });
}

void sk_group_destroy(sk_group* group) { delete group; }

int sk_group_genus(const sk_group* group) { return group == nullptr ? 0 : group->group.genus(); }

int sk_group_usable(const sk_group* group) { return group != nullptr && group->group.usable() ? 1 : 0; }

sk_status sk_group_generator_matrix(const sk_group* group, int k, sk_complex out[4]) {
    return guarded([&] {
        require(group != nullptr && out != nullptr, "null argument");
        require(k >= 0 && k < group->group.genus(), "generator index out of range");
        matrix_to(group->group.generator(k).matrix(), out);
    });
}

sk_status sk_group_disk_pair(const sk_group* group, int k, sk_disk_pair* out) {
    return guarded([&] {
        require(group != nullptr && out != nullptr, "null argument");
        require(k >= 0 && k < static_cast<int>(group->group.disks().size()), "disk index out of range");
        const DiskPair& p = group->group.disk(k);
        *out = {sk(p.d.center), p.d.radius, sk(p.d_prime.center), p.d_prime.radius};
    });
}

sk_status sk_group_generator_spec(const sk_group* group, int k, sk_generator* out) {
    return guarded([&] {
        require(group != nullptr && out != nullptr, "null argument");
        require(k >= 0 && k < group->group.genus(), "generator index out of range");
        std::memset(out, 0, sizeof(*out));
        const GeneratorSpec& spec = group->group.spec(k);
        if (const auto* f = std::get_if<FixedPointForm>(&spec)) {
            out->kind = SK_GENERATOR_FIXED_POINTS;
            out->attracting = sk(f->attracting);
            out->repelling = sk(f->repelling);
            out->multiplier = sk(f->multiplier);
        } else {
            out->kind = SK_GENERATOR_MATRIX;
        }
        matrix_to(group->group.generator(k).matrix(), out->matrix);
    });
}

sk_status sk_group_validation(const sk_group* group, sk_validation_summary* out) {
    return guarded([&] {
        require(group != nullptr && out != nullptr, "null argument");
        const ValidationReport& r = group->group.report();
        out->usable = r.usable() ? 1 : 0;
        out->structural_ok = r.structural_ok ? 1 : 0;
        out->min_disk_gap = r.min_disk_gap;
        out->max_boundary_residual = r.max_boundary_residual;
        out->check_count = static_cast<int>(r.checks.size());
    });
}

sk_status sk_group_check(const sk_group* group, int index, sk_validation_check* out) {
    return guarded([&] {
        require(group != nullptr && out != nullptr, "null argument");
        const auto& checks = group->group.report().checks;
        require(index >= 0 && index < static_cast<int>(checks.size()), "check index out of range");
        const ValidationCheck& c = checks[static_cast<std::size_t>(index)];
        *out = {c.name.c_str(), c.passed ? 1 : 0, c.margin, c.detail.c_str()};
    });
}

const char* sk_group_structural_error(const sk_group* group) {
    return group == nullptr ? "" : group->group.report().structural_error.c_str();
}

sk_status sk_period_matrix(const sk_group* group, const sk_settings* settings, sk_complex* out,
                           sk_period_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto basis = holomorphic_basis(g, truncation(s), s.normalization_nodes, s.threads);
        const PeriodMatrix pm = period_matrix(g, basis, base_point(s), s.threads);
        for (std::size_t i = 0; i < pm.entries.size(); ++i) out[i] = sk(pm.entries[i]);
        if (info != nullptr) {
            info->max_word_len = pm.max_word_len;
            info->tail_estimate = pm.tail_estimate;
            info->base_point = sk(pm.base_point);
            info->symmetry_residual = pm.symmetry_residual();
        }
    });
}

sk_status sk_a_period_matrix(const sk_group* group, const sk_settings* settings, sk_complex* out,
                             sk_quadrature_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto basis = holomorphic_basis(g, truncation(s), s.normalization_nodes, s.threads);
        const auto n = static_cast<std::size_t>(g.genus());
        auto worse = [](const APeriods& a, const APeriods& b) {
            if (a.converged != b.converged) return !a.converged;
            if (a.nodes != b.nodes) return a.nodes > b.nodes;
            return a.last_change > b.last_change;
        };
        APeriods worst;
        for (std::size_t j = 0; j < n; ++j) {
            APeriods ap = a_periods(basis[j], quadrature(s));
            for (std::size_t k = 0; k < n; ++k) out[j * n + k] = sk(ap.values[k]);
            if (j == 0 || worse(ap, worst)) worst = std::move(ap);
        }
        if (info != nullptr) {
            info->nodes = worst.nodes;
            info->last_change = worst.last_change;
            info->converged = worst.converged ? 1 : 0;
            info->history_len = std::min<int>(SK_MAX_HISTORY, static_cast<int>(worst.history.size()));
            for (int i = 0; i < info->history_len; ++i) {
                info->history_nodes[i] = worst.history[static_cast<std::size_t>(i)].first;
                info->history_change[i] = worst.history[static_cast<std::size_t>(i)].second;
            }
        }
    });
}

sk_status sk_integrate(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                       sk_complex from, sk_complex to, sk_complex* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const Differential diff = make_differential(g, s, d);
        *out = sk(integrate(diff, plan_path(g, cx(from), cx(to))));
    });
}

sk_status sk_layer_norms(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                         double* out, int capacity, int* count, double* tail_estimate) {
    return guarded([&] {
        require(count != nullptr, "null count");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const Differential diff = make_differential(g, s, d);
        const auto& norms = diff.construction_layer_norms();
        *count = static_cast<int>(norms.size());
        if (tail_estimate != nullptr) *tail_estimate = diff.tail_estimate();
        require(out != nullptr && capacity >= *count, "layer-norm buffer too small");
        for (std::size_t i = 0; i < norms.size(); ++i) out[i] = norms[i];
    });
}

sk_status sk_automorphy_residual(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                                 int k, int samples, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        require(k >= 0 && k < g.genus(), "generator index out of range");
        require(samples > 0, "samples must be positive");
        const sk_settings s = resolve(settings);
        *out = automorphy_residual(make_differential(g, s, d), k, samples);
    });
}

sk_status sk_vary_period_matrix(const sk_group* group, const sk_settings* settings, const sk_complex* deltas,
                                sk_complex* out, sk_variation_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto dir = direction(g, deltas);
        const auto basis = holomorphic_basis(g, truncation(s), s.normalization_nodes, s.threads);
        const PeriodVariation pv = vary_period_matrix(basis, dir, quadrature(s));
        for (std::size_t i = 0; i < pv.entries.size(); ++i) out[i] = sk(pv.entries[i]);
        if (info != nullptr) *info = {pv.nodes, pv.last_change, pv.max_integrand, pv.symmetry_residual()};
    });
}

sk_status sk_vary_integral(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                           sk_complex z, sk_complex z_prime, const sk_complex* deltas, sk_complex* out,
                           sk_complex* per_circle, sk_variation_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto dir = direction(g, deltas);
        const Differential diff = make_differential(g, s, d);
        const VariationResult r = vary_integral(diff, cx(z), cx(z_prime), dir, quadrature(s));
        *out = sk(r.value);
        if (per_circle != nullptr)
            for (std::size_t l = 0; l < r.per_circle.size(); ++l) per_circle[l] = sk(r.per_circle[l]);
        if (info != nullptr) *info = {r.nodes, r.last_change, r.max_integrand, 0.0};
    });
}

void sk_fd_settings_default(sk_fd_settings* out) {
    if (out == nullptr) return;
    const FDConfig cfg;
    out->base_step = cfg.base_step;
    out->richardson_levels = cfg.richardson_levels;
}

sk_status sk_fd_period_matrix(const sk_group* group, const sk_settings* settings, const sk_complex* deltas,
                              const sk_fd_settings* fd, sk_complex* out, sk_fd_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto dir = direction(g, deltas);
        FDConfig cfg = fd_config(fd, s);
        const Truncation trunc = truncation(s);
        require(!trunc.tail_tolerance, "finite differences need a fixed max_word_len");
        const auto bp = base_point(s);
        const FDResult r = fd_directional(
            GroupFunction([&](const SchottkyGroup& h) {
                const auto basis = holomorphic_basis(h, trunc, s.normalization_nodes, 1);
                return period_matrix(h, basis, bp, 1).entries;
            }),
            g, dir, cfg);
        for (std::size_t i = 0; i < r.value.size(); ++i) out[i] = sk(r.value[i]);
        fd_info(r, info);
    });
}

sk_status sk_fd_integral(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                         sk_complex z, sk_complex z_prime, const sk_complex* deltas, const sk_fd_settings* fd,
                         sk_complex* out, sk_fd_info* info) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const auto dir = direction(g, deltas);
        FDConfig cfg = fd_config(fd, s);
        sk_settings fixed = s;
        require(!(s.tail_tolerance > 0.0), "finite differences need a fixed max_word_len");
        fixed.threads = 1;
        (void)make_differential(g, fixed, d);
        const FDResult r = fd_directional(
            ScalarGroupFunction([&](const SchottkyGroup& h) {
                return integrate(make_differential(h, fixed, d), plan_path(h, cx(z), cx(z_prime)));
            }),
            g, dir, cfg);
        *out = sk(r.scalar());
        fd_info(r, info);
    });
}

sk_status sk_gauge_conjugation_direction(const sk_group* group, const sk_complex x[4], sk_complex* deltas) {
    return guarded([&] {
        require(group != nullptr && x != nullptr && deltas != nullptr, "null argument");
        direction_to(gauge_conjugation_direction(group->group, matrix_from(x)), deltas);
    });
}

sk_status sk_scaling_direction(const sk_group* group, int l, sk_complex eps, sk_complex* deltas) {
    return guarded([&] {
        require(group != nullptr && deltas != nullptr, "null argument");
        direction_to(scaling_direction(group->group, l, cx(eps)), deltas);
    });
}

sk_status sk_parameter_direction(const sk_group* group, int l, sk_coordinate c, sk_complex delta,
                                 sk_complex* deltas) {
    return guarded([&] {
        require(group != nullptr && deltas != nullptr, "null argument");
        direction_to(parameter_direction(group->group, l, coordinate(c), cx(delta)), deltas);
    });
}

sk_status sk_problem_create(sk_problem** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new sk_problem{};
    });
}

void sk_problem_destroy(sk_problem* problem) { delete problem; }

sk_status sk_problem_add_parameter(sk_problem* problem, int generator, sk_coordinate c, sk_part part) {
    return guarded([&] {
        require(problem != nullptr, "null problem");
        require(part == SK_PART_REAL || part == SK_PART_IMAG, "unknown parameter part");
        require(generator >= 0, "negative generator index");
        problem->parameters.push_back({generator, coordinate(c), part == SK_PART_REAL ? Part::Real : Part::Imag});
    });
}

namespace {
TargetParts target_parts(sk_target_parts p) {
    require(p >= SK_TARGET_BOTH && p <= SK_TARGET_IMAG, "unknown target parts");
    return static_cast<TargetParts>(p);
}
}  // namespace

sk_status sk_problem_add_period_target(sk_problem* problem, int j, int s, sk_complex value, sk_target_parts parts) {
    return guarded([&] {
        require(problem != nullptr, "null problem");
        require(j >= 0 && s >= 0, "negative period index");
        problem->periods.push_back({j, s, cx(value), target_parts(parts)});
    });
}

sk_status sk_problem_add_integral_target(sk_problem* problem, int k, sk_complex from, sk_complex to,
                                         sk_complex value, sk_target_parts parts) {
    return guarded([&] {
        require(problem != nullptr, "null problem");
        require(k >= 0, "negative differential index");
        problem->integrals.push_back({k, cx(from), cx(to), cx(value), target_parts(parts)});
    });
}

void sk_newton_options_default(sk_newton_options* out) {
    if (out == nullptr) return;
    const NewtonOptions o;
    *out = {o.max_iter, o.tol, o.max_halvings, o.max_condition};
}

sk_status sk_problem_jacobian_check(const sk_problem* problem, const sk_group* group, const sk_settings* settings,
                                    const sk_fd_settings* fd, double* out) {
    return guarded([&] {
        require(problem != nullptr && out != nullptr, "null argument");
        const SchottkyGroup& g = usable_group(group);
        const sk_settings s = resolve(settings);
        const ModuliProblem mp(problem->parameters, problem->periods, problem->integrals, solver_settings(s));
        *out = mp.jacobian_check(g, fd_config(fd, s)).max_relative_discrepancy;
    });
}

sk_status sk_solve(const sk_problem* problem, const sk_group* initial, const sk_settings* settings,
                   const sk_newton_options* options, sk_solve_result** out) {
    if (out != nullptr) *out = nullptr;
    std::optional<ModuliProblem> mp;
    NewtonOptions opts;
    const sk_status prep = guarded([&] {
        require(problem != nullptr && out != nullptr, "null argument");
        usable_group(initial);
        const sk_settings s = resolve(settings);
        if (options != nullptr) {
            opts.max_iter = options->max_iter;
            opts.tol = options->tol;
            opts.max_halvings = options->max_halvings;
            opts.max_condition = options->max_condition;
        }
        require(opts.max_iter >= 0 && opts.tol > 0.0 && opts.max_halvings >= 0, "invalid Newton options");
        mp.emplace(problem->parameters, problem->periods, problem->integrals, solver_settings(s));
        mp->check(initial->group);
    });
    if (prep != SK_OK) return prep;

    auto* result = new (std::nothrow) sk_solve_result{};
    if (result == nullptr) return set_error(SK_INTERNAL, "out of memory");
    *out = result;
    result->group.emplace(initial->group);
    return guarded([&] {
        try {
            SolveResult r = newton_solve(*mp, initial->group, opts);
            result->group.emplace(std::move(r.group));
            result->trace = std::move(r.trace);
            if (!result->trace.converged) fail(ErrorCode::Convergence, result->trace.message);
        } catch (const SolveError& e) {
            result->trace = e.trace();
            result->trace.message = e.what();
            throw;
        } catch (const Error& e) {
            result->trace.message = e.what();
            throw;
        }
    });
}

void sk_solve_result_destroy(sk_solve_result* result) { delete result; }

int sk_solve_result_converged(const sk_solve_result* result) {
    return result != nullptr && result->trace.converged ? 1 : 0;
}

const char* sk_solve_result_message(const sk_solve_result* result) {
    return result == nullptr ? "" : result->trace.message.c_str();
}

int sk_solve_result_iteration_count(const sk_solve_result* result) {
    return result == nullptr ? 0 : static_cast<int>(result->trace.iterations.size());
}

int sk_solve_result_parameter_count(const sk_solve_result* result) {
    if (result == nullptr || result->trace.iterations.empty()) return 0;
    return static_cast<int>(result->trace.iterations.front().parameters.size());
}

sk_status sk_solve_result_iteration(const sk_solve_result* result, int i, sk_solve_iteration* out, double* params) {
    return guarded([&] {
        require(result != nullptr && out != nullptr, "null argument");
        require(i >= 0 && i < static_cast<int>(result->trace.iterations.size()), "iteration index out of range");
        const SolveIteration& it = result->trace.iterations[static_cast<std::size_t>(i)];
        *out = {it.residual_norm, it.step_norm, it.condition, it.halvings};
        if (params != nullptr)
            for (std::size_t p = 0; p < it.parameters.size(); ++p) params[p] = it.parameters[p];
    });
}

double sk_solve_result_exponent(const sk_solve_result* result) {
    if (result == nullptr) return std::numeric_limits<double>::quiet_NaN();
    return convergence_exponent(result->trace);
}

sk_status sk_solve_result_group(const sk_solve_result* result, sk_group** out) {
    return guarded([&] {
        require(result != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        require(result->group.has_value(), "the solve stopped before producing a group");
        *out = new sk_group{*result->group};
    });
}

}  // extern "C"
