#ifndef SCHOTTKY_H
#define SCHOTTKY_H

/* C interface to the Schottky-group library. All handles are opaque; every
 * call returns an sk_status, and sk_last_error_message() describes the most
 * recent failure on the calling thread. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  ifdef SK_BUILDING_LIBRARY
#    define SK_API __declspec(dllexport)
#  else
#    define SK_API __declspec(dllimport)
#  endif
#else
#  define SK_API __attribute__((visibility("default")))
#endif

typedef enum {
    SK_OK = 0,
    SK_INVALID_ARGUMENT = 1,
    SK_STRUCTURE = 2,
    SK_VALIDATION = 3,
    SK_POLE_PROXIMITY = 4,
    SK_CONVERGENCE = 5,
    SK_PATH_PLANNING = 6,
    SK_BRANCH_TRACKING = 7,
    SK_RANK_DEFICIENT = 8,
    SK_NORMALIZATION = 9,
    SK_INTERNAL = 100
} sk_status;

typedef struct {
    double re;
    double im;
} sk_complex;

typedef struct sk_group sk_group;
typedef struct sk_problem sk_problem;
typedef struct sk_solve_result sk_solve_result;

SK_API const char* sk_version(void);
SK_API const char* sk_status_name(sk_status status);
/* Message of the last failing call on this thread ("" after success). */
SK_API const char* sk_last_error_message(void);

/* ---- numerical settings ------------------------------------------------ */

typedef struct {
    int max_word_len;           /* fixed truncation, used when tail_tolerance == 0 */
    double tail_tolerance;      /* > 0 selects adaptive truncation */
    int hard_cap;               /* layer cap in adaptive mode */
    int nodes;                  /* trapezoid nodes per circle */
    int auto_double;            /* double nodes until relative_tolerance is met */
    double relative_tolerance;
    int max_nodes;
    int normalization_nodes;    /* holomorphic a-period normalization */
    int threads;
    int has_base_point;
    sk_complex base_point;      /* period base point when has_base_point != 0 */
} sk_settings;

SK_API void sk_settings_default(sk_settings* out);

/* ---- groups ------------------------------------------------------------ */

typedef enum { SK_GENERATOR_MATRIX = 0, SK_GENERATOR_FIXED_POINTS = 1 } sk_generator_kind;

typedef struct {
    sk_generator_kind kind;
    sk_complex matrix[4];   /* c11, c12, c21, c22 */
    sk_complex attracting;
    sk_complex repelling;
    sk_complex multiplier;
} sk_generator;

typedef struct {
    sk_complex center_d;
    double radius_d;
    sk_complex center_d_prime;
    double radius_d_prime;
} sk_disk_pair;

/* Builds and validates a group. A geometrically invalid group is still
 * returned (check sk_group_usable); only malformed input fails. */
SK_API sk_status sk_group_create(int genus, const sk_generator* generators, const sk_disk_pair* disks,
                                 sk_group** out);
SK_API void sk_group_destroy(sk_group* group);

SK_API int sk_group_genus(const sk_group* group);
SK_API int sk_group_usable(const sk_group* group);
/* Stored generator matrix (fixed-point generators converted). */
SK_API sk_status sk_group_generator_matrix(const sk_group* group, int k, sk_complex out[4]);
SK_API sk_status sk_group_disk_pair(const sk_group* group, int k, sk_disk_pair* out);
SK_API sk_status sk_group_generator_spec(const sk_group* group, int k, sk_generator* out);

typedef struct {
    int usable;
    int structural_ok;
    double min_disk_gap;
    double max_boundary_residual;
    int check_count;
} sk_validation_summary;

typedef struct {
    const char* name;    /* owned by the group */
    int passed;
    double margin;
    const char* detail;  /* owned by the group */
} sk_validation_check;

SK_API sk_status sk_group_validation(const sk_group* group, sk_validation_summary* out);
SK_API sk_status sk_group_check(const sk_group* group, int index, sk_validation_check* out);
/* Structural error text, or "" when the lists were consistent. */
SK_API const char* sk_group_structural_error(const sk_group* group);

/* ---- differentials, integrals and periods ------------------------------ */

typedef enum { SK_HOLOMORPHIC = 0, SK_THIRD_KIND = 1 } sk_differential_kind;

typedef struct {
    sk_differential_kind kind;
    int index;        /* holomorphic basis element (0-based) */
    sk_complex z;     /* third-kind poles, residue +1 at z ... */
    sk_complex z_prime; /* ... and -1 at z_prime */
} sk_differential;

typedef struct {
    int max_word_len;
    double tail_estimate;
    sk_complex base_point;
    double symmetry_residual;
} sk_period_info;

/* out: g*g row-major b_{js}. info may be NULL. */
SK_API sk_status sk_period_matrix(const sk_group* group, const sk_settings* settings, sk_complex* out,
                                  sk_period_info* info);

#define SK_MAX_HISTORY 16

typedef struct {
    int nodes;
    double last_change;
    int converged;
    int history_len;
    int history_nodes[SK_MAX_HISTORY];
    double history_change[SK_MAX_HISTORY];
} sk_quadrature_info;

/* out: g*g row-major, entry (j, k) = clockwise integral of dzeta_j over dD_k.
 * info (may be NULL) describes the worst row. */
SK_API sk_status sk_a_period_matrix(const sk_group* group, const sk_settings* settings, sk_complex* out,
                                    sk_quadrature_info* info);

/* Integral of the differential along the planned path from -> to. */
SK_API sk_status sk_integrate(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                              sk_complex from, sk_complex to, sk_complex* out);

/* Per-layer norms on boundary probe points; *count receives the number of
 * layers (also when capacity is too small, which returns SK_INVALID_ARGUMENT). */
SK_API sk_status sk_layer_norms(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                                double* out, int capacity, int* count, double* tail_estimate);

/* max over samples on dD'_k of |eval(S_k u) S_k'(u) - eval(u)|. */
SK_API sk_status sk_automorphy_residual(const sk_group* group, const sk_settings* settings,
                                        const sk_differential* d, int k, int samples, double* out);

/* ---- variations -------------------------------------------------------- */

/* Perturbation directions are passed as 4*g complex numbers: dS_l row-major,
 * on the scale of the stored generator matrix. */

typedef struct {
    int nodes;
    double last_change;
    double max_integrand;
    double symmetry_residual;
} sk_variation_info;

SK_API sk_status sk_vary_period_matrix(const sk_group* group, const sk_settings* settings,
                                       const sk_complex* deltas, sk_complex* out, sk_variation_info* info);

/* First-order change of the integral of d from z to z_prime. per_circle
 * (g entries) and info may be NULL. */
SK_API sk_status sk_vary_integral(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                                  sk_complex z, sk_complex z_prime, const sk_complex* deltas, sk_complex* out,
                                  sk_complex* per_circle, sk_variation_info* info);

typedef struct {
    double base_step;
    int richardson_levels;
} sk_fd_settings;

typedef struct {
    double error_estimate;
    int monotone;
    double step;
    int shrinks;
} sk_fd_info;

SK_API void sk_fd_settings_default(sk_fd_settings* out);

SK_API sk_status sk_fd_period_matrix(const sk_group* group, const sk_settings* settings, const sk_complex* deltas,
                                     const sk_fd_settings* fd, sk_complex* out, sk_fd_info* info);

SK_API sk_status sk_fd_integral(const sk_group* group, const sk_settings* settings, const sk_differential* d,
                                sk_complex z, sk_complex z_prime, const sk_complex* deltas,
                                const sk_fd_settings* fd, sk_complex* out, sk_fd_info* info);

/* dS_l = X S_l - S_l X for every l. */
SK_API sk_status sk_gauge_conjugation_direction(const sk_group* group, const sk_complex x[4], sk_complex* deltas);
/* dS_l = eps S_l for generator l only. */
SK_API sk_status sk_scaling_direction(const sk_group* group, int l, sk_complex eps, sk_complex* deltas);

typedef enum {
    SK_COORD_ATTRACTING = 0,
    SK_COORD_REPELLING = 1,
    SK_COORD_MULTIPLIER = 2,
    SK_COORD_C11 = 3,
    SK_COORD_C12 = 4,
    SK_COORD_C21 = 5,
    SK_COORD_C22 = 6
} sk_coordinate;

/* Direction moving coordinate c of generator l by delta. */
SK_API sk_status sk_parameter_direction(const sk_group* group, int l, sk_coordinate c, sk_complex delta,
                                        sk_complex* deltas);

/* ---- inverse problem --------------------------------------------------- */

typedef enum { SK_PART_REAL = 0, SK_PART_IMAG = 1 } sk_part;
typedef enum { SK_TARGET_BOTH = 0, SK_TARGET_REAL = 1, SK_TARGET_IMAG = 2 } sk_target_parts;

SK_API sk_status sk_problem_create(sk_problem** out);
SK_API void sk_problem_destroy(sk_problem* problem);
SK_API sk_status sk_problem_add_parameter(sk_problem* problem, int generator, sk_coordinate c, sk_part part);
SK_API sk_status sk_problem_add_period_target(sk_problem* problem, int j, int s, sk_complex value,
                                              sk_target_parts parts);
/* Target for the integral of dzeta_k from -> to. */
SK_API sk_status sk_problem_add_integral_target(sk_problem* problem, int k, sk_complex from, sk_complex to,
                                                sk_complex value, sk_target_parts parts);

typedef struct {
    int max_iter;
    double tol;
    int max_halvings;
    double max_condition;
} sk_newton_options;

SK_API void sk_newton_options_default(sk_newton_options* out);

/* Largest relative discrepancy between the analytic and finite-difference
 * Jacobians (per column, relative to the column's largest entry). */
SK_API sk_status sk_problem_jacobian_check(const sk_problem* problem, const sk_group* group,
                                           const sk_settings* settings, const sk_fd_settings* fd, double* out);

/* Runs Newton's method. *out receives a result (with the trace so far) even
 * when the returned status reports a failure, unless the input was invalid. */
SK_API sk_status sk_solve(const sk_problem* problem, const sk_group* initial, const sk_settings* settings,
                          const sk_newton_options* options, sk_solve_result** out);
SK_API void sk_solve_result_destroy(sk_solve_result* result);

typedef struct {
    double residual_norm;
    double step_norm;
    double condition;
    int halvings;
} sk_solve_iteration;

SK_API int sk_solve_result_converged(const sk_solve_result* result);
SK_API const char* sk_solve_result_message(const sk_solve_result* result);
/* Number of recorded iterates, including the starting point. */
SK_API int sk_solve_result_iteration_count(const sk_solve_result* result);
SK_API int sk_solve_result_parameter_count(const sk_solve_result* result);
/* params receives sk_solve_result_parameter_count values; may be NULL. */
SK_API sk_status sk_solve_result_iteration(const sk_solve_result* result, int i, sk_solve_iteration* out,
                                           double* params);
/* Convergence order estimate, NaN when the history is too short. */
SK_API double sk_solve_result_exponent(const sk_solve_result* result);
/* New handle to the final group (the starting group if no step was taken). */
SK_API sk_status sk_solve_result_group(const sk_solve_result* result, sk_group** out);

#ifdef __cplusplus
}
#endif

#endif
