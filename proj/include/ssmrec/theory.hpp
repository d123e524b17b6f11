#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ssmrec/loss.hpp"
#include "ssmrec/matrix.hpp"
#include "ssmrec/rng.hpp"

namespace ssmrec::theory {

// --- numeric gradient oracle ----------------------------------------------

// Central finite differences per coordinate; evaluator must be pure.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> params, double epsilon);

// --- popularity fixed point -------------------------------------------------

// Optimal score for an interaction when negatives are drawn from a known
// distribution: log_partition - log(1 + N * |P_u| * p_n_i).
double closed_form_score(double p_n_i, int num_negatives, int pos_count, double log_partition);

struct FitResult {
    Matrix scores;  // users x items free score table (tail-averaged iterate)
    bool converged = false;
    double grad_norm = 0.0;  // expected-loss gradient norm at the result
};

// Treats every f(u, i) as a free parameter and runs SGD on the sampled
// softmax loss, drawing num_negatives i.i.d. negatives from p_n for each
// interaction at every step. Intended for tiny instances where every item
// of the score table is interacted by its user.
FitResult fit_free_score_table(const std::vector<double>& p_n, int num_negatives,
                               const std::vector<std::pair<int, int>>& interactions, int steps,
                               double lr, std::uint64_t seed);

// --- hard negative gradient law ---------------------------------------------

// Gradient-magnitude contribution of one negative with both representations
// unit-norm: checks |c(j)| * Z == sqrt(1 - x^2) * exp(x / tau) with
// x = <s_u, s_j>, then returns |c(j)|. Throws if inputs are not unit norm.
double negative_grad_magnitude(std::span<const double> s_u, std::span<const double> s_j,
                               double tau, double partition);

// --- ranking bound -----------------------------------------------------------

struct DcgBoundResult {
    double neg_log_dcg = 0.0;
    double sm_loss = 0.0;  // per-sample softmax loss of the positive
    bool ok = false;
};

// Single-positive candidate set: rank counts strictly dominating scores
// only; verifies -log DCG <= log(rank) <= softmax loss.
DcgBoundResult dcg_bound_check(std::span<const double> scores, int positive_index);

// --- degree-driven magnitude --------------------------------------------------

struct ParetoParams {
    double alpha = 3.0;  // tail index; moment checks need alpha > 2
    double x_m = 1.0;    // scale, fixed to 1
};

// Inverse-CDF draw x = x_m * U^(-1/alpha), U in (0, 1].
double pareto_sample(const ParetoParams& params, Rng& rng);

struct MagnitudeModel {
    double alpha0 = 0.5;
    double alpha1 = 0.5;
    double mu0 = 0.0;
    double sigma0 = 1.0;
    double a = 0.0;  // derived, see derive_coefficients
    double b = 0.0;

    // a = alpha/(alpha+2*a1) (s0^2 + m0^2) - (alpha/(alpha+a1))^2 m0^2,
    // b = alpha^2 m0^2 / (alpha + a1)^2. Requires alpha > max(2, 2*a1).
    void derive_coefficients(double alpha);
};

// a * degree^(1-2*a0) + b * degree^(2-2*a0)
double expected_sq_magnitude(const MagnitudeModel& model, double alpha, double degree);

struct DegreePoint {
    double degree = 0.0;
    double empirical = 0.0;
    double expected = 0.0;
    double std_error = 0.0;
};

// Scalar-coordinate Monte Carlo of one propagation step onto a node of the
// given fixed degree, with neighbor degrees drawn from a continuous Pareto
// tail and neighbor values from N(mu0, sigma0^2).
std::vector<DegreePoint> magnitude_monte_carlo(double alpha, double alpha0, double alpha1,
                                               double mu0, double sigma0,
                                               const std::vector<int>& degrees, int trials,
                                               std::uint64_t seed);

// --- verification suite --------------------------------------------------------

struct CheckResult {
    std::string name;
    std::string claim;  // serialized as "paper_ref" in reports
    bool pass = false;
    double max_error = 0.0;
    std::int64_t trials = 0;
    std::string detail;
};

struct SuiteOptions {
    std::uint64_t seed = 7;
    // testing hook: biases one analytic gradient so the suite must fail
    bool inject_failure = false;
};

// suite: all | gradients | fixed_point | dcg | magnitude
std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opts = {});

}  // namespace ssmrec::theory
