#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace farsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured quantities, reported on pass and fail
  double elapsed_s = 0.0;
};

/// Empirical variances of the sampled path gain diagonal over `samples`
/// realizations (beta = 1, L = 4): LoS within 2% of 1/2, each NLoS entry
/// within 3% of 1/6.
CheckResult check_channel_statistics(int samples, std::uint64_t seed);

/// Random channel instances (K <= 4, M <= 4, N <= 5): the weakest user by
/// rate, by SINR and by gain coincide, and every pairwise SINR comparison
/// matches the gain comparison.
CheckResult check_gain_ordering(int instances, std::uint64_t seed);

/// Random sub-problem surrogates: tight at the expansion point (1e-12),
/// global lower bound at 1000 sampled points (slack >= -1e-9), numerical
/// Hessian eigenvalues below delta at 100 points, analytic gradient against
/// central differences (rel. err. 1e-5).
CheckResult check_surrogate_certification(int instances, std::uint64_t seed);

/// Random 2-D sub-problems: qp_solve_2d objective beats a dense grid search
/// (step 1e-3 * A) up to 1e-4.
CheckResult check_qp_against_grid(int instances, std::uint64_t seed);

/// Full optimizer runs (K=4, M=4, N=5, L=4): alpha sequence non-decreasing
/// within 1e-9, every intermediate layout inside its regions with spacings
/// >= d0 - 1e-9, final min gain >= initial.
CheckResult check_sca_monotonicity(int instances, std::uint64_t seed);

/// The four fast checks above at their standard sizes.
std::vector<CheckResult> run_selftests(std::uint64_t seed);

std::string format_check(const CheckResult& result);

}  // namespace farsim
