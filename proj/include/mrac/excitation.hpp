#pragma once

#include <vector>

#include "mrac/matrixlab.hpp"

namespace mrac {

/// Result of testing whether a signal is exciting over one finite interval:
/// alpha is the smallest eigenvalue of the Gram integral of the samples.
struct ExcitationReport {
  double t_start = 0.0;
  double t_end = 0.0;
  double alpha = 0.0;
  bool exciting = false;
};

inline constexpr double kExcitationTolerance = 1e-10;

/// Trapezoidal Gram integral C = int x x^T dt over the sample grid;
/// alpha = lambda_min(C). Requires at least two samples with strictly
/// increasing times.
ExcitationReport excitation_level(const std::vector<double>& times, const std::vector<Vector>& samples);

struct Lemma4Check {
  bool stack_full_rank = false;
  double stack_sigma_min = 0.0;
  ExcitationReport report;
};

/// Full-rank stacked data implies the underlying signal was exciting over
/// the recording interval; the converse is never asserted.
Lemma4Check check_lemma4(const Matrix& stacked, std::size_t required_rank,
                         const std::vector<double>& times, const std::vector<Vector>& samples);

}  // namespace mrac
