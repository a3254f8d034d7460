#include "mrac/excitation.hpp"

#include <algorithm>

namespace mrac {

ExcitationReport excitation_level(const std::vector<double>& times, const std::vector<Vector>& samples) {
  if (times.size() < 2) throw TooFewSamples("excitation_level needs at least two samples");
  if (times.size() != samples.size()) throw DimensionMismatch("times and samples differ in length");

  const std::size_t dim = samples.front().size();
  Matrix gram(dim, dim);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    if (h <= 0.0) throw Error("excitation sample times must be strictly increasing");
    const Vector& a = samples[k];
    const Vector& b = samples[k + 1];
    if (a.size() != dim || b.size() != dim) throw DimensionMismatch("sample dimension changed");
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        gram(i, j) += 0.5 * h * (a[i] * a[j] + b[i] * b[j]);
  }

  ExcitationReport report;
  report.t_start = times.front();
  report.t_end = times.back();
  report.alpha = std::max(0.0, symmetric_eigenvalues(gram).front());
  report.exciting = report.alpha > kExcitationTolerance;
  return report;
}

Lemma4Check check_lemma4(const Matrix& stacked, std::size_t required_rank,
                         const std::vector<double>& times, const std::vector<Vector>& samples) {
  Lemma4Check check;
  check.stack_sigma_min = min_singular_value(stacked);
  check.stack_full_rank =
      stacked.cols() == required_rank && stacked.rows() >= required_rank &&
      check.stack_sigma_min >= rank_tolerance(stacked);
  check.report = excitation_level(times, samples);
  return check;
}

}  // namespace mrac
