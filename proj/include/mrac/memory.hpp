#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mrac/matrixlab.hpp"

namespace mrac {

/// When to accept a new sample into a history stack. A sample is stored iff
/// it is sufficiently novel relative to the last stored one,
///   ||signal - last||^2 / max(||signal||^2, floor) >= eps_store,
/// at least min_dwell after it, and the stack still has room. The first
/// sample is always stored.
struct RecordingPolicy {
  double eps_store = 0.01;
  double min_dwell = 0.0;
  double floor = 1e-6;
};

/// Time-stamped history stack with a rank monitor. Entries are stored in
/// strictly increasing time order; recording freezes permanently once the
/// rank condition has been met.
template <class Payload>
class DataStack {
 public:
  struct Entry {
    double t;
    Vector signal;
    Payload payload;
  };

  DataStack() = default;
  DataStack(std::size_t capacity, std::size_t required_rank, std::size_t min_entries,
            RecordingPolicy policy)
      : capacity_(capacity), required_rank_(required_rank), min_entries_(min_entries), policy_(policy) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t required_rank() const { return required_rank_; }
  std::size_t min_entries() const { return min_entries_; }
  const RecordingPolicy& policy() const { return policy_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::optional<double> satisfied_at() const { return satisfied_at_; }
  bool frozen() const { return satisfied_at_.has_value(); }

  bool maybe_record(double t, const Vector& signal, Payload payload) {
    if (frozen()) return false;
    if (entries_.size() >= capacity_) return false;
    if (!entries_.empty()) {
      const Entry& last = entries_.back();
      if (t <= last.t) throw Error("stack record times must be strictly increasing");
      if (t - last.t < policy_.min_dwell) return false;
      const double dist2 = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < signal.size(); ++i) {
          const double diff = signal[i] - last.signal[i];
          acc += diff * diff;
        }
        return acc;
      }();
      const double denom = std::max(dot(signal, signal), policy_.floor);
      if (dist2 / denom < policy_.eps_store) return false;
    }
    entries_.push_back(Entry{t, signal, std::move(payload)});
    return true;
  }

  /// Vertical concatenation of per-entry blocks in time order.
  template <class Extract>
  Matrix stacked_matrix(Extract&& extract) const {
    if (entries_.empty()) throw Error("stacked_matrix of empty stack");
    const Matrix first = extract(entries_.front().payload);
    Matrix out(first.rows() * entries_.size(), first.cols());
    std::size_t row = 0;
    for (const Entry& entry : entries_) {
      const Matrix block = extract(entry.payload);
      if (block.cols() != out.cols()) throw DimensionMismatch("stack blocks have inconsistent widths");
      for (std::size_t i = 0; i < block.rows(); ++i, ++row)
        for (std::size_t j = 0; j < block.cols(); ++j) out(row, j) = block(i, j);
    }
    return out;
  }

  /// True iff enough entries are present and the stacked matrix has full
  /// column rank. Marks the satisfaction time on the first success.
  template <class Extract>
  bool rank_condition_met(double now, Extract&& extract) {
    if (frozen()) return true;
    if (entries_.size() < min_entries_) return false;
    const Matrix stacked = stacked_matrix(extract);
    if (stacked.rows() < required_rank_) return false;
    if (min_singular_value(stacked) < rank_tolerance(stacked)) return false;
    satisfied_at_ = now;
    return true;
  }

  /// Rank test without the satisfaction side effect.
  template <class Extract>
  bool rank_condition_holds(Extract&& extract) const {
    if (frozen()) return true;
    if (entries_.size() < min_entries_) return false;
    const Matrix stacked = stacked_matrix(extract);
    if (stacked.rows() < required_rank_) return false;
    return min_singular_value(stacked) >= rank_tolerance(stacked);
  }

 private:
  std::size_t capacity_ = 0;
  std::size_t required_rank_ = 0;
  std::size_t min_entries_ = 0;
  RecordingPolicy policy_;
  std::vector<Entry> entries_;
  std::optional<double> satisfied_at_;
};

}  // namespace mrac
