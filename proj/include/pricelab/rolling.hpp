#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pricelab {

// Fixed-window rolling mean over a scalar series. The running sum is rebuilt
// from the buffer once per window wrap, which caps floating-point drift on
// arbitrarily long runs.
class RollingMean {
 public:
  explicit RollingMean(std::size_t window) : window_(window) {
    if (window == 0)
      throw std::invalid_argument("RollingMean: window must be >= 1");
    buf_.assign(window, 0.0);
  }

  void push(double x) {
    const std::size_t pos = count_ % window_;
    if (count_ >= window_) sum_ -= buf_[pos];
    buf_[pos] = x;
    sum_ += x;
    ++count_;
    if (count_ % window_ == 0) {
      double s = 0.0;
      for (double v : buf_) s += v;
      sum_ = s;
    }
  }

  bool full() const { return count_ >= window_; }
  std::size_t window() const { return window_; }
  std::size_t count() const { return count_; }

  // Mean over the last min(count, window) samples.
  double mean() const {
    if (count_ == 0) throw std::logic_error("RollingMean: no samples");
    const std::size_t n = count_ < window_ ? count_ : window_;
    return sum_ / static_cast<double>(n);
  }

 private:
  std::size_t window_;
  std::vector<double> buf_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

}  // namespace pricelab
