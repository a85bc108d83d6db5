#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mroot {

/// Dense rank-R tensor over an n-dimensional index set, flat storage with
/// the first index fastest.
template <std::size_t Rank>
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::size_t n) : n_(n), data_(ipow(n), 0.0) {}

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  template <class... I>
  double& operator()(I... idx) {
    return data_[flat({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    return data_[flat({static_cast<std::size_t>(idx)...})];
  }

  double max_abs() const {
    double r = 0.0;
    for (double v : data_) r = std::max(r, std::abs(v));
    return r;
  }

private:
  static std::size_t ipow(std::size_t n) {
    std::size_t s = 1;
    for (std::size_t r = 0; r < Rank; ++r) s *= n;
    return s;
  }

  std::size_t flat(const std::array<std::size_t, Rank>& ids) const {
    std::size_t f = 0;
    std::size_t stride = 1;
    for (auto i : ids) {
      f += i * stride;
      stride *= n_;
    }
    return f;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace mroot
