#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

namespace partrans {

// Row-major rows x cols block of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  double& at(std::size_t i, std::size_t k) noexcept { return data_[i * cols_ + k]; }
  double at(std::size_t i, std::size_t k) const noexcept { return data_[i * cols_ + k]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Entity, relation and (TransH) hyperplane-normal parameters. Shared by all training
// workers; see ElementAccess below for the concurrency contract.
struct EmbeddingStore {
  Matrix entities;
  Matrix relations;
  Matrix hyperplanes;  // empty unless TransH

  std::size_t dim() const noexcept { return entities.cols(); }
  bool has_hyperplanes() const noexcept { return !hyperplanes.empty(); }
  bool all_finite() const noexcept;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;
};

// Element access policies for the training kernels.
//
// SharedAccess gives element-granular indivisible loads and stores with no ordering
// (relaxed atomics, plain moves on x86). Whole rows read through it may mix old and new
// elements. Accumulation uses a CAS loop, never a lock.
struct PlainAccess {
  static double load(const double& x) noexcept { return x; }
  static void store(double& x, double v) noexcept { x = v; }
  static double fetch_add(double& x, double v) noexcept {
    double old = x;
    x = old + v;
    return old;
  }
};

struct SharedAccess {
  static double load(const double& x) noexcept {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  }
  static void store(double& x, double v) noexcept {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
  static double fetch_add(double& x, double v) noexcept {
    return std::atomic_ref<double>(x).fetch_add(v, std::memory_order_relaxed);
  }
};

static_assert(std::atomic_ref<double>::is_always_lock_free,
              "lock-free training needs lock-free double atomics");

}  // namespace partrans
