#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dum {

using Vec = std::vector<double>;

// Dense row-major matrix of 64-bit floats. Once produced by an operation a
// matrix is treated as an immutable value; all operations below are pure
// and reduce in a fixed left-to-right order, so results are reproducible
// across runs and thread layouts.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, Vec data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vec row_vec(std::size_t r) const;

  const Vec& values() const { return data_; }
  bool all_finite() const;
  void fill(double v);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

// ---- arithmetic ----

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix mul(const Matrix& a, const Matrix& b);  // elementwise (Hadamard)
Matrix scale(const Matrix& a, double s);

// Adds the same row vector to every row (bias broadcast).
Matrix add_row_broadcast(const Matrix& a, const Vec& row);

Matrix relu(const Matrix& m);
Matrix exp(const Matrix& m);
Matrix log(const Matrix& m);  // throws DomainError on non-positive entries
Matrix softplus(const Matrix& m);
Matrix clamp(const Matrix& m, double lo, double hi);

double sum(const Matrix& m);
Vec col_sum(const Matrix& m);
double dot(std::span<const double> a, std::span<const double> b);

// In-place accumulation, used when summing gradients.
void accumulate(Matrix& into, const Matrix& delta);
void accumulate_row(Matrix& into, const Vec& row);

// ---- backward functions ----
//
// The model graph is small and fixed, so gradients are explicit per-layer
// backward functions rather than a general tape. Each takes the forward
// inputs plus the upstream gradient and returns gradients w.r.t. inputs.

std::pair<Matrix, Matrix> matmul_backward(const Matrix& a, const Matrix& b,
                                          const Matrix& grad_out);
Matrix relu_backward(const Matrix& input, const Matrix& grad_out);
Matrix exp_backward(const Matrix& input, const Matrix& grad_out);
Matrix softplus_backward(const Matrix& input, const Matrix& grad_out);
// Zero gradient where the clamp was active.
Matrix clamp_backward(const Matrix& input, double lo, double hi,
                      const Matrix& grad_out);

// ---- parameters and Adam ----

struct ParamTensor {
  Matrix value;
  Matrix grad;

  ParamTensor() = default;
  explicit ParamTensor(Matrix v)
      : value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  long step_count = 0;

  explicit AdamState(const Matrix& shape_like)
      : first_moment(shape_like.rows(), shape_like.cols()),
        second_moment(shape_like.rows(), shape_like.cols()) {}
};

// Bias-corrected Adam update in place. The gradient is left intact; callers
// zero it explicitly between optimizer steps. Throws DivergenceError on
// non-finite gradient entries.
void adam_step(ParamTensor& param, AdamState& state, const AdamConfig& cfg);

}  // namespace dum
