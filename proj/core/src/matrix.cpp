#include "dum/matrix.hpp"

#include <cmath>
#include <string>

#include "dum/errors.hpp"

namespace dum {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

template <typename F>
Matrix unary(const Matrix& m, F f) {
  Matrix out(m.rows(), m.cols());
  const double* src = m.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < m.size(); ++i) dst[i] = f(src[i]);
  return out;
}

template <typename F>
Matrix binary(const Matrix& a, const Matrix& b, const char* op, F f) {
  require_same_shape(a, b, op);
  Matrix out(a.rows(), a.cols());
  const double* pa = a.data();
  const double* pb = b.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < a.size(); ++i) dst[i] = f(pa[i], pb[i]);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, Vec data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw DimensionError("from_rows: ragged row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

Vec Matrix::row_vec(std::size_t r) const {
  auto span = row(r);
  return Vec(span.begin(), span.end());
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Matrix::fill(double v) {
  for (double& x : data_) x = v;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " by " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  // i-k-j order: for each output entry the k-sum still runs left to right,
  // which keeps reductions deterministic while staying cache friendly.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.data() + i * a.cols();
    double* orow = out.data() + i * out.cols();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      const double* brow = b.data() + k * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  return binary(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix sub(const Matrix& a, const Matrix& b) {
  return binary(a, b, "sub", [](double x, double y) { return x - y; });
}

Matrix mul(const Matrix& a, const Matrix& b) {
  return binary(a, b, "mul", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double s) {
  return unary(a, [s](double x) { return x * s; });
}

Matrix add_row_broadcast(const Matrix& a, const Vec& row) {
  if (row.size() != a.cols()) {
    throw DimensionError("add_row_broadcast: row length " +
                         std::to_string(row.size()) + " vs cols " +
                         std::to_string(a.cols()));
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c) + row[c];
  return out;
}

Matrix relu(const Matrix& m) {
  return unary(m, [](double x) { return x > 0.0 ? x : 0.0; });
}

Matrix exp(const Matrix& m) {
  return unary(m, [](double x) { return std::exp(x); });
}

Matrix log(const Matrix& m) {
  return unary(m, [](double x) {
    if (x <= 0.0) throw DomainError("log: non-positive entry " + std::to_string(x));
    return std::log(x);
  });
}

Matrix softplus(const Matrix& m) {
  // log(1+e^x), evaluated on the side that cannot overflow.
  return unary(m, [](double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
  });
}

Matrix clamp(const Matrix& m, double lo, double hi) {
  return unary(m, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); });
}

double sum(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v;
  return acc;
}

Vec col_sum(const Matrix& m) {
  Vec out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m.at(r, c);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void accumulate(Matrix& into, const Matrix& delta) {
  require_same_shape(into, delta, "accumulate");
  double* dst = into.data();
  const double* src = delta.data();
  for (std::size_t i = 0; i < into.size(); ++i) dst[i] += src[i];
}

void accumulate_row(Matrix& into, const Vec& row) {
  if (into.rows() != 1 || into.cols() != row.size()) {
    throw DimensionError("accumulate_row: shape mismatch");
  }
  for (std::size_t c = 0; c < row.size(); ++c) into.at(0, c) += row[c];
}

std::pair<Matrix, Matrix> matmul_backward(const Matrix& a, const Matrix& b,
                                          const Matrix& grad_out) {
  if (grad_out.rows() != a.rows() || grad_out.cols() != b.cols()) {
    throw DimensionError("matmul_backward: upstream gradient shape mismatch");
  }
  return {matmul(grad_out, transpose(b)), matmul(transpose(a), grad_out)};
}

Matrix relu_backward(const Matrix& input, const Matrix& grad_out) {
  return binary(input, grad_out, "relu_backward",
                [](double x, double g) { return x > 0.0 ? g : 0.0; });
}

Matrix exp_backward(const Matrix& input, const Matrix& grad_out) {
  return binary(input, grad_out, "exp_backward",
                [](double x, double g) { return g * std::exp(x); });
}

Matrix softplus_backward(const Matrix& input, const Matrix& grad_out) {
  // d/dx log(1+e^x) = sigmoid(x)
  return binary(input, grad_out, "softplus_backward", [](double x, double g) {
    return g / (1.0 + std::exp(-x));
  });
}

Matrix clamp_backward(const Matrix& input, double lo, double hi,
                      const Matrix& grad_out) {
  return binary(input, grad_out, "clamp_backward", [lo, hi](double x, double g) {
    return (x >= lo && x <= hi) ? g : 0.0;
  });
}

void adam_step(ParamTensor& param, AdamState& state, const AdamConfig& cfg) {
  if (param.grad.rows() != param.value.rows() ||
      param.grad.cols() != param.value.cols()) {
    throw DimensionError("adam_step: gradient shape mismatch");
  }
  if (!param.grad.all_finite()) {
    throw DivergenceError("adam_step: non-finite gradient entry");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  double* p = param.value.data();
  const double* g = param.grad.data();
  for (std::size_t i = 0; i < param.value.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace dum
