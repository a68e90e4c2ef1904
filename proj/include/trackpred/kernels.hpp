// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

// Dense double-precision primitives behind the recurrent layers and the metric
// reductions. A scalar reference implementation always exists; wider variants
// (AVX2 on x86-64) are selected at runtime and must agree with the reference
// within accumulation-order rounding.
namespace trackpred::kernels {

enum class Backend {
  Auto,    // widest supported variant
  Scalar,  // portable reference
  Avx2,
};

struct Table {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
  // Row-major W (rows x cols).
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);      // y = W x
  void (*matvec_acc)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);  // y += W x
  void (*matvec_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* v,
                       double* x);                                                                      // x += W^T v
  void (*ger_acc)(double* w, std::size_t rows, std::size_t cols, const double* a, const double* b);     // W += a b^T
  void (*mul_acc)(const double* a, const double* b, double* y, std::size_t n);                          // y += a.*b
  double (*sum_sq)(const double* a, std::size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
};

bool avx2_supported();

/// Selects the active kernel table. Auto resolves to the widest supported
/// backend. Throws ConfigError when a fixed backend is unsupported here.
void select(Backend b);
Backend active_backend();
const char* active_name();

const Table& scalar_table();
/// nullptr when this build or this CPU has no AVX2 path.
const Table* avx2_table();

const Table& active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void matvec(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active().matvec(w, rows, cols, x, y);
}
inline void matvec_acc(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active().matvec_acc(w, rows, cols, x, y);
}
inline void matvec_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* v, double* x) {
  active().matvec_t_acc(w, rows, cols, v, x);
}
inline void ger_acc(double* w, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  active().ger_acc(w, rows, cols, a, b);
}
inline void mul_acc(const double* a, const double* b, double* y, std::size_t n) { active().mul_acc(a, b, y, n); }
inline double sum_sq(const double* a, std::size_t n) { return active().sum_sq(a, n); }
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) { return active().sum_sq_diff(a, b, n); }

}  // namespace trackpred::kernels
