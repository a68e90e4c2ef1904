// SPDX-License-Identifier: Apache-2.0
#include "trackpred/kernels.hpp"

#include <string>

#include "trackpred/errors.hpp"

namespace trackpred::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(w + r * cols, x, cols);
}

void matvec_acc_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void matvec_t_acc_scalar(const double* w, std::size_t rows, std::size_t cols, const double* v, double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(v[r], w + r * cols, x, cols);
}

void ger_acc_scalar(double* w, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(a[r], b, w + r * cols, cols);
}

void mul_acc_scalar(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

constexpr Table kScalarTable = {
    "scalar",         dot_scalar,     axpy_scalar,   matvec_scalar,     matvec_acc_scalar,
    matvec_t_acc_scalar, ger_acc_scalar, mul_acc_scalar, sum_sq_scalar, sum_sq_diff_scalar,
};

const Table* g_active = &kScalarTable;
Backend g_backend = Backend::Scalar;
bool g_initialized = false;

void init_auto() {
  const Table* avx2 = avx2_table();
  g_active = avx2 != nullptr ? avx2 : &kScalarTable;
  g_backend = avx2 != nullptr ? Backend::Avx2 : Backend::Scalar;
  g_initialized = true;
}

}  // namespace

#if !defined(TRACKPRED_HAVE_AVX2)
bool avx2_supported() { return false; }
const Table* avx2_table() { return nullptr; }
#endif

const Table& scalar_table() { return kScalarTable; }

void select(Backend b) {
  switch (b) {
    case Backend::Auto:
      init_auto();
      return;
    case Backend::Scalar:
      g_active = &kScalarTable;
      g_backend = Backend::Scalar;
      g_initialized = true;
      return;
    case Backend::Avx2: {
      const Table* t = avx2_table();
      if (t == nullptr) throw ConfigError("kernel backend 'avx2' is not supported on this host");
      g_active = t;
      g_backend = Backend::Avx2;
      g_initialized = true;
      return;
    }
  }
  throw ConfigError("unknown kernel backend");
}

Backend active_backend() {
  if (!g_initialized) init_auto();
  return g_backend;
}

const char* active_name() { return active().name; }

const Table& active() {
  if (!g_initialized) init_auto();
  return *g_active;
}

}  // namespace trackpred::kernels
