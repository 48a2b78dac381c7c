#pragma once

// Small fixed-capacity linear algebra for ambient dimensions n <= 4,
// deterministic reductions, and a minimal parallel-for used by the
// evolution loops.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace levelflow {

inline constexpr int kMaxDim = 4;

// n-vector, capacity 4. Unused trailing components stay zero so that
// generic loops over kMaxDim are harmless.
struct Vec {
  int n = 0;
  std::array<double, kMaxDim> v{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) {}
  Vec(double x, double y) : n(2), v{x, y, 0.0, 0.0} {}
  Vec(double x, double y, double z) : n(3), v{x, y, z, 0.0} {}
  Vec(double x, double y, double z, double w) : n(4), v{x, y, z, w} {}

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) v[i] -= o.v[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n; ++i) v[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += a.v[i] * b.v[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) {
  double m = norm(a);
  Vec r = a;
  if (m > 0.0) r *= 1.0 / m;
  return r;
}

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

// Symmetric n x n matrix, n <= 4, stored dense row-major.
struct SymMat {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  SymMat() = default;
  explicit SymMat(int dim) : n(dim) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }

  static SymMat identity(int dim, double scale = 1.0) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = scale;
    return m;
  }

  void symmetrize() {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
        (*this)(i, j) = m;
        (*this)(j, i) = m;
      }
  }

  Vec apply(const Vec& x) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
      r[i] = s;
    }
    return r;
  }

  double quad(const Vec& x) const { return dot(x, apply(x)); }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
  }

  friend SymMat operator-(SymMat a, const SymMat& b) {
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) a(i, j) -= b(i, j);
    return a;
  }
};

// Eigen-decomposition of a SymMat: eigenvalues ascending, eigenvectors
// orthonormal, vectors[k] paired with values[k].
struct EigenSys {
  int n = 0;
  std::array<double, kMaxDim> values{};
  std::array<Vec, kMaxDim> vectors{};
};

// Cyclic Jacobi iteration; terminates when the off-diagonal Frobenius norm
// drops below `tol` (absolute, relative to the matrix scale).
inline EigenSys jacobi_eigen(const SymMat& m, double tol = 1e-12) {
  const int n = m.n;
  double A[kMaxDim][kMaxDim];
  double V[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A[i][j] = 0.5 * (m(i, j) + m(j, i));
      V[i][j] = (i == j) ? 1.0 : 0.0;
    }

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(A[i][j]));
  const double stop = tol * std::max(scale, 1.0);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A[i][j] * A[i][j];
    if (std::sqrt(2.0 * off) <= stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) <= stop * 1e-4) continue;
        const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c * vkp - s * vkq;
          V[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, kMaxDim> order{};
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.begin() + n,
            [&](int i, int j) { return A[i][i] < A[j][j]; });

  EigenSys es;
  es.n = n;
  for (int k = 0; k < n; ++k) {
    es.values[k] = A[order[k]][order[k]];
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = V[i][order[k]];
    es.vectors[k] = v;
  }
  return es;
}

// Reconstruct sum(values[k] * v_k v_k^T); used to validate decompositions.
inline SymMat eigen_reconstruct(const EigenSys& es) {
  SymMat m(es.n);
  for (int k = 0; k < es.n; ++k)
    for (int i = 0; i < es.n; ++i)
      for (int j = 0; j < es.n; ++j)
        m(i, j) += es.values[k] * es.vectors[k][i] * es.vectors[k][j];
  return m;
}

// Pairwise tree reduction. The association order depends only on the length,
// never on chunking, so sums are reproducible across thread counts.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t mid = n / 2;
  return pairwise_sum(x, mid) + pairwise_sum(x + mid, n - mid);
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

// Static-partition parallel map over [0, count). Each index is written by
// exactly one worker, so results are bitwise independent of thread count.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  if (threads <= 1 || count < 1024) {
    body(0, count);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (count + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace levelflow
