#pragma once

// Small dense linear algebra for dimensions up to ~6, plus a deterministic PRNG.
// Everything here is value-semantic and allocation-light; no external deps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spherill {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Vec operator-(const Vec& a) { return -1.0 * a; }

inline Vec& operator+=(Vec& a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec& operator-=(Vec& a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec& operator*=(Vec& a, double s) {
  for (double& x : a) x *= s;
  return a;
}

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline Vec zeros(size_t n) { return Vec(n, 0.0); }

inline Vec basis_vec(size_t n, size_t i) {
  Vec e(n, 0.0);
  e[i] = 1.0;
  return e;
}

inline Vec cross3(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Row-major dense matrix.
struct Mat {
  size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }

  static Mat identity(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Vec row(size_t i) const { return Vec(a.begin() + i * cols, a.begin() + (i + 1) * cols); }

  Mat transposed() const {
    Mat t(cols, rows);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

inline Vec mat_vec(const Mat& m, const Vec& x) {
  Vec y(m.rows, 0.0);
  for (size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t k = 0; k < a.cols; ++k) {
      double v = a(i, k);
      if (v == 0.0) continue;
      for (size_t j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
    }
  return c;
}

// Gaussian elimination with partial pivoting. Throws on (near-)singular systems.
inline Vec solve_linear(Mat m, Vec b) {
  const size_t n = m.rows;
  if (m.cols != n || b.size() != n) throw std::invalid_argument("solve_linear: shape");
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    double best = std::fabs(m(k, k));
    for (size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(m(i, k));
      if (v > best) { best = v; piv = i; }
    }
    if (best < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
    if (piv != k) {
      for (size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (size_t i = k + 1; i < n; ++i) {
      double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      m(i, k) = 0.0;
      for (size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= m(ii, j) * x[j];
    x[ii] = s / m(ii, ii);
  }
  return x;
}

// Cholesky solve for symmetric positive definite systems (ridge added by caller).
inline Vec solve_spd(Mat m, Vec b) {
  const size_t n = m.rows;
  for (size_t k = 0; k < n; ++k) {
    double d = m(k, k);
    for (size_t j = 0; j < k; ++j) d -= m(k, j) * m(k, j);
    if (d <= 0.0) throw std::runtime_error("solve_spd: not positive definite");
    d = std::sqrt(d);
    m(k, k) = d;
    for (size_t i = k + 1; i < n; ++i) {
      double s = m(i, k);
      for (size_t j = 0; j < k; ++j) s -= m(i, j) * m(k, j);
      m(i, k) = s / d;
    }
  }
  // forward
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t j = 0; j < i; ++j) s -= m(i, j) * b[j];
    b[i] = s / m(i, i);
  }
  // backward (L^T)
  for (size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= m(j, ii) * b[j];
    b[ii] = s / m(ii, ii);
  }
  return b;
}

// Jacobi eigen-decomposition of a symmetric matrix. Returns eigenvalues
// (descending) and the corresponding orthonormal eigenvectors as matrix rows.
inline void eig_sym(const Mat& s, Vec& eigenvalues, Mat& eigenvectors) {
  const size_t n = s.rows;
  Mat a = s;
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return a(x, x) > a(y, y); });
  eigenvalues.assign(n, 0.0);
  eigenvectors = Mat(n, n);
  for (size_t i = 0; i < n; ++i) {
    eigenvalues[i] = a(order[i], order[i]);
    for (size_t k = 0; k < n; ++k) eigenvectors(i, k) = v(k, order[i]);
  }
}

// Singular values / right singular vectors of an m x n matrix via the Gram
// matrix A^T A. Adequate for rank decisions at tolerances >= ~1e-7.
inline void gram_svd(const std::vector<Vec>& rows, size_t n, Vec& sing,
                     Mat& right_vectors) {
  Mat g(n, n);
  for (const Vec& r : rows)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) g(i, j) += r[i] * r[j];
  Vec ev;
  eig_sym(g, ev, right_vectors);
  sing.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) sing[i] = std::sqrt(std::max(0.0, ev[i]));
}

inline size_t numeric_rank(const std::vector<Vec>& rows, size_t n, double tol) {
  Vec s;
  Mat v;
  gram_svd(rows, n, s, v);
  double scale = s.empty() ? 0.0 : s[0];
  size_t r = 0;
  for (double x : s)
    if (x > tol * std::max(1.0, scale)) ++r;
  return r;
}

// One-dimensional null space of a set of row vectors spanning an (n-1)-dim
// subspace of R^n. Throws if the null space is not one-dimensional.
inline Vec nullspace1(const std::vector<Vec>& rows, size_t n, double tol) {
  Vec s;
  Mat v;
  gram_svd(rows, n, s, v);
  double scale = std::max(1.0, s[0]);
  if (n >= 2 && s[n - 2] <= tol * scale)
    throw std::runtime_error("nullspace1: deficient rank");
  if (s[n - 1] > tol * scale)
    throw std::runtime_error("nullspace1: full rank, no null direction");
  Vec out = v.row(n - 1);
  double nn = norm(out);
  for (double& x : out) x /= nn;
  return out;
}

// Gram-Schmidt completion: given k orthonormal vectors in R^n, extend to a
// full orthonormal basis using standard basis candidates (deterministic).
inline std::vector<Vec> complete_basis(std::vector<Vec> basis, size_t n) {
  for (size_t cand = 0; cand < n && basis.size() < n; ++cand) {
    Vec w = basis_vec(n, cand);
    for (const Vec& b : basis) w -= dot(w, b) * b;
    double nn = norm(w);
    if (nn > 1e-7) {
      w *= 1.0 / nn;
      // second pass for orthogonality
      for (const Vec& b : basis) w -= dot(w, b) * b;
      w *= 1.0 / norm(w);
      basis.push_back(w);
    }
  }
  if (basis.size() != n) throw std::runtime_error("complete_basis failed");
  return basis;
}

// splitmix64-based PRNG; deterministic across platforms (unlike the standard
// library distributions).
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ULL) : state(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  double next_normal() {
    // Box-Muller; consumes two uniforms
    double u1 = std::max(next_double(), 1e-300), u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec unit_vector(size_t n) {
    Vec v(n);
    double s = 0.0;
    do {
      for (size_t i = 0; i < n; ++i) v[i] = next_normal();
      s = norm(v);
    } while (s < 1e-12);
    v *= 1.0 / s;
    return v;
  }
};

}  // namespace spherill
