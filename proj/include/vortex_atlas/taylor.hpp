/**
 * @file taylor.hpp
 * @brief Dense truncated multivariate Taylor series.
 *
 * A Series<T> stores every coefficient of total degree <= order in graded
 * lexicographic order (degree first, then descending exponent of the first
 * variable). Coefficients follow the Taylor convention, i.e. the coefficient
 * of X^i Y^j is d^{i+j} f / dx^i dy^j divided by i! j!.
 *
 * Field jets use 2, 3 or 4 variables (x, y[, z][, t]); single-variable series
 * are also accepted and are used internally for curve expansions.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "vortex_atlas/errors.hpp"

namespace vortex_atlas {

using Complex = std::complex<double>;

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxOrder = 10;
inline constexpr int kDefaultOrder = 6;
/// Reciprocal guard on the modulus of a constant term.
inline constexpr double kDivisionGuard = 1e-12;

/// Exponent tuple; entries past nvars are zero.
using MultiIndex = std::array<int, kMaxVars>;

inline int degree(const MultiIndex& alpha) {
  int d = 0;
  for (int e : alpha) d += e;
  return d;
}

namespace detail {

/// Index bookkeeping shared by every series of the same (nvars, order).
struct MonomialTable {
  struct Product {
    std::uint16_t lhs, rhs, out;
  };
  struct DerivativeEntry {
    std::uint16_t from, to;
    int factor;
  };

  int nvars = 0;
  int order = 0;
  std::vector<MultiIndex> exponents;
  std::vector<int> lookup;  // dense (order+1)^nvars grid -> index or -1
  std::vector<Product> products;
  std::array<std::vector<DerivativeEntry>, kMaxVars> derivatives;

  std::size_t size() const { return exponents.size(); }

  int index_of(const MultiIndex& alpha) const {
    if (degree(alpha) > order) return -1;
    int key = 0;
    for (int v = 0; v < nvars; ++v) {
      if (alpha[v] < 0) return -1;
      key = key * (order + 1) + alpha[v];
    }
    for (int v = nvars; v < kMaxVars; ++v)
      if (alpha[v] != 0) return -1;
    return lookup[key];
  }

  MonomialTable(int n, int ord) : nvars(n), order(ord) {
    // graded lex: degree ascending, then exponents descending lexicographically
    for (int d = 0; d <= order; ++d) {
      MultiIndex alpha{};
      append_degree(alpha, 0, d);
    }
    int grid = 1;
    for (int v = 0; v < nvars; ++v) grid *= (order + 1);
    lookup.assign(grid, -1);
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      int key = 0;
      for (int v = 0; v < nvars; ++v) key = key * (order + 1) + exponents[i][v];
      lookup[key] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      const int di = degree(exponents[i]);
      for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (di + degree(exponents[j]) > order) break;  // degrees ascend in j
        MultiIndex sum{};
        for (int v = 0; v < kMaxVars; ++v) sum[v] = exponents[i][v] + exponents[j][v];
        products.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                            static_cast<std::uint16_t>(index_of(sum))});
      }
    }
    for (int v = 0; v < nvars; ++v) {
      for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i][v] == 0) continue;
        MultiIndex lower = exponents[i];
        lower[v] -= 1;
        derivatives[v].push_back({static_cast<std::uint16_t>(i),
                                  static_cast<std::uint16_t>(index_of(lower)),
                                  exponents[i][v]});
      }
    }
  }

 private:
  void append_degree(MultiIndex& alpha, int var, int remaining) {
    if (var == nvars - 1) {
      alpha[var] = remaining;
      exponents.push_back(alpha);
      alpha[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      alpha[var] = e;
      append_degree(alpha, var + 1, remaining - e);
    }
    alpha[var] = 0;
  }
};

inline const MonomialTable& monomial_table(int nvars, int order) {
  if (nvars < 1 || nvars > kMaxVars)
    throw ShapeError("series variable count must be in 1..4, got " + std::to_string(nvars));
  if (order < 0 || order > kMaxOrder)
    throw ShapeError("series order must be in 0..10, got " + std::to_string(order));
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_unique<const MonomialTable>(nvars, order);
  return *slot;
}

template <class T>
bool is_finite_value(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Truncated multivariate Taylor series with coefficients of type T
/// (double or std::complex<double>).
template <class T>
class Series {
 public:
  using value_type = T;

  Series() = default;

  Series(int nvars, int order)
      : table_(&detail::monomial_table(nvars, order)), coeffs_(table_->size(), T{}) {}

  static Series constant(int nvars, int order, T value) {
    Series s(nvars, order);
    s.coeffs_[0] = value;
    return s;
  }

  /// basepoint + X_index: the seed of one independent variable.
  static Series variable(int index, double basepoint, int nvars, int order) {
    if (index < 0 || index >= nvars)
      throw ShapeError("variable index " + std::to_string(index) + " out of range");
    Series s(nvars, order);
    s.coeffs_[0] = T(basepoint);
    if (order >= 1) {
      MultiIndex alpha{};
      alpha[index] = 1;
      s.coeffs_[s.table_->index_of(alpha)] = T(1);
    }
    return s;
  }

  bool valid() const { return table_ != nullptr; }
  int nvars() const { return table_->nvars; }
  int order() const { return table_->order; }
  std::size_t size() const { return coeffs_.size(); }

  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const T> coefficients() const { return coeffs_; }
  const MultiIndex& exponents(std::size_t i) const { return table_->exponents[i]; }
  int index_of(const MultiIndex& alpha) const { return table_->index_of(alpha); }

  /// Coefficient of X^alpha (zero if alpha is beyond the truncation order).
  T coeff(const MultiIndex& alpha) const {
    const int i = table_->index_of(alpha);
    return i < 0 ? T{} : coeffs_[i];
  }

  void set_coeff(const MultiIndex& alpha, T value) {
    const int i = table_->index_of(alpha);
    if (i < 0) throw ShapeError("multi-index beyond series order");
    coeffs_[i] = value;
  }

  /// Partial derivative d^alpha f at the basepoint (coefficient times alpha!).
  T derivative_value(const MultiIndex& alpha) const {
    double scale = 1.0;
    for (int v = 0; v < kMaxVars; ++v) scale *= detail::factorial(alpha[v]);
    return coeff(alpha) * scale;
  }

  T constant_term() const { return coeffs_[0]; }

  bool same_shape(const Series& other) const { return table_ == other.table_; }

  double max_abs() const {
    double m = 0.0;
    for (const T& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Series& operator+=(const Series& rhs) {
    require_shape(rhs, "add");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return check_finite("add");
  }

  Series& operator-=(const Series& rhs) {
    require_shape(rhs, "subtract");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return check_finite("subtract");
  }

  Series& operator*=(const T& scalar) {
    for (T& c : coeffs_) c *= scalar;
    return check_finite("scale");
  }

  Series& add_constant(const T& value) {
    coeffs_[0] += value;
    return check_finite("add");
  }

  friend Series operator+(Series lhs, const Series& rhs) { return lhs += rhs; }
  friend Series operator-(Series lhs, const Series& rhs) { return lhs -= rhs; }
  friend Series operator*(Series lhs, const T& scalar) { return lhs *= scalar; }
  friend Series operator*(const T& scalar, Series rhs) { return rhs *= scalar; }

  friend Series operator-(Series s) {
    for (T& c : s.coeffs_) c = -c;
    return s;
  }

  /// Cauchy product truncated at the common order.
  friend Series operator*(const Series& lhs, const Series& rhs) {
    lhs.require_shape(rhs, "multiply");
    Series out(lhs.nvars(), lhs.order());
    const T* a = lhs.coeffs_.data();
    const T* b = rhs.coeffs_.data();
    T* r = out.coeffs_.data();
    for (const auto& p : lhs.table_->products) r[p.out] += a[p.lhs] * b[p.rhs];
    out.check_finite("multiply");
    return out;
  }

  Series& operator*=(const Series& rhs) { return *this = *this * rhs; }

  /// d/dX_var. The top-degree coefficients of the result are zero (unknown).
  Series derivative(int var) const {
    if (var < 0 || var >= nvars()) throw ShapeError("derivative variable out of range");
    Series out(nvars(), order());
    for (const auto& d : table_->derivatives[var])
      out.coeffs_[d.to] = coeffs_[d.from] * static_cast<double>(d.factor);
    return out;
  }

  /// Same coefficients re-truncated (or zero-padded) at another order.
  Series with_order(int new_order) const {
    Series out(nvars(), new_order);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const int j = table_->index_of(out.exponents(i));
      if (j >= 0) out.coeffs_[i] = coeffs_[j];
    }
    return out;
  }

  /// Polynomial value at a displacement from the basepoint.
  T evaluate(std::span<const double> displacement) const {
    if (static_cast<int>(displacement.size()) != nvars())
      throw ShapeError("evaluate: displacement arity mismatch");
    std::array<std::vector<double>, kMaxVars> powers;
    for (int v = 0; v < nvars(); ++v) {
      powers[v].assign(order() + 1, 1.0);
      for (int p = 1; p <= order(); ++p) powers[v][p] = powers[v][p - 1] * displacement[v];
    }
    T sum{};
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      double m = 1.0;
      for (int v = 0; v < nvars(); ++v) m *= powers[v][exponents(i)[v]];
      sum += coeffs_[i] * m;
    }
    return sum;
  }

  /// Substitutes series arguments for the variables: sum_a c_a prod_v args_v^a_v.
  /// Arguments must share a shape; the result takes that shape. The
  /// substitution is exact for the truncated polynomial.
  template <class U>
  auto compose(std::span<const Series<U>> args) const {
    using R = decltype(T{} * U{});
    if (static_cast<int>(args.size()) != nvars())
      throw ShapeError("compose: argument count mismatch");
    for (const auto& a : args)
      if (!a.same_shape(args[0])) throw ShapeError("compose: argument shape mismatch");
    const int out_vars = args[0].nvars();
    const int out_order = args[0].order();
    std::array<std::vector<Series<R>>, kMaxVars> powers;
    for (int v = 0; v < nvars(); ++v) {
      Series<R> arg = args[v].template cast<R>();
      powers[v].reserve(order() + 1);
      powers[v].push_back(Series<R>::constant(out_vars, out_order, R(1)));
      for (int p = 1; p <= order(); ++p) powers[v].push_back(powers[v].back() * arg);
    }
    Series<R> out(out_vars, out_order);
    MultiIndex alpha{};
    compose_rec(0, order(), alpha, Series<R>::constant(out_vars, out_order, R(1)), powers,
                out);
    out.check_finite("compose");
    return out;
  }

  template <class U>
  Series<U> cast() const {
    Series<U> out(nvars(), order());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if constexpr (std::is_same_v<U, T>) {
        out.coeffs_[i] = coeffs_[i];
      } else if constexpr (std::is_same_v<U, Complex>) {
        out.coeffs_[i] = Complex(coeffs_[i]);
      } else {
        static_assert(std::is_same_v<U, T>, "narrowing series cast");
      }
    }
    return out;
  }

  bool is_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const T& c) { return detail::is_finite_value(c); });
  }

 private:
  template <class>
  friend class Series;
  template <class U>
  friend Series<double> real_part(const Series<U>&);
  template <class U>
  friend Series<double> imag_part(const Series<U>&);

  template <class R>
  void compose_rec(int var, int remaining, MultiIndex& alpha, const Series<R>& prefix,
                   const std::array<std::vector<Series<R>>, kMaxVars>& powers,
                   Series<R>& out) const {
    for (int e = 0; e <= remaining; ++e) {
      alpha[var] = e;
      if (var == nvars() - 1) {
        // last variable: skip the prefix product when the coefficient is zero
        const T c = coeffs_[table_->index_of(alpha)];
        if (c != T{}) {
          const Series<R> term = e == 0 ? prefix : prefix * powers[var][e];
          for (std::size_t i = 0; i < out.size(); ++i) out.coeffs_[i] += R(c) * term.coeffs_[i];
        }
      } else {
        compose_rec(var + 1, remaining - e, alpha, e == 0 ? prefix : prefix * powers[var][e],
                    powers, out);
      }
    }
    alpha[var] = 0;
  }

  void require_shape(const Series& rhs, const char* op) const {
    if (!same_shape(rhs))
      throw ShapeError(std::string("cannot ") + op + " series of different shape");
  }

  Series& check_finite(const char* op) {
    if (!is_finite()) throw NonFinite(std::string("non-finite coefficient after ") + op);
    return *this;
  }

  const detail::MonomialTable* table_ = nullptr;
  std::vector<T> coeffs_;
};

using TruncatedSeries = Series<Complex>;
using RealSeries = Series<double>;

template <class U>
Series<double> real_part(const Series<U>& s) {
  Series<double> out(s.nvars(), s.order());
  for (std::size_t i = 0; i < s.size(); ++i) out.coeffs_[i] = std::real(s[i]);
  return out;
}

template <class U>
Series<double> imag_part(const Series<U>& s) {
  Series<double> out(s.nvars(), s.order());
  for (std::size_t i = 0; i < s.size(); ++i) out.coeffs_[i] = std::imag(s[i]);
  return out;
}

inline TruncatedSeries make_complex(const RealSeries& re, const RealSeries& im) {
  return re.cast<Complex>() + im.cast<Complex>() * Complex(0.0, 1.0);
}

/// seed_variable: basepoint + X_index.
inline TruncatedSeries seed_variable(int index, double basepoint, int nvars,
                                     int order = kDefaultOrder) {
  return TruncatedSeries::variable(index, basepoint, nvars, order);
}

/// Composes a univariate Taylor expansion about the constant term:
/// sum_n taylor[n] * h^n with h = s - s(0). taylor.size() must exceed order.
template <class T>
Series<T> compose_univariate(const Series<T>& s, std::span<const T> taylor) {
  Series<T> h = s;
  h.add_constant(-s.constant_term());
  const int n = s.order();
  Series<T> acc = Series<T>::constant(s.nvars(), n, taylor[n]);
  for (int k = n - 1; k >= 0; --k) {
    acc = acc * h;
    acc.add_constant(taylor[k]);
  }
  return acc;
}

enum class Elementary { Sin, Cos, Exp, Neg, Recip };

/// series_elementary: f(s) expanded about the constant term of s.
template <class T>
Series<T> elementary(Elementary fn, const Series<T>& s) {
  if (fn == Elementary::Neg) return -s;
  const T c0 = s.constant_term();
  const int n = s.order();
  std::vector<T> taylor(n + 1);
  switch (fn) {
    case Elementary::Sin:
    case Elementary::Cos: {
      // derivative cycle of sin: sin, cos, -sin, -cos
      const T sv = std::sin(c0), cv = std::cos(c0);
      const std::array<T, 4> cycle = fn == Elementary::Sin ? std::array<T, 4>{sv, cv, -sv, -cv}
                                                           : std::array<T, 4>{cv, -sv, -cv, sv};
      for (int k = 0; k <= n; ++k) taylor[k] = cycle[k % 4] / detail::factorial(k);
      break;
    }
    case Elementary::Exp: {
      const T e = std::exp(c0);
      for (int k = 0; k <= n; ++k) taylor[k] = e / detail::factorial(k);
      break;
    }
    case Elementary::Recip: {
      if (!(std::abs(c0) > kDivisionGuard))
        throw DivisionNearZero("reciprocal of series with constant term near zero");
      const T inv = T(1) / c0;
      T p = inv;
      for (int k = 0; k <= n; ++k) {
        taylor[k] = p;
        p *= -inv;
      }
      break;
    }
    case Elementary::Neg:
      break;
  }
  for (const T& t : taylor)
    if (!detail::is_finite_value(t)) throw NonFinite("non-finite elementary function value");
  return compose_univariate<T>(s, taylor);
}

template <class T>
Series<T> sin(const Series<T>& s) { return elementary(Elementary::Sin, s); }
template <class T>
Series<T> cos(const Series<T>& s) { return elementary(Elementary::Cos, s); }
template <class T>
Series<T> exp(const Series<T>& s) { return elementary(Elementary::Exp, s); }
template <class T>
Series<T> reciprocal(const Series<T>& s) { return elementary(Elementary::Recip, s); }

template <class T>
Series<T> operator/(const Series<T>& lhs, const Series<T>& rhs) {
  return lhs * reciprocal(rhs);
}

/// Non-negative integer power by repeated squaring.
template <class T>
Series<T> pow(const Series<T>& base, int exponent) {
  if (exponent < 0) throw BadParameter("negative series exponent");
  Series<T> result = Series<T>::constant(base.nvars(), base.order(), T(1));
  Series<T> b = base;
  while (exponent > 0) {
    if (exponent & 1) result = result * b;
    exponent >>= 1;
    if (exponent) b = b * b;
  }
  return result;
}

}  // namespace vortex_atlas
