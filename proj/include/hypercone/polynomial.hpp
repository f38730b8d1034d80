#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hypercone {

using Exponents = std::vector<int>;

struct Monomial {
  Exponents exp;
  double coef = 0.0;
};

struct HomogeneityReport {
  std::optional<int> degree;      // set when every term has the same total degree
  std::vector<Monomial> violators;  // terms whose total degree differs from the max
};

// Sparse multivariate polynomial with real coefficients. Terms are keyed by
// their exponent vector; the map ordering makes every traversal (evaluation,
// serialization, arithmetic) deterministic.
class Polynomial {
 public:
  static constexpr int kMaxDegree = 12;
  static constexpr int kMaxDim = 64;
  // Merged coefficients below kMergeEps * (max input coefficient magnitude)
  // are dropped so that cancellation noise never masquerades as a term.
  static constexpr double kMergeEps = 1e-14;

  explicit Polynomial(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("polynomial dimension must be in [1, " +
                                  std::to_string(kMaxDim) + "], got " + std::to_string(dim));
  }

  int dim() const { return dim_; }
  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Exponents, double>& terms() const { return terms_; }

  int degree() const {
    int n = 0;
    for (const auto& [exp, c] : terms_) n = std::max(n, total_degree(exp));
    return n;
  }

  void add_term(const Exponents& exp, double coef) {
    if (static_cast<int>(exp.size()) != dim_)
      throw std::invalid_argument("exponent vector has length " + std::to_string(exp.size()) +
                                  ", expected " + std::to_string(dim_));
    for (int e : exp)
      if (e < 0) throw std::invalid_argument("negative exponent");
    if (total_degree(exp) > kMaxDegree)
      throw std::invalid_argument("term degree exceeds cap " + std::to_string(kMaxDegree));
    if (!std::isfinite(coef)) throw std::invalid_argument("non-finite coefficient");
    auto [it, inserted] = terms_.try_emplace(exp, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    } else if (coef == 0.0) {
      terms_.erase(it);
    }
  }

  // Drops terms whose magnitude fell below the merge threshold. Called after
  // bulk arithmetic; safe to call anytime.
  Polynomial& prune() {
    const double cutoff = kMergeEps * max_abs_coef();
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= cutoff)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  double max_abs_coef() const {
    double m = 0.0;
    for (const auto& [exp, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  // Summation runs in sorted exponent-key order, so repeated evaluations of
  // the same polynomial at the same point produce identical bits.
  double evaluate(const Eigen::VectorXd& x) const {
    check_point(x);
    double acc = 0.0;
    for (const auto& [exp, c] : terms_) {
      double term = c;
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < exp[i]; ++k) term *= x[i];
      acc += term;
    }
    return acc;
  }

  HomogeneityReport homogeneity() const {
    if (terms_.empty()) throw std::domain_error("homogeneity of the empty polynomial is undefined");
    HomogeneityReport rep;
    const int n = degree();
    for (const auto& [exp, c] : terms_)
      if (total_degree(exp) != n) rep.violators.push_back({exp, c});
    if (rep.violators.empty()) rep.degree = n;
    return rep;
  }

  bool is_homogeneous() const { return homogeneity().degree.has_value(); }

  // d/dt p(x + t u) at t = 0, computed term by term. Degree drops by one.
  Polynomial directional_derivative(const Eigen::VectorXd& u) const {
    check_point(u);
    if (degree() < 1) throw std::domain_error("directional derivative needs degree >= 1");
    Polynomial out(dim_);
    for (const auto& [exp, c] : terms_) {
      for (int i = 0; i < dim_; ++i) {
        if (exp[i] == 0 || u[i] == 0.0) continue;
        Exponents d = exp;
        d[i] -= 1;
        out.add_term(d, c * exp[i] * u[i]);
      }
    }
    out.prune();
    return out;
  }

  // Coefficients c[0..n] of t -> p(t e - x), ascending powers. The polynomial
  // is sampled at the integer nodes t = 0..n and rebuilt through Newton
  // divided differences; integer data stays exact along the way. The leading
  // coefficient equals p(e).
  std::vector<double> restrict_univariate(const Eigen::VectorXd& e,
                                          const Eigen::VectorXd& x) const {
    check_point(e);
    check_point(x);
    auto rep = homogeneity();
    if (!rep.degree)
      throw std::domain_error("univariate restriction requires a homogeneous polynomial");
    const int n = *rep.degree;
    const double pe = evaluate(e);
    if (std::abs(pe) <= 1e-10 * std::max(1.0, max_abs_coef()))
      throw std::domain_error("p(e) vanishes; direction is not admissible");

    std::vector<double> dd(n + 1);
    for (int k = 0; k <= n; ++k) dd[k] = evaluate(double(k) * e - x);
    // In-place divided differences over nodes 0..n.
    for (int level = 1; level <= n; ++level)
      for (int k = n; k >= level; --k) dd[k] = (dd[k] - dd[k - 1]) / double(level);
    // Horner-style expansion of sum_k dd[k] * prod_{j<k} (t - j).
    std::vector<double> coef(n + 1, 0.0);
    coef[0] = dd[n];
    int len = 1;
    for (int k = n - 1; k >= 0; --k) {
      coef.insert(coef.begin(), 0.0);
      coef.pop_back();
      ++len;
      for (int j = 0; j + 1 < len; ++j) coef[j] -= double(k) * coef[j + 1];
      coef[0] += dd[k];
    }
    return coef;
  }

  // Sum of all squarefree monomials of total degree k in d variables.
  static Polynomial elementary_symmetric(int d, int k) {
    if (k < 1 || k > d) throw std::invalid_argument("elementary symmetric needs 1 <= k <= d");
    Polynomial p(d);
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      Exponents exp(d, 0);
      for (int i : pick) exp[i] = 1;
      p.add_term(exp, 1.0);
      int i = k - 1;
      while (i >= 0 && pick[i] == d - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return p;
  }

  // The linear form x_i, handy for assembling product exemplars.
  static Polynomial linear_form(int d, const Eigen::VectorXd& coefs) {
    Polynomial p(d);
    for (int i = 0; i < d; ++i) {
      if (coefs[i] == 0.0) continue;
      Exponents exp(d, 0);
      exp[i] = 1;
      p.add_term(exp, coefs[i]);
    }
    return p;
  }

  Polynomial operator+(const Polynomial& o) const {
    require_same_dim(o);
    Polynomial out = *this;
    for (const auto& [exp, c] : o.terms_) out.add_term(exp, c);
    out.prune();
    return out;
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }

  Polynomial operator*(double s) const {
    Polynomial out(dim_);
    if (s == 0.0) return out;
    for (const auto& [exp, c] : terms_) out.add_term(exp, c * s);
    return out;
  }

  Polynomial operator*(const Polynomial& o) const {
    require_same_dim(o);
    Polynomial out(dim_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        Exponents e = ea;
        for (int i = 0; i < dim_; ++i) e[i] += eb[i];
        out.add_term(e, ca * cb);
      }
    out.prune();
    return out;
  }

  static int total_degree(const Exponents& exp) {
    int s = 0;
    for (int e : exp) s += e;
    return s;
  }

 private:
  void check_point(const Eigen::VectorXd& x) const {
    if (x.size() != dim_)
      throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(dim_));
  }
  void require_same_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  int dim_;
  std::map<Exponents, double> terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

}  // namespace hypercone
