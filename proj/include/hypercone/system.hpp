#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "polynomial.hpp"
#include "rng.hpp"
#include "roots.hpp"

namespace hypercone {

struct ToleranceProfile {
  double root_tol = 1e-8;
  double rank_tol = 1e-6;
  double cone_tol = 1e-8;
};

// Spectrum of a point: the roots of t -> p(t e - x), sorted descending.
// realness records how far the worst root sat from the real axis before
// projection (absolute imaginary magnitude).
struct Spectrum {
  Eigen::VectorXd values;
  double realness = 0.0;
  int n() const { return static_cast<int>(values.size()); }
};

using EigenOracle = std::function<Spectrum(const Eigen::VectorXd&)>;

// Raised when a root computation shows the polynomial is not real-rooted in
// the direction e at the witness point.
class HyperbolicityViolation : public std::runtime_error {
 public:
  HyperbolicityViolation(Eigen::VectorXd w, double realness)
      : std::runtime_error("complex roots detected; polynomial is not hyperbolic at this point"),
        witness(std::move(w)),
        relative_realness(realness) {}
  Eigen::VectorXd witness;
  double relative_realness;
};

// A root is treated as off-axis (hyperbolicity violated) when its imaginary
// part exceeds this fraction of 1 + |Re|. Between the root tolerance and this
// threshold the spectrum is still returned, flagged marginal by the finder.
inline constexpr double kRealnessViolation = 1e-6;

// A hyperbolic polynomial system (V, p, e): dim(V) variables, a homogeneous
// polynomial p with p(e) != 0, and the distinguished direction e. Validated
// eagerly; instances are immutable afterwards. An optional oracle supplies
// spectra directly (used by exemplars with closed-form eigenvalues); the
// polynomial path stays available for cross-checking.
class SystemDef {
 public:
  SystemDef(Polynomial poly, Eigen::VectorXd direction, ToleranceProfile tol = {},
            EigenOracle oracle = {})
      : poly_(std::move(poly)), e_(std::move(direction)), tol_(tol), oracle_(std::move(oracle)) {
    if (e_.size() != poly_.dim()) throw std::invalid_argument("direction dimension mismatch");
    auto rep = poly_.homogeneity();
    if (!rep.degree) {
      std::string msg = "polynomial is not homogeneous; offending exponent sums:";
      for (const auto& v : rep.violators)
        msg += " " + std::to_string(Polynomial::total_degree(v.exp));
      throw std::invalid_argument(msg);
    }
    degree_ = *rep.degree;
    if (degree_ < 1) throw std::invalid_argument("system degree must be at least 1");
    const double pe = poly_.evaluate(e_);
    if (std::abs(pe) <= 1e-10 * std::max(1.0, poly_.max_abs_coef()))
      throw std::invalid_argument("p(e) vanishes; e is not an admissible direction");
    // lambda(e) must be the all-ones vector.
    const auto coef = poly_.restrict_univariate(e_, e_);
    const auto rr = all_roots(coef, tol_.root_tol);
    for (int i = 0; i < rr.roots.size(); ++i)
      if (std::abs(rr.roots[i] - 1.0) > tol_.root_tol)
        throw std::invalid_argument("spectrum of e deviates from the all-ones vector");
    if (oracle_) {
      const Spectrum se = oracle_(e_);
      if (se.n() != degree_) throw std::invalid_argument("oracle spectrum length mismatch");
      for (int i = 0; i < se.n(); ++i)
        if (std::abs(se.values[i] - 1.0) > tol_.root_tol)
          throw std::invalid_argument("oracle spectrum of e deviates from the all-ones vector");
    }
  }

  int dim() const { return poly_.dim(); }
  int degree() const { return degree_; }
  const Polynomial& poly() const { return poly_; }
  const Eigen::VectorXd& direction() const { return e_; }
  const ToleranceProfile& tol() const { return tol_; }
  bool has_oracle() const { return static_cast<bool>(oracle_); }
  const EigenOracle& oracle() const { return oracle_; }

 private:
  Polynomial poly_;
  Eigen::VectorXd e_;
  ToleranceProfile tol_;
  EigenOracle oracle_;
  int degree_ = 0;
};

// Same polynomial, new distinguished direction. The oracle is dropped: it
// encodes the eigenvalue map of the original direction only.
inline SystemDef redirect(const SystemDef& sys, const Eigen::VectorXd& d) {
  return SystemDef(sys.poly(), d, sys.tol());
}

inline Spectrum eigenvalues_poly(const SystemDef& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.dim()) throw std::invalid_argument("point dimension mismatch");
  const auto coef = sys.poly().restrict_univariate(sys.direction(), x);
  const auto rep = all_roots(coef, sys.tol().root_tol);
  if (rep.max_excess_imag > kRealnessViolation) throw HyperbolicityViolation(x, rep.max_excess_imag);
  return Spectrum{rep.roots, rep.max_imag};
}

inline Spectrum eigenvalues(const SystemDef& sys, const Eigen::VectorXd& x) {
  if (sys.has_oracle()) {
    if (x.size() != sys.dim()) throw std::invalid_argument("point dimension mismatch");
    return sys.oracle()(x);
  }
  return eigenvalues_poly(sys, x);
}

inline Eigen::VectorXd gaussian_point(const SystemDef& sys, std::uint64_t seed,
                                      std::uint64_t index) {
  Rng rng(seed, index);
  return rng.gaussian_vector(sys.dim());
}

struct HyperbolicityReport {
  bool violation_found = false;
  Eigen::VectorXd witness;
  double max_realness = 0.0;  // worst relative imaginary residual observed
  int samples = 0;
  std::uint64_t seed = 0;
};

// Samples isotropic Gaussian points and reports the first realness violation,
// or a clean verdict with the worst residual seen. Probabilistic by nature.
inline HyperbolicityReport verify_hyperbolic(const SystemDef& sys, int samples,
                                             std::uint64_t seed) {
  HyperbolicityReport rep;
  rep.samples = samples;
  rep.seed = seed;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_point(sys, seed, s);
    const auto coef = sys.poly().restrict_univariate(sys.direction(), x);
    const auto rr = all_roots(coef, sys.tol().root_tol);
    rep.max_realness = std::max(rep.max_realness, rr.max_excess_imag);
    if (rr.max_excess_imag > kRealnessViolation) {
      rep.violation_found = true;
      rep.witness = x;
      return rep;
    }
  }
  return rep;
}

// lambda(x + t e) = lambda(x) + t * ones
inline bool translate_spectrum_check(const SystemDef& sys, const Eigen::VectorXd& x, double t,
                                     double* max_err = nullptr) {
  const Spectrum lx = eigenvalues(sys, x);
  const Spectrum lxt = eigenvalues(sys, x + t * sys.direction());
  double worst = 0.0;
  for (int i = 0; i < lx.n(); ++i) worst = std::max(worst, std::abs(lxt.values[i] - (lx.values[i] + t)));
  if (max_err) *max_err = worst;
  const double scale = 1.0 + lx.values.cwiseAbs().maxCoeff() + std::abs(t);
  return worst <= sys.tol().root_tol * scale;
}

inline double semi_norm(const SystemDef& sys, const Eigen::VectorXd& x) {
  return eigenvalues(sys, x).values.norm();
}

// <x, y> = 1/4 (|lambda(x+y)|^2 - |lambda(x-y)|^2)
inline double semi_inner_product(const SystemDef& sys, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  const double np = eigenvalues(sys, x + y).values.squaredNorm();
  const double nm = eigenvalues(sys, x - y).values.squaredNorm();
  return 0.25 * (np - nm);
}

inline double trace_of(const SystemDef& sys, const Eigen::VectorXd& x) {
  return eigenvalues(sys, x).values.sum();
}

inline int rank_of(const SystemDef& sys, const Eigen::VectorXd& x) {
  const Spectrum s = eigenvalues(sys, x);
  const double cutoff = sys.tol().rank_tol * (1.0 + s.values.cwiseAbs().maxCoeff());
  int r = 0;
  for (int i = 0; i < s.n(); ++i)
    if (std::abs(s.values[i]) > cutoff) ++r;
  return r;
}

// Precomputed Gram matrix of the semi-inner product on the standard basis;
// extends bilinearly. Cross-checked against the direct quarter-difference
// path in the test suite.
class BilinearForm {
 public:
  explicit BilinearForm(const SystemDef& sys) : gram_(sys.dim(), sys.dim()) {
    const int d = sys.dim();
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double g = semi_inner_product(sys, Eigen::VectorXd::Unit(d, i),
                                            Eigen::VectorXd::Unit(d, j));
        gram_(i, j) = g;
        gram_(j, i) = g;
      }
  }

  double ip(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot(gram_ * y);
  }

  const Eigen::MatrixXd& matrix() const { return gram_; }

 private:
  Eigen::MatrixXd gram_;
};

enum class ConeStatus { Interior, Boundary, Outside };

struct ConeVerdict {
  ConeStatus status = ConeStatus::Boundary;
  double margin = 0.0;  // smallest eigenvalue
};

inline ConeVerdict cone_membership(const SystemDef& sys, const Eigen::VectorXd& x) {
  const Spectrum s = eigenvalues(sys, x);
  ConeVerdict v;
  v.margin = s.values[s.n() - 1];
  if (v.margin > sys.tol().cone_tol)
    v.status = ConeStatus::Interior;
  else if (v.margin < -sys.tol().cone_tol)
    v.status = ConeStatus::Outside;
  else
    v.status = ConeStatus::Boundary;
  return v;
}

// x - lambda_min(x) e, which always lands in the cone (boundary when x was
// outside by exactly its smallest eigenvalue).
inline Eigen::VectorXd shift_into_cone(const SystemDef& sys, const Eigen::VectorXd& x) {
  const Spectrum s = eigenvalues(sys, x);
  return x - s.values[s.n() - 1] * sys.direction();
}

// A cone sample: shift a Gaussian point onto the boundary, then push it
// strictly inside along e by u in (0, 2].
inline Eigen::VectorXd cone_point(const SystemDef& sys, std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, index ^ 0xc0'5a'17ULL);
  const Eigen::VectorXd x = rng.gaussian_vector(sys.dim());
  const double u = rng.uniform(0.0, 2.0) + 1e-12;
  return shift_into_cone(sys, x) + u * sys.direction();
}

struct IdempotentClass {
  enum class Kind { None, Idempotent, Primitive } kind = Kind::None;
  int k = 0;  // number of unit eigenvalues when idempotent
};

// Compares lambda(x) against the patterns (1,...,1,0,...,0).
inline IdempotentClass classify_idempotent(const SystemDef& sys, const Eigen::VectorXd& x) {
  const Spectrum s = eigenvalues(sys, x);
  const double tol = sys.tol().root_tol;
  int ones = 0, zeros = 0;
  for (int i = 0; i < s.n(); ++i) {
    if (std::abs(s.values[i] - 1.0) <= tol)
      ++ones;
    else if (std::abs(s.values[i]) <= tol)
      ++zeros;
  }
  IdempotentClass c;
  if (ones >= 1 && ones + zeros == s.n()) {
    c.k = ones;
    c.kind = (ones == 1) ? IdempotentClass::Kind::Primitive : IdempotentClass::Kind::Idempotent;
  }
  return c;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// The m-th derivative system: p differentiated m times along e, rescaled so
// its value at e is binom(n, m). Roots are scale-invariant, so the rescaling
// only keeps coefficients from growing with m; for the elementary symmetric
// family it reproduces E_{n-m} exactly.
inline SystemDef derivative_system(const SystemDef& sys, int m) {
  const int n = sys.degree();
  if (m < 0 || m > n - 1)
    throw std::invalid_argument("derivative order must lie in [0, degree-1]");
  if (m == 0) return sys;
  Polynomial q = sys.poly();
  for (int k = 0; k < m; ++k) q = q.directional_derivative(sys.direction());
  const double qe = q.evaluate(sys.direction());
  if (qe == 0.0) throw std::runtime_error("derivative polynomial vanishes at e");
  q = q * (binomial(n, m) / qe);
  return SystemDef(std::move(q), sys.direction(), sys.tol());
}

// lambda'(x) of the first derivative system interlaces lambda(x):
// l_1 >= l'_1 >= l_2 >= ... >= l'_{n-1} >= l_n.
inline bool interlacing_check(const SystemDef& sys, const Eigen::VectorXd& x,
                              double* worst_slack = nullptr) {
  if (sys.degree() < 2) throw std::invalid_argument("interlacing needs degree >= 2");
  const Spectrum l = eigenvalues(sys, x);
  const SystemDef dsys = derivative_system(sys, 1);
  const Spectrum lp = eigenvalues(dsys, x);
  const double tol = sys.tol().root_tol * (1.0 + l.values.cwiseAbs().maxCoeff());
  double slack = 0.0;
  bool ok = true;
  for (int i = 0; i < lp.n(); ++i) {
    slack = std::max(slack, lp.values[i] - l.values[i]);
    slack = std::max(slack, l.values[i + 1] - lp.values[i]);
    if (lp.values[i] > l.values[i] + tol || l.values[i + 1] > lp.values[i] + tol) ok = false;
  }
  if (worst_slack) *worst_slack = slack;
  return ok;
}

struct CompletenessReport {
  bool witness_found = false;
  Eigen::VectorXd witness;   // unit vector with |lambda| below the witness cut
  double min_seminorm = 0.0;  // smallest |lambda| reached over all starts
  int starts = 0;
  std::uint64_t seed = 0;
};

// Multistart coordinate descent for min |lambda(x)| over the unit sphere.
// A system is complete when lambda(x) = 0 forces x = 0; a unit witness with
// |lambda| < 1e-6 certifies incompleteness, while absence of one is only
// probabilistic evidence of completeness.
inline CompletenessReport probe_completeness(const SystemDef& sys, int starts,
                                             std::uint64_t seed) {
  CompletenessReport rep;
  rep.starts = starts;
  rep.seed = seed;
  rep.min_seminorm = std::numeric_limits<double>::infinity();
  const int d = sys.dim();
  const auto objective = [&](const Eigen::VectorXd& x) { return semi_norm(sys, x); };
  for (int s = 0; s < starts; ++s) {
    Rng rng(seed, s);
    Eigen::VectorXd x = rng.gaussian_vector(d).normalized();
    double best = objective(x);
    double step = 0.5;
    while (step > 1e-8) {
      bool improved = false;
      for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd cand = x + sign * step * Eigen::VectorXd::Unit(d, i);
          cand.normalize();
          const double val = objective(cand);
          if (val < best - 1e-14) {
            best = val;
            x = cand;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (best < rep.min_seminorm) {
      rep.min_seminorm = best;
      if (best < 1e-6) {
        rep.witness_found = true;
        rep.witness = x;
        return rep;
      }
    }
  }
  return rep;
}

struct AutomorphismReport {
  bool holds = false;
  Eigen::VectorXd witness;  // first sample where the property failed
  double max_deviation = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

inline Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& a, int dim) {
  if (a.rows() != dim || a.cols() != dim) throw std::invalid_argument("map dimension mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw std::invalid_argument("linear map is singular");
  return lu.inverse();
}

// Sampled check of lambda(A x) = lambda(x).
inline AutomorphismReport is_system_automorphism(const SystemDef& sys, const Eigen::MatrixXd& a,
                                                 int samples, std::uint64_t seed) {
  checked_inverse(a, sys.dim());
  AutomorphismReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.holds = true;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_point(sys, seed, s);
    const Spectrum lx = eigenvalues(sys, x);
    Spectrum lax;
    try {
      lax = eigenvalues(sys, a * x);
    } catch (const HyperbolicityViolation&) {
      rep.holds = false;
      rep.witness = x;
      rep.max_deviation = std::numeric_limits<double>::infinity();
      return rep;
    }
    const double dev = (lax.values - lx.values).cwiseAbs().maxCoeff();
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev > sys.tol().root_tol * (1.0 + lx.values.cwiseAbs().maxCoeff())) {
      rep.holds = false;
      if (rep.witness.size() == 0) rep.witness = x;
    }
  }
  return rep;
}

// Sampled check that A and A^{-1} both map the closed cone into itself.
inline AutomorphismReport is_cone_automorphism(const SystemDef& sys, const Eigen::MatrixXd& a,
                                               int samples, std::uint64_t seed) {
  const Eigen::MatrixXd inv = checked_inverse(a, sys.dim());
  AutomorphismReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.holds = true;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd c = cone_point(sys, seed, s);
    for (const Eigen::MatrixXd* m : {&a, &inv}) {
      ConeVerdict v;
      try {
        v = cone_membership(sys, (*m) * c);
      } catch (const HyperbolicityViolation&) {
        v.status = ConeStatus::Outside;
        v.margin = -std::numeric_limits<double>::infinity();
      }
      rep.max_deviation = std::max(rep.max_deviation, -v.margin);
      if (v.status == ConeStatus::Outside) {
        rep.holds = false;
        if (rep.witness.size() == 0) rep.witness = c;
      }
    }
  }
  return rep;
}

}  // namespace hypercone
