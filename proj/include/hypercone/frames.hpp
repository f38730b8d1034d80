#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hypercone/system.hpp"

namespace hypercone {

// Ordered list of candidate frame elements. Order matters and repeats are
// allowed: scaled frames may contain proportional elements.
struct FrameSet {
  enum class Kind { Scaled, Jordan };
  std::vector<Eigen::VectorXd> elements;
  Kind kind = Kind::Scaled;

  int k() const { return static_cast<int>(elements.size()); }
};

enum class FrameVerdict { Verified, Rejected };

struct FrameReport {
  FrameVerdict verdict = FrameVerdict::Rejected;
  std::string reason;  // populated on rejection
  std::vector<Eigen::VectorXd> element_spectra;
  std::vector<int> element_ranks;
  Eigen::VectorXd sum_spectrum;
  Eigen::MatrixXd gram;          // pairwise semi-inner products
  double sum_margin = 0.0;       // lambda_min of the element sum
  double sum_direction_gap = 0.0;  // ||sum - e||_inf (Jordan claims)
  double gram_identity_gap = 0.0;  // ||gram - I||_max (Jordan claims)
  int k = 0;
  int n = 0;
  // A verified frame whose shape contradicts the structure theory: a scaled
  // frame needs k >= n, a Jordan frame forces k == n and an identity Gram
  // matrix. Surfaced as a flag so the contradiction fails tests loudly
  // instead of being silently repaired.
  bool theorem_violation = false;

  bool verified() const { return verdict == FrameVerdict::Verified; }
};

namespace detail {

inline void require_frame_dims(const SystemDef& sys, const FrameSet& f) {
  if (f.elements.empty()) throw std::invalid_argument("frame must contain at least one element");
  for (const auto& c : f.elements)
    if (c.size() != sys.dim()) throw std::invalid_argument("frame element dimension mismatch");
}

inline Eigen::VectorXd frame_sum(const FrameSet& f) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(f.elements.front().size());
  for (const auto& c : f.elements) s += c;
  return s;
}

inline Eigen::MatrixXd frame_gram(const SystemDef& sys, const FrameSet& f) {
  const int k = f.k();
  Eigen::MatrixXd g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      g(i, j) = semi_inner_product(sys, f.elements[i], f.elements[j]);
      g(j, i) = g(i, j);
    }
  return g;
}

}  // namespace detail

// Scaled Jordan frame: every element is a rank-one member of the closed cone
// and the element sum lies in the open cone. A verified frame must have
// k >= n; smaller frames contradict the trace identity sum(alpha_i) = n with
// alpha_i <= 1 and are flagged as theorem violations.
inline FrameReport verify_scaled_frame(const SystemDef& sys, const FrameSet& f) {
  detail::require_frame_dims(sys, f);
  FrameReport rep;
  rep.k = f.k();
  rep.n = sys.degree();
  for (int i = 0; i < f.k(); ++i) {
    const Spectrum s = eigenvalues(sys, f.elements[i]);
    rep.element_spectra.push_back(s.values);
    rep.element_ranks.push_back(rank_of(sys, f.elements[i]));
    const double lmin = s.values[s.n() - 1];
    if (lmin < -sys.tol().cone_tol) {
      rep.reason = "element " + std::to_string(i) + " lies outside the closed cone";
      return rep;
    }
    if (rep.element_ranks.back() != 1) {
      rep.reason = "element " + std::to_string(i) + " has rank " +
                   std::to_string(rep.element_ranks.back()) + ", not 1";
      return rep;
    }
  }
  const Eigen::VectorXd d = detail::frame_sum(f);
  rep.sum_spectrum = eigenvalues(sys, d).values;
  const auto cone = cone_membership(sys, d);
  rep.sum_margin = cone.margin;
  if (cone.status != ConeStatus::Interior) {
    rep.reason = "element sum is not in the open cone";
    return rep;
  }
  rep.gram = detail::frame_gram(sys, f);
  rep.verdict = FrameVerdict::Verified;
  if (rep.k < rep.n) rep.theorem_violation = true;
  return rep;
}

// Jordan frame: every element is a primitive idempotent and the elements sum
// to e. A verified frame is necessarily orthonormal with exactly n elements;
// deviations from that consequence are flagged, not repaired.
inline FrameReport verify_jordan_frame(const SystemDef& sys, const FrameSet& f) {
  detail::require_frame_dims(sys, f);
  FrameReport rep;
  rep.k = f.k();
  rep.n = sys.degree();
  for (int i = 0; i < f.k(); ++i) {
    const Spectrum s = eigenvalues(sys, f.elements[i]);
    rep.element_spectra.push_back(s.values);
    rep.element_ranks.push_back(rank_of(sys, f.elements[i]));
    const auto cls = classify_idempotent(sys, f.elements[i]);
    if (cls.kind != IdempotentClass::Kind::Primitive) {
      std::ostringstream msg;
      msg << "element " << i << " is not a primitive idempotent; spectrum (";
      for (int j = 0; j < s.n(); ++j) msg << (j ? ", " : "") << s.values[j];
      msg << ")";
      rep.reason = msg.str();
      return rep;
    }
  }
  const Eigen::VectorXd sum = detail::frame_sum(f);
  rep.sum_direction_gap = (sum - sys.direction()).cwiseAbs().maxCoeff();
  if (rep.sum_direction_gap > 1e-9) {
    rep.reason = "element sum deviates from the distinguished direction";
    return rep;
  }
  rep.sum_spectrum = eigenvalues(sys, sum).values;
  rep.gram = detail::frame_gram(sys, f);
  Eigen::MatrixXd gap = rep.gram - Eigen::MatrixXd::Identity(rep.k, rep.k);
  rep.gram_identity_gap = gap.cwiseAbs().maxCoeff();
  rep.verdict = FrameVerdict::Verified;
  if (rep.k != rep.n || rep.gram_identity_gap > 1e-7) rep.theorem_violation = true;
  return rep;
}

struct ScaledToJordanReport {
  FrameReport scaled;      // verification in the original system
  FrameReport redirected;  // Jordan verification in (V, p, sum)
  bool k_equals_n = false;
  bool jordan_in_redirected = false;
  bool equivalence_holds = false;  // (k == n) <=> Jordan frame in (V, p, d)
};

// A scaled frame has exactly n elements iff it is a Jordan frame of the
// system re-directed at the element sum.
inline ScaledToJordanReport scaled_to_jordan_check(const SystemDef& sys, const FrameSet& f) {
  ScaledToJordanReport rep;
  rep.scaled = verify_scaled_frame(sys, f);
  if (!rep.scaled.verified())
    throw std::invalid_argument("frame is not a scaled Jordan frame: " + rep.scaled.reason);
  const SystemDef moved = redirect(sys, detail::frame_sum(f));
  FrameSet jf = f;
  jf.kind = FrameSet::Kind::Jordan;
  rep.redirected = verify_jordan_frame(moved, jf);
  rep.k_equals_n = (rep.scaled.k == rep.scaled.n);
  rep.jordan_in_redirected = rep.redirected.verified();
  rep.equivalence_holds = (rep.k_equals_n == rep.jordan_in_redirected);
  return rep;
}

struct CombinationReport {
  Eigen::VectorXd point;     // sum r_i c_i
  Eigen::VectorXd computed;  // lambda(point)
  Eigen::VectorXd expected;  // r sorted descending
  double max_err = 0.0;
  bool pass = false;
};

// lambda(sum r_i c_i) equals r sorted descending for a Jordan frame.
inline CombinationReport frame_combination_spectrum(const SystemDef& sys, const FrameSet& f,
                                                    const Eigen::VectorXd& r) {
  detail::require_frame_dims(sys, f);
  if (r.size() != f.k()) throw std::invalid_argument("coefficient count must match frame size");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dim());
  for (int i = 0; i < f.k(); ++i) x += r[i] * f.elements[i];
  CombinationReport rep;
  rep.point = x;
  rep.computed = eigenvalues(sys, x).values;
  rep.expected = r;
  std::sort(rep.expected.data(), rep.expected.data() + rep.expected.size(),
            std::greater<double>());
  rep.max_err = (rep.computed - rep.expected).cwiseAbs().maxCoeff();
  rep.pass = rep.max_err <= sys.tol().root_tol * (1.0 + rep.expected.cwiseAbs().maxCoeff());
  return rep;
}

struct CoordinateReport {
  Eigen::VectorXd coords;  // <x, c_i> for each frame element
  double residual = 0.0;   // ||x - sum coords_i c_i||_2, distance from span(F)
};

// Orthonormal expansion in a Jordan frame. The coordinates are exact when x
// lies in the span of the frame; the residual measures the distance from it.
inline CoordinateReport frame_coordinates(const SystemDef& sys, const FrameSet& f,
                                          const Eigen::VectorXd& x) {
  detail::require_frame_dims(sys, f);
  if (x.size() != sys.dim()) throw std::invalid_argument("point dimension mismatch");
  CoordinateReport rep;
  rep.coords.resize(f.k());
  for (int i = 0; i < f.k(); ++i) rep.coords[i] = semi_inner_product(sys, x, f.elements[i]);
  Eigen::VectorXd back = Eigen::VectorXd::Zero(sys.dim());
  for (int i = 0; i < f.k(); ++i) back += rep.coords[i] * f.elements[i];
  rep.residual = (x - back).norm();
  return rep;
}

// Componentwise product in frame coordinates, mapped back to the ambient
// space: x o y = sum x_i y_i c_i. Together with the semi-inner product this
// makes span(F) a Euclidean Jordan algebra with unit e.
inline Eigen::VectorXd jordan_product(const SystemDef& sys, const FrameSet& f,
                                      const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto cx = frame_coordinates(sys, f, x);
  const auto cy = frame_coordinates(sys, f, y);
  const double allowed = 1e-7;
  if (cx.residual > allowed || cy.residual > allowed)
    throw std::invalid_argument("operand lies outside the span of the frame");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.dim());
  for (int i = 0; i < f.k(); ++i) out += cx.coords[i] * cy.coords[i] * f.elements[i];
  return out;
}

struct MinimalityCertificate {
  bool granted = false;
  std::string reason;  // populated when not granted
  FrameReport frame;
  std::vector<std::string> conclusions;
  // Witness for strict cone growth under differentiation: a point inside the
  // derivative cone but outside the original one. Its absence downgrades the
  // strictness clause to "not witnessed" without withdrawing the certificate.
  bool witness_found = false;
  Eigen::VectorXd witness;
  int witness_samples = 0;
  std::uint64_t seed = 0;
};

// A scaled Jordan frame certifies that p has minimal degree among the
// hyperbolic polynomials generating the same cone; for degree >= 2 the
// derivative polynomial is minimal as well and the cone grows strictly.
inline MinimalityCertificate certify_minimality(const SystemDef& sys, const FrameSet& f,
                                                std::uint64_t seed = 1234,
                                                int witness_samples = 10000) {
  MinimalityCertificate cert;
  cert.seed = seed;
  cert.witness_samples = witness_samples;
  cert.frame = verify_scaled_frame(sys, f);
  if (!cert.frame.verified()) {
    cert.reason = "frame verification failed: " + cert.frame.reason;
    return cert;
  }
  cert.granted = true;
  cert.conclusions.push_back("p is minimal");
  if (sys.degree() >= 2) {
    cert.conclusions.push_back("the derivative polynomial is minimal");
    cert.conclusions.push_back("the cone is strictly contained in the derivative cone");
    const SystemDef deriv = derivative_system(sys, 1);
    Rng rng(seed, fnv1a("minimality-witness"));
    for (int s = 0; s < witness_samples; ++s) {
      const Eigen::VectorXd x = rng.gaussian_vector(sys.dim());
      const auto inner = cone_membership(sys, x);
      if (inner.status != ConeStatus::Outside) continue;
      const auto outer = cone_membership(deriv, x);
      if (outer.status == ConeStatus::Interior) {
        cert.witness_found = true;
        cert.witness = x;
        break;
      }
    }
  }
  return cert;
}

struct PersistenceReport {
  FrameReport in_derivative;           // scaled-frame verification in (V, p^(m), e)
  std::vector<int> derivative_ranks;   // must all be 1
  bool persisted = false;
};

// Every scaled Jordan frame of (V, p, e) stays a scaled Jordan frame of the
// m-fold derivative system (V, p^(m), e), 0 <= m <= n-1.
inline PersistenceReport derivative_persistence_check(const SystemDef& sys, const FrameSet& f,
                                                      int m) {
  const FrameReport base = verify_scaled_frame(sys, f);
  if (!base.verified())
    throw std::invalid_argument("frame is not a scaled Jordan frame: " + base.reason);
  const SystemDef deriv = derivative_system(sys, m);
  PersistenceReport rep;
  rep.in_derivative = verify_scaled_frame(deriv, f);
  rep.derivative_ranks = rep.in_derivative.element_ranks;
  bool ranks_ok = !rep.derivative_ranks.empty();
  for (int r : rep.derivative_ranks) ranks_ok = ranks_ok && (r == 1);
  rep.persisted = rep.in_derivative.verified() && ranks_ok && !rep.in_derivative.theorem_violation;
  return rep;
}

struct DerivativeFrameReport {
  int n = 0;                  // degree of the base system
  FrameReport attempt;        // Jordan verification in (V, p', e)
  bool verified = false;
  // Degree >= 4 derivative systems admit no Jordan frame; a verified
  // candidate there contradicts the structure theory.
  bool contradicts_theory = false;
};

// Tries a candidate Jordan frame in the derivative system (V, p', e). For
// base degree n >= 4 every candidate must fail; n = 3 is the genuine
// exception where the derivative system can carry a Jordan frame.
inline DerivativeFrameReport no_jordan_frame_in_derivative_check(const SystemDef& sys,
                                                                 const FrameSet& candidate) {
  DerivativeFrameReport rep;
  rep.n = sys.degree();
  const SystemDef deriv = derivative_system(sys, 1);
  rep.attempt = verify_jordan_frame(deriv, candidate);
  rep.verified = rep.attempt.verified();
  rep.contradicts_theory = rep.verified && rep.n >= 4;
  return rep;
}

struct OrthogonalSumReport {
  Eigen::VectorXd sum_spectrum;
  int k = 0;
  int n = 0;
  bool spectrum_is_ones_pattern = false;  // lambda(sum) = 1_k
  double max_err = 0.0;
  // Only meaningful when k = n and the system is declared complete.
  std::optional<bool> sum_equals_direction;
  double sum_direction_gap = 0.0;
};

// The sum of k mutually orthogonal primitive idempotents is an idempotent
// with spectrum 1_k and k <= n; for k = n in a complete system the sum is e.
inline OrthogonalSumReport orthogonal_sum_check(const SystemDef& sys, const FrameSet& f,
                                                bool declared_complete = false) {
  detail::require_frame_dims(sys, f);
  const double ip_tol = 1e-7;
  for (int i = 0; i < f.k(); ++i) {
    const auto cls = classify_idempotent(sys, f.elements[i]);
    if (cls.kind != IdempotentClass::Kind::Primitive)
      throw std::invalid_argument("element " + std::to_string(i) +
                                  " is not a primitive idempotent");
    for (int j = 0; j < i; ++j) {
      const double ip = semi_inner_product(sys, f.elements[i], f.elements[j]);
      if (std::abs(ip) > ip_tol)
        throw std::invalid_argument("elements " + std::to_string(j) + " and " +
                                    std::to_string(i) + " are not orthogonal");
    }
  }
  OrthogonalSumReport rep;
  rep.k = f.k();
  rep.n = sys.degree();
  const Eigen::VectorXd sum = detail::frame_sum(f);
  rep.sum_spectrum = eigenvalues(sys, sum).values;
  const auto cls = classify_idempotent(sys, sum);
  rep.spectrum_is_ones_pattern =
      (cls.kind != IdempotentClass::Kind::None) && (cls.k == rep.k) && (rep.k <= rep.n);
  for (int i = 0; i < rep.sum_spectrum.size(); ++i) {
    const double want = (i < rep.k) ? 1.0 : 0.0;
    rep.max_err = std::max(rep.max_err, std::abs(rep.sum_spectrum[i] - want));
  }
  if (rep.k == rep.n && declared_complete) {
    rep.sum_direction_gap = (sum - sys.direction()).cwiseAbs().maxCoeff();
    rep.sum_equals_direction = rep.sum_direction_gap <= 1e-8;
  }
  return rep;
}

}  // namespace hypercone
