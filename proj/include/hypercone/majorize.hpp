#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hypercone/frames.hpp"
#include "hypercone/system.hpp"

namespace hypercone {

// ---------------------------------------------------------------------------
// Classical majorization on real vectors
// ---------------------------------------------------------------------------

struct MajorizationCheck {
  bool ok = false;
  double min_prefix_slack = 0.0;  // min over k < n of (sum_k v - sum_k u), sorted desc
  double total_gap = 0.0;         // |sum u - sum v|
};

inline MajorizationCheck check_majorization(Eigen::VectorXd u, Eigen::VectorXd v, double tol) {
  if (u.size() != v.size()) throw std::invalid_argument("majorization needs equal lengths");
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  MajorizationCheck rep;
  double su = 0.0, sv = 0.0;
  rep.min_prefix_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < u.size(); ++k) {
    su += u[k];
    sv += v[k];
    if (k + 1 < u.size()) rep.min_prefix_slack = std::min(rep.min_prefix_slack, sv - su);
  }
  if (u.size() <= 1) rep.min_prefix_slack = 0.0;
  rep.total_gap = std::abs(su - sv);
  rep.ok = rep.min_prefix_slack >= -tol && rep.total_gap <= tol;
  return rep;
}

// u is majorized by v: every prefix of sorted-descending u is dominated by
// the corresponding prefix of v, with equal totals.
inline bool majorizes(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double tol = 1e-9) {
  return check_majorization(u, v, tol).ok;
}

// ---------------------------------------------------------------------------
// Doubly stochastic matrices
// ---------------------------------------------------------------------------

struct DSMatrixCheck {
  bool ok = false;
  double min_entry = 0.0;
  double max_row_gap = 0.0;  // worst |row sum - 1|
  double max_col_gap = 0.0;
};

inline constexpr double kDSEntryFloor = -1e-12;
inline constexpr double kDSSumTol = 1e-9;

inline DSMatrixCheck check_ds_matrix(const Eigen::MatrixXd& m) {
  DSMatrixCheck rep;
  if (m.rows() != m.cols() || m.rows() == 0) return rep;
  rep.min_entry = m.minCoeff();
  rep.max_row_gap = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
  rep.max_col_gap = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
  rep.ok = rep.min_entry >= kDSEntryFloor && rep.max_row_gap <= kDSSumTol &&
           rep.max_col_gap <= kDSSumTol;
  return rep;
}

// ---------------------------------------------------------------------------
// Tuples of cone elements
// ---------------------------------------------------------------------------

// Ordered tuple of points; a doubly stochastic tuple has exactly n of them.
struct ETuple {
  std::vector<Eigen::VectorXd> elements;

  int size() const { return static_cast<int>(elements.size()); }
};

struct ETupleReport {
  bool ok = false;
  std::string reason;
  double max_trace_gap = 0.0;  // worst |tr(a_i) - 1|
  double sum_gap = 0.0;        // ||sum a_i - e||_inf
  double worst_cone_margin = 0.0;
};

// e-doubly stochastic tuple: n cone elements of unit trace summing to e.
inline ETupleReport verify_e_ds_tuple(const SystemDef& sys, const ETuple& a) {
  ETupleReport rep;
  if (a.size() != sys.degree()) {
    rep.reason = "tuple must contain exactly " + std::to_string(sys.degree()) + " elements";
    return rep;
  }
  rep.worst_cone_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.size(); ++i) {
    if (a.elements[i].size() != sys.dim())
      throw std::invalid_argument("tuple element dimension mismatch");
    const auto cone = cone_membership(sys, a.elements[i]);
    rep.worst_cone_margin = std::min(rep.worst_cone_margin, cone.margin);
    if (cone.status == ConeStatus::Outside) {
      rep.reason = "element " + std::to_string(i) + " lies outside the closed cone";
      return rep;
    }
    rep.max_trace_gap =
        std::max(rep.max_trace_gap, std::abs(trace_of(sys, a.elements[i]) - 1.0));
  }
  if (rep.max_trace_gap > 1e-8) {
    rep.reason = "an element's trace deviates from 1";
    return rep;
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(sys.dim());
  for (const auto& ai : a.elements) sum += ai;
  rep.sum_gap = (sum - sys.direction()).cwiseAbs().maxCoeff();
  if (rep.sum_gap > 1e-8) {
    rep.reason = "tuple sum deviates from the distinguished direction";
    return rep;
  }
  rep.ok = true;
  return rep;
}

struct LambdaTupleReport {
  bool ok = false;
  double worst_slack = 0.0;  // most negative prefix slack over all subsets
  double worst_total_gap = 0.0;
  std::uint32_t worst_subset = 0;  // bitmask of the offending index set
  int subsets_checked = 0;
};

// lambda-doubly stochastic tuple: for every nonempty subset of indices, the
// spectrum of the subset sum is majorized by the 0/1 pattern with that many
// ones. Enumeration is exponential, hence the cap.
inline LambdaTupleReport verify_lambda_ds_tuple(const SystemDef& sys, const ETuple& a,
                                                int cap = 15, double tol = 1e-7) {
  const int n = a.size();
  if (n != sys.degree())
    throw std::invalid_argument("tuple must contain exactly n elements");
  if (n > cap) throw std::invalid_argument("tuple too large for subset enumeration cap");
  for (const auto& ai : a.elements)
    if (ai.size() != sys.dim()) throw std::invalid_argument("tuple element dimension mismatch");
  LambdaTupleReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  rep.ok = true;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(sys.dim());
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += a.elements[i];
        ++k;
      }
    Eigen::VectorXd pattern = Eigen::VectorXd::Zero(sys.degree());
    pattern.head(k).setOnes();
    const auto check = check_majorization(eigenvalues(sys, sum).values, pattern, tol);
    ++rep.subsets_checked;
    rep.worst_total_gap = std::max(rep.worst_total_gap, check.total_gap);
    if (check.min_prefix_slack < rep.worst_slack) {
      rep.worst_slack = check.min_prefix_slack;
      if (!check.ok) rep.worst_subset = mask;
    }
    if (!check.ok) rep.ok = false;
  }
  return rep;
}

struct EdsLdsReport {
  ETupleReport eds;
  LambdaTupleReport lds;
  bool implication_holds = false;  // e-DS verified and lambda-DS verified
};

// Every e-doubly stochastic tuple is lambda-doubly stochastic. (The converse
// needs completeness and is exercised in tests.)
inline EdsLdsReport eds_implies_lds_check(const SystemDef& sys, const ETuple& a, int cap = 15) {
  EdsLdsReport rep;
  rep.eds = verify_e_ds_tuple(sys, a);
  if (!rep.eds.ok) return rep;
  rep.lds = verify_lambda_ds_tuple(sys, a, cap);
  rep.implication_holds = rep.lds.ok;
  return rep;
}

struct GramReport {
  Eigen::MatrixXd gram;
  DSMatrixCheck ds;
};

// The Gram matrix of an e-doubly stochastic tuple is doubly stochastic.
inline GramReport gram_matrix(const SystemDef& sys, const ETuple& a) {
  GramReport rep;
  const int n = a.size();
  rep.gram.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      rep.gram(i, j) = semi_inner_product(sys, a.elements[i], a.elements[j]);
      rep.gram(j, i) = rep.gram(i, j);
    }
  rep.ds = check_ds_matrix(rep.gram);
  return rep;
}

struct EigenMatrixReport {
  Eigen::MatrixXd m;  // column j is lambda(a_j)
  bool column_stochastic = false;
  bool row_stochastic = false;
  // Row stochasticity forces every entry to 1/n; gap from that constant.
  double rigidity_gap = 0.0;
  bool rigidity_ok = true;
};

inline EigenMatrixReport eigen_matrix(const SystemDef& sys, const ETuple& a) {
  EigenMatrixReport rep;
  const int n = a.size();
  rep.m.resize(sys.degree(), n);
  for (int j = 0; j < n; ++j) rep.m.col(j) = eigenvalues(sys, a.elements[j]).values;
  rep.column_stochastic = rep.m.minCoeff() >= -1e-9 &&
                          (rep.m.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8;
  rep.row_stochastic = (rep.m.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8;
  if (rep.row_stochastic) {
    rep.rigidity_gap = (rep.m.array() - 1.0 / double(n)).abs().maxCoeff();
    rep.rigidity_ok = rep.rigidity_gap <= 1e-8;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Hardy-Littlewood-Polya transfer matrices
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> descending_order(const Eigen::VectorXd& v) {
  std::vector<int> idx(v.size());
  for (int i = 0; i < v.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace detail

// Doubly stochastic D with D v = u, built as a product of at most n-1
// T-transforms (convex combinations of the identity and a transposition).
// Each transform matches one more entry of the working vector to the target.
inline Eigen::MatrixXd hlp_transfer(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw std::invalid_argument("transfer needs equal lengths");
  if (!majorizes(u, v, 1e-9))
    throw std::invalid_argument("target vector is not majorized by the source");
  const int n = static_cast<int>(u.size());
  const auto perm_u = detail::descending_order(u);
  const auto perm_v = detail::descending_order(v);
  Eigen::VectorXd us(n), w(n);
  for (int i = 0; i < n; ++i) {
    us[i] = u[perm_u[i]];
    w[i] = v[perm_v[i]];
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  const double scale = 1.0 + us.cwiseAbs().maxCoeff() + w.cwiseAbs().maxCoeff();
  const double matched = 1e-12 * scale;
  for (int step = 0; step < 2 * n; ++step) {
    int j = -1;
    for (int i = 0; i < n; ++i)
      if (std::abs(w[i] - us[i]) > matched) {
        j = i;
        break;
      }
    if (j < 0) break;
    // The deficit must be meaningful: an entry a rounding error below its
    // target would give delta ~ machine epsilon, so tau rounds to 1 and the
    // transform degenerates to the identity, stalling the loop.
    int k = -1;
    for (int i = j + 1; i < n; ++i)
      if (us[i] - w[i] > matched) {
        k = i;
        break;
      }
    if (k < 0) break;  // residual is pure rounding; verified below
    const double delta = std::min(w[j] - us[j], us[k] - w[k]);
    const double tau = 1.0 - delta / (w[j] - w[k]);
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t(j, j) = tau;
    t(k, k) = tau;
    t(j, k) = 1.0 - tau;
    t(k, j) = 1.0 - tau;
    w = t * w;
    d = t * d;
  }
  // Undo the sorting permutations: D = P_u^T D_sorted P_v.
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) full(perm_u[r], perm_v[c]) = d(r, c);
  if ((full * v - u).cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("transfer-matrix construction failed to reach the target");
  return full;
}

// b_i = sum_j d_ij a_j. Mixing an e-doubly stochastic tuple through a doubly
// stochastic matrix yields another e-doubly stochastic tuple.
struct MixedTuple {
  ETuple tuple;
  ETupleReport eds;
};

inline MixedTuple mix_tuple(const SystemDef& sys, const ETuple& a, const Eigen::MatrixXd& d) {
  if (d.rows() != a.size() || d.cols() != a.size())
    throw std::invalid_argument("mixing matrix shape must match tuple size");
  MixedTuple out;
  for (int i = 0; i < a.size(); ++i) {
    Eigen::VectorXd bi = Eigen::VectorXd::Zero(sys.dim());
    for (int j = 0; j < a.size(); ++j) bi += d(i, j) * a.elements[j];
    out.tuple.elements.push_back(bi);
  }
  out.eds = verify_e_ds_tuple(sys, out.tuple);
  return out;
}

// ---------------------------------------------------------------------------
// Doubly stochastic linear maps
// ---------------------------------------------------------------------------

// Matrix of the map x -> sum_i sum_j d_ij <x, a_j> c_i, assembled over the
// standard basis: T = C D W with C = [c_1 ... c_n] and W_jl = <a_j, basis_l>.
inline Eigen::MatrixXd build_T(const SystemDef& sys, const FrameSet& f, const ETuple& a,
                               const Eigen::MatrixXd& d) {
  if (f.k() != a.size() || d.rows() != f.k() || d.cols() != f.k())
    throw std::invalid_argument("frame, tuple, and matrix sizes must agree");
  const int dim = sys.dim();
  const int n = f.k();
  Eigen::MatrixXd c(dim, n);
  for (int i = 0; i < n; ++i) c.col(i) = f.elements[i];
  Eigen::MatrixXd w(n, dim);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < dim; ++l) {
      Eigen::VectorXd basis = Eigen::VectorXd::Zero(dim);
      basis[l] = 1.0;
      w(j, l) = semi_inner_product(sys, a.elements[j], basis);
    }
  return c * d * w;
}

// Diag(x) = sum_i <x, c_i> c_i, the frame-coordinate projection.
inline Eigen::MatrixXd diag_operator(const SystemDef& sys, const FrameSet& f) {
  ETuple as_tuple;
  as_tuple.elements = f.elements;
  return build_T(sys, f, as_tuple, Eigen::MatrixXd::Identity(f.k(), f.k()));
}

struct DSMapReport {
  bool ok = false;
  double unital_gap = 0.0;     // ||T e - e||_inf
  double max_trace_gap = 0.0;  // worst |tr(Tx) - tr(x)| over samples
  int cone_failures = 0;       // cone samples mapped outside the cone
  int samples = 0;
  std::optional<Eigen::VectorXd> cone_counterexample;
};

// Doubly stochastic map: unital, trace-preserving, cone-preserving. The cone
// clause is sampled, hence probabilistic.
inline DSMapReport verify_ds_map(const SystemDef& sys, const Eigen::MatrixXd& t, int samples,
                                 std::uint64_t seed) {
  if (t.rows() != sys.dim() || t.cols() != sys.dim())
    throw std::invalid_argument("map shape must match system dimension");
  DSMapReport rep;
  rep.samples = samples;
  rep.unital_gap = (t * sys.direction() - sys.direction()).cwiseAbs().maxCoeff();
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_point(sys, seed, s);
    rep.max_trace_gap =
        std::max(rep.max_trace_gap, std::abs(trace_of(sys, t * x) - trace_of(sys, x)));
    const Eigen::VectorXd y = cone_point(sys, seed, s);
    if (cone_membership(sys, t * y).status == ConeStatus::Outside) {
      ++rep.cone_failures;
      if (!rep.cone_counterexample) rep.cone_counterexample = y;
    }
  }
  rep.ok = rep.unital_gap <= 1e-8 && rep.max_trace_gap <= 1e-7 && rep.cone_failures == 0;
  return rep;
}

struct MajorizationSweep {
  bool ok = false;
  double worst_slack = 0.0;  // most negative prefix slack observed
  double worst_total_gap = 0.0;
  int samples = 0;
  std::optional<Eigen::VectorXd> counterexample;
};

// lambda(T x) is majorized by lambda(x) across seeded samples.
inline MajorizationSweep majorization_test(const SystemDef& sys, const Eigen::MatrixXd& t,
                                           int samples, std::uint64_t seed, double tol = 1e-7) {
  if (t.rows() != sys.dim() || t.cols() != sys.dim())
    throw std::invalid_argument("map shape must match system dimension");
  MajorizationSweep rep;
  rep.samples = samples;
  rep.ok = true;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_point(sys, seed, s);
    const auto check =
        check_majorization(eigenvalues(sys, t * x).values, eigenvalues(sys, x).values, tol);
    rep.worst_slack = std::min(rep.worst_slack, check.min_prefix_slack);
    rep.worst_total_gap = std::max(rep.worst_total_gap, check.total_gap);
    if (!check.ok) {
      rep.ok = false;
      if (!rep.counterexample) rep.counterexample = x;
    }
  }
  return rep;
}

struct AdjointSearchReport {
  // The majorization question for the adjoint-style map is open; this search
  // only gathers evidence and never asserts a verdict.
  bool exploratory = true;
  Eigen::MatrixXd s_matrix;
  DSMapReport ds;
  MajorizationSweep sweep;
};

// S(x) = sum_i <x, c_i> a_i: frame coordinates pushed through the tuple.
inline AdjointSearchReport adjoint_S_search(const SystemDef& sys, const FrameSet& f,
                                            const ETuple& a, int samples, std::uint64_t seed) {
  if (f.k() != a.size()) throw std::invalid_argument("frame and tuple sizes must agree");
  const int dim = sys.dim();
  const int n = f.k();
  Eigen::MatrixXd am(dim, n);
  for (int i = 0; i < n; ++i) am.col(i) = a.elements[i];
  Eigen::MatrixXd w(n, dim);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < dim; ++l) {
      Eigen::VectorXd basis = Eigen::VectorXd::Zero(dim);
      basis[l] = 1.0;
      w(i, l) = semi_inner_product(sys, f.elements[i], basis);
    }
  AdjointSearchReport rep;
  rep.s_matrix = am * w;
  rep.ds = verify_ds_map(sys, rep.s_matrix, samples, seed);
  rep.sweep = majorization_test(sys, rep.s_matrix, samples, seed);
  return rep;
}

// Convex combination of random permutation matrices (the Birkhoff form), so
// the result is doubly stochastic by construction up to rounding.
inline Eigen::MatrixXd random_ds_matrix(int n, Rng& rng, int terms = 4) {
  if (n < 1) throw std::invalid_argument("matrix order must be positive");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> w(static_cast<std::size_t>(terms));
  double total = 0.0;
  for (double& wi : w) {
    wi = rng.uniform() + 1e-9;
    total += wi;
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (double wi : w) {
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < n; ++i) d(i, perm[static_cast<std::size_t>(i)]) += wi / total;
  }
  return d;
}

// Random e-doubly stochastic tuple from a Jordan frame: a_i = sum_j m_ij c_j
// with m doubly stochastic. Unit traces, the sum e, and cone membership are
// all inherited from the frame elements.
inline ETuple random_e_ds_tuple(const SystemDef& sys, const FrameSet& f, Rng& rng) {
  const int n = f.k();
  for (const auto& c : f.elements)
    if (std::abs(trace_of(sys, c) - 1.0) > 1e-8)
      throw std::invalid_argument("tuple sampling needs unit-trace frame elements");
  const Eigen::MatrixXd m = random_ds_matrix(n, rng);
  ETuple a;
  a.elements.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd ai = Eigen::VectorXd::Zero(sys.dim());
    for (int j = 0; j < n; ++j) ai += m(i, j) * f.elements[static_cast<std::size_t>(j)];
    a.elements[static_cast<std::size_t>(i)] = std::move(ai);
  }
  return a;
}

struct PairingMatrixReport {
  Eigen::MatrixXd d;  // d_ij = <a_i, T(b_j)>
  DSMatrixCheck ds;
};

// Pairing an e-DS tuple against the image of another under a doubly
// stochastic map yields a doubly stochastic matrix.
inline PairingMatrixReport ds_matrix_from_maps(const SystemDef& sys, const ETuple& a,
                                               const ETuple& b, const Eigen::MatrixXd& t) {
  if (a.size() != b.size()) throw std::invalid_argument("tuples must have equal sizes");
  if (t.rows() != sys.dim() || t.cols() != sys.dim())
    throw std::invalid_argument("map shape must match system dimension");
  PairingMatrixReport rep;
  const int n = a.size();
  rep.d.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rep.d(i, j) = semi_inner_product(sys, a.elements[i], t * b.elements[j]);
  rep.ds = check_ds_matrix(rep.d);
  return rep;
}

}  // namespace hypercone
