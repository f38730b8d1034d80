#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "frames.hpp"
#include "system.hpp"

namespace hypercone {

// ---------------------------------------------------------------------------
// Symmetric-matrix coordinates
//
// An m x m real symmetric matrix is stored over its m(m+1)/2 upper-triangle
// entries in row-major order. Off-diagonal entries are scaled by sqrt(2) so
// the flat Euclidean pairing of two coordinate vectors equals trace(XY); the
// semi-inner product induced by the eigenvalue map then matches the classical
// trace form.
// ---------------------------------------------------------------------------

inline int sym_dim(int m) { return m * (m + 1) / 2; }

namespace detail {

inline int sym_index(int m, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * m - i * (i - 1) / 2 + (j - i);
}

}  // namespace detail

inline Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("matrix must be square");
  const int m = static_cast<int>(x.rows());
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix is not symmetric");
  Eigen::VectorXd v(sym_dim(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      v[detail::sym_index(m, i, j)] =
          i == j ? x(i, i) : std::sqrt(2.0) * 0.5 * (x(i, j) + x(j, i));
  return v;
}

inline Eigen::MatrixXd vec_to_sym(int m, const Eigen::VectorXd& v) {
  if (v.size() != sym_dim(m)) throw std::invalid_argument("coordinate length mismatch");
  Eigen::MatrixXd x(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double entry = v[detail::sym_index(m, i, j)];
      x(i, j) = x(j, i) = i == j ? entry : entry / std::sqrt(2.0);
    }
  return x;
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, sorted
// descending. Hand-rolled so the symmetric systems carry an eigenvalue path
// that is independent of the companion-matrix rootfinder.
inline Spectrum symmetric_eigen_oracle(int m, Eigen::MatrixXd a) {
  if (a.rows() != m || a.cols() != m) throw std::invalid_argument("matrix size mismatch");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix is not symmetric");
  a = 0.5 * (a + a.transpose()).eval();

  const auto off_norm = [&]() {
    double s = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
  };
  const double target = 1e-13 * std::max(1.0, a.norm());
  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (int p = 0; p < m - 1; ++p)
      for (int q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-3 * target) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a(p, q) = a(q, p) = 0.0;
        for (int i = 0; i < m; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = a(p, i) = c * aip - s * aiq;
          a(i, q) = a(q, i) = s * aip + c * aiq;
        }
      }
  }
  if (off_norm() > 1e-12 * std::max(1.0, a.norm()))
    throw std::runtime_error("jacobi iteration failed to converge");

  std::vector<double> vals(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) vals[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  Spectrum sp;
  sp.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), m);
  sp.realness = 0.0;
  return sp;
}

// det(X) expanded symbolically over the scaled upper-triangle coordinates.
inline Polynomial sym_det_polynomial(int m) {
  const int d = sym_dim(m);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Polynomial p(d);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) ++inversions;
    double coef = inversions % 2 == 0 ? 1.0 : -1.0;
    Exponents exp(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < m; ++i) {
      exp[static_cast<std::size_t>(detail::sym_index(m, i, perm[static_cast<std::size_t>(i)]))]++;
      if (i != perm[static_cast<std::size_t>(i)]) coef *= inv_sqrt2;
    }
    p.add_term(exp, coef);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return p;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct KnownSpectrum {
  Eigen::VectorXd point;
  Eigen::VectorXd expected;  // sorted descending
  std::string note;
};

struct Exemplar {
  std::string id;
  std::string summary;
  SystemDef system;
  bool complete = true;  // declared; the test suite spot-checks it
  std::vector<FrameSet> known_frames;
  std::vector<KnownSpectrum> known_spectra;
  // When p is a product of linear forms, the rows l_i with
  // lambda(x) = sorted(l_i . x); used by the algebraic rank-one search.
  std::vector<Eigen::VectorXd> root_functionals;
};

namespace detail {

inline Eigen::VectorXd evec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

inline FrameSet coordinate_frame_set(int dim, FrameSet::Kind kind) {
  FrameSet f;
  f.kind = kind;
  for (int i = 0; i < dim; ++i) f.elements.push_back(Eigen::VectorXd::Unit(dim, i));
  return f;
}

// Re-checks every declared spectrum and frame before the exemplar is handed
// out; a failure here means the catalog's ground truth is wrong.
inline Exemplar validated(Exemplar ex) {
  for (const auto& ks : ex.known_spectra) {
    const Spectrum got = eigenvalues(ex.system, ks.point);
    const double tol = ex.system.tol().root_tol * (1.0 + ks.expected.cwiseAbs().maxCoeff());
    if (got.n() != ks.expected.size() ||
        (got.values - ks.expected).cwiseAbs().maxCoeff() > tol)
      throw std::runtime_error("exemplar " + ex.id + " failed self-validation: " + ks.note);
  }
  for (const auto& f : ex.known_frames) {
    const FrameReport rep = f.kind == FrameSet::Kind::Jordan
                                ? verify_jordan_frame(ex.system, f)
                                : verify_scaled_frame(ex.system, f);
    if (!rep.verified())
      throw std::runtime_error("exemplar " + ex.id + " failed self-validation: declared frame (" +
                               rep.reason + ")");
  }
  return ex;
}

}  // namespace detail

// E_k on R^d in direction 1. Complete exactly when k >= 2; the coordinate
// vectors form a scaled frame (a plain frame when k = d).
inline Exemplar elementary_exemplar(int d, int k) {
  if (d < 1 || k < 1 || k > d)
    throw std::invalid_argument("elementary exemplar needs 1 <= k <= d");
  Exemplar ex{.id = "exR" + std::to_string(d) + "E" + std::to_string(k),
              .summary = "elementary symmetric polynomial of degree " + std::to_string(k) +
                         " on R^" + std::to_string(d),
              .system = SystemDef(Polynomial::elementary_symmetric(d, k),
                                  Eigen::VectorXd::Ones(d)),
              .complete = k >= 2};
  ex.known_frames.push_back(detail::coordinate_frame_set(
      d, k == d ? FrameSet::Kind::Jordan : FrameSet::Kind::Scaled));
  Eigen::VectorXd le1 = Eigen::VectorXd::Zero(k);
  le1[0] = double(k) / double(d);
  ex.known_spectra.push_back({Eigen::VectorXd::Unit(d, 0), le1,
                              "coordinate vector has the single eigenvalue k/d"});
  ex.known_spectra.push_back(
      {Eigen::VectorXd::Ones(d), Eigen::VectorXd::Ones(k), "direction point has spectrum 1"});
  return detail::validated(std::move(ex));
}

// m x m real symmetric matrices, p = det, e = identity, with the Jacobi
// oracle attached as the direct eigenvalue path.
inline Exemplar symmetric_exemplar(int m) {
  if (m < 2 || m > 4) throw std::invalid_argument("symmetric exemplar supports m in {2,3,4}");
  const int d = sym_dim(m);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < m; ++i) e[detail::sym_index(m, i, i)] = 1.0;
  EigenOracle oracle = [m](const Eigen::VectorXd& v) {
    return symmetric_eigen_oracle(m, vec_to_sym(m, v));
  };
  Exemplar ex{.id = "exS" + std::to_string(m),
              .summary = "real symmetric " + std::to_string(m) + "x" + std::to_string(m) +
                         " matrices with p = det and e = identity",
              .system = SystemDef(sym_det_polynomial(m), e, {}, std::move(oracle)),
              .complete = true};
  FrameSet diag;
  diag.kind = FrameSet::Kind::Jordan;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    c[detail::sym_index(m, i, i)] = 1.0;
    diag.elements.push_back(c);
  }
  ex.known_frames.push_back(std::move(diag));
  ex.known_spectra.push_back({e, Eigen::VectorXd::Ones(m), "identity matrix has spectrum 1"});
  {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) x(i, i) = double(m + 1 - i);
    Eigen::VectorXd expect(m);
    for (int i = 0; i < m; ++i) expect[i] = double(m + 1 - i);
    ex.known_spectra.push_back({sym_to_vec(x), expect, "diagonal matrix spectrum is its sorted diagonal"});
  }
  if (m == 2) {
    Eigen::MatrixXd x(2, 2);
    x << 2, 1, 1, 2;
    ex.known_spectra.push_back(
        {sym_to_vec(x), detail::evec({3, 1}), "constant-diagonal 2x2 has eigenvalues 2 +/- 1"});
  }
  return detail::validated(std::move(ex));
}

namespace detail {

inline Exemplar make_ex3_2() {
  Polynomial p(1);
  p.add_term(Exponents{2}, 1.0);
  Exemplar ex{.id = "ex3_2",
              .summary = "p(x) = x^2 on R: doubled line with no rank-one elements",
              .system = SystemDef(p, evec({1})),
              .complete = true};
  ex.known_spectra.push_back({evec({0.5}), evec({0.5, 0.5}), "every value is doubled"});
  ex.known_spectra.push_back({evec({-2}), evec({-2, -2}), "every value is doubled"});
  return validated(std::move(ex));
}

inline Exemplar make_ex3_3() {
  Polynomial p(3);
  p.add_term(Exponents{1, 1, 1}, 1.0);
  Exemplar ex{.id = "ex3_3",
              .summary = "coordinate product x1 x2 x3 on R^3: spectrum is the sorted point",
              .system = SystemDef(p, Eigen::VectorXd::Ones(3)),
              .complete = true};
  ex.known_frames.push_back(coordinate_frame_set(3, FrameSet::Kind::Jordan));
  ex.known_spectra.push_back({evec({3, 1, 2}), evec({3, 2, 1}), "spectrum sorts the coordinates"});
  ex.known_spectra.push_back(
      {evec({1, 0, 0}), evec({1, 0, 0}), "coordinate vectors are primitive idempotents"});
  return validated(std::move(ex));
}

inline Exemplar make_ex3_4() {
  Polynomial p(3);
  p.add_term(Exponents{2, 1, 1}, 1.0);
  Exemplar ex{.id = "ex3_4",
              .summary = "weighted product x1^2 x2 x3 on R^3: first coordinate counted twice",
              .system = SystemDef(p, Eigen::VectorXd::Ones(3)),
              .complete = true};
  ex.known_spectra.push_back(
      {evec({2, -1, 3}), evec({3, 2, 2, -1}), "spectrum sorts (x1, x1, x2, x3)"});
  ex.known_spectra.push_back(
      {evec({1, 0, 0}), evec({1, 1, 0, 0}), "first coordinate vector has rank two"});
  ex.known_spectra.push_back(
      {evec({0, 1, 0}), evec({1, 0, 0, 0}), "second coordinate vector is primitive"});
  return validated(std::move(ex));
}

inline Exemplar make_ex3_5() {
  Polynomial p(3);
  p.add_term(Exponents{1, 1, 0}, 1.0);
  Exemplar ex{.id = "ex3_5",
              .summary = "degenerate product x1 x2 on R^3: the third coordinate is invisible",
              .system = SystemDef(p, Eigen::VectorXd::Ones(3)),
              .complete = false};
  FrameSet f;
  f.kind = FrameSet::Kind::Scaled;
  f.elements.push_back(evec({1, 0, 0}));
  f.elements.push_back(evec({0, 1, 0}));
  ex.known_frames.push_back(std::move(f));
  ex.known_spectra.push_back({evec({4, -2, 7}), evec({4, -2}), "spectrum sorts (x1, x2)"});
  ex.known_spectra.push_back(
      {evec({0, 0, 1}), evec({0, 0}), "a nonzero point with zero spectrum (incomplete)"});
  return validated(std::move(ex));
}

inline Exemplar make_ex3_6() {
  const auto l1 = evec({1, 1, 1});
  const auto l2 = evec({1, -1, 1});
  const auto f3 = evec({2, -1, -1});   // factor of p
  const auto f4 = evec({1, 2, -1});    // factor of p
  Polynomial p = Polynomial::linear_form(3, l1) * Polynomial::linear_form(3, l2) *
                 Polynomial::linear_form(3, f3) * Polynomial::linear_form(3, f4);
  Exemplar ex{.id = "ex3_6",
              .summary = "product of four linear forms on R^3 with no rank-one elements",
              .system = SystemDef(p, evec({0, 0, 1})),
              .complete = true};
  // Roots of t -> p(te - x): the last two factors flip sign relative to the
  // factors of p because e only meets their third coefficient.
  ex.root_functionals = {l1, l2, evec({-2, 1, 1}), evec({-1, -2, 1})};
  ex.known_spectra.push_back(
      {evec({0, 0, 1}), evec({1, 1, 1, 1}), "direction point has spectrum 1"});
  ex.known_spectra.push_back(
      {evec({1, 2, 3}), evec({6, 3, 2, -2}), "spectrum sorts the four functional values"});
  ex.known_spectra.push_back(
      {evec({1, 0, 0}), evec({1, 1, -1, -2}), "first coordinate vector has full rank"});
  return validated(std::move(ex));
}

inline Exemplar make_ex4_4() {
  Exemplar ex = elementary_exemplar(4, 3);
  ex.id = "ex4_4";
  ex.summary =
      "elementary symmetric polynomial of degree 3 on R^4: coordinate vectors form a "
      "scaled frame that is not a plain frame";
  return validated(std::move(ex));
}

inline Exemplar make_exR3E2() {
  Exemplar ex = elementary_exemplar(3, 2);
  ex.id = "exR3E2";
  ex.summary =
      "elementary symmetric polynomial of degree 2 on R^3, carrying a two-element frame";
  FrameSet f;
  f.kind = FrameSet::Kind::Jordan;
  f.elements.push_back(evec({1.5, 0, 0}));
  f.elements.push_back(evec({-0.5, 1, 1}));
  ex.known_frames.push_back(std::move(f));
  ex.known_spectra.push_back(
      {evec({1.5, 0, 0}), evec({1, 0}), "first frame element is a primitive idempotent"});
  ex.known_spectra.push_back(
      {evec({-0.5, 1, 1}), evec({1, 0}), "second frame element is a primitive idempotent"});
  return validated(std::move(ex));
}

}  // namespace detail

// Every built-in system, fully constructed and self-validated.
inline std::vector<Exemplar> catalog() {
  std::vector<Exemplar> out;
  out.push_back(detail::make_ex3_2());
  out.push_back(detail::make_ex3_3());
  out.push_back(detail::make_ex3_4());
  out.push_back(detail::make_ex3_5());
  out.push_back(detail::make_ex3_6());
  out.push_back(detail::make_ex4_4());
  out.push_back(elementary_exemplar(2, 1));
  out.push_back(detail::make_exR3E2());
  out.push_back(elementary_exemplar(4, 2));
  out.push_back(elementary_exemplar(5, 3));
  out.push_back(symmetric_exemplar(2));
  out.push_back(symmetric_exemplar(3));
  out.push_back(symmetric_exemplar(4));
  return out;
}

inline Exemplar find_exemplar(const std::string& id) {
  for (auto& ex : catalog())
    if (ex.id == id) return ex;
  throw std::invalid_argument("unknown exemplar id: " + id);
}

// ---------------------------------------------------------------------------
// Rank-one search
// ---------------------------------------------------------------------------

struct RankOneSearchReport {
  int samples = 0;
  int rank_one_hits = 0;  // sampled points with rank exactly one
  int e_rank = 0;
  bool algebraic_path = false;          // root functionals were available
  std::vector<double> subsystem_dets;   // leave-one-out functional systems (square case)
  bool only_trivial_solutions = false;  // every leave-one-out system pins x = 0
};

// Two-pronged search for rank-one elements: a random sweep counting sampled
// points of rank one, and - when the spectrum comes from linear functionals -
// the algebraic check that zeroing all but one functional forces x = 0, so no
// point can have exactly one nonzero eigenvalue.
inline RankOneSearchReport no_rank_one_search(const Exemplar& ex, int samples,
                                              std::uint64_t seed) {
  RankOneSearchReport rep;
  rep.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = gaussian_point(ex.system, seed, static_cast<std::uint64_t>(i));
    if (rank_of(ex.system, x) == 1) ++rep.rank_one_hits;
  }
  rep.e_rank = rank_of(ex.system, ex.system.direction());
  if (!ex.root_functionals.empty()) {
    rep.algebraic_path = true;
    const int r = static_cast<int>(ex.root_functionals.size());
    const int d = ex.system.dim();
    rep.only_trivial_solutions = true;
    for (int omit = 0; omit < r; ++omit) {
      Eigen::MatrixXd rows(r - 1, d);
      int at = 0;
      for (int i = 0; i < r; ++i) {
        if (i == omit) continue;
        rows.row(at++) = ex.root_functionals[static_cast<std::size_t>(i)].transpose();
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
      if (lu.rank() < d) rep.only_trivial_solutions = false;
      if (r - 1 == d) rep.subsystem_dets.push_back(rows.determinant());
    }
  }
  return rep;
}

}  // namespace hypercone
