#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace hypercone {

struct RootReport {
  Eigen::VectorXd roots;    // real projections, sorted descending
  double max_imag = 0.0;    // worst pre-projection imaginary magnitude
  double max_rel_imag = 0.0;  // worst |Im z| / (1 + |Re z|)
  // Worst imaginary magnitude beyond what a multiple-root split of the
  // cluster's size can explain, relative to 1 + |cluster center|. This is the
  // signal that the polynomial genuinely has complex roots.
  double max_excess_imag = 0.0;
  double max_residual = 0.0;  // worst |q(r)| / sum_k |c_k| |r|^k
  double tol = 0.0;
  double cluster_tol = 0.0;
  bool marginal = false;  // unexplained imaginary mass above tol, below violation
};

namespace detail {

// Parlett-Reinsch balancing with radix-2 scaling. Companion matrices of
// polynomials with large coefficient spread are badly scaled; balancing
// restores eigenvalue accuracy to the order of the root magnitudes.
inline void balance_in_place(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double radix = 2.0;
  bool done = false;
  int guard = 0;
  while (!done && guard++ < 100) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / radix) {
        c *= radix;
        r /= radix;
        f *= radix;
      }
      while (c > r * radix) {
        c /= radix;
        r *= radix;
        f /= radix;
      }
      if ((c + r) < 0.95 * s && f != 1.0) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

inline double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (int k = int(c.size()) - 1; k >= 0; --k) v = v * t + c[k];
  return v;
}

inline double abs_norm_at(const std::vector<double>& c, double t) {
  double v = 0.0, tp = 1.0;
  for (double ck : c) {
    v += std::abs(ck) * std::abs(tp);
    tp *= t;
  }
  return v;
}

inline std::vector<double> derivative_coeffs(const std::vector<double>& c) {
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * double(k);
  return d;
}

// Predicted half-width of the cloud QR scatters an m-fold root into: a
// backward perturbation of size eta * |q| around r moves the root copies by
// about (eta * |q|_r * m! / |q^(m)(r)|)^(1/m). The estimate is capped: a
// genuine scatter stays local, while |q^(m)| can vanish at the mean of
// well-separated roots (inflection points), which would otherwise blow the
// radius up and swallow distinct roots.
inline double predicted_split(const std::vector<std::vector<double>>& derivs,
                              const std::vector<double>& q, std::size_t m, double r) {
  constexpr double kNoiseEps = 1e-14;  // ~50 ulps of backward error
  // The QR backward error perturbs every coefficient at the scale of the
  // largest one, so the noise entering q(r) is at least eps * max|q_k| even
  // when |r| is far below the coefficient scale (roots near zero of a monic
  // polynomial). Both branches of the max scale the same way under t -> s*t,
  // keeping the prediction scale-equivariant.
  double coef_norm = 0.0;
  for (double c : q) coef_norm = std::max(coef_norm, std::abs(c));
  const double norm_r = std::max(abs_norm_at(q, r), coef_norm);
  double mfact = 1.0;
  for (std::size_t i = 2; i <= m; ++i) mfact *= double(i);
  const double qm = std::abs(horner(derivs[m], r));
  const double denom = std::max(qm, 1e-300);
  const double raw = std::pow(kNoiseEps * norm_r * mfact / denom, 1.0 / double(m));
  return std::min(raw, 6e-3 * (1.0 + std::abs(r)));
}

}  // namespace detail

// All roots of q(t) = sum_k coeffs[k] t^k via the balanced companion matrix
// and shifted QR iteration. Exact zero constant terms are deflated first, so
// structured spectra keep their zeros exact. Each root is reported through
// its real projection; max_imag records how far the worst one sat from the
// axis before projection.
//
// QR scatters an m-fold root symmetrically over a disk whose radius follows
// from the backward error, so nearby values are merged back to their mean
// whenever their spread (and imaginary mass) fits the predicted scatter of a
// multiple root at that location. The merged mean is accurate to full
// precision while the individual copies are not. Imaginary parts that no
// multiplicity can explain surface in max_excess_imag, which is what the
// hyperbolicity layer treats as a violation.
inline RootReport all_roots(const std::vector<double>& coeffs, double tol = 1e-8,
                            double cluster_tol = 1e-7) {
  if (coeffs.size() < 2) throw std::invalid_argument("root finding needs degree >= 1");
  double scale = 0.0;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
    scale = std::max(scale, std::abs(c));
  }
  if (scale == 0.0) throw std::invalid_argument("zero polynomial");
  const double lead = coeffs.back();
  if (std::abs(lead) <= 1e-12 * scale)
    throw std::invalid_argument("leading coefficient vanishes relative to coefficient scale");

  RootReport rep;
  rep.tol = tol;
  rep.cluster_tol = cluster_tol;

  std::vector<double> work = coeffs;
  int zeros = 0;
  while (work.size() > 1 && work.front() == 0.0) {
    work.erase(work.begin());
    ++zeros;
  }
  const int m = static_cast<int>(work.size()) - 1;  // remaining degree

  struct Proj {
    double re, im;
  };
  std::vector<Proj> proj;
  proj.reserve(m + zeros);
  for (int i = 0; i < zeros; ++i) proj.push_back({0.0, 0.0});

  if (m >= 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -work[i] / work[m];
    detail::balance_in_place(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("companion eigenvalue iteration failed to converge");
    for (int i = 0; i < m; ++i) {
      const std::complex<double> z = solver.eigenvalues()[i];
      const double im = std::abs(z.imag());
      rep.max_imag = std::max(rep.max_imag, im);
      rep.max_rel_imag = std::max(rep.max_rel_imag, im / (1.0 + std::abs(z.real())));
      proj.push_back({z.real(), im});
    }
  }

  std::sort(proj.begin(), proj.end(), [](const Proj& a, const Proj& b) { return a.re > b.re; });

  // Precompute all derivative coefficient vectors of the full polynomial.
  std::vector<std::vector<double>> derivs;
  derivs.push_back(coeffs);
  while (derivs.back().size() > 1) derivs.push_back(detail::derivative_coeffs(derivs.back()));

  const std::size_t total = proj.size();
  std::vector<double> merged;
  merged.reserve(total);
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = total - 1;
    double radius = 0.0;
    for (; j > i; --j) {
      const std::size_t size = j - i + 1;
      double sum = 0.0;
      for (std::size_t k = i; k <= j; ++k) sum += proj[k].re;
      const double center = sum / double(size);
      radius = 8.0 * detail::predicted_split(derivs, coeffs, size, center) +
               cluster_tol * (1.0 + std::abs(center));
      if (proj[i].re - proj[j].re <= radius) break;
    }
    const std::size_t size = j - i + 1;
    double sum = 0.0, worst_im = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      sum += proj[k].re;
      worst_im = std::max(worst_im, proj[k].im);
    }
    const double mean = sum / double(size);
    const double allowance =
        (size > 1) ? radius : cluster_tol * (1.0 + std::abs(mean));
    const double excess = std::max(0.0, worst_im - allowance) / (1.0 + std::abs(mean));
    rep.max_excess_imag = std::max(rep.max_excess_imag, excess);
    for (std::size_t k = i; k < i + size; ++k) merged.push_back(mean);
    i = j + 1;
  }

  rep.marginal = rep.max_excess_imag > tol;
  rep.roots = Eigen::Map<Eigen::VectorXd>(merged.data(), merged.size());

  for (double r : merged) {
    const double denom = detail::abs_norm_at(coeffs, r);
    rep.max_residual =
        std::max(rep.max_residual, std::abs(detail::horner(coeffs, r)) / std::max(denom, 1e-300));
  }
  return rep;
}

}  // namespace hypercone
