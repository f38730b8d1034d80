#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "exemplars.hpp"
#include "frames.hpp"
#include "io.hpp"
#include "majorize.hpp"
#include "system.hpp"

namespace hypercone {

struct SuiteConfig {
  std::uint64_t seed = 2024;
  int samples = 1000;
};

struct CheckResult {
  std::string id;         // "<exemplar>/<check-name>", stable across runs
  std::string statement;  // what property the check exercises
  bool pass = false;
  double margin = 0.0;  // worst slack seen; negative means violated
  std::uint64_t seed = 0;
  int samples = 0;
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<CheckResult> checks;
  int passed = 0;
  int failed = 0;
};

namespace detail {

// Every check draws from its own substream so results are independent of
// check execution order and of which exemplars were selected.
inline std::uint64_t check_seed(const SuiteConfig& cfg, const std::string& id) {
  return cfg.seed ^ fnv1a(id);
}

// Signed distance to the acceptance boundary of check_majorization:
// nonnegative iff prefix sums dominate within tol and totals agree within tol.
inline double majorization_margin(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double tol) {
  const auto mc = check_majorization(u, v, tol);
  return std::min(mc.min_prefix_slack + tol, tol - mc.total_gap);
}

class CheckRecorder {
 public:
  CheckRecorder(const SuiteConfig& cfg, const std::string& exemplar_id, SuiteReport& out)
      : cfg_(cfg), prefix_(exemplar_id + "/"), out_(out) {}

  // Runs `body(seed) -> worst margin` and records pass when margin >= -0.
  // Margins are defined so that negative means the property was violated
  // beyond its pinned tolerance.
  void run(const std::string& name, const std::string& statement, int samples,
           const std::function<double(std::uint64_t)>& body) {
    CheckResult r;
    r.id = prefix_ + name;
    r.statement = statement;
    r.seed = check_seed(cfg_, r.id);
    r.samples = samples;
    try {
      r.margin = body(r.seed);
      r.pass = r.margin >= 0.0;
    } catch (const std::exception&) {
      r.margin = -std::numeric_limits<double>::infinity();
      r.pass = false;
    }
    out_.checks.push_back(std::move(r));
  }

 private:
  const SuiteConfig& cfg_;
  std::string prefix_;
  SuiteReport& out_;
};

}  // namespace detail

// Runs every applicable property check on one exemplar, appending results.
inline void run_exemplar_checks(const Exemplar& ex, const SuiteConfig& cfg, SuiteReport& out) {
  const SystemDef& sys = ex.system;
  const int samples = cfg.samples;
  detail::CheckRecorder rec(cfg, ex.id, out);

  rec.run("eigen-subadditivity",
          "spectrum of a sum is majorized by the sum of spectra: "
          "lambda(x+y) < lambda(x)+lambda(y)",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-7;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto y = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              const Eigen::VectorXd u = eigenvalues(sys, x + y).values;
              const Eigen::VectorXd v = eigenvalues(sys, x).values + eigenvalues(sys, y).values;
              const double scale = 1.0 + v.cwiseAbs().maxCoeff();
              margin = std::min(margin, detail::majorization_margin(u, v, kTol * scale) / scale);
            }
            return margin;
          });

  rec.run("difference-majorization",
          "difference of spectra is majorized by the spectrum of the difference: "
          "lambda(x)-lambda(y) < lambda(x-y)",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-7;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto y = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              const Eigen::VectorXd u = eigenvalues(sys, x).values - eigenvalues(sys, y).values;
              const Eigen::VectorXd v = eigenvalues(sys, x - y).values;
              const double scale = 1.0 + v.cwiseAbs().maxCoeff();
              margin = std::min(margin, detail::majorization_margin(u, v, kTol * scale) / scale);
            }
            return margin;
          });

  rec.run("cone-monotonicity",
          "adding a cone element never lowers any eigenvalue: "
          "y - x in the cone implies lambda(x) <= lambda(y) elementwise",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-7;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = cone_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto z = cone_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              const Eigen::VectorXd lx = eigenvalues(sys, x).values;
              const Eigen::VectorXd ly = eigenvalues(sys, x + z).values;
              const double scale = 1.0 + ly.cwiseAbs().maxCoeff();
              margin = std::min(margin, ((ly - lx).minCoeff() + kTol * scale) / scale);
            }
            return margin;
          });

  rec.run("cone-subduality",
          "the pairing of two cone elements is nonnegative: <x,y> >= 0 on the cone",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-8;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = cone_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto y = cone_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              const double scale = std::max(1.0, semi_norm(sys, x) * semi_norm(sys, y));
              margin = std::min(margin, semi_inner_product(sys, x, y) / scale + kTol);
            }
            return margin;
          });

  rec.run("pairing-bounds",
          "the pairing is bounded by the spectral pairing and the norm product: "
          "<x,y> <= <lambda(x),lambda(y)> <= |x||y|",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-7;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto y = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              const Eigen::VectorXd lx = eigenvalues(sys, x).values;
              const Eigen::VectorXd ly = eigenvalues(sys, y).values;
              const double spectral = lx.dot(ly);
              const double norms = lx.norm() * ly.norm();
              const double scale = std::max(1.0, norms);
              const double b1 = (spectral - semi_inner_product(sys, x, y)) / scale + kTol;
              const double b2 = (norms - spectral) / scale + kTol;
              margin = std::min({margin, b1, b2});
            }
            return margin;
          });

  rec.run("norm-consistency",
          "the polarization norm sqrt(<x,x>) equals the spectral norm |lambda(x)|",
          samples, [&](std::uint64_t seed) {
            constexpr double kTol = 1e-7;
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = gaussian_point(sys, seed, static_cast<std::uint64_t>(i));
              const double spectral = eigenvalues(sys, x).values.norm();
              const double paired = std::sqrt(std::max(0.0, semi_inner_product(sys, x, x)));
              const double scale = 1.0 + spectral;
              margin = std::min(margin, kTol - std::abs(spectral - paired) / scale);
            }
            return margin;
          });

  rec.run("rank-subadditivity", "rank(x+y) <= rank(x) + rank(y) on random samples", samples,
          [&](std::uint64_t seed) {
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i) {
              const auto x = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i));
              const auto y = gaussian_point(sys, seed, 2 * static_cast<std::uint64_t>(i) + 1);
              margin = std::min(
                  margin, double(rank_of(sys, x) + rank_of(sys, y) - rank_of(sys, x + y)));
            }
            return margin;
          });

  if (sys.degree() >= 2) {
    rec.run("derivative-interlacing",
            "eigenvalues of the derivative system interlace the eigenvalues of p", samples,
            [&](std::uint64_t seed) {
              const SystemDef dsys = derivative_system(sys, 1);
              double margin = std::numeric_limits<double>::infinity();
              for (int i = 0; i < samples; ++i) {
                const auto x = gaussian_point(sys, seed, static_cast<std::uint64_t>(i));
                const Eigen::VectorXd l = eigenvalues(sys, x).values;
                const Eigen::VectorXd lp = eigenvalues(dsys, x).values;
                const double scale = 1.0 + l.cwiseAbs().maxCoeff();
                const double tol = sys.tol().root_tol * scale;
                for (int k = 0; k < lp.size(); ++k) {
                  margin = std::min(margin, (l[k] - lp[k] + tol) / scale);
                  margin = std::min(margin, (lp[k] - l[k + 1] + tol) / scale);
                }
              }
              return margin;
            });
  }

  if (sys.has_oracle()) {
    rec.run("oracle-agreement",
            "direct eigenvalue oracle and companion-polynomial path give the same spectra",
            samples, [&](std::uint64_t seed) {
              constexpr double kTol = 1e-7;
              double margin = std::numeric_limits<double>::infinity();
              for (int i = 0; i < samples; ++i) {
                const auto x = gaussian_point(sys, seed, static_cast<std::uint64_t>(i));
                const Eigen::VectorXd direct = eigenvalues(sys, x).values;
                const Eigen::VectorXd poly = eigenvalues_poly(sys, x).values;
                const double scale = 1.0 + direct.cwiseAbs().maxCoeff();
                margin = std::min(margin, kTol - (direct - poly).cwiseAbs().maxCoeff() / scale);
              }
              return margin;
            });
  }

  if (!ex.known_spectra.empty()) {
    rec.run("known-spectra", "declared ground-truth spectra reproduce under the eigenvalue map",
            static_cast<int>(ex.known_spectra.size()), [&](std::uint64_t) {
              double margin = std::numeric_limits<double>::infinity();
              for (const auto& ks : ex.known_spectra) {
                const Eigen::VectorXd got = eigenvalues(sys, ks.point).values;
                const double scale = 1.0 + ks.expected.cwiseAbs().maxCoeff();
                margin = std::min(margin, sys.tol().root_tol -
                                              (got - ks.expected).cwiseAbs().maxCoeff() / scale);
              }
              return margin;
            });
  }

  if (!ex.known_frames.empty()) {
    rec.run("frame-verification", "declared frames verify with the expected kind",
            static_cast<int>(ex.known_frames.size()), [&](std::uint64_t) {
              double margin = std::numeric_limits<double>::infinity();
              for (const auto& f : ex.known_frames) {
                const FrameReport rep = f.kind == FrameSet::Kind::Jordan
                                            ? verify_jordan_frame(sys, f)
                                            : verify_scaled_frame(sys, f);
                margin = std::min(margin, rep.verified() ? rep.sum_margin : -1.0);
              }
              return margin;
            });
  }

  for (const auto& f : ex.known_frames) {
    if (f.kind != FrameSet::Kind::Jordan) continue;

    rec.run("frame-combination",
            "spectrum of a frame combination is the sorted coefficient vector: "
            "lambda(sum r_i c_i) = sorted(r)",
            500, [&](std::uint64_t seed) {
              constexpr double kTol = 1e-7;
              Rng rng(seed, fnv1a("frame-combination"));
              double margin = std::numeric_limits<double>::infinity();
              for (int i = 0; i < 500; ++i) {
                const Eigen::VectorXd r = rng.gaussian_vector(f.k()) * 2.0;
                const auto rep = frame_combination_spectrum(sys, f, r);
                const double scale = 1.0 + r.cwiseAbs().maxCoeff();
                margin = std::min(margin, kTol - rep.max_err / scale);
              }
              return margin;
            });

    rec.run("rank-additivity",
            "rank adds across sums of orthogonal scaled frame elements", 100,
            [&](std::uint64_t seed) {
              Rng rng(seed, fnv1a("rank-additivity"));
              double margin = std::numeric_limits<double>::infinity();
              for (int i = 0; i < 100; ++i) {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dim());
                int used = 0;
                for (int j = 0; j < f.k(); ++j)
                  if (rng.uniform() < 0.5) {
                    x += rng.uniform(0.2, 3.0) * f.elements[static_cast<std::size_t>(j)];
                    ++used;
                  }
                if (used == 0) continue;
                margin = std::min(margin, used == rank_of(sys, x) ? 1.0 : -1.0);
              }
              return margin;
            });

    rec.run("diagonal-majorization",
            "the frame-diagonal map is doubly stochastic: lambda(Diag x) < lambda(x)",
            samples, [&](std::uint64_t seed) {
              constexpr double kTol = 1e-7;
              const Eigen::MatrixXd diag = diag_operator(sys, f);
              double margin = std::numeric_limits<double>::infinity();
              for (int i = 0; i < samples; ++i) {
                const auto x = gaussian_point(sys, seed, static_cast<std::uint64_t>(i));
                const Eigen::VectorXd u = eigenvalues(sys, diag * x).values;
                const Eigen::VectorXd v = eigenvalues(sys, x).values;
                const double scale = 1.0 + v.cwiseAbs().maxCoeff();
                margin = std::min(margin, detail::majorization_margin(u, v, kTol * scale) / scale);
              }
              return margin;
            });

    break;  // one Jordan frame is enough for these families
  }

  rec.run("completeness-probe",
          "a multistart search agrees with the declared completeness flag", 10,
          [&](std::uint64_t seed) {
            const auto comp = probe_completeness(sys, 10, seed);
            if (ex.complete) return comp.witness_found ? -1.0 : comp.min_seminorm;
            return comp.witness_found ? 1e-6 - comp.min_seminorm : -1.0;
          });
}

inline SuiteReport run_suite(const std::vector<Exemplar>& exemplars, const SuiteConfig& cfg) {
  SuiteReport out;
  out.config = cfg;
  for (const auto& ex : exemplars) run_exemplar_checks(ex, cfg, out);
  std::sort(out.checks.begin(), out.checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  for (const auto& c : out.checks) (c.pass ? out.passed : out.failed)++;
  return out;
}

inline io::Json suite_report_to_json(const SuiteReport& rep) {
  io::Json cfg;
  cfg["seed"] = rep.config.seed;
  cfg["samples"] = rep.config.samples;
  io::Json checks = io::Json::array();
  for (const auto& c : rep.checks) {
    io::Json jc;
    jc["id"] = c.id;
    jc["statement"] = c.statement;
    jc["verdict"] = c.pass ? "pass" : "fail";
    jc["margin"] = c.margin;
    jc["seed"] = c.seed;
    jc["samples"] = c.samples;
    checks.push_back(std::move(jc));
  }
  io::Json out;
  out["config"] = std::move(cfg);
  out["checks"] = std::move(checks);
  out["passed"] = rep.passed;
  out["failed"] = rep.failed;
  return out;
}

}  // namespace hypercone
