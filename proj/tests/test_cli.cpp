#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <hypercone/cli.hpp>

using namespace hypercone;
using Catch::Matchers::ContainsSubstring;

namespace {

struct CliResult {
  int rc;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int rc = cli::run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

// Writes a payload to a throwaway file; removed by the destructor.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const io::Json& doc) : path("cli_tmp_" + name) {
    io::save_file(path, doc);
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("point queries print values and use exit code 0") {
  const CliResult eig = run({"eig", "ex4_4", "1,0,0,0"});
  CHECK(eig.rc == 0);
  CHECK(eig.out == "0.75 0 0\n");

  const CliResult eig2 = run({"eig", "exR3E2", "1,0,0"});
  CHECK(eig2.rc == 0);
  CHECK_THAT(eig2.out, ContainsSubstring("0.666666666667 0"));

  const CliResult cone = run({"cone", "ex3_3", "3,1,2"});
  CHECK(cone.rc == 0);
  CHECK_THAT(cone.out, ContainsSubstring("interior"));
  CHECK_THAT(run({"cone", "ex3_3", "-1,1,2"}).out, ContainsSubstring("outside"));

  const CliResult rank = run({"rank", "ex3_4", "0,1,0"});
  CHECK(rank.rc == 0);
  CHECK(rank.out == "1\n");

  const CliResult ip = run({"ip", "ex3_4", "1,0,0", "1,0,0"});
  CHECK(ip.rc == 0);
  CHECK(ip.out == "2\n");

  const CliResult tr = run({"trace", "ex3_3", "3,4,5"});
  CHECK(tr.rc == 0);
  CHECK(tr.out == "12\n");
}

TEST_CASE("tolerance overrides reach loaded systems") {
  // min eigenvalue 0.3: interior by default, boundary under a coarser cone tol.
  CHECK_THAT(run({"cone", "ex3_3", "1,1,0.3"}).out, ContainsSubstring("interior"));
  CHECK_THAT(run({"cone", "ex3_3", "1,1,0.3", "--tol-cone", "0.4"}).out,
             ContainsSubstring("boundary"));
}

TEST_CASE("majorize prints the verdict and signals failure via the exit code") {
  const CliResult yes = run({"majorize", "1,1", "2,0"});
  CHECK(yes.rc == 0);
  CHECK_THAT(yes.out, ContainsSubstring("true"));

  const CliResult no = run({"majorize", "2,0", "1,1"});
  CHECK(no.rc == 1);
  CHECK_THAT(no.out, ContainsSubstring("false"));

  CHECK(run({"majorize", "1,2", "1"}).rc == 2);  // unequal lengths
}

TEST_CASE("hyperbolic-check distinguishes failed checks from bad input") {
  const CliResult good = run({"hyperbolic-check", "ex3_6", "--samples", "25"});
  CHECK(good.rc == 0);
  CHECK_THAT(good.out, ContainsSubstring("verified"));

  // Real-rooted along e but not at generic points: x1^2 + x2^2 with e = (1,0).
  Polynomial p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({0, 2}, 1.0);
  const SystemDef circle(p, vec({1, 0}));
  TempFile sys_file("circle.json", io::system_to_json(circle));
  const CliResult bad = run({"hyperbolic-check", sys_file.path, "--samples", "25"});
  CHECK(bad.rc == 1);
  CHECK_THAT(bad.out, ContainsSubstring("not verified"));

  // Well-formed file whose direction fails validation: also a failed check.
  io::Json vanishing = io::system_to_json(find_exemplar("ex3_3").system);
  vanishing["direction"] = io::Json::array({1.0, 0.0, -1.0});  // p(e) = 0 for x1*x2*x3
  TempFile van_file("vanishing.json", vanishing);
  const CliResult refuse = run({"hyperbolic-check", van_file.path});
  CHECK(refuse.rc == 1);
  CHECK_THAT(refuse.out, ContainsSubstring("not verified"));

  // Structurally broken file: usage error, not a check failure.
  io::Json broken;
  broken["poly"] = io::poly_to_json(p);
  TempFile broken_file("broken.json", broken);
  CHECK(run({"hyperbolic-check", broken_file.path}).rc == 2);
}

TEST_CASE("non-hyperbolic points surface as check failures in queries") {
  Polynomial p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({0, 2}, 1.0);
  TempFile sys_file("circle2.json", io::system_to_json(SystemDef(p, vec({1, 0}))));
  const CliResult r = run({"eig", sys_file.path, "0.3,1"});
  CHECK(r.rc == 1);
  CHECK_THAT(r.err, ContainsSubstring("check failed"));
}

TEST_CASE("frame commands verify and reject via files") {
  const Exemplar ex = find_exemplar("exR3E2");
  REQUIRE(ex.known_frames.size() >= 2);
  const FrameSet jordan = ex.known_frames[1];
  REQUIRE(jordan.kind == FrameSet::Kind::Jordan);

  TempFile good("frame_good.json", io::frame_to_json(jordan));
  const CliResult ok = run({"frame-verify", "exR3E2", good.path});
  CHECK(ok.rc == 0);
  CHECK_THAT(ok.out, ContainsSubstring("verified"));
  CHECK_THAT(ok.out, ContainsSubstring("gram-identity gap: 0"));

  FrameSet broken = jordan;
  broken.elements[0] *= 2.0;  // no longer idempotent
  TempFile bad("frame_bad.json", io::frame_to_json(broken));
  const CliResult rej = run({"frame-verify", "exR3E2", bad.path});
  CHECK(rej.rc == 1);
  CHECK_THAT(rej.out, ContainsSubstring("rejected"));
  CHECK_THAT(rej.out, ContainsSubstring("primitive"));

  const CliResult cert = run({"certify-minimal", "exR3E2", good.path, "--samples", "500"});
  CHECK(cert.rc == 0);
  CHECK_THAT(cert.out, ContainsSubstring("certificate granted"));

  // A scaled-frame candidate with a rank-two element must be refused.
  FrameSet rank_two;
  rank_two.kind = FrameSet::Kind::Scaled;
  rank_two.elements = {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
  TempFile coords("frame_coords.json", io::frame_to_json(rank_two));
  const CliResult refused = run({"certify-minimal", "ex3_4", coords.path});
  CHECK(refused.rc == 1);
  CHECK_THAT(refused.out, ContainsSubstring("refused"));
  CHECK_THAT(refused.out, ContainsSubstring("rank"));
}

TEST_CASE("tuple and transfer-map commands run end to end") {
  const Exemplar ex = find_exemplar("exR3E2");
  const FrameSet jordan = ex.known_frames[1];
  ETuple tup;
  tup.elements = jordan.elements;

  TempFile frame_file("t_frame.json", io::frame_to_json(jordan));
  TempFile tuple_file("t_tuple.json", io::tuple_to_json(tup));

  const CliResult tv = run({"tuple-verify", "exR3E2", tuple_file.path});
  CHECK(tv.rc == 0);
  CHECK_THAT(tv.out, ContainsSubstring("e-doubly stochastic: yes"));
  CHECK_THAT(tv.out, ContainsSubstring("spectrally doubly stochastic: yes"));

  ETuple off = tup;
  off.elements[0] *= 2.0;
  TempFile off_file("t_tuple_bad.json", io::tuple_to_json(off));
  CHECK(run({"tuple-verify", "exR3E2", off_file.path}).rc == 1);

  const CliResult bt = run({"build-t", "exR3E2", frame_file.path, tuple_file.path, "--samples",
                            "50", "--seed", "9"});
  CHECK(bt.rc == 0);
  CHECK_THAT(bt.out, ContainsSubstring("doubly stochastic map: yes"));
  CHECK_THAT(bt.out, ContainsSubstring("holds"));

  Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(2, 2);
  TempFile d_file("t_dmat.json", io::matrix_to_json(ident));
  CHECK(run({"build-t", "exR3E2", frame_file.path, tuple_file.path, d_file.path}).rc == 0);

  Eigen::MatrixXd not_ds(2, 2);
  not_ds << 1, 1, 0, 0;
  TempFile nds_file("t_dmat_bad.json", io::matrix_to_json(not_ds));
  const CliResult bad_d =
      run({"build-t", "exR3E2", frame_file.path, tuple_file.path, nds_file.path});
  CHECK(bad_d.rc == 2);
  CHECK_THAT(bad_d.err, ContainsSubstring("doubly stochastic"));

  const CliResult schur = run({"schur-sweep", "exR3E2", frame_file.path, "--samples", "50"});
  CHECK(schur.rc == 0);
  CHECK_THAT(schur.out, ContainsSubstring("holds"));

  const CliResult adj =
      run({"adjoint-s-sweep", "exR3E2", frame_file.path, tuple_file.path, "--samples", "50"});
  CHECK(adj.rc == 0);
  CHECK_THAT(adj.out, ContainsSubstring("exploratory"));
}

TEST_CASE("derive prints a spectrum or a loadable system document") {
  const CliResult at_point = run({"derive", "1", "ex3_3", "1,2,3"});
  CHECK(at_point.rc == 0);

  const CliResult doc = run({"derive", "1", "ex3_3"});
  CHECK(doc.rc == 0);
  const io::Json j = io::Json::parse(doc.out);
  const SystemDef dsys = io::system_from_json(j);
  CHECK(dsys.degree() == 2);

  CHECK(run({"derive", "5", "ex3_3"}).rc == 2);   // order out of range
  CHECK(run({"derive", "-1", "ex3_3"}).rc == 2);
}

TEST_CASE("suite output is deterministic and respects selection") {
  const std::vector<std::string> args = {"suite", "--exemplar", "ex3_4", "--samples", "20",
                                         "--seed", "77"};
  const CliResult a = run(args);
  const CliResult b = run(args);
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);

  const io::Json j = io::Json::parse(a.out);
  CHECK(j.at("failed") == 0);
  CHECK(j.at("config").at("seed") == 77);
  for (const auto& c : j.at("checks")) {
    const std::string id = c.at("id").get<std::string>();
    CHECK(id.rfind("ex3_4/", 0) == 0);
  }

  const CliResult human = run({"suite", "--exemplar", "ex3_2", "--samples", "10", "--human"});
  CHECK(human.rc == 0);
  CHECK_THAT(human.out, ContainsSubstring("passed, 0 failed"));

  CHECK(run({"suite"}).rc == 2);                               // no selection
  CHECK(run({"suite", "--exemplar", "nope"}).rc == 2);         // unknown id
  CHECK(run({"suite", "--exemplar", "ex3_2", "--all"}).rc == 2);  // both selectors
}

TEST_CASE("suite --all covers the whole catalog") {
  const CliResult r = run({"suite", "--all", "--samples", "5"});
  CHECK(r.rc == 0);
  const io::Json j = io::Json::parse(r.out);
  CHECK(j.at("failed") == 0);
  std::set<std::string> prefixes;
  for (const auto& c : j.at("checks")) {
    const std::string id = c.at("id").get<std::string>();
    prefixes.insert(id.substr(0, id.find('/')));
  }
  CHECK(prefixes.size() == catalog().size());
}

TEST_CASE("export emits a reloadable document") {
  const CliResult r = run({"export", "exS2"});
  REQUIRE(r.rc == 0);
  const io::Json j = io::Json::parse(r.out);
  CHECK(j.at("id") == "exS2");
  CHECK(j.at("complete") == true);
  const SystemDef sys = io::system_from_json(j.at("system"));
  CHECK(sys.degree() == 2);
  REQUIRE(j.at("frames").size() >= 1);
  (void)io::frame_from_json(j.at("frames").front());

  const std::string out_path = "cli_tmp_export.json";
  CHECK(run({"export", "exS2", "--out", out_path}).rc == 0);
  CHECK(io::load_file(out_path).at("id") == "exS2");
  std::remove(out_path.c_str());

  CHECK(run({"export", "not-a-system"}).rc == 2);
}

TEST_CASE("environment seed feeds defaults and rejects garbage") {
  setenv("HYPER_SEED", "4242", 1);
  const CliResult r = run({"suite", "--exemplar", "ex3_2", "--samples", "5"});
  CHECK(io::Json::parse(r.out).at("config").at("seed") == 4242);

  setenv("HYPER_SEED", "12x", 1);
  const CliResult bad = run({"eig", "ex3_2", "1"});
  CHECK(bad.rc == 2);
  CHECK_THAT(bad.err, ContainsSubstring("HYPER_SEED"));
  unsetenv("HYPER_SEED");

  // Explicit flag still wins over the environment default.
  setenv("HYPER_SEED", "1", 1);
  const CliResult flag = run({"suite", "--exemplar", "ex3_2", "--samples", "5", "--seed", "3"});
  CHECK(io::Json::parse(flag.out).at("config").at("seed") == 3);
  unsetenv("HYPER_SEED");
}

TEST_CASE("usage errors exit with code 2 and help exits clean") {
  CHECK(run({}).rc == 2);
  CHECK(run({"spectralize"}).rc == 2);
  CHECK(run({"eig"}).rc == 2);
  CHECK(run({"eig", "ex3_3"}).rc == 2);
  CHECK(run({"eig", "no_such_file.json", "1,2,3"}).rc == 2);
  CHECK(run({"eig", "ex3_3", "1,two,3"}).rc == 2);
  CHECK(run({"eig", "ex3_3", "1,2"}).rc == 2);  // dimension mismatch

  const CliResult help = run({"--help"});
  CHECK(help.rc == 0);
  CHECK_THAT(help.out, ContainsSubstring("hypercone"));
  CHECK_THAT(help.out, ContainsSubstring("suite"));
}
