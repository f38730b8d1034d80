#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include <hypercone/exemplars.hpp>
#include <hypercone/io.hpp>

using namespace hypercone;
using Catch::Approx;
using io::Json;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("polynomial serialization round-trips") {
  const Exemplar ex = find_exemplar("ex3_4");
  const Json j = io::poly_to_json(ex.system.poly());
  const Polynomial back = io::poly_from_json(j);

  REQUIRE(back.dim() == ex.system.poly().dim());
  REQUIRE(back.terms() == ex.system.poly().terms());

  // Serialize -> parse -> serialize is byte-stable.
  CHECK(io::poly_to_json(back).dump() == j.dump());
}

TEST_CASE("polynomial loading validates shape and homogeneity") {
  SECTION("missing fields") {
    CHECK_THROWS_AS(io::poly_from_json(Json::object()), std::invalid_argument);
    CHECK_THROWS_AS(io::poly_from_json(Json{{"dim", 2}}), std::invalid_argument);
    CHECK_THROWS_WITH(io::poly_from_json(Json{{"dim", 2}}),
                      Catch::Matchers::ContainsSubstring("terms"));
  }
  SECTION("non-integer exponents") {
    Json j{{"dim", 2}, {"terms", Json::array({Json{{"exp", {1.5, 0.5}}, {"coef", 1.0}}})}};
    CHECK_THROWS_AS(io::poly_from_json(j), std::invalid_argument);
  }
  SECTION("inhomogeneous term set is rejected with the degree list") {
    Json j{{"dim", 2},
           {"terms", Json::array({Json{{"exp", {2, 0}}, {"coef", 1.0}},
                                  Json{{"exp", {1, 0}}, {"coef", 1.0}}})}};
    CHECK_THROWS_WITH(io::poly_from_json(j),
                      Catch::Matchers::ContainsSubstring("not homogeneous"));
  }
  SECTION("empty term list is allowed") {
    Json j{{"dim", 3}, {"terms", Json::array()}};
    CHECK(io::poly_from_json(j).empty());
  }
}

TEST_CASE("system serialization round-trips with tolerances") {
  ToleranceProfile tol;
  tol.root_tol = 1e-7;
  tol.rank_tol = 1e-5;
  tol.cone_tol = 1e-9;
  Polynomial p(2);
  p.add_term({1, 1}, 1.0);  // x1*x2, hyperbolic along (1,1)
  const SystemDef sys(p, vec({1, 1}), tol);

  const Json j = io::system_to_json(sys);
  const SystemDef back = io::system_from_json(j);

  CHECK(back.dim() == 2);
  CHECK(back.degree() == 2);
  CHECK(back.direction() == sys.direction());
  CHECK(back.tol().root_tol == Approx(1e-7));
  CHECK(back.tol().rank_tol == Approx(1e-5));
  CHECK(back.tol().cone_tol == Approx(1e-9));
  CHECK(io::system_to_json(back).dump() == j.dump());

  SECTION("tol block is optional and defaults apply") {
    Json no_tol = j;
    no_tol.erase("tol");
    const SystemDef d = io::system_from_json(no_tol);
    CHECK(d.tol().root_tol == Approx(ToleranceProfile{}.root_tol));
  }
  SECTION("dim mismatch with the polynomial is rejected") {
    Json bad = j;
    bad["dim"] = 3;
    CHECK_THROWS_WITH(io::system_from_json(bad),
                      Catch::Matchers::ContainsSubstring("disagrees"));
  }
  SECTION("loading runs full system validation") {
    // p = x1*x2 vanishes along (0,1), so that direction is inadmissible.
    Json bad = j;
    bad["direction"] = Json::array({0.0, 1.0});
    CHECK_THROWS_AS(io::system_from_json(bad), std::invalid_argument);
  }
}

TEST_CASE("every catalog exemplar's system serializes and reloads") {
  for (const auto& ex : catalog()) {
    const Json j = io::system_to_json(ex.system);
    const SystemDef back = io::system_from_json(j);
    CHECK(back.dim() == ex.system.dim());
    CHECK(back.degree() == ex.system.degree());
    // The reloaded system has no oracle; spectra must still agree on a sample.
    const Eigen::VectorXd x = gaussian_point(ex.system, 7, 0);
    const Eigen::VectorXd a = eigenvalues(ex.system, x).values;
    const Eigen::VectorXd b = eigenvalues(back, x).values;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-7 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("frame serialization round-trips and validates kind") {
  FrameSet f;
  f.elements = {vec({1.5, 0, 0}), vec({-0.5, 1, 1})};
  f.kind = FrameSet::Kind::Jordan;

  const Json j = io::frame_to_json(f);
  CHECK(j.at("kind") == "jordan");
  const FrameSet back = io::frame_from_json(j);
  CHECK(back.kind == FrameSet::Kind::Jordan);
  REQUIRE(back.k() == 2);
  CHECK(back.elements[0] == f.elements[0]);
  CHECK(back.elements[1] == f.elements[1]);

  Json scaled = j;
  scaled["kind"] = "scaled";
  CHECK(io::frame_from_json(scaled).kind == FrameSet::Kind::Scaled);

  Json bad = j;
  bad["kind"] = "orthonormal";
  CHECK_THROWS_WITH(io::frame_from_json(bad),
                    Catch::Matchers::ContainsSubstring("orthonormal"));
}

TEST_CASE("tuple, matrix and vector payloads round-trip") {
  ETuple t;
  t.elements = {vec({1, 0}), vec({0.25, 0.75})};
  const ETuple t2 = io::tuple_from_json(io::tuple_to_json(t));
  REQUIRE(t2.elements.size() == 2);
  CHECK(t2.elements[1] == t.elements[1]);

  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd m2 = io::matrix_from_json(io::matrix_to_json(m));
  CHECK(m2 == m);

  Json ragged{{"rows", Json::array({Json::array({1.0, 2.0}), Json::array({3.0})})}};
  CHECK_THROWS_WITH(io::matrix_from_json(ragged),
                    Catch::Matchers::ContainsSubstring("unequal"));
  CHECK_THROWS_AS(io::matrix_from_json(Json{{"rows", Json::array()}}), std::invalid_argument);

  const Eigen::VectorXd v = vec({-1, 0, 2.5});
  CHECK(io::vector_from_json(io::vector_to_json(v)) == v);
}

TEST_CASE("command-line points parse as comma-separated decimals") {
  const Eigen::VectorXd p = io::parse_point("1,0,-2.5");
  REQUIRE(p.size() == 3);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(p[2] == -2.5);

  CHECK(io::parse_point("3")[0] == 3.0);
  CHECK(io::parse_point("1e-3,2.5e2") == vec({0.001, 250}));

  CHECK_THROWS_WITH(io::parse_point("1,abc,3"), Catch::Matchers::ContainsSubstring("abc"));
  CHECK_THROWS_AS(io::parse_point(""), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_point("1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_point("1;2"), std::invalid_argument);
}

TEST_CASE("files save and load with informative failures") {
  const std::string path = "io_roundtrip_tmp.json";
  const Json j = io::system_to_json(find_exemplar("ex3_3").system);
  io::save_file(path, j);

  const Json back = io::load_file(path);
  CHECK(back.dump() == j.dump());

  // Saved form ends with a newline and is indented.
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  CHECK(text.back() == '\n');
  CHECK(text.find("  \"dim\"") != std::string::npos);

  std::remove(path.c_str());
  CHECK_THROWS_WITH(io::load_file(path), Catch::Matchers::ContainsSubstring(path));

  const std::string bad = "io_badparse_tmp.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_WITH(io::load_file(bad), Catch::Matchers::ContainsSubstring(bad));
  std::remove(bad.c_str());
}

TEST_CASE("system hashes identify content, not object identity") {
  const SystemDef& a = find_exemplar("ex3_3").system;
  const SystemDef b = io::system_from_json(io::system_to_json(a));
  CHECK(io::system_hash(a) == io::system_hash(b));

  ToleranceProfile loose;
  loose.root_tol = 1e-6;
  const SystemDef c(a.poly(), a.direction(), loose);
  CHECK(io::system_hash(a) != io::system_hash(c));
  CHECK(io::system_hash(a) != io::system_hash(find_exemplar("ex3_4").system));
}
