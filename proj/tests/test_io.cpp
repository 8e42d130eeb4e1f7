#include "test_support.hpp"

#include "abreu/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace abreu;
using namespace abreu::testing;
using abreu::io::json;

namespace {

std::string parse_error_message(const std::string& text) {
  try {
    io::parse_json(text, "doc");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "parsed invalid JSON";
  return {};
}

void expect_same_polytope(const DelzantPolytope& a, const DelzantPolytope& b) {
  ASSERT_EQ(a.dim(), b.dim());
  ASSERT_EQ(a.facet_count(), b.facet_count());
  for (std::size_t i = 0; i < a.facet_count(); ++i) {
    EXPECT_EQ(a.facet(i).normal, b.facet(i).normal);
    EXPECT_EQ(a.support(i), b.support(i));
    EXPECT_EQ(a.facet(i).exact_support, b.facet(i).exact_support);
  }
}

}  // namespace

TEST(ParseJson, ReportsLineAndColumn) {
  const std::string msg = parse_error_message("{\n  \"dim\": 2,\n  \"facets\": [1, 2,, 3]\n}");
  EXPECT_NE(msg.find("doc:3:"), std::string::npos) << msg;
  EXPECT_NE(parse_error_message("").find("doc:1:"), std::string::npos);
}

TEST(PolytopeJson, RoundTripPresets) {
  for (const auto& p : all_presets()) {
    const std::string text = io::dump(io::polytope_to_json(p), 2);
    expect_same_polytope(p, io::polytope_from_json(io::parse_json(text)));
  }
}

TEST(PolytopeJson, RoundTripIrrationalSupports) {
  std::mt19937_64 rng(103);
  for (const auto& p : all_presets()) {
    const Vec t = random_interior(p, rng) * 0.3;
    std::vector<Facet> fs;
    for (std::size_t i = 0; i < p.facet_count(); ++i) fs.emplace_back(p.facet(i).normal, p.support(i) + p.normal(i).dot(t));
    const DelzantPolytope q(p.dim(), fs);
    expect_same_polytope(q, io::polytope_from_json(io::parse_json(io::dump(io::polytope_to_json(q)))));
  }
}

TEST(PolytopeJson, RationalSupportForms) {
  const auto p = io::polytope_from_json(io::parse_json(
      R"({"dim": 1, "facets": [{"normal": [1], "support": ["1", "3"]}, {"normal": [-1], "support": [2, 3]}]})"));
  EXPECT_DOUBLE_EQ(p.support(0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.support(1), 2.0 / 3.0);
  ASSERT_TRUE(p.facet(0).exact_support.has_value());
  EXPECT_EQ(p.facet(0).exact_support->den, 3);
}

TEST(PolytopeJson, SchemaErrors) {
  for (const char* bad : {R"({"facets": []})", R"({"dim": 1})", R"({"dim": 1, "facets": [{"normal": [1.5], "support": 1}]})",
                          R"({"dim": 2, "facets": [{"normal": [1], "support": 1}]})",
                          R"({"dim": 1, "facets": [{"normal": [1], "support": "x"}]})",
                          R"({"dim": 1, "facets": [{"normal": [1], "support": ["1", "0"]}]})"}) {
    try {
      io::polytope_from_json(io::parse_json(bad));
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_TRUE(e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidPolytope) << bad << " " << e.what();
    }
  }
}

TEST(PolytopeJson, DelzantFailurePropagatesKind) {
  try {
    io::polytope_from_json(io::parse_json(R"({"dim": 2, "facets": [
      {"normal": [1, 2], "support": 3}, {"normal": [1, 0], "support": 1},
      {"normal": [-1, 0], "support": 1}, {"normal": [0, -1], "support": 1}]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonDelzantVertex);
  }
}

TEST(PotentialJson, RoundTripAllKinds) {
  std::mt19937_64 rng(107);
  for (const auto& p : all_presets()) {
    std::vector<Potential> us{ParametrizedPotential(p), ParametrizedPotential(p, random_polynomial(p.dim(), 4, 0.3, rng), 0.75),
                              random_affine(p.dim(), rng),
                              PLFunction{{random_affine(p.dim(), rng), random_affine(p.dim(), rng), AffineFunction::zero(p.dim())}}};
    for (const auto& u : us) {
      const json j = io::potential_to_json(u);
      const Potential back = io::potential_from_json(io::parse_json(io::dump(j)), p);
      EXPECT_EQ(io::dump(io::potential_to_json(back)), io::dump(j));
      EXPECT_EQ(back.index(), u.index());
      for (int k = 0; k < 5; ++k) {
        const Vec x = random_interior(p, rng, 0.01);
        EXPECT_EQ(eval_value(back, x), eval_value(u, x));
      }
    }
  }
}

TEST(PotentialJson, SchemaErrors) {
  const auto p = presets::square();
  for (const char* bad : {R"({"kind": "spline"})", R"({"kind": "affine"})", R"({"kind": "affine", "coeffs": {"a0": 1, "a": [1]}})",
                          R"({"kind": "pl", "coeffs": {"pieces": []}})",
                          R"({"kind": "parametrized", "coeffs": {"terms": [{"exponents": [1], "coeff": 1}]}})",
                          R"({"kind": "parametrized", "coeffs": {"terms": [{"exponents": [1, -1], "coeff": 1}]}})"}) {
    try {
      io::potential_from_json(io::parse_json(bad), p);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
    }
  }
}

TEST(Dump, SeventeenSignificantDigits) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(1.0), "1.0");
  EXPECT_EQ(io::format_double(-2.0), "-2.0");
  EXPECT_EQ(io::format_double(1e300), "1.0000000000000001e+300");
  EXPECT_EQ(io::format_double(std::nan("")), "null");
  EXPECT_EQ(io::dump(json{{"b", 1.0}, {"a", json::array({1, 0.5})}}), R"({"a":[1,0.5],"b":1.0})");
  for (double v : {0.1, 1.0 / 3.0, -6.02e23, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(LoadPolytope, PresetsFilesAndEnvironment) {
  expect_same_polytope(io::load_polytope("square"), presets::square());
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "abreu_io_presets";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "tri.json") << io::dump(io::polytope_to_json(presets::cp2_simplex()));
    // A preset file shadows the built-in of the same name.
    std::ofstream(dir / "interval.json") << R"({"dim": 1, "facets": [{"normal": [1], "support": 2}, {"normal": [-1], "support": 2}]})";
  }
  expect_same_polytope(io::load_polytope((dir / "tri.json").string()), presets::cp2_simplex());
  ::setenv("ABREU_KIT_PRESETS", dir.c_str(), 1);
  expect_same_polytope(io::load_polytope("tri"), presets::cp2_simplex());
  EXPECT_EQ(io::load_polytope("interval").support(0), 2.0);
  ::unsetenv("ABREU_KIT_PRESETS");
  EXPECT_EQ(io::load_polytope("interval").support(0), 1.0);
  try {
    io::load_polytope("no-such-thing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
  fs::remove_all(dir);
}
