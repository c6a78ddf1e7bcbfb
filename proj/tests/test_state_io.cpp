#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace projmi {
namespace {

using testing::random_state;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no projmi::Error thrown";
  return ErrorKind::ParseError;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

TEST(StateJson, NestedAndFlatAgree) {
  const json nested = json::parse(R"({"dims":[3],"re":[[0.5,0,0],[0,0.5,0],[0,0,0]]})");
  const json flat = json::parse(R"({"re":[0.5,0,0,0,0.5,0,0,0,0],"im":[0,0,0,0,0,0,0,0,0]})");
  const PreparedState a = state_from_json(nested), b = state_from_json(flat);
  EXPECT_LT(frobenius_distance(a.sigma.matrix(), b.sigma.matrix()), 1e-15);
  EXPECT_FALSE(a.dims.has_value());
}

TEST(StateJson, BipartiteDimsAreKept) {
  const PreparedState p = state_from_json(state_to_json(maximally_entangled(3), BipartiteDims(3, 3)));
  ASSERT_TRUE(p.dims.has_value());
  EXPECT_EQ(*p.dims, BipartiteDims(3, 3));
}

TEST(StateJson, RoundTripIsExact) {
  CounterStream s(1, 0);
  for (int n = 3; n <= 6; ++n) {
    const DensityMatrix sigma = random_state(n, s);
    const json j = json::parse(state_to_json(sigma).dump());
    EXPECT_EQ(state_from_json(j).sigma.matrix(), sigma.matrix());
  }
}

TEST(StateJson, Rejections) {
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"re":[[1,0],[0]]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"re":[1,0,0]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"dims":[3,3],"re":[[1]]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"im":[[1]]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"re":[["a"]]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"re":[[1,1],[0,0]]})")); }), ErrorKind::NotHermitian);
  EXPECT_EQ(kind_of([] { state_from_json(json::parse(R"({"re":[[2,0],[0,0]]})")); }), ErrorKind::TraceNotOne);
}

TEST(MixtureJson, FileAssemblesToState) {
  const json e0 = state_to_json(basis_state(3, 0)), e1 = state_to_json(basis_state(3, 1));
  const json mix = {{"weights", {0.5, 0.5}},
                    {"components", {{{"a", e0}, {"b", e0}}, {{"a", e1}, {"b", e1}}}}};
  const std::string path = temp_file("projmi_mixture_test.json", mix.dump());
  const PreparedState p = load_state_file(path);
  ASSERT_TRUE(p.dims.has_value());
  EXPECT_EQ(*p.dims, BipartiteDims(3, 3));
  EXPECT_NEAR(vn_mutual_information(p.sigma, *p.dims), 1.0, 1e-12);
  EXPECT_NO_THROW(load_state("file:" + path));
  std::remove(path.c_str());
}

TEST(MixtureJson, RoundTrip) {
  CounterStream s(2, 0);
  const SeparableMixture m({0.25, 0.75}, {{random_state(3, s), random_state(3, s)},
                                         {random_state(3, s), random_state(3, s)}});
  const SeparableMixture back = mixture_from_json(json::parse(mixture_to_json(m).dump()));
  EXPECT_EQ(assemble(back).matrix(), assemble(m).matrix());
}

TEST(MixtureJson, MissingFileIsParseError) {
  EXPECT_EQ(kind_of([] { load_state_file("/nonexistent/projmi.json"); }), ErrorKind::ParseError);
  const std::string path = temp_file("projmi_broken.json", "{not json");
  EXPECT_EQ(kind_of([&] { load_state_file(path); }), ErrorKind::ParseError);
  std::remove(path.c_str());
}

TEST(StateSpec, Parsing) {
  const StateSpec spec = parse_state_spec("mixed_random:n=3,rank=2,seed=1");
  EXPECT_EQ(spec.family, "mixed_random");
  EXPECT_EQ(spec.params.at("rank"), "2");
  EXPECT_EQ(parse_state_spec("maxent").params.size(), 0u);
  EXPECT_EQ(parse_state_spec("file:/tmp/a,b=c.json").params.at("path"), "/tmp/a,b=c.json");
  EXPECT_EQ(kind_of([] { parse_state_spec(":d=3"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_state_spec("maxent:d"); }), ErrorKind::ParseError);
}

TEST(StateSpec, LoadFamilies) {
  EXPECT_EQ(*load_state("maxent:d=4").dims, BipartiteDims(4, 4));
  EXPECT_FALSE(load_state("maxmixed:n=3").dims.has_value());
  EXPECT_EQ(load_state("mixed_random:n=4,rank=2,seed=3").sigma.dim(), 4);
  EXPECT_EQ(*load_state("product:na=3,nb=4,seed=2").dims, BipartiteDims(3, 4));
  EXPECT_TRUE(is_product(load_state("product:d=3,seed=5").sigma, BipartiteDims(3, 3)));
  EXPECT_TRUE(ppt_check(load_state("separable_mixture:d=3,terms=3,seed=1").sigma, BipartiteDims(3, 3)));
  EXPECT_EQ(load_state("pure_random:n=3,seed=7").sigma.matrix(), load_state("pure_random:n=3,seed=7").sigma.matrix());
  EXPECT_NE(load_state("pure_random:n=3,seed=7").sigma.matrix(), load_state("pure_random:n=3,seed=8").sigma.matrix());
}

TEST(StateSpec, LoadErrors) {
  EXPECT_EQ(kind_of([] { load_state("bogus:d=3"); }), ErrorKind::UnknownFamily);
  EXPECT_EQ(kind_of([] { load_state("maxent:d=x"); }), ErrorKind::BadParameter);
  EXPECT_EQ(kind_of([] { load_state("maxent:d=3,q=1"); }), ErrorKind::BadParameter);
  EXPECT_EQ(kind_of([] { load_state("maxent"); }), ErrorKind::BadParameter);
  EXPECT_EQ(kind_of([] { load_state("maxent:d=2"); }), ErrorKind::BadParameter);
  EXPECT_EQ(kind_of([] { load_state("basis_pure:n=3,index=3"); }), ErrorKind::BadParameter);
}

}  // namespace
}  // namespace projmi
