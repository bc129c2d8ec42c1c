#include <gtest/gtest.h>

#include "capelast/config.hpp"
#include "capelast/error.hpp"

using namespace capelast;

TEST(Config, DefaultsForEmptyInput) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.init.nx, 32);
  EXPECT_EQ(c.init.nz, 17);
  EXPECT_EQ(c.k_max, 1);
  EXPECT_TRUE(c.step.dealias);
  EXPECT_TRUE(c.init.v.empty());
}

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse_config(R"(
[grid]
nx = 16
ny = 8
nz = 9
b = 2
[surface]
psi = mode 0.01 cos 1 0; random 0.001 3 7
[fields]
v = potential 0.1 sin 1 2; comp 3 0.5 cos 0 1 linear
F1 = tangent 1 1 cos 1
F2 = tangent 0.5 2 sin 3
[physics]
sigma = 0.25
cutoff = plateau
delta0 = 0.3
[time]
t_final = 2
dt = 0.01
dealias = false
filter = true
check_cfl = false
[output]
snapshot_every = 7
[solver]
tol = 1e-10
max_iter = 50
restart = 20
[diagnostics]
k_max = 2
rt_c0 = 0.1
history = 6
)");
  EXPECT_EQ(c.init.nx, 16);
  EXPECT_EQ(c.init.ny, 8);
  EXPECT_EQ(c.init.b, 2.0);
  ASSERT_EQ(c.init.psi.modes.size(), 1u);
  ASSERT_TRUE(c.init.psi.random.has_value());
  EXPECT_EQ(c.init.psi.random->seed, 7u);
  ASSERT_EQ(c.init.v.size(), 2u);
  EXPECT_EQ(c.init.v[0].kind, FieldTerm::Kind::kPotential);
  EXPECT_EQ(c.init.v[0].trig, Trig::kSin);
  EXPECT_EQ(c.init.v[1].component, 3);
  EXPECT_EQ(c.init.v[1].profile, DepthProfile::kLinear);
  EXPECT_EQ(c.init.F[0][0].kind, FieldTerm::Kind::kTangent);
  EXPECT_EQ(c.init.F[0][0].dir, 1);
  EXPECT_EQ(c.init.F[0][0].k2, 1);
  EXPECT_EQ(c.init.F[1][0].dir, 2);
  EXPECT_EQ(c.init.F[1][0].k1, 3);
  EXPECT_TRUE(c.init.F[2].empty());
  EXPECT_EQ(c.init.sigma, 0.25);
  EXPECT_EQ(c.init.cutoff, CutoffProfile::kPlateau);
  EXPECT_EQ(c.init.delta0, 0.3);
  EXPECT_EQ(c.t_final, 2.0);
  EXPECT_FALSE(c.step.dealias);
  EXPECT_TRUE(c.step.filter);
  EXPECT_FALSE(c.step.check_cfl);
  EXPECT_EQ(c.snapshot_every, 7);
  EXPECT_EQ(c.solver.max_iter, 50);
  EXPECT_EQ(c.k_max, 2);
  EXPECT_EQ(c.rt_c0, 0.1);
  EXPECT_EQ(c.history_length, 6u);
}

TEST(Config, RoundTripIsExact) {
  RunConfig c = parse_config(R"(
[surface]
psi = mode 0.1 sin 2 -1
[fields]
v = potential 0.123456789012345 cos 1 0
F3 = comp 1 0.3 cos 0 2 exp
[physics]
sigma = 0.1
[time]
dt = 0.024
)");
  c.t_final = 1.0 / 3.0;
  const RunConfig d = parse_config(to_config_text(c));
  EXPECT_EQ(to_config_text(d), to_config_text(c));
  EXPECT_EQ(d.t_final, c.t_final);
  EXPECT_EQ(d.init.v[0].amp, c.init.v[0].amp);
  EXPECT_EQ(d.init.psi.modes[0].k2, -1);
}

TEST(Config, RecipeStringsRoundTrip) {
  const FieldRecipe r = parse_field_recipe("potential 0.1 cos 1 0; tangent 2 2 sin 1; comp 2 1 sin 1 1 cos");
  EXPECT_EQ(parse_field_recipe(to_string(r)).size(), 3u);
  EXPECT_EQ(to_string(parse_field_recipe(to_string(r))), to_string(r));
  const SurfaceRecipe s = parse_surface_recipe("random 0.01 2 99");
  EXPECT_EQ(to_string(parse_surface_recipe(to_string(s))), to_string(s));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("[grid]\nnx = 7\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nnx = ten\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nnq = 8\n"), ConfigError);
  EXPECT_THROW(parse_config("[mesh]\nnx = 8\n"), ConfigError);
  EXPECT_THROW(parse_config("nx = 8\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\nsigma = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\ncutoff = cubic\n"), ConfigError);
  EXPECT_THROW(parse_config("[time]\ndt = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[time]\nfilter = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("[diagnostics]\nk_max = 5\n"), ConfigError);
  EXPECT_THROW(parse_field_recipe("potential 0.1 tan 1 0"), ConfigError);
  EXPECT_THROW(parse_field_recipe("comp 4 1 cos 1 0 one"), ConfigError);
  EXPECT_THROW(parse_field_recipe("tangent 1 3"), ConfigError);
  EXPECT_THROW(parse_field_recipe("potential 0.1 cos 1"), ConfigError);
  EXPECT_THROW(parse_surface_recipe("mode 0.1 cos 1 0 extra"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/run.ini"), ConfigError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"rest.ini", "capillary.ini", "dispersion.ini", "limit.ini"})
    EXPECT_NO_THROW(load_config(std::string(CAPELAST_CONFIG_DIR) + "/" + name)) << name;
}
