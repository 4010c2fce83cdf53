#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spl/io/config.hpp"
#include "spl/io/csv.hpp"
#include "spl/io/presets.hpp"
#include "spl/io/svg.hpp"

using namespace spl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::size_t line_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(ParseConfig, EmptyInputNeedsModel) {
  EXPECT_EQ(error_of(""), "missing section: model");
  EXPECT_EQ(error_of("# only a comment\n\n"), "missing section: model");
  EXPECT_EQ(error_of("grid.n_cells = 10\n"), "missing section: model");
}

TEST(ParseConfig, TwoBumpParametersAreValid) {
  const auto c = parse_config("model.m = 20\nmodel.nu = 0.5   # viscosity\nmodel.p_M = 5\n"
                              "grid.x_min = -2\ngrid.x_max = 2\ngrid.n_cells = 400\n"
                              "initial.preset = two-bump\nstepping.t_end = 2.5\n"
                              "stepping.snapshot_times = 0.5, 1.5, 2, 2.5\n");
  EXPECT_EQ(c.model.m, 20.0);
  EXPECT_EQ(c.model.nu, 0.5);
  EXPECT_EQ(c.model.growth.p_M(), 5.0);
  EXPECT_EQ(c.model.M0, 5.0);
  EXPECT_EQ(c.grid.n_cells, 400u);
  EXPECT_EQ(c.initial.preset, "two-bump");
  EXPECT_EQ(c.stepping.snapshot_times, (std::vector<double>{0.5, 1.5, 2.0, 2.5}));
  EXPECT_EQ(c.stepping.dt, 0.0);
}

TEST(ParseConfig, ZeroViscosityRejected) {
  EXPECT_EQ(error_of("model.m = 20\nmodel.nu = 0\n"), "line 2: nu must be > 0 (ν=0 case not treated)");
}

TEST(ParseConfig, ErrorsNameTheLine) {
  EXPECT_EQ(line_of("model.m = 20\nmodel.colour = red\n"), 2u);
  EXPECT_NE(error_of("model.m = 20\nmodel.colour = red\n").find("unknown key 'model.colour'"), std::string::npos);
  EXPECT_EQ(line_of("model.m = 20\n\nthis is not a key\n"), 3u);
  EXPECT_EQ(line_of("model.m = twenty\n"), 1u);
  EXPECT_EQ(line_of("model.m = 20\nmodel.m = 30\n"), 2u);
  EXPECT_EQ(line_of("model.m = 1\n"), 1u);
  EXPECT_EQ(line_of("model.m = 20\nstepping.scheme = rk4\n"), 2u);
  EXPECT_EQ(line_of("model.m = 20\nm = 3\n"), 2u);
  EXPECT_EQ(line_of("model.m = 20\nmodel.nu =\n"), 2u);
}

TEST(ParseConfig, CrossKeyConstraints) {
  EXPECT_EQ(line_of("model.m = 20\ngrid.x_min = 1\ngrid.x_max = 0\n"), 3u);
  EXPECT_EQ(line_of("model.m = 20\nstepping.t_end = 1\nstepping.snapshot_times = 0.5, 2\n"), 3u);
  EXPECT_EQ(line_of("model.m = 20\nstepping.snapshot_times = 0.5, 0.2\n"), 2u);
  EXPECT_EQ(line_of("model.m = 20\ninitial.preset = csv\n"), 2u);
  EXPECT_EQ(line_of("model.m = 20\nconverge.m_values = 20, 10\n"), 2u);
}

TEST(ParseConfig, OptionalValues) {
  const auto c = parse_config("model.m = 20\nstepping.dt = 1e-3\nbarrier.A0 = 0\nlemma.seed = 18446744073709551615\n"
                              "output.formats = csv\n");
  EXPECT_EQ(c.stepping.dt, 1e-3);
  ASSERT_TRUE(c.barrier.A0.has_value());
  EXPECT_EQ(*c.barrier.A0, 0.0);
  EXPECT_EQ(c.lemma.seed, 18446744073709551615ULL);
  EXPECT_TRUE(c.output.csv);
  EXPECT_FALSE(c.output.svg);
  EXPECT_FALSE(parse_config("model.m = 20\nbarrier.A0 = auto\n").barrier.A0.has_value());
}

TEST(Presets, FormulasMatchDocumentation) {
  auto c = parse_config("model.m = 20\ngrid.x_min = -2\ngrid.x_max = 2\ngrid.n_cells = 400\ninitial.preset = two-bump\n");
  const Field two = initial_density(c);
  const double x = two.grid.center(150);
  const double expected = 0.8 * (std::exp(-(x - 0.5) * (x - 0.5) / 0.08) + std::exp(-(x + 0.5) * (x + 0.5) / 0.08));
  EXPECT_DOUBLE_EQ(two[150], std::min(1.0, expected));

  c = parse_config("model.m = 20\ngrid.geometry = radial\ngrid.x_min = 0\ngrid.x_max = 4\ngrid.n_cells = 800\n"
                   "initial.preset = radial-tumor\n");
  const Field tumor = initial_density(c);
  EXPECT_EQ(tumor[0], 1.0);
  EXPECT_DOUBLE_EQ(tumor[500], 0.9 * (1.0 - (tumor.grid.center(500) - 1.5) / 2.0));
  EXPECT_EQ(tumor[799], 0.0);

  c = parse_config("model.m = 20\ninitial.preset = uniform-nucleation\ninitial.value = 0.2\n");
  const LimitState s = initial_limit_state(c);
  for (double u : s.u.values) EXPECT_NEAR(u, 0.2, 1e-15);

  c = parse_config("model.m = 20\ngrid.x_min = -2\ngrid.x_max = 2\ngrid.n_cells = 400\ninitial.preset = merging\n"
                   "initial.separation = 0.2\ninitial.radius = 1\n");
  EXPECT_EQ(extract_free_boundary(initial_limit_state(c).u).count(), 4u);
}

TEST(Presets, CsvInitialData) {
  const auto dir = std::filesystem::temp_directory_path() / "spl_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "rho.csv");
    f << "# comment\nx,rho\n";
    const Grid g = Grid::cartesian(0.0, 1.0, 4);
    for (std::size_t i = 0; i < 4; ++i) f << format_double(g.center(i)) << "," << 0.25 * i << "\n";
  }
  std::ofstream(dir / "run.cfg") << "model.m = 20\ngrid.x_min = 0\ngrid.x_max = 1\ngrid.n_cells = 4\n"
                                    "initial.preset = csv\ninitial.file = rho.csv\n";
  const auto c = load_config((dir / "run.cfg").string());
  const Field rho = initial_density(c);
  EXPECT_EQ(rho.values, (std::vector<double>{0.0, 0.25, 0.5, 0.75}));

  std::ofstream(dir / "bad.cfg") << "model.m = 20\ngrid.x_min = 0\ngrid.x_max = 1\ngrid.n_cells = 5\n"
                                    "initial.preset = csv\ninitial.file = rho.csv\n";
  EXPECT_THROW(initial_density(load_config((dir / "bad.cfg").string())), InvalidData);
  EXPECT_THROW(load_config((dir / "missing.cfg").string()), ConfigError);
}

TEST(Csv, FullPrecisionRoundTrip) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(time_tag(0.05), "0.05");
}

TEST(Csv, SnapshotSchema) {
  ModelParams p;
  const Grid g = Grid::cartesian(0.0, 1.0, 3);
  const PmeState s{Field(g, {0.0, 0.5, 1.0}, 0.25), p, pme_zero_flux()};
  const std::string csv = snapshot_csv(s);
  std::istringstream in(csv);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, "# stiff-pressure-lab schema v1");
  EXPECT_EQ(l2, "# time = 0.25");
  EXPECT_EQ(l3, "x,rho,p,u");
  EXPECT_EQ(count(csv, "\n"), 6u);

  const LimitState ls{Field(g, {-0.3, 0.0, 0.4}, 0.5), p, limit_zero_flux()};
  const std::string lcsv = snapshot_csv(ls);
  EXPECT_NE(lcsv.find("x,u,b_u,p\n"), std::string::npos);
  EXPECT_NE(lcsv.find("0.16666666666666666,-0.29999999999999999,0,0.29999999999999999\n"), std::string::npos);
}

TEST(Csv, FreeBoundaryRowsPerPoint) {
  FreeBoundary a, b;
  a.time = 0.1;
  b.time = 0.2;
  b.positions = {0.25, 0.75};
  const std::string csv = free_boundary_csv({a, b});
  EXPECT_EQ(csv, "# stiff-pressure-lab schema v1\ntime,count,index,position\n0.20000000000000001,2,0,0.25\n"
                 "0.20000000000000001,2,1,0.75\n");
}

TEST(Svg, NiceTicks) {
  EXPECT_EQ(detail::nice_ticks(0.0, 1.05), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(detail::nice_ticks(-2.0, 2.0), (std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0}));
  EXPECT_EQ(detail::nice_ticks(0.0, 1.2).back(), 1.0);
}

TEST(Svg, TwinAxesAndDashedPressure) {
  const std::vector<double> x{0.0, 0.5, 1.0}, rho{0.2, 1.0, 0.2}, p{0.0, 2.0, 0.0};
  const std::string svg = twin_axis_svg(x, rho, p, "t = 0.5 & more");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 1u);
  EXPECT_NE(svg.find(">density<"), std::string::npos);
  EXPECT_NE(svg.find(">pressure<"), std::string::npos);
  EXPECT_NE(svg.find(">1<"), std::string::npos);  // density axis ticks stop below 1.05
  EXPECT_EQ(svg.find(">1.2<"), std::string::npos);
  EXPECT_NE(svg.find(">2<"), std::string::npos);  // pressure axis auto-scaled to 1.05 * max = 2.1
  EXPECT_NE(svg.find("t = 0.5 &amp; more"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_EQ(svg, twin_axis_svg(x, rho, p, "t = 0.5 & more"));
  EXPECT_THROW(twin_axis_svg({0.0}, {0.0}, {0.0}, ""), InvalidParameter);
}
