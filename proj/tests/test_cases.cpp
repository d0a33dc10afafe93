#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qgfv/cases.hpp"

using namespace qgfv;
using fixtures::max_abs;

namespace {

CaseConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_case_config(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

double rel_max_diff(const CellField& a, const CellField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / std::max(max_abs(a), max_abs(b));
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("explicit keys") {
    const auto c = parse(
        "# wind-driven basin\n"
        "case = wind_basin\n"
        "scheme = ivfv2\n"
        "mesh.quad = 16, 8, 2e5, 1e5\n"
        "dt = 600   # seconds\n"
        "steps = 25\n"
        "output_every = 5\n"
        "f0 = 1.2e-4\nbeta = 2e-11\ng = 9.8\nH = 3000\nalpha = 1e-7\nmu = 10\ntau0 = 2e-4\n"
        "wind_sign = 1\n");
    CHECK(c.kind == CaseKind::WindBasin);
    CHECK(c.scheme == SchemeKind::IVFV2);
    CHECK(c.mesh.kind == MeshSpec::Kind::Quad);
    CHECK(c.mesh.nx == 16);
    CHECK(c.mesh.ny == 8);
    CHECK(c.mesh.Lx == 2e5);
    CHECK(c.mesh.Ly == 1e5);
    CHECK(c.dt == 600.0);
    CHECK(c.steps == 25);
    CHECK(c.output_every == 5);
    CHECK(c.params.f0 == 1.2e-4);
    CHECK(c.params.beta == 2e-11);
    CHECK(c.params.g == 9.8);
    CHECK(c.params.H == 3000.0);
    CHECK(c.params.alpha == 1e-7);
    CHECK(c.params.mu == 10.0);
    CHECK(c.tau0 == 2e-4);
    CHECK(c.wind_sign == 1.0);
  }
  SUBCASE("case defaults fill unset keys") {
    const auto circ = parse("mesh.quad = 4,4,1,1\n");
    CHECK(circ.kind == CaseKind::Circular);
    CHECK(circ.scheme == SchemeKind::IVFV1);
    CHECK(circ.params.alpha == 0.0);
    CHECK(circ.params.mu == 0.0);
    CHECK(circ.tau0 == 0.0);
    CHECK(circ.dt == 1350.0);
    const auto wind = parse("case = wind_basin\nmesh.quad = 4,4,1,1\n");
    CHECK(wind.scheme == SchemeKind::VSFV2);
    CHECK(wind.params.alpha == 3e-8);
    CHECK(wind.params.mu == 40.0);
    CHECK(wind.tau0 == 1e-4);
    CHECK(wind.wind_sign == -1.0);
    const auto stommel = parse("case = steady_stommel\nmesh.quad = 4,4,1,1\n");
    CHECK(stommel.params.alpha == 5e-8);
    CHECK(stommel.params.mu == 0.0);
    const auto munk = parse("case = steady_munk\nmesh.quad = 4,4,1,1\nsteady.method = relaxation\n");
    CHECK(munk.params.mu == 100.0);
    CHECK(munk.steady_method == SteadyMethod::Relaxation);
  }
  SUBCASE("mesh sources") {
    const auto f = parse("mesh_file = meshes/basin.qgmesh\n");
    CHECK(f.mesh.kind == MeshSpec::Kind::File);
    CHECK(f.mesh.file == "meshes/basin.qgmesh");
    const auto v = parse("mesh.cvt = 300, 50, 11\ndomain = 2, 1\n");
    CHECK(v.mesh.kind == MeshSpec::Kind::Cvt);
    CHECK(v.mesh.cvt.n_generators == 300);
    CHECK(v.mesh.cvt.lloyd_iterations == 50);
    CHECK(v.mesh.cvt.seed == 11);
    CHECK(v.domain_Lx == 2.0);
    CHECK(v.domain_Ly == 1.0);
  }
  SUBCASE("errors name the offending line") {
    CHECK(parse_error("mesh.quad = 4,4,1,1\nviscosity = 3\n").find("line 2 (viscosity): unknown key") !=
          std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\ndt = 1\ndt = 2\n").find("line 3") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\ndt = fast\n").find("not a finite number") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\ndt = -1\n").find("positive") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\noutput_every = 0\n").find("cadence") != std::string::npos);
    CHECK(parse_error("mesh.quad = 1,4,1,1\n").find("line 1") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1\n").find("4 comma-separated") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\ncase = hurricane\n").find("unknown case") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\nscheme = RK4\n").find("unknown scheme") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\nwind_sign = 2\n").find("wind_sign") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\njust words\n").find("key = value") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\nH = 0\n").find("H must be positive") != std::string::npos);
    CHECK(parse_error("dt = 5\n").find("needs one of") != std::string::npos);
    CHECK(parse_error("mesh.quad = 4,4,1,1\nmesh_file = a\n").find("more than one") != std::string::npos);
  }
  SUBCASE("resolved echo parses back to itself") {
    for (const char* text : {"case = steady_munk\nmesh.cvt = 100,20,3\nsteady.dt = 3600\n",
                             "mesh.quad = 32,32,3335884.6,3335884.6\nf0 = 1.1e-4\nvorticity_gf0_factor = false\n",
                             "case = wind_basin\nmesh_file = m.qgmesh\nboundary_pv_update = no\n"}) {
      const std::string once = format_case_config(parse(text));
      CHECK(format_case_config(parse(once)) == once);
    }
  }
}

TEST_CASE("case meshes") {
  const auto q = build_case_mesh(parse("mesh.quad = 4,3,2,1\n"));
  CHECK(q.num_cells() == 20);
  const auto dir = std::filesystem::temp_directory_path() / "qgfv_test_cases";
  std::filesystem::create_directories(dir);
  save_mesh(q, dir / "q.qgmesh");
  const auto loaded = build_case_mesh(parse("mesh_file = q.qgmesh\n"), dir);
  CHECK(mesh_checksum(loaded) == mesh_checksum(q));
  CHECK_THROWS_AS(build_case_mesh(parse("mesh_file = missing.qgmesh\n"), dir), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("circular flow") {
  SUBCASE("profile") {
    CHECK(circular_stream_function(0.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(circular_stream_function(3.0)) < 1e-12);
  }
  const auto m = build_quad_mesh(32, 32, kEarthRadius * std::numbers::pi / 6.0, kEarthRadius * std::numbers::pi / 6.0);
  const PhysicalParams p;
  const auto flow = init_circular_flow(m, p);
  SUBCASE("flat on the boundary with zero mass") {
    double l = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < m.num_cells(); ++i)
      if (m.is_boundary_cell(static_cast<Index>(i))) {
        if (std::isnan(l)) l = flow.psi[i];
        CHECK(flow.psi[i] == l);
      }
    const double mass = inner_product_cell(m, flow.psi, CellField(m.num_cells(), 1.0));
    double scale = 0.0;
    for (std::size_t i = 0; i < m.num_cells(); ++i) scale += std::abs(flow.psi[i]) * m.cell_area(static_cast<Index>(i));
    CHECK(std::abs(mass) <= 1e-12 * scale);
  }
  SUBCASE("round trip through the constrained inversion") {
    const auto s = solve_constrained_streamfunction(m, p, flow.q);
    CHECK(rel_max_diff(s.psi, flow.psi) <= 1e-10);
  }
  SUBCASE("clockwise eddy with realistic speed") {
    auto u = skew_gradient(m, remap_cell_to_vertex(m, flow.psi));
    u *= p.velocity_scale();
    const double umax = max_abs(u);
    CHECK(umax > 0.3);
    CHECK(umax < 2.0);
    // centre is a maximum of psi; with u = (g/f0) k x grad psi that turns clockwise
    const Box box = mesh_box(m);
    const Index c = fixtures::cell_at(m, {0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)});
    REQUIRE(c != kNoIndex);
    CHECK(flow.psi[c] == doctest::Approx(fixtures::max_abs(flow.psi)));
  }
  SUBCASE("basin too small for the eddy") {
    // the bounding-box centre of an L-shape is its re-entrant corner
    Polygon ell{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
    const auto lm = build_cvt_mesh(ell, {200, 60, 1});
    CHECK_THROWS_AS(init_circular_flow(lm, p), ConfigError);
  }
}

TEST_CASE("wind forcing") {
  SUBCASE("stress profile") {
    CHECK(wind_stress(0.0, 0.0, 3e6, 1e-4) == 1e-4);
    CHECK(std::abs(wind_stress(1.5e6, 0.0, 3e6, 1e-4)) < 1e-20);
  }
  const double L = 3e6;
  const auto m = build_quad_mesh(64, 64, L, L);
  SUBCASE("curl is minus the stress derivative") {
    const auto curl = wind_curl_field(m, 1e-4, 1.0);
    for (std::size_t i = 0; i < m.num_cells(); i += 7) {
      const double y = m.cell_center(static_cast<Index>(i)).y;
      const double h = 1.0;
      const double fd = -(wind_stress(y + h, 0.0, L, 1e-4) - wind_stress(y - h, 0.0, L, 1e-4)) / (2 * h);
      CHECK(curl[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-4 / L));
    }
    const auto flipped = wind_curl_field(m, 1e-4, -1.0);
    for (std::size_t i = 0; i < m.num_cells(); ++i) CHECK(flipped[i] == -curl[i]);
  }
  SUBCASE("area integral equals the line integral of the stress") {
    const auto curl = wind_curl_field(m, 1e-4, 1.0);
    const double total = inner_product_cell(m, curl, CellField(m.num_cells(), 1.0));
    CHECK(total == doctest::Approx(2e-4 * L).epsilon(1e-3));
  }
  SUBCASE("scheme forcing is divided by the depth") {
    PhysicalParams p;
    const auto f = wind_forcing(m, p, 1e-4, -1.0);
    const auto curl = wind_curl_field(m, 1e-4, -1.0);
    for (std::size_t i = 0; i < m.num_cells(); ++i) CHECK(f.wind_curl[i] == doctest::Approx(curl[i] / p.H));
  }
}

TEST_CASE("steady linear solves") {
  PhysicalParams p;
  p.alpha = 5e-8;
  SUBCASE("no wind, no flow") {
    const auto& m = fixtures::quad8();
    const Forcing none{CellField(m.num_cells())};
    SteadyOptions relax;
    relax.method = SteadyMethod::Relaxation;
    CHECK(max_abs(steady_linear_solve(m, p, none, SteadyMode::Stommel).psi) == 0.0);
    CHECK(max_abs(steady_linear_solve(m, p, none, SteadyMode::Stommel, relax).psi) == 0.0);
  }
  SUBCASE("direct and relaxation agree on 8x8") {
    const auto m = build_quad_mesh(8, 8, 2e5, 2e5);
    const auto f = wind_forcing(m, p, 1e-4, -1.0);
    SteadyOptions relax;
    relax.method = SteadyMethod::Relaxation;
    for (auto mode : {SteadyMode::Stommel, SteadyMode::Munk}) {
      auto pm = p;
      pm.mu = 100.0;
      const auto a = steady_linear_solve(m, pm, f, mode);
      const auto b = steady_linear_solve(m, pm, f, mode, relax);
      CHECK(b.steps > 0);
      CHECK(rel_max_diff(a.psi, b.psi) <= 1e-6);
      CHECK(a.residual <= 1e-8);
      CHECK(b.residual <= 1e-8);
    }
  }
  SUBCASE("Stommel layer against the closed form") {
    const double L = 2e5;
    const auto m = build_quad_mesh(48, 48, L, L);
    const auto f = wind_forcing(m, p, 1e-4, -1.0);
    const auto s = steady_linear_solve(m, p, f, SteadyMode::Stommel);
    CHECK(s.residual <= 1e-8);
    const oracles::Stommel exact(L, L, p.alpha, p.beta, -1e-4 * std::numbers::pi / L / p.H, p.g_over_f0());
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < m.num_cells(); ++i) {
      const Vec2 c = m.cell_center(static_cast<Index>(i));
      ref = std::max(ref, std::abs(exact.psi(c.x, c.y)));
      if (c.x >= 0.1 * L && c.x <= 0.9 * L && c.y >= 0.1 * L && c.y <= 0.9 * L)
        err = std::max(err, std::abs(s.psi[i] - s.l - exact.psi(c.x, c.y)));
    }
    CHECK(err <= 0.1 * ref);
    const auto rep = boundary_layer_report(m, s.psi);
    CHECK(rep.ratio > 5.0);
    CHECK(rep.west_width > 0.0);
    CHECK(rep.west_width < 0.1 * L);
  }
  SUBCASE("Munk layer is broader and gentler at the wall") {
    const double L = 1e6;
    const auto m = build_quad_mesh(48, 48, L, L);
    const auto f = wind_forcing(m, p, 1e-4, -1.0);
    auto pm = p;
    pm.mu = 100.0;
    const auto st = steady_linear_solve(m, pm, f, SteadyMode::Stommel);
    const auto mu = steady_linear_solve(m, pm, f, SteadyMode::Munk);
    const auto rs = boundary_layer_report(m, st.psi), rm = boundary_layer_report(m, mu.psi);
    CHECK(rm.ratio > 5.0);
    CHECK(rm.west_max_gradient < rs.west_max_gradient);
    // the same Sverdrup interior carries the same transport in both
    const Index mid = fixtures::cell_at(m, {0.5 * L, 0.5 * L});
    REQUIRE(mid != kNoIndex);
    CHECK(mu.psi[mid] - mu.l == doctest::Approx(st.psi[mid] - st.l).epsilon(0.05));
    CHECK(format_boundary_layer_report(rm).find("east_width") != std::string::npos);
  }
  SUBCASE("mode checks") {
    const auto& m = fixtures::quad8();
    const Forcing none{CellField(m.num_cells())};
    CHECK_THROWS_AS(steady_linear_solve(m, p, none, SteadyMode::Munk), ConfigError);
    SteadyOptions relax;
    relax.method = SteadyMethod::Relaxation;
    relax.max_steps = 3;
    const auto mm = build_quad_mesh(8, 8, 2e5, 2e5);
    CHECK_THROWS_AS(steady_linear_solve(mm, p, wind_forcing(mm, p, 1e-4, -1.0), SteadyMode::Stommel, relax),
                    SolverError);
  }
}

TEST_CASE("boundary-layer report on a symmetric field") {
  const auto m = build_quad_mesh(16, 16, 1.0, 1.0);
  CellField psi(m.num_cells());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Vec2 c = m.cell_center(static_cast<Index>(i));
    psi[i] = std::sin(std::numbers::pi * c.x) * std::sin(std::numbers::pi * c.y);
  }
  const auto r = boundary_layer_report(m, psi);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.west_width == doctest::Approx(r.east_width).epsilon(1e-12));
}
