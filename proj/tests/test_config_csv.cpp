#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/config.hpp"
#include "core/csvio.hpp"
#include "core/svgplot.hpp"
#include "doctest.h"

using namespace bdbm;

TEST_CASE("config parser: sections, comments, whitespace") {
  RunConfig cfg = parse_config(
      "# run setup\n"
      "schedule.kind = brownian\n"
      "schedule.k=1.5   # inline comment\n"
      "\n"
      "train.iters = 10\n"
      "net.hidden = 32,32\n");
  CHECK(cfg.values.size() == 4);
  CHECK(cfg.get_string("schedule.kind", "") == "brownian");
  CHECK(cfg.get_double("schedule.k", 0.0) == 1.5);
  CHECK(cfg.require_int("train.iters") == 10);
  CHECK(cfg.get_double("schedule.T", 9.0) == 9.0);  // fallback
}

TEST_CASE("config parser: rejects typos, duplicates, junk") {
  CHECK_THROWS_WITH_AS((void)parse_config("schedule.knid = brownian\n"),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS((void)parse_config("schedule.k = 1\nschedule.k = 2\n"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_WITH_AS((void)parse_config("schedule.k =\n"), doctest::Contains("empty value"),
                       ConfigError);
  CHECK_THROWS_AS((void)parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("train.iters = ten\nschedule.k = 1\n").require_int("train.iters"),
                  ConfigError);
}

TEST_CASE("vector and matrix literals") {
  vec v = parse_vec("1, 2.5, -3e-2");
  CHECK(v == vec{1.0, 2.5, -0.03});
  Mat m = parse_mat("1,0; 0.5,2");
  CHECK(m.rows == 2);
  CHECK(m(1, 0) == 0.5);
  CHECK_THROWS_WITH_AS((void)parse_mat("1,0;2"), doctest::Contains("ragged"), ConfigError);
  CHECK_THROWS_AS((void)parse_vec("1,,2"), ConfigError);
}

TEST_CASE("schedule/policy/net/loss builders honor defaults and bounds") {
  RunConfig cfg = parse_config("train.iters = 5\n");
  BridgeSchedule sched = build_schedule(cfg);
  CHECK(sched.kind() == ScheduleKind::brownian);
  CHECK(sched.k() == 2.0);
  CHECK(sched.T() == 1.0);
  CHECK(sched.time_mode() == TimeMode::continuous);

  RunConfig disc = parse_config("schedule.steps = 100\ntrain.iters = 5\n");
  CHECK(build_schedule(disc).time_mode() == TimeMode::discrete);
  CHECK(build_schedule(disc).steps() == 100);

  RunConfig custom = parse_config(
      "schedule.kind = custom\n"
      "schedule.knots = 0:1:0:0; 0.5:0.5:0.5:0.5; 1:0:1:0\n"
      "train.iters = 5\n");
  BridgeSchedule cs = build_schedule(custom);
  CHECK(cs.kind() == ScheduleKind::custom_table);
  ScheduleTriple mid = cs.eval(0.25);
  CHECK(mid.alpha == doctest::Approx(0.75));
  CHECK(mid.sigma2 == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)build_schedule(parse_config(
                      "schedule.kind = custom\nschedule.knots = 0:1:0\ntrain.iters = 1\n")),
                  ConfigError);

  TransitionVariancePolicy pol = build_policy(parse_config("policy.eta = 0.5\n"));
  CHECK(pol.variant == DeltaVariant::C_alpha_ratio);
  CHECK(pol.eta == 0.5);
  CHECK_THROWS_AS((void)build_policy(parse_config("policy.eta = 1.2\n")), ConfigError);

  NetConfig nc = build_net_config(parse_config("net.hidden = 16,8\nnet.seed = 9\n"));
  CHECK(nc.hidden == std::vector<uint32_t>{16, 8});
  CHECK(nc.seed == 9);
  CHECK_THROWS_AS((void)build_net_config(parse_config("net.hidden = 0\n")), ConfigError);
  CHECK_THROWS_AS((void)build_net_config(parse_config("net.time_emb_dim = 300\n")), ConfigError);

  LossConfig lc = build_loss_config(parse_config("train.iters = 12\nnet.param = endpoint_pair\n"));
  CHECK(lc.iterations == 12);
  CHECK(lc.param == Parameterization::endpoint_pair);
  CHECK(lc.batch == 256);
  // iterations is the one knob with no sane default
  CHECK_THROWS_WITH_AS((void)build_loss_config(parse_config("train.batch = 8\n")),
                       doctest::Contains("train.iters"), ConfigError);
}

TEST_CASE("coupling and sampler builders") {
  Coupling g = build_coupling(parse_config(
      "coupling.mean = 0,0\ncoupling.cov = 1,0;0,1\ntrain.iters = 1\n"));
  CHECK(g.kind() == CouplingKind::gaussian);

  Coupling m = build_coupling(parse_config(
      "coupling.kind = mapped2d\ncoupling.base = ring\ncoupling.map_b = 1,1\n"));
  CHECK(m.kind() == CouplingKind::mapped2d);
  CHECK_THROWS_AS((void)build_coupling(parse_config("coupling.kind = mapped2d\n")), ConfigError);
  CHECK_THROWS_AS((void)build_coupling(parse_config("coupling.kind = sea\n")), ConfigError);

  SamplerConfig sc = build_sampler_config(parse_config(
      "sample.direction = backward\nsample.nfe = 50\nsample.eta = 0\nsample.seed = 3\n"));
  CHECK(sc.direction == Direction::backward);
  CHECK(sc.nfe == 50);
  CHECK(sc.eta == 0.0);
  CHECK(sc.seed == 3);
  CHECK_THROWS_AS((void)build_sampler_config(parse_config("sample.nfe = 0\n")), ConfigError);
}

TEST_CASE("doubles print as shortest exact round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-8) == "-2.5e-08");
  double ugly = 1.0 / 3.0;
  CHECK(std::stod(format_double(ugly)) == ugly);
}

TEST_CASE("csv round trip with metadata") {
  CsvDoc doc;
  doc.meta = {{"command", "sample"}, {"seed", "42"}};
  doc.header = {"dim0", "dim1"};
  doc.rows = {{0.1, -2.0}, {1.0 / 3.0, 5e-9}};

  std::string text = csv_to_string(doc);
  std::istringstream is(text);
  CsvDoc back = read_csv(is);
  CHECK(back.meta == doc.meta);
  CHECK(back.header == doc.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0] == doc.rows[0]);
  CHECK(back.rows[1] == doc.rows[1]);  // exact, thanks to shortest round-trip
}

TEST_CASE("csv reader flags malformed input with line numbers") {
  std::istringstream bad_cell("a,b\n1,zap\n");
  CHECK_THROWS_WITH_AS((void)read_csv(bad_cell), doctest::Contains("line 2"), FormatError);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_WITH_AS((void)read_csv(ragged), doctest::Contains("line 3"), FormatError);

  std::istringstream empty("");
  CsvDoc nothing = read_csv(empty);  // comments-only / empty input is a valid empty doc
  CHECK(nothing.rows.empty());
  CHECK(nothing.header.empty());

  CHECK_THROWS_AS((void)read_csv_file("definitely_missing.csv"), IoError);
}

TEST_CASE("csv files are written atomically") {
  const char* path = "io_test_rows.csv";
  std::remove(path);
  CsvDoc doc;
  doc.header = {"x"};
  doc.rows = {{1.0}, {2.0}};
  write_csv_file(path, doc);
  CsvDoc back = read_csv_file(path);
  CHECK(back.rows.size() == 2);
  std::remove(path);
}

TEST_CASE("scatter svg: deterministic bytes, one circle per point") {
  std::vector<vec> pts{{0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}};
  std::string svg = render_scatter_svg(pts);
  CHECK(svg == render_scatter_svg(pts));
  size_t circles = 0, at = 0;
  while ((at = svg.find("<circle", at)) != std::string::npos) {
    ++circles;
    at += 7;
  }
  CHECK(circles == 3);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("640") != std::string::npos);

  CHECK_THROWS_AS((void)render_scatter_svg({}), ConfigError);
  CHECK_THROWS_AS((void)render_scatter_svg({{1.0}}), ConfigError);  // needs d = 2
  CHECK_THROWS_AS((void)render_scatter_svg({{1.0, std::nan("")}}), DomainError);

  // degenerate extent still renders (single point)
  std::string one = render_scatter_svg({{3.0, 3.0}});
  CHECK(one.find("<circle") != std::string::npos);

  const char* path = "io_test_plot.svg";
  std::remove(path);
  write_scatter_svg(path, pts);
  std::ifstream f(path);
  CHECK(bool(f));
  std::remove(path);
}
