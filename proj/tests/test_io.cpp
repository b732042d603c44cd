#include "doctest.h"

#include "fixtures.hpp"

#include "coloc/config_io.hpp"
#include "coloc/instance_io.hpp"
#include "coloc/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coloc;

namespace {

const char* kPath = R"(# path network
2 3 1
1 0
0 0
0 1
1 1   # anchor
1 2
2 3
3 4
)";

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(0, 0, "");
}

}  // namespace

TEST_CASE("instance file round trip") {
  const auto inst = parse_instance_string(kPath);
  CHECK(inst.dim == 2);
  CHECK(inst.topology.n_sensors() == 3);
  CHECK(inst.topology.n_anchors() == 1);
  CHECK(inst.topology.links() == fixtures::path_topology().links());
  CHECK(inst.positions->matrix() == fixtures::path_positions().matrix());
  CHECK_FALSE(inst.measurements.has_value());

  const auto again = parse_instance_string(format_instance(inst));
  CHECK(again.topology.links() == inst.topology.links());
  CHECK(again.positions->matrix() == inst.positions->matrix());
}

TEST_CASE("instance ranges") {
  const auto inst = parse_instance_string("2 1 3\n0.5 0.5\n0 0\n1 0\n0 1\n1 2 0.7\n1 3 0.71 0.02\n1 4 0.69\n");
  REQUIRE(inst.measurements.has_value());
  CHECK(inst.measurements->measured == std::vector<double>{0.7, 0.71, 0.69});
  CHECK(inst.measurements->sigma == std::vector<double>{1.0, 0.02, 1.0});

  const auto e = parse_error([] { parse_instance_string("2 1 2\n0 0\n1 0\n0 1\n1 2 0.7\n1 3\n"); });
  CHECK(e.line() == 6);
}

TEST_CASE("topology-only instance") {
  const auto inst = parse_instance_string("2 1 3\n1 2\n1 3\n1 4\n", true);
  CHECK_FALSE(inst.positions.has_value());
  CHECK(inst.topology.n_links() == 3);
}

TEST_CASE("instance parse errors carry line and column") {
  SUBCASE("bad number") {
    const auto e = parse_error([] { parse_instance_string("2 1 1\n0 zz\n1 1\n1 2\n"); });
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("line 2, column 3") != std::string::npos);
  }
  SUBCASE("wrong coordinate count") {
    const auto e = parse_error([] { parse_instance_string("# c\n2 1 1\n0 0 0\n1 1\n1 2\n"); });
    CHECK(e.line() == 3);
  }
  SUBCASE("index out of range") {
    const auto e = parse_error([] { parse_instance_string("2 1 1\n0 0\n1 1\n1 3\n"); });
    CHECK(e.line() == 4);
    CHECK(e.column() == 3);
  }
  SUBCASE("self-loop") {
    const auto e = parse_error([] { parse_instance_string("2 1 1\n0 0\n1 1\n1 2\n2 2\n"); });
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
  }
  SUBCASE("anchor-to-anchor") {
    const auto e = parse_error([] { parse_instance_string("2 1 2\n0 0\n1 1\n0 1\n2 3\n"); });
    CHECK(std::string(e.what()).find("anchor-to-anchor") != std::string::npos);
  }
  SUBCASE("empty file") { parse_error([] { parse_instance_string("# nothing\n"); }); }
  SUBCASE("missing coordinates") { parse_error([] { parse_instance_string("2 2 1\n0 0\n"); }); }
}

TEST_CASE("config parsing and grid expansion") {
  const auto cfg = parse_config_string(R"(
trials = 300
seed = 12
policy = propagate
sweep.model = erg
sweep.param = 0.3, 0.5
sweep.n_sensors = 8 16
sweep.model = degree
sweep.delta_s = 2 4
sweep.delta_a = 1
sweep.n_sensors = 16
sweep.model = erg
sweep.param = 1
sweep.n_sensors = 1
sweep.n_anchors = 3 4 5
sweep.anchors = directions
)");
  CHECK(cfg.run.trials == 300);
  CHECK(cfg.seed == 12);
  CHECK(cfg.run.policy == SingularPolicy::PropagateInfinite);
  REQUIRE(cfg.blocks.size() == 3);
  const auto grid = expand_grid(cfg);
  REQUIRE(grid.size() == 4 + 2 + 3);
  CHECK(model_params(grid[0].model) == "p=0.3");
  CHECK(model_params(grid[1].model) == "p=0.5");
  CHECK(grid[2].n_sensors == 16);
  CHECK(model_params(grid[5].model) == "ds=4;da=1");
  CHECK(grid[8].n_anchors == 5);
  CHECK(grid[8].anchors.placement == AnchorPlacement::UniformDirections);

  const auto echo = to_json(cfg);
  CHECK(echo["grid_points"] == 9);
  CHECK(echo["policy"] == "propagate");
}

TEST_CASE("config errors") {
  const auto unknown = parse_error([] { parse_config_string("trials = 10\nfoo = 1\n"); });
  CHECK(unknown.line() == 2);
  parse_error([] { parse_config_string("sweep.param = 1\n"); });
  parse_error([] { parse_config_string("sweep.model = erg\nsweep.n_sensors = 4\n"); });
  parse_error([] { parse_config_string("sweep.model = degree\nsweep.param = 1\nsweep.n_sensors = 4\n"); });
  parse_error([] { parse_config_string("sweep.model = tree\n"); });
  parse_error([] { parse_config_string("trials = 0\n"); });
  parse_error([] { parse_config_string("trials = abc\n"); });
  parse_error([] { parse_config_string("sweep.model = erg\nsweep.param = 1\nsweep.n_sensors = 4\ntrials = 5\n"); });
  CHECK(expand_grid(parse_config_string("trials = 5\n")).empty());
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(json_number(INFINITY) == "infinite");
  CHECK(json_number(NAN).is_null());
}

TEST_CASE("summary CSV") {
  SUBCASE("empty grid is header only") {
    const auto csv = summary_csv({});
    CHECK(csv.rfind("model,params,n_sensors,delta_s,delta_a,lb,agdop_mean,agdop_min,agdop_q1,agdop_median,"
                    "agdop_q3,agdop_max,singular_fraction,trials",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    CHECK(csv.find('\r') == std::string::npos);
  }
  SUBCASE("rows") {
    ConfigSummary s;
    s.model = "degree";
    s.params = "ds=2;da=1";
    s.n_sensors = 3;
    s.lb = 2.0;
    s.status = "error: a, b";
    const std::vector<ConfigSummary> rows{s};
    const auto csv = summary_csv(rows);
    CHECK(csv.find("degree,ds=2;da=1,3,") != std::string::npos);
    CHECK(csv.find("\"error: a, b\"\n") != std::string::npos);
  }
}

TEST_CASE("sha256 digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest references each output once") {
  const auto dir = std::filesystem::temp_directory_path() / "coloc_io_test";
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries{write_output(dir, "a.csv", "h\n1\n2\n"), write_output(dir, "b.csv", "h\n")};
  CHECK(entries[0].rows == 2);
  CHECK(entries[1].rows == 0);
  std::ifstream in(dir / "a.csv", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(sha256_hex(buf.str()) == entries[0].sha256);
  const auto m = make_manifest(nlohmann::json::object(), 5, entries);
  CHECK(m["outputs"].size() == 2);
  CHECK(m["seed"] == 5);
  CHECK(m["version"] == kToolVersion);
  std::filesystem::remove_all(dir);
}
