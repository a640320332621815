#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tomo/cli.hpp"
#include "tomo/io.hpp"
#include "tomo/model.hpp"

using namespace tomo;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tomo-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter() {
    static int c = 0;
    return c++;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("parse_snr_grid forms") {
  CHECK(parse_snr_grid("4:2:14") == std::vector<double>{4, 6, 8, 10, 12, 14});
  CHECK(parse_snr_grid("10") == std::vector<double>{10});
  CHECK(parse_snr_grid("1,3,9") == std::vector<double>{1, 3, 9});
  CHECK(parse_snr_grid("0:5:10") == std::vector<double>{0, 5, 10});
  CHECK(parse_snr_grid("0:3:10") == std::vector<double>{0, 3, 6, 9});
  CHECK_THROWS_AS(parse_snr_grid("4:0:14"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("14:2:4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("a:b:c"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid(""), std::invalid_argument);
}

TEST_CASE("instance file round trip") {
  Mat h = make_mat({{1.0, 0.25}, {-0.5, 2.0}, {0.0, 1.5}});
  const Vec x{0.1, -0.2, 0.3};
  const std::string text = format_instance(h, x);
  const Instance inst = parse_instance(text);
  REQUIRE(inst.H.rows() == 3);
  REQUIRE(inst.H.cols() == 2);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) CHECK(inst.H(r, c) == h(r, c));
    CHECK(inst.x[r] == x[r]);
  }

  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n0 1\n"), std::invalid_argument);   // missing x
  CHECK_THROWS_AS(parse_instance("junk"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n0 1\n1 1\n7\n"), std::invalid_argument);  // extra
}

TEST_CASE("key-value config parsing") {
  const auto kv = parse_key_values("# comment\n d = 8\np=8\nsnr = 4:2:14 # inline\n"
                                   "detectors = \"mmse,tlsd\"\n\n");
  CHECK(kv.at("d") == "8");
  CHECK(kv.at("p") == "8");
  CHECK(kv.at("snr") == "4:2:14");
  CHECK(kv.at("detectors") == "mmse,tlsd");
  CHECK_THROWS_AS(parse_key_values("novalue\n"), std::invalid_argument);

  SimConfig cfg;
  apply_config_entry(cfg, "d", "4");
  apply_config_entry(cfg, "constellation_m", "4");
  apply_config_entry(cfg, "detectors", "tlsd,ml");
  apply_config_entry(cfg, "max_sweeps", "7");
  apply_config_entry(cfg, "arbitrate_with_sic", "false");
  CHECK(cfg.d == 4);
  CHECK(cfg.constellation_m == 4);
  CHECK(cfg.detectors == std::vector<Detector>{Detector::kTlsd, Detector::kMl});
  CHECK(cfg.tlsd.max_sweeps == 7);
  CHECK(!cfg.tlsd.arbitrate_with_sic);
  CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "detectors", "zf,warp"), std::invalid_argument);
}

TEST_CASE("csv schema and formatting") {
  CHECK(csv_header() ==
        "snr_db,detector,ser,symbol_errors,symbols_total,vector_errors,frames_total");
  SerRecord r;
  r.snr_db = 4.0;
  r.detector = Detector::kMmseSic;
  r.symbol_errors = 123;
  r.symbols_total = 4000;
  r.ser = 123.0 / 4000.0;
  r.vector_errors = 77;
  r.frames_total = 10;
  const std::string csv = csv_from_records({r});
  CHECK(csv == csv_header() + "\n4,mmse-sic,0.03075,123,4000,77,10\n");
}

TEST_CASE("simulate subcommand writes reproducible outputs") {
  TempDir dir;
  const std::vector<std::string> args{
      "simulate",      "--d",   "4",  "--p",       "4",
      "--mod",         "2",     "--snr", "6:2:8",  "--channels",
      "10",            "--frame-len", "5", "--seed", "7",
      "--detectors",   "mmse,tlsd",   "--out", dir.file("a.csv"),
      "--manifest",    dir.file("a.json")};
  CHECK(run_cli(args) == 0);

  auto args2 = args;
  args2[args2.size() - 3] = dir.file("b.csv");
  args2[args2.size() - 1] = dir.file("b.json");
  CHECK(run_cli(args2) == 0);

  const std::string a = read_text_file(dir.file("a.csv"));
  const std::string b = read_text_file(dir.file("b.csv"));
  CHECK(a == b);
  CHECK(a.find(csv_header()) == 0);
  // 2 SNR points x 2 detectors + header
  int lines = 0;
  for (char ch : a) lines += ch == '\n';
  CHECK(lines == 5);

  const std::string manifest = read_text_file(dir.file("a.json"));
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
  CHECK(manifest.find("\"tool\": \"lattice-tomo\"") != std::string::npos);
}

TEST_CASE("simulate config file with flag overrides") {
  TempDir dir;
  write_text_file(dir.file("cfg.toml"),
                  "d = 4\np = 4\nconstellation_m = 2\nsnr = 8\nn_channels = 5\n"
                  "frame_len = 4\nseed = 3\ndetectors = mmse,tlsd\n");
  CHECK(run_cli({"simulate", "--config", dir.file("cfg.toml"), "--out", dir.file("c.csv"),
                 "--manifest", dir.file("c.json")}) == 0);
  const std::string csv = read_text_file(dir.file("c.csv"));
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3);

  // flag overrides the file's seed; run both ways and compare
  CHECK(run_cli({"simulate", "--config", dir.file("cfg.toml"), "--seed", "3", "--out",
                 dir.file("d.csv"), "--manifest", dir.file("d.json")}) == 0);
  CHECK(read_text_file(dir.file("d.csv")) == csv);
}

TEST_CASE("simulate rejects bad configuration with exit 2") {
  TempDir dir;
  CHECK(run_cli({"simulate", "--d", "4", "--p", "2", "--snr", "8", "--out", dir.file("x.csv"),
                 "--manifest", dir.file("x.json")}) == 2);
  CHECK(run_cli({"simulate", "--snr", "oops"}) == 2);
  CHECK(run_cli({"simulate", "--d", "4", "--p", "4", "--detectors", "bogus", "--snr", "8"}) ==
        2);
  CHECK(run_cli({"bogus-subcommand"}) == 2);
}

TEST_CASE("simulate ml guard returns exit 3") {
  TempDir dir;
  CHECK(run_cli({"simulate", "--d", "16", "--p", "16", "--mod", "4", "--snr", "8",
                 "--channels", "2", "--frame-len", "2", "--detectors", "ml", "--out",
                 dir.file("g.csv"), "--manifest", dir.file("g.json")}) == 3);
}

TEST_CASE("decode prints detector outputs and oracle marginals") {
  TempDir dir;
  Mat h = make_mat({{1.0, 0.0}, {0.0, 1.0}});
  write_text_file(dir.file("inst.txt"), format_instance(h, Vec{0.4, -0.9}));

  CHECK(run_cli({"decode", "--input", dir.file("inst.txt"), "--mod", "2", "--sigma2", "1.0",
                 "--oracle"}) == 0);
  CHECK(run_cli({"decode", "--input", dir.file("missing.txt")}) == 2);

  write_text_file(dir.file("bad.txt"), "not an instance");
  CHECK(run_cli({"decode", "--input", dir.file("bad.txt")}) == 2);

  // rank-deficient channel: the ZF inverse does not exist
  write_text_file(dir.file("sing.txt"), "2 2\n1 1\n1 1\n0.5 0.5\n");
  CHECK(run_cli({"decode", "--input", dir.file("sing.txt"), "--detectors", "zf"}) == 1);
}

#ifdef TOMO_CLI_PATH
namespace {

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
  pclose(pipe);
  return out;
}

std::vector<double> grab_row(const std::string& text, const std::string& tag) {
  const auto pos = text.find(tag);
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos);
  std::istringstream row(text.substr(pos + tag.size(), end - pos - tag.size()));
  std::vector<double> vals;
  double v = 0.0;
  while (row >> v) vals.push_back(v);
  return vals;
}

}  // namespace

TEST_CASE("decode binary output matches the exhaustive oracle on a sharp instance") {
  TempDir dir;
  // near-noiseless two-stream instance: posteriors are one-hot for both the
  // decoder and the oracle
  Mat h = make_mat({{1.2, 0.3}, {-0.4, 0.9}});
  const Vec x = matvec(h, Vec{1.0, -1.0});
  write_text_file(dir.file("inst.txt"), format_instance(h, x));

  const std::string out =
      capture(std::string(TOMO_CLI_PATH) + " decode --input " + dir.file("inst.txt") +
              " --mod 2 --sigma2 0.01 --detectors tlsd --oracle");

  const auto p0 = grab_row(out, "tlsd posterior 0:");
  const auto p1 = grab_row(out, "tlsd posterior 1:");
  const auto o0 = grab_row(out, "oracle marginal 0:");
  const auto o1 = grab_row(out, "oracle marginal 1:");
  REQUIRE(p0.size() == 2);
  REQUIRE(o0.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(p0[k] == doctest::Approx(o0[k]).epsilon(1e-6));
    CHECK(p1[k] == doctest::Approx(o1[k]).epsilon(1e-6));
  }
  CHECK(out.find("tlsd: +1 -1") != std::string::npos);
  CHECK(out.find("winner: tlsd") != std::string::npos);
}

TEST_CASE("binary exit codes propagate through the shell") {
  TempDir dir;
  const int rc = std::system((std::string(TOMO_CLI_PATH) + " selftest --quick > " +
                              dir.file("st.log") + " 2>&1")
                                 .c_str());
  CHECK(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) == 0);
  const std::string log = read_text_file(dir.file("st.log"));
  CHECK(log.find("selftest: all invariants hold") != std::string::npos);
}
#endif

TEST_CASE("selftest subcommand passes clean and fails under fault injection") {
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run_cli({"selftest", "--quick"}) == 0);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(run_cli({"selftest", "--quick", "--inject-fault", "skip-qr-column"}) == 1);
  CHECK(run_cli({"selftest", "--quick", "--inject-fault", "warp"}) == 2);
}
