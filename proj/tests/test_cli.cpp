#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "clab/examples.hpp"
#include "clab/serialize.hpp"

#ifndef CLAB_BIN
#define CLAB_BIN "clab"
#endif

using namespace clab;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(CLAB_BIN) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string capture(const std::string& args) {
  std::string cmd = std::string(CLAB_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
  pclose(pipe);
  return out;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/clab_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("check accepts the shipped bundle and rejects corrupted tables") {
  TempFile good("good.json");
  write_json_atomic(good.path, cocycle_to_json(example_char2(1).rho));
  CHECK(run("check " + good.path) == 0);

  // corrupt: constant table violates the order relation
  TempFile bad("bad.json");
  ojson j = cocycle_to_json(example_char2(1).rho);
  for (auto& row : j["tables"])
    for (auto& v : row) v = ojson::array({1});
  write_json_atomic(bad.path, j);
  CHECK(run("check " + bad.path) == 1);

  // malformed JSON
  TempFile broken("broken.json");
  {
    std::ofstream out(broken.path);
    out << "{ not json";
  }
  CHECK(run("check " + broken.path) == 2);
  CHECK(run("check /nonexistent.json") == 2);
}

TEST_CASE("solver commands report both outcomes through exit codes") {
  TempFile bundle("bundle.json");
  write_json_atomic(bundle.path, cocycle_to_json(example_char2(1).rho));
  CHECK(run("type " + bundle.path + " --k 2") == 0);
  CHECK(run("cl-solve " + bundle.path) == 0);
  CHECK(run("ergodic " + bundle.path) == 1); // negative with certificate
  CHECK(run("mackey " + bundle.path) == 0);
  CHECK(run("hk-group " + bundle.path) == 0);

  // an ergodic input exits 0
  FinAbGroup gamma({4}), z({2});
  auto base = std::make_shared<FiniteSystem>(
      make_rotational(z, make_hom(gamma, z, {GroupElement{1}})));
  Cocycle rho = make_cocycle(base, circle_fiber(2), {{1, 0}});
  TempFile erg("ergodic.json");
  write_json_atomic(erg.path, cocycle_to_json(rho));
  CHECK(run("ergodic " + erg.path) == 0);
}

TEST_CASE("factor and norm commands run on plain systems") {
  ExampleBundle b = example_char2(1);
  TempFile sys("system.json");
  write_json_atomic(sys.path, system_to_json(*b.rho.base));
  CHECK(run("factors " + sys.path + " --k 1") == 0);

  TempFile gowers("gowers.json");
  ojson j;
  j["system"] = system_to_json(*b.rho.base);
  j["f"] = ojson::array({ojson::array({1.0, 0.0}), ojson::array({1.0, 0.0})});
  write_json_atomic(gowers.path, j);
  std::string out = capture("gowers " + gowers.path + " --k 2");
  CHECK(out.find("\"norm\": 1.0") != std::string::npos);
}

TEST_CASE("reports are bit-identical across runs") {
  std::string a = capture("example oddp --p 3 --n 1 --verify");
  std::string b = capture("example oddp --p 3 --n 1 --verify");
  CHECK(a == b);
  CHECK(!a.empty());
  std::string c = capture("torus skew --N 2000 --seed 7");
  std::string d = capture("torus skew --N 2000 --seed 7");
  CHECK(c == d);
}

TEST_CASE("reports can be written to a file") {
  TempFile report("report.json");
  CHECK(run("example char2 --n 1 --verify --out " + report.path) == 0);
  ojson j = load_json(report.path);
  CHECK(j["name"] == "char2");
  CHECK(j.contains("claims"));
}

TEST_CASE("torus subcommands succeed with default parameters") {
  CHECK(run("torus tdk --N 2000") == 0);
  CHECK(run("torus heisenberg --N 2000") == 0);
  CHECK(run("torus skew --N 2000") == 0);
}

TEST_CASE("the claim suites of the shipped families drive through the front end") {
  for (int n = 1; n <= 3; ++n)
    CHECK(run("example char2 --n " + std::to_string(n) + " --verify") == 0);
  CHECK(run("example oddp --p 3 --n 1 --verify") == 0);
  CHECK(run("example oddp --p 3 --n 2 --verify") == 0);
  CHECK(run("example oddp --p 5 --n 1 --verify") == 0);
  CHECK(run("example char2 --n 99 --verify") == 2); // out of range
  CHECK(run("example unknown --verify") == 2);
}

TEST_CASE("the enumeration guard can be tightened through the environment") {
  TempFile bundle("guarded.json");
  write_json_atomic(bundle.path, cocycle_to_json(example_char2(2).rho));
  std::string cmd = std::string("CLAB_MAX_ENUM=4 ") + CLAB_BIN + " hk-group " +
                    bundle.path + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
  CHECK(run("hk-group " + bundle.path) == 0);
}

TEST_SUITE_END();
