/*
 * Copyright 2026 The ellid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Drives the built command-line tool as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Result run(const std::string& args) {
  const std::string cmd = std::string(ELLID_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("ellid_cli_" + std::to_string(getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    fs::create_directories((dir_ / name).parent_path());
    std::ofstream(dir_ / name) << text;
  }

  static std::vector<std::string> lines(const std::string& file) {
    std::ifstream in(file);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

const std::string kData = ELLID_DATA_DIR;

TEST_F(Cli, IdentifyMap1) {
  const auto r = run("identify " + kData + "/points/map1.txt --svg --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ellipses 6 "), std::string::npos) << r.out;
  const auto rows = lines(path("o/ellipses.csv"));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "index,xc,yc,r1,r2,theta,cluster_size");
  const auto t = lines(path("o/timings.csv"));
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[0], "stage,ms");
  EXPECT_EQ(t[1].rfind("cluster,", 0), 0u);
  EXPECT_EQ(t[4].rfind("total,", 0), 0u);
  EXPECT_TRUE(fs::exists(path("o/ellipses.svg")));
}

TEST_F(Cli, IdentifyThreePoints) {
  write("tri.txt", "0 0\n1 0\n0 1\n");
  const auto r = run("identify " + path("tri.txt") + " --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(lines(path("o/ellipses.csv")).size(), 2u);
}

TEST_F(Cli, IdentifyErrors) {
  write("bad.txt", "0 0\n1 0\nzero one\n");
  auto r = run("identify " + path("bad.txt") + " --out " + path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.txt:3"), std::string::npos) << r.out;

  write("empty.txt", "# nothing\n\n");
  r = run("identify " + path("empty.txt") + " --out " + path("o"));
  EXPECT_EQ(r.code, 3) << r.out;

  write("cfg.json", R"({"vigmm": {"nmax": 3}})");
  r = run("identify " + kData + "/points/map1.txt --config " + path("cfg.json") + " --out " +
          path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("vigmm.nmax"), std::string::npos) << r.out;

  EXPECT_EQ(run("identify").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("identify " + kData + "/points/map1.txt --method spectral --out " + path("o")).code,
            2);
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* cmd : {"identify", "track", "run", "bench"}) {
    EXPECT_NE(r.out.find(cmd), std::string::npos) << cmd;
  }
}

TEST_F(Cli, TrackIdenticalFramesAreStill) {
  std::ifstream src(kData + "/points/map1.txt");
  std::stringstream body;
  body << src.rdbuf();
  write("frames/0.txt", body.str());
  write("frames/100.txt", body.str());
  const auto r = run("track " + path("frames") + " --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = lines(path("o/tracks.csv"));
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "time,id,xc,yc,r1,r2,theta,vx,vy,omega,cov_trace");
  for (std::size_t i = 7; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::vector<double> v;
    for (std::string c; std::getline(ss, c, ',');) v.push_back(std::stod(c));
    ASSERT_EQ(v.size(), 11u);
    EXPECT_DOUBLE_EQ(v[0], 0.1);
    EXPECT_NEAR(v[7], 0.0, 1e-9);
    EXPECT_NEAR(v[8], 0.0, 1e-9);
    EXPECT_NEAR(v[9], 0.0, 1e-9);
  }
}

TEST_F(Cli, TrackSingleFrameStartsAtRest) {
  fs::create_directories(path("frames"));
  fs::copy_file(kData + "/frames/map2/0.txt", path("frames/0.txt"));
  const auto r = run("track " + path("frames") + " --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = lines(path("o/tracks.csv"));
  ASSERT_GE(rows.size(), 2u);
  std::stringstream ss(rows[1]);
  std::vector<std::string> v;
  for (std::string c; std::getline(ss, c, ',');) v.push_back(c);
  EXPECT_EQ(v[0], "0");
  EXPECT_EQ(std::stod(v[7]), 0.0);
  EXPECT_EQ(std::stod(v[9]), 0.0);
}

TEST_F(Cli, TrackErrors) {
  write("frames/abc.txt", "0 0\n");
  EXPECT_EQ(run("track " + path("frames") + " --out " + path("o")).code, 2);
  fs::remove(path("frames/abc.txt"));
  write("frames/0.txt", "0 0\nbroken\n");
  const auto r = run("track " + path("frames") + " --out " + path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("0.txt:2"), std::string::npos) << r.out;
  fs::create_directories(path("none"));
  EXPECT_EQ(run("track " + path("none") + " --out " + path("o")).code, 3);
}

TEST_F(Cli, RunMap1) {
  const auto r = run("run --map 1 --svg --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("reached true"), std::string::npos) << r.out;
  const auto rows = lines(path("o/episode.csv"));
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0],
            "time,px,py,vx,vy,points,ellipses,tracks,identification_ms,planning_ms,"
            "solver_status,solver_iterations,max_slack,min_margin");
  EXPECT_TRUE(fs::exists(path("o/frames/frame_0000.svg")));
}

TEST_F(Cli, RunZeroDuration) {
  write("zero.json", R"({"name": "zero", "goal": [5, 0], "duration": 0})");
  const auto r = run("run " + path("zero.json") + " --out " + path("o"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("reached false"), std::string::npos) << r.out;
  EXPECT_EQ(lines(path("o/episode.csv")).size(), 1u);
}

TEST_F(Cli, RunCollisionExitsFour) {
  write("cfg.json", R"({"mpc": {"u_min": [0, 0], "u_max": [0, 0]}})");
  const auto r = run("run --map 3 --config " + path("cfg.json") + " --out " + path("o"));
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_TRUE(fs::exists(path("o/episode.csv")));
}

TEST_F(Cli, RunErrors) {
  EXPECT_EQ(run("run --out " + path("o")).code, 2);
  EXPECT_EQ(run("run --map 9 --out " + path("o")).code, 2);
  write("bad.json", "{not json");
  EXPECT_EQ(run("run " + path("bad.json") + " --out " + path("o")).code, 2);
}

TEST_F(Cli, BenchDeterministicColumns) {
  const auto a = run("bench --reps 1 --seed 4 --out " + path("a"));
  const auto b = run("bench --reps 1 --seed 4 --out " + path("b"));
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  const auto ra = lines(path("a/bench.csv")), rb = lines(path("b/bench.csv"));
  ASSERT_EQ(ra.size(), 13u);
  ASSERT_EQ(ra.size(), rb.size());
  EXPECT_EQ(ra[0], "map,pipeline,repetitions,ellipses,ident_median_ms,ident_p95_ms,reached,"
                   "time_to_goal,collisions,min_clearance");
  auto strip_timing = [](const std::string& row) {
    std::stringstream ss(row);
    std::vector<std::string> c;
    for (std::string x; std::getline(ss, x, ',');) c.push_back(x);
    c.erase(c.begin() + 4, c.begin() + 6);
    std::string out;
    for (const auto& x : c) out += x + ",";
    return out;
  };
  for (std::size_t i = 1; i < ra.size(); ++i) EXPECT_EQ(strip_timing(ra[i]), strip_timing(rb[i]));
  EXPECT_EQ(ra[1].rfind("map1,ours,", 0), 0u);
}

TEST_F(Cli, SampleAndMapsRegenerateFixtures) {
  ASSERT_EQ(run("maps " + path("maps")).code, 0);
  for (int i = 1; i <= 5; ++i) {
    const std::string name = "map" + std::to_string(i) + ".json";
    EXPECT_EQ(lines(path("maps/" + name)), lines(kData + "/maps/" + name)) << name;
  }
  ASSERT_EQ(run("sample --map 2 --frames 10 --out " + path("f")).code, 0);
  for (int ms = 0; ms < 1000; ms += 100) {
    const std::string name = std::to_string(ms) + ".txt";
    EXPECT_EQ(lines(path("f/" + name)), lines(kData + "/frames/map2/" + name)) << name;
  }
}

}  // namespace
