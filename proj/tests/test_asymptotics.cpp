#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "fnmetric/asymptotics.hpp"

using namespace fnmetric;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::BadInput;
}

// Restores FNMETRIC_THREADS on scope exit.
struct ThreadsEnv {
  std::string saved;
  bool had;
  explicit ThreadsEnv(const char* v) {
    const char* old = std::getenv("FNMETRIC_THREADS");
    had = old != nullptr;
    if (had) saved = old;
    if (v) setenv("FNMETRIC_THREADS", v, 1);
    else unsetenv("FNMETRIC_THREADS");
  }
  ~ThreadsEnv() {
    if (had) setenv("FNMETRIC_THREADS", saved.c_str(), 1);
    else unsetenv("FNMETRIC_THREADS");
  }
};

}  // namespace

TEST(Grids, DecadeAndDyadic) {
  const auto d = decade_grid(1, 3);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(d[2], 1e-3);
  const auto g = dyadic_grid(1, 20);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_EQ(g.back(), std::ldexp(1.0, -20));
}

TEST(Grids, BadGridRejected) {
  SweepConfig cfg;
  cfg.l_grid = {1e-2, 1e-1};
  EXPECT_EQ(code_of([&] { run_prop32(cfg); }), ErrorCode::BadGrid);
  cfg.l_grid = {};
  EXPECT_EQ(code_of([&] { run_prop32(cfg); }), ErrorCode::BadGrid);
  cfg.l_grid = {2.0};
  EXPECT_EQ(code_of([&] { run_prop32(cfg); }), ErrorCode::BadGrid);
}

TEST(Workers, ThreadCapFromEnvironment) {
  {
    ThreadsEnv env("1");
    EXPECT_EQ(worker_count(), 1u);
  }
  {
    ThreadsEnv env("0");
    EXPECT_EQ(code_of([] { worker_count(); }), ErrorCode::BadInput);
  }
  {
    ThreadsEnv env("two");
    EXPECT_EQ(code_of([] { worker_count(); }), ErrorCode::BadInput);
  }
  ThreadsEnv env(nullptr);
  EXPECT_GE(worker_count(), 1u);
}

TEST(Workers, ParallelMapKeepsOrder) {
  const auto v = parallel_map(1000, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], i * i);
}

TEST(Workers, ParallelMapRethrowsLowestIndex) {
  try {
    parallel_map(100, [](std::size_t i) -> int {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}

TEST(Workers, SameResultsForAnyThreadCount) {
  SweepConfig cfg;
  std::string one, many;
  {
    ThreadsEnv env("1");
    std::ostringstream os;
    run_prop42(cfg).write_csv(os);
    one = os.str();
  }
  {
    ThreadsEnv env("8");
    std::ostringstream os;
    run_prop42(cfg).write_csv(os);
    many = os.str();
  }
  EXPECT_EQ(one, many);
}

TEST(Experiments, Prop32Passes) {
  const auto r = run_prop32(SweepConfig{});
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.rows.size(), 6u);
  ASSERT_TRUE(r.fitted_slopes.count("tau_prime_t_vs_l"));
  EXPECT_NEAR(r.fitted_slopes.at("tau_prime_t_vs_l"), 1.0, 0.1);
}

TEST(Experiments, Prop42Passes) {
  const auto r = run_prop42(SweepConfig{});
  EXPECT_TRUE(r.pass());
  EXPECT_GE(r.constants.at("K"), 1.0);
  EXPECT_LE(r.constants.at("K"), std::cosh(1.0));
}

TEST(Experiments, SweepRejectsLargeTwist) {
  SweepConfig cfg;
  cfg.t = 3.0;
  EXPECT_EQ(code_of([&] { run_prop32(cfg); }), ErrorCode::BadConfiguration);
}

TEST(Experiments, Seq52TorusPasses) {
  const auto r = run_seq52(Seq52Config{});
  EXPECT_TRUE(r.pass());
  for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_EQ(r.value(i, "d_fn1"), 1.0);
}

TEST(Experiments, Thm62Passes) { EXPECT_TRUE(run_thm62(Thm62Config{}).pass()); }

TEST(Experiments, Thm64Passes) {
  const auto r = run_thm64(Thm64Config{});
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.checks.at("d_P_prime_below_half_by_20"));
}

TEST(Experiments, Thm64RejectsSlowLadder) {
  Thm64Config cfg;
  cfg.ratio = 0.9;
  cfg.last = 5;
  EXPECT_EQ(code_of([&] { run_thm64(cfg); }), ErrorCode::BadBasePoint);
}

TEST(Experiments, Lemma61Passes) {
  const auto r = run_lemma61(Lemma61Config{});
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.checks.at("decay_below_tenth"));
}

TEST(Experiments, WolpertSmallBattery) {
  WolpertConfig cfg;
  cfg.samples = 10;
  const auto r = run_wolpert(cfg);
  EXPECT_TRUE(r.pass());
  EXPECT_LE(r.constants.at("max_deviation"), 1e-6);
}

TEST(Reports, CsvHeaderListsColumnsThenFlags) {
  const auto r = run_seq52(Seq52Config{});
  std::ostringstream os;
  r.write_csv(os);
  const std::string header = os.str().substr(0, os.str().find('\n'));
  EXPECT_EQ(header,
            "eps,d_fn1,d_fn2,log_ratio,tau_prime_t,bound,decay_ratio,d_fn1_exact,decreasing,below_bound,decay,note");
}
