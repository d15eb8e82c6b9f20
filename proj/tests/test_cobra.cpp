#include "sacobra/cobra.hpp"
#include "sacobra/g_suite.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace sacobra;

namespace {

Problem sphere(Index d) {
  Problem p;
  p.name = "sphere";
  p.dim = d;
  p.lower = Vector::Constant(d, -2.0);
  p.upper = Vector::Constant(d, 3.0);
  p.objective = [](const Vector& x) { return (x.array() - 0.5).square().sum(); };
  p.objective_type = "quadratic";
  p.optimum_value = 0.0;
  return p;
}

struct EpsTrace {
  std::vector<double> eps;
  std::vector<std::pair<Index, Index>> counters;
};

EpsTrace feed(const std::string& pattern, const CobraParams& params) {
  CobraState s(2, 1, 10, 1);
  s.eps = params.eps_init;
  EpsTrace t;
  for (char c : pattern) {
    update_epsilon(s, c == 'F', params);
    t.eps.push_back(s.eps);
    t.counters.emplace_back(s.c_feas, s.c_infeas);
  }
  return t;
}

}  // namespace

TEST_CASE("latin hypercube puts one point in every stratum") {
  const Vector lo = (Vector(3) << -1.0, 0.0, 10.0).finished();
  const Vector hi = (Vector(3) << 1.0, 5.0, 20.0).finished();
  const Index n = 12;
  const Matrix x = init_design(lo, hi, n, 77);
  REQUIRE(x.rows() == n);
  for (Index j = 0; j < 3; ++j) {
    std::set<Index> strata;
    for (Index i = 0; i < n; ++i) {
      CHECK(x(i, j) >= lo[j]);
      CHECK(x(i, j) <= hi[j]);
      strata.insert(static_cast<Index>(std::floor((x(i, j) - lo[j]) / (hi[j] - lo[j]) * static_cast<double>(n))));
    }
    CHECK(strata.size() == static_cast<std::size_t>(n));
  }
  CHECK(init_design(lo, hi, n, 77) == x);
  CHECK(init_design(lo, hi, n, 78) != x);
}

TEST_CASE("default parameters") {
  const CobraParams p = CobraParams::defaults(10, 300, 2.0);
  CHECK(p.n_init == 30);
  CHECK(p.eps_init == doctest::Approx(0.01));
  CHECK(p.eps_max == doctest::Approx(0.02));
  CHECK(p.t_feas == 6);
  CHECK(p.t_infeas == 6);
  CHECK(CobraParams::defaults(2, 100).t_feas == 2);
  CHECK(CobraParams::defaults(13, 100).t_feas == 7);
  CHECK_NOTHROW(p.validate(10));
  CobraParams bad = p;
  bad.budget = 30;
  CHECK_THROWS_AS(bad.validate(10), ConfigError);
  bad = p;
  bad.drc.clear();
  CHECK_THROWS_AS(bad.validate(10), ConfigError);
}

TEST_CASE("distance requirement cycles through the schedule") {
  CobraParams p = CobraParams::defaults(2, 50);
  std::vector<double> seen;
  for (Index it = 0; it < 12; ++it) seen.push_back(select_rho(p, it));
  const std::vector<double> expect{0.3, 0.05, 0.001, 0.0005, 0.0, 0.3, 0.05, 0.001, 0.0005, 0.0, 0.3, 0.05};
  CHECK(seen == expect);
  p.drc = kDrcSmall;
  CHECK(select_rho(p, 0) == 0.001);
  CHECK(select_rho(p, 1) == 0.0);
  CHECK(select_rho(p, 2) == 0.001);
}

TEST_CASE("epsilon halves after enough feasible points") {
  CobraParams p = CobraParams::defaults(4, 50);  // thresholds 4
  const EpsTrace t = feed("FFFF", p);
  CHECK(t.eps[2] == p.eps_init);
  CHECK(t.eps[3] == doctest::Approx(p.eps_init / 2));
  CHECK(t.counters[3] == std::make_pair(Index{0}, Index{0}));
}

TEST_CASE("epsilon doubles after enough infeasible points and saturates") {
  CobraParams p = CobraParams::defaults(1, 50);  // thresholds 2
  const EpsTrace t = feed("IIIIII", p);
  CHECK(t.eps[0] == doctest::Approx(0.01));
  CHECK(t.eps[1] == doctest::Approx(0.02));
  CHECK(t.eps[3] == doctest::Approx(0.02));
  CHECK(t.eps[5] == doctest::Approx(0.02));
}

TEST_CASE("epsilon counters are not reset by the other outcome") {
  CobraParams p = CobraParams::defaults(1, 50);
  const EpsTrace t = feed("FIF", p);
  CHECK(t.counters[0] == std::make_pair(Index{1}, Index{0}));
  CHECK(t.counters[1] == std::make_pair(Index{1}, Index{1}));
  CHECK(t.eps[2] == doctest::Approx(0.005));
  CHECK(t.counters[2] == std::make_pair(Index{0}, Index{0}));
}

TEST_CASE("best point changes only on a strictly better feasible point") {
  CobraState s(1, 1, 5, 3);
  const Vector g_ok = Vector::Constant(1, -1.0);
  const Vector g_bad = Vector::Constant(1, 0.5);
  update_best(s, Vector::Constant(1, 0.0), 1.0, g_bad);
  CHECK_FALSE(s.best);
  CHECK(std::isinf(s.history.rows.back().best_f));
  update_best(s, Vector::Constant(1, 0.1), 2.0, g_ok);
  REQUIRE(s.best);
  CHECK(*s.best == 1);
  update_best(s, Vector::Constant(1, 0.2), 2.0, g_ok);
  CHECK(*s.best == 1);
  update_best(s, Vector::Constant(1, 0.3), 1.5, g_bad);
  CHECK(*s.best == 1);
  update_best(s, Vector::Constant(1, 0.4), 1.9, Vector::Constant(1, 0.0));
  CHECK(*s.best == 4);
  CHECK(s.history.rows.back().best_f == 1.9);
  CHECK_THROWS_AS(update_best(s, Vector::Constant(1, 0.5), 0.0, g_ok), ConfigError);
}

TEST_CASE("run uses exactly the budget and the best objective never increases") {
  const Problem p = make_g_problem("G06");
  const CobraParams params = CobraParams::defaults(p.dim, 40, 13.0);
  const RunRecord r = run_cobra(p, params, 5);
  REQUIRE(r.completed());
  CHECK(r.true_evaluations == 40);
  REQUIRE(r.rows.size() == 40);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].eval_index == static_cast<Index>(i + 1));
    if (i > 0) CHECK(r.rows[i].best_f <= r.rows[i - 1].best_f);
  }
  if (r.has_best) {
    const Evaluation e = evaluate(p, r.best_x);
    CHECK(e.f == r.best_f);
    CHECK(e.feasible());
    CHECK(r.rows.back().best_f == r.best_f);
  }
}

TEST_CASE("runs are deterministic per seed") {
  const Problem p = make_g_problem("G08");
  const CobraParams params = CobraParams::defaults(p.dim, 30, 6.0);
  const RunRecord a = run_cobra(p, params, 9);
  const RunRecord b = run_cobra(p, params, 9);
  const RunRecord c = run_cobra(p, params, 10);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_csv(a) == to_csv(b));
  CHECK(to_csv(a) != to_csv(c));
}

TEST_CASE("problems without constraints") {
  const Problem p = sphere(3);
  const RunRecord r = run_cobra(p, CobraParams::defaults(3, 40, 5.0), 1);
  REQUIRE(r.completed());
  REQUIRE(r.has_best);
  CHECK(r.best_f < 1e-3);
  CHECK(r.final_error() == r.best_f);
}

TEST_CASE("record round trip through JSON") {
  const Problem p = make_g_problem("G11");
  const RunRecord r = run_cobra(p, CobraParams::defaults(p.dim, 20, 2.0), 2);
  const RunRecord back = run_record_from_json(to_json(r));
  CHECK(back.problem == r.problem);
  CHECK(back.seed == r.seed);
  CHECK(back.rows.size() == r.rows.size());
  CHECK(back.best_f == r.best_f);
  CHECK(back.best_x == r.best_x);
  CHECK(to_json(back).dump() == to_json(r).dump());
}

TEST_CASE("a failing objective is recorded, not thrown") {
  Problem p = sphere(2);
  p.objective = [](const Vector& x) { return x[0] > 0.0 ? std::nan("") : 1.0; };
  const RunRecord r = run_cobra(p, CobraParams::defaults(2, 20, 5.0), 3);
  CHECK_FALSE(r.completed());
  CHECK(r.error.find("non-finite") != std::string::npos);
}

TEST_CASE("subproblem carries epsilon and the distance constraint") {
  const Problem p = sphere(2);
  const CobraParams params = CobraParams::defaults(2, 20, 5.0);
  CobraState s(2, 0, 20, 4);
  const Matrix x0 = init_design(p.lower, p.upper, 6, s.rng);
  for (Index i = 0; i < 6; ++i) update_best(s, x0.row(i).transpose(), p.objective(x0.row(i).transpose()), Vector());
  const RbfSystem sys(s.population(), params.kernel, params.tail);
  auto models = std::make_shared<const SurrogateBundle>(sys.fit_all(surrogate_targets(s)));
  s.drc_index = 0;
  const SubproblemSpec spec = assemble_subproblem(models, s, params, p, x0.row(0).transpose());
  CHECK(spec.num_constraints == 1);
  s.drc_index = 4;
  const SubproblemSpec no_drc = assemble_subproblem(models, s, params, p, x0.row(0).transpose());
  CHECK(no_drc.num_constraints == 0);
}
