#include "sacobra/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sacobra {

std::optional<Index> solved_at(const RunRecord& record, double f_L, double tau) {
  for (const RunRow& row : record.rows) {
    if (std::isfinite(row.best_f) && row.best_f - f_L <= tau) return row.eval_index;
  }
  return std::nullopt;
}

Index SolveMatrix::solver_index(const std::string& name) const {
  const auto it = std::find(solvers.begin(), solvers.end(), name);
  if (it == solvers.end()) throw ConfigError("unknown solver '" + name + "'");
  return static_cast<Index>(it - solvers.begin());
}

SolveMatrix make_solve_matrix(const std::vector<RunRecord>& records, TargetSource source, double tau) {
  SolveMatrix m;
  m.tau = tau;
  std::map<std::string, Index> problem_row;
  std::map<std::string, Index> solver_col;
  for (const RunRecord& r : records) {
    const std::string key = r.problem + "#" + std::to_string(r.seed);
    if (!problem_row.count(key)) {
      problem_row[key] = static_cast<Index>(m.problems.size());
      m.problems.push_back(key);
      m.dims.push_back(r.dim);
    }
    if (!solver_col.count(r.variant)) {
      solver_col[r.variant] = static_cast<Index>(m.solvers.size());
      m.solvers.push_back(r.variant);
    }
  }
  const auto np = static_cast<Index>(m.problems.size());
  const auto ns = static_cast<Index>(m.solvers.size());
  std::vector<std::vector<const RunRecord*>> grid(static_cast<std::size_t>(np),
                                                  std::vector<const RunRecord*>(static_cast<std::size_t>(ns), nullptr));
  for (const RunRecord& r : records) {
    const Index p = problem_row[r.problem + "#" + std::to_string(r.seed)];
    grid[static_cast<std::size_t>(p)][static_cast<std::size_t>(solver_col[r.variant])] = &r;
  }

  m.t = Matrix::Constant(np, ns, kInf);
  for (Index p = 0; p < np; ++p) {
    const auto& row = grid[static_cast<std::size_t>(p)];
    std::optional<double> f_L;
    for (const RunRecord* r : row) {
      if (r != nullptr && r->optimum && source == TargetSource::KnownOptimum) f_L = *r->optimum;
    }
    if (!f_L) {
      for (const RunRecord* r : row) {
        if (r != nullptr && r->has_best) f_L = f_L ? std::min(*f_L, r->best_f) : r->best_f;
      }
    }
    if (!f_L) continue;
    for (Index s = 0; s < ns; ++s) {
      const RunRecord* r = row[static_cast<std::size_t>(s)];
      if (r == nullptr) continue;
      if (const auto at = solved_at(*r, *f_L, tau)) m.t(p, s) = static_cast<double>(*at);
    }
  }
  return m;
}

double performance_profile(const SolveMatrix& matrix, Index solver, double alpha) {
  const Index np = matrix.t.rows();
  if (np == 0 || alpha < 1.0) return 0.0;
  Index count = 0;
  for (Index p = 0; p < np; ++p) {
    const double best = matrix.t.row(p).minCoeff();
    const double t = matrix.t(p, solver);
    if (std::isfinite(t) && t / best <= alpha) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(np);
}

double data_profile(const SolveMatrix& matrix, Index solver, double alpha) {
  const Index np = matrix.t.rows();
  if (np == 0) return 0.0;
  Index count = 0;
  for (Index p = 0; p < np; ++p) {
    const double t = matrix.t(p, solver);
    if (std::isfinite(t) && t / static_cast<double>(matrix.dims[static_cast<std::size_t>(p)] + 1) <= alpha) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(np);
}

std::vector<double> default_alpha_grid() {
  std::vector<double> a(200);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i + 1);
  return a;
}

ProfileCurve performance_curve(const SolveMatrix& matrix, Index solver, const std::vector<double>& alphas) {
  ProfileCurve c;
  c.alpha = alphas;
  for (double a : alphas) c.fraction.push_back(performance_profile(matrix, solver, a));
  return c;
}

ProfileCurve data_curve(const SolveMatrix& matrix, Index solver, const std::vector<double>& alphas) {
  ProfileCurve c;
  c.alpha = alphas;
  for (double a : alphas) c.fraction.push_back(data_profile(matrix, solver, a));
  return c;
}

std::string profiles_csv(const SolveMatrix& matrix, const std::vector<double>& alphas, bool data) {
  std::ostringstream os;
  os << "alpha";
  for (const auto& s : matrix.solvers) os << ',' << s;
  os << '\n';
  for (double a : alphas) {
    os << a;
    for (Index s = 0; s < static_cast<Index>(matrix.solvers.size()); ++s) {
      os << ',' << (data ? data_profile(matrix, s, a) : performance_profile(matrix, s, a));
    }
    os << '\n';
  }
  return os.str();
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const double a = values[n / 2 - 1];
  const double b = values[n / 2];
  return std::isinf(a) || std::isinf(b) ? (a == b ? a : kInf) : 0.5 * (a + b);
}

double plog_impact_ratio(const std::vector<RunRecord>& plain, const std::vector<RunRecord>& with_plog, double optimum) {
  if (plain.empty() || with_plog.empty()) throw ConfigError("plog_impact_ratio: empty record list");
  auto errors = [optimum](const std::vector<RunRecord>& rs) {
    std::vector<double> e;
    for (const RunRecord& r : rs) e.push_back(r.has_best ? std::abs(r.best_f - optimum) : kInf);
    return e;
  };
  const double a = median(errors(plain));
  const double b = median(errors(with_plog));
  if ((a == 0.0 && b == 0.0) || (std::isinf(a) && std::isinf(b))) return 1.0;
  if (b == 0.0) return kInf;
  return a / b;
}

WilcoxonResult wilcoxon_greater(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("wilcoxon: paired samples differ in length");
  std::vector<double> diff;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0 && !std::isnan(d)) diff.push_back(d);
  }
  WilcoxonResult res;
  res.n = static_cast<Index>(diff.size());
  if (diff.empty()) return res;

  std::vector<std::size_t> order(diff.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(diff[a]) < std::abs(diff[b]); });
  std::vector<double> rank(diff.size());
  bool ties = false;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(diff[order[j + 1]]) == std::abs(diff[order[i]])) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (diff[i] > 0.0) res.w_plus += rank[i];

  const auto n = static_cast<std::size_t>(res.n);
  if (!ties && n <= 60) {
    // counts[w] = number of sign patterns with W+ = w
    const std::size_t max_w = n * (n + 1) / 2;
    std::vector<double> counts(max_w + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t w = max_w; w >= k; --w) counts[w] += counts[w - k];
    double tail = 0.0;
    for (auto w = static_cast<std::size_t>(res.w_plus); w <= max_w; ++w) tail += counts[w];
    res.p_value = tail / std::ldexp(1.0, static_cast<int>(n));
    res.exact = true;
    return res;
  }
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return res;
  const double z = (res.w_plus - mean - 0.5) / std::sqrt(var);
  res.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
  return res;
}

}  // namespace sacobra
