// Copyright 2026 The otsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otsolve/bench.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "otsolve/error.h"
#include "otsolve/rounding.h"

namespace otsolve {

double Sgm10(std::span<const double> times, const std::vector<bool>& solved,
             double time_limit) {
  if (times.empty()) throw Error(ErrorCode::kInvalidArgument, "empty time list");
  if (times.size() != solved.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "times and solved flags differ in length");
  }
  constexpr double kShift = 10.0;
  double log_sum = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = solved[k] ? times[k] : time_limit;
    if (!(t >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative solve time");
    }
    log_sum += std::log(t + kShift);
  }
  return std::exp(log_sum / static_cast<double>(times.size())) - kShift;
}

GeomeanGapResult GeomeanGap(std::span<const double> gaps) {
  if (gaps.empty()) throw Error(ErrorCode::kInvalidArgument, "empty gap list");
  GeomeanGapResult result;
  double log_sum = 0.0;
  for (double g : gaps) {
    if (std::isnan(g)) throw Error(ErrorCode::kInvalidArgument, "gap is NaN");
    if (g < kGapFloor) {
      g = kGapFloor;
      result.floored = true;
    }
    log_sum += std::log(g);
  }
  result.value = std::exp(log_sum / static_cast<double>(gaps.size()));
  return result;
}

namespace {

// Depth-first enumeration of spanning trees of K_{m,n}. Vertices 0..m-1 are
// rows, m..m+n-1 columns; edge e joins row e / n and column e % n.
class TreeEnumerator {
 public:
  explicit TreeEnumerator(const OTProblem& problem)
      : problem_(problem),
        m_(problem.rows()),
        n_(problem.cols()),
        vertices_(m_ + n_),
        parent_(vertices_),
        size_(vertices_, 1),
        degree_(vertices_, 0),
        supply_(vertices_),
        flow_(vertices_ - 1),
        tree_degree_(vertices_),
        tree_(vertices_ - 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
    const double h = std::max({problem.cost().maxCoeff(), 1.0});
    tol_ = 1e-12 * h;
  }

  ExactOracleResult Run() {
    Descend(0, 0);
    if (!have_best_) {
      throw Error(ErrorCode::kNumericalFailure, "no feasible basis found");
    }
    ExactOracleResult result;
    result.objective = best_objective_;
    result.plan = Matrix::Zero(m_, n_);
    for (std::size_t k = 0; k < best_tree_.size(); ++k) {
      const Eigen::Index e = best_tree_[k];
      result.plan(e / n_, e % n_) = std::max(0.0, best_flow_[k]);
    }
    result.objective = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        result.objective += problem_.cost()(i, j) * result.plan(i, j);
      }
    }
    result.p = best_p_;
    result.q = best_q_;
    result.trees = trees_;
    return result;
  }

 private:
  Eigen::Index Find(Eigen::Index v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
  }

  void Descend(Eigen::Index e, Eigen::Index chosen) {
    const Eigen::Index needed = vertices_ - 1 - chosen;
    if (needed == 0) {
      Evaluate();
      return;
    }
    const Eigen::Index edges = m_ * n_;
    if (edges - e < needed) return;
    const Eigen::Index i = e / n_;
    const Eigen::Index col = m_ + e % n_;

    Eigen::Index ri = Find(i);
    Eigen::Index rc = Find(col);
    if (ri != rc) {
      if (size_[ri] < size_[rc]) std::swap(ri, rc);
      parent_[rc] = ri;
      size_[ri] += size_[rc];
      ++degree_[i];
      ++degree_[col];
      tree_[chosen] = e;
      Descend(e + 1, chosen + 1);
      --degree_[i];
      --degree_[col];
      size_[ri] -= size_[rc];
      parent_[rc] = rc;
    }
    // Skipping e is only viable if its endpoints can still be covered later.
    const bool last_of_row = e % n_ == n_ - 1;
    const bool last_of_col = i == m_ - 1;
    if (last_of_row && degree_[i] == 0) return;
    if (last_of_col && degree_[col] == 0) return;
    Descend(e + 1, chosen);
  }

  void Evaluate() {
    ++trees_;
    const Eigen::Index k_edges = vertices_ - 1;
    for (Eigen::Index i = 0; i < m_; ++i) supply_[i] = problem_.f()[i];
    for (Eigen::Index j = 0; j < n_; ++j) supply_[m_ + j] = problem_.g()[j];
    std::fill(tree_degree_.begin(), tree_degree_.end(), 0);
    for (Eigen::Index k = 0; k < k_edges; ++k) {
      ++tree_degree_[tree_[k] / n_];
      ++tree_degree_[m_ + tree_[k] % n_];
    }
    std::vector<bool> done(static_cast<std::size_t>(k_edges), false);
    // Peel leaves until every edge carries its forced flow.
    for (Eigen::Index peeled = 0; peeled < k_edges;) {
      bool progress = false;
      for (Eigen::Index k = 0; k < k_edges; ++k) {
        if (done[k]) continue;
        const Eigen::Index a = tree_[k] / n_;
        const Eigen::Index b = m_ + tree_[k] % n_;
        Eigen::Index leaf = -1;
        Eigen::Index other = -1;
        if (tree_degree_[a] == 1) {
          leaf = a;
          other = b;
        } else if (tree_degree_[b] == 1) {
          leaf = b;
          other = a;
        } else {
          continue;
        }
        const double x = supply_[leaf];
        if (x < -tol_) return;  // infeasible basis
        flow_[k] = x;
        supply_[other] -= x;
        supply_[leaf] = 0.0;
        --tree_degree_[a];
        --tree_degree_[b];
        done[k] = true;
        ++peeled;
        progress = true;
      }
      if (!progress) return;  // cannot happen for a tree
    }
    double objective = 0.0;
    for (Eigen::Index k = 0; k < k_edges; ++k) {
      objective += problem_.cost()(tree_[k] / n_, tree_[k] % n_) * flow_[k];
    }
    const double tie = 1e-12 * (1.0 + std::abs(objective));
    if (have_best_ && objective > best_objective_ + tie) return;
    const bool strictly_better =
        !have_best_ || objective < best_objective_ - tie;
    if (!strictly_better && best_dual_feasible_) return;

    Vector p;
    Vector q;
    const bool dual_feasible = TreeDuals(p, q);
    if (!strictly_better && !dual_feasible) return;
    have_best_ = true;
    best_objective_ = objective;
    best_tree_.assign(tree_.begin(), tree_.end());
    best_flow_.assign(flow_.begin(), flow_.end());
    best_p_ = std::move(p);
    best_q_ = std::move(q);
    best_dual_feasible_ = dual_feasible;
  }

  // Solves p_i + q_j = C_ij on the tree with p_0 = 0; returns whether the
  // reduced costs are non-negative everywhere.
  bool TreeDuals(Vector& p, Vector& q) const {
    std::vector<double> value(static_cast<std::size_t>(vertices_), 0.0);
    std::vector<bool> known(static_cast<std::size_t>(vertices_), false);
    known[0] = true;
    const Eigen::Index k_edges = vertices_ - 1;
    for (Eigen::Index filled = 1; filled < vertices_;) {
      for (Eigen::Index k = 0; k < k_edges; ++k) {
        const Eigen::Index a = tree_[k] / n_;
        const Eigen::Index b = m_ + tree_[k] % n_;
        if (known[a] == known[b]) continue;
        const double c = problem_.cost()(a, b - m_);
        if (known[a]) {
          value[b] = c - value[a];
          known[b] = true;
        } else {
          value[a] = c - value[b];
          known[a] = true;
        }
        ++filled;
      }
    }
    p.resize(m_);
    q.resize(n_);
    for (Eigen::Index i = 0; i < m_; ++i) p[i] = value[i];
    for (Eigen::Index j = 0; j < n_; ++j) q[j] = value[m_ + j];
    for (Eigen::Index i = 0; i < m_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (problem_.cost()(i, j) - p[i] - q[j] < -1e3 * tol_) return false;
      }
    }
    return true;
  }

  const OTProblem& problem_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index vertices_;
  double tol_ = 0.0;
  std::vector<Eigen::Index> parent_;
  std::vector<Eigen::Index> size_;
  std::vector<Eigen::Index> degree_;
  std::vector<double> supply_;
  std::vector<double> flow_;
  std::vector<Eigen::Index> tree_degree_;
  std::vector<Eigen::Index> tree_;
  long trees_ = 0;
  bool have_best_ = false;
  bool best_dual_feasible_ = false;
  double best_objective_ = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> best_tree_;
  std::vector<double> best_flow_;
  Vector best_p_;
  Vector best_q_;
};

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::filesystem::path> ListInstances(
    const std::filesystem::path& source, std::vector<std::string>& missing) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  if (fs::is_directory(source)) {
    for (const auto& entry : fs::directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ot") {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
  }
  std::ifstream list(source);
  if (!list) {
    throw Error(ErrorCode::kInvalidArgument,
                "instance set not found: " + source.string());
  }
  std::string line;
  while (std::getline(list, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    fs::path p = line.substr(first, last - first + 1);
    if (p.is_relative()) p = source.parent_path() / p;
    if (fs::is_regular_file(p)) {
      paths.push_back(p);
    } else {
      missing.push_back(p.string() + ": missing");
    }
  }
  return paths;
}

}  // namespace

ExactOracleResult ExactOracle(const OTProblem& problem) {
  if (problem.rows() + problem.cols() > kOracleMaxSize) {
    throw Error(ErrorCode::kSizeGuard,
                "exact oracle limited to m + n <= " +
                    std::to_string(kOracleMaxSize));
  }
  return TreeEnumerator(problem).Run();
}

std::string MethodSpec::Label() const {
  if (name == "sinkhorn") return name + ":" + FormatDouble(penalty);
  return name;
}

std::vector<MethodSpec> ParseMethods(std::string_view csv) {
  std::vector<MethodSpec> methods;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    const std::string_view token = csv.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) continue;
    if (token == "pdot") {
      methods.push_back({"pdot", 0.0});
    } else if (token == "sinkhorn") {
      methods.push_back({"sinkhorn", 1e-3});
    } else if (token.starts_with("sinkhorn:")) {
      const std::string_view num = token.substr(9);
      double eps = 0.0;
      const auto res = std::from_chars(num.data(), num.data() + num.size(), eps);
      if (res.ec != std::errc() || res.ptr != num.data() + num.size() ||
          !(eps > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "bad sinkhorn penalty in '" + std::string(token) + "'");
      }
      methods.push_back({"sinkhorn", eps});
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown method '" + std::string(token) + "'");
    }
  }
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no methods given");
  return methods;
}

BenchSummary RunBench(const BenchOptions& options) {
  if (options.methods.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no methods given");
  }
  options.pdot.Validate();
  BenchSummary summary;
  const auto paths = ListInstances(options.instances, summary.missing);

  std::vector<MethodSpec> order = options.methods;
  std::stable_partition(order.begin(), order.end(),
                        [](const MethodSpec& s) { return s.name == "pdot"; });

  for (const auto& path : paths) {
    std::optional<OTProblem> problem;
    try {
      problem.emplace(LoadInstance(path));
    } catch (const Error& e) {
      summary.missing.push_back(path.string() + ": " + e.what());
      continue;
    }
    std::optional<double> reference_dual;
    for (const MethodSpec& method : order) {
      BenchRecord record{path.filename().string(), method, {}};
      if (method.name == "pdot") {
        PdhgResult r = Solve(*problem, options.pdot);
        if (r.report.solved) reference_dual = r.report.dual_objective;
        record.report = std::move(r.report);
      } else {
        SinkhornConfig config = options.sinkhorn;
        config.penalty = method.penalty;
        SinkhornResult r = SinkhornSolve(*problem, config);
        // duality_gap keeps the entropic potentials; the pairing with the
        // pdot dual bound is recorded next to it.
        if (reference_dual) {
          r.report.config_echo["gap_vs_pdot_dual"] = SinkhornReportGap(
              *problem, r.plan, r.potentials, reference_dual);
        }
        record.report = std::move(r.report);
      }
      summary.records.push_back(std::move(record));
    }
  }

  for (const MethodSpec& method : options.methods) {
    GroupSummary group;
    group.method = method.Label();
    group.time_limit_s = method.name == "pdot" ? options.pdot.time_limit_s
                                               : options.sinkhorn.time_limit_s;
    std::vector<double> times;
    std::vector<bool> solved;
    std::vector<double> gaps;
    for (const BenchRecord& r : summary.records) {
      if (r.method.Label() != group.method) continue;
      times.push_back(r.report.wall_time_s);
      solved.push_back(r.report.solved);
      gaps.push_back(r.report.duality_gap);
    }
    group.instances = static_cast<long>(times.size());
    group.solved = std::count(solved.begin(), solved.end(), true);
    if (!times.empty()) {
      group.sgm10_time = Sgm10(times, solved, group.time_limit_s);
      const GeomeanGapResult g = GeomeanGap(gaps);
      group.geomean_gap = g.value;
      group.gap_floored = g.floored;
    } else {
      group.sgm10_time = std::numeric_limits<double>::quiet_NaN();
      group.geomean_gap = std::numeric_limits<double>::quiet_NaN();
    }
    summary.groups.push_back(group);
  }
  return summary;
}

void WriteSummaryCsv(const BenchSummary& summary, std::ostream& out) {
  out << "instance,method,penalty,time_s,solved,iterations,relative_kkt,"
         "objective,gap\n";
  for (const BenchRecord& r : summary.records) {
    out << r.instance << ',' << r.method.name << ','
        << (r.method.name == "pdot" ? std::string() : FormatDouble(r.method.penalty))
        << ',' << FormatDouble(r.report.wall_time_s) << ','
        << (r.report.solved ? "true" : "false") << ',' << r.report.iterations
        << ',' << FormatDouble(r.report.final_relative_kkt) << ','
        << FormatDouble(r.report.rounded_objective) << ','
        << FormatDouble(r.report.duality_gap) << '\n';
  }
}

nlohmann::json SummaryToJson(const BenchSummary& summary) {
  nlohmann::json records = nlohmann::json::array();
  for (const BenchRecord& r : summary.records) {
    records.push_back({{"instance", r.instance},
                       {"method", r.method.name},
                       {"penalty", r.method.penalty},
                       {"report", ReportToJson(r.report)}});
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupSummary& g : summary.groups) {
    groups.push_back({{"method", g.method},
                      {"time_limit_s", g.time_limit_s},
                      {"instances", g.instances},
                      {"solved", g.solved},
                      {"sgm10_time", g.sgm10_time},
                      {"geomean_gap", g.geomean_gap},
                      {"gap_floored", g.gap_floored}});
  }
  return {{"records", records},
          {"groups", groups},
          {"missing", summary.missing}};
}

}  // namespace otsolve
