#include "cgmp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "cgmp/error.hpp"
#include "cgmp/ik.hpp"
#include "cgmp/random.hpp"
#include "cgmp/scenario.hpp"
#include "json_util.hpp"

namespace cgmp {

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& scenario,
                         const std::string& planner, const std::string& target,
                         std::size_t trial) {
  return mix_seed({base_seed, hash_string(scenario), hash_string(planner), hash_string(target),
                   static_cast<std::uint64_t>(trial)});
}

double path_length(const std::vector<Configuration>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

namespace {

struct LoadedScenario {
  std::string id;
  AssembledScenario assembled;
  std::optional<GraspSet> grasps;
  std::optional<IkSolutionSet> ik;
};

struct Job {
  const LoadedScenario* scenario;
  std::string planner;
  std::string target;
  std::size_t trial;
  std::optional<std::size_t> ik_index;  // into scenario->ik->solutions
};

bool wants(const BenchOptions& o, const char* planner) {
  return std::find(o.planners.begin(), o.planners.end(), planner) != o.planners.end();
}

RunRecord run_job(const Job& job, const BenchOptions& options) {
  const LoadedScenario& ls = *job.scenario;
  PlannerParams params = options.params;
  params.seed = trial_seed(options.base_seed, ls.id, job.planner, job.target, job.trial);
  const AssembledScenario& a = ls.assembled;
  const PlanningProblem problem{a.chain, a.scene, a.q_start};
  PlanResult r;
  if (job.ik_index) {
    const IkSolution& sol = ls.ik->solutions[*job.ik_index];
    r = plan_ik_rrt(problem, sol.q, params, ls.grasps->grasps[sol.grasp_index].pose);
  } else {
    r = plan_jplus_rrt(problem, *ls.grasps, params);
  }
  return {ls.id,       job.planner,  params.seed,          job.target, r.success,
          r.time_s,    r.iterations, path_length(r.path), r.final_distance};
}

}  // namespace

BenchResult run_benchmark(const std::vector<std::filesystem::path>& scenarios,
                          const BenchOptions& options) {
  if (options.runs < 1) throw Error(ErrorKind::kInvalidArgument, "runs must be >= 1");
  for (const auto& p : options.planners) {
    if (p != kJPlusRrt && p != kIkRrt) {
      throw Error(ErrorKind::kInvalidArgument, "unknown planner '" + p + "'");
    }
  }
  options.params.validate();
  BenchResult result;
  std::vector<std::unique_ptr<LoadedScenario>> loaded;
  for (const auto& path : scenarios) {
    auto ls = std::make_unique<LoadedScenario>();
    ls->id = path.stem().string();
    try {
      const Scenario s = load_scenario(path);
      ls->id = s.id;
      ls->assembled = assemble(s);
      if (s.grasps_file.empty()) throw Error(ErrorKind::kIo, "scenario has no grasp file");
      ls->grasps = load_grasp_set(resolve(s, s.grasps_file));
      ScenarioMeta meta{s.id, ls->grasps->grasps.size(), std::nullopt, 0.0};
      if (wants(options, kIkRrt)) {
        try {
          if (s.ik_file.empty()) throw Error(ErrorKind::kIo, "scenario has no IK file");
          ls->ik = load_ik_set(resolve(s, s.ik_file));
          meta.ik_count = ls->ik->solutions.size();
          meta.ik_time_s = ls->ik->compute_time_s;
        } catch (const Error& e) {
          result.errors.push_back({s.id, kIkRrt, e.what()});
        }
      }
      result.meta.push_back(meta);
    } catch (const Error& e) {
      for (const auto& p : options.planners) result.errors.push_back({ls->id, p, e.what()});
      continue;
    }
    loaded.push_back(std::move(ls));
  }

  // Job order is the persisted record order.
  std::sort(loaded.begin(), loaded.end(),
            [](const auto& a, const auto& b) { return a->id < b->id; });
  std::vector<Job> jobs;
  for (const auto& ls : loaded) {
    std::vector<std::string> planners = options.planners;
    std::sort(planners.begin(), planners.end());
    planners.erase(std::unique(planners.begin(), planners.end()), planners.end());
    for (const auto& planner : planners) {
      if (planner == kJPlusRrt) {
        for (std::size_t t = 0; t < options.runs; ++t) {
          jobs.push_back({ls.get(), planner, "any", t, std::nullopt});
        }
      } else if (ls->ik) {
        std::vector<std::size_t> order(ls->ik->solutions.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        // Targets sort numerically by grasp index.
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
          return ls->ik->solutions[x].grasp_index < ls->ik->solutions[y].grasp_index;
        });
        for (std::size_t k : order) {
          const std::string target = std::to_string(ls->ik->solutions[k].grasp_index);
          for (std::size_t t = 0; t < options.runs; ++t) {
            jobs.push_back({ls.get(), planner, target, t, k});
          }
        }
      }
    }
  }

  std::vector<std::optional<RunRecord>> slots(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        slots[i] = run_job(jobs[i], options);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(options.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::set<std::pair<std::string, std::string>> reported;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (slots[i]) {
      if (options.on_record) options.on_record(*slots[i]);
      result.records.push_back(std::move(*slots[i]));
    } else if (reported.insert({jobs[i].scenario->id, jobs[i].planner}).second) {
      // Start-in-collision and similar problems fail every trial the same way.
      result.errors.push_back({jobs[i].scenario->id, jobs[i].planner, failures[i]});
    }
  }
  return result;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& where) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kFormat, where + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.scenario << ',' << r.planner << ',' << r.seed << ',' << r.target << ','
        << (r.success ? 1 : 0) << ',' << num(r.time_s) << ',' << r.iterations << ','
        << num(r.path_len) << ',' << num(r.final_dist) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader) {
    throw Error(ErrorKind::kFormat, source_name + ": missing or unexpected CSV header");
  }
  std::vector<RunRecord> records;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(n);
    const auto c = split_csv(line);
    if (c.size() != 9) throw Error(ErrorKind::kFormat, where + ": expected 9 fields");
    if (c[4] != "0" && c[4] != "1") throw Error(ErrorKind::kFormat, where + ": bad success flag");
    records.push_back({c[0], c[1], parse_number<std::uint64_t>(c[2], where), c[3], c[4] == "1",
                       parse_number<double>(c[5], where), parse_number<std::uint64_t>(c[6], where),
                       parse_number<double>(c[7], where), parse_number<double>(c[8], where)});
  }
  return records;
}

std::vector<RunRecord> load_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_records_csv(in, path.string());
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const std::vector<ScenarioMeta>& meta) {
  std::vector<RunRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.scenario, a.planner, a.target, a.seed, a.time_s, a.iterations) <
           std::tie(b.scenario, b.planner, b.target, b.seed, b.time_s, b.iterations);
  });
  std::map<std::string, const ScenarioMeta*> by_id;
  for (const auto& m : meta) by_id[m.scenario] = &m;

  std::map<std::pair<std::string, std::string>, SummaryRow> rows;
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : sorted) groups[{r.scenario, r.planner}].push_back(&r);
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.scenario = key.first;
    row.planner = key.second;
    row.runs = group.size();
    double sum_t = 0.0, sum_it = 0.0;
    std::set<std::string> targets, reached;
    for (const RunRecord* r : group) {
      row.successes += r->success ? 1 : 0;
      sum_t += r->time_s;
      sum_it += static_cast<double>(r->iterations);
      targets.insert(r->target);
      if (r->success) reached.insert(r->target);
    }
    const double n = static_cast<double>(row.runs);
    row.success_rate = static_cast<double>(row.successes) / n;
    row.mean_time = sum_t / n;
    row.mean_iterations = sum_it / n;
    double ss = 0.0;
    for (const RunRecord* r : group) ss += (r->time_s - row.mean_time) * (r->time_s - row.mean_time);
    row.std_time = std::sqrt(ss / n);
    if (row.planner == kIkRrt) {
      row.ik_count = targets.size();
      row.reachable_targets = reached.size();
    }
    rows[key] = row;
  }
  // IK-RRT rows for scenarios whose IK set is empty carry no records.
  for (const auto& m : meta) {
    if (m.ik_count && *m.ik_count == 0 && !rows.count({m.scenario, kIkRrt})) {
      SummaryRow row;
      row.scenario = m.scenario;
      row.planner = kIkRrt;
      row.ik_count = 0;
      row.reachable_targets = 0;
      row.note = "no IK solutions";
      rows[{m.scenario, kIkRrt}] = row;
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [key, row] : rows) {
    if (auto it = by_id.find(row.scenario); it != by_id.end()) {
      row.grasp_count = it->second->grasp_count;
      if (it->second->ik_count) row.ik_count = it->second->ik_count;
      row.ik_time_s = it->second->ik_time_s;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<std::pair<double, double>> cumulative_success_curve(
    const std::vector<RunRecord>& records, CurveAxis axis, const std::vector<double>& grid) {
  if (records.empty()) throw Error(ErrorKind::kInvalidArgument, "curve needs at least one record");
  std::vector<double> solved;
  for (const auto& r : records) {
    if (r.success) {
      solved.push_back(axis == CurveAxis::kTime ? r.time_s : static_cast<double>(r.iterations));
    }
  }
  std::sort(solved.begin(), solved.end());
  const double n = static_cast<double>(records.size());
  std::vector<std::pair<double, double>> curve;
  for (double x : grid) {
    const auto k = std::upper_bound(solved.begin(), solved.end(), x) - solved.begin();
    curve.emplace_back(x, static_cast<double>(k) / n);
  }
  return curve;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string format_table(const std::vector<SummaryRow>& rows) {
  std::map<std::string, std::map<std::string, const SummaryRow*>> by_scenario;
  for (const auto& r : rows) by_scenario[r.scenario][r.planner] = &r;
  std::ostringstream out;
  const std::vector<std::pair<std::string, std::size_t>> cols{
      {"scenario", 8}, {"|G|", 5},          {"|G_ik|", 7},     {"*", 4},
      {"IK-RRT succ", 12}, {"IK-RRT time", 14}, {"J+RRT succ", 11}, {"J+RRT time", 14},
      {"IK batch s", 11}};
  for (const auto& [name, w] : cols) out << pad(name, w) << ' ';
  out << '\n';
  auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "-"; };
  for (const auto& [id, planners] : by_scenario) {
    const SummaryRow* ik = planners.count(kIkRrt) ? planners.at(kIkRrt) : nullptr;
    const SummaryRow* jp = planners.count(kJPlusRrt) ? planners.at(kJPlusRrt) : nullptr;
    const SummaryRow* any = ik ? ik : jp;
    auto succ = [](const SummaryRow* r) {
      if (!r) return std::string("-");
      return r->runs == 0 ? std::string("0.00") : fixed(r->success_rate, 2);
    };
    auto time = [](const SummaryRow* r) {
      if (!r || r->runs == 0) return std::string("-");
      return fixed(r->mean_time, 2) + "/" + fixed(r->std_time, 2);
    };
    out << pad(id, 8) << ' ' << pad(opt(any->grasp_count), 5) << ' '
        << pad(ik ? opt(ik->ik_count) : "-", 7) << ' '
        << pad(ik ? opt(ik->reachable_targets) : "-", 4) << ' ' << pad(succ(ik), 12) << ' '
        << pad(time(ik), 14) << ' ' << pad(succ(jp), 11) << ' ' << pad(time(jp), 14) << ' '
        << pad(ik ? fixed(ik->ik_time_s, 2) : "-", 11);
    if (ik && !ik->note.empty()) out << "  " << ik->note;
    out << '\n';
  }
  out << "time: mean/std over all runs in seconds (population std); IK-RRT times exclude the "
         "IK batch\n";
  return out.str();
}

void save_summary_json(const std::vector<SummaryRow>& rows, const std::vector<BenchError>& errors,
                       const std::filesystem::path& path) {
  using detail::json;
  auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scenario", r.scenario},
                   {"planner", r.planner},
                   {"runs", r.runs},
                   {"successes", r.successes},
                   {"success_rate", r.success_rate},
                   {"mean_time_s", r.mean_time},
                   {"std_time_s", r.std_time},
                   {"mean_iterations", r.mean_iterations},
                   {"grasp_count", opt(r.grasp_count)},
                   {"ik_count", opt(r.ik_count)},
                   {"reachable_targets", opt(r.reachable_targets)},
                   {"ik_time_s", r.ik_time_s},
                   {"note", r.note}});
  }
  json errs = json::array();
  for (const auto& e : errors) {
    errs.push_back({{"scenario", e.scenario}, {"planner", e.planner}, {"message", e.message}});
  }
  detail::write_json({{"format", detail::kFormatVersion},
                      {"std_convention", "population"},
                      {"rows", arr},
                      {"errors", errs}},
                     path);
}

void write_bench_outputs(const BenchResult& result, const BenchOptions& options,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "curves");
  {
    std::ofstream out(dir / "records.csv");
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + (dir / "records.csv").string());
    write_records_csv(result.records, out);
  }
  const auto rows = summarize(result.records, result.meta);
  save_summary_json(rows, result.errors, dir / "summary.json");
  {
    std::ofstream out(dir / "summary.txt");
    out << format_table(rows);
  }
  std::map<std::pair<std::string, std::string>, std::vector<RunRecord>> groups;
  for (const auto& r : result.records) groups[{r.scenario, r.planner}].push_back(r);
  for (const auto& [key, recs] : groups) {
    std::uint64_t max_it = 1;
    for (const auto& r : recs) max_it = std::max(max_it, r.iterations);
    for (CurveAxis axis : {CurveAxis::kTime, CurveAxis::kIterations}) {
      const double top =
          axis == CurveAxis::kTime ? options.params.max_time : static_cast<double>(max_it);
      std::vector<double> grid;
      for (int i = 0; i <= 100; ++i) grid.push_back(top * i / 100.0);
      const auto curve = cumulative_success_curve(recs, axis, grid);
      const std::string name = key.first + "_" + key.second +
                               (axis == CurveAxis::kTime ? "_time.csv" : "_iterations.csv");
      std::ofstream out(dir / "curves" / name);
      out << (axis == CurveAxis::kTime ? "time_s" : "iterations") << ",fraction\n";
      for (const auto& [x, f] : curve) out << num(x) << ',' << num(f) << '\n';
    }
  }
}

}  // namespace cgmp
