// Copyright 2026 The KPH Authors.
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

// kph: command-line front end for scoring, hierarchy construction and
// evaluation over a summary-set directory.

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "kph/kph.hpp"

namespace {

namespace fs = std::filesystem;
using kph::io::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kph::DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw kph::InvariantError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

// Records inputs, writes outputs and finally the run manifest.
class Run {
 public:
  Run(std::string subcommand, fs::path out_dir)
      : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {}

  void note_input(const fs::path& path) {
    const std::string digest = sha256_hex(read_file(path));
    std::lock_guard<std::mutex> lock(mu_);
    inputs_[path.generic_string()] = digest;
  }

  void write(const std::string& relative, const std::string& content) {
    std::lock_guard<std::mutex> lock(mu_);
    const fs::path path = out_dir_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw kph::DataError("cannot write '" + path.string() + "'");
    outputs_[relative] = sha256_hex(content);
  }

  json& config() { return config_; }
  json& extra() { return extra_; }

  void finish() {
    json files_in = json::array(), files_out = json::array();
    for (const auto& [p, d] : inputs_) files_in.push_back({{"path", p}, {"sha256", d}});
    for (const auto& [p, d] : outputs_) files_out.push_back({{"path", p}, {"sha256", d}});
    json doc = {{"subcommand", subcommand_},
                {"tool_version", kph::kVersion},
                {"config", config_},
                {"inputs", files_in},
                {"outputs", files_out}};
    for (auto it = extra_.begin(); it != extra_.end(); ++it) doc[it.key()] = it.value();
    fs::create_directories(out_dir_);
    std::ofstream out(out_dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  fs::path out_dir_;
  std::mutex mu_;
  std::map<std::string, std::string> inputs_, outputs_;
  json config_ = json::object();
  json extra_ = json::object();
};

// Runs fn(0..n-1) on up to `jobs` threads. The failure with the lowest index
// is rethrown so errors do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Input resolution

struct DataSet {
  std::vector<kph::SummaryEntry> entries;
  std::map<std::string, const kph::SummaryEntry*> by_id;

  const kph::SummaryEntry* find(const std::string& id) const {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  }
};

DataSet load_data(Run& run, const std::string& root) {
  DataSet d;
  if (root.empty()) return d;
  d.entries = kph::load_summary_set(root);
  for (const auto& e : d.entries) {
    for (const char* f : {kph::kSummaryFile, kph::kKeyPointsFile, kph::kGoldFile})
      if (e.has(f)) run.note_input(e.file(f));
    d.by_id[e.summary_id] = &e;
  }
  return d;
}

struct ScoreSource {
  std::string summary_id;  // empty: taken from the file header
  fs::path path;
};

std::string header_summary_id(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && !line.empty() && line.front() == '#')
    if (line.rfind("# summary_id=", 0) == 0) return line.substr(13);
  return {};
}

// A score location is either one score file or a directory holding
// <summary>/scores.tsv.
std::vector<ScoreSource> find_score_files(const fs::path& root) {
  std::vector<ScoreSource> out;
  if (fs::is_regular_file(root)) {
    out.push_back({header_summary_id(root), root});
    if (out.back().summary_id.empty()) out.back().summary_id = root.stem().string();
    return out;
  }
  if (!fs::is_directory(root))
    throw kph::DataError("'" + root.string() + "' does not exist");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::is_regular_file(e.path() / kph::kScoresFile))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) out.push_back({d.filename().string(), d / kph::kScoresFile});
  if (out.empty())
    throw kph::DataError("no summaries found under '" + root.string() + "'");
  return out;
}

kph::ScoreMatrix with_summary_id(const kph::ScoreMatrix& m, const std::string& id) {
  return kph::ScoreMatrix::from_function(
      id, m.ids(), [&](std::size_t i, std::size_t j) { return m(i, j); },
      m.provenance());
}

// Loads score files, restricted to the unfiltered key points of summaries
// whose key points are known.
std::vector<kph::ScoreMatrix> load_scores(Run& run, const std::string& where,
                                          const DataSet& data) {
  std::vector<kph::ScoreMatrix> out;
  std::set<std::string> seen;
  for (const ScoreSource& src : find_score_files(where)) {
    run.note_input(src.path);
    const kph::SummaryEntry* e = data.find(src.summary_id);
    std::vector<kph::KeyPointId> declared;
    std::set<kph::KeyPointId> ignore;
    if (e && e->key_points) {
      declared = e->key_points->unfiltered_ids();
      for (const auto& kp : e->key_points->key_points())
        if (kp.filtered) ignore.insert(kp.id);
    }
    const bool restrict = e && e->key_points;
    kph::ScoreMatrix m = kph::io::load_external_scores(
        src.path.string(), restrict ? &declared : nullptr, restrict ? &ignore : nullptr);
    if (m.summary_id().empty()) {
      m = with_summary_id(m, src.summary_id);
    } else if (m.summary_id() != src.summary_id) {
      throw kph::DataError("'" + src.path.string() + "' holds scores of summary '" +
                           m.summary_id() + "', expected '" + src.summary_id + "'");
    }
    if (!seen.insert(m.summary_id()).second)
      throw kph::DataError("summary '" + m.summary_id() + "' scored twice");
    out.push_back(std::move(m));
  }
  return out;
}

// Gold hierarchies from a JSON-lines file or a summary-set directory.
std::vector<kph::Hierarchy> load_gold(Run& run, const std::string& where) {
  if (fs::is_regular_file(where)) {
    run.note_input(where);
    return kph::io::load_hierarchies(where);
  }
  std::vector<kph::Hierarchy> out;
  for (const auto& e : kph::load_summary_set(where)) {
    for (const char* f : {kph::kSummaryFile, kph::kGoldFile})
      if (e.has(f)) run.note_input(e.file(f));
    if (e.gold) out.push_back(*e.gold);
  }
  if (out.empty()) throw kph::DataError("no gold hierarchies found under '" + where + "'");
  return out;
}

kph::Domain domain_of(const DataSet& data, const std::string& id) {
  const kph::SummaryEntry* e = data.find(id);
  return e ? e->domain : kph::Domain::kOther;
}

std::string score_file_text(const kph::ScoreMatrix& m) {
  std::ostringstream out;
  kph::io::write_score_matrix(out, m);
  return out.str();
}

json relation_json(const kph::RelationScores& r) {
  return {{"precision", kph::io::round6(r.precision)},
          {"recall", kph::io::round6(r.recall)},
          {"f1", kph::io::round6(r.f1)},
          {"predicted", r.predicted},
          {"gold", r.gold},
          {"correct", r.correct}};
}

json report_json(const kph::EvalReport& report) {
  json domains = json::object();
  for (const auto& [d, m] : report.domains) {
    json entry = relation_json(m.relations);
    if (m.auc) entry["auc"] = kph::io::round6(*m.auc);
    domains[std::string(kph::to_string(d))] = entry;
  }
  json doc = {{"domains", domains}, {"macro_f1", kph::io::round6(report.macro_f1)}};
  if (report.macro_auc) doc["macro_auc"] = kph::io::round6(*report.macro_auc);
  if (!report.chosen_tau.empty()) {
    json tau = json::object();
    for (const auto& [id, t] : report.chosen_tau) tau[id] = kph::io::round6(t);
    doc["tau"] = tau;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Global {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct ScoreOptions {
  std::string data;
  std::string scorer = "bininc";
  double theta_m = kph::kDefaultMatchThreshold;
};

void cmd_score(const Global& g, const ScoreOptions& o) {
  Run run("score", g.out_dir);
  run.config() = {{"data", o.data}, {"scorer", o.scorer}, {"theta_m", o.theta_m}};
  const kph::Scorer scorer = *kph::parse_scorer(o.scorer);
  DataSet data = load_data(run, o.data);
  std::vector<const kph::SummaryEntry*> todo;
  for (const auto& e : data.entries)
    if (e.has(kph::kMatchesFile)) todo.push_back(&e);
  if (todo.empty()) throw kph::DataError("no summaries found under '" + o.data + "'");
  std::vector<std::optional<kph::ScoreMatrix>> result(todo.size());
  parallel_for(todo.size(), g.jobs, [&](std::size_t k) {
    const kph::SummaryEntry& e = *todo[k];
    run.note_input(e.file(kph::kMatchesFile));
    auto m = kph::io::load_match_matrix(e.file(kph::kMatchesFile).string());
    auto s = kph::score_match_matrix(m, scorer, e.summary_id, o.theta_m);
    if (e.key_points) s = s.restrict_to(e.key_points->unfiltered_ids());
    result[k] = std::move(s);
  });
  for (std::size_t k = 0; k < todo.size(); ++k)
    run.write(todo[k]->summary_id + "/" + kph::kScoresFile, score_file_text(*result[k]));
  run.finish();
}

struct PairOptions {
  std::string a, b, data;
};

std::vector<std::pair<kph::ScoreMatrix, kph::ScoreMatrix>> paired_scores(
    Run& run, const PairOptions& o) {
  DataSet data = load_data(run, o.data);
  auto a = load_scores(run, o.a, data), b = load_scores(run, o.b, data);
  std::map<std::string, const kph::ScoreMatrix*> by_id;
  for (const auto& m : b) by_id[m.summary_id()] = &m;
  if (a.size() != b.size())
    throw kph::DataError("score sets cover " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " summaries");
  std::vector<std::pair<kph::ScoreMatrix, kph::ScoreMatrix>> out;
  for (auto& m : a) {
    auto it = by_id.find(m.summary_id());
    if (it == by_id.end())
      throw kph::DataError("summary '" + m.summary_id() + "' missing from '" + o.b + "'");
    out.emplace_back(m, *it->second);
  }
  return out;
}

void cmd_combine(const Global& g, const PairOptions& o) {
  Run run("combine", g.out_dir);
  run.config() = {{"a", o.a}, {"b", o.b}, {"data", o.data}, {"method", "average"}};
  for (const auto& [a, b] : paired_scores(run, o))
    run.write(a.summary_id() + "/" + kph::kScoresFile,
              score_file_text(kph::combine_average(a, b)));
  run.finish();
}

void cmd_correlate(const Global& g, const PairOptions& o) {
  Run run("correlate", g.out_dir);
  run.config() = {{"a", o.a}, {"b", o.b}, {"data", o.data}};
  std::ostringstream csv;
  csv << "summary_id,pairs,spearman\n";
  std::vector<double> xs, ys;
  auto cell = [](std::span<const double> x, std::span<const double> y) {
    try {
      return kph::io::fixed6(kph::spearman(x, y));
    } catch (const kph::DataError&) {
      return std::string("undefined");
    }
  };
  for (const auto& [a, b] : paired_scores(run, o)) {
    std::vector<double> x, y;
    kph::append_paired_scores(a, b, x, y);
    csv << a.summary_id() << ',' << x.size() << ',' << cell(x, y) << '\n';
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
  }
  csv << "pooled," << xs.size() << ',' << cell(xs, ys) << '\n';
  run.write("correlation.csv", csv.str());
  run.finish();
}

struct BuildOptions {
  std::string scores, data;
  std::string algorithm = "tncf";
  double tau = 0.5;
  std::size_t max_passes = 100;
  bool loo = false;
  double grid_step = 0.01;
};

std::vector<double> tau_grid(double step) {
  const auto n = static_cast<long>(std::llround(1.0 / step));
  std::vector<double> grid;
  for (long k = 0; k <= n; ++k) grid.push_back(std::min(1.0, double(k) / double(n)));
  return grid;
}

void cmd_build(const Global& g, const BuildOptions& o, const std::string& name) {
  Run run(name, g.out_dir);
  const std::string scores_at = o.scores.empty() ? o.data : o.scores;
  if (scores_at.empty()) throw kph::DataError("no score location given (--scores or --data)");
  run.config() = {{"scores", scores_at},
                  {"data", o.data},
                  {"algorithm", o.algorithm},
                  {"max_passes", o.max_passes},
                  {"loo", o.loo}};
  if (o.loo)
    run.config()["grid_step"] = o.grid_step;
  else
    run.config()["tau"] = o.tau;
  DataSet data = load_data(run, o.data);
  auto scores = load_scores(run, scores_at, data);
  kph::ConstructionConfig config{o.tau, *kph::parse_algorithm(o.algorithm), o.max_passes};

  std::vector<double> tau(scores.size(), o.tau);
  if (o.loo) {
    std::vector<kph::TuningInput> input;
    for (const auto& s : scores) {
      const kph::SummaryEntry* e = data.find(s.summary_id());
      if (!e || !e->gold)
        throw kph::DataError("leave-one-out tuning needs a gold hierarchy for '" +
                             s.summary_id() + "'");
      input.push_back({&s, &*e->gold, e->domain});
    }
    auto tuned = kph::loo_threshold_tuning(input, kph::hierarchy_predictor(config),
                                           tau_grid(o.grid_step));
    json chosen = json::object();
    for (std::size_t k = 0; k < scores.size(); ++k) {
      tau[k] = tuned.tau.at(scores[k].summary_id());
      chosen[scores[k].summary_id()] = kph::io::round6(tau[k]);
    }
    run.extra()["tuned_tau"] = chosen;
    run.write("tuning.json", report_json(tuned.report).dump(2) + "\n");
  }

  std::vector<kph::Hierarchy> built(scores.size());
  parallel_for(scores.size(), g.jobs, [&](std::size_t k) {
    kph::ConstructionConfig c = config;
    c.tau = tau[k];
    built[k] = kph::build_hierarchy(scores[k], c, domain_of(data, scores[k].summary_id()));
  });
  std::ostringstream out;
  for (const auto& h : built) kph::io::write_hierarchy(out, h);
  run.write("hierarchies.jsonl", out.str());
  run.finish();
}

struct EvalOptions {
  std::string predicted, gold, data;
};

void cmd_eval(const Global& g, const EvalOptions& o) {
  Run run("eval", g.out_dir);
  run.config() = {{"predicted", o.predicted}, {"gold", o.gold}, {"data", o.data}};
  DataSet data = load_data(run, o.data);
  run.note_input(o.predicted);
  auto predicted = kph::io::load_hierarchies(o.predicted);
  auto gold = load_gold(run, o.gold);
  for (const auto& h : predicted) {
    const kph::SummaryEntry* e = data.find(h.summary_id);
    if (e && e->key_points) {
      auto report = kph::validate_hierarchy(h, *e->key_points);
      if (!report.ok())
        throw kph::StructuralError("predicted hierarchy '" + h.summary_id + "': " +
                                   std::string(kph::to_string(report.violations[0].kind)) +
                                   ": " + report.violations[0].message);
    }
  }
  auto report = kph::evaluate_hierarchies(predicted, gold);
  run.write("report.json", report_json(report).dump(2) + "\n");
  std::ostringstream csv;
  csv << "domain,precision,recall,f1,predicted,gold,correct\n";
  for (const auto& [d, m] : report.domains) {
    const auto& r = m.relations;
    csv << kph::to_string(d) << ',' << kph::io::fixed6(r.precision) << ','
        << kph::io::fixed6(r.recall) << ',' << kph::io::fixed6(r.f1) << ',' << r.predicted
        << ',' << r.gold << ',' << r.correct << '\n';
  }
  csv << "macro,,," << kph::io::fixed6(report.macro_f1) << ",,,\n";
  run.write("metrics.csv", csv.str());
  run.finish();
}

struct CurveOptions {
  std::string scores, gold, data;
  double min_recall = 0.1;
};

void cmd_prcurve(const Global& g, const CurveOptions& o) {
  Run run("prcurve", g.out_dir);
  const std::string scores_at = o.scores.empty() ? o.data : o.scores;
  const std::string gold_at = o.gold.empty() ? o.data : o.gold;
  if (scores_at.empty() || gold_at.empty())
    throw kph::DataError("prcurve needs scores and gold (--scores/--gold or --data)");
  run.config() = {{"scores", scores_at}, {"gold", gold_at}, {"data", o.data},
                  {"min_recall", o.min_recall}};
  DataSet data = load_data(run, o.data);
  auto scores = load_scores(run, scores_at, data);
  auto gold = load_gold(run, gold_at);
  std::map<std::string, const kph::Hierarchy*> gold_by_id;
  for (const auto& h : gold) gold_by_id[h.summary_id] = &h;
  std::map<kph::Domain, std::pair<std::vector<const kph::ScoreMatrix*>,
                                  std::vector<const kph::Hierarchy*>>>
      by_domain;
  for (const auto& s : scores) {
    auto it = gold_by_id.find(s.summary_id());
    if (it == gold_by_id.end())
      throw kph::DataError("no gold hierarchy for summary '" + s.summary_id() + "'");
    by_domain[it->second->domain].first.push_back(&s);
    by_domain[it->second->domain].second.push_back(it->second);
  }
  std::ostringstream curve_csv, auc_csv;
  curve_csv << "domain,threshold,recall,precision\n";
  auc_csv << "domain,auc\n";
  double sum = 0.0;
  for (const auto& [d, group] : by_domain) {
    auto curve = kph::pr_curve(group.first, group.second);
    for (const auto& p : curve.points)
      curve_csv << kph::to_string(d) << ',' << kph::io::fixed6(p.threshold) << ','
                << kph::io::fixed6(p.recall) << ',' << kph::io::fixed6(p.precision) << '\n';
    const double auc = kph::auc_at_min_recall(curve, o.min_recall);
    sum += auc;
    auc_csv << kph::to_string(d) << ',' << kph::io::fixed6(auc) << '\n';
  }
  auc_csv << "macro," << kph::io::fixed6(sum / double(by_domain.size())) << '\n';
  run.write("pr_curve.csv", curve_csv.str());
  run.write("auc.csv", auc_csv.str());
  run.finish();
}

struct WeakLabelOptions {
  std::string scores, data;
  double threshold = 0.5;
  double ratio = 5.0;
};

void cmd_weaklabel(const Global& g, const WeakLabelOptions& o) {
  Run run("weaklabel", g.out_dir);
  const std::string scores_at = o.scores.empty() ? o.data : o.scores;
  run.config() = {{"scores", scores_at}, {"data", o.data}, {"threshold", o.threshold},
                  {"negative_ratio", o.ratio}, {"seed", g.seed}};
  DataSet data = load_data(run, o.data);
  auto scores = load_scores(run, scores_at, data);
  std::vector<kph::ScoredSummary> input;
  for (const auto& s : scores) {
    const kph::SummaryEntry* e = data.find(s.summary_id());
    if (!e || !e->key_points)
      throw kph::DataError("weak labels need key point texts for '" + s.summary_id() + "'");
    input.push_back({&s, &*e->key_points});
  }
  auto set = kph::export_weak_labels(input, {o.threshold, o.ratio, g.seed});
  if (set.no_positives)
    std::cerr << "kph: warning: no pair scores above " << o.threshold
              << "; no weak labels written\n";
  std::ostringstream out;
  kph::io::write_weak_labels(out, set);
  run.write("weak_labels.jsonl", out.str());
  run.extra()["counts"] = {{"positives", set.positives},
                           {"negatives", set.negatives},
                           {"available_negatives", set.available_negatives}};
  run.finish();
}

struct ValidateOptions {
  std::string data;
};

// Returns false when any file fails validation.
bool cmd_validate(const Global& g, const ValidateOptions& o) {
  Run run("validate", g.out_dir);
  run.config() = {{"data", o.data}};
  json summaries = json::array();
  bool ok = true;
  auto issue = [](std::string kind, std::string message) {
    return json{{"kind", std::move(kind)}, {"message", std::move(message)}};
  };
  std::optional<DataSet> data;
  try {
    data = load_data(run, o.data);
  } catch (const kph::DataError& e) {
    ok = false;
    summaries.push_back({{"summary_id", nullptr}, {"issues", json::array({issue("load", e.what())})}});
  }
  if (data && data->entries.empty())
    throw kph::DataError("no summaries found under '" + o.data + "'");
  if (data) {
    for (const auto& e : data->entries) {
      json issues = json::array();
      if (e.gold) {
        auto report = e.key_points ? kph::validate_hierarchy(*e.gold, *e.key_points)
                                   : kph::validate_structure(*e.gold);
        for (const auto& v : report.violations)
          issues.push_back(issue(std::string(kph::to_string(v.kind)), v.message));
      }
      auto check = [&](const char* file, auto&& load) {
        if (!e.has(file)) return;
        run.note_input(e.file(file));
        try {
          load(e.file(file).string());
        } catch (const kph::DataError& err) {
          issues.push_back(issue("parse", err.what()));
        }
      };
      check(kph::kMatchesFile, [](const std::string& p) { kph::io::load_match_matrix(p); });
      check(kph::kScoresFile, [&](const std::string& p) {
        std::vector<kph::KeyPointId> declared;
        std::set<kph::KeyPointId> ignore;
        if (e.key_points) {
          declared = e.key_points->unfiltered_ids();
          for (const auto& kp : e.key_points->key_points())
            if (kp.filtered) ignore.insert(kp.id);
        }
        kph::io::load_external_scores(p, e.key_points ? &declared : nullptr,
                                      e.key_points ? &ignore : nullptr);
      });
      if (!issues.empty()) ok = false;
      summaries.push_back({{"summary_id", e.summary_id},
                           {"domain", std::string(kph::to_string(e.domain))},
                           {"issues", issues}});
    }
  }
  run.write("validation.json", json{{"ok", ok}, {"summaries", summaries}}.dump(2) + "\n");
  run.finish();
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key point hierarchy construction and evaluation"};
  app.set_version_flag("--version", kph::kVersion);
  app.set_config("--config", "", "Read options from a TOML/INI file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Summaries processed concurrently")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  std::vector<std::string> scorer_names, algorithm_names;
  for (auto s : {kph::Scorer::kBinInc, kph::Scorer::kAPinc, kph::Scorer::kWeedsPrec,
                 kph::Scorer::kClarkeDE})
    scorer_names.emplace_back(kph::to_string(s));
  for (auto a : {kph::Algorithm::kReducedForest, kph::Algorithm::kTncf,
                 kph::Algorithm::kGreedy, kph::Algorithm::kGreedyGs})
    algorithm_names.emplace_back(kph::to_string(a));

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score key point pairs from match matrices");
  score_cmd->add_option("--data", score.data, "Summary-set directory")->required();
  score_cmd->add_option("--scorer", score.scorer)
      ->check(CLI::IsMember(scorer_names))
      ->capture_default_str();
  score_cmd->add_option("--theta-m", score.theta_m, "Match likelihood threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  PairOptions combine, correlate;
  auto* combine_cmd = app.add_subcommand("combine", "Average two score sets");
  auto* correlate_cmd = app.add_subcommand("correlate", "Spearman correlation of two score sets");
  for (auto [cmd, o] : {std::pair{combine_cmd, &combine}, std::pair{correlate_cmd, &correlate}}) {
    cmd->add_option("--a", o->a, "First score file or directory")->required();
    cmd->add_option("--b", o->b, "Second score file or directory")->required();
    cmd->add_option("--data", o->data, "Summary-set directory with key points");
  }

  BuildOptions build, tune;
  tune.loo = true;
  auto* build_cmd = app.add_subcommand("build", "Construct hierarchies from scores");
  auto* tune_cmd = app.add_subcommand("tune", "Build with leave-one-out threshold tuning");
  for (auto [cmd, o] : {std::pair{build_cmd, &build}, std::pair{tune_cmd, &tune}}) {
    cmd->add_option("--scores", o->scores, "Score file or directory (default: --data)");
    cmd->add_option("--data", o->data, "Summary-set directory");
    cmd->add_option("--algorithm", o->algorithm)
        ->check(CLI::IsMember(algorithm_names))
        ->capture_default_str();
    cmd->add_option("--tau", o->tau, "Edge threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--max-passes", o->max_passes, "TNCF pass limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--grid-step", o->grid_step, "Threshold grid step for tuning")
        ->check(CLI::Range(0.001, 1.0))
        ->capture_default_str();
  }
  build_cmd->add_flag("--loo", build.loo, "Tune tau per summary by leave-one-out");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Relation F1 of predicted hierarchies");
  eval_cmd->add_option("--predicted", eval.predicted, "Predicted hierarchies (JSON lines)")
      ->required();
  eval_cmd->add_option("--gold", eval.gold, "Gold hierarchies file or summary-set directory")
      ->required();
  eval_cmd->add_option("--data", eval.data, "Summary-set directory with key points");

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("prcurve", "Precision/recall curve and AUC of scores");
  curve_cmd->add_option("--scores", curve.scores, "Score file or directory (default: --data)");
  curve_cmd->add_option("--gold", curve.gold, "Gold file or directory (default: --data)");
  curve_cmd->add_option("--data", curve.data, "Summary-set directory");
  curve_cmd->add_option("--min-recall", curve.min_recall)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  WeakLabelOptions weak;
  auto* weak_cmd = app.add_subcommand("weaklabel", "Export weakly labelled key point pairs");
  weak_cmd->add_option("--scores", weak.scores, "Score file or directory (default: --data)");
  weak_cmd->add_option("--data", weak.data, "Summary-set directory with key points")
      ->required();
  weak_cmd->add_option("--threshold", weak.threshold)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  weak_cmd->add_option("--ratio", weak.ratio, "Negatives per positive")
      ->check(CLI::Range(1.0, 1e9))
      ->capture_default_str();

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check every file of a summary set");
  validate_cmd->add_option("--data", validate.data, "Summary-set directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*score_cmd) cmd_score(g, score);
    if (*combine_cmd) cmd_combine(g, combine);
    if (*correlate_cmd) cmd_correlate(g, correlate);
    if (*build_cmd) cmd_build(g, build, "build");
    if (*tune_cmd) cmd_build(g, tune, "tune");
    if (*eval_cmd) cmd_eval(g, eval);
    if (*curve_cmd) cmd_prcurve(g, curve);
    if (*weak_cmd) cmd_weaklabel(g, weak);
    if (*validate_cmd && !cmd_validate(g, validate)) {
      std::cerr << "kph: validation failed; see validation.json\n";
      return kExitData;
    }
  } catch (const kph::DataError& e) {
    std::cerr << "kph: error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "kph: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "kph: error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "kph: internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
